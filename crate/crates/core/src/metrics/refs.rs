//! URL and structural-reference counters.

use std::sync::LazyLock;

use regex::Regex;

use crate::corpus::DocUnit;

static SCHEME_URL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"(?i)https?://[^\s"'<>]*"#).expect("valid regex"));
static HREF: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r#"(?i)\bhref\s*=\s*(?:"[^"]*"|'[^']*'|[^\s>]+)"#).expect("valid regex")
});
static LINK_TAG: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\{@link(?:plain)?\s[^}]*\}").expect("valid regex"));

/// Counts links in a unit.
///
/// With raw markup present, `http(s)://` occurrences, `href` attributes and
/// `{@link ...}` / `{@linkplain ...}` tags are collected from the markup and
/// overlapping spans count once (an `href` holding a URL is one link).
/// Otherwise `http(s)://` occurrences in the plain description are counted.
pub fn count_urls(unit: &DocUnit) -> usize {
    match unit.description_html.as_deref() {
        Some(html) => {
            let mut spans: Vec<(usize, usize)> = SCHEME_URL
                .find_iter(html)
                .chain(HREF.find_iter(html))
                .chain(LINK_TAG.find_iter(html))
                .map(|m| (m.start(), m.end()))
                .collect();
            spans.sort_unstable();
            let mut count = 0;
            let mut reach = 0;
            for (start, end) in spans {
                if count == 0 || start >= reach {
                    count += 1;
                    reach = end;
                } else {
                    reach = reach.max(end);
                }
            }
            count
        }
        None => SCHEME_URL.find_iter(&unit.description_text).count(),
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(is_ident_start) && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '$')
}

/// `java.util.List`: two or more identifier segments, not all single letters
/// (so `e.g` and `i.e` are not names).
fn is_qualified_name(word: &str) -> bool {
    let segments: Vec<&str> = word.split('.').collect();
    segments.len() >= 2
        && segments.iter().all(|s| is_ident(s))
        && segments.iter().any(|s| s.chars().count() > 1)
}

/// `toString()`, `add(int`, `List.of(`: a name immediately followed by `(`.
fn is_call_form(word: &str) -> bool {
    word.find('(').is_some_and(|open| {
        let name = &word[..open];
        is_ident(name) || is_qualified_name(name)
    })
}

/// `MyClass`, `toString`, `IOException`: a lowercase letter directly followed by
/// an uppercase one, or an uppercase run of two or more followed by at least
/// two lowercase letters. Plain acronyms such as `URL` or `URLs` do not qualify.
fn is_camel_case(word: &str) -> bool {
    let letters: Vec<char> = word.chars().collect();
    let lower_upper = letters
        .windows(2)
        .any(|w| w[0].is_lowercase() && w[1].is_uppercase());
    if lower_upper {
        return true;
    }
    letters.windows(4).any(|w| {
        w[0].is_uppercase() && w[1].is_uppercase() && w[2].is_lowercase() && w[3].is_lowercase()
    })
}

/// Counts whitespace-delimited words that look like code element names:
/// qualified names, call forms or camel-case identifiers. Every occurrence
/// counts.
pub fn count_struct_refs(text: &str) -> usize {
    text.split_whitespace()
        .filter(|raw| {
            let lead = raw.trim_start_matches(['(', '[', '{', '"', '\'', '`', '<']);
            let core = lead.trim_end_matches(['.', ',', ';', ':', '!', '?', '"', '\'', '`', ')', ']', '}', '>']);
            is_qualified_name(core) || is_call_form(lead) || (is_ident(core) && is_camel_case(core))
        })
        .count()
}
