//! Markup stripping for description text.

/// HTML element names recognised as tags. Anything else in angle brackets,
/// such as `List<String>` or `Map<K,V>`, is left as text. Single-letter
/// elements that collide with common type parameters (`s`, `u`, `q`) are
/// deliberately absent.
const ELEMENTS: &[&str] = &[
    "a", "abbr", "address", "article", "aside", "b", "big", "blockquote", "body", "br", "caption",
    "center", "cite", "code", "col", "colgroup", "dd", "del", "dfn", "div", "dl", "dt", "em",
    "font", "footer", "h1", "h2", "h3", "h4", "h5", "h6", "head", "header", "hr", "html", "i",
    "img", "ins", "kbd", "li", "link", "main", "meta", "nav", "ol", "p", "pre", "samp", "script",
    "section", "small", "span", "strike", "strong", "style", "sub", "sup", "table", "tbody", "td",
    "tfoot", "th", "thead", "title", "tr", "tt", "ul", "var", "wbr",
];

/// Elements that separate words when removed.
const BLOCK_ELEMENTS: &[&str] = &[
    "address", "article", "aside", "blockquote", "body", "br", "caption", "center", "dd", "div",
    "dl", "dt", "footer", "h1", "h2", "h3", "h4", "h5", "h6", "head", "header", "hr", "html", "li",
    "main", "nav", "ol", "p", "pre", "section", "table", "tbody", "td", "tfoot", "th", "thead",
    "title", "tr", "ul",
];

/// Removes tags, decodes `&amp; &lt; &gt; &quot; &nbsp;` and numeric
/// entities, collapses whitespace runs and trims.
///
/// The transformation is applied until the output is stable, which makes the
/// function idempotent even for double-escaped input such as `&amp;lt;b&amp;gt;`.
pub fn strip_markup(html: &str) -> String {
    let mut current = strip_once(html);
    loop {
        let next = strip_once(&current);
        if next == current {
            return current;
        }
        current = next;
    }
}

/// Collapses every whitespace run to one space and trims both ends.
pub fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn strip_once(input: &str) -> String {
    let bytes = input.as_bytes();
    let mut out = String::with_capacity(input.len());
    let mut i = 0;
    while i < input.len() {
        match bytes[i] {
            b'<' => {
                if let Some((end, block)) = markup_extent(input, i) {
                    if block {
                        out.push(' ');
                    }
                    i = end;
                    continue;
                }
                out.push('<');
                i += 1;
            }
            b'&' => {
                if let Some((decoded, len)) = decode_entity(&input[i..]) {
                    out.push(decoded);
                    i += len;
                    continue;
                }
                out.push('&');
                i += 1;
            }
            _ => {
                let ch = input[i..].chars().next().expect("in bounds");
                out.push(ch);
                i += ch.len_utf8();
            }
        }
    }
    collapse_whitespace(&out)
}

/// If a tag, comment or declaration starts at `start`, returns the byte index
/// just past it and whether it separates words. Unterminated markup extends to
/// the end of the input.
fn markup_extent(input: &str, start: usize) -> Option<(usize, bool)> {
    let rest = &input[start..];
    let close_after = |from: usize, pat: &str| {
        rest[from..]
            .find(pat)
            .map(|p| start + from + p + pat.len())
            .unwrap_or(input.len())
    };
    if rest.starts_with("<!--") {
        return Some((close_after(4, "-->"), false));
    }
    let after = rest.as_bytes().get(1).copied();
    if matches!(after, Some(b'!') | Some(b'?'))
        && rest.as_bytes().get(2).is_some_and(|c| c.is_ascii_alphabetic())
    {
        return Some((close_after(2, ">"), false));
    }
    let name_start = if after == Some(b'/') { 2 } else { 1 };
    let name_len = rest[name_start..]
        .bytes()
        .take_while(|c| c.is_ascii_alphanumeric())
        .count();
    if name_len == 0 {
        return None;
    }
    let name = rest[name_start..name_start + name_len].to_ascii_lowercase();
    if !ELEMENTS.contains(&name.as_str()) {
        return None;
    }
    match rest.as_bytes().get(name_start + name_len) {
        None | Some(b'>') | Some(b'/') => {}
        Some(c) if c.is_ascii_whitespace() => {}
        _ => return None,
    }
    Some((close_after(name_start + name_len, ">"), BLOCK_ELEMENTS.contains(&name.as_str())))
}

fn decode_entity(rest: &str) -> Option<(char, usize)> {
    const NAMED: [(&str, char); 5] = [
        ("&amp;", '&'),
        ("&lt;", '<'),
        ("&gt;", '>'),
        ("&quot;", '"'),
        ("&nbsp;", ' '),
    ];
    for (name, ch) in NAMED {
        if rest.starts_with(name) {
            return Some((ch, name.len()));
        }
    }
    let body = rest.strip_prefix("&#")?;
    let semi = body.find(';')?;
    let digits = &body[..semi];
    let code = match digits.strip_prefix(['x', 'X']) {
        Some(hex) if !hex.is_empty() && hex.len() <= 6 => u32::from_str_radix(hex, 16).ok()?,
        None if !digits.is_empty() && digits.len() <= 7 => digits.parse::<u32>().ok()?,
        _ => return None,
    };
    let ch = char::from_u32(code)?;
    Some((ch, 2 + semi + 1))
}
