//! Ingestion of offline Javadoc pages.
//!
//! The expected layout is the Java SE 7 method-detail section: a heading that
//! reads "Method Detail", followed by one heading per method. Each method block
//! holds a `<pre>` signature and a `<div class="block">` description:
//!
//! ```html
//! <h3>Method Detail</h3>
//! <h4>size</h4>
//! <pre>public&nbsp;int&nbsp;size()</pre>
//! <div class="block">Returns the number of elements in this list.</div>
//! ```

use super::{strip_markup, CorpusError, DocUnit};

const SECTION_MARKER: &str = "method detail";

/// Extracts one unit per method-detail block, in document order.
///
/// `source_id` is typically the page path relative to the documentation root
/// (`java/util/List.html`); package and class names are derived from it.
pub fn parse_javadoc_html(document: &str, source_id: &str) -> Result<Vec<DocUnit>, CorpusError> {
    let lower = document.to_ascii_lowercase();
    let section_start = lower.find(SECTION_MARKER).ok_or(CorpusError::NoMethodBlocks)?;
    let Some((level, first)) = next_heading(&lower, section_start, 1) else {
        return Err(CorpusError::NoMethodBlocks);
    };

    // Method headings sit one level below the section heading; skip it if the
    // marker was inside a heading of its own.
    let (level, first) = if lower[section_start..first].contains("</h") {
        (level, first)
    } else {
        match next_heading(&lower, first + 3, 1) {
            Some(found) if found.0 > level => found,
            _ => (level, first),
        }
    };

    let section_end = next_heading_at_most(&lower, first + 3, level - 1).unwrap_or(lower.len());
    let mut starts = vec![first];
    let mut cursor = first + 3;
    while let Some(pos) = find_heading_exact(&lower[..section_end], cursor, level) {
        starts.push(pos);
        cursor = pos + 3;
    }

    let (package_name, class_name) = names_from_source(source_id);
    let mut units = Vec::with_capacity(starts.len());
    for (index, &start) in starts.iter().enumerate() {
        let end = starts.get(index + 1).copied().unwrap_or(section_end);
        let block = &document[start..end];
        let block_lower = &lower[start..end];

        let close = format!("</h{level}");
        let name = block_lower
            .find('>')
            .map(|gt| {
                let body_end = block_lower.find(&close).unwrap_or(block.len());
                strip_markup(&block[gt + 1..body_end.max(gt + 1)])
            })
            .unwrap_or_default();

        let prototype = element_body(block, block_lower, "pre")
            .map(strip_markup)
            .filter(|p| !p.is_empty())
            .ok_or(CorpusError::MalformedBlock(index))?;

        let description_html = description_block(block, block_lower).map(str::to_string);
        let description_text = description_html.as_deref().map(strip_markup).unwrap_or_default();

        units.push(DocUnit {
            id: format!("{source_id}#{name}:{index}"),
            package_name: package_name.clone(),
            class_name: class_name.clone(),
            prototype,
            description_html,
            description_text,
        });
    }
    Ok(units)
}

fn names_from_source(source_id: &str) -> (String, String) {
    let trimmed = source_id.strip_suffix(".html").unwrap_or(source_id);
    let mut parts: Vec<&str> = trimmed.split(['/', '\\']).filter(|p| !p.is_empty()).collect();
    let class = parts.pop().unwrap_or_default().to_string();
    (parts.join("."), class)
}

fn heading_level_at(lower: &str, pos: usize) -> Option<u8> {
    let b = lower.as_bytes();
    if b.get(pos) != Some(&b'<') || b.get(pos + 1) != Some(&b'h') {
        return None;
    }
    let digit = *b.get(pos + 2)?;
    if !(b'1'..=b'6').contains(&digit) {
        return None;
    }
    match b.get(pos + 3) {
        Some(b'>') | Some(b' ') | Some(b'\t') | Some(b'\n') | Some(b'\r') => Some(digit - b'0'),
        _ => None,
    }
}

fn headings_from(lower: &str, from: usize) -> impl Iterator<Item = (u8, usize)> + '_ {
    lower[from.min(lower.len())..]
        .match_indices("<h")
        .map(move |(off, _)| from + off)
        .filter_map(move |pos| heading_level_at(lower, pos).map(|lvl| (lvl, pos)))
}

fn next_heading(lower: &str, from: usize, min_level: u8) -> Option<(u8, usize)> {
    headings_from(lower, from).find(|&(lvl, _)| lvl >= min_level)
}

fn next_heading_at_most(lower: &str, from: usize, max_level: u8) -> Option<usize> {
    headings_from(lower, from)
        .find(|&(lvl, _)| lvl <= max_level)
        .map(|(_, pos)| pos)
}

fn find_heading_exact(lower: &str, from: usize, level: u8) -> Option<usize> {
    headings_from(lower, from)
        .find(|&(lvl, _)| lvl == level)
        .map(|(_, pos)| pos)
}

/// Inner markup of the first `<tag ...>...</tag>` in the block.
fn element_body<'a>(block: &'a str, lower: &str, tag: &str) -> Option<&'a str> {
    let open = format!("<{tag}");
    let start = lower.match_indices(&open).map(|(p, _)| p).find(|&p| {
        matches!(lower.as_bytes().get(p + open.len()), Some(b'>') | Some(b' ') | Some(b'\n') | Some(b'\t'))
    })?;
    let body_start = start + lower[start..].find('>')? + 1;
    let body_end = lower[body_start..]
        .find(&format!("</{tag}"))
        .map(|p| body_start + p)
        .unwrap_or(block.len());
    Some(&block[body_start..body_end])
}

/// Inner markup of the first `<div class="block">`, honouring nested divs.
fn description_block<'a>(block: &'a str, lower: &str) -> Option<&'a str> {
    let mut search = 0;
    let body_start = loop {
        let start = search + lower[search..].find("<div")?;
        let tag_end = start + lower[start..].find('>')?;
        let attrs = &lower[start + 4..tag_end];
        search = tag_end;
        if attrs.contains("class=\"block\"") || attrs.contains("class='block'") || attrs.contains("class=block") {
            break tag_end + 1;
        }
    };

    let mut depth = 1usize;
    let mut pos = body_start;
    while depth > 0 {
        let next_open = lower[pos..].find("<div").map(|p| pos + p);
        let next_close = lower[pos..].find("</div").map(|p| pos + p);
        match (next_open, next_close) {
            (Some(o), Some(c)) if o < c => {
                depth += 1;
                pos = o + 4;
            }
            (_, Some(c)) => {
                depth -= 1;
                if depth == 0 {
                    return Some(&block[body_start..c]);
                }
                pos = c + 5;
            }
            (_, None) => return Some(&block[body_start..]),
        }
    }
    None
}
