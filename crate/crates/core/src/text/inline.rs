//! Inline markup stripping over traced characters.

use alloc::string::String;
use alloc::vec::Vec;

use super::Traced;

const MAX_ROUNDS: usize = 8;

/// Strips inline markup until nothing changes, then collapses whitespace.
pub(super) fn strip(mut chars: Vec<Traced>, badge_hosts: &[String]) -> Vec<Traced> {
    for _ in 0..MAX_ROUNDS {
        let before = chars.len();
        chars = strip_comments(chars);
        chars = strip_html(chars);
        chars = strip_links(chars, badge_hosts);
        chars = strip_marks(chars);
        if chars.len() == before {
            break;
        }
    }
    collapse_whitespace(chars)
}

fn starts_with(chars: &[Traced], at: usize, pat: &str) -> bool {
    let mut i = at;
    for p in pat.chars() {
        match chars.get(i) {
            Some(t) if t.ch == p => i += 1,
            _ => return false,
        }
    }
    true
}

fn find(chars: &[Traced], from: usize, pat: &str) -> Option<usize> {
    (from..chars.len()).find(|&i| starts_with(chars, i, pat))
}

fn strip_comments(chars: Vec<Traced>) -> Vec<Traced> {
    let mut out = Vec::with_capacity(chars.len());
    let mut i = 0;
    while i < chars.len() {
        if starts_with(&chars, i, "<!--") {
            i = find(&chars, i + 4, "-->").map_or(chars.len(), |end| end + 3);
        } else {
            out.push(chars[i]);
            i += 1;
        }
    }
    out
}

fn is_autolink(inner: &[Traced]) -> bool {
    let s: String = inner.iter().map(|t| t.ch).collect();
    let lower = s.to_ascii_lowercase();
    ["http://", "https://", "mailto:", "ftp://"].iter().any(|p| lower.starts_with(p))
        || (s.contains('@') && !s.contains(char::is_whitespace))
}

fn strip_html(chars: Vec<Traced>) -> Vec<Traced> {
    let mut out = Vec::with_capacity(chars.len());
    let mut i = 0;
    while i < chars.len() {
        if chars[i].ch == '<' {
            let close = (i + 1..chars.len())
                .take_while(|&j| chars[j].ch != '<')
                .find(|&j| chars[j].ch == '>');
            if let Some(close) = close {
                let inner = &chars[i + 1..close];
                if !inner.is_empty() && is_autolink(inner) {
                    out.extend_from_slice(inner);
                    i = close + 1;
                    continue;
                }
                let name_start = usize::from(inner.first().is_some_and(|t| t.ch == '/'));
                if inner.get(name_start).is_some_and(|t| t.ch.is_ascii_alphabetic()) {
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push(chars[i]);
        i += 1;
    }
    out
}

/// Index of the bracket closing the one at `open`, honouring nesting.
fn matching(chars: &[Traced], open: usize, open_ch: char, close_ch: char) -> Option<usize> {
    let mut depth = 0usize;
    for (j, t) in chars.iter().enumerate().skip(open) {
        if t.ch == open_ch {
            depth += 1;
        } else if t.ch == close_ch {
            depth -= 1;
            if depth == 0 {
                return Some(j);
            }
        }
    }
    None
}

fn url_host(url: &[Traced]) -> String {
    let s: String = url.iter().map(|t| t.ch).collect();
    let s = s.trim();
    let after_scheme = s.find("://").map_or(s, |p| &s[p + 3..]);
    let host = after_scheme.split(['/', ':', '?', '#']).next().unwrap_or("");
    host.to_ascii_lowercase()
}

fn is_badge_host(host: &str, badge_hosts: &[String]) -> bool {
    badge_hosts.iter().any(|h| {
        host == h || (host.len() > h.len() && host.ends_with(h.as_str()) && host.as_bytes()[host.len() - h.len() - 1] == b'.')
    })
}

enum LinkTail {
    Inline { end: usize, url_start: usize, url_end: usize },
    Reference { end: usize },
    None,
}

fn link_tail(chars: &[Traced], close: usize) -> LinkTail {
    match chars.get(close + 1).map(|t| t.ch) {
        Some('(') => match matching(chars, close + 1, '(', ')') {
            Some(end) => {
                let url_start = close + 2;
                let url_end = (url_start..end).find(|&j| chars[j].ch.is_whitespace()).unwrap_or(end);
                LinkTail::Inline { end, url_start, url_end }
            }
            None => LinkTail::None,
        },
        Some('[') => match matching(chars, close + 1, '[', ']') {
            Some(end) => LinkTail::Reference { end },
            None => LinkTail::None,
        },
        _ => LinkTail::None,
    }
}

fn strip_links(chars: Vec<Traced>, badge_hosts: &[String]) -> Vec<Traced> {
    let mut out = Vec::with_capacity(chars.len());
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i].ch;
        if ch == '!' && chars.get(i + 1).is_some_and(|t| t.ch == '[') {
            if let Some(close) = matching(&chars, i + 1, '[', ']') {
                // Images are dropped whole, alt text included.
                i = match link_tail(&chars, close) {
                    LinkTail::Inline { end, .. } | LinkTail::Reference { end } => end + 1,
                    LinkTail::None => close + 1,
                };
                continue;
            }
        }
        if ch == '[' {
            if let Some(close) = matching(&chars, i, '[', ']') {
                let text = &chars[i + 1..close];
                let blank = text.iter().all(|t| t.ch.is_whitespace());
                match link_tail(&chars, close) {
                    LinkTail::Inline { end, url_start, url_end } => {
                        let badge = is_badge_host(&url_host(&chars[url_start..url_end]), badge_hosts);
                        if !blank && !badge {
                            out.extend_from_slice(text);
                        }
                        i = end + 1;
                        continue;
                    }
                    LinkTail::Reference { end } => {
                        if !blank {
                            out.extend_from_slice(text);
                        }
                        i = end + 1;
                        continue;
                    }
                    LinkTail::None => {}
                }
            }
        }
        out.push(chars[i]);
        i += 1;
    }
    out
}

fn is_space(t: Option<&Traced>) -> bool {
    t.is_none_or(|t| t.ch.is_whitespace())
}

fn is_alnum(t: Option<&Traced>) -> bool {
    t.is_some_and(|t| t.ch.is_alphanumeric())
}

/// Removes code-span backticks, strikethrough runs and emphasis delimiters.
///
/// A `*` run is kept only when surrounded by whitespace; a `_` run is also
/// kept inside a word (`snake_case`).
fn strip_marks(chars: Vec<Traced>) -> Vec<Traced> {
    let mut out = Vec::with_capacity(chars.len());
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i].ch;
        if ch == '`' {
            i += 1;
            continue;
        }
        if matches!(ch, '~' | '*' | '_') {
            let run_end = (i..chars.len()).find(|&j| chars[j].ch != ch).unwrap_or(chars.len());
            let prev = i.checked_sub(1).and_then(|p| chars.get(p));
            let next = chars.get(run_end);
            let keep = match ch {
                '~' => run_end - i == 1,
                '*' => is_space(prev) && is_space(next),
                _ => (is_space(prev) && is_space(next)) || (is_alnum(prev) && is_alnum(next)),
            };
            if keep {
                out.extend_from_slice(&chars[i..run_end]);
            }
            i = run_end;
            continue;
        }
        out.push(chars[i]);
        i += 1;
    }
    out
}

fn collapse_whitespace(chars: Vec<Traced>) -> Vec<Traced> {
    let mut out: Vec<Traced> = Vec::with_capacity(chars.len());
    for t in chars {
        if t.ch.is_whitespace() {
            if out.last().is_none_or(|last| last.ch == ' ') {
                continue;
            }
            out.push(if t.ch == ' ' { t } else { Traced::synthetic(' ') });
        } else {
            out.push(t);
        }
    }
    if out.last().is_some_and(|t| t.ch == ' ') {
        out.pop();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn run(s: &str) -> String {
        let chars = s.char_indices().map(|(i, ch)| Traced { ch, src: Some(i) }).collect();
        strip(chars, &["img.shields.io".to_string()]).iter().map(|t| t.ch).collect()
    }

    #[test]
    fn emphasis_and_code() {
        assert_eq!(run("**Maintainers** _must_ review `code`."), "Maintainers must review code.");
        assert_eq!(run("snake_case stays, 5 * 3 stays"), "snake_case stays, 5 * 3 stays");
        assert_eq!(run("~~old~~ new"), "old new");
    }

    #[test]
    fn links_images_and_badges() {
        assert_eq!(run("See [the docs](https://x.org/a \"t\") now"), "See the docs now");
        assert_eq!(run("[![Build](https://ci/x.svg)](https://ci) Project"), "Project");
        assert_eq!(run("![logo](logo.png)"), "");
        assert_eq!(run("[status](https://img.shields.io/badge/x) ok"), "ok");
        assert_eq!(run("[text][ref] and [plain]"), "text and [plain]");
    }

    #[test]
    fn html_and_autolinks() {
        assert_eq!(run("<b>Bold</b> <!-- hidden --> <https://x.org>"), "Bold https://x.org");
        assert_eq!(run("a < b and c > d"), "a < b and c > d");
        assert_eq!(run("<img src=\"x.png\">"), "");
    }

    #[test]
    fn whitespace_is_collapsed_and_provenance_kept() {
        let chars = vec![
            Traced { ch: 'a', src: Some(0) },
            Traced { ch: '\t', src: Some(1) },
            Traced { ch: ' ', src: Some(2) },
            Traced { ch: 'b', src: Some(3) },
        ];
        let out = strip(chars, &[]);
        assert_eq!(out, vec![
            Traced { ch: 'a', src: Some(0) },
            Traced { ch: ' ', src: None },
            Traced { ch: 'b', src: Some(3) },
        ]);
    }
}
