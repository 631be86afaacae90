use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::NormalizedDocument;

/// A sentence as a byte range of the normalized text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceSpan {
    pub start: usize,
    pub end: usize,
    pub block_id: usize,
}

impl SentenceSpan {
    pub fn text<'a>(&self, doc: &'a NormalizedDocument) -> &'a str {
        &doc.text[self.start..self.end]
    }
}

/// Tokens ending in `.` that never end a sentence (`e.g.`, `etc.`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Abbreviations {
    entries: Vec<String>,
}

impl Abbreviations {
    /// One abbreviation per line, `#` comments; matching is case-insensitive.
    pub fn parse(source: &str) -> Self {
        let mut entries: Vec<String> = crate::config_lines(source).map(|(_, l)| l.to_lowercase()).collect();
        entries.sort();
        entries.dedup();
        Abbreviations { entries }
    }

    pub fn contains(&self, token: &str) -> bool {
        let lower = token.to_lowercase();
        self.entries.binary_search(&lower).is_ok()
    }
}

const CLOSERS: &[char] = &['"', '\'', ')', ']', '\u{201d}', '\u{2019}'];

/// Splits every block into sentences.
///
/// A prose sentence ends at `.`, `!` or `?` (plus any closing quotes or
/// brackets) when followed by whitespace and an uppercase letter or digit,
/// unless the token ending in `.` is a listed abbreviation. Each block yields
/// at least one sentence, and the sentences of a block cover all of its
/// non-whitespace characters.
pub fn segment(doc: &NormalizedDocument, abbreviations: &Abbreviations) -> Vec<SentenceSpan> {
    let mut spans = Vec::new();
    for (block_id, block) in doc.blocks.iter().enumerate() {
        let text = &doc.text[block.start..block.end];
        for (start, end) in split_sentences(text, abbreviations) {
            spans.push(SentenceSpan { start: block.start + start, end: block.start + end, block_id });
        }
    }
    spans
}

fn split_sentences(text: &str, abbreviations: &Abbreviations) -> Vec<(usize, usize)> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let Some(mut start) = chars.iter().position(|(_, c)| !c.is_whitespace()) else {
        return out;
    };
    let mut i = start;
    while i < chars.len() {
        let (pos, ch) = chars[i];
        if !matches!(ch, '.' | '!' | '?') {
            i += 1;
            continue;
        }
        let mut end = i + 1;
        while end < chars.len() && (matches!(chars[end].1, '.' | '!' | '?') || CLOSERS.contains(&chars[end].1)) {
            end += 1;
        }
        let mut next = end;
        while next < chars.len() && chars[next].1.is_whitespace() {
            next += 1;
        }
        let boundary = next > end
            && next < chars.len()
            && (chars[next].1.is_uppercase() || chars[next].1.is_ascii_digit())
            && !(ch == '.' && end == i + 1 && abbreviations.contains(token_before(text, pos + 1)));
        if boundary {
            let end_byte = chars.get(end).map_or(text.len(), |c| c.0);
            out.push((chars[start].0, end_byte));
            start = next;
            i = next;
        } else {
            i = end;
        }
    }
    let tail_end = text.trim_end().len();
    if chars[start].0 < tail_end {
        out.push((chars[start].0, tail_end));
    }
    out
}

/// The whitespace-delimited token ending at byte `end`, without leading
/// opening punctuation.
fn token_before(text: &str, end: usize) -> &str {
    let head = &text[..end];
    let start = head.rfind(char::is_whitespace).map_or(0, |p| p + 1);
    head[start..].trim_start_matches(['(', '[', '"', '\'', '\u{201c}', '\u{2018}'])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::Normalizer;

    fn sentences(raw: &str) -> Vec<String> {
        let normalizer = Normalizer::default();
        let doc = normalizer.normalize(raw);
        segment(&doc, normalizer.abbreviations()).iter().map(|s| s.text(&doc).into()).collect()
    }

    #[test]
    fn abbreviations_do_not_split() {
        // Hand-enumerated split points: "e.g." is followed by a lowercase word
        // and is listed; "review." is followed by " They".
        assert_eq!(
            sentences("Maintainers (e.g. committers) review. They vote."),
            ["Maintainers (e.g. committers) review.", "They vote."]
        );
        assert_eq!(sentences("Chairs vs. Leads differ. E.g. Dr. Smith decides."), [
            "Chairs vs. Leads differ.",
            "E.g. Dr. Smith decides."
        ]);
    }

    #[test]
    fn list_items_are_separate_blocks() {
        let normalizer = Normalizer::default();
        let doc = normalizer.normalize("- Maintainers merge.\n- Reviewers review. They comment.\n");
        let spans = segment(&doc, normalizer.abbreviations());
        let blocks: Vec<usize> = spans.iter().map(|s| s.block_id).collect();
        assert_eq!(blocks, [0, 1, 1]);
        assert_eq!(spans[0].text(&doc), "- Maintainers merge.");
    }

    #[test]
    fn empty_document_has_no_sentences() {
        assert!(sentences("").is_empty());
        assert!(sentences("   \n\n").is_empty());
    }

    #[test]
    fn closing_quotes_stay_with_sentence() {
        assert_eq!(sentences("He said \"stop.\" Then left."), ["He said \"stop.\"", "Then left."]);
        assert_eq!(sentences("Version 2. 3 votes win!"), ["Version 2.", "3 votes win!"]);
    }
}
