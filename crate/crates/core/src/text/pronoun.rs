//! Nearest-antecedent pronoun resolution gated on the role lexicon.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use super::{NormalizedDocument, OffsetMap, SentenceSpan, Traced};
use crate::statement::RoleLexicon;

/// One pronoun replaced by a role mention.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Substitution {
    /// Span of the replacement in the resolved text.
    pub start: usize,
    pub end: usize,
    /// Span of the pronoun in the input text.
    pub original_start: usize,
    pub original_end: usize,
    pub pronoun: String,
    pub replacement: String,
    /// Span of the antecedent mention in the input text.
    pub antecedent_start: usize,
    pub antecedent_end: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resolution {
    pub document: NormalizedDocument,
    pub sentences: Vec<SentenceSpan>,
    pub log: Vec<Substitution>,
}

const SUBJECT_OPENERS: &[&str] = &[
    "and", "but", "or", "so", "then", "because", "if", "when", "unless", "while", "where", "once", "until",
    "after", "before", "since",
];
const EXPLETIVE_FOLLOWERS: &[&str] = &["is", "was", "seems", "appears", "s"];

#[derive(Debug, Clone, Copy)]
struct Word {
    start: usize,
    end: usize,
}

fn words(text: &str, range: Range<usize>) -> Vec<Word> {
    let mut out = Vec::new();
    let mut current: Option<usize> = None;
    let slice = &text[range.clone()];
    for (i, ch) in slice.char_indices() {
        let pos = range.start + i;
        let part_of_word = ch.is_alphanumeric() || (current.is_some() && (ch == '-' || ch == '\''));
        match (part_of_word, current) {
            (true, None) => current = Some(pos),
            (false, Some(s)) => {
                out.push(trim_word(text, s, pos));
                current = None;
            }
            _ => {}
        }
    }
    if let Some(s) = current {
        out.push(trim_word(text, s, range.end));
    }
    out
}

fn trim_word(text: &str, start: usize, end: usize) -> Word {
    let trimmed = text[start..end].trim_end_matches(['-', '\'']);
    Word { start, end: start + trimmed.len() }
}

#[derive(Debug, Clone, Copy)]
struct Mention {
    start: usize,
    end: usize,
}

fn role_mentions(text: &str, sentence_words: &[Word], lexicon: &RoleLexicon) -> Vec<Mention> {
    let mut out = Vec::new();
    let mut k = 0;
    'outer: while k < sentence_words.len() {
        let longest = lexicon.max_words().min(sentence_words.len() - k);
        for len in (1..=longest).rev() {
            let first = sentence_words[k];
            let last = sentence_words[k + len - 1];
            let phrase = &text[first.start..last.end];
            if len > 1 && !contiguous(&sentence_words[k..k + len], text) {
                continue;
            }
            if lexicon.lookup(phrase).is_some() {
                out.push(Mention { start: first.start, end: last.end });
                k += len;
                continue 'outer;
            }
        }
        k += 1;
    }
    out
}

fn contiguous(ws: &[Word], text: &str) -> bool {
    ws.windows(2).all(|pair| matches!(&text[pair[0].end..pair[1].start], " " | "-"))
}

/// Byte spans of pronouns in subject position within one sentence.
fn subject_pronouns(text: &str, ws: &[Word]) -> Vec<(usize, usize)> {
    let lower = |w: &Word| text[w.start..w.end].to_lowercase();
    let first_word = ws.iter().position(|w| !is_number(text, w));
    let mut out = Vec::new();
    let mut k = 0;
    while k < ws.len() {
        let word = lower(&ws[k]);
        let subject_slot =
            Some(k) == first_word || (k > 0 && SUBJECT_OPENERS.contains(&lower(&ws[k - 1]).as_str()));
        let next = ws.get(k + 1).map(lower);
        let hit = match word.as_str() {
            "they" | "them" => Some(k),
            "it" if !next.as_deref().is_some_and(|n| EXPLETIVE_FOLLOWERS.contains(&n)) => Some(k),
            "this" if next.as_deref() == Some("group") => Some(k + 1),
            _ => None,
        };
        if let (true, Some(last)) = (subject_slot, hit) {
            out.push((ws[k].start, ws[last].end));
            k = last + 1;
        } else {
            k += 1;
        }
    }
    out
}

fn is_number(text: &str, w: &Word) -> bool {
    text[w.start..w.end].bytes().all(|b| b.is_ascii_digit())
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn decapitalize(s: &str) -> String {
    let first_word = s.split(' ').next().unwrap_or("");
    if first_word.chars().filter(|c| c.is_alphabetic()).all(char::is_uppercase) {
        return s.to_string();
    }
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_lowercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Replaces subject-position pronouns (`they`, `them`, `it`, `this group`)
/// with the nearest preceding role mention in the same section.
///
/// Pronouns without an antecedent are left alone. Sentence count and block
/// boundaries are unchanged; the returned sentence spans point into the
/// resolved text.
pub fn resolve_pronouns(doc: &NormalizedDocument, sentences: &[SentenceSpan], lexicon: &RoleLexicon) -> Resolution {
    let text = doc.text.as_str();
    let sentence_words: Vec<Vec<Word>> = sentences.iter().map(|s| words(text, s.start..s.end)).collect();
    let opening_words: Vec<usize> = sentence_words
        .iter()
        .filter_map(|ws| ws.iter().find(|w| !is_number(text, w)).map(|w| w.start))
        .collect();

    let mut mentions: Vec<Mention> = Vec::new();
    let mut planned: Vec<(usize, usize, String, Mention)> = Vec::new();
    for ws in &sentence_words {
        mentions.extend(role_mentions(text, ws, lexicon));
        for (p_start, p_end) in subject_pronouns(text, ws) {
            let section = doc.section_at(p_start);
            let antecedent = mentions
                .iter()
                .rev()
                .find(|m| m.end <= p_start)
                .filter(|m| doc.section_at(m.start) == section)
                .copied();
            let Some(antecedent) = antecedent else { continue };
            let surface = &text[antecedent.start..antecedent.end];
            let replacement = if text[p_start..p_end].starts_with(char::is_uppercase) {
                capitalize(surface)
            } else if opening_words.contains(&antecedent.start) {
                decapitalize(surface)
            } else {
                surface.to_string()
            };
            planned.push((p_start, p_end, replacement, antecedent));
        }
    }
    apply(doc, sentences, planned)
}

fn apply(
    doc: &NormalizedDocument,
    sentences: &[SentenceSpan],
    planned: Vec<(usize, usize, String, Mention)>,
) -> Resolution {
    let traced = doc.traced();
    let mut out: Vec<Traced> = Vec::with_capacity(traced.len());
    let mut log = Vec::with_capacity(planned.len());
    let mut pos = 0;
    let mut out_len = 0;
    let mut iter = traced.iter().peekable();
    for (p_start, p_end, replacement, antecedent) in planned {
        while pos < p_start {
            let t = iter.next().expect("pronoun offsets lie within the text");
            pos += t.ch.len_utf8();
            out_len += t.ch.len_utf8();
            out.push(*t);
        }
        while pos < p_end {
            let t = iter.next().expect("pronoun offsets lie within the text");
            pos += t.ch.len_utf8();
        }
        let start = out_len;
        out.extend(replacement.chars().map(Traced::synthetic));
        out_len += replacement.len();
        log.push(Substitution {
            start,
            end: out_len,
            original_start: p_start,
            original_end: p_end,
            pronoun: doc.text[p_start..p_end].to_string(),
            replacement,
            antecedent_start: antecedent.start,
            antecedent_end: antecedent.end,
        });
    }
    out.extend(iter.copied());

    let shift = |p: usize| -> usize {
        let delta: isize = log
            .iter()
            .filter(|s| s.original_end <= p)
            .map(|s| (s.end - s.start) as isize - (s.original_end - s.original_start) as isize)
            .sum();
        (p as isize + delta) as usize
    };
    let mut document = doc.clone();
    document.text = out.iter().map(|t| t.ch).collect();
    document.offset_map = OffsetMap::from_traced(&out);
    for block in &mut document.blocks {
        block.start = shift(block.start);
        block.end = shift(block.end);
    }
    for section in &mut document.sections {
        section.start = shift(section.start);
    }
    let sentences = sentences
        .iter()
        .map(|s| SentenceSpan { start: shift(s.start), end: shift(s.end), block_id: s.block_id })
        .collect();
    Resolution { document, sentences, log }
}

/// Undoes a substitution log, restoring the pre-resolution text exactly.
pub fn revert_substitutions(resolved: &str, log: &[Substitution]) -> String {
    let mut text = resolved.to_string();
    for sub in log.iter().rev() {
        text.replace_range(sub.start..sub.end, &sub.pronoun);
    }
    text
}
