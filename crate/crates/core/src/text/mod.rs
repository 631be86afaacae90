//! Markup normalization, sentence segmentation and pronoun resolution.
//!
//! Normalized text is a sequence of one-line blocks separated by a blank
//! line. Headings are reduced to their plain text, list items and table rows
//! become `- ...` items, and inline markup is stripped to its visible text.
//! Every surviving character remembers its byte offset in the source, which
//! is what [`OffsetMap`] exposes.

mod inline;
mod offsets;
mod pronoun;
mod segment;

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use offsets::{OffsetMap, OffsetSegment};
pub use pronoun::{resolve_pronouns, revert_substitutions, Resolution, Substitution};
pub use segment::{segment, Abbreviations, SentenceSpan};

/// A character of normalized output with its source byte offset, or `None`
/// when the character was synthesized (list markers, separators).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Traced {
    pub ch: char,
    pub src: Option<usize>,
}

impl Traced {
    fn synthetic(ch: char) -> Self {
        Traced { ch, src: None }
    }
}

fn traced_str(s: &str) -> impl Iterator<Item = Traced> + '_ {
    s.chars().map(Traced::synthetic)
}

fn traced_slice(s: &str, offset: usize) -> impl Iterator<Item = Traced> + '_ {
    s.char_indices().map(move |(i, ch)| Traced { ch, src: Some(offset + i) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockKind {
    Heading,
    ListItem,
    Paragraph,
}

/// One output line; `start..end` are byte offsets into the normalized text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub start: usize,
    pub end: usize,
    pub kind: BlockKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub heading: String,
    pub depth: u8,
    /// Byte offset of the heading text in the normalized text.
    pub start: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedDocument {
    pub text: String,
    pub blocks: Vec<Block>,
    pub sections: Vec<Section>,
    pub offset_map: OffsetMap,
}

impl NormalizedDocument {
    pub fn block_text(&self, block_id: usize) -> &str {
        let b = &self.blocks[block_id];
        &self.text[b.start..b.end]
    }

    /// Index of the section containing `pos`, or `None` before the first
    /// heading.
    pub fn section_at(&self, pos: usize) -> Option<usize> {
        self.sections.iter().rposition(|s| s.start <= pos)
    }

    /// Checks the offset map against the source it was built from: every
    /// mapped run copies the source verbatim, runs are ordered on both sides,
    /// and each surviving byte maps back to itself.
    pub fn offsets_consistent(&self, raw: &str) -> bool {
        let segs = &self.offset_map.segments;
        let ordered = segs.windows(2).all(|w| {
            w[0].normalized + w[0].len <= w[1].normalized && w[0].original + w[0].len <= w[1].original
        });
        let verbatim = segs.iter().all(|s| {
            self.text.get(s.normalized..s.normalized + s.len) == raw.get(s.original..s.original + s.len)
        });
        let round_trip = segs.iter().all(|s| {
            (s.normalized..s.normalized + s.len).all(|pos| {
                let back = self.offset_map.to_original_pos(pos).and_then(|o| self.offset_map.to_normalized_pos(o));
                back == Some(pos)
            })
        });
        ordered && verbatim && round_trip
    }

    pub(crate) fn traced(&self) -> Vec<Traced> {
        let mut out = Vec::with_capacity(self.text.len());
        for (pos, ch) in self.text.char_indices() {
            out.push(Traced { ch, src: self.offset_map.to_original_pos(pos) });
        }
        out
    }
}

/// Number of recorded headings.
pub fn count_sections(doc: &NormalizedDocument) -> usize {
    doc.sections.len()
}

/// Markup normalizer configured with badge hosts and sentence abbreviations.
#[derive(Debug, Clone)]
pub struct Normalizer {
    badge_hosts: Vec<String>,
    abbreviations: Abbreviations,
}

impl Default for Normalizer {
    fn default() -> Self {
        Normalizer::new(
            parse_badge_hosts(crate::defaults::BADGE_HOSTS),
            Abbreviations::parse(crate::defaults::ABBREVIATIONS),
        )
    }
}

/// Parses a badge host list: one host per line, `#` comments.
pub fn parse_badge_hosts(source: &str) -> Vec<String> {
    crate::config_lines(source).map(|(_, l)| l.to_ascii_lowercase()).collect()
}

const MAX_PASSES: usize = 6;

impl Normalizer {
    pub fn new(badge_hosts: Vec<String>, abbreviations: Abbreviations) -> Self {
        Normalizer { badge_hosts, abbreviations }
    }

    pub fn abbreviations(&self) -> &Abbreviations {
        &self.abbreviations
    }

    pub fn badge_hosts(&self) -> &[String] {
        &self.badge_hosts
    }

    /// Normalizes raw markup. Never fails: malformed markup is kept as text.
    ///
    /// The block pass is repeated until the text is a fixed point, so
    /// normalizing already-normalized text returns it unchanged.
    pub fn normalize(&self, raw: &str) -> NormalizedDocument {
        let mut pass = self.normalize_once(raw);
        for _ in 1..MAX_PASSES {
            let text: String = pass.chars.iter().map(|t| t.ch).collect();
            let next = self.normalize_once(&text);
            if next.chars.iter().map(|t| t.ch).eq(text.chars()) {
                break;
            }
            pass = compose(&text, pass, next);
        }
        pass.into_document()
    }

    fn normalize_once(&self, raw: &str) -> Pass {
        let mut builder = PassBuilder {
            out: Vec::new(),
            len: 0,
            blocks: Vec::new(),
            sections: Vec::new(),
            hosts: &self.badge_hosts,
        };
        let lines = split_lines(raw);
        let mut pending = Pending::None;
        let mut i = 0;
        while i < lines.len() {
            let line = &lines[i];
            i += 1;

            if let Some(fence) = fence_open(line.body) {
                builder.flush(&mut pending);
                while i < lines.len() && !fence_closes(lines[i].body, fence) {
                    i += 1;
                }
                i += 1;
                continue;
            }
            if line.body.starts_with("<!--") && !line.body.contains("-->") {
                builder.flush(&mut pending);
                while i < lines.len() && !lines[i].body.contains("-->") {
                    i += 1;
                }
                i += 1;
                continue;
            }
            if line.body.is_empty() {
                builder.flush(&mut pending);
                continue;
            }
            if let Some((depth, text, offset)) = atx_heading(line) {
                builder.flush(&mut pending);
                builder.heading(depth, &[(offset, text)]);
                continue;
            }
            if let Some(depth) = setext_underline(line.body) {
                if let Pending::Paragraph(segs) = &pending {
                    let segs = segs.clone();
                    pending = Pending::None;
                    builder.heading(depth, &segs);
                    continue;
                }
            }
            if is_thematic_break(line.body) || is_rule_line(line.body) {
                builder.flush(&mut pending);
                continue;
            }
            if line.body.contains('|') && i < lines.len() && is_table_delimiter(lines[i].body) {
                builder.flush(&mut pending);
                i += 1;
                while i < lines.len() && !lines[i].body.is_empty() && lines[i].body.contains('|') {
                    builder.table_row(&lines[i]);
                    i += 1;
                }
                continue;
            }
            if is_link_definition(line.body) {
                continue;
            }
            if let Some((marker, content, offset)) = list_item(line) {
                builder.flush(&mut pending);
                pending = Pending::ListItem { marker, segs: alloc::vec![(offset, content)] };
                continue;
            }
            match &mut pending {
                Pending::Paragraph(segs) | Pending::ListItem { segs, .. } => {
                    segs.push((line.body_offset, line.body));
                }
                Pending::None => {
                    pending = Pending::Paragraph(alloc::vec![(line.body_offset, line.body)]);
                }
            }
        }
        builder.flush(&mut pending);
        Pass { chars: builder.out, blocks: builder.blocks, sections: builder.sections }
    }
}

struct Pass {
    chars: Vec<Traced>,
    blocks: Vec<Block>,
    sections: Vec<Section>,
}

impl Pass {
    fn into_document(self) -> NormalizedDocument {
        let text: String = self.chars.iter().map(|t| t.ch).collect();
        NormalizedDocument {
            offset_map: OffsetMap::from_traced(&self.chars),
            text,
            blocks: self.blocks,
            sections: self.sections,
        }
    }
}

/// Chains a later pass (whose offsets point into `prev_text`) onto an earlier
/// one (whose offsets point into the raw source). Section starts from the
/// earlier pass are carried forward; block structure comes from the later one.
fn compose(prev_text: &str, prev: Pass, next: Pass) -> Pass {
    let mut src_at = alloc::vec![None; prev_text.len() + 1];
    let mut fwd = alloc::vec![None; prev_text.len() + 1];
    let mut pos = 0;
    for t in &prev.chars {
        src_at[pos] = t.src;
        pos += t.ch.len_utf8();
    }
    let mut out_pos = 0;
    let chars: Vec<Traced> = next
        .chars
        .iter()
        .map(|t| {
            if let Some(p) = t.src {
                fwd[p] = Some(out_pos);
            }
            out_pos += t.ch.len_utf8();
            Traced { ch: t.ch, src: t.src.and_then(|p| src_at[p]) }
        })
        .collect();

    let mut sections: Vec<Section> = Vec::new();
    for s in prev.sections {
        let Some(start) = fwd[s.start..].iter().find_map(|x| *x) else { continue };
        if sections.last().is_none_or(|last| last.start < start) {
            sections.push(Section { start, ..s });
        }
    }
    Pass { chars, blocks: next.blocks, sections }
}

#[derive(Debug, Clone)]
struct Line<'a> {
    /// Content after blockquote markers and leading whitespace, right-trimmed.
    body: &'a str,
    body_offset: usize,
    indent: usize,
}

fn split_lines(raw: &str) -> Vec<Line<'_>> {
    let mut lines = Vec::new();
    let mut offset = 0;
    for chunk in raw.split_inclusive('\n') {
        let line = chunk.trim_end_matches(['\n', '\r']);
        let mut start = 0;
        // Strip any number of blockquote markers.
        loop {
            let rest = &line[start..];
            let trimmed = rest.trim_start_matches([' ', '\t']);
            if let Some(after) = trimmed.strip_prefix('>') {
                start = line.len() - after.len();
            } else {
                break;
            }
        }
        let rest = &line[start..];
        let trimmed = rest.trim_start();
        let indent = rest.len() - trimmed.len();
        let body = trimmed.trim_end();
        lines.push(Line { body, body_offset: offset + start + indent, indent });
        offset += chunk.len();
    }
    lines
}

#[derive(Debug, Clone, Copy)]
struct Fence {
    ch: u8,
    len: usize,
}

fn fence_open(body: &str) -> Option<Fence> {
    let ch = *body.as_bytes().first()?;
    if ch != b'`' && ch != b'~' {
        return None;
    }
    let len = body.bytes().take_while(|&b| b == ch).count();
    if len < 3 || (ch == b'`' && body[len..].contains('`')) {
        return None;
    }
    Some(Fence { ch, len })
}

fn fence_closes(body: &str, fence: Fence) -> bool {
    let run = body.bytes().take_while(|&b| b == fence.ch).count();
    run >= fence.len && body[run..].trim().is_empty()
}

fn atx_heading<'a>(line: &Line<'a>) -> Option<(u8, &'a str, usize)> {
    if line.indent > 3 {
        return None;
    }
    let hashes = line.body.bytes().take_while(|&b| b == b'#').count();
    if hashes == 0 || hashes > 6 {
        return None;
    }
    let rest = &line.body[hashes..];
    if !rest.is_empty() && !rest.starts_with([' ', '\t']) {
        return None;
    }
    let mut text = rest.trim();
    // Optional closing sequence of '#'.
    let stripped = text.trim_end_matches('#');
    if stripped.is_empty() || stripped.ends_with([' ', '\t']) {
        text = stripped.trim_end();
    }
    let offset = line.body_offset + (text.as_ptr() as usize - line.body.as_ptr() as usize);
    Some((hashes as u8, text, offset))
}

fn setext_underline(body: &str) -> Option<u8> {
    if !body.is_empty() && body.bytes().all(|b| b == b'=') {
        Some(1)
    } else if body.len() >= 2 && body.bytes().all(|b| b == b'-') {
        Some(2)
    } else {
        None
    }
}

fn is_thematic_break(body: &str) -> bool {
    let mut marker = None;
    let mut count = 0;
    for b in body.bytes() {
        match b {
            b' ' | b'\t' => {}
            b'-' | b'*' | b'_' => {
                if marker.is_some_and(|m| m != b) {
                    return false;
                }
                marker = Some(b);
                count += 1;
            }
            _ => return false,
        }
    }
    count >= 3
}

/// Lines made only of `=` (reStructuredText over/underlines without a
/// preceding paragraph).
fn is_rule_line(body: &str) -> bool {
    !body.is_empty() && body.bytes().all(|b| b == b'=')
}

fn is_table_delimiter(body: &str) -> bool {
    body.contains('|')
        && body.contains('-')
        && body.bytes().all(|b| matches!(b, b'|' | b'-' | b':' | b' ' | b'\t'))
}

fn is_link_definition(body: &str) -> bool {
    let Some(rest) = body.strip_prefix('[') else { return false };
    let Some(close) = rest.find("]:") else { return false };
    close > 0 && !rest[..close].contains(['[', ']']) && !rest[close + 2..].trim().is_empty()
}

fn list_item<'a>(line: &Line<'a>) -> Option<(String, &'a str, usize)> {
    let body = line.body;
    let bytes = body.as_bytes();
    let (marker, marker_len) = match bytes.first()? {
        b'-' | b'*' | b'+' => ("- ".to_string(), 1),
        b'0'..=b'9' => {
            let digits = bytes.iter().take_while(|b| b.is_ascii_digit()).count();
            if digits > 9 || !matches!(bytes.get(digits), Some(b'.') | Some(b')')) {
                return None;
            }
            (alloc::format!("{}. ", &body[..digits]), digits + 1)
        }
        _ => return None,
    };
    let rest = &body[marker_len..];
    if !rest.is_empty() && !rest.starts_with([' ', '\t']) {
        return None;
    }
    let content = rest.trim_start();
    let offset = line.body_offset + (body.len() - content.len());
    Some((marker, content, offset))
}

#[derive(Debug)]
enum Pending<'a> {
    None,
    Paragraph(Vec<(usize, &'a str)>),
    ListItem { marker: String, segs: Vec<(usize, &'a str)> },
}

struct PassBuilder<'h> {
    out: Vec<Traced>,
    /// Byte length of `out`.
    len: usize,
    blocks: Vec<Block>,
    sections: Vec<Section>,
    hosts: &'h [String],
}

impl PassBuilder<'_> {
    fn inline(&self, segs: &[(usize, &str)]) -> Vec<Traced> {
        let mut chars = Vec::new();
        for (i, (offset, text)) in segs.iter().enumerate() {
            if i > 0 {
                chars.push(Traced::synthetic(' '));
            }
            chars.extend(traced_slice(text, *offset));
        }
        inline::strip(chars, self.hosts)
    }

    fn emit(&mut self, kind: BlockKind, prefix: &str, content: Vec<Traced>) -> Option<usize> {
        if content.is_empty() {
            return None;
        }
        if !self.out.is_empty() {
            self.push(traced_str("\n\n"));
        }
        let start = self.len;
        self.push(traced_str(prefix));
        self.push(content);
        self.blocks.push(Block { start, end: self.len, kind });
        Some(start)
    }

    fn push(&mut self, chars: impl IntoIterator<Item = Traced>) {
        for t in chars {
            self.len += t.ch.len_utf8();
            self.out.push(t);
        }
    }

    fn flush(&mut self, pending: &mut Pending<'_>) {
        match core::mem::replace(pending, Pending::None) {
            Pending::None => {}
            Pending::Paragraph(segs) => {
                let content = self.inline(&segs);
                self.emit(BlockKind::Paragraph, "", content);
            }
            Pending::ListItem { marker, segs } => {
                let content = self.inline(&segs);
                self.emit(BlockKind::ListItem, &marker, content);
            }
        }
    }

    fn heading(&mut self, depth: u8, segs: &[(usize, &str)]) {
        let content = self.inline(segs);
        let heading: String = content.iter().map(|t| t.ch).collect();
        if let Some(start) = self.emit(BlockKind::Heading, "", content) {
            self.sections.push(Section { heading, depth, start });
        }
    }

    fn table_row(&mut self, line: &Line<'_>) {
        let body = line.body;
        let inner_start = usize::from(body.starts_with('|'));
        let inner_end = if body.len() > inner_start && body.ends_with('|') { body.len() - 1 } else { body.len() };
        let inner = &body[inner_start..inner_end.max(inner_start)];
        let base = line.body_offset + inner_start;

        let mut cells: Vec<Vec<Traced>> = Vec::new();
        let mut cell_start = 0;
        for (pos, ch) in inner.char_indices().chain(core::iter::once((inner.len(), '|'))) {
            if ch == '|' {
                let cell = &inner[cell_start..pos];
                let trimmed = cell.trim_start();
                let offset = base + cell_start + (cell.len() - trimmed.len());
                let stripped = self.inline(&[(offset, trimmed.trim_end())]);
                if !stripped.is_empty() {
                    cells.push(stripped);
                }
                cell_start = pos + 1;
            }
        }
        let mut content = Vec::new();
        for (i, cell) in cells.into_iter().enumerate() {
            match i {
                0 => {}
                1 => content.extend(traced_str(": ")),
                _ => content.extend(traced_str("; ")),
            }
            content.extend(cell);
        }
        self.emit(BlockKind::ListItem, "- ", content);
    }
}

#[cfg(test)]
mod tests;
