use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use super::Traced;

/// A run of normalized text copied verbatim from the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OffsetSegment {
    pub normalized: usize,
    pub original: usize,
    pub len: usize,
}

impl OffsetSegment {
    fn normalized_range(&self) -> Range<usize> {
        self.normalized..self.normalized + self.len
    }

    fn original_range(&self) -> Range<usize> {
        self.original..self.original + self.len
    }
}

/// Byte-offset correspondence between normalized text and its source.
///
/// Segments are sorted and non-overlapping on both sides; characters outside
/// every segment were synthesized by normalization.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OffsetMap {
    pub segments: Vec<OffsetSegment>,
}

impl OffsetMap {
    pub(crate) fn from_traced(chars: &[Traced]) -> Self {
        let mut segments: Vec<OffsetSegment> = Vec::new();
        let mut pos = 0;
        for t in chars {
            let width = t.ch.len_utf8();
            if let Some(src) = t.src {
                match segments.last_mut() {
                    Some(last) if last.normalized + last.len == pos && last.original + last.len == src => {
                        last.len += width;
                    }
                    _ => segments.push(OffsetSegment { normalized: pos, original: src, len: width }),
                }
            }
            pos += width;
        }
        OffsetMap { segments }
    }

    fn find_normalized(&self, pos: usize) -> Option<&OffsetSegment> {
        let idx = self.segments.partition_point(|s| s.normalized + s.len <= pos);
        self.segments.get(idx).filter(|s| s.normalized_range().contains(&pos))
    }

    fn find_original(&self, pos: usize) -> Option<&OffsetSegment> {
        let idx = self.segments.partition_point(|s| s.original + s.len <= pos);
        self.segments.get(idx).filter(|s| s.original_range().contains(&pos))
    }

    /// Source offset of the normalized byte at `pos`, if it survived.
    pub fn to_original_pos(&self, pos: usize) -> Option<usize> {
        self.find_normalized(pos).map(|s| s.original + (pos - s.normalized))
    }

    /// Normalized offset of the source byte at `pos`, if it survived.
    pub fn to_normalized_pos(&self, pos: usize) -> Option<usize> {
        self.find_original(pos).map(|s| s.normalized + (pos - s.original))
    }

    /// Maps a normalized span to the source span from its first to its last
    /// byte. `None` when either endpoint was synthesized.
    pub fn to_original(&self, span: Range<usize>) -> Option<Range<usize>> {
        if span.is_empty() {
            return None;
        }
        let start = self.to_original_pos(span.start)?;
        let last = self.to_original_pos(span.end - 1)?;
        (last >= start).then_some(start..last + 1)
    }

    /// Inverse of [`OffsetMap::to_original`].
    pub fn to_normalized(&self, span: Range<usize>) -> Option<Range<usize>> {
        if span.is_empty() {
            return None;
        }
        let start = self.to_normalized_pos(span.start)?;
        let last = self.to_normalized_pos(span.end - 1)?;
        (last >= start).then_some(start..last + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traced(spec: &[(char, Option<usize>)]) -> Vec<Traced> {
        spec.iter().map(|&(ch, src)| Traced { ch, src }).collect()
    }

    #[test]
    fn merges_contiguous_runs() {
        let map = OffsetMap::from_traced(&traced(&[
            ('-', None),
            (' ', None),
            ('a', Some(10)),
            ('b', Some(11)),
            ('c', Some(15)),
        ]));
        assert_eq!(
            map.segments,
            [
                OffsetSegment { normalized: 2, original: 10, len: 2 },
                OffsetSegment { normalized: 4, original: 15, len: 1 },
            ]
        );
        assert_eq!(map.to_original(2..5), Some(10..16));
        assert_eq!(map.to_normalized(10..16), Some(2..5));
        assert_eq!(map.to_original(0..3), None);
        assert_eq!(map.to_original_pos(3), Some(11));
        assert_eq!(map.to_normalized_pos(12), None);
    }

    #[test]
    fn multibyte_characters_keep_byte_widths() {
        let map = OffsetMap::from_traced(&traced(&[('é', Some(0)), ('x', Some(2))]));
        assert_eq!(map.segments.len(), 1);
        assert_eq!(map.segments[0].len, 3);
        assert_eq!(map.to_original(0..3), Some(0..3));
    }
}
