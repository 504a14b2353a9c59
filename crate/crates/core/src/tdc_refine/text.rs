use serde::{Deserialize, Serialize};

use crate::docmodel::{reading_order, OcrWord};
use crate::geometry::{iou, BBox};

/// Word-to-region overlap that counts as "the word belongs to the region".
pub const REGION_IOU: f64 = 0.5;
/// Fraction of a word's own area that must lie in the region when its IoU
/// is too small (short words inside a wide caption).
pub const WORD_CONTAINMENT: f64 = 0.9;

/// Lowercases and splits on anything that is not alphanumeric. Digits are
/// kept; punctuation never forms a token.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Text read from a caption or header region.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RegionText {
    pub region: BBox,
    pub raw: String,
    pub tokens: Vec<String>,
}

impl RegionText {
    pub fn new(region: BBox, raw: impl Into<String>) -> Self {
        let raw = raw.into();
        RegionText {
            region,
            tokens: tokenize(&raw),
            raw,
        }
    }

    pub fn from_text(raw: &str) -> Self {
        RegionText::new(BBox::default(), raw)
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Concatenation used by the combined caption + header classifier.
    pub fn concat(caption: &RegionText, header: &RegionText) -> RegionText {
        if caption.raw.is_empty() {
            return header.clone();
        }
        if header.raw.is_empty() {
            return caption.clone();
        }
        RegionText {
            region: caption.region.enclosing(&header.region),
            tokens: caption.tokens.iter().chain(&header.tokens).cloned().collect(),
            raw: format!("{} {}", caption.raw, header.raw),
        }
    }

    /// Whether the token stream contains `phrase` as consecutive tokens,
    /// or with the last phrase token as a prefix (`fee` matches `fees`).
    pub fn contains_phrase(&self, phrase: &str) -> bool {
        let needle = tokenize(phrase);
        if needle.is_empty() || needle.len() > self.tokens.len() {
            return false;
        }
        let last = needle.len() - 1;
        self.tokens.windows(needle.len()).any(|w| {
            w[..last] == needle[..last] && w[last].starts_with(needle[last].as_str())
        })
    }
}

/// Collects the words belonging to `region`: IoU above 0.5, or at least 90%
/// of the word's area inside the region. Words are joined in reading order.
pub fn extract_region_text<'a>(region: &BBox, words: impl IntoIterator<Item = &'a OcrWord>) -> RegionText {
    let inside: Vec<&OcrWord> = words
        .into_iter()
        .filter(|w| iou(&w.bbox, region) > REGION_IOU || w.bbox.containment_in(region) >= WORD_CONTAINMENT)
        .collect();
    let raw = reading_order(inside)
        .into_iter()
        .map(|w| w.text.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    RegionText::new(*region, raw)
}
