//! Caption/header training text: CSV I/O and the shipped synthetic corpus.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::nb::{NbVariant, TextCategory};
use super::text::RegionText;
use crate::error::{Error, Result};

/// One labelled table: its caption text, header text and category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextSample {
    pub caption_text: String,
    pub header_text: String,
    pub category: TextCategory,
}

impl TextSample {
    pub fn text(&self, variant: NbVariant) -> RegionText {
        variant.select(
            &RegionText::from_text(&self.caption_text),
            &RegionText::from_text(&self.header_text),
        )
    }
}

/// Training pairs for one variant.
pub fn samples_for(samples: &[TextSample], variant: NbVariant) -> Vec<(RegionText, TextCategory)> {
    samples.iter().map(|s| (s.text(variant), s.category)).collect()
}

/// Reads a `caption_text,header_text,category` CSV with a header line.
pub fn read_corpus(path: &Path) -> Result<Vec<TextSample>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus_from(file)
}

pub fn read_corpus_from(reader: impl std::io::Read) -> Result<Vec<TextSample>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for rec in rdr.deserialize::<RawSample>() {
        let rec = rec?;
        out.push(TextSample {
            caption_text: rec.caption_text,
            header_text: rec.header_text,
            category: rec.category.parse()?,
        });
    }
    Ok(out)
}

pub fn write_corpus(path: &Path, samples: &[TextSample]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for s in samples {
        w.serialize(s)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Deserialize)]
struct RawSample {
    caption_text: String,
    header_text: String,
    category: String,
}

pub const SAMPLES_PER_CLASS: usize = 40;
const CORPUS_SEED: u64 = 0x7ab1e;

// Keyword pools. Class pools are pairwise disjoint; the shared pools carry
// words every class uses.
const CAPTION_FILLER: &[&str] = &["total", "your", "and", "account", "other", "for", "the"];
const HEADER_SHARED: &[&str] = &["date", "description", "amount", "balance", "details"];

fn caption_pool(c: TextCategory) -> &'static [&'static str] {
    match c {
        TextCategory::Credit => &["deposits", "additions", "credits", "incoming", "received", "added"],
        TextCategory::Debit => &["withdrawals", "subtractions", "debits", "outgoing", "deductions", "charges"],
        TextCategory::Check => &["checks", "cheques", "cleared", "drafts", "numbered", "paid"],
        TextCategory::TxnBal => &["activity", "daily", "ledger", "history", "register", "transactions"],
        TextCategory::TxnAmtBal => &["postings", "movements", "journal", "entries", "itemized", "signed"],
        TextCategory::TxnChkBal => &["checking", "combined", "chronological", "detailed", "sequence", "log"],
        TextCategory::Other => &["summary", "overview", "service", "fee", "interest", "monthly", "rewards"],
    }
}

fn header_pool(c: TextCategory) -> &'static [&'static str] {
    match c {
        TextCategory::Credit => &["source", "credited", "origin"],
        TextCategory::Debit => &["payee", "debited", "merchant"],
        TextCategory::Check => &["check", "serial", "cashed"],
        TextCategory::TxnBal => &["withdrawn", "deposited", "closing"],
        TextCategory::TxnAmtBal => &["net", "amt", "sign"],
        TextCategory::TxnChkBal => &["chk", "ref", "cheque"],
        TextCategory::Other => &["category", "ytd", "period"],
    }
}

fn pick<'a>(rng: &mut ChaCha8Rng, pool: &[&'a str], lo: usize, hi: usize) -> Vec<&'a str> {
    let n = rng.gen_range(lo..=hi).min(pool.len());
    pool.choose_multiple(rng, n).copied().collect()
}

fn title_case(words: &[&str]) -> String {
    words
        .iter()
        .map(|w| {
            let mut c = w.chars();
            c.next().map_or_else(String::new, |f| f.to_uppercase().chain(c).collect())
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// The shipped corpus: seven classes × [`SAMPLES_PER_CLASS`] samples, the
/// same every time.
pub fn shipped_corpus() -> Vec<TextSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let mut out = Vec::with_capacity(TextCategory::ALL.len() * SAMPLES_PER_CLASS);
    for category in TextCategory::ALL {
        for _ in 0..SAMPLES_PER_CLASS {
            let mut caption = pick(&mut rng, caption_pool(category), 2, 3);
            caption.extend(pick(&mut rng, CAPTION_FILLER, 0, 2));
            caption.shuffle(&mut rng);
            let mut header = pick(&mut rng, HEADER_SHARED, 2, 4);
            header.extend(pick(&mut rng, header_pool(category), 1, 2));
            header.shuffle(&mut rng);
            out.push(TextSample {
                caption_text: title_case(&caption),
                header_text: title_case(&header),
                category,
            });
        }
    }
    out
}

/// Deterministic per-class split: the first `train_fraction` of each
/// class's samples (in corpus order) train, the rest test.
pub fn split_corpus(samples: &[TextSample], train_fraction: f64) -> (Vec<TextSample>, Vec<TextSample>) {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for category in TextCategory::ALL {
        let class: Vec<&TextSample> = samples.iter().filter(|s| s.category == category).collect();
        let cut = (class.len() as f64 * train_fraction).round() as usize;
        for (i, s) in class.into_iter().enumerate() {
            if i < cut { &mut train } else { &mut test }.push(s.clone());
        }
    }
    (train, test)
}
