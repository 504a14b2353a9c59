use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::text::RegionText;
use crate::docmodel::TableCategory;
use crate::error::{Error, Result};

/// Categories predicted by the text classifiers. Declaration order is the
/// fixed tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextCategory {
    Credit,
    Debit,
    Check,
    TxnBal,
    TxnAmtBal,
    TxnChkBal,
    Other,
}

impl TextCategory {
    pub const ALL: [TextCategory; 7] = [
        TextCategory::Credit,
        TextCategory::Debit,
        TextCategory::Check,
        TextCategory::TxnBal,
        TextCategory::TxnAmtBal,
        TextCategory::TxnChkBal,
        TextCategory::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TextCategory::Credit => "credit",
            TextCategory::Debit => "debit",
            TextCategory::Check => "check",
            TextCategory::TxnBal => "txn_bal",
            TextCategory::TxnAmtBal => "txn_amt_bal",
            TextCategory::TxnChkBal => "txn_chk_bal",
            TextCategory::Other => "other",
        }
    }

    pub fn table_category(self) -> TableCategory {
        match self {
            TextCategory::Credit => TableCategory::Credit,
            TextCategory::Debit => TableCategory::Debit,
            TextCategory::Check => TableCategory::Check,
            TextCategory::TxnBal => TableCategory::TxnBal,
            TextCategory::TxnAmtBal => TableCategory::TxnAmtBal,
            TextCategory::TxnChkBal => TableCategory::TxnCheckBal,
            TextCategory::Other => TableCategory::Other,
        }
    }
}

impl fmt::Display for TextCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TextCategory {
    type Err = Error;

    /// Accepts the classifier names and the detector spelling `txn_check_bal`.
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase();
        if norm == "txn_check_bal" {
            return Ok(TextCategory::TxnChkBal);
        }
        TextCategory::ALL
            .into_iter()
            .find(|c| c.as_str() == norm)
            .ok_or_else(|| Error::UnknownCategory(s.to_string()))
    }
}

/// Which region text a model is trained on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NbVariant {
    Header,
    Caption,
    HeaderCaption,
}

impl NbVariant {
    pub const ALL: [NbVariant; 3] = [NbVariant::Header, NbVariant::Caption, NbVariant::HeaderCaption];

    pub fn as_str(self) -> &'static str {
        match self {
            NbVariant::Header => "header",
            NbVariant::Caption => "caption",
            NbVariant::HeaderCaption => "header_caption",
        }
    }

    /// The text this variant reads from a caption/header pair.
    pub fn select(self, caption: &RegionText, header: &RegionText) -> RegionText {
        match self {
            NbVariant::Header => header.clone(),
            NbVariant::Caption => caption.clone(),
            NbVariant::HeaderCaption => RegionText::concat(caption, header),
        }
    }
}

/// Multinomial naive Bayes over token counts with additive smoothing.
#[derive(Debug, Clone, PartialEq)]
pub struct NbModel {
    pub variant: NbVariant,
    pub classes: Vec<TextCategory>,
    pub vocab: BTreeMap<String, usize>,
    pub class_doc_counts: Vec<u64>,
    /// `class_token_counts[c][t]`, dense over the vocabulary.
    pub class_token_counts: Vec<Vec<u64>>,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NbPrediction {
    pub category: TextCategory,
    /// Normalized log posteriors, aligned with the model's `classes`.
    pub log_posteriors: Vec<f64>,
}

impl NbModel {
    /// Trains over all seven text categories; every one needs a sample.
    pub fn train(samples: &[(RegionText, TextCategory)], variant: NbVariant) -> Result<NbModel> {
        NbModel::train_with_classes(samples, variant, &TextCategory::ALL)
    }

    /// Trains over an explicit class list (kept in the given order).
    pub fn train_with_classes(
        samples: &[(RegionText, TextCategory)],
        variant: NbVariant,
        classes: &[TextCategory],
    ) -> Result<NbModel> {
        let mut tokens: Vec<&str> = samples
            .iter()
            .flat_map(|(t, _)| t.tokens.iter().map(String::as_str))
            .collect();
        tokens.sort_unstable();
        tokens.dedup();
        let vocab: BTreeMap<String, usize> = tokens
            .into_iter()
            .enumerate()
            .map(|(i, t)| (t.to_string(), i))
            .collect();

        let mut doc_counts = vec![0u64; classes.len()];
        let mut token_counts = vec![vec![0u64; vocab.len()]; classes.len()];
        for (text, cat) in samples {
            let c = classes
                .iter()
                .position(|k| k == cat)
                .ok_or_else(|| Error::UnknownCategory(cat.to_string()))?;
            doc_counts[c] += 1;
            for tok in &text.tokens {
                token_counts[c][vocab[tok]] += 1;
            }
        }
        if let Some(c) = doc_counts.iter().position(|&n| n == 0) {
            return Err(Error::EmptyClass(classes[c].to_string()));
        }
        Ok(NbModel {
            variant,
            classes: classes.to_vec(),
            vocab,
            class_doc_counts: doc_counts,
            class_token_counts: token_counts,
            alpha: 1.0,
        })
    }

    /// Unnormalized log joint per class: log prior plus summed token log
    /// likelihoods. Tokens outside the vocabulary get the smoothed floor.
    pub fn log_joint(&self, text: &RegionText) -> Vec<f64> {
        let n_docs: u64 = self.class_doc_counts.iter().sum();
        let v = self.vocab.len() as f64;
        self.classes
            .iter()
            .enumerate()
            .map(|(c, _)| {
                let counts = &self.class_token_counts[c];
                let total: u64 = counts.iter().sum();
                let denom = (total as f64 + self.alpha * v).ln();
                let prior = (self.class_doc_counts[c] as f64 / n_docs as f64).ln();
                prior
                    + text
                        .tokens
                        .iter()
                        .map(|tok| {
                            let k = self.vocab.get(tok).map_or(0, |&i| counts[i]);
                            (k as f64 + self.alpha).ln() - denom
                        })
                        .sum::<f64>()
            })
            .collect()
    }

    pub fn predict(&self, text: &RegionText) -> NbPrediction {
        self.predict_among(text, &self.classes)
    }

    /// Argmax restricted to `allowed` (first class in model order wins ties).
    /// The returned posteriors still cover every class.
    pub fn predict_among(&self, text: &RegionText, allowed: &[TextCategory]) -> NbPrediction {
        let joint = self.log_joint(text);
        let max = joint.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_z = max + joint.iter().map(|j| (j - max).exp()).sum::<f64>().ln();
        let mut best: Option<usize> = None;
        for (c, class) in self.classes.iter().enumerate() {
            if allowed.contains(class) && best.is_none_or(|b| joint[c] > joint[b]) {
                best = Some(c);
            }
        }
        NbPrediction {
            category: self.classes[best.unwrap_or(0)],
            log_posteriors: joint.iter().map(|j| j - log_z).collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&ModelFile::from(self)).expect("model serializes")
    }

    pub fn from_json_str(s: &str) -> Result<NbModel> {
        serde_json::from_str::<ModelFile>(s)?.try_into()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<NbModel> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        NbModel::from_json_str(&s)
    }
}

/// On-disk layout: counts keyed by class name, token counts sparse by
/// vocabulary index.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    variant: NbVariant,
    classes: Vec<TextCategory>,
    vocab: BTreeMap<String, usize>,
    class_doc_counts: BTreeMap<TextCategory, u64>,
    class_token_counts: BTreeMap<TextCategory, BTreeMap<usize, u64>>,
    alpha: f64,
}

impl From<&NbModel> for ModelFile {
    fn from(m: &NbModel) -> Self {
        ModelFile {
            variant: m.variant,
            classes: m.classes.clone(),
            vocab: m.vocab.clone(),
            class_doc_counts: m.classes.iter().copied().zip(m.class_doc_counts.iter().copied()).collect(),
            class_token_counts: m
                .classes
                .iter()
                .zip(&m.class_token_counts)
                .map(|(c, counts)| {
                    let sparse = counts.iter().enumerate().filter(|(_, &n)| n > 0).map(|(i, &n)| (i, n)).collect();
                    (*c, sparse)
                })
                .collect(),
            alpha: m.alpha,
        }
    }
}

impl TryFrom<ModelFile> for NbModel {
    type Error = Error;

    fn try_from(f: ModelFile) -> Result<NbModel> {
        let bad = |msg: String| Error::Config(format!("model file: {msg}"));
        if !(f.alpha > 0.0 && f.alpha.is_finite()) {
            return Err(bad(format!("alpha must be positive, got {}", f.alpha)));
        }
        let v = f.vocab.len();
        let mut seen = vec![false; v];
        for &i in f.vocab.values() {
            if i >= v || std::mem::replace(&mut seen[i], true) {
                return Err(bad(format!("vocabulary index {i} is out of range or repeated")));
            }
        }
        let mut doc_counts = Vec::with_capacity(f.classes.len());
        let mut token_counts = Vec::with_capacity(f.classes.len());
        for c in &f.classes {
            let n = *f.class_doc_counts.get(c).ok_or_else(|| bad(format!("no document count for {c}")))?;
            if n == 0 {
                return Err(Error::EmptyClass(c.to_string()));
            }
            doc_counts.push(n);
            let mut dense = vec![0u64; v];
            for (&i, &k) in f.class_token_counts.get(c).into_iter().flatten() {
                *dense.get_mut(i).ok_or_else(|| bad(format!("token index {i} outside vocabulary")))? = k;
            }
            token_counts.push(dense);
        }
        Ok(NbModel {
            variant: f.variant,
            classes: f.classes,
            vocab: f.vocab,
            class_doc_counts: doc_counts,
            class_token_counts: token_counts,
            alpha: f.alpha,
        })
    }
}
