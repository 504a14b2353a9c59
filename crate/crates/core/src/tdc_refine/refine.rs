use std::path::Path;

use serde::Serialize;

use super::corpus::{samples_for, shipped_corpus, TextSample};
use super::nb::{NbModel, NbVariant, TextCategory};
use super::text::RegionText;
use crate::docmodel::{DetectedObject, TableCategory};
use crate::error::{Error, Result};

/// The three text classifiers, one per available-text situation.
#[derive(Debug, Clone, PartialEq)]
pub struct NbModels {
    pub header: NbModel,
    pub caption: NbModel,
    pub header_caption: NbModel,
}

impl NbModels {
    pub fn train(samples: &[TextSample]) -> Result<NbModels> {
        let fit = |v| NbModel::train(&samples_for(samples, v), v);
        Ok(NbModels {
            header: fit(NbVariant::Header)?,
            caption: fit(NbVariant::Caption)?,
            header_caption: fit(NbVariant::HeaderCaption)?,
        })
    }

    /// Models trained on the shipped synthetic corpus.
    pub fn shipped() -> NbModels {
        NbModels::train(&shipped_corpus()).expect("shipped corpus covers every class")
    }

    pub fn get(&self, variant: NbVariant) -> &NbModel {
        match variant {
            NbVariant::Header => &self.header,
            NbVariant::Caption => &self.caption,
            NbVariant::HeaderCaption => &self.header_caption,
        }
    }

    pub fn file_name(variant: NbVariant) -> String {
        format!("{}.json", variant.as_str())
    }

    /// Writes `header.json`, `caption.json` and `header_caption.json`.
    pub fn save_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for v in NbVariant::ALL {
            self.get(v).save(&dir.join(NbModels::file_name(v)))?;
        }
        Ok(())
    }

    pub fn load_dir(dir: &Path) -> Result<NbModels> {
        let load = |v: NbVariant| -> Result<NbModel> {
            let m = NbModel::load(&dir.join(NbModels::file_name(v)))?;
            if m.variant != v {
                return Err(Error::Config(format!(
                    "{} holds a {} model",
                    NbModels::file_name(v),
                    m.variant.as_str()
                )));
            }
            Ok(m)
        };
        Ok(NbModels {
            header: load(NbVariant::Header)?,
            caption: load(NbVariant::Caption)?,
            header_caption: load(NbVariant::HeaderCaption)?,
        })
    }
}

/// Outcome of category refinement for one table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Refinement {
    pub vision: TableCategory,
    pub category: TableCategory,
    /// Model used, if any text was available.
    pub variant: Option<NbVariant>,
    /// Unrestricted text prediction. Only applied for merged credit/debit
    /// tables; recorded for the rest.
    pub predicted: Option<TextCategory>,
}

const SERVICE_FEE: &str = "service fee";

fn non_empty(t: Option<&RegionText>) -> Option<&RegionText> {
    t.filter(|t| !t.is_empty())
}

/// Final category for a table given its vision label and region texts.
pub fn refine_category(
    table: &DetectedObject,
    caption: Option<&RegionText>,
    header: Option<&RegionText>,
    models: &NbModels,
) -> Refinement {
    let vision = table.category().unwrap_or(TableCategory::Other);
    let caption = non_empty(caption);
    let header = non_empty(header);
    let (variant, text) = match (caption, header) {
        (Some(c), Some(h)) => (Some(NbVariant::HeaderCaption), RegionText::concat(c, h)),
        (Some(c), None) => (Some(NbVariant::Caption), c.clone()),
        (None, Some(h)) => (Some(NbVariant::Header), h.clone()),
        (None, None) => (None, RegionText::default()),
    };
    let model = variant.map(|v| models.get(v));
    let predicted = model.map(|m| m.predict(&text).category);

    let category = match vision {
        TableCategory::CreditDebit => match model {
            Some(m) => m
                .predict_among(&text, &[TextCategory::Credit, TextCategory::Debit])
                .category
                .table_category(),
            None => TableCategory::Debit,
        },
        TableCategory::Other if caption.is_some_and(|c| c.contains_phrase(SERVICE_FEE)) => TableCategory::Debit,
        other => other,
    };
    Refinement {
        vision,
        category,
        variant,
        predicted,
    }
}
