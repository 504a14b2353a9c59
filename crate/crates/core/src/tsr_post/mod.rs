//! Structure post-processing: from raw row/column detections of one table
//! to a text-filled grid.

mod grid;
mod refine;
mod render;
mod separators;
mod split;

use serde::{Deserialize, Serialize};

pub use grid::{assign_text, build_grid, Cell, TableGrid};
pub use refine::{refine_structure, RefinedStructure};
pub use render::render_svg;
pub use separators::infer_row_separators;
pub use split::{merge_split_outputs, split_long_table, split_long_table_with, SplitPlan};

use crate::docmodel::{DetectedObject, OcrWord, TsrClass};
use crate::error::{Error, Result};
use crate::geometry::{nms, BBox};

pub const MAX_ROWS_PER_PART: usize = 20;
pub const DEFAULT_SPLIT_MARGIN: f64 = 10.0;
/// Detector query budget per sub-image.
pub const MAX_QUERIES: usize = 125;

/// Tunable thresholds. Every field has a default and may be overridden
/// from a JSON thresholds file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TsrConfig {
    pub nms_iou: f64,
    pub missing_row_iou: f64,
    pub gap_factor: f64,
    pub cluster_gap_factor: f64,
    pub split_margin: f64,
    pub max_rows_per_part: usize,
    pub header_iou: f64,
    pub merge_column_iou: f64,
    /// Fraction of a structure object's area that must fall inside a table
    /// for the object to belong to it.
    pub membership: f64,
}

impl Default for TsrConfig {
    fn default() -> Self {
        TsrConfig {
            nms_iou: 0.5,
            missing_row_iou: 0.25,
            gap_factor: 1.5,
            cluster_gap_factor: 0.6,
            split_margin: DEFAULT_SPLIT_MARGIN,
            max_rows_per_part: MAX_ROWS_PER_PART,
            header_iou: 0.5,
            merge_column_iou: 0.7,
            membership: 0.5,
        }
    }
}

impl TsrConfig {
    /// Defaults overridden by whichever fields a JSON object names.
    pub fn from_json_str(s: &str) -> Result<TsrConfig> {
        let cfg: TsrConfig = serde_json::from_str(s).map_err(|e| Error::Config(format!("thresholds: {e}")))?;
        let unit = [cfg.nms_iou, cfg.missing_row_iou, cfg.header_iou, cfg.merge_column_iou, cfg.membership];
        if unit.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Config("IoU and membership thresholds must lie in [0, 1]".into()));
        }
        if cfg.max_rows_per_part == 0 || cfg.split_margin.is_nan() || cfg.split_margin < 0.0 {
            return Err(Error::Config("max_rows_per_part must be positive and split_margin non-negative".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<TsrConfig> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        TsrConfig::from_json_str(&s)
    }
}

/// Structure objects on `page` lying mostly inside `table`.
pub fn objects_in_table(
    table: &BBox,
    page: usize,
    tsr: &[DetectedObject],
    membership: f64,
) -> Vec<DetectedObject> {
    tsr.iter()
        .filter(|o| o.page == page && o.bbox.containment_in(table) >= membership)
        .cloned()
        .collect()
}

/// White padding around a table crop, as used when preparing training
/// images.
pub fn pad(table: &BBox, pixels: f64, page: &BBox) -> BBox {
    table.pad(pixels).clamp_to(page)
}

/// Output of the full per-table structure stage.
#[derive(Debug, Clone)]
pub struct ProcessedTable {
    pub grid: TableGrid,
    pub separators: Vec<BBox>,
}

/// Runs separators → refinement → grid → text assignment for one table.
/// `structure` are the structure objects belonging to the table and `words`
/// the OCR words of its page.
pub fn process_table(
    table: &BBox,
    structure: &[DetectedObject],
    words: &[OcrWord],
    cfg: &TsrConfig,
) -> Result<ProcessedTable> {
    let columns: Vec<DetectedObject> = structure
        .iter()
        .filter(|o| o.tsr_class() == Some(TsrClass::TableColumn))
        .cloned()
        .collect();
    let date_column = nms(&columns, cfg.nms_iou)
        .into_iter()
        .map(|c| c.bbox)
        .filter_map(|b| b.intersection(table).filter(BBox::has_area))
        .min_by(|a, b| a.x1.total_cmp(&b.x1));
    let separators = infer_row_separators(table, words, date_column.as_ref(), cfg.cluster_gap_factor);
    let refined = refine_structure(structure, &separators, table, cfg)?;
    let grid = assign_text(build_grid(&refined)?, words);
    Ok(ProcessedTable { grid, separators })
}
