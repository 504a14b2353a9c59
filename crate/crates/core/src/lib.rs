//! Turns table-detector and OCR output for bank statements into
//! categorized, checksum-validated transactions.
//!
//! The pipeline runs in three stages:
//!
//! 1. [`tdc_refine`] attaches captions and headers to detected tables and
//!    refines merged categories with multinomial naive Bayes text models.
//! 2. [`tsr_post`] cleans raw row/column detections into a grid and fills
//!    cells with OCR text.
//! 3. [`spreading`] orders tables, resolves header semantics, extracts
//!    transactions and reconciles them against the statement balances.
//!
//! [`geometry`] and [`metrics`] hold the box losses and evaluation code;
//! [`synthgen`] generates synthetic statements with known answers.

pub mod docmodel;
pub mod error;
pub mod geometry;
pub mod metrics;
pub mod pipeline;
pub mod spreading;
pub mod synthgen;
pub mod tdc_refine;
pub mod tsr_post;

pub use docmodel::{DetectedObject, Label, OcrWord, StatementDocument, TableCategory, TsrClass};
pub use error::{Error, Result};
pub use geometry::BBox;

