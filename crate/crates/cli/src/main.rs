use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use bankspread::docmodel::{validate_document, StatementDocument, Warning};
use bankspread::metrics::{classifier_f1, detection_metrics, EvalPair};
use bankspread::pipeline::{run_pipeline, PipelineConfig, PipelineOutput};
use bankspread::spreading::{write_transactions_csv, SpreadConfig, SynonymTable};
use bankspread::synthgen::{generate_statement, write_outputs, GenConfig};
use bankspread::tdc_refine::{read_corpus, shipped_corpus, split_corpus, NbModels, NbVariant, TextSample};
use bankspread::tsr_post::{render_svg, TsrConfig};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

/// Bank-statement spreading from table detections and OCR words.
#[derive(Parser)]
#[command(name = "bankspread", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract transactions and reconcile them against the balances.
    /// Exit code 0 when every checksum is zero, 2 otherwise.
    Spread(SpreadArgs),
    /// Train the three naive Bayes text models.
    TrainNb(TrainArgs),
    /// Score predicted detections against ground truth.
    EvalDetect(EvalArgs),
    /// Write an SVG overlay of every structured table.
    Render(RenderArgs),
    /// Generate a synthetic statement with its expected transactions.
    Gen(GenArgs),
    /// Parse an ingestion file and report consistency warnings.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct PipelineArgs {
    /// Directory holding header.json, caption.json and header_caption.json.
    #[arg(long, value_name = "DIR")]
    nb_models: Option<PathBuf>,
    /// JSON object of extra header synonyms, `{"role": ["phrase", ...]}`.
    #[arg(long, value_name = "FILE")]
    synonyms: Option<PathBuf>,
    /// Year for dates printed without one.
    #[arg(long, value_name = "N")]
    year: Option<i32>,
    /// JSON object overriding structure thresholds.
    #[arg(long, value_name = "FILE")]
    thresholds: Option<PathBuf>,
}

impl PipelineArgs {
    fn config(&self) -> anyhow::Result<PipelineConfig> {
        let models = match &self.nb_models {
            Some(dir) => NbModels::load_dir(dir)?,
            None => NbModels::shipped(),
        };
        let synonyms = match &self.synonyms {
            Some(p) => SynonymTable::load(p)?,
            None => SynonymTable::default(),
        };
        let tsr = match &self.thresholds {
            Some(p) => TsrConfig::load(p)?,
            None => TsrConfig::default(),
        };
        Ok(PipelineConfig {
            models,
            spread: SpreadConfig { synonyms, year: self.year },
            tsr,
        })
    }
}

#[derive(Args)]
struct SpreadArgs {
    /// Ingestion file, or a directory of them.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads for directory input (default: all cores).
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args)]
struct TrainArgs {
    /// CSV with caption_text, header_text, category; the shipped corpus
    /// when omitted.
    #[arg(long, value_name = "FILE")]
    corpus: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Train on this per-class fraction and print F1 on the remainder.
    #[arg(long, value_name = "FRACTION")]
    holdout: Option<f64>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_name = "FILE")]
    gt: PathBuf,
    #[arg(long, value_name = "FILE")]
    pred: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    pages: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    /// Uniform ± amplitude in pixels applied to detection boxes.
    #[arg(long)]
    jitter: Option<f64>,
    #[arg(long)]
    year: Option<i32>,
    /// Full generator settings as JSON; flags override it.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    input: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Spread(a) => spread(a),
        Command::TrainNb(a) => train_nb(a).map(|_| ExitCode::SUCCESS),
        Command::EvalDetect(a) => eval_detect(a).map(|_| ExitCode::SUCCESS),
        Command::Render(a) => render(a).map(|_| ExitCode::SUCCESS),
        Command::Gen(a) => gen(a).map(|_| ExitCode::SUCCESS),
        Command::Validate(a) => validate(a).map(|_| ExitCode::SUCCESS),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(1)
    })
}

fn load_doc(path: &Path) -> anyhow::Result<StatementDocument> {
    let (doc, warnings) = StatementDocument::load(path).with_context(|| format!("reading {}", path.display()))?;
    report_warnings(path, &warnings);
    Ok(doc)
}

fn report_warnings(path: &Path, warnings: &[Warning]) {
    for w in warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
}

fn create_file(path: &Path) -> anyhow::Result<fs::File> {
    fs::File::create(path).with_context(|| format!("creating {}", path.display()))
}

/// Runs one document and writes `transactions.csv` and `report.json` into
/// `out`. Returns whether the statement balanced.
fn spread_one(input: &Path, out: &Path, cfg: &PipelineConfig) -> anyhow::Result<bool> {
    let doc = load_doc(input)?;
    let PipelineOutput { report, .. } = run_pipeline(&doc, cfg).with_context(|| input.display().to_string())?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let csv = out.join("transactions.csv");
    write_transactions_csv(std::io::BufWriter::new(create_file(&csv)?), &report.spread.transactions)?;
    let json = out.join("report.json");
    fs::write(&json, report.to_json_string()).with_context(|| format!("writing {}", json.display()))?;
    Ok(report.spread.balanced)
}

fn json_files(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "json") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn spread(a: SpreadArgs) -> anyhow::Result<ExitCode> {
    let cfg = a.pipeline.config()?;
    if !a.input.is_dir() {
        let balanced = spread_one(&a.input, &a.out, &cfg)?;
        return Ok(if balanced { ExitCode::SUCCESS } else { ExitCode::from(2) });
    }

    let files = json_files(&a.input)?;
    if files.is_empty() {
        bail!("no .json files in {}", a.input.display());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.unwrap_or(0))
        .build()
        .context("starting worker pool")?;
    let results: Vec<anyhow::Result<bool>> = pool.install(|| {
        files
            .par_iter()
            .map(|f| {
                let stem = f.file_stem().unwrap_or_default();
                spread_one(f, &a.out.join(stem), &cfg)
            })
            .collect()
    });

    let mut failed = false;
    let mut unbalanced = false;
    for (f, r) in files.iter().zip(results) {
        match r {
            Ok(true) => println!("{}: balanced", f.display()),
            Ok(false) => {
                unbalanced = true;
                println!("{}: checksum nonzero", f.display());
            }
            Err(e) => {
                failed = true;
                eprintln!("error: {e:#}");
            }
        }
    }
    Ok(if failed {
        ExitCode::from(1)
    } else if unbalanced {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn train_nb(a: TrainArgs) -> anyhow::Result<()> {
    let corpus = match &a.corpus {
        Some(p) => read_corpus(p)?,
        None => shipped_corpus(),
    };
    let (train, test): (Vec<TextSample>, Vec<TextSample>) = match a.holdout {
        Some(f) if f > 0.0 && f < 1.0 => split_corpus(&corpus, f),
        Some(f) => bail!("--holdout must lie strictly between 0 and 1, got {f}"),
        None => (corpus, Vec::new()),
    };
    let models = NbModels::train(&train)?;
    models.save_dir(&a.out)?;
    eprintln!("trained on {} samples, models in {}", train.len(), a.out.display());

    if !test.is_empty() {
        let mut report = serde_json::Map::new();
        for v in NbVariant::ALL {
            let model = models.get(v);
            let pairs: Vec<_> = test.iter().map(|s| (s.category, model.predict(&s.text(v)).category)).collect();
            report.insert(v.as_str().to_string(), serde_json::to_value(classifier_f1(&pairs))?);
        }
        println!("{}", serde_json::to_string_pretty(&report)?);
    }
    Ok(())
}

fn eval_detect(a: EvalArgs) -> anyhow::Result<()> {
    let gt = load_doc(&a.gt)?;
    let pred = load_doc(&a.pred)?;
    let pages = gt.pages.len().max(pred.pages.len());
    let per_page = |gt: &[bankspread::DetectedObject], pred: &[bankspread::DetectedObject]| -> Vec<EvalPair> {
        (0..pages)
            .map(|p| EvalPair {
                ground_truth: gt.iter().filter(|o| o.page == p).cloned().collect(),
                predictions: pred.iter().filter(|o| o.page == p).cloned().collect(),
            })
            .collect()
    };
    let report = json!({
        "tdc": detection_metrics(&per_page(&gt.tdc, &pred.tdc)),
        "tsr": detection_metrics(&per_page(&gt.tsr, &pred.tsr)),
    });
    let text = serde_json::to_string_pretty(&report)? + "\n";
    match &a.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn render(a: RenderArgs) -> anyhow::Result<()> {
    let cfg = a.pipeline.config()?;
    let doc = load_doc(&a.input)?;
    let out = run_pipeline(&doc, &cfg)?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    for (i, (table, seps)) in out.tables.iter().zip(&out.separators).enumerate() {
        let page = doc
            .page(table.page)
            .with_context(|| format!("table {i} sits on missing page {}", table.page))?;
        let svg = render_svg(&table.grid, seps, f64::from(page.width), f64::from(page.height));
        let path = a.out.join(format!("page{}_table{i}.svg", table.page));
        fs::write(&path, svg).with_context(|| format!("writing {}", path.display()))?;
    }
    eprintln!("{} tables rendered", out.tables.len());
    Ok(())
}

fn gen(a: GenArgs) -> anyhow::Result<()> {
    let mut cfg: GenConfig = match &a.config {
        Some(p) => {
            let s = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&s).with_context(|| format!("parsing {}", p.display()))?
        }
        None => GenConfig::default(),
    };
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(p) = a.pages {
        cfg.pages = p;
    }
    if let Some(j) = a.jitter {
        cfg.jitter = j;
    }
    if let Some(y) = a.year {
        cfg.year = y;
    }
    let generated = generate_statement(&cfg)?;
    write_outputs(&generated, &a.out)?;
    eprintln!(
        "{} transactions over {} pages in {}",
        generated.expected.len(),
        cfg.pages,
        a.out.display()
    );
    Ok(())
}

fn validate(a: ValidateArgs) -> anyhow::Result<()> {
    let (doc, mut warnings) =
        StatementDocument::load(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    warnings.extend(validate_document(&doc));
    report_warnings(&a.input, &warnings);
    println!(
        "{}: {} pages, {} tdc, {} tsr, {} words, {} warnings",
        a.input.display(),
        doc.pages.len(),
        doc.tdc.len(),
        doc.tsr.len(),
        doc.ocr.len(),
        warnings.len()
    );
    if doc.summary.is_none() {
        eprintln!("warning: {}: no summary balances; spread will fail", a.input.display());
    }
    Ok(())
}
