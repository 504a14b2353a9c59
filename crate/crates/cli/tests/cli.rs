use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bankspread::synthgen::{generate_statement, write_outputs, GenConfig};
use bankspread::StatementDocument;

const BIN: &str = env!("CARGO_BIN_EXE_bankspread");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn generated(dir: &Path, seed: u64) -> PathBuf {
    let cfg = GenConfig { seed, pages: 2, ..GenConfig::default() };
    write_outputs(&generate_statement(&cfg).unwrap(), dir).unwrap();
    dir.join("statement.json")
}

#[test]
fn spread_writes_outputs_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let input = generated(&dir.path().join("g"), 5);
    let out = dir.path().join("out");
    let o = run(&["spread", "--input", s(&input), "--out", s(&out), "--year", "2024"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        fs::read_to_string(out.join("transactions.csv")).unwrap(),
        fs::read_to_string(dir.path().join("g/expected.csv")).unwrap()
    );
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["checksum_cents"], 0);
    assert_eq!(report["balanced"], true);
    assert!(!report["tables"].as_array().unwrap().is_empty());
}

#[test]
fn nonzero_checksum_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = generated(dir.path(), 6);
    let (mut doc, _) = StatementDocument::load(&input).unwrap();
    doc.summary.as_mut().unwrap().closing_cents += 1;
    doc.save(&input).unwrap();
    let out = dir.path().join("out");
    let o = run(&["spread", "--input", s(&input), "--out", s(&out), "--year", "2024"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(fs::read_to_string(out.join("report.json")).unwrap().contains("\"checksum_cents\": -1"));
}

#[test]
fn missing_summary_exits_one_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let input = generated(dir.path(), 7);
    let (mut doc, _) = StatementDocument::load(&input).unwrap();
    doc.summary = None;
    doc.save(&input).unwrap();
    let o = run(&["spread", "--input", s(&input), "--out", s(&dir.path().join("o"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("summary"), "{}", stderr(&o));
}

#[test]
fn malformed_record_exits_one_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    fs::write(
        &input,
        r#"{"pages": [{"index": 0, "width": 100, "height": 100}],
            "tdc": [{"page": 0, "label": "credit", "score": 0.9, "box": [0, 0, 10, 10]},
                    {"page": 0, "label": "cell", "score": 0.9, "box": [0, 0, 10, 10]}]}"#,
    )
    .unwrap();
    let o = run(&["spread", "--input", s(&input), "--out", s(&dir.path().join("o"))]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("cell") && err.contains('1'), "{err}");
}

#[test]
fn directory_input_processes_every_file() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = dir.path().join("in");
    fs::create_dir_all(&inputs).unwrap();
    for seed in [1, 2] {
        let g = generate_statement(&GenConfig { seed, ..GenConfig::default() }).unwrap();
        g.statement.save(inputs.join(format!("s{seed}.json"))).unwrap();
    }
    let out = dir.path().join("out");
    let o = run(&["spread", "--input", s(&inputs), "--out", s(&out), "--year", "2024", "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for stem in ["s1", "s2"] {
        assert!(out.join(stem).join("transactions.csv").is_file());
        assert!(out.join(stem).join("report.json").is_file());
    }
}

#[test]
fn trained_models_and_overrides_are_used() {
    let dir = tempfile::tempdir().unwrap();
    let models = dir.path().join("models");
    let o = run(&["train-nb", "--out", s(&models), "--holdout", "0.7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let f1: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(f1["header_caption"]["macro_f1"].as_f64().unwrap() >= 0.95);
    for f in ["header.json", "caption.json", "header_caption.json"] {
        assert!(models.join(f).is_file());
    }

    let thresholds = dir.path().join("thresholds.json");
    fs::write(&thresholds, r#"{"nms_iou": 0.6}"#).unwrap();
    let synonyms = dir.path().join("synonyms.json");
    fs::write(&synonyms, r#"{"amount": ["sum"]}"#).unwrap();
    let input = generated(&dir.path().join("g"), 8);
    let o = run(&[
        "spread", "--input", s(&input), "--out", s(&dir.path().join("o")), "--year", "2024",
        "--nb-models", s(&models), "--thresholds", s(&thresholds), "--synonyms", s(&synonyms),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    fs::write(&thresholds, r#"{"nms": 0.6}"#).unwrap();
    let o = run(&["spread", "--input", s(&input), "--out", s(&dir.path().join("o")), "--thresholds", s(&thresholds)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nms"));
}

#[test]
fn train_nb_reads_a_corpus_csv() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.csv");
    let mut text = String::from("caption_text,header_text,category\n");
    for c in ["credit", "debit", "check", "txn_bal", "txn_amt_bal", "txn_chk_bal", "other"] {
        text += &format!("{c} caption,{c} header,{c}\n");
    }
    fs::write(&corpus, text).unwrap();
    let o = run(&["train-nb", "--corpus", s(&corpus), "--out", s(&dir.path().join("m"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    fs::write(&corpus, "caption_text,header_text,category\na,b,savings\n").unwrap();
    let o = run(&["train-nb", "--corpus", s(&corpus), "--out", s(&dir.path().join("m"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("savings"), "{}", stderr(&o));
}

#[test]
fn eval_detect_scores_ground_truth_perfectly() {
    let dir = tempfile::tempdir().unwrap();
    generated(dir.path(), 9);
    let gt = dir.path().join("ground_truth.json");
    let out = dir.path().join("metrics.json");
    let o = run(&["eval-detect", "--gt", s(&gt), "--pred", s(&gt), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    for section in ["tdc", "tsr"] {
        for key in ["ap50", "ap75", "ap", "ar"] {
            assert_eq!(m[section][key], 1.0, "{section}.{key}");
        }
    }
}

#[test]
fn render_writes_one_svg_per_table() {
    let dir = tempfile::tempdir().unwrap();
    let input = generated(&dir.path().join("g"), 10);
    let out = dir.path().join("svg");
    let o = run(&["render", "--input", s(&input), "--out", s(&out), "--year", "2024"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let svgs: Vec<_> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().path()).collect();
    assert!(!svgs.is_empty());
    assert!(fs::read_to_string(&svgs[0]).unwrap().starts_with("<svg"));
}

#[test]
fn gen_is_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = run(&["gen", "--seed", "42", "--pages", "3", "--out", s(d), "--jitter", "2"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for f in ["statement.json", "ground_truth.json", "expected.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let o = run(&["gen", "--pages", "0", "--out", s(&a)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn validate_reports_counts_and_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("doc.json");
    fs::write(
        &input,
        r#"{"pages": [{"index": 0, "width": 100, "height": 100}], "vendor": "x",
            "tdc": [{"page": 0, "label": "credit", "score": 0.9, "box": [0, 0, 10, 10]}]}"#,
    )
    .unwrap();
    let o = run(&["validate", "--input", s(&input)]);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("1 pages, 1 tdc"), "{stdout}");
    assert!(stderr(&o).contains("vendor"), "{}", stderr(&o));
}
