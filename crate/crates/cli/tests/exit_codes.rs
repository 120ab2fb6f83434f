use std::path::Path;
use std::process::Command;

const GOOD: &str = r#"{"id": "r1", "title": "Line Cook", "body": "Prepare meals.", "date_compiled": "2023-01"}"#;

fn write_config(dir: &Path, corpus: &str) -> std::path::PathBuf {
    std::fs::write(dir.join("corpus.jsonl"), corpus).unwrap();
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, "output_dir = \"out\"\n\n[corpus]\npaths = [\"corpus.jsonl\"]\n").unwrap();
    cfg
}

fn ingest(cfg: &Path) -> (Option<i32>, std::path::PathBuf) {
    let out = Command::new(env!("CARGO_BIN_EXE_adtext"))
        .env_remove("ADTEXT_OUT_DIR")
        .arg("--config")
        .arg(cfg)
        .arg("ingest")
        .output()
        .unwrap();
    (out.status.code(), cfg.parent().unwrap().join("out"))
}

#[test]
fn clean_run_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = ingest(&write_config(dir.path(), &format!("{GOOD}\n")));
    assert_eq!(code, Some(0));
    assert!(out.join("records.jsonl").exists());
    assert!(!out.join("errors_ingest.json").exists());
}

#[test]
fn rejected_rows_exit_two_with_error_report() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = format!("{GOOD}\n{{\"id\": \"r2\", \"title\": \"x\"}}\nnot json\n");
    let (code, out) = ingest(&write_config(dir.path(), &corpus));
    assert_eq!(code, Some(2));
    let report = std::fs::read_to_string(out.join("errors_ingest.json")).unwrap();
    assert!(report.contains("r2"), "{report}");
}

#[test]
fn missing_config_is_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = ingest(&dir.path().join("absent.toml"));
    assert_eq!(code, Some(1));
}
