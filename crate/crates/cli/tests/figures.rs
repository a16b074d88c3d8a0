//! Every figure preset, run through both engines.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use tempfile::TempDir;

const NAMES: [&str; 13] =
    ["fig2", "fig3a", "fig3b", "fig3c", "fig3d", "fig4a", "fig4b", "fig5", "fig6a", "fig6b", "fig6c", "fig7a", "fig7b"];

fn run_figure(name: &str, engine: &str, dir: &Path) {
    let out = Command::new(env!("CARGO_BIN_EXE_postsel"))
        .args(["figure", name, "--engine", engine, "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{name} {engine}: {}", String::from_utf8_lossy(&out.stderr));
}

/// Per CSV file: the value column (index 1 for sweeps, 2 for fields).
fn value_columns(dir: &Path) -> BTreeMap<String, Vec<String>> {
    let mut files = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "csv") {
            let text = fs::read_to_string(&path).unwrap();
            let mut lines = text.lines();
            let header: Vec<&str> = lines.next().unwrap().split(',').collect();
            let col = if header[0] == "axis_value" { 1 } else { 2 };
            let values = lines.map(|l| l.split(',').nth(col).unwrap().to_string()).collect();
            files.insert(path.file_name().unwrap().to_string_lossy().into_owned(), values);
        }
    }
    files
}

#[test]
fn engines_agree_on_every_preset() {
    let closed = TempDir::new().unwrap();
    let oracle = TempDir::new().unwrap();
    for name in NAMES {
        run_figure(name, "closedform", closed.path());
        run_figure(name, "oracle", oracle.path());
    }
    let a = value_columns(closed.path());
    let b = value_columns(oracle.path());
    assert_eq!(a.keys().collect::<Vec<_>>(), b.keys().collect::<Vec<_>>());
    let mut worst = 0.0f64;
    for (file, values) in &a {
        assert_eq!(values.len(), b[file].len(), "{file}");
        for (x, y) in values.iter().zip(&b[file]) {
            match (x.parse::<f64>(), y.parse::<f64>()) {
                (Ok(x), Ok(y)) => worst = worst.max((x - y).abs()),
                _ => assert_eq!(x, y, "{file}: definedness differs"),
            }
        }
    }
    assert!(worst < 1e-6, "{worst:e}");
}
