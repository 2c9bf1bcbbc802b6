#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const SUBCOMMANDS: [&str; 5] = ["pole", "survival", "entropy", "evolve", "scan"];

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gamow-thermo"))
}

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn run_with_config(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut cmd = bin();
    cmd.arg(sub)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .arg("--quiet")
        .args(extra);
    cmd.output().expect("binary runs")
}

pub fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

/// Files a CSV run writes next to `out`, by suffix.
pub fn outputs(dir: &Path, stem: &str) -> Vec<(String, PathBuf)> {
    let mut found: Vec<(String, PathBuf)> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| {
            let name = e.ok()?.file_name().into_string().ok()?;
            let suffix = name.strip_prefix(stem)?.strip_prefix('.')?.to_string();
            (suffix.ends_with("csv") || suffix.ends_with("json"))
                .then(|| (suffix, dir.join(&name)))
        })
        .collect();
    found.sort();
    found
}
