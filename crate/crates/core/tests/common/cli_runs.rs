use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use revmine::corpus::{save_corpus, Format};

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_revmine")
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// Runs the binary in `dir`; returns exit code and stdout.
pub fn run_in(dir: &Path, args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(bin()).args(args).current_dir(dir).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

/// Inputs shared by every command: the synthetic fixture, an overfit
/// corpus, a pool for sampling and a tiny embedding file.
pub fn stage_inputs(dir: &Path) {
    fs::copy(fixture("synthetic.jsonl"), dir.join("synthetic.jsonl")).unwrap();
    fs::copy(fixture("synthetic_sim3.jsonl"), dir.join("sim3.jsonl")).unwrap();
    fs::copy(fixture("semeval_sample.xml"), dir.join("laptop.xml")).unwrap();
    save_corpus(&revmine::synth::overfit_corpus(), dir.join("overfit.jsonl"), Format::Jsonl).unwrap();
    fs::write(dir.join("emb.txt"), "2 3\nvideo 0.1 0.2 0.3\nsync -0.5 0 1\n").unwrap();
}

/// Every subcommand with its primary output files.
pub const SCRIPT: &[(&[&str], &[&str])] = &[
    (&["synth", "--out", "gen.jsonl"], &["gen.jsonl"]),
    (&["stats", "synthetic.jsonl", "--per-category", "--out", "stats.csv"], &["stats.csv"]),
    (
        &["simulate", "synthetic.jsonl", "--steps", "pre,self,noun,len", "--out", "sim.jsonl", "--report", "rep.json", "--table", "rep.csv"],
        &["sim.jsonl", "rep.json", "rep.csv"],
    ),
    (&["train", "overfit.jsonl", "--annotator", "gold", "--model", "m.json"], &["m.json"]),
    (&["tag", "overfit.jsonl", "--model", "m.json", "--out", "pred.jsonl"], &["pred.jsonl"]),
    (&["eval", "--gold", "overfit.jsonl", "--pred", "pred.jsonl", "--annotator", "gold", "--out", "eval.json"], &["eval.json"]),
    (&["train", "overfit.jsonl", "--annotator", "gold", "--model", "me.json", "--embeddings", "emb.txt"], &["me.json"]),
    (&["experiment", "sim3.jsonl", "--procedure", "scv", "--annotator", "a1", "--k", "3", "--jobs", "2", "--out", "scv.json"], &["scv.json"]),
    (&["sweep", "sim3.jsonl", "--annotator", "a1", "--cutoffs", "1,inf", "--out", "sweep.csv"], &["sweep.csv"]),
    (&["agreement", "synthetic.jsonl", "--a", "a1", "--b", "a1"], &[]),
    (&["sample", "synthetic.jsonl", "--per-app", "10", "--out", "sample.jsonl"], &["sample.jsonl"]),
    (&["import-semeval", "laptop.xml", "--domain", "laptop", "--out", "laptop.jsonl"], &["laptop.jsonl"]),
];

/// Runs [`SCRIPT`] twice in fresh directories and compares stdout and
/// output files byte for byte. Returns the number of commands checked.
pub fn check_determinism() -> Result<usize, String> {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        stage_inputs(d.path());
    }
    for (args, outputs) in SCRIPT {
        let runs: Vec<(i32, Vec<u8>)> = dirs.iter().map(|d| run_in(d.path(), args)).collect();
        if runs[0].0 != 0 {
            return Err(format!("`{}` exited with {}", args.join(" "), runs[0].0));
        }
        if runs[0] != runs[1] {
            return Err(format!("`{}` printed different output", args.join(" ")));
        }
        for f in *outputs {
            let a = fs::read(dirs[0].path().join(f)).map_err(|e| format!("{f}: {e}"))?;
            let b = fs::read(dirs[1].path().join(f)).map_err(|e| format!("{f}: {e}"))?;
            if a != b {
                return Err(format!("`{}` wrote different {f}", args.join(" ")));
            }
        }
    }
    Ok(SCRIPT.len())
}
