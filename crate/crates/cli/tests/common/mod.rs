#![allow(dead_code)]

use std::ffi::OsStr;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn declist<S: AsRef<OsStr>>(args: &[S]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_declist"))
        .args(args)
        .output()
        .expect("spawn declist")
}

pub fn ok<S: AsRef<OsStr>>(args: &[S]) -> Output {
    let out = declist(args);
    assert!(
        out.status.success(),
        "declist {:?} failed: {}",
        args.iter().map(|a| a.as_ref().to_string_lossy()).collect::<Vec<_>>(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Paths of one pseudoword -> ingest -> seed -> train -> eval run.
pub struct Pipeline {
    pub root: PathBuf,
}

impl Pipeline {
    pub fn dir(&self, stage: &str) -> PathBuf {
        self.root.join(stage)
    }

    pub fn file(&self, stage: &str, name: &str) -> PathBuf {
        self.root.join(stage).join(name)
    }

    pub fn run(root: &Path, corpus: &Path, format: &str, a: &str, b: &str, extra_train: &[&str]) -> Pipeline {
        let p = Pipeline {
            root: root.to_path_buf(),
        };
        let pseudo = format!("{a}{b}");
        let senses = format!("{a},{b}");
        ok(&[
            "pseudoword",
            "--input",
            s(corpus),
            "--format",
            format,
            "--word-a",
            a,
            "--word-b",
            b,
            "--pseudo",
            &pseudo,
            "--out-dir",
            s(&p.dir("pseudoword")),
        ]);
        ok(&[
            "ingest",
            "--input",
            s(&p.file("pseudoword", "corpus.vert")),
            "--format",
            "tagged",
            "--target",
            &pseudo,
            "--senses",
            &senses,
            "--pseudoword-mode",
            "--out-dir",
            s(&p.dir("ingest")),
        ]);
        ok(&[
            "seed",
            "--contexts",
            s(&p.file("ingest", "contexts.tsv")),
            "--senses",
            &senses,
            "--gold",
            s(&p.file("pseudoword", "gold.tsv")),
            "--out-dir",
            s(&p.dir("seed")),
        ]);
        let mut train: Vec<String> = [
            "train",
            "--contexts",
            s(&p.file("ingest", "contexts.tsv")),
            "--lexicon",
            s(&p.file("ingest", "lexicon.tsv")),
            "--seeds",
            s(&p.file("seed", "seeds.tsv")),
            "--senses",
            &senses,
            "--out-dir",
            s(&p.dir("train")),
        ]
        .map(String::from)
        .into();
        train.extend(extra_train.iter().map(|a| a.to_string()));
        ok(&train);
        ok(&[
            "eval",
            "--model",
            s(&p.file("train", "model.tsv")),
            "--labels",
            s(&p.file("train", "labels.tsv")),
            "--stats",
            s(&p.file("train", "stats.tsv")),
            "--gold",
            s(&p.file("pseudoword", "gold.tsv")),
            "--ambiguous",
            s(&p.file("pseudoword", "ambiguous.tsv")),
            "--out-dir",
            s(&p.dir("eval")),
        ]);
        p
    }

    /// Summary column -> value.
    pub fn summary(&self) -> Vec<(String, String)> {
        let text = fs::read_to_string(self.file("eval", "summary.tsv")).unwrap();
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
        let row: Vec<&str> = lines.next().unwrap().split('\t').collect();
        header
            .iter()
            .zip(row)
            .map(|(h, v)| (h.to_string(), v.to_string()))
            .collect()
    }

    pub fn summary_value(&self, column: &str) -> f64 {
        let row = self.summary();
        row.iter().find(|(h, _)| h == column).unwrap().1.parse().unwrap()
    }
}
