//! Runs the `declist` pipeline in-process through [`declist_cli::run`].

use std::fs;
use std::path::{Path, PathBuf};

/// Runs one `declist` invocation and panics unless it exits 0.
pub fn declist(args: &[&str]) {
    let argv = std::iter::once("declist").chain(args.iter().copied());
    let code = declist_cli::run(argv);
    assert_eq!(code, 0, "declist {args:?} exited with {code}");
}

fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Output directories of one pseudoword, ingest, seed, train and eval run.
pub struct Pipeline {
    pub root: PathBuf,
}

impl Pipeline {
    pub fn file(&self, stage: &str, name: &str) -> PathBuf {
        self.root.join(stage).join(name)
    }

    pub fn run(root: &Path, corpus: &Path, format: &str, a: &str, b: &str) -> Pipeline {
        let p = Pipeline {
            root: root.to_path_buf(),
        };
        let dir = |stage: &str| root.join(stage);
        let pseudo = format!("{a}{b}");
        let senses = format!("{a},{b}");
        let (contexts, lexicon) = (p.file("ingest", "contexts.tsv"), p.file("ingest", "lexicon.tsv"));
        let gold = p.file("pseudoword", "gold.tsv");
        declist(&[
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
            s(&dir("pseudoword")),
        ]);
        declist(&[
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
            s(&dir("ingest")),
        ]);
        declist(&[
            "seed",
            "--contexts",
            s(&contexts),
            "--senses",
            &senses,
            "--gold",
            s(&gold),
            "--out-dir",
            s(&dir("seed")),
        ]);
        declist(&[
            "train",
            "--contexts",
            s(&contexts),
            "--lexicon",
            s(&lexicon),
            "--seeds",
            s(&p.file("seed", "seeds.tsv")),
            "--senses",
            &senses,
            "--out-dir",
            s(&dir("train")),
        ]);
        declist(&[
            "eval",
            "--model",
            s(&p.file("train", "model.tsv")),
            "--labels",
            s(&p.file("train", "labels.tsv")),
            "--stats",
            s(&p.file("train", "stats.tsv")),
            "--gold",
            s(&gold),
            "--ambiguous",
            s(&p.file("pseudoword", "ambiguous.tsv")),
            "--out-dir",
            s(&dir("eval")),
        ]);
        p
    }

    /// Reads one numeric column of the eval summary.
    pub fn summary_value(&self, column: &str) -> f64 {
        let text = fs::read_to_string(self.file("eval", "summary.tsv")).expect("summary.tsv");
        let mut lines = text.lines();
        let header = lines.next().expect("header");
        let row = lines.next().expect("row");
        let i = header.split('\t').position(|h| h == column).expect("column");
        row.split('\t')
            .nth(i)
            .and_then(|v| v.parse().ok())
            .expect("numeric value")
    }
}
