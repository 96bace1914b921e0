//! Pseudo-word evaluation: majority-sense baseline, frequency-matched random
//! comparator, and scoring of decision-list labels against gold senses.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::io::BufRead;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learner::{IterationStats, ModelHeader, TrainResult};

/// Most frequent sense and its relative frequency `k`. Ties go to the
/// lexicographically smallest sense id.
pub fn majority<S: AsRef<str>>(gold: &[S]) -> Result<(String, f64)> {
    if gold.is_empty() {
        return Err(Error::Contract("majority of an empty gold set".into()));
    }
    let counts = sense_counts(gold);
    let (sense, &count) = counts
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
        .expect("non-empty");
    Ok((sense.to_string(), count as f64 / gold.len() as f64))
}

fn sense_counts<S: AsRef<str>>(gold: &[S]) -> BTreeMap<&str, u64> {
    let mut counts = BTreeMap::new();
    for g in gold {
        *counts.entry(g.as_ref()).or_insert(0) += 1;
    }
    counts
}

fn accuracy<S: AsRef<str>>(predictions: &[String], gold: &[S]) -> f64 {
    let correct = predictions
        .iter()
        .zip(gold)
        .filter(|(p, g)| p.as_str() == g.as_ref())
        .count();
    correct as f64 / gold.len() as f64
}

/// Labels every context with the majority sense. The accuracy is exactly `k`.
pub fn baseline_predict<S: AsRef<str>>(gold: &[S]) -> Result<(Vec<String>, f64)> {
    let (sense, k) = majority(gold)?;
    Ok((vec![sense; gold.len()], k))
}

/// Draws each prediction independently from the gold sense distribution:
/// with two senses, the majority sense with probability `k` and the other
/// one otherwise. Expected accuracy is the sum of squared sense
/// frequencies, `k^2 + (1-k)^2` for two senses.
pub fn random_predict<S: AsRef<str>>(gold: &[S], rng_seed: u64) -> Result<(Vec<String>, f64)> {
    if gold.is_empty() {
        return Err(Error::Contract("random comparator needs at least one context".into()));
    }
    let (majority_sense, _) = majority(gold)?;
    let counts = sense_counts(gold);
    // majority first, then the rest by id
    let mut senses: Vec<(&str, f64)> = vec![(majority_sense.as_str(), counts[majority_sense.as_str()] as f64)];
    senses.extend(
        counts
            .iter()
            .filter(|(s, _)| **s != majority_sense)
            .map(|(s, &c)| (*s, c as f64)),
    );
    let n = gold.len() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let predictions: Vec<String> = (0..gold.len())
        .map(|_| {
            let u: f64 = rng.random::<f64>() * n;
            let mut acc = 0.0;
            for (s, c) in &senses {
                acc += c;
                if u < acc {
                    return s.to_string();
                }
            }
            senses.last().expect("non-empty").0.to_string()
        })
        .collect();
    let acc = accuracy(&predictions, gold);
    Ok((predictions, acc))
}

/// Accuracy of decision-list labels over the evaluated (non-seed) contexts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub evaluated: u64,
    pub decided: u64,
    pub correct_decided: u64,
    pub correct_with_fallback: u64,
    /// Correct over decided contexts; 0 when nothing was decided.
    pub accuracy_decided: f64,
    pub decided_fraction: f64,
    pub residual_fraction: f64,
    /// Correct over evaluated contexts, residual contexts taking the fallback.
    pub accuracy_overall_with_fallback: f64,
}

/// Scores `labels` against `gold`, ignoring `seeds`. The evaluated set is
/// every gold context that is not a seed. A label on a context without
/// gold is an error.
pub fn score(
    labels: &BTreeMap<u64, String>,
    gold: &BTreeMap<u64, String>,
    seeds: &BTreeSet<u64>,
    fallback: &str,
) -> Result<Score> {
    if let Some(id) = labels.keys().find(|id| !gold.contains_key(id)) {
        return Err(Error::GoldMismatch(format!(
            "context {id} is labeled but has no gold sense"
        )));
    }
    let mut s = Score {
        evaluated: 0,
        decided: 0,
        correct_decided: 0,
        correct_with_fallback: 0,
        accuracy_decided: 0.0,
        decided_fraction: 0.0,
        residual_fraction: 0.0,
        accuracy_overall_with_fallback: 0.0,
    };
    for (id, g) in gold.iter().filter(|(id, _)| !seeds.contains(id)) {
        s.evaluated += 1;
        match labels.get(id) {
            Some(l) => {
                s.decided += 1;
                if l == g {
                    s.correct_decided += 1;
                    s.correct_with_fallback += 1;
                }
            }
            None => {
                if fallback == g {
                    s.correct_with_fallback += 1;
                }
            }
        }
    }
    if s.decided > 0 {
        s.accuracy_decided = s.correct_decided as f64 / s.decided as f64;
    }
    if s.evaluated > 0 {
        s.decided_fraction = s.decided as f64 / s.evaluated as f64;
        s.residual_fraction = (s.evaluated - s.decided) as f64 / s.evaluated as f64;
        s.accuracy_overall_with_fallback = s.correct_with_fallback as f64 / s.evaluated as f64;
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub majority_sense: String,
    /// Majority fraction `k` over the evaluated contexts.
    pub majority_fraction: f64,
    pub accuracy_decided: f64,
    pub decided_fraction: f64,
    pub accuracy_overall_with_fallback: f64,
    pub residual_fraction: f64,
    pub baseline_accuracy: f64,
    pub random_accuracy: f64,
    pub evaluated: u64,
    pub iterations: u32,
    pub converged: bool,
    pub per_iteration: Vec<IterationStats>,
}

/// Full evaluation of a training run. Contexts in `excluded` (those with
/// ambiguous gold) are dropped from the labels before scoring.
pub fn evaluate(
    labels: &BTreeMap<u64, String>,
    seeds: &BTreeSet<u64>,
    gold: &BTreeMap<u64, String>,
    excluded: &BTreeSet<u64>,
    stats: &[IterationStats],
    converged: bool,
    rng_seed: u64,
) -> Result<EvalReport> {
    let labels: BTreeMap<u64, String> = labels
        .iter()
        .filter(|(id, _)| !excluded.contains(id))
        .map(|(id, s)| (*id, s.clone()))
        .collect();
    let evaluated_gold: Vec<&str> = gold
        .iter()
        .filter(|(id, _)| !seeds.contains(id))
        .map(|(_, s)| s.as_str())
        .collect();
    let (majority_sense, k) =
        majority(&evaluated_gold).map_err(|_| Error::GoldMismatch("no non-seed gold contexts to evaluate".into()))?;
    let (_, random_accuracy) = random_predict(&evaluated_gold, rng_seed)?;
    let s = score(&labels, gold, seeds, &majority_sense)?;
    Ok(EvalReport {
        majority_sense,
        majority_fraction: k,
        accuracy_decided: s.accuracy_decided,
        decided_fraction: s.decided_fraction,
        accuracy_overall_with_fallback: s.accuracy_overall_with_fallback,
        residual_fraction: s.residual_fraction,
        baseline_accuracy: k,
        random_accuracy,
        evaluated: s.evaluated,
        iterations: stats.len() as u32,
        converged,
        per_iteration: stats.to_vec(),
    })
}

pub fn evaluate_result(
    result: &TrainResult,
    gold: &BTreeMap<u64, String>,
    excluded: &BTreeSet<u64>,
    rng_seed: u64,
) -> Result<EvalReport> {
    let seeds = result.seeds().map(|e| e.context_id).collect();
    evaluate(
        &result.labels,
        &seeds,
        gold,
        excluded,
        &result.stats,
        result.converged,
        rng_seed,
    )
}

pub const SUMMARY_COLUMNS: [&str; 13] = [
    "run_id",
    "target",
    "method",
    "threshold",
    "min_coverage",
    "iterations",
    "converged",
    "residual_fraction",
    "decided_fraction",
    "accuracy_decided",
    "accuracy_overall_with_fallback",
    "baseline_accuracy",
    "random_accuracy",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub run_id: String,
    pub target: String,
    pub method: String,
    pub threshold: f64,
    pub min_coverage: u32,
    pub iterations: u32,
    pub converged: bool,
    pub residual_fraction: f64,
    pub decided_fraction: f64,
    pub accuracy_decided: f64,
    pub accuracy_overall_with_fallback: f64,
    pub baseline_accuracy: f64,
    pub random_accuracy: f64,
}

impl SummaryRow {
    pub fn new(
        run_id: impl Into<String>,
        model: &ModelHeader,
        method: &str,
        threshold: f64,
        report: &EvalReport,
    ) -> Self {
        SummaryRow {
            run_id: run_id.into(),
            target: model.target.clone(),
            method: method.to_string(),
            threshold,
            min_coverage: model.min_coverage,
            iterations: report.iterations,
            converged: report.converged,
            residual_fraction: report.residual_fraction,
            decided_fraction: report.decided_fraction,
            accuracy_decided: report.accuracy_decided,
            accuracy_overall_with_fallback: report.accuracy_overall_with_fallback,
            baseline_accuracy: report.baseline_accuracy,
            random_accuracy: report.random_accuracy,
        }
    }

    pub fn to_tsv(rows: &[SummaryRow]) -> String {
        let mut out = SUMMARY_COLUMNS.join("\t");
        out.push('\n');
        for r in rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.run_id,
                r.target,
                r.method,
                r.threshold,
                r.min_coverage,
                r.iterations,
                r.converged,
                r.residual_fraction,
                r.decided_fraction,
                r.accuracy_decided,
                r.accuracy_overall_with_fallback,
                r.baseline_accuracy,
                r.random_accuracy
            );
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct ReportPaths {
    pub stats: PathBuf,
    pub summary: PathBuf,
    pub model: PathBuf,
}

/// Writes the per-iteration stats, the one-row summary and the model file.
pub fn emit_reports(
    result: &TrainResult,
    report: &EvalReport,
    model: &ModelHeader,
    run_id: &str,
    paths: &ReportPaths,
) -> Result<()> {
    let list = &result.final_list;
    let row = SummaryRow::new(run_id, model, list.method.as_str(), list.threshold, report);
    fs::write(&paths.stats, IterationStats::to_tsv(&result.stats))?;
    fs::write(&paths.summary, SummaryRow::to_tsv(&[row]))?;
    fs::write(&paths.model, list.to_model_tsv(model))?;
    Ok(())
}

/// Reads `context_id<TAB>sense` lines into a map.
pub fn read_gold<R: BufRead>(reader: R) -> Result<BTreeMap<u64, String>> {
    let mut gold = BTreeMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, sense) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse("gold", idx + 1, "expected context_id<TAB>sense"))?;
        let id = id
            .parse()
            .map_err(|_| Error::parse("gold", idx + 1, format!("bad context id {id:?}")))?;
        if gold.insert(id, sense.to_string()).is_some() {
            return Err(Error::parse("gold", idx + 1, format!("duplicate context id {id}")));
        }
    }
    Ok(gold)
}

pub fn write_gold(gold: &BTreeMap<u64, String>) -> String {
    gold.iter().map(|(id, s)| format!("{id}\t{s}\n")).collect()
}
