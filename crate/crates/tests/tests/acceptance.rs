//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed; exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use declist_core::cluster::{cluster_accuracy, kmeans, ClusterConfig};
use declist_core::corpus::Context;
use declist_core::eval::{baseline_predict, evaluate_result, majority, random_predict};
use declist_core::learner::{
    audit_label_events, build_decision_list, confidence, count_evidences, seed_labels, train, ConfidenceMethod,
    IterationStats, LabelEvent, ModelHeader, SenseInventory, ThresholdMode, TrainResult, TrainerConfig,
};
use declist_core::lexicon::{build_lexicon, DEFAULT_MIN_CONTEXT_COUNT};
use declist_core::synth::{PlantedSpec, TopicalSpec};
use declist_tests::Pipeline;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(conditions: &[(bool, String)]) -> Outcome {
    let failed: Vec<&str> = conditions
        .iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, d)| d.as_str())
        .collect();
    if failed.is_empty() {
        Outcome {
            pass: true,
            detail: conditions
                .iter()
                .map(|(_, d)| d.as_str())
                .collect::<Vec<_>>()
                .join("; "),
        }
    } else {
        Outcome {
            pass: false,
            detail: format!("failed: {}", failed.join("; ")),
        }
    }
}

fn within(elapsed: Duration, limit: Duration) -> (bool, String) {
    (
        elapsed < limit,
        format!("runtime {:.3}s < {}s", elapsed.as_secs_f64(), limit.as_secs()),
    )
}

const EXACT: f64 = 1e-12;

fn exact(label: &str, got: f64, want: f64) -> (bool, String) {
    ((got - want).abs() <= EXACT, format!("{label} = {got} (want {want})"))
}

fn criterion_1() -> Outcome {
    use ConfidenceMethod::*;
    let t = Instant::now();
    let c = |j, l, tot, m| confidence(j, l, tot, m).unwrap();
    let mut conds = vec![
        exact("restricted_ratio(3,4,10)", c(3, 4, 10, RestrictedRatio), 0.75),
        exact("restricted_ratio(0,0,7)", c(0, 0, 7, RestrictedRatio), 0.0),
        exact("smoothed(0,0,0)", c(0, 0, 0, Smoothed), 0.5),
        exact("smoothed(3,4,4)", c(3, 4, 4, Smoothed), 5.0 / 6.0),
    ];
    conds.push(within(t.elapsed(), Duration::from_secs(1)));
    check(&conds)
}

/// Labeled and unlabeled contexts over a small vocabulary; the count table
/// built from them covers zero, partial and full coverage cases.
fn random_contexts(rng: &mut ChaCha8Rng) -> Vec<Context> {
    let n = rng.random_range(5..60);
    let vocab = rng.random_range(2..15);
    (0..n)
        .map(|i| {
            let lemmas: Vec<String> = (0..vocab)
                .filter(|_| rng.random_bool(0.3))
                .map(|w| format!("w{w}"))
                .collect();
            let mut ctx = Context::new(i, i, "t", lemmas);
            if rng.random_bool(0.4) {
                ctx.mark_seed(if rng.random_bool(0.5) { "a" } else { "b" }).unwrap();
            }
            ctx
        })
        .collect()
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let inventory = SenseInventory::new("t", ["a", "b"]).unwrap();
    let mut mismatches = 0;
    let mut incomplete = 0;
    let mut ranked = 0usize;
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let contexts = random_contexts(&mut rng);
        let lexicon = build_lexicon(&contexts, 1).unwrap();
        let table = count_evidences(&contexts, &lexicon, &inventory).unwrap();
        let order = |method| {
            // a near-zero threshold accepts every candidate under both scales
            let config = TrainerConfig {
                confidence_method: method,
                threshold_mode: ThresholdMode::Fixed(1e-9),
                ..TrainerConfig::default()
            };
            let (list, stats) = build_decision_list(&table, &inventory, &config, 1);
            let keys: Vec<(String, String)> = list.rules.into_iter().map(|r| (r.evidence, r.sense)).collect();
            (keys, stats.candidates)
        };
        let (smoothed, candidates) = order(ConfidenceMethod::Smoothed);
        let (log_odds, _) = order(ConfidenceMethod::LogOdds);
        if smoothed.len() as u64 != candidates {
            incomplete += 1;
        }
        if smoothed != log_odds {
            mismatches += 1;
        }
        ranked += smoothed.len();
    }
    check(&[
        (mismatches == 0, format!("{mismatches}/1000 tables ordered differently")),
        (
            incomplete == 0,
            format!("{incomplete} tables with unranked candidates, {ranked} rules ranked"),
        ),
        within(t.elapsed(), Duration::from_secs(5)),
    ])
}

struct PlantedRun {
    contexts: Vec<Context>,
    gold: BTreeMap<u64, String>,
    result: TrainResult,
    serialized: String,
}

fn planted_run() -> PlantedRun {
    let spec = PlantedSpec::default();
    let config = TrainerConfig::default();
    let inventory = SenseInventory::new(&spec.target, spec.senses.clone()).unwrap();
    let mut planted = spec.generate();
    seed_labels(&mut planted.contexts, &inventory, &config, &planted.gold).unwrap();
    let lexicon = build_lexicon(&planted.contexts, DEFAULT_MIN_CONTEXT_COUNT).unwrap();
    let result = train(&mut planted.contexts, &lexicon, &inventory, &config).unwrap();
    let serialized = [
        result
            .final_list
            .to_model_tsv(&ModelHeader::new(&inventory, config.min_coverage)),
        IterationStats::to_tsv(&result.stats),
        LabelEvent::to_tsv(&result.events),
        format!("{:?}", result.labels),
    ]
    .concat();
    PlantedRun {
        contexts: planted.contexts,
        gold: planted.gold,
        result,
        serialized,
    }
}

fn criterion_3(runs: &[PlantedRun], elapsed: Duration) -> Outcome {
    let run = &runs[0];
    let report = evaluate_result(&run.result, &run.gold, &BTreeSet::new(), 0).unwrap();
    let spec = PlantedSpec::default();
    check(&[
        (
            spec.contexts_per_sense == 100 && spec.indicators_per_sense == 5 && spec.noise_lemmas == 20,
            "2 senses x 100 contexts, 5 indicators per sense, 20 noise lemmas".into(),
        ),
        (
            report.accuracy_decided >= 0.95,
            format!("accuracy_decided {:.4} >= 0.95", report.accuracy_decided),
        ),
        (
            run.result.residual_fraction == 0.0,
            format!("residual_fraction {} = 0", run.result.residual_fraction),
        ),
        (
            run.result.converged && run.result.converged_at <= 10,
            format!("converged at iteration {} <= 10", run.result.converged_at),
        ),
        (
            runs.iter().all(|r| r.serialized == run.serialized),
            format!("{} reruns byte-identical", runs.len()),
        ),
        within(elapsed, Duration::from_secs(10)),
    ])
}

/// Two seeds per sense, each with private lemmas that also occur in the
/// unlabeled contexts, so every evidence has exactly one labeled context.
fn sparse_run() -> (Vec<Context>, TrainResult, bool) {
    let seeds = [("a", 0), ("a", 1), ("b", 2), ("b", 3)];
    let mut contexts: Vec<Context> = seeds
        .iter()
        .map(|(sense, i)| {
            let lemmas = (0..3).map(|j| format!("s{i}e{j}")).collect();
            let mut c = Context::new(*i, *i, "t", lemmas);
            c.mark_seed(sense).unwrap();
            c
        })
        .collect();
    for i in 4..40u64 {
        let lemmas = vec![
            format!("s{}e{}", i % 4, i % 3),
            format!("s{}e{}", (i + 1) % 4, (i + 2) % 3),
        ];
        contexts.push(Context::new(i, i, "t", lemmas));
    }
    let lexicon = build_lexicon(&contexts, 1).unwrap();
    let one_seed_each = lexicon
        .entries()
        .iter()
        .all(|e| contexts.iter().filter(|c| c.is_seed && c.contains(&e.lemma)).count() == 1);
    let inventory = SenseInventory::new("t", ["a", "b"]).unwrap();
    let config = TrainerConfig {
        min_coverage: 2,
        ..TrainerConfig::default()
    };
    let result = train(&mut contexts, &lexicon, &inventory, &config).unwrap();
    (contexts, result, one_seed_each)
}

fn criterion_4(contexts: &[Context], result: &TrainResult, one_seed_each: bool, elapsed: Duration) -> Outcome {
    let first = &result.stats[0];
    check(&[
        (
            one_seed_each,
            "every evidence occurs in exactly one seed context".into(),
        ),
        (
            first.accepted == 0 && first.rejected_coverage > 0,
            format!(
                "iteration 1 accepted {} rules, {} rejected on coverage",
                first.accepted, first.rejected_coverage
            ),
        ),
        (
            result.converged && first.newly_labeled == 0 && result.converged_at == 1,
            format!(
                "converged at iteration {} with newly_labeled {}",
                result.converged_at, first.newly_labeled
            ),
        ),
        (
            contexts.iter().filter(|c| c.is_labeled()).count() == 4,
            "only the 4 seeds are labeled".into(),
        ),
        within(elapsed, Duration::from_secs(5)),
    ])
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut exact_failures = 0;
    for _ in 0..200 {
        let n = rng.random_range(1..500);
        let p = rng.random::<f64>();
        let gold: Vec<&str> = (0..n).map(|_| if rng.random_bool(p) { "a" } else { "b" }).collect();
        let count_a = gold.iter().filter(|g| **g == "a").count();
        let k = count_a.max(n - count_a) as f64 / n as f64;
        let (_, baseline) = baseline_predict(&gold).unwrap();
        let (_, majority_k) = majority(&gold).unwrap();
        if baseline != k || majority_k != k {
            exact_failures += 1;
        }
    }
    let gold: Vec<&str> = (0..10_000).map(|i| if i < 5110 { "a" } else { "b" }).collect();
    let k = 0.511;
    let expected = k * k + (1.0 - k) * (1.0 - k);
    let (_, random) = random_predict(&gold, 0).unwrap();
    check(&[
        (
            exact_failures == 0,
            format!("baseline == k exactly on 200 sets ({exact_failures} misses)"),
        ),
        (
            (random - expected).abs() <= 0.02,
            format!("random accuracy {random:.4} within 0.02 of {expected:.4}"),
        ),
        within(t.elapsed(), Duration::from_secs(5)),
    ])
}

fn monotone(contexts: &[Context], result: &TrainResult) -> Result<(), String> {
    audit_label_events(&result.events, &result.stats, &result.labels)?;
    if result.stats.windows(2).any(|w| w[1].labeled_total < w[0].labeled_total) {
        return Err("labeled_total decreased".into());
    }
    for e in result.events.iter().filter(|e| e.is_seed) {
        let c = contexts
            .iter()
            .find(|c| c.id == e.context_id)
            .ok_or("seed context missing")?;
        if c.assigned_sense.as_deref() != Some(e.sense.as_str()) {
            return Err(format!("seed {} changed label", e.context_id));
        }
    }
    Ok(())
}

fn criterion_6(planted: &PlantedRun, sparse: (&[Context], &TrainResult)) -> Outcome {
    let a = monotone(&planted.contexts, &planted.result);
    let b = monotone(sparse.0, sparse.1);
    check(&[
        (
            a.is_ok(),
            format!("planted run audit: {}", a.err().unwrap_or_else(|| "replayed".into())),
        ),
        (
            b.is_ok(),
            format!("sparse run audit: {}", b.err().unwrap_or_else(|| "replayed".into())),
        ),
    ])
}

fn criterion_7(planted: &PlantedRun) -> Outcome {
    let rules = &planted.result.final_list.rules;
    let discrepancies = rules
        .iter()
        .filter(|r| {
            let recount = planted
                .contexts
                .iter()
                .filter(|c| c.is_labeled() && c.lemmas.contains(&r.evidence))
                .count();
            recount != r.coverage as usize
        })
        .count();
    check(&[
        (!rules.is_empty(), format!("{} accepted rules", rules.len())),
        (discrepancies == 0, format!("{discrepancies} coverage discrepancies")),
    ])
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let sigma = 1.0;
    let normal = Normal::new(0.0, sigma).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let centers = [[0.0, 0.0], [10.0 * sigma, 0.0]];
    let mut points = Vec::new();
    let mut gold = Vec::new();
    for (label, c) in ["left", "right"].iter().zip(centers) {
        for _ in 0..100 {
            points.push(vec![c[0] + normal.sample(&mut rng), c[1] + normal.sample(&mut rng)]);
            gold.push(*label);
        }
    }
    let result = kmeans(&points, &ClusterConfig::default()).unwrap();
    let accuracy = cluster_accuracy(&result.assignments, &gold).unwrap();
    let h = &result.objective_history;
    let increases = h.windows(2).filter(|w| w[1] > w[0]).count();
    check(&[
        (accuracy >= 0.99, format!("cluster_accuracy {accuracy:.4} >= 0.99")),
        (
            increases == 0 && !h.is_empty(),
            format!("objective non-increasing over {} iterations", h.len()),
        ),
        within(t.elapsed(), Duration::from_secs(5)),
    ])
}

/// A user corpus from `DECLIST_CORPUS` (with `DECLIST_FORMAT`,
/// `DECLIST_WORD_A`, `DECLIST_WORD_B`), else the built-in synthetic
/// topical text of about one million words.
fn criterion_9() -> Outcome {
    let tmp = tempfile::TempDir::new().unwrap();
    let (corpus, format, a, b, origin) = match std::env::var_os("DECLIST_CORPUS") {
        Some(path) => (
            PathBuf::from(path),
            std::env::var("DECLIST_FORMAT").unwrap_or_else(|_| "raw".into()),
            std::env::var("DECLIST_WORD_A").expect("DECLIST_WORD_A"),
            std::env::var("DECLIST_WORD_B").expect("DECLIST_WORD_B"),
            "user corpus",
        ),
        None => {
            let spec = TopicalSpec::default();
            let path = tmp.path().join("topical.txt");
            std::fs::write(&path, spec.generate()).unwrap();
            let [a, b] = spec.source_words.clone();
            (path, "raw".to_string(), a, b, "synthetic corpus")
        }
    };
    let words = std::fs::read_to_string(&corpus)
        .map(|t| t.split_whitespace().count())
        .unwrap_or(0);
    let t = Instant::now();
    let p = Pipeline::run(&tmp.path().join("run"), &corpus, &format, &a, &b);
    let elapsed = t.elapsed();
    let fallback = p.summary_value("accuracy_overall_with_fallback");
    let baseline = p.summary_value("baseline_accuracy");
    let limit = Duration::from_secs(120).mul_f64((words as f64 / 1e6).max(1.0));
    check(&[
        (true, format!("{origin}, {words} words, pair {a}/{b}")),
        (
            fallback >= baseline,
            format!("accuracy_overall_with_fallback {fallback:.4} >= baseline {baseline:.4}"),
        ),
        (
            elapsed < limit,
            format!("pipeline {:.1}s < {}s", elapsed.as_secs_f64(), limit.as_secs()),
        ),
    ])
}

fn main() -> ExitCode {
    let mut outcomes: Vec<(u32, &str, Outcome)> = Vec::new();
    outcomes.push((1, "confidence unit values", criterion_1()));
    outcomes.push((2, "log-odds and smoothed rank equivalence", criterion_2()));

    let t = Instant::now();
    let planted: Vec<PlantedRun> = (0..3).map(|_| planted_run()).collect();
    outcomes.push((3, "planted-sense end to end", criterion_3(&planted, t.elapsed())));

    let t = Instant::now();
    let (sparse_contexts, sparse_result, one_seed_each) = sparse_run();
    outcomes.push((
        4,
        "coverage strictness on a sparse corpus",
        criterion_4(&sparse_contexts, &sparse_result, one_seed_each, t.elapsed()),
    ));
    outcomes.push((5, "baseline exactness and random comparator", criterion_5()));
    outcomes.push((
        6,
        "monotone labeling by audit replay",
        criterion_6(&planted[0], (&sparse_contexts, &sparse_result)),
    ));
    outcomes.push((7, "coverage identity", criterion_7(&planted[0])));
    outcomes.push((8, "k-means on two Gaussian blobs", criterion_8()));
    outcomes.push((9, "pseudo-word pipeline", criterion_9()));

    for (n, name, o) in &outcomes {
        println!(
            "{} criterion {n}: {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    let failed = outcomes.iter().filter(|(_, _, o)| !o.pass).count();
    println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
