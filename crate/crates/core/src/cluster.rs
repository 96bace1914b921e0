//! k-means comparator over frequency-restricted context vectors.
//!
//! Lloyd iterations with squared Euclidean distance, seeded farthest-point
//! initialization and a deterministic empty-cluster repair. Scoring maps
//! clusters to senses with the bijection that maximizes the correct count.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::ContextVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterConfig {
    pub k: usize,
    pub top_lemmas: usize,
    pub max_iterations: u32,
    pub tolerance: f64,
    pub rng_seed: u64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            k: 2,
            top_lemmas: 10,
            max_iterations: 300,
            tolerance: 1e-9,
            rng_seed: 0,
        }
    }
}

impl ClusterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Config("k must be at least 2".into()));
        }
        if self.top_lemmas < 1 {
            return Err(Error::Config("top_lemmas must be at least 1".into()));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Dense vectors over the first `top_lemmas` lexicon dimensions (the most
/// frequent lemmas), clamped to the lexicon size.
pub fn restrict_features(vectors: &[ContextVector], lexicon_len: usize, top_lemmas: usize) -> Vec<Vec<f64>> {
    let dims = top_lemmas.min(lexicon_len);
    vectors.iter().map(|v| v.to_dense(dims)).collect()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(point, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Sum of squared distances to the assigned centroid after each
    /// iteration's update step.
    pub objective_history: Vec<f64>,
    pub iterations: u32,
    pub converged: bool,
}

impl KMeansResult {
    pub fn objective(&self) -> f64 {
        self.objective_history.last().copied().unwrap_or(0.0)
    }
}

fn farthest_point_init(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let first = rng.random_range(0..points.len());
    let mut centroids = vec![points[first].clone()];
    let mut min_dist: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        // ties go to the lowest index
        let (idx, _) = min_dist.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |best, (i, &d)| if d > best.1 { (i, d) } else { best },
        );
        centroids.push(points[idx].clone());
        let c = centroids.last().expect("pushed");
        for (m, p) in min_dist.iter_mut().zip(points) {
            *m = m.min(sq_dist(p, c));
        }
    }
    centroids
}

fn update_centroids(points: &[Vec<f64>], assignments: &[usize], k: usize, dims: usize) -> Vec<Vec<f64>> {
    let mut sums = vec![vec![0.0; dims]; k];
    let mut sizes = vec![0usize; k];
    for (p, &a) in points.iter().zip(assignments) {
        sizes[a] += 1;
        for (s, x) in sums[a].iter_mut().zip(p) {
            *s += x;
        }
    }
    for (sum, &n) in sums.iter_mut().zip(&sizes) {
        if n > 0 {
            sum.iter_mut().for_each(|s| *s /= n as f64);
        }
    }
    sums
}

/// Moves, for each empty cluster, the point farthest from its centroid
/// (among clusters with more than one member) into it.
fn repair_empty(points: &[Vec<f64>], assignments: &mut [usize], centroids: &[Vec<f64>], k: usize) {
    let mut sizes = vec![0usize; k];
    assignments.iter().for_each(|&a| sizes[a] += 1);
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for (i, p) in points.iter().enumerate() {
            let a = assignments[i];
            if sizes[a] < 2 {
                continue;
            }
            let d = sq_dist(p, &centroids[a]);
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some((i, d));
            }
        }
        if let Some((i, _)) = best {
            sizes[assignments[i]] -= 1;
            assignments[i] = empty;
            sizes[empty] += 1;
        }
    }
}

fn objective(points: &[Vec<f64>], assignments: &[usize], centroids: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .zip(assignments)
        .map(|(p, &a)| sq_dist(p, &centroids[a]))
        .sum()
}

pub fn kmeans(points: &[Vec<f64>], config: &ClusterConfig) -> Result<KMeansResult> {
    config.validate()?;
    let k = config.k;
    if points.len() < k {
        return Err(Error::Contract(format!(
            "k-means with k={k} needs at least {k} points, got {}",
            points.len()
        )));
    }
    let dims = points[0].len();
    if points.iter().any(|p| p.len() != dims) {
        return Err(Error::Contract("k-means points have differing dimensions".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut centroids = farthest_point_init(points, k, &mut rng);
    let mut assignments = vec![0usize; points.len()];
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..config.max_iterations {
        iterations += 1;
        for (a, p) in assignments.iter_mut().zip(points) {
            *a = nearest(p, &centroids).0;
        }
        repair_empty(points, &mut assignments, &centroids, k);
        let updated = update_centroids(points, &assignments, k, dims);
        let shift = centroids
            .iter()
            .zip(&updated)
            .map(|(a, b)| sq_dist(a, b).sqrt())
            .fold(0.0, f64::max);
        centroids = updated;
        history.push(objective(points, &assignments, &centroids));
        if shift < config.tolerance {
            converged = true;
            break;
        }
    }

    Ok(KMeansResult {
        assignments,
        centroids,
        objective_history: history,
        iterations,
        converged,
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Accuracy under the injective cluster-to-sense mapping with the most
/// correct answers. Clusters left without a sense count as wrong.
pub fn cluster_accuracy<S: AsRef<str>>(assignments: &[usize], gold: &[S]) -> Result<f64> {
    if assignments.len() != gold.len() {
        return Err(Error::Contract("assignments and gold differ in length".into()));
    }
    if gold.is_empty() {
        return Ok(0.0);
    }
    let senses: Vec<&str> = {
        let mut s: Vec<&str> = gold.iter().map(AsRef::as_ref).collect();
        s.sort_unstable();
        s.dedup();
        s
    };
    let k = assignments.iter().max().map_or(0, |m| m + 1);
    let slots = k.max(senses.len());
    if slots > 8 {
        return Err(Error::Contract(format!(
            "best-mapping search over {slots} slots is too large"
        )));
    }
    // confusion[c][s]
    let mut confusion = vec![vec![0u64; slots]; slots];
    for (&c, g) in assignments.iter().zip(gold) {
        let s = senses.binary_search(&g.as_ref()).expect("sense collected above");
        confusion[c][s] += 1;
    }
    let best = permutations(slots)
        .into_iter()
        .map(|perm| perm.iter().enumerate().map(|(c, &s)| confusion[c][s]).sum::<u64>())
        .max()
        .unwrap_or(0);
    Ok(best as f64 / gold.len() as f64)
}

/// `context_id<TAB>cluster_id` per line.
pub fn assignments_tsv(context_ids: &[u64], assignments: &[usize]) -> String {
    let mut out = String::new();
    for (id, a) in context_ids.iter().zip(assignments) {
        let _ = writeln!(out, "{id}\t{a}");
    }
    out
}

/// Clusters the gold contexts among `vectors` and scores the clustering.
pub fn cluster_and_score(
    vectors: &[ContextVector],
    lexicon_len: usize,
    gold: &BTreeMap<u64, String>,
    config: &ClusterConfig,
) -> Result<(Vec<u64>, KMeansResult, f64)> {
    let selected: Vec<ContextVector> = vectors
        .iter()
        .filter(|v| gold.contains_key(&v.context_id))
        .cloned()
        .collect();
    let ids: Vec<u64> = selected.iter().map(|v| v.context_id).collect();
    let points = restrict_features(&selected, lexicon_len, config.top_lemmas);
    let result = kmeans(&points, config)?;
    let gold_senses: Vec<&str> = ids.iter().map(|id| gold[id].as_str()).collect();
    let accuracy = cluster_accuracy(&result.assignments, &gold_senses)?;
    Ok((ids, result, accuracy))
}
