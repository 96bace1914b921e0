use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::counts::{CountTable, EvidenceSets};
use super::list::{accept_rules, Accepted};
use super::{DecisionList, Rule, SenseInventory, TrainerConfig};
use crate::corpus::Context;
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationStats {
    pub iteration: u32,
    pub candidates: u64,
    pub accepted: u64,
    pub rejected_confidence: u64,
    pub rejected_coverage: u64,
    pub newly_labeled: u64,
    pub labeled_total: u64,
    pub unlabeled_total: u64,
}

const STATS_HEADER: &str =
    "iteration\tcandidates\taccepted\trejected_confidence\trejected_coverage\tnewly_labeled\tlabeled_total\tunlabeled_total";

impl IterationStats {
    pub fn to_tsv(stats: &[IterationStats]) -> String {
        let mut out = String::from(STATS_HEADER);
        out.push('\n');
        for s in stats {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                s.iteration,
                s.candidates,
                s.accepted,
                s.rejected_confidence,
                s.rejected_coverage,
                s.newly_labeled,
                s.labeled_total,
                s.unlabeled_total
            );
        }
        out
    }

    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Vec<IterationStats>> {
        let mut stats = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            if idx == 0 {
                if line != STATS_HEADER {
                    return Err(Error::parse("stats", 1, "unexpected header"));
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let v = line
                .split('\t')
                .map(|f| f.parse::<u64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse("stats", idx + 1, e.to_string()))?;
            if v.len() != 8 {
                return Err(Error::parse(
                    "stats",
                    idx + 1,
                    format!("expected 8 columns, found {}", v.len()),
                ));
            }
            stats.push(IterationStats {
                iteration: v[0] as u32,
                candidates: v[1],
                accepted: v[2],
                rejected_confidence: v[3],
                rejected_coverage: v[4],
                newly_labeled: v[5],
                labeled_total: v[6],
                unlabeled_total: v[7],
            });
        }
        Ok(stats)
    }

    pub fn is_balanced(&self) -> bool {
        self.accepted + self.rejected_confidence + self.rejected_coverage == self.candidates
    }
}

/// A label assignment, in the order it happened. Seeds are iteration 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelEvent {
    pub context_id: u64,
    pub sense: String,
    pub iteration: u32,
    pub is_seed: bool,
}

impl LabelEvent {
    pub fn to_tsv(events: &[LabelEvent]) -> String {
        let mut out = String::from("context_id\tsense\titeration\tis_seed\n");
        for e in events {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", e.context_id, e.sense, e.iteration, e.is_seed);
        }
        out
    }

    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Vec<LabelEvent>> {
        let mut events = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            if idx == 0 || line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            let bad = || Error::parse("labels", idx + 1, format!("malformed row {line:?}"));
            if f.len() != 4 {
                return Err(bad());
            }
            events.push(LabelEvent {
                context_id: f[0].parse().map_err(|_| bad())?,
                sense: f[1].to_string(),
                iteration: f[2].parse().map_err(|_| bad())?,
                is_seed: f[3].parse().map_err(|_| bad())?,
            });
        }
        Ok(events)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainResult {
    /// The list built in the last iteration.
    pub final_list: DecisionList,
    pub labels: BTreeMap<u64, String>,
    pub stats: Vec<IterationStats>,
    /// Label assignments in order: seeds first, then per iteration.
    pub events: Vec<LabelEvent>,
    pub converged: bool,
    pub converged_at: u32,
    /// Unlabeled contexts at termination over dataset size.
    pub residual_fraction: f64,
    pub dataset_size: u64,
}

impl TrainResult {
    pub fn iterations(&self) -> u32 {
        self.stats.len() as u32
    }

    pub fn seeds(&self) -> impl Iterator<Item = &LabelEvent> {
        self.events.iter().filter(|e| e.is_seed)
    }
}

/// Runs the bootstrap loop over `contexts`, whose seeds must already be
/// applied. New labels are written into the contexts.
///
/// Every iteration recounts evidence over the labeled contexts, rebuilds
/// the list from scratch, and applies it to the unlabeled ones. The loop
/// ends at the first iteration labeling nothing; `max_iterations` is a
/// safeguard that leaves the result flagged as not converged.
pub fn train(
    contexts: &mut [Context],
    lexicon: &Lexicon,
    inventory: &SenseInventory,
    config: &TrainerConfig,
) -> Result<TrainResult> {
    config.validate()?;
    if inventory.len() > u16::MAX as usize {
        return Err(Error::Config("too many senses".into()));
    }
    let theta = config.threshold_mode.theta(inventory);
    let method = config.confidence_method;
    let evidence = EvidenceSets::new(contexts, lexicon);
    let n = contexts.len();

    let mut labels: Vec<Option<u16>> = Vec::with_capacity(n);
    let mut events = Vec::new();
    for ctx in contexts.iter() {
        match &ctx.assigned_sense {
            Some(sense) => {
                labels.push(Some(inventory.require(sense)? as u16));
                events.push(LabelEvent {
                    context_id: ctx.id,
                    sense: sense.clone(),
                    iteration: ctx.assigned_at_iteration.unwrap_or(0),
                    is_seed: ctx.is_seed,
                });
            }
            None => labels.push(None),
        }
    }
    let mut labeled = labels.iter().filter(|l| l.is_some()).count() as u64;

    let mut first_accepted: HashMap<(u32, u16), u32> = HashMap::new();
    let mut stats = Vec::new();
    let mut final_rules: Vec<Accepted> = Vec::new();
    let mut converged = false;
    let mut converged_at = 0;

    // evidence id -> best rule position, u32::MAX when no rule uses it
    let mut rank = vec![u32::MAX; lexicon.len()];

    for iteration in 1..=config.max_iterations {
        let table = CountTable::tally(&evidence, &labels, lexicon, inventory.len());
        let (mut accepted, list_stats) = accept_rules(&table, method, theta, config.min_coverage);
        accepted.sort_by(|a, b| {
            b.confidence
                .total_cmp(&a.confidence)
                .then_with(|| b.coverage.cmp(&a.coverage))
                .then_with(|| {
                    table
                        .evidence(a.evidence as usize)
                        .cmp(table.evidence(b.evidence as usize))
                })
                .then_with(|| inventory.senses()[a.sense as usize].cmp(&inventory.senses()[b.sense as usize]))
        });
        for a in &accepted {
            first_accepted.entry((a.evidence, a.sense)).or_insert(iteration);
        }

        rank.iter_mut().for_each(|r| *r = u32::MAX);
        for (pos, a) in accepted.iter().enumerate().rev() {
            rank[a.evidence as usize] = pos as u32;
        }

        let mut newly = 0u64;
        for (i, set) in evidence.sets.iter().enumerate() {
            if labels[i].is_some() {
                continue;
            }
            let best = set.iter().map(|&e| rank[e as usize]).min().unwrap_or(u32::MAX);
            if best == u32::MAX {
                continue;
            }
            let sense = accepted[best as usize].sense;
            let name = &inventory.senses()[sense as usize];
            labels[i] = Some(sense);
            contexts[i].assign(name, iteration);
            events.push(LabelEvent {
                context_id: contexts[i].id,
                sense: name.clone(),
                iteration,
                is_seed: false,
            });
            newly += 1;
        }
        labeled += newly;

        stats.push(IterationStats {
            iteration,
            candidates: list_stats.candidates,
            accepted: list_stats.accepted,
            rejected_confidence: list_stats.rejected_confidence,
            rejected_coverage: list_stats.rejected_coverage,
            newly_labeled: newly,
            labeled_total: labeled,
            unlabeled_total: n as u64 - labeled,
        });
        final_rules = accepted;
        converged_at = iteration;
        if newly == 0 {
            converged = true;
            break;
        }
    }

    let rules = final_rules
        .iter()
        .map(|a| Rule {
            evidence: lexicon.lemma(a.evidence as usize).to_string(),
            sense: inventory.senses()[a.sense as usize].clone(),
            confidence: a.confidence,
            coverage: a.coverage,
            learned_at_iteration: first_accepted[&(a.evidence, a.sense)],
        })
        .collect();
    let final_list = DecisionList::new(rules, method, theta);

    let labels_out = contexts
        .iter()
        .filter_map(|c| c.assigned_sense.clone().map(|s| (c.id, s)))
        .collect();
    let residual_fraction = if n == 0 {
        0.0
    } else {
        (n as u64 - labeled) as f64 / n as f64
    };

    Ok(TrainResult {
        final_list,
        labels: labels_out,
        stats,
        events,
        converged,
        converged_at,
        residual_fraction,
        dataset_size: n as u64,
    })
}

/// Replays a label event log against per-iteration statistics.
///
/// Checks that every context is labeled at most once, that iterations never
/// go backwards, that cumulative label counts reproduce `labeled_total`
/// (which is therefore non-decreasing), and that the replayed labels equal
/// `final_labels`.
pub fn audit_label_events(
    events: &[LabelEvent],
    stats: &[IterationStats],
    final_labels: &BTreeMap<u64, String>,
) -> std::result::Result<(), String> {
    let mut seen: BTreeMap<u64, &str> = BTreeMap::new();
    let mut last_iteration = 0;
    let mut per_iteration: BTreeMap<u32, u64> = BTreeMap::new();
    for e in events {
        if e.iteration < last_iteration {
            return Err(format!(
                "event for context {} goes back to iteration {}",
                e.context_id, e.iteration
            ));
        }
        last_iteration = e.iteration;
        if let Some(prev) = seen.insert(e.context_id, &e.sense) {
            return Err(format!(
                "context {} relabeled: {prev} then {} at iteration {}",
                e.context_id, e.sense, e.iteration
            ));
        }
        if e.is_seed != (e.iteration == 0) {
            return Err(format!(
                "context {}: seed flag disagrees with iteration {}",
                e.context_id, e.iteration
            ));
        }
        *per_iteration.entry(e.iteration).or_default() += 1;
    }
    let mut cumulative = per_iteration.get(&0).copied().unwrap_or(0);
    let mut previous = cumulative;
    for s in stats {
        let added = per_iteration.get(&s.iteration).copied().unwrap_or(0);
        cumulative += added;
        if added != s.newly_labeled || cumulative != s.labeled_total {
            return Err(format!(
                "iteration {}: log has {added} new / {cumulative} total, stats say {} / {}",
                s.iteration, s.newly_labeled, s.labeled_total
            ));
        }
        if s.labeled_total < previous {
            return Err(format!("labeled_total decreased at iteration {}", s.iteration));
        }
        previous = s.labeled_total;
    }
    if seen.len() != final_labels.len()
        || seen
            .iter()
            .any(|(id, s)| final_labels.get(id).map(String::as_str) != Some(*s))
    {
        return Err("replayed labels differ from final labels".into());
    }
    Ok(())
}
