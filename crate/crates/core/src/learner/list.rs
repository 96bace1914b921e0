use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::confidence::confidence_unchecked;
use super::{ConfidenceMethod, CountTable, SenseInventory, TrainerConfig};
use crate::corpus::Context;
use crate::error::{Error, Result};

/// `evidence => sense`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub evidence: String,
    pub sense: String,
    pub confidence: f64,
    /// Labeled contexts containing the evidence when the rule was scored.
    pub coverage: u32,
    pub learned_at_iteration: u32,
}

fn rule_order(a: &Rule, b: &Rule) -> Ordering {
    b.confidence
        .total_cmp(&a.confidence)
        .then_with(|| b.coverage.cmp(&a.coverage))
        .then_with(|| a.evidence.cmp(&b.evidence))
        .then_with(|| a.sense.cmp(&b.sense))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionList {
    pub rules: Vec<Rule>,
    pub method: ConfidenceMethod,
    /// Acceptance threshold as a probability, before any rescaling.
    pub threshold: f64,
}

impl DecisionList {
    pub fn new(mut rules: Vec<Rule>, method: ConfidenceMethod, threshold: f64) -> Self {
        rules.sort_by(rule_order);
        DecisionList {
            rules,
            method,
            threshold,
        }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn is_sorted(&self) -> bool {
        self.rules
            .windows(2)
            .all(|w| rule_order(&w[0], &w[1]) != Ordering::Greater)
    }

    /// First rule whose evidence occurs among `lemmas`.
    pub fn first_match<'a, I>(&self, lemmas: I) -> Option<&Rule>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let ranks = self.evidence_ranks();
        lemmas
            .into_iter()
            .filter_map(|l| ranks.get(l).copied())
            .min()
            .map(|r| &self.rules[r])
    }

    fn evidence_ranks(&self) -> HashMap<&str, usize> {
        let mut ranks = HashMap::with_capacity(self.rules.len());
        for (i, r) in self.rules.iter().enumerate() {
            ranks.entry(r.evidence.as_str()).or_insert(i);
        }
        ranks
    }

    /// Serializes the list in the model file format.
    pub fn to_model_tsv(&self, header: &ModelHeader) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "#target={}", header.target);
        let _ = writeln!(out, "#senses={}", header.senses.join(","));
        let _ = writeln!(out, "#method={}", self.method);
        let _ = writeln!(out, "#threshold={}", self.threshold);
        let _ = writeln!(out, "#min_coverage={}", header.min_coverage);
        for r in &self.rules {
            let _ = writeln!(
                out,
                "{}\t{}\t{:.16e}\t{}\t{}",
                r.evidence, r.sense, r.confidence, r.coverage, r.learned_at_iteration
            );
        }
        out
    }

    pub fn read_model<R: BufRead>(reader: R) -> Result<(ModelHeader, DecisionList)> {
        const NAME: &str = "model";
        let mut target = None;
        let mut senses = None;
        let mut method = None;
        let mut threshold = None;
        let mut min_coverage = 1;
        let mut rules = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            if let Some(header) = line.strip_prefix('#') {
                let (key, value) = header
                    .split_once('=')
                    .ok_or_else(|| Error::parse(NAME, lineno, "expected #key=value"))?;
                match key {
                    "target" => target = Some(value.to_string()),
                    "senses" => senses = Some(value.split(',').map(str::to_string).collect::<Vec<_>>()),
                    "method" => method = Some(value.parse::<ConfidenceMethod>()?),
                    "threshold" => {
                        threshold = Some(
                            value
                                .parse::<f64>()
                                .map_err(|e| Error::parse(NAME, lineno, format!("bad threshold: {e}")))?,
                        )
                    }
                    "min_coverage" => {
                        min_coverage = value
                            .parse()
                            .map_err(|e| Error::parse(NAME, lineno, format!("bad min_coverage: {e}")))?
                    }
                    _ => {}
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 5 {
                return Err(Error::parse(
                    NAME,
                    lineno,
                    format!("expected 5 columns, found {}", f.len()),
                ));
            }
            let num = |s: &str, what: &str| Error::parse(NAME, lineno, format!("bad {what}: {s:?}"));
            rules.push(Rule {
                evidence: f[0].to_string(),
                sense: f[1].to_string(),
                confidence: f[2].parse().map_err(|_| num(f[2], "confidence"))?,
                coverage: f[3].parse().map_err(|_| num(f[3], "coverage"))?,
                learned_at_iteration: f[4].parse().map_err(|_| num(f[4], "iteration"))?,
            });
        }
        let missing = |k: &str| Error::parse(NAME, 0, format!("missing #{k} header"));
        let header = ModelHeader {
            target: target.ok_or_else(|| missing("target"))?,
            senses: senses.ok_or_else(|| missing("senses"))?,
            min_coverage,
        };
        let list = DecisionList {
            rules,
            method: method.ok_or_else(|| missing("method"))?,
            threshold: threshold.ok_or_else(|| missing("threshold"))?,
        };
        if !list.is_sorted() {
            return Err(Error::Contract("model rules are not in decision-list order".into()));
        }
        Ok((header, list))
    }
}

/// Model file metadata not carried by the list itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelHeader {
    pub target: String,
    pub senses: Vec<String>,
    pub min_coverage: u32,
}

impl ModelHeader {
    pub fn new(inventory: &SenseInventory, min_coverage: u32) -> Self {
        ModelHeader {
            target: inventory.target().to_string(),
            senses: inventory.senses().to_vec(),
            min_coverage,
        }
    }
}

/// Candidate and rejection tallies for one list build.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListStats {
    pub candidates: u64,
    pub accepted: u64,
    pub rejected_confidence: u64,
    pub rejected_coverage: u64,
}

/// An accepted rule in table coordinates.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Accepted {
    pub evidence: u32,
    pub sense: u16,
    pub confidence: f64,
    pub coverage: u32,
}

/// Scores every `(evidence, sense)` pair seen in at least one labeled
/// context. Coverage is checked before confidence, so a pair failing both
/// counts as a coverage rejection.
pub(crate) fn accept_rules(
    table: &CountTable,
    method: ConfidenceMethod,
    theta: f64,
    min_coverage: u32,
) -> (Vec<Accepted>, ListStats) {
    let cutoff = method.scaled_threshold(theta);
    let mut stats = ListStats::default();
    let mut accepted = Vec::new();
    for e in 0..table.evidence_count() {
        let coverage = table.f_labeled(e);
        if coverage == 0 {
            continue;
        }
        for s in 0..table.sense_count() {
            let joint = table.f_joint(e, s);
            if joint == 0 {
                continue;
            }
            stats.candidates += 1;
            if coverage < min_coverage {
                stats.rejected_coverage += 1;
                continue;
            }
            let confidence = confidence_unchecked(joint, coverage, table.f_total(e), method);
            if confidence >= cutoff {
                stats.accepted += 1;
                accepted.push(Accepted {
                    evidence: e as u32,
                    sense: s as u16,
                    confidence,
                    coverage,
                });
            } else {
                stats.rejected_confidence += 1;
            }
        }
    }
    (accepted, stats)
}

pub fn build_decision_list(
    table: &CountTable,
    inventory: &SenseInventory,
    config: &TrainerConfig,
    iteration: u32,
) -> (DecisionList, ListStats) {
    let theta = config.threshold_mode.theta(inventory);
    let (accepted, stats) = accept_rules(table, config.confidence_method, theta, config.min_coverage);
    let rules = accepted
        .into_iter()
        .map(|a| Rule {
            evidence: table.evidence(a.evidence as usize).to_string(),
            sense: inventory.senses()[a.sense as usize].clone(),
            confidence: a.confidence,
            coverage: a.coverage,
            learned_at_iteration: iteration,
        })
        .collect();
    (DecisionList::new(rules, config.confidence_method, theta), stats)
}

/// Labels each unlabeled context with the sense of the first matching rule.
/// Already-labeled contexts are left alone. Returns the number of new labels.
pub fn apply_list(list: &DecisionList, contexts: &mut [Context], iteration: u32) -> usize {
    let ranks = list.evidence_ranks();
    let mut newly = 0;
    for ctx in contexts.iter_mut().filter(|c| !c.is_labeled()) {
        let best = ctx
            .lemmas
            .iter()
            .filter(|l| **l != ctx.target_lemma)
            .filter_map(|l| ranks.get(l.as_str()).copied())
            .min();
        if let Some(r) = best {
            if ctx.assign(&list.rules[r].sense, iteration) {
                newly += 1;
            }
        }
    }
    newly
}
