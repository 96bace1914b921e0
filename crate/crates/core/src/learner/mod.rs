//! Semi-supervised decision-list learner.
//!
//! Each iteration counts evidence/sense co-occurrences over the currently
//! labeled contexts, rebuilds the decision list from scratch with the
//! acceptance criteria (confidence threshold, minimum coverage), and applies
//! it first-match to the contexts that are still unlabeled. Labels are never
//! removed or changed once assigned. The loop stops at the first iteration
//! that labels nothing new.

mod confidence;
mod counts;
mod list;
mod seeds;
mod train;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use confidence::{confidence, log_odds};
pub use counts::{count_evidences, CountTable};
pub use list::{apply_list, build_decision_list, DecisionList, ListStats, ModelHeader, Rule};
pub use seeds::{apply_seeds, read_seed_file, seed_labels, select_seeds, write_seed_file, Seed};
pub use train::{audit_label_events, train, IterationStats, LabelEvent, TrainResult};

/// The target lemma and its known senses, in a fixed order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SenseInventory {
    target: String,
    senses: Vec<String>,
}

impl SenseInventory {
    pub fn new<I, S>(target: impl Into<String>, senses: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let target = target.into();
        let senses: Vec<String> = senses.into_iter().map(Into::into).collect();
        if target.is_empty() {
            return Err(Error::Config("empty target lemma".into()));
        }
        if senses.len() < 2 {
            return Err(Error::Config(format!(
                "a sense inventory needs at least two senses, got {}",
                senses.len()
            )));
        }
        for (i, s) in senses.iter().enumerate() {
            if s.is_empty() || s.contains(['\t', '\n', ',']) {
                return Err(Error::Config(format!("invalid sense id {s:?}")));
            }
            if senses[..i].contains(s) {
                return Err(Error::Config(format!("duplicate sense id {s:?}")));
            }
        }
        Ok(SenseInventory { target, senses })
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn senses(&self) -> &[String] {
        &self.senses
    }

    /// Number of senses, `L`.
    pub fn len(&self) -> usize {
        self.senses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.senses.is_empty()
    }

    pub fn index_of(&self, sense: &str) -> Option<usize> {
        self.senses.iter().position(|s| s == sense)
    }

    pub(crate) fn require(&self, sense: &str) -> Result<usize> {
        self.index_of(sense)
            .ok_or_else(|| Error::Contract(format!("sense {sense:?} not in inventory {:?}", self.senses)))
    }
}

/// How a rule's confidence is computed from its counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConfidenceMethod {
    /// `f(S,E) / f_labeled(E)`: the denominator only counts labeled contexts.
    RestrictedRatio,
    /// Maximum-likelihood `f(S,E) / f(E)` over all contexts.
    Ml,
    /// Beta-posterior mean `(f(S,E) + 1) / (f(E) + 2)`.
    Smoothed,
    /// `log(p / (1 - p))` of the smoothed estimate.
    LogOdds,
}

impl ConfidenceMethod {
    pub const ALL: [ConfidenceMethod; 4] = [
        ConfidenceMethod::RestrictedRatio,
        ConfidenceMethod::Ml,
        ConfidenceMethod::Smoothed,
        ConfidenceMethod::LogOdds,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConfidenceMethod::RestrictedRatio => "restricted-ratio",
            ConfidenceMethod::Ml => "ml",
            ConfidenceMethod::Smoothed => "smoothed",
            ConfidenceMethod::LogOdds => "log-odds",
        }
    }

    /// Maps a probability threshold onto this method's confidence scale.
    pub fn scaled_threshold(self, theta: f64) -> f64 {
        match self {
            ConfidenceMethod::LogOdds => (theta / (1.0 - theta)).ln(),
            _ => theta,
        }
    }
}

impl fmt::Display for ConfidenceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConfidenceMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "restricted-ratio" => Ok(ConfidenceMethod::RestrictedRatio),
            "ml" => Ok(ConfidenceMethod::Ml),
            "smoothed" => Ok(ConfidenceMethod::Smoothed),
            "log-odds" => Ok(ConfidenceMethod::LogOdds),
            _ => Err(Error::Config(format!("unknown confidence method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode", content = "theta")]
pub enum ThresholdMode {
    Fixed(f64),
    /// `1 / L` for an inventory of `L` senses.
    Abney,
}

impl ThresholdMode {
    pub fn theta(self, inventory: &SenseInventory) -> f64 {
        match self {
            ThresholdMode::Fixed(theta) => theta,
            ThresholdMode::Abney => 1.0 / inventory.len() as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedSelection {
    CorpusOrder,
    Random,
}

impl FromStr for SeedSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "corpus-order" => Ok(SeedSelection::CorpusOrder),
            "random" => Ok(SeedSelection::Random),
            _ => Err(Error::Config(format!("unknown seed selection {s:?}"))),
        }
    }
}

pub const DEFAULT_THRESHOLD: f64 = 0.95;
pub const DEFAULT_SEEDS_PER_SENSE: usize = 2;
pub const DEFAULT_MAX_ITERATIONS: u32 = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainerConfig {
    pub confidence_method: ConfidenceMethod,
    pub threshold_mode: ThresholdMode,
    pub min_coverage: u32,
    pub seeds_per_sense: usize,
    pub max_iterations: u32,
    pub rng_seed: u64,
    pub seed_selection: SeedSelection,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            confidence_method: ConfidenceMethod::RestrictedRatio,
            threshold_mode: ThresholdMode::Fixed(DEFAULT_THRESHOLD),
            min_coverage: 1,
            seeds_per_sense: DEFAULT_SEEDS_PER_SENSE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            rng_seed: 0,
            seed_selection: SeedSelection::CorpusOrder,
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<()> {
        if let ThresholdMode::Fixed(theta) = self.threshold_mode {
            if !(theta > 0.0 && theta <= 1.0) {
                return Err(Error::Config(format!("threshold {theta} outside (0, 1]")));
            }
        }
        if self.min_coverage < 1 {
            return Err(Error::Config("min_coverage must be at least 1".into()));
        }
        if self.max_iterations < 1 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}
