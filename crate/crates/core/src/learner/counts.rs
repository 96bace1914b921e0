use super::SenseInventory;
use crate::corpus::Context;
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;

/// Contexts reduced to their distinct in-lexicon evidence ids, sorted.
#[derive(Debug, Clone)]
pub(crate) struct EvidenceSets {
    pub(crate) sets: Vec<Vec<u32>>,
}

impl EvidenceSets {
    pub(crate) fn new(contexts: &[Context], lexicon: &Lexicon) -> Self {
        let sets = contexts
            .iter()
            .map(|c| {
                let mut ids: Vec<u32> = c
                    .lemmas
                    .iter()
                    .filter(|l| **l != c.target_lemma)
                    .filter_map(|l| lexicon.index_of(l))
                    .map(|i| i as u32)
                    .collect();
                ids.sort_unstable();
                ids.dedup();
                ids
            })
            .collect();
        EvidenceSets { sets }
    }
}

/// Per-evidence and per-(evidence, sense) context counts. Evidence ids are
/// lexicon positions; a context counts once per evidence however many times
/// the lemma repeats in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    evidences: Vec<String>,
    senses: usize,
    f_joint: Vec<u32>,
    f_labeled: Vec<u32>,
    f_total: Vec<u32>,
}

impl CountTable {
    pub(crate) fn tally(evidence: &EvidenceSets, labels: &[Option<u16>], lexicon: &Lexicon, senses: usize) -> Self {
        let n = lexicon.len();
        let mut table = CountTable {
            evidences: lexicon.entries().iter().map(|e| e.lemma.clone()).collect(),
            senses,
            f_joint: vec![0; n * senses],
            f_labeled: vec![0; n],
            f_total: vec![0; n],
        };
        for (set, label) in evidence.sets.iter().zip(labels) {
            for &e in set {
                let e = e as usize;
                table.f_total[e] += 1;
                if let Some(s) = label {
                    table.f_labeled[e] += 1;
                    table.f_joint[e * senses + *s as usize] += 1;
                }
            }
        }
        table
    }

    pub fn evidence_count(&self) -> usize {
        self.evidences.len()
    }

    pub fn sense_count(&self) -> usize {
        self.senses
    }

    pub fn evidence(&self, e: usize) -> &str {
        &self.evidences[e]
    }

    pub fn evidence_index(&self, lemma: &str) -> Option<usize> {
        self.evidences.iter().position(|l| l == lemma)
    }

    /// `f(S_j, E_i)`.
    pub fn f_joint(&self, e: usize, s: usize) -> u32 {
        self.f_joint[e * self.senses + s]
    }

    /// Labeled contexts containing `E_i`; a rule's coverage.
    pub fn f_labeled(&self, e: usize) -> u32 {
        self.f_labeled[e]
    }

    /// All contexts containing `E_i`.
    pub fn f_total(&self, e: usize) -> u32 {
        self.f_total[e]
    }

    pub fn is_consistent(&self) -> bool {
        (0..self.evidences.len()).all(|e| {
            let joint: u32 = (0..self.senses).map(|s| self.f_joint(e, s)).sum();
            joint == self.f_labeled[e] && self.f_labeled[e] <= self.f_total[e]
        })
    }
}

/// Counts evidence over `contexts`, taking the labeled side from each
/// context's assigned sense.
pub fn count_evidences(contexts: &[Context], lexicon: &Lexicon, inventory: &SenseInventory) -> Result<CountTable> {
    if inventory.len() > u16::MAX as usize {
        return Err(Error::Config("too many senses".into()));
    }
    let labels = contexts
        .iter()
        .map(|c| match &c.assigned_sense {
            Some(s) => inventory.require(s).map(|i| Some(i as u16)),
            None => Ok(None),
        })
        .collect::<Result<Vec<_>>>()?;
    let evidence = EvidenceSets::new(contexts, lexicon);
    Ok(CountTable::tally(&evidence, &labels, lexicon, inventory.len()))
}
