//! Frequency-truncated lemma inventory and count vectorization.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::corpus::Context;
use crate::error::{Error, Result};

pub const DEFAULT_MIN_CONTEXT_COUNT: u32 = 10;
pub const DEFAULT_PSEUDOWORD_MIN_CONTEXT_COUNT: u32 = 30;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub lemma: String,
    pub context_count: u32,
}

/// Lemmas occurring in at least `min_context_count` contexts, sorted by
/// context count descending and lemma ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    min_context_count: u32,
    index: HashMap<String, usize>,
}

impl Lexicon {
    fn from_sorted(entries: Vec<LexiconEntry>, min_context_count: u32) -> Self {
        let index = entries.iter().enumerate().map(|(i, e)| (e.lemma.clone(), i)).collect();
        Lexicon {
            entries,
            min_context_count,
            index,
        }
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn min_context_count(&self) -> u32 {
        self.min_context_count
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn index_of(&self, lemma: &str) -> Option<usize> {
        self.index.get(lemma).copied()
    }

    pub fn lemma(&self, index: usize) -> &str {
        &self.entries[index].lemma
    }

    pub fn contains(&self, lemma: &str) -> bool {
        self.index.contains_key(lemma)
    }

    /// Header line plus one `lemma<TAB>context_count` line per entry.
    pub fn to_tsv(&self) -> String {
        let mut out = format!("#min_context_count={}\n", self.min_context_count);
        for e in &self.entries {
            let _ = writeln!(out, "{}\t{}", e.lemma, e.context_count);
        }
        out
    }

    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self> {
        const NAME: &str = "lexicon";
        let mut lines = reader.lines().enumerate();
        let min_context_count = match lines.next() {
            Some((_, line)) => {
                let line = line?;
                line.strip_prefix("#min_context_count=")
                    .and_then(|v| v.trim().parse::<u32>().ok())
                    .ok_or_else(|| Error::parse(NAME, 1, "expected #min_context_count=<n> header"))?
            }
            None => return Err(Error::parse(NAME, 1, "empty lexicon file")),
        };
        let mut entries = Vec::new();
        for (idx, line) in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let (lemma, count) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(NAME, idx + 1, "expected lemma<TAB>count"))?;
            let context_count = count
                .parse::<u32>()
                .map_err(|e| Error::parse(NAME, idx + 1, format!("bad count: {e}")))?;
            entries.push(LexiconEntry {
                lemma: lemma.to_string(),
                context_count,
            });
        }
        let lexicon = Lexicon::from_sorted(entries, min_context_count);
        lexicon.check()?;
        Ok(lexicon)
    }

    fn check(&self) -> Result<()> {
        if self.index.len() != self.entries.len() {
            return Err(Error::Contract("lexicon has duplicate lemmas".into()));
        }
        for pair in self.entries.windows(2) {
            let ordered = (pair[0].context_count, &pair[1].lemma) > (pair[1].context_count, &pair[0].lemma);
            if !ordered {
                return Err(Error::Contract(format!("lexicon out of order at {:?}", pair[1].lemma)));
            }
        }
        if let Some(e) = self.entries.iter().find(|e| e.context_count < self.min_context_count) {
            return Err(Error::Contract(format!(
                "lexicon entry {:?} below bound {}",
                e.lemma, self.min_context_count
            )));
        }
        Ok(())
    }
}

/// Counts, for every lemma, the number of distinct contexts it occurs in.
pub fn context_counts(contexts: &[Context]) -> HashMap<&str, u32> {
    let mut counts: HashMap<&str, u32> = HashMap::new();
    let mut seen: HashSet<&str> = HashSet::new();
    for ctx in contexts {
        seen.clear();
        for lemma in &ctx.lemmas {
            if seen.insert(lemma.as_str()) {
                *counts.entry(lemma.as_str()).or_default() += 1;
            }
        }
    }
    counts
}

pub fn build_lexicon(contexts: &[Context], min_context_count: u32) -> Result<Lexicon> {
    if min_context_count == 0 {
        return Err(Error::Contract("min_context_count must be at least 1".into()));
    }
    let mut entries: Vec<LexiconEntry> = context_counts(contexts)
        .into_iter()
        .filter(|&(_, n)| n >= min_context_count)
        .map(|(lemma, context_count)| LexiconEntry {
            lemma: lemma.to_string(),
            context_count,
        })
        .collect();
    entries.sort_by(|a, b| {
        b.context_count
            .cmp(&a.context_count)
            .then_with(|| a.lemma.cmp(&b.lemma))
    });
    Ok(Lexicon::from_sorted(entries, min_context_count))
}

/// Sparse occurrence counts of lexicon lemmas in one context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextVector {
    pub context_id: u64,
    pub counts: BTreeMap<usize, u32>,
}

impl ContextVector {
    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| c as u64).sum()
    }

    pub fn to_dense(&self, dims: usize) -> Vec<f64> {
        let mut v = vec![0.0; dims];
        for (&i, &c) in self.counts.range(..dims) {
            v[i] = c as f64;
        }
        v
    }
}

pub fn vectorize(context: &Context, lexicon: &Lexicon) -> ContextVector {
    let mut counts = BTreeMap::new();
    for lemma in &context.lemmas {
        if let Some(i) = lexicon.index_of(lemma) {
            *counts.entry(i).or_insert(0) += 1;
        }
    }
    ContextVector {
        context_id: context.id,
        counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx(id: u64, lemmas: &[&str]) -> Context {
        Context::new(id, 0, "t", lemmas.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn bound_is_inclusive() {
        let mut contexts: Vec<Context> = (0..10).map(|i| ctx(i, &["ten"])).collect();
        contexts.iter_mut().take(9).for_each(|c| c.lemmas.push("nine".into()));
        let lex = build_lexicon(&contexts, 10).unwrap();
        assert_eq!(lex.len(), 1);
        assert_eq!(
            lex.entries()[0],
            LexiconEntry {
                lemma: "ten".into(),
                context_count: 10
            }
        );
        assert!(!lex.contains("nine"));
    }

    #[test]
    fn presence_counted_once_per_context() {
        let contexts = vec![ctx(0, &["x", "x", "x"]), ctx(1, &["x"])];
        let lex = build_lexicon(&contexts, 1).unwrap();
        assert_eq!(lex.entries()[0].context_count, 2);
    }

    #[test]
    fn ordering_breaks_ties_by_lemma() {
        let contexts = vec![ctx(0, &["b", "a", "c"]), ctx(1, &["c"])];
        let lex = build_lexicon(&contexts, 1).unwrap();
        let lemmas: Vec<_> = lex.entries().iter().map(|e| e.lemma.as_str()).collect();
        assert_eq!(lemmas, ["c", "a", "b"]);
    }

    #[test]
    fn empty_input_gives_empty_lexicon() {
        assert!(build_lexicon(&[], 10).unwrap().is_empty());
        assert!(build_lexicon(&[], 0).is_err());
    }

    #[test]
    fn vectorize_counts_occurrences() {
        let contexts = vec![ctx(0, &["planeta", "agua"]), ctx(1, &["planeta"])];
        let lex = build_lexicon(&contexts, 1).unwrap();
        assert_eq!(lex.lemma(0), "planeta");
        let v = vectorize(&ctx(7, &["planeta", "agua", "planeta", "otro"]), &lex);
        assert_eq!(v.context_id, 7);
        assert_eq!(v.counts, BTreeMap::from([(0, 2), (1, 1)]));
        assert!(vectorize(&ctx(8, &["otro"]), &lex).counts.is_empty());
        assert_eq!(vectorize(&ctx(9, &[]), &lex).to_dense(2), [0.0, 0.0]);
    }

    #[test]
    fn tsv_round_trip() {
        let contexts = vec![ctx(0, &["b", "a"]), ctx(1, &["a"])];
        let lex = build_lexicon(&contexts, 1).unwrap();
        let text = lex.to_tsv();
        assert_eq!(text, "#min_context_count=1\na\t2\nb\t1\n");
        assert_eq!(Lexicon::read_tsv(text.as_bytes()).unwrap(), lex);
        assert!(Lexicon::read_tsv("#min_context_count=1\nb\t1\na\t2\n".as_bytes()).is_err());
        assert!(Lexicon::read_tsv("a\t2\n".as_bytes()).is_err());
    }

    fn arb_contexts() -> impl Strategy<Value = Vec<Context>> {
        let lemma = prop::sample::select(vec!["a", "b", "c", "d", "e", "f", "g", "h"]);
        prop::collection::vec(prop::collection::vec(lemma, 0..8), 0..40)
            .prop_map(|cs| cs.into_iter().enumerate().map(|(i, ls)| ctx(i as u64, &ls)).collect())
    }

    proptest! {
        #[test]
        fn raising_bound_never_adds(contexts in arb_contexts(), bound in 1u32..6) {
            let lo = build_lexicon(&contexts, bound).unwrap();
            let hi = build_lexicon(&contexts, bound + 1).unwrap();
            prop_assert!(hi.entries().iter().all(|e| lo.contains(&e.lemma)));
        }

        #[test]
        fn vector_total_matches_recount(contexts in arb_contexts(), bound in 1u32..4) {
            let lex = build_lexicon(&contexts, bound).unwrap();
            for c in &contexts {
                let brute = c.lemmas.iter()
                    .filter(|l| lex.entries().iter().any(|e| &e.lemma == *l))
                    .count() as u64;
                prop_assert_eq!(vectorize(c, &lex).total(), brute);
            }
        }

        #[test]
        fn serialization_is_deterministic(contexts in arb_contexts()) {
            let mut reversed = contexts.clone();
            reversed.reverse();
            prop_assert_eq!(
                build_lexicon(&contexts, 2).unwrap().to_tsv(),
                build_lexicon(&reversed, 2).unwrap().to_tsv()
            );
        }
    }
}
