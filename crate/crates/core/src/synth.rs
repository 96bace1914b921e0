//! Synthetic datasets with known ground truth.

use std::collections::BTreeMap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::Context;

/// Two-sense corpus where each sense has its own indicator vocabulary and
/// both share a pool of noise lemmas.
#[derive(Debug, Clone)]
pub struct PlantedSpec {
    pub target: String,
    pub senses: [String; 2],
    pub contexts_per_sense: usize,
    pub indicators_per_sense: usize,
    pub indicators_per_context: usize,
    pub noise_lemmas: usize,
    pub noise_per_context: usize,
    pub rng_seed: u64,
}

impl Default for PlantedSpec {
    fn default() -> Self {
        PlantedSpec {
            target: "banco".into(),
            senses: ["dinero".into(), "asiento".into()],
            contexts_per_sense: 100,
            indicators_per_sense: 5,
            indicators_per_context: 3,
            noise_lemmas: 20,
            noise_per_context: 2,
            rng_seed: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedCorpus {
    pub contexts: Vec<Context>,
    pub gold: BTreeMap<u64, String>,
    /// Indicator lemmas of each sense, in `senses` order.
    pub indicators: [Vec<String>; 2],
    pub noise: Vec<String>,
}

impl PlantedSpec {
    pub fn indicator(&self, sense: usize, i: usize) -> String {
        format!("{}_cue{i}", self.senses[sense])
    }

    pub fn noise_lemma(&self, i: usize) -> String {
        format!("noise{i:02}")
    }

    pub fn generate(&self) -> PlantedCorpus {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        let indicators: [Vec<String>; 2] =
            [0, 1].map(|s| (0..self.indicators_per_sense).map(|i| self.indicator(s, i)).collect());
        let noise: Vec<String> = (0..self.noise_lemmas).map(|i| self.noise_lemma(i)).collect();

        let mut rows: Vec<(usize, Vec<String>)> = Vec::new();
        for (sense, cues) in indicators.iter().enumerate() {
            for _ in 0..self.contexts_per_sense {
                let mut lemmas: Vec<String> = cues
                    .choose_multiple(&mut rng, self.indicators_per_context)
                    .cloned()
                    .collect();
                lemmas.extend(noise.choose_multiple(&mut rng, self.noise_per_context).cloned());
                lemmas.shuffle(&mut rng);
                rows.push((sense, lemmas));
            }
        }
        rows.shuffle(&mut rng);

        let mut contexts = Vec::with_capacity(rows.len());
        let mut gold = BTreeMap::new();
        for (i, (sense, lemmas)) in rows.into_iter().enumerate() {
            let id = i as u64;
            let mut c = Context::new(id, id, self.target.clone(), lemmas);
            c.gold_sense = Some(self.senses[sense].clone());
            gold.insert(id, self.senses[sense].clone());
            contexts.push(c);
        }
        PlantedCorpus {
            contexts,
            gold,
            indicators,
            noise,
        }
    }
}

/// Raw running text over two topics, each with its own vocabulary and one
/// source word. Conflating the two source words gives a pseudo-word whose
/// senses are recoverable from topical context.
#[derive(Debug, Clone)]
pub struct TopicalSpec {
    pub source_words: [String; 2],
    pub topic_vocabulary: usize,
    pub shared_vocabulary: usize,
    pub documents: usize,
    pub sentences_per_document: usize,
    pub min_sentence_words: usize,
    pub max_sentence_words: usize,
    /// Chance that a word is drawn from the document topic's vocabulary.
    pub topic_word_rate: f64,
    /// Chance that a sentence carries its topic's source word.
    pub source_rate: f64,
    /// Chance that a source sentence also carries the other source word.
    pub both_rate: f64,
    /// Chance of emitting a short fragment line.
    pub fragment_rate: f64,
    pub rng_seed: u64,
}

impl Default for TopicalSpec {
    fn default() -> Self {
        TopicalSpec {
            source_words: ["orilla".into(), "dinero".into()],
            topic_vocabulary: 80,
            shared_vocabulary: 800,
            documents: 2000,
            sentences_per_document: 40,
            min_sentence_words: 8,
            max_sentence_words: 16,
            topic_word_rate: 0.25,
            source_rate: 0.03,
            both_rate: 0.02,
            fragment_rate: 0.02,
            rng_seed: 7,
        }
    }
}

impl TopicalSpec {
    pub fn topic_word(&self, topic: usize, i: usize) -> String {
        format!("t{topic}w{i:03}")
    }

    pub fn shared_word(&self, i: usize) -> String {
        format!("g{i:04}")
    }

    /// One sentence per line, capitalized and punctuated, with a blank line
    /// after each topical document.
    pub fn generate(&self) -> String {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        let topic: [Vec<String>; 2] =
            [0, 1].map(|t| (0..self.topic_vocabulary).map(|i| self.topic_word(t, i)).collect());
        let shared: Vec<String> = (0..self.shared_vocabulary).map(|i| self.shared_word(i)).collect();
        // skewed toward low indices, so a few words in each pool are frequent
        let skewed = |rng: &mut ChaCha8Rng, n: usize| {
            let u: f64 = rng.random();
            ((u * u * n as f64) as usize).min(n - 1)
        };

        let mut out = String::new();
        for _ in 0..self.documents {
            let t = rng.random_range(0..2usize);
            for _ in 0..self.sentences_per_document {
                if rng.random_bool(self.fragment_rate) {
                    out.push_str("Fin del capitulo.\n");
                    continue;
                }
                let len = rng.random_range(self.min_sentence_words..=self.max_sentence_words);
                let mut words: Vec<String> = (0..len)
                    .map(|_| {
                        if rng.random_bool(self.topic_word_rate) {
                            topic[t][skewed(&mut rng, topic[t].len())].clone()
                        } else {
                            shared[skewed(&mut rng, shared.len())].clone()
                        }
                    })
                    .collect();
                if rng.random_bool(self.source_rate) {
                    let at = rng.random_range(0..words.len());
                    words[at] = self.source_words[t].clone();
                    if rng.random_bool(self.both_rate) {
                        words.push(self.source_words[1 - t].clone());
                    }
                }
                let mut line = words.join(" ");
                if let Some(first) = line.get(..1) {
                    let upper = first.to_ascii_uppercase();
                    line.replace_range(..1, &upper);
                }
                line.push_str(if rng.random_bool(0.1) { "," } else { "." });
                out.push_str(&line);
                out.push('\n');
            }
            out.push('\n');
        }
        out
    }
}
