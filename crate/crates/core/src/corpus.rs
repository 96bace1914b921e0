//! Corpus ingestion: raw and vertical tagged readers, the content-word
//! filter, target context extraction and pseudo-word corpus generation.
//!
//! Raw text is read one line per document (and per sentence). Each line is
//! split on whitespace, lowercased and stripped of ASCII punctuation at the
//! token edges; the lemma is the normalized surface and the tag is
//! [`RAW_POS`]. Tagged text uses the vertical `surface<TAB>lemma<TAB>pos`
//! layout with blank lines between sentences and `<doc>` lines between
//! documents.

use std::collections::BTreeMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tag carried by every token produced by the raw-text tokenizer.
pub const RAW_POS: &str = "RAW";

/// Document separator line in the vertical format.
pub const DOC_MARKER: &str = "<doc>";

pub const DEFAULT_MIN_LINE_WORDS: usize = 10;

/// Nouns, main verbs and qualificative adjectives in EAGLES-style tagsets.
pub const DEFAULT_CONTENT_PREFIXES: [&str; 3] = ["N", "VM", "AQ"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub lemma: String,
    pub pos: String,
}

impl Token {
    pub fn new(surface: impl Into<String>, lemma: impl Into<String>, pos: impl Into<String>) -> Self {
        Token {
            surface: surface.into(),
            lemma: lemma.into(),
            pos: pos.into(),
        }
    }

    /// Token from the raw tokenizer: lemma is the surface, tag is [`RAW_POS`].
    pub fn raw(word: impl Into<String>) -> Self {
        let word = word.into();
        Token {
            lemma: word.clone(),
            surface: word,
            pos: RAW_POS.to_string(),
        }
    }

    pub fn is_raw(&self) -> bool {
        self.pos == RAW_POS
    }
}

pub type Sentence = Vec<Token>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: u64,
    pub sentences: Vec<Sentence>,
}

impl Document {
    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }
}

/// One sentence holding the target. The unit instance of a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Context {
    pub id: u64,
    pub document_id: u64,
    pub target_lemma: String,
    /// Co-occurring lemmas in sentence order, target excluded. Repeats kept.
    pub lemmas: Vec<String>,
    pub gold_sense: Option<String>,
    pub assigned_sense: Option<String>,
    pub assigned_at_iteration: Option<u32>,
    pub is_seed: bool,
}

impl Context {
    pub fn new(id: u64, document_id: u64, target_lemma: impl Into<String>, lemmas: Vec<String>) -> Self {
        Context {
            id,
            document_id,
            target_lemma: target_lemma.into(),
            lemmas,
            gold_sense: None,
            assigned_sense: None,
            assigned_at_iteration: None,
            is_seed: false,
        }
    }

    pub fn is_labeled(&self) -> bool {
        self.assigned_sense.is_some()
    }

    pub fn contains(&self, lemma: &str) -> bool {
        self.lemmas.iter().any(|l| l == lemma)
    }

    /// Records a label. Returns `false`, leaving the context untouched, when
    /// it already carries one: a label is never removed or replaced.
    pub fn assign(&mut self, sense: &str, iteration: u32) -> bool {
        if self.assigned_sense.is_some() {
            return false;
        }
        self.assigned_sense = Some(sense.to_string());
        self.assigned_at_iteration = Some(iteration);
        true
    }

    pub fn mark_seed(&mut self, sense: &str) -> Result<()> {
        if let Some(existing) = &self.assigned_sense {
            if existing != sense || !self.is_seed {
                return Err(Error::Seed(format!("context {} already labeled {existing}", self.id)));
            }
            return Ok(());
        }
        self.assign(sense, 0);
        self.is_seed = true;
        Ok(())
    }
}

fn is_edge_punct(c: char) -> bool {
    // U+0021-002F, U+003A-0040, U+005B-0060, U+007B-007E
    c.is_ascii_punctuation()
}

/// Lowercases and strips edge punctuation. Returns `None` when nothing is left.
pub fn normalize_raw_token(word: &str) -> Option<String> {
    let trimmed = word.trim_matches(is_edge_punct);
    if trimmed.is_empty() {
        None
    } else {
        Some(trimmed.to_lowercase())
    }
}

pub fn tokenize_raw(line: &str) -> Vec<Token> {
    line.split_whitespace()
        .filter_map(normalize_raw_token)
        .map(Token::raw)
        .collect()
}

/// Reads raw text, one document per line. Lines with fewer than
/// `min_line_words` whitespace-separated words are dropped; the count is
/// taken before punctuation stripping.
pub fn parse_raw_corpus<R: BufRead>(reader: R, min_line_words: usize) -> Result<Vec<Document>> {
    if min_line_words == 0 {
        return Err(Error::Contract("min_line_words must be at least 1".into()));
    }
    let mut docs = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.split_whitespace().count() < min_line_words {
            continue;
        }
        docs.push(Document {
            id: docs.len() as u64,
            sentences: vec![tokenize_raw(&line)],
        });
    }
    Ok(docs)
}

/// Reads the vertical tagged format.
///
/// Documents without any token are not emitted, so a leading `<doc>` marker
/// does not produce an empty document.
pub fn parse_tagged_corpus<R: BufRead>(reader: R) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    let mut sentences: Vec<Sentence> = Vec::new();
    let mut sentence: Sentence = Vec::new();

    fn close_doc(docs: &mut Vec<Document>, sentences: &mut Vec<Sentence>, sentence: &mut Sentence) {
        if !sentence.is_empty() {
            sentences.push(std::mem::take(sentence));
        }
        if !sentences.is_empty() {
            docs.push(Document {
                id: docs.len() as u64,
                sentences: std::mem::take(sentences),
            });
        }
    }

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            if !sentence.is_empty() {
                sentences.push(std::mem::take(&mut sentence));
            }
            continue;
        }
        if line == DOC_MARKER {
            close_doc(&mut docs, &mut sentences, &mut sentence);
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                "tagged corpus",
                idx + 1,
                format!("expected 3 tab-separated columns, found {}", fields.len()),
            ));
        }
        if fields[1].is_empty() {
            return Err(Error::parse("tagged corpus", idx + 1, "empty lemma"));
        }
        sentence.push(Token::new(fields[0], fields[1], fields[2]));
    }
    close_doc(&mut docs, &mut sentences, &mut sentence);
    Ok(docs)
}

/// Part-of-speech prefixes a token must match to count as a content word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContentFilter {
    prefixes: Vec<String>,
}

impl ContentFilter {
    pub fn new<I, S>(prefixes: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut prefixes: Vec<String> = prefixes.into_iter().map(Into::into).collect();
        prefixes.retain(|p| !p.is_empty());
        prefixes.sort();
        prefixes.dedup();
        if prefixes.is_empty() {
            return Err(Error::Config("content filter needs at least one tag prefix".into()));
        }
        Ok(ContentFilter { prefixes })
    }

    pub fn prefixes(&self) -> &[String] {
        &self.prefixes
    }

    pub fn keeps(&self, token: &Token) -> bool {
        token.is_raw() || self.prefixes.iter().any(|p| token.pos.starts_with(p.as_str()))
    }
}

impl Default for ContentFilter {
    fn default() -> Self {
        ContentFilter::new(DEFAULT_CONTENT_PREFIXES).expect("default prefixes are non-empty")
    }
}

pub fn filter_content_words(doc: &Document, filter: &ContentFilter) -> Document {
    Document {
        id: doc.id,
        sentences: doc
            .sentences
            .iter()
            .map(|s| s.iter().filter(|t| filter.keeps(t)).cloned().collect())
            .collect(),
    }
}

/// One context per sentence containing `target`, numbered in corpus order
/// from zero. Repeated target occurrences in a sentence yield one context.
pub fn extract_contexts(docs: &[Document], target: &str) -> Result<Vec<Context>> {
    if target.is_empty() {
        return Err(Error::Contract("target lemma is empty".into()));
    }
    let mut contexts = Vec::new();
    for doc in docs {
        for sentence in &doc.sentences {
            if !sentence.iter().any(|t| t.lemma == target) {
                continue;
            }
            let lemmas = sentence
                .iter()
                .filter(|t| t.lemma != target)
                .map(|t| t.lemma.clone())
                .collect();
            contexts.push(Context::new(contexts.len() as u64, doc.id, target, lemmas));
        }
    }
    Ok(contexts)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PseudoWordSpec {
    pub word_a: String,
    pub word_b: String,
    pub pseudo: String,
}

impl PseudoWordSpec {
    pub fn new(word_a: impl Into<String>, word_b: impl Into<String>, pseudo: impl Into<String>) -> Result<Self> {
        let spec = PseudoWordSpec {
            word_a: word_a.into(),
            word_b: word_b.into(),
            pseudo: pseudo.into(),
        };
        if spec.word_a.is_empty() || spec.word_b.is_empty() || spec.pseudo.is_empty() {
            return Err(Error::PseudoWord("words must be non-empty".into()));
        }
        if spec.word_a == spec.word_b {
            return Err(Error::PseudoWord(format!(
                "source words must differ (both are {:?})",
                spec.word_a
            )));
        }
        if spec.pseudo == spec.word_a || spec.pseudo == spec.word_b {
            return Err(Error::PseudoWord(format!(
                "pseudo-word {:?} equals a source word",
                spec.pseudo
            )));
        }
        Ok(spec)
    }

    /// The two sense ids of the pseudo-word: `word_a`, then `word_b`.
    pub fn senses(&self) -> [&str; 2] {
        [&self.word_a, &self.word_b]
    }
}

/// Output of [`make_pseudoword_corpus`].
///
/// Sentences containing the pseudo lemma are numbered in corpus order; that
/// ordinal is exactly the context id [`extract_contexts`] assigns when run
/// on `documents` with the pseudo lemma as target. `gold` maps those ids to
/// the replaced word; `ambiguous` lists the ids whose sentence held both
/// source words and therefore has no gold sense.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoCorpus {
    pub documents: Vec<Document>,
    pub gold: BTreeMap<u64, String>,
    pub ambiguous: Vec<u64>,
}

impl PseudoCorpus {
    pub fn pseudo_sentence_count(&self) -> usize {
        self.gold.len() + self.ambiguous.len()
    }
}

pub fn make_pseudoword_corpus(docs: &[Document], spec: &PseudoWordSpec) -> Result<PseudoCorpus> {
    let mut documents = Vec::with_capacity(docs.len());
    let mut gold = BTreeMap::new();
    let mut ambiguous = Vec::new();
    let mut ordinal = 0u64;

    for doc in docs {
        let mut sentences = Vec::with_capacity(doc.sentences.len());
        for sentence in &doc.sentences {
            let mut has_a = false;
            let mut has_b = false;
            let mut out = Vec::with_capacity(sentence.len());
            for token in sentence {
                if token.lemma == spec.pseudo {
                    return Err(Error::PseudoWord(format!(
                        "pseudo-word {:?} already occurs in the corpus (document {})",
                        spec.pseudo, doc.id
                    )));
                }
                let replaced = if token.lemma == spec.word_a {
                    has_a = true;
                    true
                } else if token.lemma == spec.word_b {
                    has_b = true;
                    true
                } else {
                    false
                };
                if replaced {
                    let surface = if token.is_raw() {
                        spec.pseudo.clone()
                    } else {
                        token.surface.clone()
                    };
                    out.push(Token::new(surface, spec.pseudo.clone(), token.pos.clone()));
                } else {
                    out.push(token.clone());
                }
            }
            if has_a || has_b {
                match (has_a, has_b) {
                    (true, true) => ambiguous.push(ordinal),
                    (true, false) => {
                        gold.insert(ordinal, spec.word_a.clone());
                    }
                    _ => {
                        gold.insert(ordinal, spec.word_b.clone());
                    }
                }
                ordinal += 1;
            }
            sentences.push(out);
        }
        documents.push(Document { id: doc.id, sentences });
    }

    Ok(PseudoCorpus {
        documents,
        gold,
        ambiguous,
    })
}
