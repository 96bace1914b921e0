//! Python bindings for the declist toolkit.

use std::collections::{BTreeMap, BTreeSet};

use declist_core::cluster::{self, ClusterConfig};
use declist_core::corpus::{self, ContentFilter, Context, Document, PseudoWordSpec, DEFAULT_MIN_LINE_WORDS};
use declist_core::eval;
use declist_core::learner::{
    self, apply_seeds, seed_labels, ConfidenceMethod, IterationStats, LabelEvent, ModelHeader, Seed, SeedSelection,
    SenseInventory, ThresholdMode, TrainerConfig,
};
use declist_core::lexicon;
use declist_core::synth::{PlantedSpec, TopicalSpec};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(declist, DeclistError, PyValueError);

fn err(e: declist_core::Error) -> PyErr {
    DeclistError::new_err(e.to_string())
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for declist_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(err)
    }
}

fn parse_method(name: &str) -> PyResult<ConfidenceMethod> {
    name.parse().py()
}

/// Confidence of a rule from its counts.
#[pyfunction]
#[pyo3(signature = (f_joint, f_labeled, f_total, method = "restricted-ratio"))]
fn confidence(f_joint: u32, f_labeled: u32, f_total: u32, method: &str) -> PyResult<f64> {
    learner::confidence(f_joint, f_labeled, f_total, parse_method(method)?).py()
}

/// Occurrence of the target in one sentence.
#[pyclass(name = "Context", skip_from_py_object)]
#[derive(Clone)]
struct PyContext {
    inner: Context,
}

#[pymethods]
impl PyContext {
    #[new]
    #[pyo3(signature = (id, lemmas, target = "target", document_id = None, gold_sense = None))]
    fn new(id: u64, lemmas: Vec<String>, target: &str, document_id: Option<u64>, gold_sense: Option<String>) -> Self {
        let mut inner = Context::new(id, document_id.unwrap_or(id), target, lemmas);
        inner.gold_sense = gold_sense;
        PyContext { inner }
    }

    #[getter]
    fn id(&self) -> u64 {
        self.inner.id
    }

    #[getter]
    fn document_id(&self) -> u64 {
        self.inner.document_id
    }

    #[getter]
    fn target(&self) -> &str {
        &self.inner.target_lemma
    }

    #[getter]
    fn lemmas(&self) -> Vec<String> {
        self.inner.lemmas.clone()
    }

    #[getter]
    fn gold_sense(&self) -> Option<String> {
        self.inner.gold_sense.clone()
    }

    #[getter]
    fn assigned_sense(&self) -> Option<String> {
        self.inner.assigned_sense.clone()
    }

    #[getter]
    fn is_seed(&self) -> bool {
        self.inner.is_seed
    }

    fn __repr__(&self) -> String {
        format!("Context(id={}, lemmas={:?})", self.inner.id, self.inner.lemmas)
    }
}

fn unwrap_contexts(contexts: &[PyRef<'_, PyContext>]) -> Vec<Context> {
    contexts.iter().map(|c| c.inner.clone()).collect()
}

fn wrap_contexts(contexts: Vec<Context>) -> Vec<PyContext> {
    contexts.into_iter().map(|inner| PyContext { inner }).collect()
}

/// Documents of tokenized sentences.
#[pyclass(name = "Corpus", skip_from_py_object)]
struct PyCorpus {
    docs: Vec<Document>,
}

#[pymethods]
impl PyCorpus {
    /// One document per line of running text.
    #[staticmethod]
    #[pyo3(signature = (text, min_line_words = DEFAULT_MIN_LINE_WORDS))]
    fn from_raw(text: &str, min_line_words: usize) -> PyResult<Self> {
        Ok(PyCorpus {
            docs: corpus::parse_raw_corpus(text.as_bytes(), min_line_words).py()?,
        })
    }

    /// Vertical `surface<TAB>lemma<TAB>pos` text.
    #[staticmethod]
    fn from_tagged(text: &str) -> PyResult<Self> {
        Ok(PyCorpus {
            docs: corpus::parse_tagged_corpus(text.as_bytes()).py()?,
        })
    }

    #[getter]
    fn document_count(&self) -> usize {
        self.docs.len()
    }

    #[getter]
    fn token_count(&self) -> usize {
        self.docs.iter().map(Document::token_count).sum()
    }

    /// Keeps tokens whose POS starts with one of `prefixes`.
    #[pyo3(signature = (prefixes = None))]
    fn filter_content(&self, prefixes: Option<Vec<String>>) -> PyResult<Self> {
        let filter = match prefixes {
            Some(p) => ContentFilter::new(p).py()?,
            None => ContentFilter::default(),
        };
        Ok(PyCorpus {
            docs: self
                .docs
                .iter()
                .map(|d| corpus::filter_content_words(d, &filter))
                .collect(),
        })
    }

    fn to_tagged(&self) -> String {
        declist_core::io::write_tagged_corpus(&self.docs)
    }

    /// Replaces both words by `pseudo`. Returns the new corpus, the gold
    /// senses by context id and the ids of ambiguous contexts.
    fn make_pseudoword(
        &self,
        word_a: &str,
        word_b: &str,
        pseudo: &str,
    ) -> PyResult<(Self, BTreeMap<u64, String>, Vec<u64>)> {
        let spec = PseudoWordSpec::new(word_a, word_b, pseudo).py()?;
        let out = corpus::make_pseudoword_corpus(&self.docs, &spec).py()?;
        Ok((PyCorpus { docs: out.documents }, out.gold, out.ambiguous))
    }

    fn contexts(&self, target: &str) -> PyResult<Vec<PyContext>> {
        Ok(wrap_contexts(corpus::extract_contexts(&self.docs, target).py()?))
    }
}

/// Lemmas occurring in at least `min_context_count` contexts.
#[pyclass(name = "Lexicon", skip_from_py_object)]
struct PyLexicon {
    inner: lexicon::Lexicon,
}

#[pymethods]
impl PyLexicon {
    #[new]
    #[pyo3(signature = (contexts, min_context_count = lexicon::DEFAULT_MIN_CONTEXT_COUNT))]
    fn new(contexts: Vec<PyRef<'_, PyContext>>, min_context_count: u32) -> PyResult<Self> {
        let contexts = unwrap_contexts(&contexts);
        Ok(PyLexicon {
            inner: lexicon::build_lexicon(&contexts, min_context_count).py()?,
        })
    }

    #[staticmethod]
    fn from_tsv(text: &str) -> PyResult<Self> {
        Ok(PyLexicon {
            inner: lexicon::Lexicon::read_tsv(text.as_bytes()).py()?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, lemma: &str) -> bool {
        self.inner.contains(lemma)
    }

    fn entries(&self) -> Vec<(String, u32)> {
        self.inner
            .entries()
            .iter()
            .map(|e| (e.lemma.clone(), e.context_count))
            .collect()
    }

    fn to_tsv(&self) -> String {
        self.inner.to_tsv()
    }

    /// Sparse count vector `{dimension: count}`.
    fn vectorize(&self, context: PyRef<'_, PyContext>) -> BTreeMap<usize, u32> {
        lexicon::vectorize(&context.inner, &self.inner).counts
    }
}

/// Outcome of a bootstrap run.
#[pyclass(name = "TrainResult", skip_from_py_object)]
struct PyTrainResult {
    inner: learner::TrainResult,
    header: ModelHeader,
    contexts: Vec<Context>,
}

#[pymethods]
impl PyTrainResult {
    #[getter]
    fn labels(&self) -> BTreeMap<u64, String> {
        self.inner.labels.clone()
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    #[getter]
    fn converged_at(&self) -> u32 {
        self.inner.converged_at
    }

    #[getter]
    fn iterations(&self) -> u32 {
        self.inner.iterations()
    }

    #[getter]
    fn residual_fraction(&self) -> f64 {
        self.inner.residual_fraction
    }

    #[getter]
    fn seed_ids(&self) -> Vec<u64> {
        self.inner.seeds().map(|e| e.context_id).collect()
    }

    #[getter]
    fn contexts(&self) -> Vec<PyContext> {
        wrap_contexts(self.contexts.clone())
    }

    /// `(evidence, sense, confidence, coverage, learned_at_iteration)` in
    /// list order.
    fn rules(&self) -> Vec<(String, String, f64, u32, u32)> {
        self.inner
            .final_list
            .rules
            .iter()
            .map(|r| {
                (
                    r.evidence.clone(),
                    r.sense.clone(),
                    r.confidence,
                    r.coverage,
                    r.learned_at_iteration,
                )
            })
            .collect()
    }

    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner
            .stats
            .iter()
            .map(|s| {
                let d = PyDict::new(py);
                d.set_item("iteration", s.iteration)?;
                d.set_item("candidates", s.candidates)?;
                d.set_item("accepted", s.accepted)?;
                d.set_item("rejected_confidence", s.rejected_confidence)?;
                d.set_item("rejected_coverage", s.rejected_coverage)?;
                d.set_item("newly_labeled", s.newly_labeled)?;
                d.set_item("labeled_total", s.labeled_total)?;
                d.set_item("unlabeled_total", s.unlabeled_total)?;
                Ok(d)
            })
            .collect()
    }

    fn model_tsv(&self) -> String {
        self.inner.final_list.to_model_tsv(&self.header)
    }

    fn stats_tsv(&self) -> String {
        IterationStats::to_tsv(&self.inner.stats)
    }

    fn events_tsv(&self) -> String {
        LabelEvent::to_tsv(&self.inner.events)
    }

    /// Replays the label log; raises if any label changed.
    fn audit(&self) -> PyResult<()> {
        learner::audit_label_events(&self.inner.events, &self.inner.stats, &self.inner.labels)
            .map_err(DeclistError::new_err)
    }

    /// Scores against gold, seeds excluded, with baseline and random
    /// comparators.
    #[pyo3(signature = (gold, excluded = None, rng_seed = 0))]
    fn evaluate<'py>(
        &self,
        py: Python<'py>,
        gold: BTreeMap<u64, String>,
        excluded: Option<BTreeSet<u64>>,
        rng_seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let r = eval::evaluate_result(&self.inner, &gold, &excluded.unwrap_or_default(), rng_seed).py()?;
        let d = PyDict::new(py);
        d.set_item("majority_sense", r.majority_sense)?;
        d.set_item("majority_fraction", r.majority_fraction)?;
        d.set_item("accuracy_decided", r.accuracy_decided)?;
        d.set_item("decided_fraction", r.decided_fraction)?;
        d.set_item("accuracy_overall_with_fallback", r.accuracy_overall_with_fallback)?;
        d.set_item("residual_fraction", r.residual_fraction)?;
        d.set_item("baseline_accuracy", r.baseline_accuracy)?;
        d.set_item("random_accuracy", r.random_accuracy)?;
        d.set_item("evaluated", r.evaluated)?;
        Ok(d)
    }
}

/// Bootstraps a decision list. Seeds come from `seeds` (`{id: sense}`) or
/// are selected from `gold`.
#[pyfunction]
#[pyo3(signature = (
    contexts, lexicon, senses, *, gold = None, seeds = None, confidence = "restricted-ratio",
    threshold = learner::DEFAULT_THRESHOLD, threshold_mode = "fixed", min_coverage = 1,
    seeds_per_sense = learner::DEFAULT_SEEDS_PER_SENSE, max_iterations = learner::DEFAULT_MAX_ITERATIONS,
    rng_seed = 0, seed_selection = "corpus-order",
))]
#[allow(clippy::too_many_arguments)]
fn train(
    contexts: Vec<PyRef<'_, PyContext>>,
    lexicon: PyRef<'_, PyLexicon>,
    senses: Vec<String>,
    gold: Option<BTreeMap<u64, String>>,
    seeds: Option<BTreeMap<u64, String>>,
    confidence: &str,
    threshold: f64,
    threshold_mode: &str,
    min_coverage: u32,
    seeds_per_sense: usize,
    max_iterations: u32,
    rng_seed: u64,
    seed_selection: &str,
) -> PyResult<PyTrainResult> {
    let mut contexts = unwrap_contexts(&contexts);
    let target = contexts.first().map(|c| c.target_lemma.clone()).unwrap_or_default();
    let inventory = SenseInventory::new(target, senses).py()?;
    let config = TrainerConfig {
        confidence_method: parse_method(confidence)?,
        threshold_mode: match threshold_mode {
            "fixed" => ThresholdMode::Fixed(threshold),
            "abney" => ThresholdMode::Abney,
            other => return Err(DeclistError::new_err(format!("unknown threshold mode {other:?}"))),
        },
        min_coverage,
        seeds_per_sense,
        max_iterations,
        rng_seed,
        seed_selection: seed_selection.parse::<SeedSelection>().py()?,
    };
    match (seeds, gold) {
        (Some(seeds), _) => {
            let seeds: Vec<Seed> = seeds
                .into_iter()
                .map(|(context_id, sense)| Seed { context_id, sense })
                .collect();
            apply_seeds(&mut contexts, &seeds, &inventory).py()?;
        }
        (None, Some(gold)) => {
            seed_labels(&mut contexts, &inventory, &config, &gold).py()?;
        }
        (None, None) => return Err(DeclistError::new_err("pass seeds or gold")),
    }
    let inner = learner::train(&mut contexts, &lexicon.inner, &inventory, &config).py()?;
    Ok(PyTrainResult {
        inner,
        header: ModelHeader::new(&inventory, min_coverage),
        contexts,
    })
}

/// `(majority_sense, k)`; predicting the majority sense scores exactly `k`.
#[pyfunction]
fn baseline(gold: Vec<String>) -> PyResult<(String, f64)> {
    eval::majority(&gold).py()
}

/// Predictions drawn from the gold sense distribution, and their accuracy.
#[pyfunction]
#[pyo3(signature = (gold, rng_seed = 0))]
fn random_baseline(gold: Vec<String>, rng_seed: u64) -> PyResult<(Vec<String>, f64)> {
    eval::random_predict(&gold, rng_seed).py()
}

/// Lloyd's k-means with farthest-point initialization.
#[pyfunction]
#[pyo3(signature = (points, k = 2, max_iterations = 300, tolerance = 1e-9, rng_seed = 0))]
fn kmeans<'py>(
    py: Python<'py>,
    points: Vec<Vec<f64>>,
    k: usize,
    max_iterations: u32,
    tolerance: f64,
    rng_seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let config = ClusterConfig {
        k,
        max_iterations,
        tolerance,
        rng_seed,
        ..ClusterConfig::default()
    };
    let r = cluster::kmeans(&points, &config).py()?;
    let d = PyDict::new(py);
    d.set_item("assignments", r.assignments)?;
    d.set_item("centroids", r.centroids)?;
    d.set_item("objective_history", r.objective_history)?;
    d.set_item("iterations", r.iterations)?;
    d.set_item("converged", r.converged)?;
    Ok(d)
}

/// Accuracy under the best one-to-one mapping of clusters to senses.
#[pyfunction]
fn cluster_accuracy(assignments: Vec<usize>, gold: Vec<String>) -> PyResult<f64> {
    cluster::cluster_accuracy(&assignments, &gold).py()
}

/// Two-sense contexts with disjoint indicator vocabularies. Returns the
/// shuffled contexts and their gold senses.
#[pyfunction]
#[pyo3(signature = (contexts_per_sense = 100, indicators_per_context = 3, rng_seed = 1))]
fn planted_corpus(
    contexts_per_sense: usize,
    indicators_per_context: usize,
    rng_seed: u64,
) -> (Vec<PyContext>, BTreeMap<u64, String>) {
    let spec = PlantedSpec {
        contexts_per_sense,
        indicators_per_context,
        rng_seed,
        ..PlantedSpec::default()
    };
    let p = spec.generate();
    (wrap_contexts(p.contexts), p.gold)
}

/// Raw running text over two topics, one source word each.
#[pyfunction]
#[pyo3(signature = (documents = 2000, rng_seed = 7))]
fn topical_text(documents: usize, rng_seed: u64) -> String {
    TopicalSpec {
        documents,
        rng_seed,
        ..TopicalSpec::default()
    }
    .generate()
}

#[pymodule]
fn declist(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DeclistError", m.py().get_type::<DeclistError>())?;
    m.add("__version__", declist_core::manifest::TOOLKIT_VERSION)?;
    m.add_class::<PyContext>()?;
    m.add_class::<PyCorpus>()?;
    m.add_class::<PyLexicon>()?;
    m.add_class::<PyTrainResult>()?;
    m.add_function(wrap_pyfunction!(confidence, m)?)?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    m.add_function(wrap_pyfunction!(baseline, m)?)?;
    m.add_function(wrap_pyfunction!(random_baseline, m)?)?;
    m.add_function(wrap_pyfunction!(kmeans, m)?)?;
    m.add_function(wrap_pyfunction!(cluster_accuracy, m)?)?;
    m.add_function(wrap_pyfunction!(planted_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(topical_text, m)?)?;
    Ok(())
}
