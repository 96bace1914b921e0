//! The `declist` command line: file-based pipeline stages sharing one
//! entry point, [`run`].

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use declist_core::cluster::{assignments_tsv, cluster_and_score, ClusterConfig};
use declist_core::corpus::{
    extract_contexts, filter_content_words, make_pseudoword_corpus, parse_raw_corpus, parse_tagged_corpus,
    ContentFilter, Document, PseudoWordSpec, DEFAULT_CONTENT_PREFIXES, DEFAULT_MIN_LINE_WORDS,
};
use declist_core::eval::{evaluate, read_gold, write_gold, SummaryRow};
use declist_core::io::{read_contexts, read_ids, write_contexts, write_ids, write_tagged_corpus};
use declist_core::learner::{
    apply_seeds, audit_label_events, read_seed_file, select_seeds, train, write_seed_file, ConfidenceMethod,
    DecisionList, IterationStats, LabelEvent, ModelHeader, Seed, SeedSelection, SenseInventory, ThresholdMode,
    TrainerConfig, DEFAULT_MAX_ITERATIONS, DEFAULT_SEEDS_PER_SENSE, DEFAULT_THRESHOLD,
};
use declist_core::lexicon::{
    build_lexicon, vectorize, Lexicon, DEFAULT_MIN_CONTEXT_COUNT, DEFAULT_PSEUDOWORD_MIN_CONTEXT_COUNT,
};
use declist_core::manifest::RunManifest;

#[derive(Parser)]
#[command(name = "declist", version, about = "Decision-list word sense disambiguation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract target contexts and build the lexicon.
    Ingest(IngestArgs),
    /// Conflate two words into a pseudo-word and record gold senses.
    Pseudoword(PseudowordArgs),
    /// Select seed contexts from gold senses.
    Seed(SeedArgs),
    /// Bootstrap a decision list from seeds.
    Train(TrainArgs),
    /// Score labels against gold with baseline and random comparators.
    Eval(EvalArgs),
    /// Cluster contexts with k-means and score against gold.
    Cluster(ClusterArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Raw,
    Tagged,
}

impl Format {
    fn as_str(self) -> &'static str {
        match self {
            Format::Raw => "raw",
            Format::Tagged => "tagged",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ThresholdModeArg {
    Fixed,
    Abney,
}

#[derive(Args)]
struct CorpusInput {
    /// Corpus file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "tagged")]
    format: Format,
    /// Raw lines with fewer whitespace tokens are dropped.
    #[arg(long, default_value_t = DEFAULT_MIN_LINE_WORDS)]
    min_line_words: usize,
}

#[derive(Args)]
struct IngestArgs {
    #[command(flatten)]
    corpus: CorpusInput,
    #[arg(long)]
    target: String,
    /// Sense inventory to validate and record.
    #[arg(long, value_delimiter = ',')]
    senses: Vec<String>,
    /// POS prefixes kept as content words (tagged input only).
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_CONTENT_PREFIXES.map(String::from))]
    content_prefixes: Vec<String>,
    /// Lexicon cutoff; defaults to 10, or 30 with --pseudoword-mode.
    #[arg(long)]
    min_lexicon_count: Option<u32>,
    #[arg(long)]
    pseudoword_mode: bool,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct PseudowordArgs {
    #[command(flatten)]
    corpus: CorpusInput,
    #[arg(long, visible_alias = "a")]
    word_a: String,
    #[arg(long, visible_alias = "b")]
    word_b: String,
    #[arg(long)]
    pseudo: String,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SeedArgs {
    #[arg(long)]
    contexts: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    senses: Vec<String>,
    /// Gold senses to draw seeds from.
    #[arg(long, conflicts_with = "manual")]
    gold: Option<PathBuf>,
    /// Hand-written seed file to validate instead.
    #[arg(long)]
    manual: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEEDS_PER_SENSE)]
    seeds_per_sense: usize,
    #[arg(long, default_value = "corpus-order")]
    seed_selection: SeedSelection,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    contexts: PathBuf,
    #[arg(long)]
    lexicon: PathBuf,
    /// Seed file written by `seed`.
    #[arg(long, required_unless_present = "gold", conflicts_with = "gold")]
    seeds: Option<PathBuf>,
    /// Gold senses to select seeds from in-process.
    #[arg(long)]
    gold: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', required = true)]
    senses: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_SEEDS_PER_SENSE)]
    seeds_per_sense: usize,
    #[arg(long, default_value = "corpus-order")]
    seed_selection: SeedSelection,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    #[arg(long, default_value = "restricted-ratio")]
    confidence: ConfidenceMethod,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    #[arg(long, value_enum, default_value = "fixed")]
    threshold_mode: ThresholdModeArg,
    #[arg(long, default_value_t = 1)]
    min_coverage: u32,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
    max_iterations: u32,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    /// Label event log written by `train`.
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    stats: PathBuf,
    #[arg(long)]
    gold: PathBuf,
    /// Context ids excluded from scoring.
    #[arg(long)]
    ambiguous: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    contexts: PathBuf,
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long)]
    gold: PathBuf,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 10)]
    top_lemmas: usize,
    #[arg(long, default_value_t = 300)]
    max_iterations: u32,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

/// A missing or unreadable input file.
#[derive(Debug)]
struct InputError(String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())).into())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use declist_core::Error;
    for cause in err.chain() {
        if cause.is::<InputError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Parse { .. } | Error::PseudoWord(_) | Error::Config(_) => 2,
                Error::Seed(_) | Error::InsufficientSeeds { .. } => 3,
                Error::GoldMismatch(_) => 4,
                _ => 1,
            };
        }
    }
    1
}

/// Collects outputs of one command and writes its manifest last.
struct Run {
    dir: PathBuf,
    manifest: RunManifest,
}

impl Run {
    fn new(command: &str, dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Run {
            dir: dir.to_path_buf(),
            manifest: RunManifest::new(command),
        })
    }

    fn input(&mut self, path: &Path) -> Result<()> {
        self.manifest
            .input(path)
            .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
        Ok(())
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.manifest.output(&path)?;
        Ok(path)
    }

    fn finish(self) -> Result<()> {
        let path = self.dir.join(format!("{}.manifest.json", self.manifest.command));
        self.manifest.write(&path)?;
        Ok(())
    }
}

fn read_corpus(args: &CorpusInput) -> Result<Vec<Document>> {
    let reader = open(&args.input)?;
    let docs = match args.format {
        Format::Raw => parse_raw_corpus(reader, args.min_line_words)?,
        Format::Tagged => parse_tagged_corpus(reader)?,
    };
    Ok(docs)
}

fn record_corpus(run: &mut Run, args: &CorpusInput) -> Result<()> {
    run.input(&args.input)?;
    run.manifest.param("format", args.format.as_str())?;
    run.manifest.param("min_line_words", args.min_line_words)?;
    Ok(())
}

fn inventory(target: &str, senses: &[String]) -> Result<SenseInventory> {
    Ok(SenseInventory::new(target, senses.iter().cloned())?)
}

fn selection_name(selection: SeedSelection) -> &'static str {
    match selection {
        SeedSelection::CorpusOrder => "corpus-order",
        SeedSelection::Random => "random",
    }
}

fn require_every_sense(seeds: &[Seed], inv: &SenseInventory) -> Result<()> {
    for sense in inv.senses() {
        if !seeds.iter().any(|s| &s.sense == sense) {
            return Err(declist_core::Error::Seed(format!("no seed for sense {sense}")).into());
        }
    }
    Ok(())
}

fn cmd_ingest(args: IngestArgs) -> Result<()> {
    let mut run = Run::new("ingest", &args.out_dir)?;
    record_corpus(&mut run, &args.corpus)?;
    let docs = read_corpus(&args.corpus)?;
    let filter = ContentFilter::new(&args.content_prefixes)?;
    let docs: Vec<Document> = docs.iter().map(|d| filter_content_words(d, &filter)).collect();
    let contexts = extract_contexts(&docs, &args.target)?;
    if contexts.is_empty() {
        return Err(InputError(format!("target {:?} does not occur in the corpus", args.target)).into());
    }
    if !args.senses.is_empty() {
        let inv = inventory(&args.target, &args.senses)?;
        run.manifest.param("senses", inv.senses())?;
    }
    let min_count = args.min_lexicon_count.unwrap_or(if args.pseudoword_mode {
        DEFAULT_PSEUDOWORD_MIN_CONTEXT_COUNT
    } else {
        DEFAULT_MIN_CONTEXT_COUNT
    });
    let lexicon = build_lexicon(&contexts, min_count)?;

    run.manifest.param("target", &args.target)?;
    run.manifest.param("content_prefixes", filter.prefixes())?;
    run.manifest.param("min_lexicon_count", min_count)?;
    run.write("contexts.tsv", &write_contexts(&args.target, &contexts))?;
    run.write("lexicon.tsv", &lexicon.to_tsv())?;
    eprintln!(
        "ingest: {} documents, {} contexts of {:?}, lexicon of {} lemmas (min count {min_count})",
        docs.len(),
        contexts.len(),
        args.target,
        lexicon.len()
    );
    run.finish()
}

fn cmd_pseudoword(args: PseudowordArgs) -> Result<()> {
    let mut run = Run::new("pseudoword", &args.out_dir)?;
    record_corpus(&mut run, &args.corpus)?;
    let spec = PseudoWordSpec::new(&args.word_a, &args.word_b, &args.pseudo)?;
    let docs = read_corpus(&args.corpus)?;
    let pseudo = make_pseudoword_corpus(&docs, &spec)?;

    run.manifest.param("word_a", &args.word_a)?;
    run.manifest.param("word_b", &args.word_b)?;
    run.manifest.param("pseudo", &args.pseudo)?;
    run.write("corpus.vert", &write_tagged_corpus(&pseudo.documents))?;
    run.write("gold.tsv", &write_gold(&pseudo.gold))?;
    run.write("ambiguous.tsv", &write_ids(&pseudo.ambiguous))?;
    if pseudo.pseudo_sentence_count() == 0 {
        eprintln!(
            "warning: neither {:?} nor {:?} occurs in the corpus; gold is empty",
            args.word_a, args.word_b
        );
    }
    let count = |w: &str| pseudo.gold.values().filter(|s| *s == w).count();
    eprintln!(
        "pseudoword: {} contexts ({} {}, {} {}), {} ambiguous",
        pseudo.pseudo_sentence_count(),
        count(&args.word_a),
        args.word_a,
        count(&args.word_b),
        args.word_b,
        pseudo.ambiguous.len()
    );
    run.finish()
}

fn cmd_seed(args: SeedArgs) -> Result<()> {
    let mut run = Run::new("seed", &args.out_dir)?;
    run.input(&args.contexts)?;
    let (target, mut contexts) = read_contexts(open(&args.contexts)?)?;
    let inv = inventory(&target, &args.senses)?;
    run.manifest.param("senses", inv.senses())?;

    let seeds = match (&args.gold, &args.manual) {
        (Some(gold_path), None) => {
            run.input(gold_path)?;
            let gold = read_gold(open(gold_path)?)?;
            run.manifest.param("seeds_per_sense", args.seeds_per_sense)?;
            run.manifest
                .param("seed_selection", selection_name(args.seed_selection))?;
            run.manifest.param("rng_seed", args.rng_seed)?;
            select_seeds(
                &contexts,
                &gold,
                &inv,
                args.seeds_per_sense,
                args.seed_selection,
                args.rng_seed,
            )?
        }
        (None, Some(manual)) => {
            run.input(manual)?;
            read_seed_file(open(manual)?)?
        }
        _ => return Err(InputError("give exactly one of --gold or --manual".into()).into()),
    };
    apply_seeds(&mut contexts, &seeds, &inv)?;
    require_every_sense(&seeds, &inv)?;
    run.write("seeds.tsv", &write_seed_file(&seeds))?;
    eprintln!("seed: {} seeds for {:?}", seeds.len(), target);
    run.finish()
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let mut run = Run::new("train", &args.out_dir)?;
    for p in [&args.contexts, &args.lexicon] {
        run.input(p)?;
    }
    let (target, mut contexts) = read_contexts(open(&args.contexts)?)?;
    let lexicon = Lexicon::read_tsv(open(&args.lexicon)?)?;
    let inv = inventory(&target, &args.senses)?;
    let seeds = match (&args.seeds, &args.gold) {
        (Some(path), _) => {
            run.input(path)?;
            read_seed_file(open(path)?)?
        }
        (None, Some(path)) => {
            run.input(path)?;
            let gold = read_gold(open(path)?)?;
            run.manifest.param("seeds_per_sense", args.seeds_per_sense)?;
            run.manifest
                .param("seed_selection", selection_name(args.seed_selection))?;
            run.manifest.param("rng_seed", args.rng_seed)?;
            select_seeds(
                &contexts,
                &gold,
                &inv,
                args.seeds_per_sense,
                args.seed_selection,
                args.rng_seed,
            )?
        }
        (None, None) => unreachable!("clap requires --seeds or --gold"),
    };
    apply_seeds(&mut contexts, &seeds, &inv)?;
    require_every_sense(&seeds, &inv)?;

    let config = TrainerConfig {
        confidence_method: args.confidence,
        threshold_mode: match args.threshold_mode {
            ThresholdModeArg::Fixed => ThresholdMode::Fixed(args.threshold),
            ThresholdModeArg::Abney => ThresholdMode::Abney,
        },
        min_coverage: args.min_coverage,
        max_iterations: args.max_iterations,
        ..TrainerConfig::default()
    };
    let result = train(&mut contexts, &lexicon, &inv, &config)?;
    audit_label_events(&result.events, &result.stats, &result.labels)
        .map_err(|e| anyhow::anyhow!("label audit failed: {e}"))?;

    run.manifest.param("senses", inv.senses())?;
    run.manifest.param("confidence", config.confidence_method.as_str())?;
    run.manifest.param("threshold", result.final_list.threshold)?;
    run.manifest.param(
        "threshold_mode",
        match args.threshold_mode {
            ThresholdModeArg::Fixed => "fixed",
            ThresholdModeArg::Abney => "abney",
        },
    )?;
    run.manifest.param("min_coverage", config.min_coverage)?;
    run.manifest.param("max_iterations", config.max_iterations)?;
    let header = ModelHeader::new(&inv, config.min_coverage);
    run.write("model.tsv", &result.final_list.to_model_tsv(&header))?;
    run.write("stats.tsv", &IterationStats::to_tsv(&result.stats))?;
    run.write("labels.tsv", &LabelEvent::to_tsv(&result.events))?;

    for s in &result.stats {
        eprintln!(
            "iteration {}: {} rules accepted of {} candidates, {} newly labeled, {} unlabeled",
            s.iteration, s.accepted, s.candidates, s.newly_labeled, s.unlabeled_total
        );
    }
    eprintln!(
        "train: {} after {} iterations, {} rules, residual {:.4}",
        if result.converged {
            "converged"
        } else {
            "stopped without converging"
        },
        result.iterations(),
        result.final_list.len(),
        result.residual_fraction
    );
    run.finish()
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let mut run = Run::new("eval", &args.out_dir)?;
    for p in [&args.model, &args.labels, &args.stats, &args.gold] {
        run.input(p)?;
    }
    let (header, list): (ModelHeader, DecisionList) = DecisionList::read_model(open(&args.model)?)?;
    let events = LabelEvent::read_tsv(open(&args.labels)?)?;
    let stats = IterationStats::read_tsv(open(&args.stats)?)?;
    let gold = read_gold(open(&args.gold)?)?;
    let excluded: BTreeSet<u64> = match &args.ambiguous {
        Some(p) => {
            run.input(p)?;
            read_ids(open(p)?)?.into_iter().collect()
        }
        None => BTreeSet::new(),
    };
    let labels = events.iter().map(|e| (e.context_id, e.sense.clone())).collect();
    audit_label_events(&events, &stats, &labels).map_err(|e| InputError(format!("label log: {e}")))?;
    let seeds: BTreeSet<u64> = events.iter().filter(|e| e.is_seed).map(|e| e.context_id).collect();
    let converged = stats.last().is_some_and(|s| s.newly_labeled == 0);
    let report = evaluate(&labels, &seeds, &gold, &excluded, &stats, converged, args.rng_seed)?;

    run.manifest.param("rng_seed", args.rng_seed)?;
    let run_id = run.manifest.run_id();
    let row = SummaryRow::new(run_id, &header, list.method.as_str(), list.threshold, &report);
    run.write("summary.tsv", &SummaryRow::to_tsv(&[row]))?;
    eprintln!(
        "eval: {} contexts, accuracy {:.4} on {:.4} decided, {:.4} with fallback, baseline {:.4}, random {:.4}",
        report.evaluated,
        report.accuracy_decided,
        report.decided_fraction,
        report.accuracy_overall_with_fallback,
        report.baseline_accuracy,
        report.random_accuracy
    );
    run.finish()
}

fn cmd_cluster(args: ClusterArgs) -> Result<()> {
    let mut run = Run::new("cluster", &args.out_dir)?;
    for p in [&args.contexts, &args.lexicon, &args.gold] {
        run.input(p)?;
    }
    let (_, contexts) = read_contexts(open(&args.contexts)?)?;
    let lexicon = Lexicon::read_tsv(open(&args.lexicon)?)?;
    let gold = read_gold(open(&args.gold)?)?;
    let known: BTreeSet<u64> = contexts.iter().map(|c| c.id).collect();
    if let Some(id) = gold.keys().find(|id| !known.contains(id)) {
        return Err(declist_core::Error::GoldMismatch(format!("gold context {id} is not in the contexts file")).into());
    }
    let vectors: Vec<_> = contexts.iter().map(|c| vectorize(c, &lexicon)).collect();
    let config = ClusterConfig {
        k: args.k,
        top_lemmas: args.top_lemmas,
        max_iterations: args.max_iterations,
        tolerance: args.tolerance,
        rng_seed: args.rng_seed,
    };
    let (ids, result, accuracy) = cluster_and_score(&vectors, lexicon.len(), &gold, &config)?;

    run.manifest.param("k", config.k)?;
    run.manifest.param("top_lemmas", config.top_lemmas)?;
    run.manifest.param("max_iterations", config.max_iterations)?;
    run.manifest.param("tolerance", config.tolerance)?;
    run.manifest.param("rng_seed", config.rng_seed)?;
    run.write("assignments.tsv", &assignments_tsv(&ids, &result.assignments))?;
    let objective: String = std::iter::once("iteration\tobjective\n".to_string())
        .chain(
            result
                .objective_history
                .iter()
                .enumerate()
                .map(|(i, o)| format!("{}\t{o}\n", i + 1)),
        )
        .collect();
    run.write("objective.tsv", &objective)?;
    run.write(
        "cluster_summary.tsv",
        &format!(
            "k\tcontexts\titerations\tconverged\tobjective\tcluster_accuracy\n{}\t{}\t{}\t{}\t{}\t{}\n",
            config.k,
            ids.len(),
            result.iterations,
            result.converged,
            result.objective(),
            accuracy
        ),
    )?;
    eprintln!(
        "cluster: {} contexts in {} clusters, {} iterations, accuracy {accuracy:.4}",
        ids.len(),
        config.k,
        result.iterations
    );
    run.finish()
}

/// Parses `args` (program name first) and runs one subcommand. Returns the
/// process exit code: 0 success, 2 input error, 3 seeding error, 4 gold
/// mismatch, 1 anything else.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return err.exit_code().clamp(0, 255) as u8;
        }
    };
    let outcome = match cli.command {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Pseudoword(a) => cmd_pseudoword(a),
        Command::Seed(a) => cmd_seed(a),
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Cluster(a) => cmd_cluster(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err:#}");
            exit_code(&err)
        }
    }
}
