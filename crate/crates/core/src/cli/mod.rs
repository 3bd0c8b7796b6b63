//! Command-line front end. Every subcommand reads treebank files, runs one
//! workflow and writes CSV reports headed by a [`Manifest`].
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for unreadable or
//! malformed data.

mod compare;
mod train;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::report::Manifest;
use crate::treebank::{read_forest_lines, read_trees, ParseTree};
use crate::weak_parser::ExternalLearner;

#[derive(Debug, Parser)]
#[command(name = "parse-ensemble", version, about = "Parser combination, bagging and boosting experiments")]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, env = "PARSE_ENSEMBLE_JOBS")]
    jobs: Option<usize>,
    /// Log progress to stderr; repeat for more detail.
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score a parser output file against a gold treebank.
    Eval(EvalArgs),
    /// Combine the parses of several parsers into one forest.
    Combine(CombineArgs),
    /// Pick one parser's output per sentence.
    Switch(SwitchArgs),
    /// Align two parser outputs constituent by constituent.
    Align(AlignArgs),
    /// Upper bounds for switching and hybridization.
    Oracle(OracleArgs),
    /// Train a bagged ensemble.
    Bag(BagArgs),
    /// Train a boosted ensemble.
    Boost(BoostArgs),
    /// Memorization check and boosting weight diagnostics.
    Diagnose(DiagnoseArgs),
    /// Boost the three-sample inconsistent dataset in exact arithmetic.
    Simulate(SimulateArgs),
    /// Train the built-in PCFG learner and write its model.
    PcfgTrain(PcfgTrainArgs),
    /// Parse one whitespace-tokenized sentence per line with a PCFG model.
    PcfgParse(PcfgParseArgs),
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    guess: PathBuf,
    #[arg(long)]
    gold: PathBuf,
    /// Score constituents as multisets instead of sets.
    #[arg(long)]
    multiset: bool,
    /// Write summary, per-label, per-parent and recall-error tables here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CombineArgs {
    /// vote, weighted, bayes or consensus.
    #[arg(long, default_value = "vote")]
    mode: String,
    /// Votes needed (vote) or maximum node cost (consensus).
    #[arg(long)]
    threshold: Option<f64>,
    /// Comma-separated per-parser weights for weighted voting.
    #[arg(long, value_delimiter = ',')]
    weights: Vec<f64>,
    /// Constituent distance for consensus.
    #[arg(long, default_value = "kronecker")]
    distance: String,
    #[command(flatten)]
    bayes: BayesArgs,
    /// Gold trees for the test sentences; fixes which tokens are punctuation.
    #[arg(long)]
    gold: Option<PathBuf>,
    /// Forest file to write; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Parser output files, one tree per line, blank lines for failures.
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct BayesArgs {
    /// Saved Bayes model to apply.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Gold trees of the Bayes training sentences.
    #[arg(long)]
    train_gold: Option<PathBuf>,
    /// Parser outputs on the training sentences, in parser order.
    #[arg(long)]
    train: Vec<PathBuf>,
    /// plain, coprediction or independent.
    #[arg(long, default_value = "plain")]
    kind: String,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Comma-separated contexts: tag, parenttag, clength, slength.
    #[arg(long, default_value = "")]
    contexts: String,
    /// Write the trained Bayes model here.
    #[arg(long)]
    save_model: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SwitchArgs {
    /// similarity, distance, penalized, align or bayes.
    #[arg(long, default_value = "similarity")]
    method: String,
    /// Constituent distance for the align method.
    #[arg(long, default_value = "kronecker")]
    distance: String,
    #[command(flatten)]
    bayes: BayesArgs,
    #[arg(long)]
    gold: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Per-sentence choices and scores as CSV.
    #[arg(long)]
    choices: Option<PathBuf>,
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct AlignArgs {
    left: PathBuf,
    right: PathBuf,
    #[arg(long, default_value = "kronecker")]
    distance: String,
    #[arg(long)]
    gold: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct LearnerArgs {
    /// Training treebank.
    #[arg(long)]
    corpus: PathBuf,
    /// `pcfg`, or `cmd:train=CMD;parse=CMD` for an external parser.
    #[arg(long, default_value = "pcfg")]
    learner: String,
    /// Initial sentence distribution: uniform, length, possibilities or inverse.
    #[arg(long, default_value = "uniform")]
    scheme: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Held-out treebank to score members and the ensemble on.
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BagArgs {
    #[command(flatten)]
    common: LearnerArgs,
    /// Number of bootstrap replicates.
    #[arg(long, short, default_value_t = 15)]
    k: usize,
}

#[derive(Debug, Args)]
struct BoostArgs {
    #[command(flatten)]
    common: LearnerArgs,
    /// Boosting iterations.
    #[arg(long = "iterations", short = 'T', default_value_t = 10)]
    iterations: usize,
    /// precision, recall, f or const-acc.
    #[arg(long, default_value = "const-acc")]
    alpha: String,
    /// Discard violating members and reset the distribution.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    backoff: bool,
    /// alpha or log-inv-alpha.
    #[arg(long, default_value = "alpha")]
    vote_weight: String,
}

#[derive(Debug, Args)]
struct DiagnoseArgs {
    /// Treebank to check for unlearnable samples.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long, default_value = "pcfg")]
    learner: String,
    /// Copies of each sample in its single-sentence training set.
    #[arg(long, default_value_t = 10)]
    replication: usize,
    /// A weights.csv from `boost`; switches to weight diagnostics.
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    bins: usize,
    #[arg(long, default_value_t = 20)]
    top: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 6)]
    iterations: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PcfgTrainArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    model: PathBuf,
}

#[derive(Debug, Args)]
struct PcfgParseArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return 1;
        }
        // Fails only if a pool already exists, as in repeated in-process runs.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let result = match cli.command {
        Command::Eval(a) => compare::eval(a),
        Command::Combine(a) => compare::combine(a),
        Command::Switch(a) => compare::switch(a),
        Command::Align(a) => compare::align(a),
        Command::Oracle(a) => compare::oracle(a),
        Command::Bag(a) => train::bag(a),
        Command::Boost(a) => train::boost(a),
        Command::Diagnose(a) => train::diagnose(a),
        Command::Simulate(a) => train::simulate(a),
        Command::PcfgTrain(a) => train::pcfg_train(a),
        Command::PcfgParse(a) => train::pcfg_parse(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) => 1,
        _ => 2,
    }
}

fn read_input(manifest: &mut Manifest, path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| with_path(e, path))?;
    manifest.input(path, &bytes);
    String::from_utf8(bytes).map_err(|_| Error::Parse {
        line: 0,
        message: format!("{} is not UTF-8", path.display()),
    })
}

fn with_path(e: std::io::Error, path: &Path) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn load_trees(manifest: &mut Manifest, path: &Path) -> Result<Vec<ParseTree>> {
    read_trees(&read_input(manifest, path)?).map_err(|e| in_file(e, path))
}

fn load_forest(manifest: &mut Manifest, path: &Path) -> Result<Vec<Option<ParseTree>>> {
    read_forest_lines(&read_input(manifest, path)?).map_err(|e| in_file(e, path))
}

fn in_file(e: Error, path: &Path) -> Error {
    match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    }
}

/// Writes to `path`, or to stdout when there is none.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| with_path(e, p)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| with_path(e, dir))
}

/// Writes the manifest next to a forest file, which cannot carry comments.
fn emit_forest(path: Option<&Path>, forest: &str, manifest: &Manifest) -> Result<()> {
    emit(path, forest)?;
    if let Some(p) = path {
        let mut sidecar = p.as_os_str().to_owned();
        sidecar.push(".manifest");
        manifest.write(Path::new(&sidecar), "")?;
    }
    Ok(())
}

enum LearnerChoice {
    Pcfg,
    External(ExternalLearner),
}

fn learner_choice(spec: &str) -> Result<LearnerChoice> {
    if spec == "pcfg" {
        Ok(LearnerChoice::Pcfg)
    } else if let Some(rest) = spec.strip_prefix("cmd:") {
        Ok(LearnerChoice::External(ExternalLearner::from_spec(rest)?))
    } else {
        Err(Error::InvalidArgument(format!(
            "learner must be pcfg or cmd:train=CMD;parse=CMD, got {spec:?}"
        )))
    }
}
