use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use argmine::classify::{evaluate, fit_logistic, split_train_test, ModelMeta, Task, TrainConfig};
use argmine::construct::ConstructionMethod;
use argmine::graph::ArgumentGraph;
use argmine::majorclaim::MajorClaimMethod;
use argmine::pipeline::{
    load_corpus, read_training_data, ConfigError, CorpusLayout, CorpusStats, EvaluationGrid, Mode, Outcome,
    Pipeline, PipelineConfig, PipelineError, Resources,
};
use argmine::Language;

#[derive(Parser)]
#[command(name = "argmine", version, about = "Mine argument graphs from text and score them against benchmarks")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Versioned key = value config file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    lang: Option<Language>,
    /// Major-claim heuristic: first, centroid, pairwise, probability
    #[arg(long, global = true)]
    mc: Option<MajorClaimMethod>,
    /// Graph constructor: flat, position, pairwise
    #[arg(long, global = true)]
    construct: Option<ConstructionMethod>,
    /// Neutral threshold in [0.5, 1.0]
    #[arg(long, global = true)]
    threshold: Option<f64>,
    /// Take units, roles and the major claim from a benchmark graph
    #[arg(long, global = true)]
    preset_adus: bool,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    bound_factor: Option<f64>,
    #[arg(long, global = true)]
    max_iterations: Option<usize>,
    #[arg(long, global = true)]
    vectors: Option<PathBuf>,
    #[arg(long, global = true)]
    adu_model: Option<PathBuf>,
    #[arg(long, global = true)]
    claim_model: Option<PathBuf>,
    #[arg(long, global = true)]
    relation_model: Option<PathBuf>,
    #[arg(long, global = true)]
    lexicons: Option<PathBuf>,
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Mine a text file (or, with --preset-adus, a benchmark graph) and print AIF JSON
    Mine {
        input: PathBuf,
        /// Also write the graph as DOT to this file
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Write the JSON here instead of standard output
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Score a corpus of <id>.txt / <id>.json pairs
    Evaluate {
        corpus: PathBuf,
        /// aif (text plus benchmark) or plain (text only)
        #[arg(long, default_value = "aif")]
        layout: CorpusLayout,
        #[arg(long, value_enum, default_value = "csv")]
        format: ReportFormat,
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Comma-separated thresholds to sweep
        #[arg(long, value_delimiter = ',')]
        thresholds: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        mc_methods: Vec<MajorClaimMethod>,
        #[arg(long, value_delimiter = ',')]
        constructors: Vec<ConstructionMethod>,
        /// Comma-separated modes: end-to-end, preset
        #[arg(long, value_delimiter = ',')]
        modes: Vec<Mode>,
        /// Print grouped means to standard error
        #[arg(long)]
        summary: bool,
    },
    /// Train a classifier from a tab-separated file
    Train {
        /// adu, claim-premise or relation
        task: Task,
        data: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 300)]
        epochs: usize,
        #[arg(long, default_value_t = 1.0)]
        learning_rate: f64,
        #[arg(long, default_value_t = 1e-4)]
        l2: f64,
        /// Hold out this share of the data and report test scores
        #[arg(long)]
        holdout: Option<f64>,
    },
    /// Convert an AIF JSON graph to DOT
    Convert {
        graph: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print node and edge totals of a corpus
    Stats {
        corpus: PathBuf,
        #[arg(long, default_value = "aif")]
        layout: CorpusLayout,
    },
}

/// Failure with its exit code: 1 for usage problems, 2 for bad data.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: 1,
        message: message.to_string(),
    }
}

fn data(message: impl ToString) -> Failure {
    Failure {
        code: 2,
        message: message.to_string(),
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::MissingFile { .. } | ConfigError::Io { .. } => data(e),
            _ => usage(e),
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Config(c) => c.into(),
            other => data(other),
        }
    }
}

fn build_config(g: &GlobalArgs) -> Result<PipelineConfig, Failure> {
    let mut c = match &g.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(v) = g.lang {
        c.language = v;
    }
    if let Some(v) = g.mc {
        c.mc_method = v;
    }
    if let Some(v) = g.construct {
        c.constructor = v;
    }
    if let Some(v) = g.threshold {
        c.neutral_threshold = v;
    }
    if g.preset_adus {
        c.mode = Mode::PresetAdus;
    }
    if let Some(v) = g.seed {
        c.seed = v;
    }
    if let Some(v) = g.bound_factor {
        c.pairwise.bound_factor = v;
    }
    if let Some(v) = g.max_iterations {
        c.pairwise.max_iterations = v;
    }
    if let Some(v) = g.workers {
        c.workers = v;
    }
    let paths = [
        (&g.vectors, &mut c.vectors),
        (&g.adu_model, &mut c.adu_model),
        (&g.claim_model, &mut c.claim_model),
        (&g.relation_model, &mut c.relation_model),
        (&g.lexicons, &mut c.lexicons),
    ];
    for (flag, slot) in paths {
        if flag.is_some() {
            slot.clone_from(flag);
        }
    }
    c.validate()?;
    Ok(c)
}

fn emit(output: &Option<PathBuf>, bytes: &[u8]) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, bytes).map_err(|e| data(format!("writing {}: {e}", p.display()))),
        None => io::stdout()
            .write_all(bytes)
            .map_err(|e| data(format!("writing standard output: {e}"))),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| data(format!("reading {}: {e}", path.display())))
}

fn mine(config: PipelineConfig, input: &Path, dot: &Option<PathBuf>, output: &Option<PathBuf>) -> Result<(), Failure> {
    let pipeline = Pipeline::new(config)?;
    let bytes = read(input)?;
    let outcome = match pipeline.config().mode {
        Mode::EndToEnd => {
            let text = String::from_utf8(bytes).map_err(|_| data(format!("{} is not UTF-8", input.display())))?;
            pipeline.mine_text(&text)?
        }
        Mode::PresetAdus => {
            let bench = ArgumentGraph::from_aif_json(&bytes).map_err(|e| data(format!("{}: {e}", input.display())))?;
            pipeline.mine_benchmark(&bench)?
        }
    };
    match outcome {
        Outcome::NoArgumentFound { elapsed } => {
            eprintln!("no argument found ({:.3} s)", elapsed.as_secs_f64());
            Err(Failure {
                code: 2,
                message: "every sentence was classified as non-argumentative".into(),
            })
        }
        Outcome::Graph(m) => {
            emit(output, &m.graph.to_aif_json())?;
            if let Some(path) = dot {
                let text = m.graph.to_dot().map_err(data)?;
                fs::write(path, text).map_err(|e| data(format!("writing {}: {e}", path.display())))?;
            }
            eprintln!(
                "{} I-nodes, {} S-nodes, processed in {:.3} s",
                m.graph.inodes().len(),
                m.graph.snodes().len(),
                m.elapsed.as_secs_f64()
            );
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn evaluate_corpus(
    config: PipelineConfig,
    corpus: &Path,
    layout: CorpusLayout,
    format: ReportFormat,
    output: &Option<PathBuf>,
    thresholds: Vec<f64>,
    mc_methods: Vec<MajorClaimMethod>,
    constructors: Vec<ConstructionMethod>,
    modes: Vec<Mode>,
    summary: bool,
) -> Result<(), Failure> {
    let cases = load_corpus(corpus, layout).map_err(data)?;
    let mut grid = EvaluationGrid::single(&config);
    if !thresholds.is_empty() {
        if let Some(t) = thresholds.iter().find(|t| !(0.5..=1.0).contains(*t)) {
            return Err(usage(format!("threshold {t} outside [0.5, 1.0]")));
        }
        grid.thresholds = thresholds;
    }
    if !mc_methods.is_empty() {
        grid.mc_methods = mc_methods;
    }
    if !constructors.is_empty() {
        grid.constructors = constructors;
    }
    if !modes.is_empty() {
        grid.modes = modes;
    }
    let report = argmine::pipeline::run_evaluation(&cases, &config, &grid).map_err(|e| match e {
        argmine::pipeline::EvaluationError::Pipeline(p) => Failure::from(p),
        other => data(other),
    })?;
    for f in &report.failures {
        eprintln!("{}: {}", f.case_id, f.message);
    }
    let bytes = match format {
        ReportFormat::Json => report.to_json().into_bytes(),
        ReportFormat::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf).map_err(data)?;
            buf
        }
    };
    emit(output, &bytes)?;
    if summary {
        eprint!("{}", report.summary());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn train(
    config: PipelineConfig,
    task: Task,
    path: &Path,
    output: &Option<PathBuf>,
    epochs: usize,
    learning_rate: f64,
    l2: f64,
    holdout: Option<f64>,
) -> Result<(), Failure> {
    let vectors = Resources::load_vectors(&config)?;
    let lexicons = Resources::load_lexicons(&config)?;
    let file = fs::File::open(path).map_err(|e| data(format!("reading {}: {e}", path.display())))?;
    let d = read_training_data(io::BufReader::new(file), task, &vectors, &lexicons).map_err(data)?;
    let examples: Vec<(Vec<f64>, usize)> = d.features.into_iter().zip(d.labels).collect();
    let (train_set, test_set) = match holdout {
        Some(r) => {
            let (train, test) = split_train_test(&examples, 1.0 - r, config.seed).map_err(usage)?;
            (train, Some(test))
        }
        None => (examples, None),
    };
    let (xs, ys): (Vec<Vec<f64>>, Vec<usize>) = train_set.iter().cloned().unzip();
    let meta = ModelMeta {
        task,
        language: config.language,
        schema: d.schema,
    };
    let cfg = TrainConfig {
        learning_rate,
        l2,
        epochs,
        seed: config.seed,
    };
    let fit = fit_logistic(meta, &xs, &ys, &cfg).map_err(data)?;
    let train_stats = evaluate(&fit.model, &train_set).map_err(data)?;
    eprintln!(
        "{} examples, final loss {:.4}, training accuracy {:.3}, F1 {:.3}",
        xs.len(),
        fit.loss_history.last().copied().unwrap_or(f64::NAN),
        train_stats.accuracy,
        train_stats.f1
    );
    if let Some(test) = test_set {
        let s = evaluate(&fit.model, &test).map_err(data)?;
        eprintln!(
            "held out {}: accuracy {:.3}, precision {:.3}, recall {:.3}, F1 {:.3}",
            test.len(),
            s.accuracy,
            s.precision,
            s.recall,
            s.f1
        );
    }
    emit(output, fit.model.to_json().as_bytes())
}

fn convert(path: &Path, output: &Option<PathBuf>) -> Result<(), Failure> {
    let g = ArgumentGraph::from_aif_json(&read(path)?).map_err(|e| data(format!("{}: {e}", path.display())))?;
    let dot = g.to_dot().map_err(data)?;
    emit(output, dot.as_bytes())
}

fn stats(corpus: &Path, layout: CorpusLayout) -> Result<(), Failure> {
    let cases = load_corpus(corpus, layout).map_err(data)?;
    let s = CorpusStats::of(&cases);
    let missing = cases.iter().filter(|c| c.missing_benchmark).count();
    println!(
        "cases {}\nbenchmarks {}\nmissing benchmarks {}\ninodes {}\nsnodes {}\nedges {}",
        s.cases, s.benchmarks, missing, s.inodes, s.snodes, s.edges
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = build_config(&cli.global)?;
    match cli.command {
        Command::Mine { input, dot, output } => mine(config, &input, &dot, &output),
        Command::Evaluate {
            corpus,
            layout,
            format,
            output,
            thresholds,
            mc_methods,
            constructors,
            modes,
            summary,
        } => evaluate_corpus(
            config,
            &corpus,
            layout,
            format,
            &output,
            thresholds,
            mc_methods,
            constructors,
            modes,
            summary,
        ),
        Command::Train {
            task,
            data,
            output,
            epochs,
            learning_rate,
            l2,
            holdout,
        } => train(config, task, &data, &output, epochs, learning_rate, l2, holdout),
        Command::Convert { graph, output } => convert(&graph, &output),
        Command::Stats { corpus, layout } => stats(&corpus, layout),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("argmine: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
