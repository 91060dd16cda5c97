//! Orchestration: resources, single-document runs and corpus evaluation.
//!
//! End-to-end runs segment the text, drop non-argumentative sentences,
//! label claims and premises, predict relations for every ordered pair,
//! choose a major claim and construct the graph. Preset runs take units,
//! roles and the major claim from a benchmark and only predict relations
//! and construct.

mod config;
mod corpus;
mod evaluate;
mod training;

use std::io::BufReader;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use thiserror::Error;

pub use config::{ConfigError, Mode, PipelineConfig};
pub use corpus::{load_benchmarks, load_corpus, read_benchmark, CorpusCase, CorpusError, CorpusLayout, CorpusStats};
pub use evaluate::{
    run_evaluation, run_evaluation_with, Aggregate, EvaluationError, EvaluationGrid, EvaluationReport, Failure, ReportRow,
};
pub use training::{read_training_data, TrainingData, TrainingError};

use crate::classify::{
    classify_adu, classify_claim_premise, AduLabel, ClaimLabel, ClassifyError, LinearModel, Task,
};
use crate::construct::{self, ConstructError, RelationMatrix};
use crate::features::{embed_text, extract_features, EmbeddingTable, FeatureError};
use crate::graph::{ArgumentGraph, NodeId};
use crate::lexicon::Lexicons;
use crate::majorclaim::{self, Adu, MajorClaimError, MajorClaimMethod};
use crate::metrics::RelationLookup;
use crate::segment::{preset_segments, PresetAdu, SegmentError, Segmenter};
use crate::{Language, Role};

const SAMPLE_VECTORS: &str = include_str!("../../data/sample/vectors.txt");
const SAMPLE_ADU_MODEL: &str = include_str!("../../data/sample/adu_model.json");
const SAMPLE_CLAIM_MODEL: &str = include_str!("../../data/sample/claim_model.json");
const SAMPLE_RELATION_MODEL: &str = include_str!("../../data/sample/relation_model.json");

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{context}: {source}")]
    Resource { context: String, source: Box<dyn std::error::Error + Send + Sync> },
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    MajorClaim(#[from] MajorClaimError),
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Segment(#[from] SegmentError),
    #[error("preset run needs a benchmark with a major claim")]
    PresetWithoutMajorClaim,
    #[error("model {path} is a {found} model, expected {expected}")]
    WrongTask { path: String, expected: Task, found: Task },
}

fn resource<E: std::error::Error + Send + Sync + 'static>(context: impl Into<String>) -> impl FnOnce(E) -> PipelineError {
    let context = context.into();
    move |e| PipelineError::Resource {
        context,
        source: Box::new(e),
    }
}

/// Read-only state shared by every run: vectors, models and lexicons.
#[derive(Debug)]
pub struct Resources {
    pub language: Language,
    pub lexicons: Lexicons,
    pub segmenter: Segmenter,
    pub vectors: EmbeddingTable,
    pub adu_model: LinearModel,
    pub claim_model: LinearModel,
    pub relation_model: LinearModel,
}

fn load_model_or(path: &Option<PathBuf>, bundled: &str, task: Task) -> Result<LinearModel, PipelineError> {
    let (model, name) = match path {
        Some(p) => (
            crate::classify::load_model(p).map_err(resource(format!("loading {}", p.display())))?,
            p.display().to_string(),
        ),
        None => (
            LinearModel::from_json(bundled).map_err(resource("bundled sample model"))?,
            format!("bundled {task} model"),
        ),
    };
    if model.task != task {
        return Err(PipelineError::WrongTask {
            path: name,
            expected: task,
            found: model.task,
        });
    }
    Ok(model)
}

impl Resources {
    /// Loads everything the config points to, falling back to the bundled
    /// sample vectors and models for unset paths.
    pub fn load(config: &PipelineConfig) -> Result<Self, PipelineError> {
        config.validate()?;
        let lexicons = Self::load_lexicons(config)?;
        let vectors = Self::load_vectors(config)?;
        Ok(Resources {
            language: config.language,
            segmenter: Segmenter::new(lexicons.abbreviations.clone()),
            lexicons,
            vectors,
            adu_model: load_model_or(&config.adu_model, SAMPLE_ADU_MODEL, Task::Adu)?,
            claim_model: load_model_or(&config.claim_model, SAMPLE_CLAIM_MODEL, Task::ClaimPremise)?,
            relation_model: load_model_or(&config.relation_model, SAMPLE_RELATION_MODEL, Task::Relation)?,
        })
    }

    /// The configured lexicon directory, or the built-in lists.
    pub fn load_lexicons(config: &PipelineConfig) -> Result<Lexicons, PipelineError> {
        match &config.lexicons {
            Some(dir) => Lexicons::load_dir(dir, config.language).map_err(resource(format!("loading {}", dir.display()))),
            None => Ok(Lexicons::builtin(config.language)),
        }
    }

    /// The configured word vectors, or the bundled sample table.
    pub fn load_vectors(config: &PipelineConfig) -> Result<EmbeddingTable, PipelineError> {
        match &config.vectors {
            Some(p) => crate::features::load_vectors(p, None).map_err(resource(format!("loading {}", p.display()))),
            None => EmbeddingTable::read(BufReader::new(SAMPLE_VECTORS.as_bytes()), None)
                .map_err(resource("bundled sample vectors")),
        }
    }
}

/// How often each stage has been entered, for checking which stages a mode
/// actually runs.
#[derive(Debug, Default)]
pub struct StageCounters {
    pub segment: AtomicUsize,
    pub classify_adu: AtomicUsize,
    pub classify_role: AtomicUsize,
    pub relations: AtomicUsize,
    pub major_claim: AtomicUsize,
    pub construct: AtomicUsize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StageCounts {
    pub segment: usize,
    pub classify_adu: usize,
    pub classify_role: usize,
    pub relations: usize,
    pub major_claim: usize,
    pub construct: usize,
}

impl StageCounters {
    fn bump(counter: &AtomicUsize) {
        counter.fetch_add(1, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> StageCounts {
        StageCounts {
            segment: self.segment.load(Ordering::Relaxed),
            classify_adu: self.classify_adu.load(Ordering::Relaxed),
            classify_role: self.classify_role.load(Ordering::Relaxed),
            relations: self.relations.load(Ordering::Relaxed),
            major_claim: self.major_claim.load(Ordering::Relaxed),
            construct: self.construct.load(Ordering::Relaxed),
        }
    }
}

/// A generated graph together with the relation predictions behind it.
#[derive(Clone, Debug)]
pub struct MinedGraph {
    pub graph: ArgumentGraph,
    pub relations: RelationLookup,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Graph(MinedGraph),
    /// Every sentence was classified as non-argumentative.
    NoArgumentFound { elapsed: Duration },
}

impl Outcome {
    pub fn graph(&self) -> Option<&ArgumentGraph> {
        match self {
            Outcome::Graph(m) => Some(&m.graph),
            Outcome::NoArgumentFound { .. } => None,
        }
    }

    pub fn elapsed(&self) -> Duration {
        match self {
            Outcome::Graph(m) => m.elapsed,
            Outcome::NoArgumentFound { elapsed } => *elapsed,
        }
    }
}

pub struct Pipeline {
    config: PipelineConfig,
    resources: Arc<Resources>,
    counters: StageCounters,
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Result<Self, PipelineError> {
        let resources = Arc::new(Resources::load(&config)?);
        Self::with_resources(config, resources)
    }

    /// Shares already loaded resources. Only the non-path settings of
    /// `config` take effect.
    pub fn with_resources(config: PipelineConfig, resources: Arc<Resources>) -> Result<Self, PipelineError> {
        let mut checked = config.clone();
        checked.vectors = None;
        checked.adu_model = None;
        checked.claim_model = None;
        checked.relation_model = None;
        checked.lexicons = None;
        checked.validate()?;
        Ok(Pipeline {
            config,
            resources,
            counters: StageCounters::default(),
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn resources(&self) -> &Arc<Resources> {
        &self.resources
    }

    pub fn counters(&self) -> StageCounts {
        self.counters.snapshot()
    }

    /// End-to-end run over raw text.
    pub fn mine_text(&self, text: &str) -> Result<Outcome, PipelineError> {
        let r = &*self.resources;
        let start = Instant::now();

        StageCounters::bump(&self.counters.segment);
        let sentences = r.segmenter.segment(text);
        let n = sentences.len();

        StageCounters::bump(&self.counters.classify_adu);
        let mut argumentative = Vec::new();
        for span in sentences {
            let features = extract_features(&span, n, &r.vectors, &r.lexicons);
            if classify_adu(&features, &r.adu_model)?.0 == AduLabel::Argumentative {
                argumentative.push((span, features));
            }
        }
        if argumentative.is_empty() {
            return Ok(Outcome::NoArgumentFound {
                elapsed: start.elapsed(),
            });
        }

        StageCounters::bump(&self.counters.classify_role);
        let mut adus = Vec::with_capacity(argumentative.len());
        for (span, features) in argumentative {
            let role = match classify_claim_premise(&features, &r.claim_model)?.0 {
                ClaimLabel::Claim => Role::Claim,
                ClaimLabel::Premise => Role::Premise,
            };
            let mut adu = Adu::new(span, role, features.embedding.clone());
            adu.features = Some(features);
            adus.push(adu);
        }

        StageCounters::bump(&self.counters.relations);
        let relations = RelationMatrix::predict(&adus, &r.relation_model, self.config.neutral_threshold)?;

        StageCounters::bump(&self.counters.major_claim);
        let chosen = match majorclaim::select(
            self.config.mc_method,
            &adus,
            &relations,
            self.config.probability_direction,
        ) {
            Ok(i) => i,
            // without any known word there is no geometry to compare
            Err(MajorClaimError::AllZeroEmbeddings) => majorclaim::select(
                MajorClaimMethod::First,
                &adus,
                &relations,
                self.config.probability_direction,
            )?,
            Err(e) => return Err(e.into()),
        };
        let mut major_claim = adus.remove(chosen);
        major_claim.role = Role::MajorClaim;

        self.finish(start, &major_claim, &adus, &relations)
    }

    /// Preset run: units, roles and the major claim are given, `major_claim`
    /// indexes into `units`.
    pub fn mine_preset(&self, units: &[PresetAdu], major_claim: usize) -> Result<Outcome, PipelineError> {
        let r = &*self.resources;
        let start = Instant::now();
        let spans = preset_segments(units)?;
        if major_claim >= spans.len() {
            return Err(PipelineError::PresetWithoutMajorClaim);
        }
        let mut adus: Vec<Adu> = spans
            .into_iter()
            .map(|(span, role)| {
                let embedding = embed_text(&span.text, &r.vectors).values;
                Adu::new(span, role, embedding)
            })
            .collect();
        adus[major_claim].role = Role::MajorClaim;

        StageCounters::bump(&self.counters.relations);
        let relations = RelationMatrix::predict(&adus, &r.relation_model, self.config.neutral_threshold)?;
        let mc = adus.remove(major_claim);
        self.finish(start, &mc, &adus, &relations)
    }

    /// Preset run over the I-nodes of a benchmark graph.
    pub fn mine_benchmark(&self, benchmark: &ArgumentGraph) -> Result<Outcome, PipelineError> {
        let (units, mc) = preset_units(benchmark)?;
        self.mine_preset(&units, mc)
    }

    /// Runs the configured mode; preset mode needs `benchmark`, end-to-end
    /// mode needs `text`.
    pub fn run(&self, text: Option<&str>, benchmark: Option<&ArgumentGraph>) -> Result<Outcome, PipelineError> {
        match (self.config.mode, text, benchmark) {
            (Mode::EndToEnd, Some(t), _) => self.mine_text(t),
            (Mode::PresetAdus, _, Some(b)) => self.mine_benchmark(b),
            (Mode::EndToEnd, None, _) => Err(PipelineError::Resource {
                context: "end-to-end run".into(),
                source: "no source text".into(),
            }),
            (Mode::PresetAdus, _, None) => Err(PipelineError::PresetWithoutMajorClaim),
        }
    }

    fn finish(
        &self,
        start: Instant,
        major_claim: &Adu,
        adus: &[Adu],
        relations: &RelationMatrix,
    ) -> Result<Outcome, PipelineError> {
        StageCounters::bump(&self.counters.construct);
        let c = construct::build(self.config.constructor, major_claim, adus, relations, &self.config.pairwise)?;
        let lookup = RelationLookup::new(&c, relations);
        Ok(Outcome::Graph(MinedGraph {
            graph: c.graph,
            relations: lookup,
            elapsed: start.elapsed(),
        }))
    }
}

/// Units of a benchmark graph in I-node order. An I-node that receives an
/// S-node is a claim, any other a premise; the major claim keeps its own
/// role.
pub fn preset_units(benchmark: &ArgumentGraph) -> Result<(Vec<PresetAdu>, usize), PipelineError> {
    let mc: &NodeId = benchmark.major_claim().ok_or(PipelineError::PresetWithoutMajorClaim)?;
    let mut units = Vec::with_capacity(benchmark.inodes().len());
    let mut mc_index = None;
    for (i, node) in benchmark.inodes().iter().enumerate() {
        let role = if &node.id == mc {
            mc_index = Some(i);
            Role::MajorClaim
        } else if benchmark.incoming(&node.id).next().is_some() {
            Role::Claim
        } else {
            Role::Premise
        };
        units.push(PresetAdu::new(node.text.clone(), role));
    }
    let mc_index = mc_index.ok_or(PipelineError::PresetWithoutMajorClaim)?;
    Ok((units, mc_index))
}
