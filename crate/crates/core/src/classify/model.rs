use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ClassifyError, ProbabilisticClassifier};
use crate::features::HANDCRAFTED_FEATURES;
use crate::Language;

const FORMAT: &str = "argmine-linear-model";
const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Task {
    Adu,
    ClaimPremise,
    Relation,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Adu => "adu",
            Task::ClaimPremise => "claim-premise",
            Task::Relation => "relation",
        }
    }

    /// Class names, negative class first.
    pub fn class_labels(self) -> [&'static str; 2] {
        match self {
            Task::Adu => ["non-argumentative", "argumentative"],
            Task::ClaimPremise => ["premise", "claim"],
            Task::Relation => ["support", "attack"],
        }
    }

    pub fn schema_kind(self) -> SchemaKind {
        match self {
            Task::Adu | Task::ClaimPremise => SchemaKind::Sentence,
            Task::Relation => SchemaKind::Relation,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "adu" => Ok(Task::Adu),
            "claim-premise" | "claim" => Ok(Task::ClaimPremise),
            "relation" => Ok(Task::Relation),
            other => Err(ClassifyError::UnknownTask(other.to_owned())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemaKind {
    /// Handcrafted sentence features followed by the sentence embedding.
    Sentence,
    /// Premise embedding, claim embedding and their difference.
    Relation,
}

/// Names the layout of a dense feature vector, e.g. `sentence-v1/50`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FeatureSchema {
    pub kind: SchemaKind,
    pub embedding_dimension: usize,
}

impl FeatureSchema {
    pub fn sentence(embedding_dimension: usize) -> Self {
        FeatureSchema {
            kind: SchemaKind::Sentence,
            embedding_dimension,
        }
    }

    pub fn relation(embedding_dimension: usize) -> Self {
        FeatureSchema {
            kind: SchemaKind::Relation,
            embedding_dimension,
        }
    }

    pub fn id(&self) -> String {
        let prefix = match self.kind {
            SchemaKind::Sentence => "sentence-v1",
            SchemaKind::Relation => "relation-v1",
        };
        format!("{prefix}/{}", self.embedding_dimension)
    }

    pub fn parse(id: &str) -> Option<Self> {
        let (prefix, dim) = id.split_once('/')?;
        let embedding_dimension = dim.parse().ok()?;
        let kind = match prefix {
            "sentence-v1" => SchemaKind::Sentence,
            "relation-v1" => SchemaKind::Relation,
            _ => return None,
        };
        Some(FeatureSchema {
            kind,
            embedding_dimension,
        })
    }

    pub fn dense_dimension(&self) -> usize {
        match self.kind {
            SchemaKind::Sentence => HANDCRAFTED_FEATURES + self.embedding_dimension,
            SchemaKind::Relation => 3 * self.embedding_dimension,
        }
    }
}

/// Two-class softmax regression.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    pub task: Task,
    /// One row per class, negative class first.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub feature_schema: String,
    pub language: Language,
}

impl LinearModel {
    pub fn zeros(task: Task, schema: FeatureSchema, language: Language) -> Self {
        let d = schema.dense_dimension();
        LinearModel {
            task,
            weights: vec![vec![0.0; d]; 2],
            bias: vec![0.0; 2],
            feature_schema: schema.id(),
            language,
        }
    }

    pub fn feature_dimension(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    pub fn logits(&self, x: &[f64]) -> Result<[f64; 2], ClassifyError> {
        if x.len() != self.feature_dimension() {
            return Err(ClassifyError::DimensionMismatch {
                expected: self.feature_dimension(),
                found: x.len(),
            });
        }
        let mut z = [0.0; 2];
        for (k, zk) in z.iter_mut().enumerate() {
            *zk = self.bias[k] + self.weights[k].iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
        Ok(z)
    }
}

pub(crate) fn softmax2(z: [f64; 2]) -> [f64; 2] {
    let m = z[0].max(z[1]);
    let e0 = (z[0] - m).exp();
    let e1 = (z[1] - m).exp();
    let s = e0 + e1;
    [e0 / s, e1 / s]
}

impl ProbabilisticClassifier for LinearModel {
    fn task(&self) -> Task {
        self.task
    }

    fn feature_schema(&self) -> &str {
        &self.feature_schema
    }

    fn predict_proba(&self, features: &[f64]) -> Result<[f64; 2], ClassifyError> {
        Ok(softmax2(self.logits(features)?))
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    task: String,
    language: Language,
    feature_schema: String,
    feature_dimension: usize,
    classes: Vec<String>,
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

impl LinearModel {
    pub fn to_json(&self) -> String {
        let file = ModelFile {
            format: FORMAT.into(),
            version: VERSION,
            task: self.task.as_str().into(),
            language: self.language,
            feature_schema: self.feature_schema.clone(),
            feature_dimension: self.feature_dimension(),
            classes: self.task.class_labels().iter().map(|s| s.to_string()).collect(),
            weights: self.weights.clone(),
            bias: self.bias.clone(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ClassifyError> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| ClassifyError::CorruptModel(e.to_string()))?;
        if file.format != FORMAT {
            return Err(ClassifyError::CorruptModel(format!("unexpected format tag {:?}", file.format)));
        }
        if file.version != VERSION {
            return Err(ClassifyError::UnsupportedVersion(file.version));
        }
        let task: Task = file.task.parse()?;
        let schema = FeatureSchema::parse(&file.feature_schema).ok_or_else(|| {
            ClassifyError::CorruptModel(format!("unknown feature schema {:?}", file.feature_schema))
        })?;
        if schema.kind != task.schema_kind() {
            return Err(ClassifyError::CorruptModel(format!(
                "schema {} does not fit task {task}",
                file.feature_schema
            )));
        }
        if file.feature_dimension != schema.dense_dimension() {
            return Err(ClassifyError::DimensionMismatch {
                expected: schema.dense_dimension(),
                found: file.feature_dimension,
            });
        }
        if file.weights.len() != 2 || file.bias.len() != 2 {
            return Err(ClassifyError::CorruptModel("expected two classes".into()));
        }
        for row in &file.weights {
            if row.len() != file.feature_dimension {
                return Err(ClassifyError::DimensionMismatch {
                    expected: file.feature_dimension,
                    found: row.len(),
                });
            }
        }
        if file.classes != task.class_labels() {
            return Err(ClassifyError::CorruptModel(format!("classes {:?} do not match task {task}", file.classes)));
        }
        Ok(LinearModel {
            task,
            weights: file.weights,
            bias: file.bias,
            feature_schema: file.feature_schema,
            language: file.language,
        })
    }
}

pub fn save_model(model: &LinearModel, path: &Path) -> Result<(), ClassifyError> {
    fs::write(path, model.to_json())?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<LinearModel, ClassifyError> {
    LinearModel::from_json(&fs::read_to_string(path)?)
}
