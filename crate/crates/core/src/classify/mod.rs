//! Binary classifiers for the three pipeline decisions:
//! argumentative vs. non-argumentative sentences, claims vs. premises, and
//! support vs. attack between two units.
//!
//! Every classifier sits behind [`ProbabilisticClassifier`]. The shipped
//! implementation is a two-class softmax regression ([`LinearModel`]); class
//! index 0 is always the negative class (non-argumentative, premise,
//! support) and wins ties at exactly 0.5.

mod eval;
mod model;
mod train;

use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::FeatureVector;
use crate::graph::Stance;

pub use eval::{evaluate, evaluate_predictions, split_train_test, stratified_folds, Confusion, EvalStats};
pub use model::{load_model, save_model, FeatureSchema, LinearModel, SchemaKind, Task};
pub use train::{fit_logistic, train_logistic, Fit, LogisticObjective, ModelMeta, TrainConfig};

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("feature schema mismatch: model expects {expected}, input is {found}")]
    SchemaMismatch { expected: String, found: String },
    #[error("model was trained for task {found}, not {expected}")]
    TaskMismatch { expected: Task, found: Task },
    #[error("feature dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("neutral threshold {0} outside [0.5, 1.0]")]
    ThresholdOutOfRange(f64),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("training data contains a single class")]
    SingleClass,
    #[error("label {0} is not a class index of a binary task")]
    LabelOutOfRange(usize),
    #[error("{features} feature rows but {labels} labels")]
    LengthMismatch { features: usize, labels: usize },
    #[error("split ratio {0} outside (0, 1) or leaves one side empty")]
    BadRatio(f64),
    #[error("need k >= 2 folds, got {0}")]
    BadFoldCount(usize),
    #[error("class {class} has {count} members, fewer than {k} folds")]
    TooFewPerClass { class: usize, count: usize, k: usize },
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error("unsupported model file version {0}")]
    UnsupportedVersion(u32),
    #[error("corrupt model file: {0}")]
    CorruptModel(String),
    #[error("model file i/o: {0}")]
    Io(#[from] io::Error),
}

/// Anything that yields a probability for each of two classes.
pub trait ProbabilisticClassifier: Send + Sync {
    fn task(&self) -> Task;
    fn feature_schema(&self) -> &str;
    /// `[p(negative), p(positive)]`, summing to one.
    fn predict_proba(&self, features: &[f64]) -> Result<[f64; 2], ClassifyError>;
}

/// Predicted class index and its probability. Ties go to class 0.
pub fn predict_class(
    model: &dyn ProbabilisticClassifier,
    features: &[f64],
) -> Result<(usize, f64), ClassifyError> {
    let p = model.predict_proba(features)?;
    Ok(if p[1] > p[0] { (1, p[1]) } else { (0, p[0]) })
}

fn check_model(model: &dyn ProbabilisticClassifier, task: Task, schema: &str) -> Result<(), ClassifyError> {
    if model.task() != task {
        return Err(ClassifyError::TaskMismatch {
            expected: task,
            found: model.task(),
        });
    }
    if model.feature_schema() != schema {
        return Err(ClassifyError::SchemaMismatch {
            expected: model.feature_schema().to_owned(),
            found: schema.to_owned(),
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AduLabel {
    NonArgumentative,
    Argumentative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClaimLabel {
    Premise,
    Claim,
}

pub fn classify_adu(
    features: &FeatureVector,
    model: &dyn ProbabilisticClassifier,
) -> Result<(AduLabel, f64), ClassifyError> {
    let schema = FeatureSchema::sentence(features.embedding.len());
    check_model(model, Task::Adu, &schema.id())?;
    let (class, p) = predict_class(model, &features.to_dense())?;
    let label = if class == 1 {
        AduLabel::Argumentative
    } else {
        AduLabel::NonArgumentative
    };
    Ok((label, p))
}

pub fn classify_claim_premise(
    features: &FeatureVector,
    model: &dyn ProbabilisticClassifier,
) -> Result<(ClaimLabel, f64), ClassifyError> {
    let schema = FeatureSchema::sentence(features.embedding.len());
    check_model(model, Task::ClaimPremise, &schema.id())?;
    let (class, p) = predict_class(model, &features.to_dense())?;
    let label = if class == 1 {
        ClaimLabel::Claim
    } else {
        ClaimLabel::Premise
    };
    Ok((label, p))
}

/// A stance between two units, directed premise to claim.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationPrediction {
    pub stance: Stance,
    /// Probability of the class the model predicted, before any neutral
    /// coercion.
    pub probability: f64,
    /// Set when the probability fell below the neutral threshold and the
    /// stance was forced to support.
    pub neutral: bool,
}

/// `[premise ‖ claim ‖ premise − claim]`.
pub fn relation_features(premise: &[f64], claim: &[f64]) -> Result<Vec<f64>, ClassifyError> {
    if premise.len() != claim.len() {
        return Err(ClassifyError::DimensionMismatch {
            expected: premise.len(),
            found: claim.len(),
        });
    }
    let mut v = Vec::with_capacity(premise.len() * 3);
    v.extend_from_slice(premise);
    v.extend_from_slice(claim);
    v.extend(premise.iter().zip(claim).map(|(p, c)| p - c));
    Ok(v)
}

pub fn check_threshold(threshold: f64) -> Result<(), ClassifyError> {
    if (0.5..=1.0).contains(&threshold) {
        Ok(())
    } else {
        Err(ClassifyError::ThresholdOutOfRange(threshold))
    }
}

/// Coerces an uncertain prediction to support. A threshold of 1.0 marks
/// every prediction neutral: a finite-logit model never reaches probability
/// one exactly, even where floating point rounds it there.
pub fn apply_neutral_threshold(stance: Stance, probability: f64, threshold: f64) -> RelationPrediction {
    let neutral = threshold >= 1.0 || probability < threshold;
    RelationPrediction {
        stance: if neutral { Stance::Support } else { stance },
        probability,
        neutral,
    }
}

/// Raw (un-thresholded) stance prediction for a premise/claim embedding pair.
pub fn predict_stance(
    premise: &[f64],
    claim: &[f64],
    model: &dyn ProbabilisticClassifier,
) -> Result<(Stance, f64), ClassifyError> {
    check_model(model, Task::Relation, &FeatureSchema::relation(premise.len()).id())?;
    let (class, p) = predict_class(model, &relation_features(premise, claim)?)?;
    Ok((if class == 1 { Stance::Attack } else { Stance::Support }, p))
}

pub fn classify_relation(
    premise: &[f64],
    claim: &[f64],
    model: &dyn ProbabilisticClassifier,
    neutral_threshold: f64,
) -> Result<RelationPrediction, ClassifyError> {
    check_threshold(neutral_threshold)?;
    let (stance, p) = predict_stance(premise, claim, model)?;
    Ok(apply_neutral_threshold(stance, p, neutral_threshold))
}
