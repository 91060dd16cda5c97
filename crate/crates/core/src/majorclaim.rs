//! Major-claim heuristics.
//!
//! All four return the position of the chosen unit in the (document-ordered)
//! input slice. Scores closer than [`TIE_EPSILON`] count as ties, and ties go
//! to the earliest unit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{ClassifyError, ProbabilisticClassifier};
use crate::construct::RelationMatrix;
use crate::features::{cosine, FeatureError, FeatureVector};
use crate::segment::SentenceSpan;
use crate::Role;

pub const TIE_EPSILON: f64 = 1e-12;

/// Sentence index of a unit; unique within a document.
pub type AduId = usize;

/// An argumentative unit ready for graph construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Adu {
    pub span: SentenceSpan,
    pub role: Role,
    pub embedding: Vec<f64>,
    pub features: Option<FeatureVector>,
}

impl Adu {
    pub fn new(span: SentenceSpan, role: Role, embedding: Vec<f64>) -> Self {
        Adu {
            span,
            role,
            embedding,
            features: None,
        }
    }

    pub fn id(&self) -> AduId {
        self.span.index
    }
}

#[derive(Debug, Error)]
pub enum MajorClaimError {
    #[error("no units to choose a major claim from")]
    Empty,
    #[error("every embedding is the zero vector")]
    AllZeroEmbeddings,
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MajorClaimMethod {
    First,
    Centroid,
    Pairwise,
    Probability,
}

impl MajorClaimMethod {
    pub const ALL: [MajorClaimMethod; 4] = [
        MajorClaimMethod::Centroid,
        MajorClaimMethod::First,
        MajorClaimMethod::Pairwise,
        MajorClaimMethod::Probability,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MajorClaimMethod::First => "first",
            MajorClaimMethod::Centroid => "centroid",
            MajorClaimMethod::Pairwise => "pairwise",
            MajorClaimMethod::Probability => "probability",
        }
    }
}

impl fmt::Display for MajorClaimMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MajorClaimMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "first" => Ok(MajorClaimMethod::First),
            "centroid" => Ok(MajorClaimMethod::Centroid),
            "pairwise" => Ok(MajorClaimMethod::Pairwise),
            "probability" => Ok(MajorClaimMethod::Probability),
            other => Err(format!(
                "unknown major-claim method {other:?} (first, centroid, pairwise, probability)"
            )),
        }
    }
}

/// Which predictions feed a candidate's score in [`probability`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbabilityDirection {
    /// Pairs where the candidate is the claim (`other -> candidate`).
    #[default]
    Incoming,
    /// Both directions.
    Both,
}

fn argmax_earliest(scores: impl IntoIterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.into_iter().enumerate() {
        match best {
            Some((_, b)) if s <= b + TIE_EPSILON * b.abs().max(1.0) => {}
            _ => best = Some((i, s)),
        }
    }
    best.map(|(i, _)| i)
}

/// The earliest claim, or the earliest unit when there is no claim.
pub fn first(adus: &[Adu]) -> Result<usize, MajorClaimError> {
    if adus.is_empty() {
        return Err(MajorClaimError::Empty);
    }
    Ok(adus.iter().position(|a| a.role.is_claim()).unwrap_or(0))
}

/// The unit most cosine-similar to the mean embedding.
pub fn centroid(adus: &[Adu]) -> Result<usize, MajorClaimError> {
    if adus.is_empty() {
        return Err(MajorClaimError::Empty);
    }
    if adus.iter().all(|a| a.embedding.iter().all(|x| *x == 0.0)) {
        return Err(MajorClaimError::AllZeroEmbeddings);
    }
    let dim = adus[0].embedding.len();
    let mut mean = vec![0.0; dim];
    for a in adus {
        if a.embedding.len() != dim {
            return Err(FeatureError::VectorDimensions(dim, a.embedding.len()).into());
        }
        for (m, x) in mean.iter_mut().zip(&a.embedding) {
            *m += x;
        }
    }
    let n = adus.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    let scores = adus
        .iter()
        .map(|a| cosine(&a.embedding, &mean).map(|c| c.value))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(argmax_earliest(scores).expect("non-empty"))
}

/// The unit with the highest mean cosine similarity to all other units.
pub fn pairwise(adus: &[Adu]) -> Result<usize, MajorClaimError> {
    if adus.is_empty() {
        return Err(MajorClaimError::Empty);
    }
    let n = adus.len();
    if n == 1 {
        return Ok(0);
    }
    let mut sums = vec![0.0; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let c = cosine(&adus[i].embedding, &adus[j].embedding)?.value;
            sums[i] += c;
            sums[j] += c;
        }
    }
    let denom = (n - 1) as f64;
    Ok(argmax_earliest(sums.into_iter().map(|s| s / denom)).expect("non-empty"))
}

/// The unit with the highest mean relation probability over its
/// non-neutral predictions. A unit whose predictions are all neutral scores 0.
pub fn probability(
    adus: &[Adu],
    relations: &RelationMatrix,
    direction: ProbabilityDirection,
) -> Result<usize, MajorClaimError> {
    if adus.is_empty() {
        return Err(MajorClaimError::Empty);
    }
    let scores = adus.iter().map(|a| {
        let mut sum = 0.0;
        let mut count = 0usize;
        for b in adus.iter().filter(|b| b.id() != a.id()) {
            let mut take = |from: AduId, to: AduId| {
                if let Some(p) = relations.get(from, to) {
                    if !p.neutral {
                        sum += p.probability;
                        count += 1;
                    }
                }
            };
            take(b.id(), a.id());
            if direction == ProbabilityDirection::Both {
                take(a.id(), b.id());
            }
        }
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    });
    Ok(argmax_earliest(scores).expect("non-empty"))
}

/// [`probability`] with predictions computed from a relation model.
pub fn probability_with_model(
    adus: &[Adu],
    model: &dyn ProbabilisticClassifier,
    neutral_threshold: f64,
    direction: ProbabilityDirection,
) -> Result<usize, MajorClaimError> {
    let relations = RelationMatrix::predict(adus, model, neutral_threshold)?;
    probability(adus, &relations, direction)
}

/// Dispatches on `method`; the probability heuristic reads `relations`.
pub fn select(
    method: MajorClaimMethod,
    adus: &[Adu],
    relations: &RelationMatrix,
    direction: ProbabilityDirection,
) -> Result<usize, MajorClaimError> {
    match method {
        MajorClaimMethod::First => first(adus),
        MajorClaimMethod::Centroid => centroid(adus),
        MajorClaimMethod::Pairwise => pairwise(adus),
        MajorClaimMethod::Probability => probability(adus, relations, direction),
    }
}
