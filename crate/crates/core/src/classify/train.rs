//! Full-batch gradient descent on the L2-regularized softmax cross-entropy.
//!
//! Each epoch tries the configured learning rate and halves it until the
//! loss does not increase, so the recorded loss history is non-increasing.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::{softmax2, FeatureSchema, LinearModel, Task};
use super::ClassifyError;
use crate::Language;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub l2: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1.0,
            l2: 1e-4,
            epochs: 300,
            seed: 0,
        }
    }
}

/// Identity of the model being trained.
#[derive(Clone, Copy, Debug)]
pub struct ModelMeta {
    pub task: Task,
    pub language: Language,
    pub schema: FeatureSchema,
}

/// Objective over a flat parameter vector laid out as
/// `[w_0 (d values), b_0, w_1 (d values), b_1]`.
pub struct LogisticObjective<'a> {
    xs: &'a [Vec<f64>],
    ys: &'a [usize],
    l2: f64,
    dim: usize,
}

impl<'a> LogisticObjective<'a> {
    pub fn new(xs: &'a [Vec<f64>], ys: &'a [usize], l2: f64) -> Result<Self, ClassifyError> {
        if xs.is_empty() {
            return Err(ClassifyError::EmptyDataset);
        }
        if xs.len() != ys.len() {
            return Err(ClassifyError::LengthMismatch {
                features: xs.len(),
                labels: ys.len(),
            });
        }
        let dim = xs[0].len();
        if let Some(bad) = xs.iter().find(|x| x.len() != dim) {
            return Err(ClassifyError::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        if let Some(&bad) = ys.iter().find(|&&y| y > 1) {
            return Err(ClassifyError::LabelOutOfRange(bad));
        }
        Ok(LogisticObjective { xs, ys, l2, dim })
    }

    pub fn parameter_count(&self) -> usize {
        2 * (self.dim + 1)
    }

    fn logits(&self, theta: &[f64], x: &[f64]) -> [f64; 2] {
        let d = self.dim;
        let mut z = [0.0; 2];
        for (k, zk) in z.iter_mut().enumerate() {
            let row = &theta[k * (d + 1)..k * (d + 1) + d];
            *zk = theta[k * (d + 1) + d] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
        z
    }

    fn penalty(&self, theta: &[f64]) -> f64 {
        let d = self.dim;
        let sq: f64 = (0..2)
            .map(|k| theta[k * (d + 1)..k * (d + 1) + d].iter().map(|w| w * w).sum::<f64>())
            .sum();
        0.5 * self.l2 * sq
    }

    pub fn loss(&self, theta: &[f64]) -> f64 {
        let n = self.xs.len() as f64;
        let mut total = 0.0;
        for (x, &y) in self.xs.iter().zip(self.ys) {
            let z = self.logits(theta, x);
            // log-sum-exp minus the true logit
            let m = z[0].max(z[1]);
            let lse = m + ((z[0] - m).exp() + (z[1] - m).exp()).ln();
            total += lse - z[y];
        }
        total / n + self.penalty(theta)
    }

    pub fn loss_and_gradient(&self, theta: &[f64]) -> (f64, Vec<f64>) {
        let d = self.dim;
        let n = self.xs.len() as f64;
        let mut grad = vec![0.0; self.parameter_count()];
        let mut total = 0.0;
        for (x, &y) in self.xs.iter().zip(self.ys) {
            let z = self.logits(theta, x);
            let m = z[0].max(z[1]);
            let lse = m + ((z[0] - m).exp() + (z[1] - m).exp()).ln();
            total += lse - z[y];
            let p = softmax2(z);
            for (k, &pk) in p.iter().enumerate() {
                let delta = pk - if k == y { 1.0 } else { 0.0 };
                let base = k * (d + 1);
                for (g, v) in grad[base..base + d].iter_mut().zip(x) {
                    *g += delta * v / n;
                }
                grad[base + d] += delta / n;
            }
        }
        for k in 0..2 {
            let base = k * (d + 1);
            for j in 0..d {
                grad[base + j] += self.l2 * theta[base + j];
            }
        }
        (total / n + self.penalty(theta), grad)
    }
}

/// A trained model together with the loss before training and after every epoch.
#[derive(Clone, Debug)]
pub struct Fit {
    pub model: LinearModel,
    pub loss_history: Vec<f64>,
}

pub fn fit_logistic(
    meta: ModelMeta,
    features: &[Vec<f64>],
    labels: &[usize],
    config: &TrainConfig,
) -> Result<Fit, ClassifyError> {
    let objective = LogisticObjective::new(features, labels, config.l2)?;
    if objective.dim != meta.schema.dense_dimension() {
        return Err(ClassifyError::DimensionMismatch {
            expected: meta.schema.dense_dimension(),
            found: objective.dim,
        });
    }
    if !(labels.contains(&0) && labels.contains(&1)) {
        return Err(ClassifyError::SingleClass);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut theta: Vec<f64> = (0..objective.parameter_count())
        .map(|_| (rng.random::<f64>() - 0.5) * 0.02)
        .collect();

    let (mut loss, mut grad) = objective.loss_and_gradient(&theta);
    let mut history = vec![loss];
    let mut step = config.learning_rate;
    for _ in 0..config.epochs {
        let mut accepted = false;
        for _ in 0..40 {
            let candidate: Vec<f64> = theta.iter().zip(&grad).map(|(t, g)| t - step * g).collect();
            let (next_loss, next_grad) = objective.loss_and_gradient(&candidate);
            if next_loss <= loss {
                theta = candidate;
                loss = next_loss;
                grad = next_grad;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        history.push(loss);
        step = (step * 2.0).min(config.learning_rate);
    }

    let d = objective.dim;
    let model = LinearModel {
        task: meta.task,
        weights: (0..2).map(|k| theta[k * (d + 1)..k * (d + 1) + d].to_vec()).collect(),
        bias: (0..2).map(|k| theta[k * (d + 1) + d]).collect(),
        feature_schema: meta.schema.id(),
        language: meta.language,
    };
    Ok(Fit {
        model,
        loss_history: history,
    })
}

pub fn train_logistic(
    meta: ModelMeta,
    features: &[Vec<f64>],
    labels: &[usize],
    config: &TrainConfig,
) -> Result<LinearModel, ClassifyError> {
    fit_logistic(meta, features, labels, config).map(|f| f.model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{predict_class, SchemaKind};

    // Sentence schemas carry 10 handcrafted slots; a relation schema of
    // embedding dimension 1 gives a 3-wide input, enough for toy data.
    fn meta3() -> ModelMeta {
        ModelMeta {
            task: Task::Relation,
            language: Language::En,
            schema: FeatureSchema {
                kind: SchemaKind::Relation,
                embedding_dimension: 1,
            },
        }
    }

    #[test]
    fn empty_and_single_class() {
        let cfg = TrainConfig::default();
        assert!(matches!(train_logistic(meta3(), &[], &[], &cfg), Err(ClassifyError::EmptyDataset)));
        let xs = vec![vec![0.0, 1.0, 2.0]; 3];
        assert!(matches!(
            train_logistic(meta3(), &xs, &[1, 1, 1], &cfg),
            Err(ClassifyError::SingleClass)
        ));
        assert!(matches!(
            train_logistic(meta3(), &xs, &[0, 1], &cfg),
            Err(ClassifyError::LengthMismatch { .. })
        ));
        let ragged = vec![vec![0.0, 1.0, 2.0], vec![0.0]];
        assert!(matches!(
            train_logistic(meta3(), &ragged, &[0, 1], &cfg),
            Err(ClassifyError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            train_logistic(meta3(), &xs, &[0, 1, 2], &cfg),
            Err(ClassifyError::LabelOutOfRange(2))
        ));
    }

    #[test]
    fn deterministic_given_seed() {
        let xs: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 / 10.0, 1.0, -(i as f64)]).collect();
        let ys: Vec<usize> = (0..10).map(|i| usize::from(i >= 5)).collect();
        let cfg = TrainConfig { seed: 7, ..Default::default() };
        let a = train_logistic(meta3(), &xs, &ys, &cfg).unwrap();
        let b = train_logistic(meta3(), &xs, &ys, &cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let c = train_logistic(meta3(), &xs, &ys, &TrainConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a.to_json(), c.to_json());
        assert_eq!(predict_class(&a, &xs[9]).unwrap().0, 1);
    }

    #[test]
    fn loss_history_is_non_increasing() {
        let xs: Vec<Vec<f64>> = (0..30)
            .map(|i| {
                let t = i as f64;
                vec![(t * 0.7).sin() * 5.0, (t * 1.3).cos(), t / 30.0]
            })
            .collect();
        let ys: Vec<usize> = (0..30).map(|i| usize::from((i * 7) % 3 == 0)).collect();
        let cfg = TrainConfig {
            learning_rate: 50.0,
            epochs: 200,
            ..Default::default()
        };
        let fit = fit_logistic(meta3(), &xs, &ys, &cfg).unwrap();
        assert!(fit.loss_history.len() > 1);
        for w in fit.loss_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "{} -> {}", w[0], w[1]);
        }
    }
}
