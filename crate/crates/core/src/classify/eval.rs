use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{predict_class, ClassifyError, ProbabilisticClassifier};

/// Binary confusion counts; class 1 is the positive class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn record(&mut self, predicted: usize, truth: usize) {
        match (predicted == 1, truth == 1) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

/// Accuracy, precision, recall and F1 of the positive class.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalStats {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl EvalStats {
    pub fn from_confusion(c: &Confusion) -> Self {
        let precision = ratio(c.tp, c.tp + c.fp);
        let recall = ratio(c.tp, c.tp + c.fn_);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        EvalStats {
            accuracy: ratio(c.tp + c.tn, c.total()),
            precision,
            recall,
            f1,
        }
    }
}

pub fn evaluate_predictions(
    pairs: impl IntoIterator<Item = (usize, usize)>,
) -> Result<EvalStats, ClassifyError> {
    let mut c = Confusion::default();
    for (predicted, truth) in pairs {
        c.record(predicted, truth);
    }
    if c.total() == 0 {
        return Err(ClassifyError::EmptyDataset);
    }
    Ok(EvalStats::from_confusion(&c))
}

pub fn evaluate(
    model: &dyn ProbabilisticClassifier,
    test: &[(Vec<f64>, usize)],
) -> Result<EvalStats, ClassifyError> {
    let mut pairs = Vec::with_capacity(test.len());
    for (x, y) in test {
        pairs.push((predict_class(model, x)?.0, *y));
    }
    evaluate_predictions(pairs)
}

/// Shuffles and cuts `items` into `round(n * ratio)` training items and the
/// rest for testing.
pub fn split_train_test<T: Clone>(items: &[T], ratio: f64, seed: u64) -> Result<(Vec<T>, Vec<T>), ClassifyError> {
    if items.is_empty() {
        return Err(ClassifyError::EmptyDataset);
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(ClassifyError::BadRatio(ratio));
    }
    let n_train = (items.len() as f64 * ratio).round() as usize;
    if n_train == 0 || n_train == items.len() {
        return Err(ClassifyError::BadRatio(ratio));
    }
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let train = order[..n_train].iter().map(|&i| items[i].clone()).collect();
    let test = order[n_train..].iter().map(|&i| items[i].clone()).collect();
    Ok((train, test))
}

/// Partitions item indices into `k` folds with per-class counts differing by
/// at most one between folds. Classes are dealt round-robin, continuing
/// where the previous class stopped so that fold sizes stay balanced too.
pub fn stratified_folds(labels: &[usize], k: usize, seed: u64) -> Result<Vec<Vec<usize>>, ClassifyError> {
    if labels.is_empty() {
        return Err(ClassifyError::EmptyDataset);
    }
    if k < 2 {
        return Err(ClassifyError::BadFoldCount(k));
    }
    let mut classes: Vec<usize> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut cursor = 0;
    for class in classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < k {
            return Err(ClassifyError::TooFewPerClass {
                class,
                count: members.len(),
                k,
            });
        }
        members.shuffle(&mut rng);
        for m in members {
            folds[cursor % k].push(m);
            cursor += 1;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn confusion_8_2_0_0() {
        let c = Confusion { tp: 8, fp: 2, fn_: 0, tn: 0 };
        let s = EvalStats::from_confusion(&c);
        assert_abs_diff_eq!(s.accuracy, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(s.precision, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(s.recall, 1.0, epsilon = 1e-12);
        // 2 * 0.8 * 1 / 1.8 = 8/9
        assert_abs_diff_eq!(s.f1, 8.0 / 9.0, epsilon = 1e-12);
        assert_eq!(format!("{:.2}", s.f1), "0.89");
    }

    #[test]
    fn all_correct_and_degenerate() {
        let s = evaluate_predictions([(1, 1), (0, 0), (1, 1)]).unwrap();
        assert_eq!((s.accuracy, s.precision, s.recall, s.f1), (1.0, 1.0, 1.0, 1.0));
        let s = evaluate_predictions([(0, 1), (0, 0)]).unwrap();
        assert_eq!(s.f1, 0.0);
        assert!(evaluate_predictions(std::iter::empty()).is_err());
    }

    #[test]
    fn split_sizes_and_determinism() {
        let items: Vec<u32> = (0..100).collect();
        let (train, test) = split_train_test(&items, 0.9, 3).unwrap();
        assert_eq!((train.len(), test.len()), (90, 10));
        let mut all: Vec<u32> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, items);
        assert_eq!(split_train_test(&items, 0.9, 3).unwrap(), (train, test));
        let (tr, te) = split_train_test(&items, 0.7, 1).unwrap();
        assert_eq!((tr.len(), te.len()), (70, 30));
        assert!(split_train_test(&items, 1.0, 1).is_err());
        assert!(split_train_test::<u32>(&[], 0.5, 1).is_err());
    }

    #[test]
    fn exact_stratification() {
        let labels = [0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
        let folds = stratified_folds(&labels, 5, 11).unwrap();
        for f in &folds {
            assert_eq!(f.len(), 2);
            assert_eq!(f.iter().filter(|&&i| labels[i] == 0).count(), 1);
        }
        assert_eq!(folds, stratified_folds(&labels, 5, 11).unwrap());
        assert!(matches!(
            stratified_folds(&[0, 0, 1], 2, 0),
            Err(ClassifyError::TooFewPerClass { class: 1, count: 1, k: 2 })
        ));
    }

    proptest! {
        #[test]
        fn folds_partition_and_balance(labels in prop::collection::vec(0usize..3, 12..60), k in 2usize..5, seed in any::<u64>()) {
            let mut counts = [0usize; 3];
            for &l in &labels { counts[l] += 1; }
            prop_assume!(counts.iter().all(|&c| c == 0 || c >= k));
            let folds = stratified_folds(&labels, k, seed).unwrap();
            let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
            for class in 0..3 {
                let per: Vec<usize> = folds.iter().map(|f| f.iter().filter(|&&i| labels[i] == class).count()).collect();
                prop_assert!(per.iter().max().unwrap() - per.iter().min().unwrap() <= 1);
            }
        }

        #[test]
        fn evaluation_ignores_order(pairs in prop::collection::vec((0usize..2, 0usize..2), 1..40), seed in any::<u64>()) {
            let a = evaluate_predictions(pairs.clone()).unwrap();
            let mut shuffled = pairs;
            shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(a, evaluate_predictions(shuffled).unwrap());
        }
    }
}
