//! Evaluation metrics: ROC AUC (rank statistic with tie averaging) and
//! plain accuracy.

use crate::{Error, Result};

/// Summary of one evaluation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub auc: f64,
    pub accuracy: f64,
    pub n: usize,
    pub positives: usize,
}

impl EvalReport {
    pub fn compute(scores: &[f64], labels_pred: &[i8], labels_true: &[i8]) -> Result<Self> {
        Ok(EvalReport {
            auc: roc_auc(scores, labels_true)?,
            accuracy: accuracy(labels_pred, labels_true)?,
            n: labels_true.len(),
            positives: labels_true.iter().filter(|&&y| y == 1).count(),
        })
    }
}

/// Area under the ROC curve via the Mann-Whitney rank statistic, with
/// average ranks for tied scores. O(n log n).
pub fn roc_auc(scores: &[f64], labels: &[i8]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: scores.len(),
        });
    }
    let n_pos = labels.iter().filter(|&&y| y == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::MissingClass(if n_pos == 0 { 1 } else { -1 }));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Sum of (1-based, tie-averaged) ranks of the positive class. Ranks of
    // a tied group average to (lo + hi) / 2, a half-integer, so everything
    // here is exact in doubles for any realistic n.
    let mut rank_sum_pos = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            if labels[idx] == 1 {
                rank_sum_pos += avg_rank;
            }
        }
        i = j + 1;
    }

    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// Fraction of positions where the two label vectors agree.
pub fn accuracy(labels_pred: &[i8], labels_true: &[i8]) -> Result<f64> {
    if labels_pred.len() != labels_true.len() {
        return Err(Error::DimensionMismatch {
            expected: labels_true.len(),
            got: labels_pred.len(),
        });
    }
    if labels_true.is_empty() {
        return Err(Error::InvalidParameter("empty label vectors".into()));
    }
    let hits = labels_pred
        .iter()
        .zip(labels_true)
        .filter(|(p, t)| p == t)
        .count();
    Ok(hits as f64 / labels_true.len() as f64)
}

/// Brute-force AUC by counting positive-negative pairs, ties worth half.
/// O(n^2); test oracle for [`roc_auc`].
#[doc(hidden)]
pub fn roc_auc_pair_count(scores: &[f64], labels: &[i8]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: scores.len(),
        });
    }
    let mut wins = 0.0f64;
    let mut pairs = 0.0f64;
    for (i, &yi) in labels.iter().enumerate() {
        if yi != 1 {
            continue;
        }
        for (j, &yj) in labels.iter().enumerate() {
            if yj != -1 {
                continue;
            }
            pairs += 1.0;
            if scores[i] > scores[j] {
                wins += 1.0;
            } else if scores[i] == scores[j] {
                wins += 0.5;
            }
        }
    }
    if pairs == 0.0 {
        return Err(Error::MissingClass(
            if labels.contains(&1) { -1 } else { 1 },
        ));
    }
    Ok(wins / pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn auc_perfectly_separated() {
        let auc = roc_auc(&[0.1, 0.2, 0.8, 0.9], &[-1, -1, 1, 1]).unwrap();
        assert_eq!(auc, 1.0);
    }

    #[test]
    fn auc_all_equal_scores() {
        let auc = roc_auc(&[0.5; 6], &[1, -1, 1, -1, 1, -1]).unwrap();
        assert_eq!(auc, 0.5);
    }

    #[test]
    fn auc_hand_counted_case() {
        // Positive scores 0.35 and 0.8 against negatives 0.1 and 0.4:
        // 3 of the 4 pairs rank the positive higher.
        let auc = roc_auc(&[0.1, 0.4, 0.35, 0.8], &[-1, -1, 1, 1]).unwrap();
        assert_eq!(auc, 0.75);
    }

    #[test]
    fn auc_rejects_single_class() {
        assert!(roc_auc(&[0.1, 0.2], &[1, 1]).is_err());
        assert!(roc_auc(&[0.1, 0.2], &[-1, -1]).is_err());
    }

    #[test]
    fn accuracy_cases() {
        assert_eq!(accuracy(&[1, -1, 1], &[1, -1, 1]).unwrap(), 1.0);
        assert_eq!(accuracy(&[1, -1], &[-1, 1]).unwrap(), 0.0);
        assert_eq!(accuracy(&[1, 1, -1, -1], &[1, -1, -1, 1]).unwrap(), 0.5);
    }

    proptest! {
        #[test]
        fn auc_matches_pair_counting_oracle(
            raw in proptest::collection::vec((0u8..8, proptest::bool::ANY), 2..60)
        ) {
            // Discrete score levels force plenty of ties.
            let scores: Vec<f64> = raw.iter().map(|&(s, _)| f64::from(s) / 7.0).collect();
            let mut labels: Vec<i8> = raw.iter().map(|&(_, p)| if p { 1 } else { -1 }).collect();
            labels[0] = 1;
            let last = labels.len() - 1;
            labels[last] = -1;
            let fast = roc_auc(&scores, &labels).unwrap();
            let slow = roc_auc_pair_count(&scores, &labels).unwrap();
            prop_assert_eq!(fast, slow);
        }

        #[test]
        fn auc_invariant_under_increasing_transforms(
            raw in proptest::collection::vec((-100i32..100, proptest::bool::ANY), 2..40),
            scale in 1u8..20,
        ) {
            let scores: Vec<f64> = raw.iter().map(|&(s, _)| f64::from(s) / 10.0).collect();
            let mut labels: Vec<i8> = raw.iter().map(|&(_, p)| if p { 1 } else { -1 }).collect();
            labels[0] = 1;
            let last = labels.len() - 1;
            labels[last] = -1;
            // Strictly increasing map: affine with positive slope. (Saturating
            // maps like tanh are not strictly increasing in floating point.)
            let mapped: Vec<f64> = scores
                .iter()
                .map(|s| f64::from(scale) * s + 3.0)
                .collect();
            let a = roc_auc(&scores, &labels).unwrap();
            let b = roc_auc(&mapped, &labels).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
        }

        #[test]
        fn auc_negation_flips_tie_free_scores(
            n_pos in 1usize..10, n_neg in 1usize..10, seed in 0u64..1000
        ) {
            use rand::prelude::*;
            use rand_chacha::ChaCha8Rng;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = n_pos + n_neg;
            // Distinct scores via a shuffled integer grid.
            let mut grid: Vec<f64> = (0..n).map(|i| i as f64).collect();
            grid.shuffle(&mut rng);
            let labels: Vec<i8> = (0..n).map(|i| if i < n_pos { 1 } else { -1 }).collect();
            let a = roc_auc(&grid, &labels).unwrap();
            let neg: Vec<f64> = grid.iter().map(|s| -s).collect();
            let b = roc_auc(&neg, &labels).unwrap();
            prop_assert!((a + b - 1.0).abs() <= 1e-12);
        }
    }
}
