//! Training-free classical comparison model: nearest class mean under an
//! RBF kernel. Linear in the sample count, zero trainable parameters.

use ndarray::ArrayView2;

use crate::data::Dataset;
use crate::{Error, Result};

/// exp(-gamma * ||a - b||^2).
pub fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let dist_sqr: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * dist_sqr).exp()
}

/// The common "scale" heuristic: 1 / (d * variance of all feature values),
/// falling back to 1/d when the data is constant.
pub fn default_gamma(train: &Dataset) -> f64 {
    let d = train.n_features() as f64;
    let values: Vec<f64> = train.x.iter().copied().collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if var == 0.0 {
        1.0 / d
    } else {
        1.0 / (d * var)
    }
}

/// Mean of each class's rows.
fn class_means(train: &Dataset) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = train.n_features();
    let mut sum_pos = vec![0.0; d];
    let mut sum_neg = vec![0.0; d];
    let (mut n_pos, mut n_neg) = (0.0f64, 0.0f64);
    for (row, &y) in train.x.rows().into_iter().zip(&train.y) {
        let (sum, count) = if y == 1 {
            (&mut sum_pos, &mut n_pos)
        } else {
            (&mut sum_neg, &mut n_neg)
        };
        *count += 1.0;
        for (s, &v) in sum.iter_mut().zip(row.iter()) {
            *s += v;
        }
    }
    if n_pos == 0.0 {
        return Err(Error::MissingClass(1));
    }
    if n_neg == 0.0 {
        return Err(Error::MissingClass(-1));
    }
    sum_pos.iter_mut().for_each(|s| *s /= n_pos);
    sum_neg.iter_mut().for_each(|s| *s /= n_neg);
    Ok((sum_pos, sum_neg))
}

/// Score each new sample by its RBF similarity to the positive-class mean
/// minus its similarity to the negative-class mean; label by the sign,
/// ties going to +1.
pub fn rbf_centroid_classify(
    train: &Dataset,
    x_new: ArrayView2<f64>,
    gamma: Option<f64>,
) -> Result<(Vec<i8>, Vec<f64>)> {
    if x_new.ncols() != train.n_features() {
        return Err(Error::DimensionMismatch {
            expected: train.n_features(),
            got: x_new.ncols(),
        });
    }
    let gamma = gamma.unwrap_or_else(|| default_gamma(train));
    if gamma <= 0.0 {
        return Err(Error::InvalidParameter("gamma must be > 0".into()));
    }
    let (mean_pos, mean_neg) = class_means(train)?;
    let mut labels = Vec::with_capacity(x_new.nrows());
    let mut scores = Vec::with_capacity(x_new.nrows());
    for row in x_new.rows() {
        let row = row.to_vec();
        let score = rbf(&row, &mean_pos, gamma) - rbf(&row, &mean_neg, gamma);
        scores.push(score);
        labels.push(if score >= 0.0 { 1 } else { -1 });
    }
    Ok((labels, scores))
}
