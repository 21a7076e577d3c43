//! Centroid kernel vectors, kernel-target alignment, and the two losses.
//!
//! The kernel against a single centroid is a length-n vector rather than
//! an n x n matrix, which is what keeps training cost linear in the
//! sample count. Alignment compares that vector to the label vector
//! (sign-flipped for the negative-class centroid).

use ndarray::{Array2, ArrayView2};

use crate::encoding::{encode, encode_single, Centroid, CircuitSpec, EncodingParams};
use crate::{Error, Result};

/// Fidelities between one centroid's encoded state and every sample's.
#[derive(Debug, Clone)]
pub struct KernelVector {
    pub values: Vec<f64>,
    pub centroid_label: i8,
}

/// k_i = |<psi(c)|psi(x_i)>|^2 for every row of `x`.
pub fn centroid_kernel(
    spec: &CircuitSpec,
    params: &EncodingParams,
    x: ArrayView2<f64>,
    c: &Centroid,
) -> Result<KernelVector> {
    if c.coords.len() != spec.n_features {
        return Err(Error::DimensionMismatch {
            expected: spec.n_features,
            got: c.coords.len(),
        });
    }
    let states = encode(spec, params, x)?;
    let centroid_state = encode_single(spec, params, &c.coords)?;
    Ok(KernelVector {
        values: states.fidelity(&centroid_state)?,
        centroid_label: c.label,
    })
}

/// Kernel-target alignment of a centroid kernel vector against labels:
/// TA = l * sum_i y_i k_i / sqrt((sum_i k_i^2) (sum_i y_i^2)).
pub fn target_alignment(k: &KernelVector, y: &[i8]) -> Result<f64> {
    let (num, k_sqr, y_sqr) = alignment_sums(k, y)?;
    Ok(num / (k_sqr * y_sqr).sqrt())
}

/// The three sums TA is built from; shared with the gradient engines.
/// Errors out when the kernel vector is identically zero, since the
/// alignment (and its gradient) is undefined there.
pub(crate) fn alignment_sums(k: &KernelVector, y: &[i8]) -> Result<(f64, f64, f64)> {
    if k.values.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            got: k.values.len(),
        });
    }
    let l = f64::from(k.centroid_label);
    let num: f64 = l * k
        .values
        .iter()
        .zip(y)
        .map(|(ki, &yi)| f64::from(yi) * ki)
        .sum::<f64>();
    let k_sqr: f64 = k.values.iter().map(|ki| ki * ki).sum();
    let y_sqr: f64 = y.iter().map(|&yi| f64::from(yi).powi(2)).sum();
    if k_sqr == 0.0 {
        return Err(Error::DegenerateKernel);
    }
    Ok((num, k_sqr, y_sqr))
}

/// Alignment loss with the centroid held fixed:
/// L = 1 - TA + lambda * ||w||_2^2.
pub fn kao_loss(
    spec: &CircuitSpec,
    params: &EncodingParams,
    x: ArrayView2<f64>,
    y: &[i8],
    c: &Centroid,
    lambda: f64,
) -> Result<f64> {
    let k = centroid_kernel(spec, params, x, c)?;
    let ta = target_alignment(&k, y)?;
    Ok(1.0 - ta + lambda * params.weight_norm_sqr())
}

/// Penalty for centroid coordinates outside the [0, 1] normalization box:
/// R = sum_d (max(c_d - 1, 0) - min(c_d, 0)). Zero iff inside the box.
pub fn boundary_penalty(c: &Centroid) -> f64 {
    c.coords
        .iter()
        .map(|&v| (v - 1.0).max(0.0) - v.min(0.0))
        .sum()
}

/// Slope of the boundary penalty per coordinate (0 inside and on the box
/// edges, -1 below, +1 above).
pub(crate) fn boundary_penalty_slope(c: &Centroid) -> Vec<f64> {
    c.coords
        .iter()
        .map(|&v| {
            if v > 1.0 {
                1.0
            } else if v < 0.0 {
                -1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// Centroid loss with the encoding held fixed:
/// L = 1 - TA + lambda * R(c).
pub fn co_loss(
    spec: &CircuitSpec,
    params: &EncodingParams,
    x: ArrayView2<f64>,
    y: &[i8],
    c: &Centroid,
    lambda: f64,
) -> Result<f64> {
    let k = centroid_kernel(spec, params, x, c)?;
    let ta = target_alignment(&k, y)?;
    Ok(1.0 - ta + lambda * boundary_penalty(c))
}

/// Pairwise fidelity matrix between two sample sets. Verification and
/// inspection only; the training path never builds this.
pub fn full_kernel_matrix(
    spec: &CircuitSpec,
    params: &EncodingParams,
    x_a: ArrayView2<f64>,
    x_b: ArrayView2<f64>,
) -> Result<Array2<f64>> {
    let states_a = encode(spec, params, x_a)?;
    let states_b = encode(spec, params, x_b)?;
    let mut k = Array2::zeros((x_a.nrows(), x_b.nrows()));
    for j in 0..x_b.nrows() {
        let col = states_a.fidelity(states_b.row(j))?;
        for i in 0..x_a.nrows() {
            k[[i, j]] = col[i];
        }
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn small_instance() -> (CircuitSpec, EncodingParams, ndarray::Array2<f64>) {
        let spec = CircuitSpec::new(2, 2, 3).unwrap();
        let params = EncodingParams::init(&spec, 0.9, 17).unwrap();
        let x = array![
            [0.1, 0.8, 0.4],
            [0.9, 0.2, 0.6],
            [0.5, 0.5, 0.5],
            [0.3, 0.7, 0.1]
        ];
        (spec, params, x)
    }

    #[test]
    fn kernel_is_one_for_sample_equal_to_centroid() {
        let (spec, params, x) = small_instance();
        let c = Centroid::new(vec![0.5, 0.5, 0.5], 1).unwrap();
        let k = centroid_kernel(&spec, &params, x.view(), &c).unwrap();
        assert!((k.values[2] - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn identity_circuit_kernel_is_all_ones() {
        let (spec, _, x) = small_instance();
        let params = EncodingParams::zeros(&spec);
        let c = Centroid::new(vec![0.0, 0.0, 0.0], -1).unwrap();
        let k = centroid_kernel(&spec, &params, x.view(), &c).unwrap();
        assert!(k.values.iter().all(|&v| (v - 1.0).abs() <= 1e-12));
    }

    #[test]
    fn kernel_values_stay_in_range() {
        let (spec, params, x) = small_instance();
        let c = Centroid::new(vec![0.2, 0.9, 0.4], 1).unwrap();
        let k = centroid_kernel(&spec, &params, x.view(), &c).unwrap();
        assert!(k.values.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)));
    }

    #[test]
    fn alignment_hand_computed_case() {
        // k = 1 exactly where y = l, 0 elsewhere, two samples per class:
        // TA = 2 / sqrt(2 * 4) = sqrt(1/2).
        let k = KernelVector {
            values: vec![1.0, 1.0, 0.0, 0.0],
            centroid_label: 1,
        };
        let y = [1, 1, -1, -1];
        let ta = target_alignment(&k, &y).unwrap();
        assert!((ta - 0.5f64.sqrt()).abs() <= 1e-15);
    }

    #[test]
    fn alignment_zero_for_constant_kernel_balanced_classes() {
        let k = KernelVector {
            values: vec![1.0; 4],
            centroid_label: 1,
        };
        let ta = target_alignment(&k, &[1, -1, 1, -1]).unwrap();
        assert_eq!(ta, 0.0);
    }

    #[test]
    fn alignment_flips_sign_with_centroid_label() {
        let values = vec![0.9, 0.4, 0.2, 0.7];
        let y = [1, -1, -1, 1];
        let pos = KernelVector {
            values: values.clone(),
            centroid_label: 1,
        };
        let neg = KernelVector {
            values,
            centroid_label: -1,
        };
        let ta_pos = target_alignment(&pos, &y).unwrap();
        let ta_neg = target_alignment(&neg, &y).unwrap();
        assert!((ta_pos + ta_neg).abs() <= 1e-15);
    }

    #[test]
    fn alignment_reaches_one_on_ideal_single_class_kernel() {
        let k = KernelVector {
            values: vec![1.0; 3],
            centroid_label: -1,
        };
        let ta = target_alignment(&k, &[-1, -1, -1]).unwrap();
        assert!((ta - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn alignment_is_bounded() {
        let k = KernelVector {
            values: vec![0.3, 0.8, 0.05, 0.99, 0.6],
            centroid_label: -1,
        };
        let ta = target_alignment(&k, &[1, -1, 1, -1, 1]).unwrap();
        assert!(ta.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn alignment_rejects_all_zero_kernel() {
        let k = KernelVector {
            values: vec![0.0, 0.0],
            centroid_label: 1,
        };
        assert!(matches!(
            target_alignment(&k, &[1, -1]),
            Err(Error::DegenerateKernel)
        ));
    }

    #[test]
    fn vector_alignment_equals_matrix_form() {
        // The matrix-form alignment <K, K*>_F / sqrt(<K,K>_F <K*,K*>_F),
        // applied to the n x 1 kernel column with K* = l * y, reduces to
        // the vector formula. Checked numerically.
        let values = vec![0.9, 0.1, 0.4, 0.8];
        let y = [1i8, -1, -1, 1];
        let l = -1i8;
        let k = KernelVector {
            values: values.clone(),
            centroid_label: l,
        };
        let frob_num: f64 = values
            .iter()
            .zip(&y)
            .map(|(ki, &yi)| ki * f64::from(l) * f64::from(yi))
            .sum();
        let frob_kk: f64 = values.iter().map(|ki| ki * ki).sum();
        let frob_ss: f64 = y.iter().map(|&yi| f64::from(yi).powi(2)).sum();
        let matrix_ta = frob_num / (frob_kk * frob_ss).sqrt();
        let vector_ta = target_alignment(&k, &y).unwrap();
        assert!((matrix_ta - vector_ta).abs() <= 1e-15);
    }

    #[test]
    fn kao_loss_formula_cases() {
        let (spec, _, x) = small_instance();
        // Identity circuit, all-ones kernel, single class: TA = 1, w = 0,
        // so the loss collapses to 0.
        let params = EncodingParams::zeros(&spec);
        let c = Centroid::new(vec![0.0, 0.0, 0.0], 1).unwrap();
        let loss = kao_loss(&spec, &params, x.view(), &[1, 1, 1, 1], &c, 0.0).unwrap();
        assert!(loss.abs() <= 1e-12);

        // All-zero samples and biases make the circuit the identity no
        // matter what w is, so TA = 0 on balanced labels and the loss is
        // exactly 1 + lambda * ||w||^2 = 1.004.
        let mut params = EncodingParams::zeros(&spec);
        params.w[0] = 2.0;
        let x0 = ndarray::Array2::zeros((4, 3));
        let loss = kao_loss(&spec, &params, x0.view(), &[1, -1, 1, -1], &c, 0.001).unwrap();
        assert!((loss - 1.004).abs() <= 1e-12);
    }

    #[test]
    fn kao_loss_decreases_as_alignment_rises() {
        // Same weights, two label vectors: the better-aligned one has the
        // smaller loss.
        let (spec, params, x) = small_instance();
        let c = Centroid::new(vec![0.1, 0.8, 0.4], 1).unwrap();
        let k = centroid_kernel(&spec, &params, x.view(), &c).unwrap();
        // Labels matching the kernel ordering vs anti-matching.
        let mut idx: Vec<usize> = (0..4).collect();
        idx.sort_by(|&a, &b| k.values[a].total_cmp(&k.values[b]));
        let mut y_good = [0i8; 4];
        let mut y_bad = [0i8; 4];
        for (rank, &i) in idx.iter().enumerate() {
            y_good[i] = if rank >= 2 { 1 } else { -1 };
            y_bad[i] = if rank >= 2 { -1 } else { 1 };
        }
        let loss_good = kao_loss(&spec, &params, x.view(), &y_good, &c, 0.0).unwrap();
        let loss_bad = kao_loss(&spec, &params, x.view(), &y_bad, &c, 0.0).unwrap();
        assert!(loss_good < loss_bad);
    }

    #[test]
    fn boundary_penalty_cases() {
        let c = |coords: Vec<f64>| Centroid::new(coords, 1).unwrap();
        assert_eq!(boundary_penalty(&c(vec![0.2, 0.9])), 0.0);
        assert!((boundary_penalty(&c(vec![1.5, -0.2])) - 0.7).abs() <= 1e-15);
        assert_eq!(boundary_penalty(&c(vec![1.0, 0.0])), 0.0);
        assert_eq!(boundary_penalty_slope(&c(vec![1.5, -0.2, 0.5])), vec![1.0, -1.0, 0.0]);
    }

    #[test]
    fn boundary_penalty_is_continuous_at_the_box_edge() {
        let eps = 1e-9;
        let at = |v: f64| boundary_penalty(&Centroid::new(vec![v], 1).unwrap());
        assert!((at(1.0 + eps) - at(1.0 - eps)).abs() <= 2.0 * eps);
        assert!((at(0.0 + eps) - at(0.0 - eps)).abs() <= 2.0 * eps);
    }

    #[test]
    fn co_loss_formula_cases() {
        let (spec, params, x) = small_instance();
        // Centroid inside the box: penalty contributes nothing.
        let c = Centroid::new(vec![0.3, 0.3, 0.3], 1).unwrap();
        let y = [1, -1, 1, -1];
        let k = centroid_kernel(&spec, &params, x.view(), &c).unwrap();
        let ta = target_alignment(&k, &y).unwrap();
        let loss = co_loss(&spec, &params, x.view(), &y, &c, 123.0).unwrap();
        assert!((loss - (1.0 - ta)).abs() <= 1e-12);

        // Outside the box the penalty adds lambda * R.
        let c_out = Centroid::new(vec![1.5, -0.2, 0.3], 1).unwrap();
        let k_out = centroid_kernel(&spec, &params, x.view(), &c_out).unwrap();
        let ta_out = target_alignment(&k_out, &y).unwrap();
        let loss_out = co_loss(&spec, &params, x.view(), &y, &c_out, 0.001).unwrap();
        assert!((loss_out - (1.0 - ta_out + 0.001 * 0.7)).abs() <= 1e-12);
        assert!(loss_out >= -1e-12);
    }

    #[test]
    fn full_matrix_symmetric_unit_diagonal() {
        let (spec, params, x) = small_instance();
        let k = full_kernel_matrix(&spec, &params, x.view(), x.view()).unwrap();
        for i in 0..4 {
            assert!((k[[i, i]] - 1.0).abs() <= 1e-10);
            for j in 0..4 {
                assert!((k[[i, j]] - k[[j, i]]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn full_matrix_identity_circuit_all_ones() {
        let (spec, _, x) = small_instance();
        let params = EncodingParams::zeros(&spec);
        let k = full_kernel_matrix(&spec, &params, x.view(), x.view()).unwrap();
        assert!(k.iter().all(|&v| (v - 1.0).abs() <= 1e-12));
    }

    #[test]
    fn full_matrix_matches_centroid_kernel_rows() {
        let (spec, params, x) = small_instance();
        let k = full_kernel_matrix(&spec, &params, x.view(), x.view()).unwrap();
        for j in 0..4 {
            let c = Centroid::new(x.row(j).to_vec(), 1).unwrap();
            let col = centroid_kernel(&spec, &params, x.view(), &c).unwrap();
            for i in 0..4 {
                assert!((k[[i, j]] - col.values[i]).abs() <= 1e-12);
            }
        }
    }
}
