//! Three independent gradient engines for the two losses.
//!
//! - [`kao_reverse`] / [`co_reverse`]: exact reverse-mode accumulation
//!   through the fidelity and the state evolution (the training path).
//! - [`kao_param_shift`] / [`co_param_shift`]: gate-level shifted
//!   evaluations at theta +/- pi/2, chained through the linear angle map.
//!   Valid here because every angle drives a single RZ or RY gate, whose
//!   generator has eigenvalues +/- 1/2.
//! - [`kao_fd`] / [`co_fd`]: central finite differences on the whole
//!   loss, the dumb oracle the other two are checked against.
//!
//! All three differentiate the same scalar losses, so they must agree to
//! numerical precision; the test suites hold them to that.

use std::f64::consts::FRAC_PI_2;

use ndarray::ArrayView2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::encoding::{
    self, encode, encode_shifted, encode_single, gate_angles, Centroid, CircuitSpec,
    EncodingParams, GateAngles,
};
use crate::kernel::{alignment_sums, boundary_penalty, boundary_penalty_slope, KernelVector};
use crate::simulator::{apply_cnot_row, apply_rz_row, apply_ry_row, qubit_mask, StateBatch};
use crate::{Error, Result};

/// Gradient of the alignment loss with respect to weights and biases.
#[derive(Debug, Clone)]
pub struct KaoGrad {
    pub loss: f64,
    pub ta: f64,
    pub d_w: Vec<f64>,
    pub d_b: Vec<f64>,
}

/// Gradient of the centroid loss with respect to the centroid coordinates.
#[derive(Debug, Clone)]
pub struct CoGrad {
    pub loss: f64,
    pub ta: f64,
    pub d_c: Vec<f64>,
}

/// Everything both loss gradients need from one pass over the data:
/// encoded states, the centroid state, overlaps o_i = <psi_c|psi_i>,
/// the kernel, the alignment, and dL/dk_i of the (1 - TA) term.
struct ForwardPass {
    states: StateBatch,
    centroid_state: Vec<Complex64>,
    overlaps: Vec<Complex64>,
    ta: f64,
    dl_dk: Vec<f64>,
}

fn forward(
    spec: &CircuitSpec,
    params: &EncodingParams,
    x: ArrayView2<f64>,
    y: &[i8],
    c: &Centroid,
) -> Result<ForwardPass> {
    if c.coords.len() != spec.n_features {
        return Err(Error::DimensionMismatch {
            expected: spec.n_features,
            got: c.coords.len(),
        });
    }
    let states = encode(spec, params, x)?;
    let centroid_state = encode_single(spec, params, &c.coords)?;
    let overlaps = states.overlaps(&centroid_state)?;
    let kernel: Vec<f64> = overlaps.iter().map(|o| o.norm_sqr()).collect();
    let kv = KernelVector {
        values: kernel.clone(),
        centroid_label: c.label,
    };
    let (num, k_sqr, y_sqr) = alignment_sums(&kv, y)?;
    let denom = (k_sqr * y_sqr).sqrt();
    let ta = num / denom;
    let l = f64::from(c.label);
    // TA = num / sqrt(S*Y) with num = l * sum y_i k_i and S = sum k_i^2,
    // so dTA/dk_i = l*y_i/D - TA*k_i/S, and dL/dk_i negates that.
    let dl_dk = kernel
        .iter()
        .zip(y)
        .map(|(ki, &yi)| -(l * f64::from(yi) / denom - ta * ki / k_sqr))
        .collect();
    Ok(ForwardPass {
        states,
        centroid_state,
        overlaps,
        ta,
        dl_dk,
    })
}

// dtheta for an RZ gate at the current (phi, mu) position of the backward
// walk: 2 Re <mu| (-i Z/2) |phi> = Im(c0 - c1) over the bit-0/bit-1 sums.
fn rz_angle_grad(mu: &[Complex64], phi: &[Complex64], n_qubits: usize, qubit: usize) -> f64 {
    let mask = qubit_mask(n_qubits, qubit);
    let mut c0 = Complex64::ZERO;
    let mut c1 = Complex64::ZERO;
    for idx in 0..phi.len() {
        let term = mu[idx].conj() * phi[idx];
        if idx & mask == 0 {
            c0 += term;
        } else {
            c1 += term;
        }
    }
    (c0 - c1).im
}

// Same for an RY gate: (-i Y/2) maps the pair (a0, a1) to (-a1/2, a0/2),
// so 2 Re <mu| . |phi> telescopes to the sum below.
fn ry_angle_grad(mu: &[Complex64], phi: &[Complex64], n_qubits: usize, qubit: usize) -> f64 {
    let mask = qubit_mask(n_qubits, qubit);
    let mut acc = 0.0;
    for idx in 0..phi.len() {
        if idx & mask == 0 {
            let p0 = idx;
            let p1 = idx | mask;
            acc += (mu[p1].conj() * phi[p0] - mu[p0].conj() * phi[p1]).re;
        }
    }
    acc
}

/// Walk the encoding circuit backward, undoing gates on both the state
/// `phi` (the circuit's final state) and the adjoint vector `mu`, and
/// collect d(2 Re<mu|psi>)/d(angle) for every flat parameter slot.
fn backward_angle_grads(
    spec: &CircuitSpec,
    angles: &GateAngles,
    mut phi: Vec<Complex64>,
    mut mu: Vec<Complex64>,
) -> Vec<f64> {
    let n = spec.n_qubits;
    let per_layer = spec.params_per_layer();
    let ring = encoding::ring_wiring(n);
    let mut d_theta = vec![0.0; spec.n_params()];
    for layer in (0..spec.n_layers).rev() {
        for &(control, target) in ring.iter().rev() {
            apply_cnot_row(&mut phi, n, control, target);
            apply_cnot_row(&mut mu, n, control, target);
        }
        for q in (0..n).rev() {
            // Forward order per qubit was RZ(phi_a), RY(theta_a), RZ(omega_a)
            // on slots 3q, 3q+1, 3q+2; undo in reverse.
            for (slot, is_ry) in [(3 * q + 2, false), (3 * q + 1, true), (3 * q, false)] {
                let angle = angles.get(layer, slot);
                let p = layer * per_layer + slot;
                if is_ry {
                    d_theta[p] = ry_angle_grad(&mu, &phi, n, q);
                    apply_ry_row(&mut phi, n, q, -angle);
                    apply_ry_row(&mut mu, n, q, -angle);
                } else {
                    d_theta[p] = rz_angle_grad(&mu, &phi, n, q);
                    apply_rz_row(&mut phi, n, q, -angle);
                    apply_rz_row(&mut mu, n, q, -angle);
                }
            }
        }
    }
    d_theta
}

/// Angle gradients of the centroid circuit, accumulated over all samples
/// through the single effective adjoint vector
/// chi = sum_i dL/dk_i * conj(o_i) * psi_i.
fn centroid_angle_grads(
    spec: &CircuitSpec,
    params: &EncodingParams,
    c: &Centroid,
    fw: &ForwardPass,
) -> Result<Vec<f64>> {
    let dim = fw.states.dim();
    let mut chi = vec![Complex64::ZERO; dim];
    for i in 0..fw.states.batch_size() {
        let scale = fw.dl_dk[i] * fw.overlaps[i].conj();
        for (acc, amp) in chi.iter_mut().zip(fw.states.row(i)) {
            *acc += scale * amp;
        }
    }
    let c_angles = gate_angles(spec, params, &c.coords)?;
    Ok(backward_angle_grads(
        spec,
        &c_angles,
        fw.centroid_state.clone(),
        chi,
    ))
}

/// Per-sample angle gradients: for sample i the effective adjoint vector
/// is dL/dk_i * o_i * psi_c.
fn sample_angle_grads(
    spec: &CircuitSpec,
    params: &EncodingParams,
    x: ArrayView2<f64>,
    fw: &ForwardPass,
) -> Result<Vec<Vec<f64>>> {
    (0..fw.states.batch_size())
        .into_par_iter()
        .map(|i| {
            let row: Vec<f64> = x.row(i).to_vec();
            let angles = gate_angles(spec, params, &row)?;
            let scale = fw.dl_dk[i] * fw.overlaps[i];
            let mu: Vec<Complex64> = fw.centroid_state.iter().map(|a| scale * a).collect();
            Ok(backward_angle_grads(
                spec,
                &angles,
                fw.states.row(i).to_vec(),
                mu,
            ))
        })
        .collect()
}

/// Exact reverse-mode gradient of the alignment loss with respect to all
/// weights and biases jointly. The centroid circuit also depends on w and
/// b, so both the sample side and the centroid side contribute.
pub fn kao_reverse(
    spec: &CircuitSpec,
    params: &EncodingParams,
    x: ArrayView2<f64>,
    y: &[i8],
    c: &Centroid,
    lambda: f64,
) -> Result<KaoGrad> {
    let fw = forward(spec, params, x, y, c)?;
    let per_sample = sample_angle_grads(spec, params, x, &fw)?;
    let d_theta_centroid = centroid_angle_grads(spec, params, c, &fw)?;

    let n_params = spec.n_params();
    let per_layer = spec.params_per_layer();
    let mut d_w = vec![0.0; n_params];
    let mut d_b = vec![0.0; n_params];
    for (i, d_theta) in per_sample.iter().enumerate() {
        for p in 0..n_params {
            let k = spec.feature_index(p / per_layer, p % per_layer);
            d_w[p] += d_theta[p] * x[[i, k]];
            d_b[p] += d_theta[p];
        }
    }
    for p in 0..n_params {
        let k = spec.feature_index(p / per_layer, p % per_layer);
        d_w[p] += d_theta_centroid[p] * c.coords[k];
        d_b[p] += d_theta_centroid[p];
        d_w[p] += 2.0 * lambda * params.w[p];
    }
    Ok(KaoGrad {
        loss: 1.0 - fw.ta + lambda * params.weight_norm_sqr(),
        ta: fw.ta,
        d_w,
        d_b,
    })
}

/// Exact reverse-mode gradient of the centroid loss with respect to the
/// centroid coordinates. Only the centroid circuit depends on them;
/// d(theta)/d(c_k) = w for the slots that encode feature k.
pub fn co_reverse(
    spec: &CircuitSpec,
    params: &EncodingParams,
    x: ArrayView2<f64>,
    y: &[i8],
    c: &Centroid,
    lambda: f64,
) -> Result<CoGrad> {
    let fw = forward(spec, params, x, y, c)?;
    let d_theta_centroid = centroid_angle_grads(spec, params, c, &fw)?;

    let per_layer = spec.params_per_layer();
    let mut d_c = vec![0.0; spec.n_features];
    for (p, d_theta) in d_theta_centroid.iter().enumerate() {
        let k = spec.feature_index(p / per_layer, p % per_layer);
        d_c[k] += d_theta * params.w[p];
    }
    for (dc, slope) in d_c.iter_mut().zip(boundary_penalty_slope(c)) {
        *dc += lambda * slope;
    }
    Ok(CoGrad {
        loss: 1.0 - fw.ta + lambda * boundary_penalty(c),
        ta: fw.ta,
        d_c,
    })
}

fn shifted_centroid_state(
    spec: &CircuitSpec,
    params: &EncodingParams,
    c: &Centroid,
    slot: usize,
    delta: f64,
) -> Result<Vec<Complex64>> {
    let view = ArrayView2::from_shape((1, c.coords.len()), &c.coords)
        .map_err(|_| Error::InvalidParameter("centroid view".into()))?;
    Ok(encode_shifted(spec, params, view, Some((slot, delta)))?
        .row(0)
        .to_vec())
}

/// Parameter-shift gradient of the alignment loss.
pub fn kao_param_shift(
    spec: &CircuitSpec,
    params: &EncodingParams,
    x: ArrayView2<f64>,
    y: &[i8],
    c: &Centroid,
    lambda: f64,
) -> Result<KaoGrad> {
    let fw = forward(spec, params, x, y, c)?;
    let n_params = spec.n_params();
    let per_layer = spec.params_per_layer();
    let batch = fw.states.batch_size();

    let mut d_w = vec![0.0; n_params];
    let mut d_b = vec![0.0; n_params];
    for p in 0..n_params {
        // Sample side: shifting slot p of each row's own circuit only
        // moves that row's kernel entry, so one batched pass per sign
        // yields every sample's shifted kernel at once.
        let k_plus = encode_shifted(spec, params, x, Some((p, FRAC_PI_2)))?
            .fidelity(&fw.centroid_state)?;
        let k_minus = encode_shifted(spec, params, x, Some((p, -FRAC_PI_2)))?
            .fidelity(&fw.centroid_state)?;
        // Centroid side: shifting slot p of the centroid circuit moves
        // every kernel entry through the shared centroid state.
        let c_plus = shifted_centroid_state(spec, params, c, p, FRAC_PI_2)?;
        let c_minus = shifted_centroid_state(spec, params, c, p, -FRAC_PI_2)?;
        let kc_plus = fw.states.fidelity(&c_plus)?;
        let kc_minus = fw.states.fidelity(&c_minus)?;

        let k = spec.feature_index(p / per_layer, p % per_layer);
        for i in 0..batch {
            let dk_sample = 0.5 * (k_plus[i] - k_minus[i]);
            let dk_centroid = 0.5 * (kc_plus[i] - kc_minus[i]);
            d_w[p] += fw.dl_dk[i] * (dk_sample * x[[i, k]] + dk_centroid * c.coords[k]);
            d_b[p] += fw.dl_dk[i] * (dk_sample + dk_centroid);
        }
        d_w[p] += 2.0 * lambda * params.w[p];
    }
    Ok(KaoGrad {
        loss: 1.0 - fw.ta + lambda * params.weight_norm_sqr(),
        ta: fw.ta,
        d_w,
        d_b,
    })
}

/// Parameter-shift gradient of the centroid loss.
pub fn co_param_shift(
    spec: &CircuitSpec,
    params: &EncodingParams,
    x: ArrayView2<f64>,
    y: &[i8],
    c: &Centroid,
    lambda: f64,
) -> Result<CoGrad> {
    let fw = forward(spec, params, x, y, c)?;
    let per_layer = spec.params_per_layer();
    let batch = fw.states.batch_size();

    let mut d_c = vec![0.0; spec.n_features];
    for p in 0..spec.n_params() {
        let c_plus = shifted_centroid_state(spec, params, c, p, FRAC_PI_2)?;
        let c_minus = shifted_centroid_state(spec, params, c, p, -FRAC_PI_2)?;
        let kc_plus = fw.states.fidelity(&c_plus)?;
        let kc_minus = fw.states.fidelity(&c_minus)?;
        let k = spec.feature_index(p / per_layer, p % per_layer);
        for i in 0..batch {
            let dk_centroid = 0.5 * (kc_plus[i] - kc_minus[i]);
            d_c[k] += fw.dl_dk[i] * dk_centroid * params.w[p];
        }
    }
    for (dc, slope) in d_c.iter_mut().zip(boundary_penalty_slope(c)) {
        *dc += lambda * slope;
    }
    Ok(CoGrad {
        loss: 1.0 - fw.ta + lambda * boundary_penalty(c),
        ta: fw.ta,
        d_c,
    })
}

fn check_fd_step(step: f64) -> Result<()> {
    if !(1e-7..=1e-3).contains(&step) {
        return Err(Error::InvalidParameter(format!(
            "finite-difference step {step} outside [1e-7, 1e-3]"
        )));
    }
    Ok(())
}

/// Central finite differences on the alignment loss, one coordinate at a
/// time. Slow and approximate; the oracle the exact engines answer to.
pub fn kao_fd(
    spec: &CircuitSpec,
    params: &EncodingParams,
    x: ArrayView2<f64>,
    y: &[i8],
    c: &Centroid,
    lambda: f64,
    step: f64,
) -> Result<KaoGrad> {
    check_fd_step(step)?;
    let fw = forward(spec, params, x, y, c)?;
    let loss_at = |params: &EncodingParams| -> Result<f64> {
        crate::kernel::kao_loss(spec, params, x, y, c, lambda)
    };
    let n_params = spec.n_params();
    let mut d_w = vec![0.0; n_params];
    let mut d_b = vec![0.0; n_params];
    let mut probe = params.clone();
    for p in 0..n_params {
        let orig = probe.w[p];
        probe.w[p] = orig + step;
        let up = loss_at(&probe)?;
        probe.w[p] = orig - step;
        let down = loss_at(&probe)?;
        probe.w[p] = orig;
        d_w[p] = (up - down) / (2.0 * step);

        let orig = probe.b[p];
        probe.b[p] = orig + step;
        let up = loss_at(&probe)?;
        probe.b[p] = orig - step;
        let down = loss_at(&probe)?;
        probe.b[p] = orig;
        d_b[p] = (up - down) / (2.0 * step);
    }
    Ok(KaoGrad {
        loss: 1.0 - fw.ta + lambda * params.weight_norm_sqr(),
        ta: fw.ta,
        d_w,
        d_b,
    })
}

/// Central finite differences on the centroid loss.
pub fn co_fd(
    spec: &CircuitSpec,
    params: &EncodingParams,
    x: ArrayView2<f64>,
    y: &[i8],
    c: &Centroid,
    lambda: f64,
    step: f64,
) -> Result<CoGrad> {
    check_fd_step(step)?;
    let fw = forward(spec, params, x, y, c)?;
    let mut d_c = vec![0.0; spec.n_features];
    let mut probe = c.clone();
    for k in 0..spec.n_features {
        let orig = probe.coords[k];
        probe.coords[k] = orig + step;
        let up = crate::kernel::co_loss(spec, params, x, y, &probe, lambda)?;
        probe.coords[k] = orig - step;
        let down = crate::kernel::co_loss(spec, params, x, y, &probe, lambda)?;
        probe.coords[k] = orig;
        d_c[k] = (up - down) / (2.0 * step);
    }
    Ok(CoGrad {
        loss: 1.0 - fw.ta + lambda * boundary_penalty(c),
        ta: fw.ta,
        d_c,
    })
}
