//! Trainable data encoding.
//!
//! A sample x is mapped to a state by m' layers, each consisting of one
//! general rotation per qubit followed by a CNOT ring. The rotation
//! angles mix the sample's features with trainable weights and biases,
//! theta = w * x_k + b, where the feature index k walks cyclically
//! through all features as the layers progress. Centroids are encoded by
//! the same map, so both classes live in the same state space.

use ndarray::ArrayView2;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::simulator::{GateOp, StateBatch};
use crate::{Error, Result};

/// Circuit geometry: register width, layer count, and the feature count
/// the angle map cycles over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CircuitSpec {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub n_features: usize,
}

impl CircuitSpec {
    pub fn new(n_qubits: usize, n_layers: usize, n_features: usize) -> Result<Self> {
        if n_qubits == 0 || n_layers == 0 || n_features == 0 {
            return Err(Error::InvalidParameter(
                "n_qubits, n_layers, n_features must all be >= 1".into(),
            ));
        }
        let spec = CircuitSpec {
            n_qubits,
            n_layers,
            n_features,
        };
        if spec.n_params() < n_features {
            log::warn!(
                "{} rotation angles < {} features: some features are never encoded",
                spec.n_params(),
                n_features
            );
        }
        Ok(spec)
    }

    /// Rotation angles per layer (3 per qubit).
    pub fn params_per_layer(&self) -> usize {
        3 * self.n_qubits
    }

    /// Total rotation angles, which is also the length of each of w and b.
    pub fn n_params(&self) -> usize {
        self.n_layers * self.params_per_layer()
    }

    /// Feature index used by parameter slot i of layer m.
    #[inline]
    pub fn feature_index(&self, layer: usize, slot: usize) -> usize {
        (self.params_per_layer() * layer + slot) % self.n_features
    }
}

/// Trainable weights and biases, both flattened layer-major with
/// `params_per_layer` entries per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingParams {
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl EncodingParams {
    /// Weights drawn i.i.d. uniform on [-scale, scale] from a seeded
    /// generator, biases all zero.
    pub fn init(spec: &CircuitSpec, scale: f64, seed: u64) -> Result<Self> {
        if scale <= 0.0 {
            return Err(Error::InvalidParameter("init scale must be > 0".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = (0..spec.n_params())
            .map(|_| rng.random_range(-scale..=scale))
            .collect();
        Ok(EncodingParams {
            w,
            b: vec![0.0; spec.n_params()],
        })
    }

    pub fn zeros(spec: &CircuitSpec) -> Self {
        EncodingParams {
            w: vec![0.0; spec.n_params()],
            b: vec![0.0; spec.n_params()],
        }
    }

    /// Squared 2-norm of the weights over all layers and slots.
    pub fn weight_norm_sqr(&self) -> f64 {
        self.w.iter().map(|w| w * w).sum()
    }

    fn check(&self, spec: &CircuitSpec) -> Result<()> {
        if self.w.len() != spec.n_params() || self.b.len() != spec.n_params() {
            return Err(Error::DimensionMismatch {
                expected: spec.n_params(),
                got: self.w.len(),
            });
        }
        Ok(())
    }
}

/// A class proxy point in data space. Coordinates may leave [0, 1] during
/// optimization; they are penalized, never clamped.
#[derive(Debug, Clone, PartialEq)]
pub struct Centroid {
    pub coords: Vec<f64>,
    pub label: i8,
}

impl Centroid {
    pub fn new(coords: Vec<f64>, label: i8) -> Result<Self> {
        if label != 1 && label != -1 {
            return Err(Error::InvalidParameter(format!(
                "centroid label must be +1 or -1, got {label}"
            )));
        }
        Ok(Centroid { coords, label })
    }
}

/// Bound rotation angles of one sample, flattened layer-major like the
/// parameters they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct GateAngles {
    pub values: Vec<f64>,
    pub n_layers: usize,
    pub per_layer: usize,
}

impl GateAngles {
    #[inline]
    pub fn get(&self, layer: usize, slot: usize) -> f64 {
        self.values[layer * self.per_layer + slot]
    }
}

/// theta[m, i] = w[m, i] * x_k + b[m, i] with k cycling over the features.
pub fn gate_angles(spec: &CircuitSpec, params: &EncodingParams, x: &[f64]) -> Result<GateAngles> {
    params.check(spec)?;
    if x.len() != spec.n_features {
        return Err(Error::DimensionMismatch {
            expected: spec.n_features,
            got: x.len(),
        });
    }
    let per_layer = spec.params_per_layer();
    let mut values = Vec::with_capacity(spec.n_params());
    for layer in 0..spec.n_layers {
        for slot in 0..per_layer {
            let p = layer * per_layer + slot;
            let k = spec.feature_index(layer, slot);
            values.push(params.w[p] * x[k] + params.b[p]);
        }
    }
    Ok(GateAngles {
        values,
        n_layers: spec.n_layers,
        per_layer,
    })
}

/// The CNOT ring wiring appended after each rotation layer: q -> q+1 for
/// ascending q, then the closing n-1 -> 0. Skipped entirely for a single
/// qubit.
pub fn ring_wiring(n_qubits: usize) -> Vec<(usize, usize)> {
    if n_qubits < 2 {
        return Vec::new();
    }
    let mut wires: Vec<(usize, usize)> = (0..n_qubits - 1).map(|q| (q, q + 1)).collect();
    wires.push((n_qubits - 1, 0));
    wires
}

/// Bound single-sample gate sequence: per layer, one Rz/Ry/Rz triple per
/// qubit (slots 3q, 3q+1, 3q+2 as phi, theta, omega) followed by the ring.
pub fn gate_sequence(
    spec: &CircuitSpec,
    params: &EncodingParams,
    x: &[f64],
) -> Result<Vec<GateOp>> {
    let angles = gate_angles(spec, params, x)?;
    let mut ops = Vec::new();
    for layer in 0..spec.n_layers {
        for q in 0..spec.n_qubits {
            ops.push(GateOp::Rz {
                qubit: q,
                angle: angles.get(layer, 3 * q),
            });
            ops.push(GateOp::Ry {
                qubit: q,
                angle: angles.get(layer, 3 * q + 1),
            });
            ops.push(GateOp::Rz {
                qubit: q,
                angle: angles.get(layer, 3 * q + 2),
            });
        }
        for (control, target) in ring_wiring(spec.n_qubits) {
            ops.push(GateOp::Cnot { control, target });
        }
    }
    Ok(ops)
}

/// Encode a batch of samples, one row per sample, starting from the
/// all-zeros state. Column counts must match the spec's feature count.
pub fn encode(spec: &CircuitSpec, params: &EncodingParams, x: ArrayView2<f64>) -> Result<StateBatch> {
    encode_shifted(spec, params, x, None)
}

/// Encode with one flat parameter slot's angle shifted by `delta` in every
/// row. The shift applies to the bound angle theta, after the w*x+b map.
pub(crate) fn encode_shifted(
    spec: &CircuitSpec,
    params: &EncodingParams,
    x: ArrayView2<f64>,
    shift: Option<(usize, f64)>,
) -> Result<StateBatch> {
    params.check(spec)?;
    if x.ncols() != spec.n_features {
        return Err(Error::DimensionMismatch {
            expected: spec.n_features,
            got: x.ncols(),
        });
    }
    let batch = x.nrows();
    if batch == 0 {
        return Err(Error::InvalidParameter("empty batch".into()));
    }
    let mut state = StateBatch::zero_state(batch, spec.n_qubits)?;
    let per_layer = spec.params_per_layer();
    let ring = ring_wiring(spec.n_qubits);

    let angle_col = |layer: usize, slot: usize| -> Vec<f64> {
        let p = layer * per_layer + slot;
        let k = spec.feature_index(layer, slot);
        let delta = match shift {
            Some((target, d)) if target == p => d,
            _ => 0.0,
        };
        x.column(k)
            .iter()
            .map(|&xv| params.w[p] * xv + params.b[p] + delta)
            .collect()
    };

    for layer in 0..spec.n_layers {
        for q in 0..spec.n_qubits {
            let phi = angle_col(layer, 3 * q);
            let theta = angle_col(layer, 3 * q + 1);
            let omega = angle_col(layer, 3 * q + 2);
            state.rot(q, &phi, &theta, &omega)?;
        }
        for &(control, target) in &ring {
            state.cnot(control, target)?;
        }
    }
    Ok(state)
}

/// Encode one sample and return its amplitude vector.
pub fn encode_single(spec: &CircuitSpec, params: &EncodingParams, x: &[f64]) -> Result<Vec<Complex64>> {
    let view = ArrayView2::from_shape((1, x.len()), x)
        .map_err(|_| Error::InvalidParameter("sample view".into()))?;
    Ok(encode(spec, params, view)?.row(0).to_vec())
}
