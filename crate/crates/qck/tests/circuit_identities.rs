//! Cross-module identities: the simulator-level kernel must equal the
//! hardware-form kernel (encode one sample, un-encode the other, read the
//! all-zeros amplitude), and encoded kernels must respect their bounds.

use ndarray::Array2;
use qck::encoding::{encode, gate_sequence, CircuitSpec, EncodingParams};
use qck::kernel::{target_alignment, KernelVector};
use qck::simulator::StateBatch;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn random_setup(
    rng: &mut ChaCha8Rng,
) -> (CircuitSpec, EncodingParams, Vec<f64>, Vec<f64>) {
    let n_qubits = rng.random_range(1..=3);
    let n_layers = rng.random_range(1..=4);
    let d = rng.random_range(2..=5);
    let spec = CircuitSpec::new(n_qubits, n_layers, d).unwrap();
    let mut params = EncodingParams::init(&spec, 1.2, rng.random()).unwrap();
    for b in params.b.iter_mut() {
        *b = rng.random_range(-0.6..0.6);
    }
    let xi: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
    let xj: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
    (spec, params, xi, xj)
}

#[test]
fn hardware_form_kernel_equals_fidelity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let (spec, params, xi, xj) = random_setup(&mut rng);

        // Fidelity route: encode both samples, overlap their states.
        let x = Array2::from_shape_fn((2, spec.n_features), |(r, c)| {
            if r == 0 {
                xi[c]
            } else {
                xj[c]
            }
        });
        let states = encode(&spec, &params, x.view()).unwrap();
        let fid = states.fidelity(states.row(0)).unwrap()[1];

        // Hardware route: run U(x_j), then the inverted sequence of U(x_i)
        // (reverse order, negated angles), and take the probability of the
        // all-zeros outcome.
        let mut state = StateBatch::zero_state(1, spec.n_qubits).unwrap();
        state
            .apply_ops(&gate_sequence(&spec, &params, &xj).unwrap())
            .unwrap();
        let inverse: Vec<_> = gate_sequence(&spec, &params, &xi)
            .unwrap()
            .into_iter()
            .rev()
            .map(|op| op.inverse())
            .collect();
        state.apply_ops(&inverse).unwrap();
        let hardware = state.row(0)[0].norm_sqr();

        assert!(
            (hardware - fid).abs() <= 1e-10,
            "hardware {hardware} vs fidelity {fid}"
        );
    }
}

#[test]
fn kernels_and_alignment_respect_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..20 {
        let (spec, params, _, _) = random_setup(&mut rng);
        let n = rng.random_range(4..=12);
        let x = Array2::from_shape_fn((n, spec.n_features), |_| rng.random_range(0.0..1.0));
        let states = encode(&spec, &params, x.view()).unwrap();
        let reference = states.row(rng.random_range(0..n)).to_vec();
        let values = states.fidelity(&reference).unwrap();
        assert!(values
            .iter()
            .all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)));

        let mut y: Vec<i8> = (0..n).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
        y[0] = 1;
        let k = KernelVector {
            values,
            centroid_label: if rng.random::<bool>() { 1 } else { -1 },
        };
        let ta = target_alignment(&k, &y).unwrap();
        assert!(ta.abs() <= 1.0 + 1e-12);
    }
}

#[test]
fn row_norms_survive_deep_circuits() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let spec = CircuitSpec::new(3, 12, 4).unwrap();
    let params = EncodingParams::init(&spec, 2.0, 8).unwrap();
    let x = Array2::from_shape_fn((6, 4), |_| rng.random_range(0.0..1.0));
    let states = encode(&spec, &params, x.view()).unwrap();
    for norm in states.row_norms_sqr() {
        assert!((norm - 1.0).abs() <= 1e-10);
    }
}
