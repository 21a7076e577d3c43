// Scratch calibration runs (not part of the deliverable test suite).
use qck::data::{split_and_subsample, synth_blobs, synth_xor, Dataset, Normalizer};
use qck::encoding::CircuitSpec;
use qck::metrics::roc_auc;
use qck::train::{train, Optimizer, TrainConfig};

fn run(ds: &Dataset, n_train: usize, spec: &CircuitSpec, config: &TrainConfig, tag: &str) {
    let (tr, va, te) = split_and_subsample(ds, n_train, 100, 100, 0.7, config.seed).unwrap();
    let norm = Normalizer::fit(&tr);
    let trn = norm.apply(&tr).unwrap();
    let van = norm.apply(&va).unwrap();
    let ten = norm.apply(&te).unwrap();
    let t0 = std::time::Instant::now();
    let (model, hist) = train(&trn, spec, config).unwrap();
    let (_, sc_tr) = model.predict(trn.x.view()).unwrap();
    let (_, sc_va) = model.predict(van.x.view()).unwrap();
    let (_, sc_te) = model.predict(ten.x.view()).unwrap();
    println!(
        "{tag} seed={} train_auc={:.4} val_auc={:.4} test_auc={:.4} final_ta={:.4} elapsed={:.1?}",
        config.seed,
        roc_auc(&sc_tr, &trn.y).unwrap(),
        roc_auc(&sc_va, &van.y).unwrap(),
        roc_auc(&sc_te, &ten.y).unwrap(),
        hist.final_ta().unwrap_or(f64::NAN),
        t0.elapsed()
    );
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(String::as_str).unwrap_or("blobs");

    if which == "blobs" {
        // criterion-5 shape: n=200 train, d=4, 4 qubits, 6 layers, 10 epochs
        for sep in [0.15, 0.2, 0.25] {
            for (lr_kao, lr_co, n_kao, n_co) in
                [(0.5, 0.5, 5usize, 5usize), (1.0, 0.5, 10, 10), (0.5, 0.1, 10, 10)]
            {
                for seed in [42u64, 123, 1234] {
                    let ds = synth_blobs(700, 4, sep, 1000 + seed).unwrap();
                    let spec = CircuitSpec::new(4, 6, 4).unwrap();
                    let config = TrainConfig {
                        n_epochs: 10,
                        n_kao,
                        n_co,
                        lr_kao,
                        lr_co,
                        r_decay: 0.9,
                        lambda_kao: 0.001,
                        lambda_co: 0.001,
                        init_scale: 0.1,
                        seed,
                        optimizer: Optimizer::GradientDescent,
                    };
                    run(
                        &ds,
                        200,
                        &spec,
                        &config,
                        &format!("blobs sep={sep} lr=({lr_kao},{lr_co}) k/c=({n_kao},{n_co})"),
                    );
                }
            }
        }
    } else if which == "mnist-shape" {
        // Timing probe at the 784-feature scale: one KAO gradient step and
        // one CO gradient step over 1000 samples, 5 qubits, 53 layers.
        use qck::encoding::EncodingParams;
        use qck::grad;
        use qck::train::class_means;
        let ds = synth_blobs(1000, 784, 0.5, 5).unwrap();
        let spec = CircuitSpec::new(5, 53, 784).unwrap();
        let params = EncodingParams::init(&spec, 0.1, 42).unwrap();
        let (pos, _neg) = class_means(ds.x.view(), &ds.y).unwrap();
        let t0 = std::time::Instant::now();
        let g = grad::kao_reverse(&spec, &params, ds.x.view(), &ds.y, &pos, 0.001).unwrap();
        let kao_time = t0.elapsed();
        let t1 = std::time::Instant::now();
        let c = grad::co_reverse(&spec, &params, ds.x.view(), &ds.y, &pos, 0.001).unwrap();
        let co_time = t1.elapsed();
        println!(
            "kao_step={kao_time:.2?} co_step={co_time:.2?} loss={:.4}/{:.4} est_total(40 epochs,10+10)={:.1?}",
            g.loss,
            c.loss,
            (kao_time + co_time) * 400
        );
    } else if which == "xor-adam" {
        for (layers, qubits, lr, epochs, n_kao, n_co) in [
            (10usize, 2usize, 0.1, 30usize, 10usize, 5usize),
            (12, 2, 0.05, 40, 10, 5),
            (12, 3, 0.1, 30, 10, 5),
            (16, 2, 0.1, 40, 10, 5),
        ] {
            for seed in [42u64, 123, 1234] {
                let ds = synth_xor(700, 2000 + seed).unwrap();
                let spec = CircuitSpec::new(qubits, layers, 2).unwrap();
                let config = TrainConfig {
                    n_epochs: epochs,
                    n_kao,
                    n_co,
                    lr_kao: lr,
                    lr_co: lr,
                    r_decay: 0.98,
                    lambda_kao: 0.001,
                    lambda_co: 0.001,
                    init_scale: 0.1,
                    seed,
                    optimizer: Optimizer::AdaptiveMoment,
                };
                run(
                    &ds,
                    200,
                    &spec,
                    &config,
                    &format!("xor-adam L={layers} q={qubits} lr={lr} e={epochs}"),
                );
            }
        }
    } else if which == "rings" {
        use ndarray::Array2;
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let make = |n: usize, seed: u64| -> Dataset {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut x = Array2::zeros((n, 2));
            let mut y = Vec::with_capacity(n);
            for i in 0..n {
                let label: i8 = if i % 2 == 0 { 1 } else { -1 };
                let r = if label == 1 {
                    rng.random_range(0.0..0.15)
                } else {
                    rng.random_range(0.25..0.40)
                };
                let phi = rng.random_range(0.0..std::f64::consts::TAU);
                x[[i, 0]] = 0.5 + r * phi.cos();
                x[[i, 1]] = 0.5 + r * phi.sin();
                y.push(label);
            }
            Dataset::new(x, y).unwrap()
        };
        for (layers, qubits, lr_kao, lr_co, epochs) in [
            (6usize, 2usize, 0.5, 0.5, 10usize),
            (6, 2, 1.0, 0.5, 10),
            (8, 2, 1.0, 0.5, 15),
            (8, 3, 1.0, 0.5, 15),
        ] {
            for seed in [42u64, 123, 1234] {
                let ds = make(700, 4000 + seed);
                let spec = CircuitSpec::new(qubits, layers, 2).unwrap();
                let config = TrainConfig {
                    n_epochs: epochs,
                    n_kao: 10,
                    n_co: 10,
                    lr_kao,
                    lr_co,
                    r_decay: 0.9,
                    lambda_kao: 0.001,
                    lambda_co: 0.001,
                    init_scale: 0.1,
                    seed,
                    optimizer: Optimizer::GradientDescent,
                };
                run(
                    &ds,
                    200,
                    &spec,
                    &config,
                    &format!("rings L={layers} q={qubits} lr=({lr_kao},{lr_co}) e={epochs}"),
                );
            }
        }
    } else if which == "cxor" {
        // Clustered XOR: four tight blobs at square corners, diagonal
        // corners share a class, so both class means sit at the center.
        use ndarray::Array2;
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        use rand_distr::{Distribution, Normal};
        let make = |n: usize, seed: u64| -> Dataset {
            let normal = Normal::new(0.0, 0.04).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let corners: [([f64; 2], i8); 4] = [
                ([0.25, 0.25], 1),
                ([0.75, 0.75], 1),
                ([0.25, 0.75], -1),
                ([0.75, 0.25], -1),
            ];
            let mut x = Array2::zeros((n, 2));
            let mut y = Vec::with_capacity(n);
            for i in 0..n {
                let (corner, label) = corners[i % 4];
                x[[i, 0]] = (corner[0] + normal.sample(&mut rng)).clamp(0.0, 1.0);
                x[[i, 1]] = (corner[1] + normal.sample(&mut rng)).clamp(0.0, 1.0);
                y.push(label);
            }
            Dataset::new(x, y).unwrap()
        };
        for (layers, qubits, lr_kao, lr_co, epochs) in [
            (8usize, 2usize, 1.0, 0.5, 15usize),
            (8, 2, 2.0, 0.5, 20),
            (12, 2, 2.0, 0.5, 20),
            (12, 2, 5.0, 1.0, 30),
            (16, 2, 5.0, 1.0, 30),
        ] {
            for seed in [42u64, 123, 1234] {
                let ds = make(700, 3000 + seed);
                let spec = CircuitSpec::new(qubits, layers, 2).unwrap();
                let config = TrainConfig {
                    n_epochs: epochs,
                    n_kao: 10,
                    n_co: 10,
                    lr_kao,
                    lr_co,
                    r_decay: 0.95,
                    lambda_kao: 0.001,
                    lambda_co: 0.001,
                    init_scale: 0.1,
                    seed,
                    optimizer: Optimizer::GradientDescent,
                };
                run(
                    &ds,
                    200,
                    &spec,
                    &config,
                    &format!("cxor L={layers} q={qubits} lr=({lr_kao},{lr_co}) e={epochs}"),
                );
            }
        }
    } else if which == "xor" {
        for (layers, qubits, lr_kao, lr_co, epochs) in [
            (12usize, 2usize, 2.0, 0.5, 30usize),
            (16, 2, 2.0, 0.5, 30),
            (16, 2, 5.0, 1.0, 40),
        ] {
            for seed in [42u64, 123, 1234] {
                let ds = synth_xor(700, 2000 + seed).unwrap();
                let spec = CircuitSpec::new(qubits, layers, 2).unwrap();
                let config = TrainConfig {
                    n_epochs: epochs,
                    n_kao: 10,
                    n_co: 10,
                    lr_kao,
                    lr_co,
                    r_decay: 0.9,
                    lambda_kao: 0.001,
                    lambda_co: 0.001,
                    init_scale: 0.1,
                    seed,
                    optimizer: Optimizer::GradientDescent,
                };
                run(
                    &ds,
                    200,
                    &spec,
                    &config,
                    &format!("xor L={layers} q={qubits} lr=({lr_kao},{lr_co}) e={epochs}"),
                );
            }
        }
    }
}
