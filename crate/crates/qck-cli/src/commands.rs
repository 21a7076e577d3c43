//! The five subcommands. Reports go to standard output as `key=value`
//! lines for scripting, or as an aligned table with `--pretty`.

use std::path::Path;

use anyhow::{bail, Context, Result};
use ndarray::Array2;

use qck::baseline::rbf_centroid_classify;
use qck::data::{load_csv_raw, relabel, split_and_subsample, Dataset, Normalizer};
use qck::encoding::CircuitSpec;
use qck::metrics::{accuracy, roc_auc};
use qck::train::train;

use crate::config::{load_dataset, DataConfig, RunConfig};
use crate::model_file;

pub struct Report {
    rows: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Report { rows: Vec::new() }
    }

    pub fn push(&mut self, key: &str, value: impl std::fmt::Display) {
        self.rows.push((key.to_string(), value.to_string()));
    }

    pub fn print(&self, pretty: bool) {
        if pretty {
            let width = self.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (key, value) in &self.rows {
                println!("{key:<width$}  {value}");
            }
        } else {
            for (key, value) in &self.rows {
                println!("{key}={value}");
            }
        }
    }
}

fn metric(value: f64) -> String {
    format!("{value:.6}")
}

struct PreparedSplits {
    train: Dataset,
    val: Dataset,
    test: Dataset,
    normalizer: Normalizer,
}

/// Shared split-and-normalize protocol: seeded shuffle into pools, draw
/// the three subsamples, fit min/max on the training split only, scale
/// all three with it.
fn prepare_splits(config: &RunConfig, seed: u64) -> Result<PreparedSplits> {
    let dataset = load_dataset(&config.data)?;
    let split = &config.split;
    let (train_raw, val_raw, test_raw) = split_and_subsample(
        &dataset,
        split.n_train,
        split.n_val,
        split.n_test,
        split.train_frac,
        seed,
    )?;
    let normalizer = Normalizer::fit(&train_raw);
    Ok(PreparedSplits {
        train: normalizer.apply(&train_raw)?,
        val: normalizer.apply(&val_raw)?,
        test: normalizer.apply(&test_raw)?,
        normalizer,
    })
}

pub fn cmd_train(
    config_path: &Path,
    out_path: &Path,
    seed_override: Option<u64>,
    pretty: bool,
) -> Result<()> {
    let (mut config, echo) = RunConfig::load(config_path)?;
    if let Some(seed) = seed_override {
        config.train.seed = seed;
    }
    let splits = prepare_splits(&config, config.train.seed)?;
    let spec = CircuitSpec::new(
        config.circuit.n_qubits,
        config.circuit.n_layers,
        splits.train.n_features(),
    )?;

    let (model, history) = train(&splits.train, &spec, &config.train)?;
    let model = model.with_normalizer(splits.normalizer);

    let (pred_train, scores_train) = model.predict(splits.train.x.view())?;
    let (pred_val, scores_val) = model.predict(splits.val.x.view())?;

    model_file::save(&model, &history, &echo, out_path)?;

    let mut report = Report::new();
    report.push("train_auc", metric(roc_auc(&scores_train, &splits.train.y)?));
    report.push(
        "train_accuracy",
        metric(accuracy(&pred_train, &splits.train.y)?),
    );
    report.push("val_auc", metric(roc_auc(&scores_val, &splits.val.y)?));
    report.push("val_accuracy", metric(accuracy(&pred_val, &splits.val.y)?));
    report.push("steps", history.steps.len());
    report.push("circuit_evaluations", model.circuit_evaluations);
    if let Some(ta) = history.final_ta() {
        report.push("final_ta", metric(ta));
    }
    report.push("seed", model.seed());
    report.push("model", out_path.display());
    report.print(pretty);
    Ok(())
}

/// Load evaluation data for a trained model, honoring the relabel rule
/// embedded in the model's config echo (digit-style datasets keep their
/// raw labels on disk).
fn load_eval_data(model_echo: &str, data_path: &Path) -> Result<Dataset> {
    let config = RunConfig::parse(model_echo)?;
    match config.data {
        DataConfig::Csv {
            positive_max: Some(max),
            ..
        } => {
            let (x, raw, names) = load_csv_raw(data_path)?;
            let y = relabel(&raw, |v| v <= max);
            let mut ds = Dataset::new(x, y)?;
            ds.feature_names = Some(names);
            Ok(ds)
        }
        _ => Ok(qck::data::load_csv(data_path)?),
    }
}

pub fn cmd_eval(model_path: &Path, data_path: &Path, pretty: bool) -> Result<()> {
    let (model, file) = model_file::load(model_path)?;
    let dataset = load_eval_data(&file.config_echo, data_path)?;
    let x = model.normalizer.apply_features(dataset.x.view())?;
    let (pred, scores) = model.predict(x.view())?;

    let mut report = Report::new();
    report.push("auc", metric(roc_auc(&scores, &dataset.y)?));
    report.push("accuracy", metric(accuracy(&pred, &dataset.y)?));
    report.push("n", dataset.n_samples());
    report.push(
        "positives",
        dataset.y.iter().filter(|&&y| y == 1).count(),
    );
    report.print(pretty);
    Ok(())
}

/// Features for prediction: a labeled CSV works (the label column is
/// ignored), and so does a header-only feature CSV without one.
fn load_features(path: &Path) -> Result<Array2<f64>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers = reader.headers()?.clone();
    let label_col = headers.iter().position(|h| h == "label");
    let d = headers.len() - usize::from(label_col.is_some());
    if d == 0 {
        bail!("CSV file has no feature columns");
    }
    let mut values = Vec::new();
    let mut rows = 0usize;
    for record in reader.records() {
        let record = record?;
        for (col, cell) in record.iter().enumerate() {
            if Some(col) == label_col {
                continue;
            }
            let v: f64 = cell.trim().parse().with_context(|| {
                format!(
                    "non-numeric value `{cell}` in column `{}`, data row {rows}",
                    headers.get(col).unwrap_or("?")
                )
            })?;
            values.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        bail!("CSV file has no data rows");
    }
    Ok(Array2::from_shape_vec((rows, d), values)?)
}

pub fn cmd_predict(
    model_path: &Path,
    data_path: &Path,
    out_path: Option<&Path>,
    _pretty: bool,
) -> Result<()> {
    let (model, _) = model_file::load(model_path)?;
    let features = load_features(data_path)?;
    let x = model.normalizer.apply_features(features.view())?;
    let (labels, scores) = model.predict(x.view())?;

    let mut lines = String::from("label,score\n");
    for (label, score) in labels.iter().zip(&scores) {
        lines.push_str(&format!("{label},{score:.16e}\n"));
    }
    match out_path {
        Some(path) => {
            std::fs::write(path, lines)
                .with_context(|| format!("cannot write predictions {}", path.display()))?;
            println!("predictions={}", path.display());
        }
        None => print!("{lines}"),
    }
    Ok(())
}

pub fn cmd_baseline(
    config_path: &Path,
    gamma: Option<f64>,
    seed_override: Option<u64>,
    pretty: bool,
) -> Result<()> {
    let (config, _) = RunConfig::load(config_path)?;
    let seed = seed_override.unwrap_or(config.train.seed);
    let splits = prepare_splits(&config, seed)?;

    let mut report = Report::new();
    for (name, subset) in [("val", &splits.val), ("test", &splits.test)] {
        let (pred, scores) = rbf_centroid_classify(&splits.train, subset.x.view(), gamma)?;
        report.push(&format!("{name}_auc"), metric(roc_auc(&scores, &subset.y)?));
        report.push(
            &format!("{name}_accuracy"),
            metric(accuracy(&pred, &subset.y)?),
        );
    }
    report.push("gamma", match gamma {
        Some(g) => format!("{g}"),
        None => format!("{} (default)", qck::baseline::default_gamma(&splits.train)),
    });
    report.push("seed", seed);
    report.print(pretty);
    Ok(())
}

/// Training-cost bookkeeping: the centroid-kernel schedule evaluates
/// n_epochs * (n_kao + n_co) circuits per training sample, while a
/// pairwise kernel retrained each epoch needs n_epochs * n_train^2; the
/// centroid route wins as soon as n_train exceeds n_kao + n_co.
pub fn cmd_count(n_train: u64, n_epochs: u64, n_kao: u64, n_co: u64, pretty: bool) -> Result<()> {
    let per_step = n_kao.checked_add(n_co).context("n_kao + n_co overflows")?;
    let centroid = (n_epochs as u128) * (per_step as u128) * (n_train as u128);
    let pairwise = (n_epochs as u128) * (n_train as u128) * (n_train as u128);

    let mut report = Report::new();
    report.push("evals_centroid_kernel", centroid);
    report.push("evals_pairwise_kernel", pairwise);
    report.push("crossover_n_train", per_step);
    report.push(
        "cheaper",
        if n_train > per_step {
            "centroid_kernel"
        } else if n_train == per_step {
            "equal"
        } else {
            "pairwise_kernel"
        },
    );
    report.print(pretty);
    Ok(())
}
