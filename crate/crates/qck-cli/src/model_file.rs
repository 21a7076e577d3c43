//! Trained-model persistence.
//!
//! Versioned JSON with every float rendered as a 17-significant-digit
//! decimal string, which is enough to pin down any double exactly, so a
//! save/load round trip reproduces the model bit for bit. The raw run
//! configuration is embedded verbatim.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use qck::data::Normalizer;
use qck::encoding::{Centroid, CircuitSpec, EncodingParams};
use qck::train::{Model, TrainHistory};
use qck::Phase;

use crate::config::RunConfig;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format_version: u32,
    pub n_qubits: usize,
    pub n_layers: usize,
    pub n_features: usize,
    /// Flattened layer-major, 3 * n_qubits entries per layer.
    pub weights: Vec<String>,
    pub biases: Vec<String>,
    pub centroid_pos: Vec<String>,
    pub centroid_neg: Vec<String>,
    pub normalizer_min: Vec<String>,
    pub normalizer_max: Vec<String>,
    /// Effective seed of the run (the config echo may differ when the
    /// seed was overridden on the command line).
    pub seed: u64,
    pub circuit_evaluations: u64,
    pub history: HistorySummary,
    pub config_echo: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistorySummary {
    pub n_steps: usize,
    pub final_kao_loss: Option<String>,
    pub final_co_loss: Option<String>,
    pub final_ta: Option<String>,
}

fn render(v: f64) -> String {
    format!("{v:.16e}")
}

fn render_all(values: &[f64]) -> Vec<String> {
    values.iter().copied().map(render).collect()
}

fn parse(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .with_context(|| format!("bad float `{s}` in model file"))
}

fn parse_all(values: &[String]) -> Result<Vec<f64>> {
    values.iter().map(|s| parse(s)).collect()
}

impl ModelFile {
    pub fn from_model(model: &Model, history: &TrainHistory, config_echo: &str) -> ModelFile {
        ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            n_qubits: model.spec.n_qubits,
            n_layers: model.spec.n_layers,
            n_features: model.spec.n_features,
            weights: render_all(&model.params.w),
            biases: render_all(&model.params.b),
            centroid_pos: render_all(&model.centroid_pos.coords),
            centroid_neg: render_all(&model.centroid_neg.coords),
            normalizer_min: render_all(&model.normalizer.mins),
            normalizer_max: render_all(&model.normalizer.maxs),
            seed: model.seed(),
            circuit_evaluations: model.circuit_evaluations,
            history: HistorySummary {
                n_steps: history.steps.len(),
                final_kao_loss: history.final_loss(Phase::KernelAlignment).map(render),
                final_co_loss: history.final_loss(Phase::Centroid).map(render),
                final_ta: history.final_ta().map(render),
            },
            config_echo: config_echo.to_string(),
        }
    }

    pub fn to_model(&self) -> Result<Model> {
        if self.format_version != MODEL_FORMAT_VERSION {
            bail!(
                "unsupported model format version {} (expected {MODEL_FORMAT_VERSION})",
                self.format_version
            );
        }
        let spec = CircuitSpec::new(self.n_qubits, self.n_layers, self.n_features)?;
        let params = EncodingParams {
            w: parse_all(&self.weights)?,
            b: parse_all(&self.biases)?,
        };
        if params.w.len() != spec.n_params() || params.b.len() != spec.n_params() {
            bail!(
                "model file holds {} weights, circuit needs {}",
                params.w.len(),
                spec.n_params()
            );
        }
        let config = RunConfig::parse(&self.config_echo)
            .context("embedded config echo does not parse")?;
        let mut train_config = config.train.clone();
        train_config.seed = self.seed;
        Ok(Model {
            spec,
            params,
            centroid_pos: Centroid::new(parse_all(&self.centroid_pos)?, 1)?,
            centroid_neg: Centroid::new(parse_all(&self.centroid_neg)?, -1)?,
            normalizer: Normalizer {
                mins: parse_all(&self.normalizer_min)?,
                maxs: parse_all(&self.normalizer_max)?,
            },
            config: train_config,
            circuit_evaluations: self.circuit_evaluations,
        })
    }
}

pub fn save(model: &Model, history: &TrainHistory, config_echo: &str, path: &Path) -> Result<()> {
    let file = ModelFile::from_model(model, history, config_echo);
    let mut text = serde_json::to_string_pretty(&file)?;
    text.push('\n');
    std::fs::write(path, text)
        .with_context(|| format!("cannot write model {}", path.display()))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<(Model, ModelFile)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read model {}", path.display()))?;
    let file: ModelFile = serde_json::from_str(&text)
        .with_context(|| format!("invalid model file {}", path.display()))?;
    let model = file.to_model()?;
    Ok((model, file))
}
