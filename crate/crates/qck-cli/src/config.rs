//! Run configuration files: versioned TOML with unknown keys rejected.
//!
//! The file carries four sections: where the data comes from, how it is
//! split and subsampled, the circuit geometry, and the training schedule.
//! The raw text is kept alongside the parsed form so trained models can
//! echo their exact configuration byte for byte.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use qck::data::{load_csv, load_csv_raw, relabel, synth_blobs, synth_xor, Dataset};
use qck::train::TrainConfig;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub data: DataConfig,
    pub split: SplitConfig,
    pub circuit: CircuitConfig,
    pub train: TrainConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "source", rename_all = "snake_case")]
pub enum DataConfig {
    /// Labeled CSV on disk. With `positive_max` set, raw numeric labels
    /// are mapped to +1 when `label <= positive_max` and -1 otherwise
    /// (e.g. digit datasets split 0-4 vs 5-9 use `positive_max = 4`).
    Csv {
        path: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        positive_max: Option<f64>,
    },
    /// Two synthetic Gaussian clusters in the unit box.
    Blobs {
        n: usize,
        n_features: usize,
        separation: f64,
        seed: u64,
    },
    /// Synthetic quadrant-parity data; class means coincide by design.
    Xor { n: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    pub train_frac: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitConfig {
    pub n_qubits: usize,
    pub n_layers: usize,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        let config: RunConfig = toml::from_str(text).context("invalid config file")?;
        if config.version != CONFIG_VERSION {
            bail!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                config.version
            );
        }
        Ok(config)
    }

    /// Parse a config file, returning both the structured form and the raw
    /// text for echoing into model files.
    pub fn load(path: impl AsRef<Path>) -> Result<(RunConfig, String)> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let config = Self::parse(&text)
            .with_context(|| format!("in config {}", path.display()))?;
        Ok((config, text))
    }
}

/// Materialize the configured data source.
pub fn load_dataset(data: &DataConfig) -> Result<Dataset> {
    match data {
        DataConfig::Csv { path, positive_max } => {
            let dataset = match positive_max {
                Some(max) => {
                    let (x, raw, names) = load_csv_raw(path)?;
                    let y = relabel(&raw, |v| v <= *max);
                    let mut ds = Dataset::new(x, y)?;
                    ds.feature_names = Some(names);
                    ds
                }
                None => load_csv(path)?,
            };
            Ok(dataset)
        }
        DataConfig::Blobs {
            n,
            n_features,
            separation,
            seed,
        } => Ok(synth_blobs(*n, *n_features, *separation, *seed)?),
        DataConfig::Xor { n, seed } => Ok(synth_xor(*n, *seed)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"
version = 1

[data]
source = "blobs"
n = 400
n_features = 4
separation = 0.2
seed = 7

[split]
n_train = 100
n_val = 50
n_test = 50
train_frac = 0.7

[circuit]
n_qubits = 3
n_layers = 4

[train]
n_epochs = 2
n_kao = 2
n_co = 2
lr_kao = 0.5
lr_co = 0.5
r_decay = 0.9
lambda_kao = 0.001
lambda_co = 0.001
init_scale = 0.1
seed = 42
optimizer = "gradient_descent"
"#;

    #[test]
    fn parses_a_full_config() {
        let config = RunConfig::parse(GOOD).unwrap();
        assert_eq!(config.circuit.n_qubits, 3);
        assert_eq!(config.train.seed, 42);
        let ds = load_dataset(&config.data).unwrap();
        assert_eq!(ds.n_samples(), 400);
        assert_eq!(ds.n_features(), 4);
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = GOOD.replace("lr_kao = 0.5", "lr_kao = 0.5\nmystery_knob = 3");
        let err = RunConfig::parse(&bad).unwrap_err();
        assert!(format!("{err:#}").contains("mystery_knob"));

        let bad_top = format!("{GOOD}\n[extra]\nfoo = 1\n");
        assert!(RunConfig::parse(&bad_top).is_err());
    }

    #[test]
    fn rejects_missing_keys_and_bad_version() {
        let missing = GOOD.replace("n_kao = 2\n", "");
        assert!(RunConfig::parse(&missing).is_err());
        let bad_version = GOOD.replace("version = 1", "version = 9");
        assert!(RunConfig::parse(&bad_version)
            .unwrap_err()
            .to_string()
            .contains("version"));
    }

    #[test]
    fn csv_source_with_relabel_threshold() {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "p0,p1,label").unwrap();
        writeln!(f, "0.1,0.2,3").unwrap();
        writeln!(f, "0.3,0.4,9").unwrap();
        let data = DataConfig::Csv {
            path: f.path().to_string_lossy().into_owned(),
            positive_max: Some(4.0),
        };
        let ds = load_dataset(&data).unwrap();
        assert_eq!(ds.y, vec![1, -1]);
    }
}
