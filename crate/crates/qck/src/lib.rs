//! Quantum centroid-kernel binary classifier.
//!
//! The model encodes samples into n-qubit pure states through a trainable
//! layered circuit and scores them by state fidelity against the encoded
//! centroid of each class. Training alternates between aligning the kernel
//! to the labels (updating circuit weights and biases) and moving one
//! centroid in data space, so each training step costs one circuit
//! evaluation per sample instead of one per sample pair.
//!
//! Modules:
//! - [`simulator`]: batched state-vector engine plus a dense-unitary oracle
//! - [`encoding`]: circuit geometry, trainable parameters, data-to-state map
//! - [`kernel`]: centroid kernel vectors, target alignment, the two losses
//! - [`grad`]: reverse-mode, parameter-shift, and finite-difference gradients
//! - [`train`]: the alternating optimization loop and prediction
//! - [`data`]: CSV ingestion, normalization, splits, synthetic generators
//! - [`baseline`]: training-free RBF centroid classifier
//! - [`metrics`]: ROC AUC and accuracy

pub mod baseline;
pub mod data;
pub mod encoding;
pub mod grad;
pub mod kernel;
pub mod metrics;
pub mod simulator;
pub mod train;

pub use encoding::{Centroid, CircuitSpec, EncodingParams};
pub use simulator::StateBatch;
pub use train::{Model, TrainConfig, TrainHistory};

/// Which half of the alternating optimization a step belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Kernel-alignment optimization: weights and biases move, centroid fixed.
    KernelAlignment,
    /// Centroid optimization: one centroid moves, weights and biases fixed.
    Centroid,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Phase::KernelAlignment => write!(f, "KAO"),
            Phase::Centroid => write!(f, "CO"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("qubit index {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("{n_qubits} qubits requested, supported range is 1..={max}")]
    QubitCount { n_qubits: usize, max: usize },
    #[error("control and target are both qubit {0}")]
    ControlTargetOverlap(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("kernel vector is identically zero; the embedding has collapsed")]
    DegenerateKernel,
    #[error("class {0} has no samples")]
    MissingClass(i8),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("CSV file has no data rows")]
    EmptyCsv,
    #[error("CSV file has no `label` column")]
    MissingLabelColumn,
    #[error("CSV file has no feature columns")]
    NoFeatureColumns,
    #[error("non-numeric value `{value}` in column `{column}`, data row {row}")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },
    #[error("label `{value}` in data row {row} is not 1, -1, or 0")]
    BadLabel { row: usize, value: String },
    #[error("requested {requested} samples, pool holds {available}")]
    PoolTooSmall { requested: usize, available: usize },
    #[error("epoch {epoch}, {phase} step: {source}")]
    AtStep {
        epoch: usize,
        phase: Phase,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
