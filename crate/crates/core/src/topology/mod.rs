//! Device model: coupling graph, calibration snapshots and calibration-based scoring.

mod calibration;
mod coupling;
mod fidelity;

use std::path::PathBuf;

use thiserror::Error;

pub use calibration::{load_calibration, load_calibration_series, CalibrationSnapshot};
pub use coupling::{load_coupling, CouplingMap};
pub use fidelity::{drift_check, get_fidelity, score_breakdown, DriftPolicy, FidelityBreakdown};

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("self-loop on qubit {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("qubit {qubit} outside a {num_qubits}-qubit device")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("calibration lacks {what} for {component}")]
    MissingCalibration {
        what: &'static str,
        component: String,
    },
    #[error("{what} for {component} is {value}, outside [0, 1]")]
    OutOfRange {
        what: &'static str,
        component: String,
        value: f64,
    },
    #[error("calibration edge ({0}, {1}) is not in the coupling map")]
    UnknownEdge(usize, usize),
    #[error("bad timestamp `{0}`")]
    Timestamp(String),
    #[error("gate {gate} acts on physical qubits ({a}, {b}) which are not coupled")]
    Connectivity { gate: usize, a: usize, b: usize },
    #[error("baseline fidelity is zero; relative drift is undefined")]
    DegenerateBaseline,
    #[error("drift threshold must be positive and finite, got {0}")]
    BadThreshold(f64),
}
