//! Calibration-aware transpilation of parameterized ansatz circuits.
//!
//! The compilation flow is split into three stages with very different costs:
//!
//! 1. [`tapt`] places and routes the symbolic ansatz once, noise-unaware, with an exact
//!    depth-minimal swap search.
//! 2. [`nam`] relabels the routed circuit onto the symmetric copy of its qubit sub-graph with
//!    the best calibration score. It reruns only when calibration drifts.
//! 3. [`passes`] binds parameters and runs the peephole passes for every new parameter set.
//!
//! [`sim`] (density-matrix simulation with Pauli noise channels), [`qaoa`] (portfolio QAOA
//! ansatz and scoring) and [`cost`] (runtime accounting) support validating the flow.

pub mod circuit;
pub mod cost;
pub mod graph;
pub mod nam;
pub mod passes;
pub mod pipeline;
pub mod qaoa;
pub mod qasm;
pub mod sim;
pub mod tapt;
pub mod topology;

pub use circuit::{Circuit, CircuitError, CircuitMetrics, Gate, GateKind, ParamExpr};
