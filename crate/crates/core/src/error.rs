// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the engines, theory evaluators and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    Shape(String),
    #[error("qubit index {index} out of range for {n} qubits")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),
    #[error("regions overlap on qubit {0}")]
    Overlap(usize),
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("invalid experiment spec: {0}")]
    Spec(String),
    #[error("resource ceiling exceeded: {0}")]
    Resource(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("trajectory weight underflow at step {step}")]
    Underflow { step: usize },
    #[error("lifetime undefined: initial mutual information is zero")]
    ZeroInitial,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("toml: {0}")]
    Toml(String),
}

pub type Result<T> = std::result::Result<T, Error>;
