// SPDX-License-Identifier: Apache-2.0

//! Dense state-vector and density-matrix simulation.

pub mod dynamics;
pub mod init;
pub mod state;
pub mod unitary;

pub use dynamics::{DenseTrajectory, StepRecord};
pub use init::{make_initial_state, InitialStateSpec};
pub use state::{DenseState, EntropyKind, Mat, Vector};
