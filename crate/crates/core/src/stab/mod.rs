// SPDX-License-Identifier: Apache-2.0

//! Stabilizer-tableau simulation for Clifford dynamics.

pub mod clifford;
pub mod dynamics;
pub mod pauli;
pub mod state;

pub use clifford::CliffordOp;
pub use pauli::{Pauli, PauliString};
pub use state::StabilizerState;
