// SPDX-License-Identifier: Apache-2.0

//! Information lifetime of a reference-entangled register under repeated
//! scrambling, mid-circuit measurement and reset.

pub mod dense;
pub mod error;
pub mod harness;
pub mod protocol;
pub mod rng;
pub mod shape;
pub mod spectrum;
pub mod stab;
pub mod theory;

pub use error::{Error, Result};
pub use protocol::{Monitoring, Protocol, ResetMode};
pub use shape::SystemShape;
