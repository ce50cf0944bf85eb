// SPDX-License-Identifier: Apache-2.0

//! One step of the scramble-measure-reset protocol on a stabilizer register.

use rand::Rng;

use super::clifford::CliffordOp;
use super::state::StabilizerState;
use crate::error::{Error, Result};
use crate::protocol::{Monitoring, Protocol, ResetMode};
use crate::shape::SystemShape;

/// Applies `op` on A∪B, then treats the bath per `protocol`.
/// `t` counts steps from 1. Returns the recorded outcomes, in bath order.
pub fn run_step<R: Rng + ?Sized>(
    state: &mut StabilizerState,
    shape: &SystemShape,
    op: &CliffordOp,
    protocol: &Protocol,
    t: usize,
    rng: &mut R,
) -> Result<Vec<bool>> {
    if state.n() != shape.total() {
        return Err(Error::Shape(format!("state has {} qubits, shape {}", state.n(), shape.total())));
    }
    let ab: Vec<usize> = shape.ab().collect();
    state.apply_clifford(op, &ab)?;
    let bath: Vec<usize> = shape.b().collect();
    let mut outcomes = Vec::new();
    match protocol.monitoring {
        Monitoring::Unmonitored => match protocol.reset {
            ResetMode::PureZero => state.trace_out_and_reset(&bath)?,
            ResetMode::FullyMixed => state.trace_out(&bath)?,
            ResetMode::None => {
                for &q in &bath {
                    state.dephase_z(q)?;
                }
            }
        },
        Monitoring::Monitored | Monitoring::Partial { .. } => {
            let erased = protocol.erases_at(t).unwrap_or(0);
            if erased > 0 {
                state.trace_out_and_reset(&bath[..erased])?;
            }
            for &q in &bath[erased..] {
                let o = state.measure_z(q, rng)?;
                match protocol.reset {
                    ResetMode::PureZero => state.reset_to_zero(q, o)?,
                    ResetMode::None => {}
                    ResetMode::FullyMixed => {
                        return Err(Error::Spec("fully-mixed reset requires unmonitored dynamics".into()))
                    }
                }
                outcomes.push(o);
            }
        }
    }
    Ok(outcomes)
}

/// `I(R:A)` of the current state in bits.
pub fn qmi(state: &StabilizerState, shape: &SystemShape) -> Result<usize> {
    let r: Vec<usize> = shape.r().collect();
    let a: Vec<usize> = shape.a().collect();
    state.mutual_info(&r, &a)
}
