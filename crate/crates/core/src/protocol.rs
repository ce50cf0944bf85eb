// SPDX-License-Identifier: Apache-2.0

//! What happens to the bath after each scrambling step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shape::SystemShape;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Monitoring {
    /// Every bath qubit is measured and the record kept.
    Monitored,
    /// The record is discarded.
    Unmonitored,
    /// Monitored, except that every `s`-th step the first `n_e` bath
    /// qubits are erased instead of measured.
    Partial { s: usize, n_e: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResetMode {
    PureZero,
    None,
    /// Bath replaced by `I/d_B` after every step; the first step sees the
    /// bath of the initial state.
    FullyMixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Protocol {
    pub monitoring: Monitoring,
    pub reset: ResetMode,
}

impl Protocol {
    pub fn new(monitoring: Monitoring, reset: ResetMode) -> Self {
        Self { monitoring, reset }
    }

    pub fn validate(&self, shape: &SystemShape) -> Result<()> {
        match (self.monitoring, self.reset) {
            (Monitoring::Monitored, ResetMode::FullyMixed) => {
                Err(Error::Spec("fully-mixed reset requires unmonitored dynamics".into()))
            }
            (Monitoring::Partial { .. }, ResetMode::FullyMixed | ResetMode::None) => {
                Err(Error::Spec("partial monitoring requires pure-zero reset".into()))
            }
            (Monitoring::Partial { s, n_e }, _) if s == 0 || n_e == 0 || n_e > shape.n_b => {
                Err(Error::Spec(format!("partial monitoring needs s >= 1 and 1 <= n_e <= {}", shape.n_b)))
            }
            _ => Ok(()),
        }
    }

    pub fn is_monitored(&self) -> bool {
        !matches!(self.monitoring, Monitoring::Unmonitored)
    }

    /// Whether step `t` (counted from 1) is an erasure step.
    pub fn erases_at(&self, t: usize) -> Option<usize> {
        match self.monitoring {
            Monitoring::Partial { s, n_e } if t % s == 0 => Some(n_e),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_rules() {
        let shape = SystemShape::new(2, 2, 2).unwrap();
        let bad = [
            Protocol::new(Monitoring::Monitored, ResetMode::FullyMixed),
            Protocol::new(Monitoring::Partial { s: 0, n_e: 1 }, ResetMode::PureZero),
            Protocol::new(Monitoring::Partial { s: 2, n_e: 3 }, ResetMode::PureZero),
            Protocol::new(Monitoring::Partial { s: 2, n_e: 1 }, ResetMode::None),
        ];
        for p in bad {
            assert!(p.validate(&shape).is_err(), "{p:?}");
        }
        assert!(Protocol::new(Monitoring::Unmonitored, ResetMode::FullyMixed).validate(&shape).is_ok());
    }

    #[test]
    fn serde_forms() {
        let m: Monitoring = serde_json::from_str(r#"{"partial":{"s":4,"n_e":2}}"#).unwrap();
        assert_eq!(m, Monitoring::Partial { s: 4, n_e: 2 });
        let r: ResetMode = serde_json::from_str(r#""fully-mixed""#).unwrap();
        assert_eq!(r, ResetMode::FullyMixed);
    }
}
