// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dense::init::InitialStateSpec;
use crate::dense::state::{EntropyKind, Mat};
use crate::dense::unitary::{
    brickwork_unitary, haar_unitary, HamiltonianParams, DEFAULT_T_H, MFIM_H_X, MFIM_H_Y,
};
use crate::error::{Error, Result};
use crate::protocol::{Monitoring, Protocol, ResetMode};
use crate::shape::SystemShape;
use crate::stab::CliffordOp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Stabilizer,
    Dense,
}

fn default_t_h() -> f64 {
    DEFAULT_T_H
}
fn default_h_x() -> f64 {
    MFIM_H_X
}
fn default_h_y() -> f64 {
    MFIM_H_Y
}

/// Source of the scrambling unitary on `A ∪ B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Ensemble {
    Haar,
    Clifford,
    Ising {
        #[serde(default = "default_t_h")]
        t_h: f64,
    },
    Mfim {
        #[serde(default = "default_h_x")]
        h_x: f64,
        #[serde(default = "default_h_y")]
        h_y: f64,
        #[serde(default = "default_t_h")]
        t_h: f64,
    },
    Brickwork {
        layers: usize,
    },
}

impl Ensemble {
    /// Hamiltonian evolution repeats the same unitary unless told otherwise.
    pub fn default_identical(&self) -> bool {
        matches!(self, Self::Ising { .. } | Self::Mfim { .. })
    }

    pub fn draw_dense<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Mat> {
        match self {
            Self::Haar => Ok(haar_unitary(1 << n, rng)),
            Self::Clifford => Ok(CliffordOp::random(n, rng)?.to_dense()),
            Self::Ising { t_h } => HamiltonianParams::random_ising(n, *t_h, rng).unitary(),
            Self::Mfim { h_x, h_y, t_h } => {
                HamiltonianParams::Mfim { n, h_x: *h_x, h_y: *h_y, t_h: *t_h }.unitary()
            }
            Self::Brickwork { layers } => {
                if n < 2 {
                    return Err(Error::Spec("brickwork circuits need at least 2 qubits".into()));
                }
                Ok(brickwork_unitary(n, *layers, rng))
            }
        }
    }
}

fn default_name() -> String {
    "experiment".into()
}
fn default_monitoring() -> Monitoring {
    Monitoring::Monitored
}
fn default_reset() -> ResetMode {
    ResetMode::PureZero
}
fn default_trajectories() -> usize {
    1
}
fn default_entropy() -> EntropyKind {
    EntropyKind::VonNeumann
}
fn default_epsilon() -> f64 {
    0.25
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default = "default_name")]
    pub name: String,
    pub shape: SystemShape,
    pub engine: Engine,
    pub ensemble: Ensemble,
    /// Defaults to true for Hamiltonian ensembles, false otherwise.
    #[serde(default)]
    pub identical_unitary: Option<bool>,
    #[serde(default = "default_monitoring")]
    pub monitoring: Monitoring,
    #[serde(default = "default_reset")]
    pub reset: ResetMode,
    #[serde(default)]
    pub initial: InitialStateSpec,
    pub steps: usize,
    #[serde(default = "default_trajectories")]
    pub trajectories: usize,
    #[serde(default = "default_entropy")]
    pub entropy: EntropyKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

impl ExperimentSpec {
    pub fn protocol(&self) -> Protocol {
        Protocol::new(self.monitoring, self.reset)
    }

    pub fn identical(&self) -> bool {
        self.identical_unitary.unwrap_or_else(|| self.ensemble.default_identical())
    }

    pub fn validate(&self) -> Result<()> {
        self.shape.validate()?;
        self.protocol().validate(&self.shape)?;
        self.initial.validate()?;
        if self.trajectories == 0 {
            return Err(Error::Spec("trajectories must be >= 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Spec(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.shape.n_a + self.shape.n_b == 0 {
            return Err(Error::Spec("the scrambled register A ∪ B is empty".into()));
        }
        match self.engine {
            Engine::Stabilizer => {
                if self.ensemble != Ensemble::Clifford {
                    return Err(Error::Spec("the stabilizer engine needs the clifford ensemble".into()));
                }
                if self.initial != InitialStateSpec::BellPairs {
                    return Err(Error::Spec("the stabilizer engine starts from bell pairs".into()));
                }
            }
            Engine::Dense => {
                if let InitialStateSpec::CqProbe { .. } = self.initial {
                    if self.shape.n_r != 1 {
                        return Err(Error::Spec("cq-probe states use a single reference qubit".into()));
                    }
                    if !self.identical() || self.reset == ResetMode::None {
                        return Err(Error::Spec(
                            "cq-probe states need an identical unitary and a channel on A".into(),
                        ));
                    }
                }
            }
        }
        if let Ensemble::Brickwork { .. } = self.ensemble {
            if self.shape.n_a + self.shape.n_b < 2 {
                return Err(Error::Spec("brickwork circuits need at least 2 qubits".into()));
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("spec serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Toml(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Reads TOML or JSON, chosen by extension.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let spec = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json(&text)?,
            Some("toml") => Self::from_toml(&text)?,
            _ => return Err(Error::Spec(format!("{}: expected a .toml or .json file", path.display()))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOML: &str = r#"
name = "ac1"
engine = "stabilizer"
ensemble = { kind = "clifford" }
steps = 4
trajectories = 2
seed = 9
monitoring = { partial = { s = 4, n_e = 2 } }
[shape]
n_r = 4
n_a = 4
n_b = 2
"#;

    #[test]
    fn parses_toml_and_json() {
        let spec = ExperimentSpec::from_toml(TOML).unwrap();
        spec.validate().unwrap();
        assert_eq!(spec.monitoring, Monitoring::Partial { s: 4, n_e: 2 });
        assert_eq!(spec.epsilon, 0.25);
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(ExperimentSpec::from_json(&json).unwrap(), spec);
        assert_eq!(spec.hash().len(), 64);
    }

    #[test]
    fn rejects_invalid_combinations() {
        let base = ExperimentSpec::from_toml(TOML).unwrap();
        let mut a = base.clone();
        a.ensemble = Ensemble::Haar;
        assert!(a.validate().is_err());
        let mut b = base.clone();
        b.monitoring = Monitoring::Monitored;
        b.reset = ResetMode::FullyMixed;
        assert!(b.validate().is_err());
        let mut c = base.clone();
        c.monitoring = Monitoring::Partial { s: 1, n_e: 3 };
        assert!(c.validate().is_err());
        let mut d = base;
        d.engine = Engine::Dense;
        d.initial = InitialStateSpec::CqProbe { a: None };
        assert!(d.validate().is_err());
        assert!(ExperimentSpec::from_toml("engine = \"dense\"").is_err());
    }

    #[test]
    fn identical_defaults() {
        let mut spec = ExperimentSpec::from_toml(TOML).unwrap();
        assert!(!spec.identical());
        spec.ensemble = Ensemble::Ising { t_h: 50.0 };
        assert!(spec.identical());
        spec.identical_unitary = Some(false);
        assert!(!spec.identical());
    }
}
