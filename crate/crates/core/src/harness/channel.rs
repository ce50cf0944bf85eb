// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::run::unitary_rng;
use super::spec::Ensemble;
use crate::error::{Error, Result};
use crate::protocol::ResetMode;
use crate::spectrum::{build_superoperator, disk_radius, spectrum_of, ChannelSpectrum, SpectrumSummary};

fn default_reset() -> ResetMode {
    ResetMode::PureZero
}

/// One channel `rho_A -> Tr_B[U (rho_A ⊗ bath) U†]` to analyze.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub n_a: usize,
    pub n_b: usize,
    pub ensemble: Ensemble,
    #[serde(default = "default_reset")]
    pub reset: ResetMode,
    #[serde(default)]
    pub seed: u64,
}

impl ChannelSpec {
    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Toml(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Ok(serde_json::from_str(&text)?),
            Some("toml") => Self::from_toml(&text),
            _ => Err(Error::Spec(format!("{}: expected a .toml or .json file", path.display()))),
        }
    }

    /// Draws the unitary and diagonalizes the superoperator.
    pub fn analyze(&self) -> Result<ChannelSpectrum> {
        let u = self.ensemble.draw_dense(self.n_a + self.n_b, &mut unitary_rng(self.seed, 0, 0, 0))?;
        spectrum_of(&build_superoperator(&u, self.n_a, self.n_b, self.reset)?)
    }

    /// Summary against the random-unitary disk of this bath.
    pub fn summary(&self, spectrum: &ChannelSpectrum) -> SpectrumSummary {
        spectrum.summary(Some(disk_radius(self.n_b, self.reset)))
    }
}
