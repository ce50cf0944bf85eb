// SPDX-License-Identifier: Apache-2.0

//! Register geometry shared by every run.
//!
//! Qubits are laid out as `R | A | B`: indices `0..n_r` hold the reference,
//! `n_r..n_r+n_a` the system and the remaining `n_b` the bath.

use serde::{Deserialize, Serialize};
use std::ops::Range;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemShape {
    pub n_r: usize,
    pub n_a: usize,
    pub n_b: usize,
}

impl SystemShape {
    pub fn new(n_r: usize, n_a: usize, n_b: usize) -> Result<Self> {
        let s = Self { n_r, n_a, n_b };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_r > self.n_a {
            return Err(Error::Shape(format!(
                "n_r = {} exceeds n_a = {}",
                self.n_r, self.n_a
            )));
        }
        if self.n_a == 0 {
            return Err(Error::Shape("n_a must be at least 1".into()));
        }
        Ok(())
    }

    pub fn total(&self) -> usize {
        self.n_r + self.n_a + self.n_b
    }

    pub fn r(&self) -> Range<usize> {
        0..self.n_r
    }

    pub fn a(&self) -> Range<usize> {
        self.n_r..self.n_r + self.n_a
    }

    pub fn b(&self) -> Range<usize> {
        self.n_r + self.n_a..self.total()
    }

    /// System plus bath, the support of each step's unitary.
    pub fn ab(&self) -> Range<usize> {
        self.n_r..self.total()
    }

    pub fn d_r(&self) -> f64 {
        2f64.powi(self.n_r as i32)
    }

    pub fn d_a(&self) -> f64 {
        2f64.powi(self.n_a as i32)
    }

    pub fn d_b(&self) -> f64 {
        2f64.powi(self.n_b as i32)
    }
}
