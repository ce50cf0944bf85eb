// SPDX-License-Identifier: Apache-2.0

//! Dense evolution of `R ⊗ A` under the scramble-measure-reset protocol.
//!
//! The bath is never stored. A step with unitary `U` on `A ⊗ B` acts through
//! the Kraus blocks `K[b_out, b_in] = <b_out|U|b_in>`, so monitored runs keep
//! a pure `psi_RA` plus the bath's input basis state, and unmonitored runs keep
//! a density matrix (or, without reset, one block per bath basis state).

use ndarray::{s, ArrayView2};
use rand::Rng;

use super::state::{apply_tail_density, apply_tail_pure, DenseState, EntropyKind, Mat, Vector};
use crate::error::{Error, Result};
use crate::protocol::{Monitoring, Protocol, ResetMode};
use crate::shape::SystemShape;

/// Largest register any dense run accepts.
pub const MAX_TOTAL_QUBITS: usize = 14;
/// Largest `A ⊗ B` for which a unitary is materialized.
pub const MAX_UNITARY_QUBITS: usize = 12;
/// Largest `R ⊗ A` evolved as a density matrix.
pub const MAX_DENSITY_QUBITS: usize = 12;

/// Probability below which a branch is treated as impossible.
pub const UNDERFLOW: f64 = 1e-300;

pub fn kraus(u: &Mat, d_b: usize, b_out: usize, b_in: usize) -> ArrayView2<'_, num_complex::Complex64> {
    u.slice(s![b_out..;d_b, b_in..;d_b])
}

#[derive(Debug, Clone)]
enum Carrier {
    Pure { psi: Vector, bath_in: usize },
    Mixed { rho: Mat, bath_in: usize },
    /// Unmonitored without reset: `rho_RA ⊗ |b><b|` summed over `b`.
    Blocks { rho: Vec<Mat> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    /// Recorded bath outcome as a basis index of the measured qubits.
    pub outcome: Option<usize>,
    pub probability: f64,
}

#[derive(Debug, Clone)]
pub struct DenseTrajectory {
    shape: SystemShape,
    protocol: Protocol,
    carrier: Carrier,
    t: usize,
}

pub fn check_resources(shape: &SystemShape, needs_density: bool) -> Result<()> {
    if shape.total() > MAX_TOTAL_QUBITS {
        return Err(Error::Resource(format!(
            "dense runs are limited to {MAX_TOTAL_QUBITS} qubits, got {}",
            shape.total()
        )));
    }
    if shape.n_a + shape.n_b > MAX_UNITARY_QUBITS {
        return Err(Error::Resource(format!(
            "unitaries on more than {MAX_UNITARY_QUBITS} qubits are not materialized"
        )));
    }
    if needs_density && shape.n_r + shape.n_a > MAX_DENSITY_QUBITS {
        return Err(Error::Resource(format!(
            "density matrices are limited to {MAX_DENSITY_QUBITS} qubits"
        )));
    }
    Ok(())
}

impl DenseTrajectory {
    pub fn new(shape: SystemShape, protocol: Protocol, init: DenseState) -> Result<Self> {
        shape.validate()?;
        protocol.validate(&shape)?;
        if init.n() != shape.n_r + shape.n_a {
            return Err(Error::Shape(format!(
                "initial state has {} qubits, R⊗A has {}",
                init.n(),
                shape.n_r + shape.n_a
            )));
        }
        let partial = matches!(protocol.monitoring, Monitoring::Partial { .. });
        let carrier = match (protocol.monitoring, protocol.reset, init) {
            (Monitoring::Unmonitored, ResetMode::None, s) => Carrier::Blocks { rho: vec![s.to_density()] },
            (Monitoring::Unmonitored, _, s) => Carrier::Mixed { rho: s.to_density(), bath_in: 0 },
            (_, _, DenseState::Pure { psi, .. }) if !partial => Carrier::Pure { psi, bath_in: 0 },
            (_, _, s) => Carrier::Mixed { rho: s.to_density(), bath_in: 0 },
        };
        check_resources(&shape, !matches!(carrier, Carrier::Pure { .. }))?;
        Ok(Self { shape, protocol, carrier, t: 0 })
    }

    pub fn steps_taken(&self) -> usize {
        self.t
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    fn check_unitary(&self, u: &Mat) -> Result<(usize, usize)> {
        let d_a = 1usize << self.shape.n_a;
        let d_b = 1usize << self.shape.n_b;
        if u.dim() != (d_a * d_b, d_a * d_b) {
            return Err(Error::Shape(format!("unitary is {:?}, expected {}", u.dim(), d_a * d_b)));
        }
        Ok((d_a, d_b))
    }

    /// Unnormalized post-measurement branches with their probabilities.
    fn branches(&self, u: &Mat) -> Result<Vec<(f64, Carrier)>> {
        let (_, d_b) = self.check_unitary(u)?;
        let t = self.t + 1;
        let erased = self.protocol.erases_at(t).unwrap_or(0);
        let d_e = 1usize << erased;
        let d_rest = d_b / d_e;
        let next_in = |b: usize| match self.protocol.reset {
            ResetMode::None => b,
            _ => 0,
        };
        let mut out = Vec::with_capacity(d_rest);
        match &self.carrier {
            Carrier::Pure { psi, bath_in } => {
                for b in 0..d_b {
                    let phi = apply_tail_pure(psi, kraus(u, d_b, b, *bath_in));
                    let p: f64 = phi.iter().map(|c| c.norm_sqr()).sum();
                    out.push((p, Carrier::Pure { psi: phi, bath_in: next_in(b) }));
                }
            }
            Carrier::Mixed { rho, bath_in } => {
                for r in 0..d_rest {
                    let mut acc = Mat::zeros(rho.dim());
                    for e in 0..d_e {
                        acc += &apply_tail_density(rho, kraus(u, d_b, e * d_rest + r, *bath_in));
                    }
                    let p = acc.diag().iter().map(|c| c.re).sum();
                    out.push((p, Carrier::Mixed { rho: acc, bath_in: next_in(r) }));
                }
            }
            Carrier::Blocks { .. } => unreachable!("blocks only occur unmonitored"),
        }
        Ok(out)
    }

    fn normalize(carrier: &mut Carrier, p: f64) {
        match carrier {
            Carrier::Pure { psi, .. } => psi.mapv_inplace(|c| c / p.sqrt()),
            Carrier::Mixed { rho, .. } => rho.mapv_inplace(|c| c / p),
            Carrier::Blocks { .. } => {}
        }
    }

    fn channel_step(&mut self, u: &Mat) -> Result<()> {
        let (_, d_b) = self.check_unitary(u)?;
        let first = self.t == 0;
        match &mut self.carrier {
            Carrier::Mixed { rho, bath_in } => {
                let inputs: Vec<usize> = match self.protocol.reset {
                    ResetMode::FullyMixed if !first => (0..d_b).collect(),
                    _ => vec![*bath_in],
                };
                let w = 1.0 / inputs.len() as f64;
                let mut acc = Mat::zeros(rho.dim());
                for &bi in &inputs {
                    for bo in 0..d_b {
                        acc += &apply_tail_density(rho, kraus(u, d_b, bo, bi));
                    }
                }
                if inputs.len() > 1 {
                    acc.mapv_inplace(|c| c * w);
                }
                *rho = acc;
            }
            Carrier::Blocks { rho } => {
                let mut next = vec![Mat::zeros(rho[0].dim()); d_b];
                for (bi, block) in rho.iter().enumerate() {
                    for (bo, slot) in next.iter_mut().enumerate() {
                        *slot += &apply_tail_density(block, kraus(u, d_b, bo, bi));
                    }
                }
                *rho = next;
            }
            Carrier::Pure { .. } => unreachable!("unmonitored runs carry densities"),
        }
        Ok(())
    }

    /// One step; monitored runs sample the bath outcome by the Born rule.
    pub fn step<R: Rng + ?Sized>(&mut self, u: &Mat, rng: &mut R) -> Result<StepRecord> {
        if !self.protocol.is_monitored() {
            self.channel_step(u)?;
            self.t += 1;
            return Ok(StepRecord { outcome: None, probability: 1.0 });
        }
        let branches = self.branches(u)?;
        let total: f64 = branches.iter().map(|b| b.0).sum();
        let x: f64 = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = branches.len() - 1;
        for (i, (p, _)) in branches.iter().enumerate() {
            acc += p;
            if x < acc && *p > 0.0 {
                pick = i;
                break;
            }
        }
        self.commit(branches, pick)
    }

    /// One monitored step postselected on `outcome`; returns its probability.
    pub fn step_postselected(&mut self, u: &Mat, outcome: usize) -> Result<StepRecord> {
        if !self.protocol.is_monitored() {
            return Err(Error::Spec("postselection needs a monitored run".into()));
        }
        let branches = self.branches(u)?;
        if outcome >= branches.len() {
            return Err(Error::IndexOutOfRange { index: outcome, n: branches.len() });
        }
        self.commit(branches, outcome)
    }

    /// Outcome probabilities of the next monitored step without committing it.
    pub fn outcome_probabilities(&self, u: &Mat) -> Result<Vec<f64>> {
        Ok(self.branches(u)?.into_iter().map(|b| b.0).collect())
    }

    fn commit(&mut self, mut branches: Vec<(f64, Carrier)>, pick: usize) -> Result<StepRecord> {
        let (p, mut c) = branches.swap_remove(pick);
        if p < UNDERFLOW {
            return Err(Error::Underflow { step: self.t + 1 });
        }
        Self::normalize(&mut c, p);
        self.carrier = c;
        self.t += 1;
        Ok(StepRecord { outcome: Some(pick), probability: p })
    }

    /// Current `R ⊗ A` state.
    pub fn state(&self) -> DenseState {
        let n = self.shape.n_r + self.shape.n_a;
        match &self.carrier {
            Carrier::Pure { psi, .. } => DenseState::Pure { n, psi: psi.clone() },
            Carrier::Mixed { rho, .. } => DenseState::Mixed { n, rho: rho.clone() },
            Carrier::Blocks { rho } => {
                let mut sum = Mat::zeros(rho[0].dim());
                for b in rho {
                    sum += b;
                }
                DenseState::Mixed { n, rho: sum }
            }
        }
    }

    pub fn qmi(&self, kind: EntropyKind) -> Result<f64> {
        let r: Vec<usize> = self.shape.r().collect();
        let a: Vec<usize> = self.shape.a().collect();
        self.state().qmi(&r, &a, kind)
    }
}
