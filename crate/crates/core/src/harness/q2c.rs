// SPDX-License-Identifier: Apache-2.0

//! Classical mutual information between computational-basis readouts of
//! `R` and `A` (the "Q2C" proxy for the quantum mutual information).

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::run::{dense_initial, outcome_rng, QmiSeries, UnitarySource};
use super::spec::{Engine, ExperimentSpec};
use crate::dense::dynamics::DenseTrajectory;
use crate::dense::state::DenseState;
use crate::error::{Error, Result};
use crate::protocol::{Monitoring, Protocol, ResetMode};
use crate::rng::stream;

/// Largest number of monitored branches enumerated exactly.
pub const MAX_BRANCHES: usize = 4096;
/// Born-sampled branches used when enumeration is too large.
pub const SAMPLED_BRANCHES: usize = 256;
const SHOT_DOMAIN: u64 = 1 << 61;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Q2cMode {
    Conditioned,
    Unconditioned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Q2cSource {
    ExactDistribution,
    Sampled { shots: usize },
}

/// `P(z_R, z_A)` indexed by `z_R << n_a | z_A`.
pub fn joint_distribution(state: &DenseState) -> Vec<f64> {
    match state {
        DenseState::Pure { psi, .. } => psi.iter().map(|c| c.norm_sqr()).collect(),
        DenseState::Mixed { rho, .. } => rho.diag().iter().map(|c| c.re.max(0.0)).collect(),
    }
}

/// `D_KL(P_RA || P_R P_A)` in bits.
pub fn classical_mi(p: &[f64], n_r: usize, n_a: usize) -> Result<f64> {
    let (d_r, d_a) = (1usize << n_r, 1usize << n_a);
    if p.len() != d_r * d_a {
        return Err(Error::Shape(format!("distribution of length {} for {n_r}+{n_a} bits", p.len())));
    }
    let total: f64 = p.iter().sum();
    let mut pr = vec![0.0; d_r];
    let mut pa = vec![0.0; d_a];
    for (i, &x) in p.iter().enumerate() {
        pr[i >> n_a] += x / total;
        pa[i & (d_a - 1)] += x / total;
    }
    let mut mi = 0.0;
    for (i, &x) in p.iter().enumerate() {
        let x = x / total;
        if x > 0.0 {
            mi += x * (x / (pr[i >> n_a] * pa[i & (d_a - 1)])).log2();
        }
    }
    Ok(mi.max(0.0))
}

/// Empirical distribution from `shots` draws with an add-1/2 pseudo-count;
/// the flag is set when shots are fewer than twice the support.
pub fn sampled_distribution<R: Rng + ?Sized>(p: &[f64], shots: usize, rng: &mut R) -> Result<(Vec<f64>, bool)> {
    let dist = WeightedIndex::new(p).map_err(|e| Error::Numerical(format!("sampling weights: {e}")))?;
    let mut counts = vec![0.5; p.len()];
    for _ in 0..shots {
        counts[dist.sample(rng)] += 1.0;
    }
    Ok((counts, shots < 2 * p.len()))
}

fn state_q2c<R: Rng + ?Sized>(state: &DenseState, n_r: usize, n_a: usize, source: Q2cSource, rng: &mut R) -> Result<(f64, bool)> {
    let p = joint_distribution(state);
    match source {
        Q2cSource::ExactDistribution => Ok((classical_mi(&p, n_r, n_a)?, false)),
        Q2cSource::Sampled { shots } => {
            let (q, low) = sampled_distribution(&p, shots, rng)?;
            Ok((classical_mi(&q, n_r, n_a)?, low))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Q2cResult {
    pub series: QmiSeries,
    /// Some evaluation had fewer shots than twice the outcome support.
    pub low_shot_warning: bool,
    /// Conditioned averages enumerated every branch exactly.
    pub enumerated: bool,
}

/// Q2C series averaged over `spec.trajectories` unitary draws.
pub fn q2c_series(spec: &ExperimentSpec, exp: u64, mode: Q2cMode, source: Q2cSource) -> Result<Q2cResult> {
    spec.validate()?;
    if spec.engine != Engine::Dense {
        return Err(Error::Spec("Q2C needs the dense engine".into()));
    }
    let shape = spec.shape;
    let d_b = 1usize << shape.n_b;
    let enumerate = (d_b as f64).powi(spec.steps as i32) <= MAX_BRANCHES as f64;
    let protocol = match mode {
        Q2cMode::Unconditioned => Protocol::new(Monitoring::Unmonitored, spec.reset),
        Q2cMode::Conditioned => {
            if spec.reset == ResetMode::FullyMixed {
                return Err(Error::Spec("conditioned Q2C needs a pure or absent reset".into()));
            }
            let monitoring = match spec.monitoring {
                Monitoring::Unmonitored => Monitoring::Monitored,
                m => m,
            };
            Protocol::new(monitoring, spec.reset)
        }
    };
    let mut low = false;
    let mut rows = Vec::with_capacity(spec.trajectories);
    for draw in 0..spec.trajectories as u64 {
        let source_u = UnitarySource::new(spec, exp, draw)?;
        let init = dense_initial(spec, exp, draw, &source_u)?;
        let shot_rng = |t: usize| stream(spec.seed, exp | SHOT_DOMAIN, draw, t as u64);
        let mut row = Vec::with_capacity(spec.steps + 1);
        let (v0, l0) = state_q2c(&init, shape.n_r, shape.n_a, source, &mut shot_rng(0))?;
        row.push(v0);
        low |= l0;
        let start = DenseTrajectory::new(shape, protocol, init)?;
        if mode == Q2cMode::Unconditioned || enumerate {
            let mut branches = vec![(1.0, start)];
            for t in 1..=spec.steps {
                let u = source_u.get(t as u64)?;
                branches = if mode == Q2cMode::Unconditioned {
                    let (w, mut b) = branches.pop().expect("one branch");
                    b.step(&u, &mut outcome_rng(spec.seed, exp, draw, t as u64))?;
                    vec![(w, b)]
                } else {
                    let mut next = Vec::with_capacity(branches.len() * d_b);
                    for (w, b) in branches {
                        for (o, p) in b.outcome_probabilities(&u)?.into_iter().enumerate() {
                            if w * p > 1e-300 {
                                let mut c = b.clone();
                                c.step_postselected(&u, o)?;
                                next.push((w * p, c));
                            }
                        }
                    }
                    next
                };
                let mut rng = shot_rng(t);
                let mut acc = 0.0;
                for (w, b) in &branches {
                    let (v, l) = state_q2c(&b.state(), shape.n_r, shape.n_a, source, &mut rng)?;
                    acc += w * v;
                    low |= l;
                }
                row.push(acc);
            }
        } else {
            let mut sums = vec![0.0; spec.steps];
            for k in 0..SAMPLED_BRANCHES as u64 {
                let mut b = start.clone();
                for t in 1..=spec.steps {
                    let u = source_u.get(t as u64)?;
                    b.step(&u, &mut outcome_rng(spec.seed, exp, draw * SAMPLED_BRANCHES as u64 + k, t as u64))?;
                    let (v, l) = state_q2c(&b.state(), shape.n_r, shape.n_a, source, &mut shot_rng(t))?;
                    sums[t - 1] += v / SAMPLED_BRANCHES as f64;
                    low |= l;
                }
            }
            row.extend(sums);
        }
        rows.push(row);
    }
    let label = match mode {
        Q2cMode::Conditioned => "q2c-conditioned",
        Q2cMode::Unconditioned => "q2c-unconditioned",
    };
    Ok(Q2cResult {
        series: QmiSeries::from_rows(&rows, label, spec.hash(), 0)?,
        low_shot_warning: low,
        enumerated: enumerate || mode == Q2cMode::Unconditioned,
    })
}
