// SPDX-License-Identifier: Apache-2.0

//! Initial states on the `R ⊗ A` register.

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::state::{outer, DenseState, Mat, Vector};
use super::unitary::haar_unitary;
use crate::error::{Error, Result};
use crate::shape::SystemShape;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum InitialStateSpec {
    #[default]
    BellPairs,
    /// `|phi> ∝ |phi_Haar> + delta |0>` on R⊗A.
    PerturbedHaar { delta: f64 },
    /// `rho ∝ sum_j |j><j|_R ⊗ |u_j^delta><u_j^delta|` with `u_j` Haar columns.
    CqState { delta: f64 },
    /// Classical-quantum probe built from a channel's fixed point and
    /// slowest mode; `a = None` picks half the largest admissible value.
    CqProbe { a: Option<f64> },
    /// Bell pairs evolved for `t0` steps along one monitored trajectory.
    LateTimeConditional { t0: usize },
    /// Bell pairs evolved for `t0` steps of the unmonitored channel.
    LateTimeUnconditional { t0: usize },
}

impl InitialStateSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::PerturbedHaar { delta } | Self::CqState { delta } if !(*delta >= 0.0) => {
                Err(Error::Spec(format!("delta must be >= 0, got {delta}")))
            }
            Self::CqProbe { a: Some(a) } if !(*a >= 0.0) => {
                Err(Error::Spec(format!("probe mixing must be >= 0, got {a}")))
            }
            _ => Ok(()),
        }
    }

    /// Warm-up length for the late-time families.
    pub fn warmup(&self) -> usize {
        match self {
            Self::LateTimeConditional { t0 } | Self::LateTimeUnconditional { t0 } => *t0,
            _ => 0,
        }
    }
}

/// Bell pairs between `R_k` and `A_k`, remaining A qubits in `|0>`.
pub fn bell_pairs(shape: &SystemShape) -> DenseState {
    let n = shape.n_r + shape.n_a;
    let mut psi = Vector::zeros(1 << n);
    let amp = C64::new(2f64.powi(-(shape.n_r as i32)).sqrt(), 0.0);
    for x in 0..1usize << shape.n_r {
        psi[x << shape.n_a | x << (shape.n_a - shape.n_r)] = amp;
    }
    DenseState::Pure { n, psi }
}

fn normalized(mut v: Vector) -> Result<Vector> {
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-300 {
        return Err(Error::ZeroInitial);
    }
    v.mapv_inplace(|c| c / norm);
    Ok(v)
}

/// Builds every family except the probe and late-time states, which need a
/// channel or dynamics and are assembled by the caller.
pub fn make_initial_state<R: Rng + ?Sized>(
    spec: &InitialStateSpec,
    shape: &SystemShape,
    rng: &mut R,
) -> Result<DenseState> {
    spec.validate()?;
    let n = shape.n_r + shape.n_a;
    let d_a = 1usize << shape.n_a;
    match spec {
        InitialStateSpec::BellPairs
        | InitialStateSpec::LateTimeConditional { .. }
        | InitialStateSpec::LateTimeUnconditional { .. } => Ok(bell_pairs(shape)),
        InitialStateSpec::PerturbedHaar { delta } => {
            let u = haar_unitary(1 << n, rng);
            let mut v = u.column(0).to_owned();
            v[0] += C64::new(*delta, 0.0);
            Ok(DenseState::Pure { n, psi: normalized(v)? })
        }
        InitialStateSpec::CqState { delta } => {
            let d_r = 1usize << shape.n_r;
            let u = haar_unitary(d_a, rng);
            let mut rho = Mat::zeros((1 << n, 1 << n));
            for j in 0..d_r {
                let mut w = u.column(j).to_owned();
                w[0] += C64::new(*delta, 0.0);
                let w = normalized(w)?;
                let bw = outer(&w, &w).mapv(|c| c / d_r as f64);
                rho.slice_mut(ndarray::s![j * d_a..(j + 1) * d_a, j * d_a..(j + 1) * d_a]).assign(&bw);
            }
            Ok(DenseState::Mixed { n, rho })
        }
        InitialStateSpec::CqProbe { .. } => {
            Err(Error::Spec("cq-probe states are built from a channel spectrum".into()))
        }
    }
}
