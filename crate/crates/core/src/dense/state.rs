// SPDX-License-Identifier: Apache-2.0

//! Statevectors and density matrices over a qubit register.
//!
//! Qubit 0 is the most significant tensor factor, so `R ⊗ A ⊗ B` is the
//! natural Kronecker order and "tail" qubits are the low-order bits.

use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use ndarray_linalg::{EigValsh, UPLO};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat = Array2<C64>;
pub type Vector = Array1<C64>;

/// Entropies below this eigenvalue are treated as zero.
pub const EIG_CLIP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyKind {
    VonNeumann,
    Renyi2,
}

impl EntropyKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::VonNeumann => "von-neumann",
            Self::Renyi2 => "renyi2",
        }
    }
}

#[derive(Debug, Clone)]
pub enum DenseState {
    Pure { n: usize, psi: Vector },
    Mixed { n: usize, rho: Mat },
}

impl DenseState {
    pub fn n(&self) -> usize {
        match self {
            Self::Pure { n, .. } | Self::Mixed { n, .. } => *n,
        }
    }

    pub fn zero(n: usize) -> Self {
        let mut psi = Vector::zeros(1 << n);
        psi[0] = C64::new(1.0, 0.0);
        Self::Pure { n, psi }
    }

    pub fn to_density(&self) -> Mat {
        match self {
            Self::Pure { psi, .. } => outer(psi, psi),
            Self::Mixed { rho, .. } => rho.clone(),
        }
    }

    /// Checks normalization (pure) or Hermiticity, unit trace and positivity (mixed).
    pub fn validate(&self, tol: f64) -> Result<()> {
        match self {
            Self::Pure { psi, .. } => {
                let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
                if (norm - 1.0).abs() > tol {
                    return Err(Error::Numerical(format!("state norm {norm}")));
                }
            }
            Self::Mixed { rho, .. } => {
                let herm = (rho - &dagger(rho)).mapv(|c| c.norm()).fold(0.0f64, |a, &b| a.max(b));
                let tr = trace(rho);
                if herm > tol || (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
                    return Err(Error::Numerical(format!("density: herm {herm}, trace {tr}")));
                }
                let min = eigvalsh(rho)?.iter().cloned().fold(f64::INFINITY, f64::min);
                if min < -tol {
                    return Err(Error::Numerical(format!("negative eigenvalue {min}")));
                }
            }
        }
        Ok(())
    }

    /// Reduced density matrix on `keep` (ordered as given).
    pub fn reduced(&self, keep: &[usize]) -> Result<Mat> {
        let n = self.n();
        check_region(n, keep)?;
        let rest: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let dk = 1usize << keep.len();
        let dr = 1usize << rest.len();
        let split = |idx: usize| {
            let bits = |qs: &[usize]| {
                qs.iter().fold(0usize, |acc, &q| acc << 1 | (idx >> (n - 1 - q) & 1))
            };
            (bits(keep), bits(&rest))
        };
        match self {
            Self::Pure { psi, .. } => {
                let mut m = Mat::zeros((dk, dr));
                for (idx, &c) in psi.iter().enumerate() {
                    let (k, r) = split(idx);
                    m[[k, r]] = c;
                }
                Ok(m.dot(&dagger(&m)))
            }
            Self::Mixed { rho, .. } => {
                let mut by_rest: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(dk); dr];
                for idx in 0..1usize << n {
                    let (k, r) = split(idx);
                    by_rest[r].push((k, idx));
                }
                let mut out = Mat::zeros((dk, dk));
                for group in &by_rest {
                    for &(ki, i) in group {
                        for &(kj, j) in group {
                            out[[ki, kj]] += rho[[i, j]];
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn entropy(&self, region: &[usize], kind: EntropyKind) -> Result<f64> {
        if region.is_empty() {
            return Ok(0.0);
        }
        check_region(self.n(), region)?;
        // A pure state has equal spectra on both sides of any cut.
        if let Self::Pure { n, .. } = self {
            if 2 * region.len() > *n {
                let rest: Vec<usize> = (0..*n).filter(|q| !region.contains(q)).collect();
                return self.entropy(&rest, kind);
            }
        }
        let rho = self.reduced(region)?;
        match kind {
            EntropyKind::VonNeumann => entropy_vn(&rho),
            EntropyKind::Renyi2 => Ok(entropy_renyi2(&rho)),
        }
    }

    /// `S(R) + S(A) - S(RA)` in bits.
    pub fn qmi(&self, r: &[usize], a: &[usize], kind: EntropyKind) -> Result<f64> {
        if let Some(&q) = r.iter().find(|q| a.contains(q)) {
            return Err(Error::Overlap(q));
        }
        let ra: Vec<usize> = r.iter().chain(a).copied().collect();
        Ok(self.entropy(r, kind)? + self.entropy(a, kind)? - self.entropy(&ra, kind)?)
    }
}

fn check_region(n: usize, region: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    for &q in region {
        if q >= n {
            return Err(Error::IndexOutOfRange { index: q, n });
        }
        if std::mem::replace(&mut seen[q], true) {
            return Err(Error::DuplicateTarget(q));
        }
    }
    Ok(())
}

pub fn dagger(m: &Mat) -> Mat {
    m.t().mapv(|c| c.conj())
}

pub fn outer(a: &Vector, b: &Vector) -> Mat {
    let col = a.view().insert_axis(Axis(1));
    let row = b.mapv(|c| c.conj()).insert_axis(Axis(0));
    col.dot(&row)
}

pub fn trace(m: &Mat) -> C64 {
    m.diag().sum()
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Mat::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            out.slice_mut(s![i * br..(i + 1) * br, j * bc..(j + 1) * bc])
                .assign(&b.mapv(|x| x * aij));
        }
    }
    out
}

/// Eigenvalues of a Hermitian matrix (Hermitized first to absorb round-off).
pub fn eigvalsh(m: &Mat) -> Result<Array1<f64>> {
    let h = (m + &dagger(m)).mapv(|c| c * 0.5);
    h.eigvalsh(UPLO::Lower).map_err(|e| Error::Numerical(format!("eigvalsh: {e}")))
}

/// `-sum lambda log2 lambda`, eigenvalues below [`EIG_CLIP`] dropped.
pub fn entropy_vn(rho: &Mat) -> Result<f64> {
    let ev = eigvalsh(rho)?;
    let s: f64 = ev.iter().filter(|&&l| l > EIG_CLIP).map(|&l| -l * l.log2()).sum();
    Ok(s.max(0.0))
}

/// `-log2 tr(rho^2)`.
pub fn entropy_renyi2(rho: &Mat) -> f64 {
    let purity: f64 = rho.iter().map(|c| c.norm_sqr()).sum();
    (-purity.log2()).max(0.0)
}

/// `psi <- (I ⊗ U) psi` with `U` on the trailing `log2(dim U)` qubits.
pub fn apply_tail_pure(psi: &Vector, u: ArrayView2<C64>) -> Vector {
    let d = u.nrows();
    let rows = psi.len() / u.ncols();
    let m = psi.view().into_shape_with_order((rows, u.ncols())).expect("contiguous state");
    m.dot(&u.t()).into_shape_with_order(rows * d).expect("contiguous result")
}

/// `(I ⊗ K) rho (I ⊗ K)^dagger` with `K` on the trailing qubits (K may be rectangular).
pub fn apply_tail_density(rho: &Mat, k: ArrayView2<C64>) -> Mat {
    let (kr, kc) = k.dim();
    let blocks = rho.nrows() / kc;
    let mut left = Mat::zeros((blocks * kr, rho.ncols()));
    for b in 0..blocks {
        let src = rho.slice(s![b * kc..(b + 1) * kc, ..]);
        left.slice_mut(s![b * kr..(b + 1) * kr, ..]).assign(&k.dot(&src));
    }
    let kd = k.t().mapv(|c| c.conj());
    let mut out = Mat::zeros((blocks * kr, blocks * kr));
    for b in 0..blocks {
        let src = left.slice(s![.., b * kc..(b + 1) * kc]);
        out.slice_mut(s![.., b * kr..(b + 1) * kr]).assign(&src.dot(&kd));
    }
    out
}
