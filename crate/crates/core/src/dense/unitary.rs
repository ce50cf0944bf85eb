// SPDX-License-Identifier: Apache-2.0

//! Haar, Hamiltonian and brickwork unitaries.

use ndarray::Array1;
use ndarray_linalg::{Eigh, QR, UPLO};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::state::{dagger, kron, Mat};
use crate::error::{Error, Result};

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// `diag(R)` folded back into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Mat {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = Mat::from_shape_simple_fn((dim, dim), || {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * scale, im * scale)
    });
    let (mut q, r) = g.qr().expect("QR of a Ginibre matrix");
    for j in 0..dim {
        let d = r[[j, j]];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        q.column_mut(j).mapv_inplace(|c| c * ph);
    }
    q
}

/// Parameters of the two Hamiltonian families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum HamiltonianParams {
    /// `sum_{i<j} J_ij Z_i Z_j + sum_i (eta_x_i X_i + eta_z_i Z_i)`.
    AllToAllIsing { j: Vec<Vec<f64>>, eta_x: Vec<f64>, eta_z: Vec<f64>, t_h: f64 },
    /// `h_x sum X + h_y sum Y + sum X_i X_{i+1}` on an open chain.
    Mfim { n: usize, h_x: f64, h_y: f64, t_h: f64 },
}

pub const DEFAULT_T_H: f64 = 50.0;
pub const MFIM_H_X: f64 = 0.8090;
pub const MFIM_H_Y: f64 = 0.9045;

impl HamiltonianParams {
    /// Standard-normal couplings and fields.
    pub fn random_ising<R: Rng + ?Sized>(n: usize, t_h: f64, rng: &mut R) -> Self {
        let mut j = vec![vec![0.0; n]; n];
        for a in 0..n {
            for b in a + 1..n {
                let v: f64 = StandardNormal.sample(rng);
                j[a][b] = v;
                j[b][a] = v;
            }
        }
        let eta_x = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let eta_z = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        Self::AllToAllIsing { j, eta_x, eta_z, t_h }
    }

    pub fn mfim(n: usize) -> Self {
        Self::Mfim { n, h_x: MFIM_H_X, h_y: MFIM_H_Y, t_h: DEFAULT_T_H }
    }

    pub fn n(&self) -> usize {
        match self {
            Self::AllToAllIsing { eta_x, .. } => eta_x.len(),
            Self::Mfim { n, .. } => *n,
        }
    }

    pub fn t_h(&self) -> f64 {
        match self {
            Self::AllToAllIsing { t_h, .. } | Self::Mfim { t_h, .. } => *t_h,
        }
    }

    pub fn matrix(&self) -> Result<Mat> {
        let n = self.n();
        let dim = 1usize << n;
        let mut h = Mat::zeros((dim, dim));
        let bit = |idx: usize, q: usize| (idx >> (n - 1 - q)) & 1;
        let zsign = |idx: usize, q: usize| if bit(idx, q) == 1 { -1.0 } else { 1.0 };
        match self {
            Self::AllToAllIsing { j, eta_x, eta_z, .. } => {
                if j.len() != n || eta_z.len() != n || j.iter().any(|r| r.len() != n) {
                    return Err(Error::Param("Ising parameter lengths disagree".into()));
                }
                for a in 0..n {
                    if j[a][a] != 0.0 || (0..n).any(|b| j[a][b] != j[b][a]) {
                        return Err(Error::Param("J must be symmetric with zero diagonal".into()));
                    }
                }
                for idx in 0..dim {
                    let mut diag = 0.0;
                    for a in 0..n {
                        diag += eta_z[a] * zsign(idx, a);
                        for b in a + 1..n {
                            diag += j[a][b] * zsign(idx, a) * zsign(idx, b);
                        }
                        let flipped = idx ^ (1 << (n - 1 - a));
                        h[[flipped, idx]] += C64::new(eta_x[a], 0.0);
                    }
                    h[[idx, idx]] += C64::new(diag, 0.0);
                }
            }
            Self::Mfim { h_x, h_y, .. } => {
                for idx in 0..dim {
                    for a in 0..n {
                        let flipped = idx ^ (1 << (n - 1 - a));
                        h[[flipped, idx]] += C64::new(*h_x, 0.0);
                        // Y|b> = i (-1)^b |b xor 1>.
                        h[[flipped, idx]] += C64::new(0.0, *h_y * zsign(idx, a));
                        if a + 1 < n {
                            let both = flipped ^ (1 << (n - 2 - a));
                            h[[both, idx]] += C64::new(1.0, 0.0);
                        }
                    }
                }
            }
        }
        let herm = (&h - &dagger(&h)).mapv(|c| c.norm()).sum();
        if herm > 1e-10 {
            return Err(Error::Numerical("assembled Hamiltonian is not Hermitian".into()));
        }
        Ok(h)
    }

    /// `exp(-i H t_H)`.
    pub fn unitary(&self) -> Result<Mat> {
        expm_hermitian(&self.matrix()?, self.t_h())
    }
}

/// Eigenpairs `H v_j = w_j v_j`, eigenvectors in columns.
///
/// The LAPACK wrapper reads row-major input as its transpose, which for a
/// Hermitian matrix is the conjugate, so we hand it `conj(H)`. The residual
/// check guards against that behaviour changing underneath us.
pub fn hermitian_eigh(h: &Mat) -> Result<(Array1<f64>, Mat)> {
    let (w, v) = h
        .mapv(|c| c.conj())
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Numerical(format!("eigh: {e}")))?;
    let mut resid = 0.0f64;
    let hv = h.dot(&v);
    for ((i, j), x) in hv.indexed_iter() {
        resid = resid.max((x - v[[i, j]] * w[j]).norm());
    }
    let scale = w.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    if resid > 1e-8 * scale {
        return Err(Error::Numerical(format!("eigh residual {resid:e}")));
    }
    Ok((w, v))
}

/// `exp(-i H t)` through the Hermitian eigendecomposition.
pub fn expm_hermitian(h: &Mat, t: f64) -> Result<Mat> {
    let (w, v) = hermitian_eigh(h)?;
    let phases: Array1<C64> = w.mapv(|l| C64::from_polar(1.0, -l * t));
    let mut vd = v.clone();
    for (j, p) in phases.iter().enumerate() {
        vd.column_mut(j).mapv_inplace(|c| c * p);
    }
    Ok(vd.dot(&dagger(&v)))
}

fn single_rotation(theta: f64, phi: f64) -> Mat {
    // exp(-i phi Y) exp(-i theta X).
    let (c, s) = (theta.cos(), theta.sin());
    let rx = Mat::from_shape_vec(
        (2, 2),
        vec![C64::new(c, 0.0), C64::new(0.0, -s), C64::new(0.0, -s), C64::new(c, 0.0)],
    )
    .expect("2x2");
    let (c, s) = (phi.cos(), phi.sin());
    let ry = Mat::from_shape_vec(
        (2, 2),
        vec![C64::new(c, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(c, 0.0)],
    )
    .expect("2x2");
    ry.dot(&rx)
}

/// Diagonal of the CZ product over `pairs`.
fn cz_layer_diag(n: usize, first: usize) -> Vec<f64> {
    let dim = 1usize << n;
    (0..dim)
        .map(|idx| {
            let mut sign = 1.0;
            let mut a = first;
            while a + 1 < n {
                let (ba, bb) = ((idx >> (n - 1 - a)) & 1, (idx >> (n - 2 - a)) & 1);
                if ba & bb == 1 {
                    sign = -sign;
                }
                a += 2;
            }
            sign
        })
        .collect()
}

/// Brickwork circuit from explicit angles: `angles[l][q] = (theta, phi)`.
/// Each layer applies the rotations, then CZ on pairs `(2i-1, 2i)`, then on `(2i, 2i+1)`.
pub fn brickwork_from_angles(n: usize, angles: &[Vec<(f64, f64)>]) -> Mat {
    let dim = 1usize << n;
    let odd = cz_layer_diag(n, 1);
    let even = cz_layer_diag(n, 0);
    let mut u = Mat::eye(dim);
    for layer in angles {
        let mut rot = Mat::eye(1);
        for &(theta, phi) in layer {
            rot = kron(&rot, &single_rotation(theta, phi));
        }
        let mut step = rot;
        for (i, mut row) in step.rows_mut().into_iter().enumerate() {
            let s = odd[i] * even[i];
            row.mapv_inplace(|c| c * s);
        }
        u = step.dot(&u);
    }
    u
}

/// Random brickwork unitary with angles uniform on `[0, 2 pi)`; `layers = 0` is the identity.
pub fn brickwork_unitary<R: Rng + ?Sized>(n: usize, layers: usize, rng: &mut R) -> Mat {
    let tau = std::f64::consts::TAU;
    let angles: Vec<Vec<(f64, f64)>> = (0..layers)
        .map(|_| (0..n).map(|_| (rng.random::<f64>() * tau, rng.random::<f64>() * tau)).collect())
        .collect();
    brickwork_from_angles(n, &angles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn dist(a: &Mat, b: &Mat) -> f64 {
        (a - b).mapv(|c| c.norm()).fold(0.0f64, |m, &x| m.max(x))
    }

    fn unitarity(u: &Mat) -> f64 {
        dist(&dagger(u).dot(u), &Mat::eye(u.nrows()))
    }

    #[test]
    fn haar_is_unitary_and_dim_one_is_a_phase() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        assert!(unitarity(&haar_unitary(16, &mut rng)) < 1e-10);
        let u = haar_unitary(1, &mut rng);
        assert!((u[[0, 0]].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_moments() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let draws = 10_000;
        let (mut m2, mut m2sq) = (0.0, 0.0);
        let (mut m4, mut m4sq) = (0.0, 0.0);
        for _ in 0..draws {
            let a = haar_unitary(2, &mut rng)[[0, 0]].norm_sqr();
            m2 += a;
            m2sq += a * a;
            let b = haar_unitary(4, &mut rng)[[1, 2]].norm_sqr().powi(2);
            m4 += b;
            m4sq += b * b;
        }
        let n = draws as f64;
        let (mean2, mean4) = (m2 / n, m4 / n);
        let se2 = ((m2sq / n - mean2 * mean2) / n).sqrt();
        let se4 = ((m4sq / n - mean4 * mean4) / n).sqrt();
        assert!((mean2 - 0.5).abs() < 3.0 * se2, "{mean2}");
        assert!((mean4 - 0.1).abs() < 3.0 * se4, "{mean4}");
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let h = HamiltonianParams::AllToAllIsing {
            j: vec![vec![0.0; 3]; 3],
            eta_x: vec![0.0; 3],
            eta_z: vec![0.0; 3],
            t_h: 50.0,
        };
        assert!(dist(&h.unitary().unwrap(), &Mat::eye(8)) < 1e-12);
    }

    #[test]
    fn rabi_flip() {
        let h = HamiltonianParams::AllToAllIsing {
            j: vec![vec![0.0]],
            eta_x: vec![1.0],
            eta_z: vec![0.0],
            t_h: std::f64::consts::FRAC_PI_2,
        };
        let u = h.unitary().unwrap();
        assert!((u[[0, 1]].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_couplings_are_rejected() {
        let h = HamiltonianParams::AllToAllIsing {
            j: vec![vec![0.0, 1.0], vec![0.5, 0.0]],
            eta_x: vec![0.0; 2],
            eta_z: vec![0.0; 2],
            t_h: 1.0,
        };
        assert!(h.matrix().is_err());
    }

    /// Scaling-and-squaring Taylor exponential, used only as an oracle.
    fn expm_taylor(h: &Mat, t: f64) -> Mat {
        let norm: f64 = h.iter().map(|c| c.norm()).sum::<f64>() * t;
        let squarings = (norm.log2().ceil().max(0.0) as u32) + 4;
        let scale = t / 2f64.powi(squarings as i32);
        let a = h.mapv(|c| c * C64::new(0.0, -scale));
        let mut term = Mat::eye(h.nrows());
        let mut sum = term.clone();
        for k in 1..30 {
            term = term.dot(&a).mapv(|c| c / k as f64);
            sum = &sum + &term;
        }
        for _ in 0..squarings {
            sum = sum.dot(&sum);
        }
        sum
    }

    #[test]
    fn mfim_matches_series_exponential() {
        let p = HamiltonianParams::mfim(3);
        let u = p.unitary().unwrap();
        let oracle = expm_taylor(&p.matrix().unwrap(), p.t_h());
        assert!(dist(&u, &oracle) < 1e-8, "{}", dist(&u, &oracle));
        assert!(unitarity(&u) < 1e-9);
    }

    #[test]
    fn ising_is_symmetric_and_unitary() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let p = HamiltonianParams::random_ising(4, DEFAULT_T_H, &mut rng);
        let u = p.unitary().unwrap();
        assert!(unitarity(&u) < 1e-9);
        let oracle = expm_taylor(&p.matrix().unwrap(), 1.3);
        assert!(dist(&expm_hermitian(&p.matrix().unwrap(), 1.3).unwrap(), &oracle) < 1e-8);
    }

    #[test]
    fn brickwork_edge_cases() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        assert!(dist(&brickwork_unitary(3, 0, &mut rng), &Mat::eye(8)) < 1e-15);
        let cz = brickwork_from_angles(2, &[vec![(0.0, 0.0), (0.0, 0.0)]]);
        let mut want = Mat::eye(4);
        want[[3, 3]] = C64::new(-1.0, 0.0);
        assert!(dist(&cz, &want) < 1e-15);
        assert!(unitarity(&brickwork_unitary(4, 3, &mut rng)) < 1e-10);
    }

    /// Frame potential `E |tr(U^dag V)|^4` approaches the 2-design value 2.
    #[test]
    fn brickwork_second_moment_converges() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let frame = |layers: usize, rng: &mut rand_chacha::ChaCha8Rng| {
            let draws = 1000;
            let mut acc = 0.0;
            for _ in 0..draws {
                let u = brickwork_unitary(4, layers, rng);
                let v = brickwork_unitary(4, layers, rng);
                acc += (dagger(&u).dot(&v)).diag().sum().norm().powi(4);
            }
            acc / draws as f64
        };
        let f1 = frame(1, &mut rng);
        let f2 = frame(2, &mut rng);
        let f6 = frame(6, &mut rng);
        assert!(f1 > f2 && f2 > f6, "{f1} {f2} {f6}");
        assert!((f6 - 2.0).abs() < 0.6, "{f6}");
    }
}
