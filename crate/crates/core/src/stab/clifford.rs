// SPDX-License-Identifier: Apache-2.0

//! Clifford operators stored as conjugation images of `X_j` and `Z_j`.
//!
//! Uniform sampling follows the Bravyi-Maslov canonical form
//! `F1 · H · S · F2`: a quantum-Mallows draw picks the Hadamard layer and
//! permutation, and two Borel layers are filled with uniform bits.

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;

use super::pauli::{Pauli, PauliString};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordOp {
    n: usize,
    img_x: Vec<PauliString>,
    img_z: Vec<PauliString>,
    /// `i * img_x[j] * img_z[j]`, the image of `Y_j`.
    img_y: Vec<PauliString>,
}

impl CliffordOp {
    /// Builds an operator from its images; checks Hermiticity and the
    /// symplectic commutation relations.
    pub fn from_images(img_x: Vec<PauliString>, img_z: Vec<PauliString>) -> Result<Self> {
        let n = img_x.len();
        if img_z.len() != n || n == 0 {
            return Err(Error::Param("image tableau must have n >= 1 X and Z rows".into()));
        }
        for p in img_x.iter().chain(&img_z) {
            if p.n() != n || !p.is_hermitian() || p.is_identity() {
                return Err(Error::Param(format!("invalid image {p}")));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let xx = img_x[i].commutes(&img_x[j]);
                let zz = img_z[i].commutes(&img_z[j]);
                let xz = img_x[i].commutes(&img_z[j]);
                if !xx || !zz || xz != (i != j) {
                    return Err(Error::Param("images violate commutation relations".into()));
                }
            }
        }
        Ok(Self::from_images_unchecked(img_x, img_z))
    }

    fn from_images_unchecked(img_x: Vec<PauliString>, img_z: Vec<PauliString>) -> Self {
        let img_y = img_x
            .iter()
            .zip(&img_z)
            .map(|(x, z)| {
                let mut y = x.mul(z);
                y.add_phase(1);
                y
            })
            .collect();
        Self { n: img_x.len(), img_x, img_z, img_y }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn image_x(&self, j: usize) -> &PauliString {
        &self.img_x[j]
    }

    pub fn image_z(&self, j: usize) -> &PauliString {
        &self.img_z[j]
    }

    pub fn identity(n: usize) -> Self {
        let img_x = (0..n).map(|j| PauliString::single(n, j, Pauli::X)).collect();
        let img_z = (0..n).map(|j| PauliString::single(n, j, Pauli::Z)).collect();
        Self::from_images_unchecked(img_x, img_z)
    }

    fn one_qubit(x: &str, z: &str) -> Self {
        let p = |s| PauliString::parse(s).expect("static Pauli literal");
        Self::from_images_unchecked(vec![p(x)], vec![p(z)])
    }

    pub fn hadamard() -> Self {
        Self::one_qubit("Z", "X")
    }

    pub fn phase_s() -> Self {
        Self::one_qubit("Y", "Z")
    }

    pub fn pauli_x() -> Self {
        Self::one_qubit("X", "-Z")
    }

    pub fn cnot() -> Self {
        let p = |s| PauliString::parse(s).expect("static Pauli literal");
        Self::from_images_unchecked(vec![p("XX"), p("IX")], vec![p("ZI"), p("ZZ")])
    }

    pub fn cz() -> Self {
        let p = |s| PauliString::parse(s).expect("static Pauli literal");
        Self::from_images_unchecked(vec![p("XZ"), p("ZX")], vec![p("ZI"), p("IZ")])
    }

    /// Conjugates `p` (an `n`-qubit string): returns `C p C^dagger`.
    pub fn conjugate(&self, p: &PauliString) -> PauliString {
        debug_assert_eq!(p.n(), self.n);
        let mut out = PauliString::identity(self.n);
        out.set_phase(p.phase());
        for j in 0..self.n {
            match p.get(j) {
                Pauli::I => {}
                Pauli::X => out.mul_assign_right(&self.img_x[j]),
                Pauli::Y => out.mul_assign_right(&self.img_y[j]),
                Pauli::Z => out.mul_assign_right(&self.img_z[j]),
            }
        }
        out
    }

    /// `self` followed by `next` (so the product unitary is `next · self`).
    pub fn then(&self, next: &Self) -> Self {
        let img_x = self.img_x.iter().map(|p| next.conjugate(p)).collect();
        let img_z = self.img_z.iter().map(|p| next.conjugate(p)).collect();
        Self::from_images_unchecked(img_x, img_z)
    }

    /// Uniformly random element of the `n`-qubit Clifford group, modulo global phase.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(Error::Param("random Clifford needs n >= 1".into()));
        }
        let (had, perm) = sample_qmallows(n, rng);
        let mut gamma1 = BitMat::zeros(n, n);
        let mut gamma2 = BitMat::zeros(n, n);
        let mut delta1 = BitMat::identity(n);
        let mut delta2 = BitMat::identity(n);
        for i in 0..n {
            gamma1.set(i, i, rng.random());
        }
        for i in 0..n {
            gamma2.set(i, i, rng.random());
        }
        fill_lower(&mut gamma1, rng, true);
        fill_lower(&mut gamma2, rng, true);
        fill_lower(&mut delta1, rng, false);
        fill_lower(&mut delta2, rng, false);

        let prod1 = gamma1.mul(&delta1);
        let prod2 = gamma2.mul(&delta2);
        let inv1 = delta1.inverse_unit_lower().transpose();
        let inv2 = delta2.inverse_unit_lower().transpose();
        let table1 = BitMat::block(&delta1, &prod1, &inv1);
        let table2 = BitMat::block(&delta2, &prod2, &inv2);

        let mut table = BitMat::zeros(2 * n, 2 * n);
        for (i, &p) in perm.iter().enumerate() {
            table.rows[i] = table2.rows[p].clone();
            table.rows[n + i] = table2.rows[n + p].clone();
        }
        for (i, &h) in had.iter().enumerate() {
            if h {
                table.rows.swap(i, n + i);
            }
        }
        let full = table1.mul(&table);

        let row_to_pauli = |r: usize, rng: &mut R| {
            let mut p = PauliString::identity(n);
            for q in 0..n {
                p.set_bits(q, full.get(r, q), full.get(r, n + q));
            }
            p.set_phase(if rng.random::<bool>() { 2 } else { 0 });
            p
        };
        let img_x: Vec<_> = (0..n).map(|r| row_to_pauli(r, rng)).collect();
        let img_z: Vec<_> = (0..n).map(|r| row_to_pauli(n + r, rng)).collect();
        Ok(Self::from_images_unchecked(img_x, img_z))
    }

    /// Dense unitary (up to global phase) with qubit 0 most significant.
    ///
    /// Columns are `U|b> = prod_j img_x[j]^{b_j} U|0>`, where `U|0>` is the
    /// common +1 eigenvector of the Z images.
    pub fn to_dense(&self) -> Array2<Complex64> {
        let dim = 1usize << self.n;
        let mut proj = Array2::<Complex64>::eye(dim);
        for z in &self.img_z {
            let m = z.to_dense();
            let half = (&Array2::<Complex64>::eye(dim) + &m).mapv(|c| c * 0.5);
            proj = half.dot(&proj);
        }
        let col = (0..dim)
            .map(|k| proj.column(k).to_owned())
            .max_by(|a, b| {
                let na: f64 = a.iter().map(|c| c.norm_sqr()).sum();
                let nb: f64 = b.iter().map(|c| c.norm_sqr()).sum();
                na.total_cmp(&nb)
            })
            .expect("dimension is positive");
        let norm = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let psi0 = col.mapv(|c| c / norm);
        let xs: Vec<_> = self.img_x.iter().map(|p| p.to_dense()).collect();
        let mut u = Array2::zeros((dim, dim));
        for b in 0..dim {
            let mut v = psi0.clone();
            for (j, xm) in xs.iter().enumerate() {
                if b >> (self.n - 1 - j) & 1 == 1 {
                    v = xm.dot(&v);
                }
            }
            u.column_mut(b).assign(&v);
        }
        u
    }
}

/// Quantum-Mallows draw: Hadamard flags and a permutation.
fn sample_qmallows<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Vec<bool>, Vec<usize>) {
    let mut had = vec![false; n];
    let mut perm = vec![0usize; n];
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..n {
        let m = n - i;
        let eps = 4f64.powi(-(m as i32));
        let r = loop {
            let r: f64 = rng.random();
            if r > 0.0 {
                break r;
            }
        };
        let index = (-(r + (1.0 - r) * eps).log2().ceil()) as usize;
        let index = index.min(2 * m - 1);
        had[i] = index < m;
        let k = if index < m { index } else { 2 * m - index - 1 };
        perm[i] = pool.remove(k);
    }
    (had, perm)
}

fn fill_lower<R: Rng + ?Sized>(m: &mut BitMat, rng: &mut R, symmetric: bool) {
    let n = m.nrows;
    for i in 0..n {
        for j in 0..i {
            let b: bool = rng.random();
            m.set(i, j, b);
            if symmetric {
                m.set(j, i, b);
            }
        }
    }
}

/// Small dense GF(2) matrix with bit-packed rows.
#[derive(Clone, Debug)]
struct BitMat {
    nrows: usize,
    ncols: usize,
    rows: Vec<Vec<u64>>,
}

impl BitMat {
    fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, rows: vec![vec![0; ncols.div_ceil(64)]; nrows] }
    }

    fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i][j / 64] >> (j % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, j: usize, v: bool) {
        let b = 1u64 << (j % 64);
        if v {
            self.rows[i][j / 64] |= b;
        } else {
            self.rows[i][j / 64] &= !b;
        }
    }

    fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.nrows, rhs.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                if self.get(i, k) {
                    for (o, r) in out.rows[i].iter_mut().zip(&rhs.rows[k]) {
                        *o ^= r;
                    }
                }
            }
        }
        out
    }

    fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                if self.get(i, j) {
                    out.set(j, i, true);
                }
            }
        }
        out
    }

    /// Inverse of a unit lower-triangular matrix by forward substitution.
    fn inverse_unit_lower(&self) -> Self {
        let n = self.nrows;
        let mut inv = Self::identity(n);
        for i in 0..n {
            for j in 0..i {
                if self.get(i, j) {
                    let src = inv.rows[j].clone();
                    for (o, r) in inv.rows[i].iter_mut().zip(&src) {
                        *o ^= r;
                    }
                }
            }
        }
        inv
    }

    /// `[[d, 0], [p, q]]`.
    fn block(d: &Self, p: &Self, q: &Self) -> Self {
        let n = d.nrows;
        let mut m = Self::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, d.get(i, j));
                m.set(n + i, j, p.get(i, j));
                m.set(n + i, n + j, q.get(i, j));
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use std::collections::HashMap;

    fn is_unitary(u: &Array2<Complex64>) -> bool {
        let d = u.nrows();
        let prod = u.t().mapv(|c| c.conj()).dot(u);
        (&prod - &Array2::<Complex64>::eye(d)).mapv(|c| c.norm()).sum() < 1e-9
    }

    #[test]
    fn named_gates_match_matrices() {
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        let h = CliffordOp::hadamard().to_dense();
        let want = [[s2, s2], [s2, -s2]];
        let phase = h[[0, 0]] / want[0][0];
        for i in 0..2 {
            for j in 0..2 {
                assert!((h[[i, j]] - phase * want[i][j]).norm() < 1e-12);
            }
        }
        let cz = CliffordOp::cz().to_dense();
        let ph = cz[[0, 0]];
        assert!((cz[[3, 3]] + ph).norm() < 1e-12);
        assert!((cz[[1, 1]] - ph).norm() < 1e-12);
    }

    #[test]
    fn conjugation_agrees_with_dense_unitary() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in 1..=4 {
            for _ in 0..20 {
                let c = CliffordOp::random(n, &mut rng).unwrap();
                let u = c.to_dense();
                assert!(is_unitary(&u));
                for j in 0..n {
                    for (p, img) in [(Pauli::X, c.image_x(j)), (Pauli::Z, c.image_z(j))] {
                        let pm = PauliString::single(n, j, p).to_dense();
                        let lhs = u.dot(&pm).dot(&u.t().mapv(|z| z.conj()));
                        let diff = (&lhs - &img.to_dense()).mapv(|z| z.norm()).sum();
                        assert!(diff < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn random_images_are_symplectic() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for n in [1, 2, 5, 17, 70] {
            let c = CliffordOp::random(n, &mut rng).unwrap();
            let (x, z) = (c.img_x.clone(), c.img_z.clone());
            assert!(CliffordOp::from_images(x, z).is_ok());
        }
    }

    #[test]
    fn single_qubit_draws_are_uniform_over_24() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        let draws = 100_000usize;
        let mut counts: HashMap<(String, String), usize> = HashMap::new();
        for _ in 0..draws {
            let c = CliffordOp::random(1, &mut rng).unwrap();
            *counts.entry((c.image_x(0).to_string(), c.image_z(0).to_string())).or_default() += 1;
        }
        assert_eq!(counts.len(), 24);
        let p = 1.0 / 24.0;
        let mean = draws as f64 * p;
        let sd = (draws as f64 * p * (1.0 - p)).sqrt();
        for (k, &v) in &counts {
            assert!((v as f64 - mean).abs() < 4.0 * sd, "{k:?}: {v}");
        }
    }

    #[test]
    fn two_qubit_collisions_match_group_order() {
        // Birthday test: with |G| = 11520 and k draws, expected colliding
        // pairs are k(k-1)/(2|G|).
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let k = 4000usize;
        let mut seen: HashMap<String, usize> = HashMap::new();
        for _ in 0..k {
            let c = CliffordOp::random(2, &mut rng).unwrap();
            let key = format!("{}{}{}{}", c.img_x[0], c.img_x[1], c.img_z[0], c.img_z[1]);
            *seen.entry(key).or_default() += 1;
        }
        let pairs: usize = seen.values().map(|&m| m * (m - 1) / 2).sum();
        let expect = (k * (k - 1)) as f64 / (2.0 * 11520.0);
        assert!((pairs as f64 - expect).abs() < 5.0 * expect.sqrt(), "{pairs} vs {expect}");
    }

    #[test]
    fn seeded_draws_are_deterministic() {
        let a = CliffordOp::random(6, &mut rand_chacha::ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = CliffordOp::random(6, &mut rand_chacha::ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);
    }
}
