// SPDX-License-Identifier: Apache-2.0

//! Bit-packed Pauli strings.
//!
//! A string is `i^phase * sigma(x_0, z_0) ⊗ ... ⊗ sigma(x_{n-1}, z_{n-1})`
//! with `sigma(1, 1) = Y`, so Hermitian strings have an even phase.

use ndarray::Array2;
use num_complex::Complex64;

pub(crate) fn words(n: usize) -> usize {
    n.div_ceil(64)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    /// Power of `i`, modulo 4.
    phase: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words(n);
        Self { n, x: vec![0; w], z: vec![0; w], phase: 0 }
    }

    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.set(q, p);
        s
    }

    /// Parses strings such as `"+XZI"`, `"-YY"` or `"iZ"`; qubit 0 is leftmost.
    pub fn parse(s: &str) -> Option<Self> {
        let (phase, body) = if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix("+i").or_else(|| s.strip_prefix('i')) {
            (1, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else {
            (0, s.strip_prefix('+').unwrap_or(s))
        };
        let mut p = Self::identity(body.len());
        for (q, c) in body.chars().enumerate() {
            let k = match c {
                'I' | '_' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return None,
            };
            p.set(q, k);
        }
        p.phase = phase;
        Some(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn set_phase(&mut self, phase: u8) {
        self.phase = phase & 3;
    }

    /// Multiplies by `i^k`.
    pub fn add_phase(&mut self, k: u8) {
        self.phase = (self.phase + k) & 3;
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn x_bit(&self, q: usize) -> bool {
        self.x[q / 64] >> (q % 64) & 1 == 1
    }

    pub fn z_bit(&self, q: usize) -> bool {
        self.z[q / 64] >> (q % 64) & 1 == 1
    }

    pub fn get(&self, q: usize) -> Pauli {
        match (self.x_bit(q), self.z_bit(q)) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn set_bits(&mut self, q: usize, x: bool, z: bool) {
        let (w, b) = (q / 64, 1u64 << (q % 64));
        if x {
            self.x[w] |= b;
        } else {
            self.x[w] &= !b;
        }
        if z {
            self.z[w] |= b;
        } else {
            self.z[w] &= !b;
        }
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        let (x, z) = match p {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        };
        self.set_bits(q, x, z);
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase & 1 == 0
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(x, z)| (x | z).count_ones() as usize).sum()
    }

    pub fn commutes(&self, other: &Self) -> bool {
        debug_assert_eq!(self.n, other.n);
        let mut acc = 0u32;
        for i in 0..self.x.len() {
            acc ^= ((self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i])).count_ones();
        }
        acc & 1 == 0
    }

    /// `self <- self * rhs`.
    pub fn mul_assign_right(&mut self, rhs: &Self) {
        debug_assert_eq!(self.n, rhs.n);
        let mut plus = 0u32;
        let mut minus = 0u32;
        for i in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[i], self.z[i], rhs.x[i], rhs.z[i]);
            let (px, py, pz) = (x1 & !z1, x1 & z1, !x1 & z1);
            let (qx, qy, qz) = (x2 & !z2, x2 & z2, !x2 & z2);
            plus += ((px & qy) | (pz & qx) | (py & qz)).count_ones();
            minus += ((px & qz) | (pz & qy) | (py & qx)).count_ones();
            self.x[i] = x1 ^ x2;
            self.z[i] = z1 ^ z2;
        }
        let k = (self.phase as u32 + rhs.phase as u32 + plus + 3 * minus) & 3;
        self.phase = k as u8;
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.mul_assign_right(rhs);
        out
    }

    /// Dense `2^n x 2^n` matrix with qubit 0 as the most significant tensor factor.
    pub fn to_dense(&self) -> Array2<Complex64> {
        let dim = 1usize << self.n;
        let mut m = Array2::zeros((dim, dim));
        let mut xm = 0usize;
        let mut zm = 0usize;
        let mut ny = 0u32;
        for q in 0..self.n {
            let bit = 1usize << (self.n - 1 - q);
            if self.x_bit(q) {
                xm |= bit;
            }
            if self.z_bit(q) {
                zm |= bit;
            }
            if self.x_bit(q) && self.z_bit(q) {
                ny += 1;
            }
        }
        // sigma(x,z)|b> = i^{x z} (-1)^{z.b} |b xor x>, and Y = i X Z.
        let base = Complex64::i().powu((self.phase as u32 + ny) % 4);
        for col in 0..dim {
            let row = col ^ xm;
            let sign = if (col & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            m[[row, col]] = base * sign;
        }
        m
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let p = ["+", "+i", "-", "-i"][self.phase as usize];
        write!(f, "{p}")?;
        for q in 0..self.n {
            let c = match self.get(q) {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_pauli(n: usize, rng: &mut impl Rng) -> PauliString {
        let mut p = PauliString::identity(n);
        for q in 0..n {
            p.set_bits(q, rng.random(), rng.random());
        }
        p.set_phase(rng.random_range(0..4));
        p
    }

    #[test]
    fn single_qubit_table() {
        let x = PauliString::parse("X").unwrap();
        let y = PauliString::parse("Y").unwrap();
        let z = PauliString::parse("Z").unwrap();
        assert_eq!(x.mul(&y), PauliString::parse("iZ").unwrap());
        assert_eq!(y.mul(&x), PauliString::parse("-iZ").unwrap());
        assert_eq!(z.mul(&x), PauliString::parse("iY").unwrap());
        assert_eq!(x.mul(&z), PauliString::parse("-iY").unwrap());
        assert_eq!(y.mul(&z), PauliString::parse("iX").unwrap());
        assert_eq!(y.mul(&y), PauliString::parse("I").unwrap());
    }

    #[test]
    fn product_matches_dense_matrices() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 1..=4 {
            for _ in 0..200 {
                let a = random_pauli(n, &mut rng);
                let b = random_pauli(n, &mut rng);
                let dense = a.to_dense().dot(&b.to_dense());
                let diff = (&dense - &a.mul(&b).to_dense()).mapv(|c| c.norm()).sum();
                assert!(diff < 1e-12, "{a} * {b}");
                let ab = a.to_dense().dot(&b.to_dense());
                let ba = b.to_dense().dot(&a.to_dense());
                let comm = (&ab - &ba).mapv(|c| c.norm()).sum() < 1e-12;
                assert_eq!(comm, a.commutes(&b));
            }
        }
    }

    #[test]
    fn wide_strings_span_words() {
        let mut a = PauliString::identity(130);
        a.set(129, Pauli::X);
        a.set(3, Pauli::Z);
        let mut b = PauliString::identity(130);
        b.set(129, Pauli::Z);
        assert!(!a.commutes(&b));
        let c = a.mul(&b);
        assert_eq!(c.get(129), Pauli::Y);
        assert_eq!(c.phase(), 3);
        assert_eq!(c.weight(), 2);
    }
}
