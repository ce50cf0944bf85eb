// SPDX-License-Identifier: Apache-2.0

//! Possibly mixed stabilizer states as generator lists.
//!
//! `rho = prod_i (I + g_i) / 2^n`; fewer than `n` generators means the state
//! is mixed. Entropies use the rank of the subgroup supported on a region,
//! which covers pure and mixed states with one formula.

use rand::Rng;

use super::clifford::CliffordOp;
use super::pauli::{words, Pauli, PauliString};
use crate::error::{Error, Result};
use crate::shape::SystemShape;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerState {
    n: usize,
    gens: Vec<PauliString>,
}

impl StabilizerState {
    /// `|0...0>`.
    pub fn zero(n: usize) -> Self {
        let gens = (0..n).map(|q| PauliString::single(n, q, Pauli::Z)).collect();
        Self { n, gens }
    }

    /// Maximally mixed state on `n` qubits.
    pub fn maximally_mixed(n: usize) -> Self {
        Self { n, gens: Vec::new() }
    }

    /// Builds a state from explicit generators after validating them.
    pub fn from_generators(n: usize, gens: Vec<PauliString>) -> Result<Self> {
        let s = Self { n, gens };
        s.validate()?;
        Ok(s)
    }

    /// `n_r` Bell pairs between R and the leading qubits of A; the rest in `|0>`.
    pub fn bell_pairs(shape: &SystemShape) -> Result<Self> {
        shape.validate()?;
        let n = shape.total();
        let mut s = Self::zero(n);
        for k in 0..shape.n_r {
            let (r, a) = (k, shape.n_r + k);
            s.apply_clifford(&CliffordOp::hadamard(), &[r])?;
            s.apply_clifford(&CliffordOp::cnot(), &[r, a])?;
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.gens
    }

    pub fn is_pure(&self) -> bool {
        self.gens.len() == self.n
    }

    /// Checks Hermiticity, commutation and GF(2) independence.
    pub fn validate(&self) -> Result<()> {
        for g in &self.gens {
            if g.n() != self.n || !g.is_hermitian() {
                return Err(Error::Numerical(format!("bad generator {g}")));
            }
        }
        for i in 0..self.gens.len() {
            for j in i + 1..self.gens.len() {
                if !self.gens[i].commutes(&self.gens[j]) {
                    return Err(Error::Numerical(format!("generators {i} and {j} anticommute")));
                }
            }
        }
        let mut rows: Vec<Vec<u64>> = self.gens.iter().map(packed).collect();
        if gf2_rank(&mut rows) != self.gens.len() {
            return Err(Error::Numerical("generators are dependent".into()));
        }
        Ok(())
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.n];
        for &t in targets {
            if t >= self.n {
                return Err(Error::IndexOutOfRange { index: t, n: self.n });
            }
            if std::mem::replace(&mut seen[t], true) {
                return Err(Error::DuplicateTarget(t));
            }
        }
        Ok(())
    }

    /// Conjugates every generator by `op` acting on `targets` (in order).
    pub fn apply_clifford(&mut self, op: &CliffordOp, targets: &[usize]) -> Result<()> {
        if targets.len() != op.n() {
            return Err(Error::Param(format!(
                "operator acts on {} qubits, {} targets given",
                op.n(),
                targets.len()
            )));
        }
        self.check_targets(targets)?;
        let k = op.n();
        for g in &mut self.gens {
            let mut local = PauliString::identity(k);
            let mut touched = false;
            for (j, &t) in targets.iter().enumerate() {
                let (x, z) = (g.x_bit(t), g.z_bit(t));
                if x || z {
                    local.set_bits(j, x, z);
                    touched = true;
                }
            }
            if !touched {
                continue;
            }
            let img = op.conjugate(&local);
            for (j, &t) in targets.iter().enumerate() {
                g.set_bits(t, img.x_bit(j), img.z_bit(j));
            }
            g.add_phase(img.phase());
        }
        debug_assert!(self.validate().is_ok());
        Ok(())
    }

    /// Applies `X` on qubit `q`.
    pub fn apply_x(&mut self, q: usize) -> Result<()> {
        self.apply_clifford(&CliffordOp::pauli_x(), &[q])
    }

    /// Writes `+/- Z_q`, or `None` when `Z_q` (up to sign) is not in the group.
    fn z_sign_in_group(&self, q: usize) -> Option<bool> {
        // Reduced row echelon form over the (x|z) columns, tracking phases.
        let mut rows = self.gens.clone();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..2 * self.n {
            let bit = |p: &PauliString| {
                if col < self.n {
                    p.x_bit(col)
                } else {
                    p.z_bit(col - self.n)
                }
            };
            let Some(piv) = (rank..rows.len()).find(|&r| bit(&rows[r])) else {
                continue;
            };
            rows.swap(rank, piv);
            let pr = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && bit(row) {
                    row.mul_assign_right(&pr);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        let mut w = PauliString::single(self.n, q, Pauli::Z);
        for (r, &col) in pivots.iter().enumerate() {
            let set = if col < self.n { w.x_bit(col) } else { w.z_bit(col - self.n) };
            if set {
                w.mul_assign_right(&rows[r]);
            }
        }
        if !w.is_identity() {
            return None;
        }
        // Z_q * g_1 * ... = i^k I and every g has eigenvalue +1.
        Some(w.phase() == 2)
    }

    /// `Some(outcome)` when measuring `Z_q` is deterministic.
    fn z_outcome_if_determined(&self, q: usize) -> Result<Option<bool>> {
        if q >= self.n {
            return Err(Error::IndexOutOfRange { index: q, n: self.n });
        }
        if self.gens.iter().any(|g| g.x_bit(q)) {
            return Ok(None);
        }
        Ok(self.z_sign_in_group(q))
    }

    /// Post-measurement update for a random outcome.
    fn collapse(&mut self, q: usize, outcome: bool) {
        let mut z = PauliString::single(self.n, q, Pauli::Z);
        if outcome {
            z.set_phase(2);
        }
        let anti: Vec<usize> = (0..self.gens.len()).filter(|&i| self.gens[i].x_bit(q)).collect();
        match anti.split_first() {
            Some((&p, rest)) => {
                let pg = self.gens[p].clone();
                for &i in rest {
                    self.gens[i].mul_assign_right(&pg);
                }
                self.gens[p] = z;
            }
            // Mixed state with Z_q outside the group.
            None => self.gens.push(z),
        }
    }

    /// Projective Z measurement; returns the outcome bit.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<bool> {
        if let Some(m) = self.z_outcome_if_determined(q)? {
            return Ok(m);
        }
        let outcome: bool = rng.random();
        self.collapse(q, outcome);
        Ok(outcome)
    }

    /// Projects onto a chosen outcome and returns its probability.
    /// A zero-probability request leaves the state untouched.
    pub fn postselect_z(&mut self, q: usize, outcome: bool) -> Result<f64> {
        match self.z_outcome_if_determined(q)? {
            Some(m) => Ok(if m == outcome { 1.0 } else { 0.0 }),
            None => {
                self.collapse(q, outcome);
                Ok(0.5)
            }
        }
    }

    /// Completely dephases qubit `q` in the Z basis (measurement without record).
    pub fn dephase_z(&mut self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::IndexOutOfRange { index: q, n: self.n });
        }
        if let Some(p) = self.gens.iter().position(|g| g.x_bit(q)) {
            let pg = self.gens.remove(p);
            for g in &mut self.gens {
                if g.x_bit(q) {
                    g.mul_assign_right(&pg);
                }
            }
        }
        Ok(())
    }

    /// Sets a freshly measured qubit to `|0>` given its outcome.
    pub fn reset_to_zero(&mut self, q: usize, outcome: bool) -> Result<()> {
        if outcome {
            self.apply_x(q)?;
        }
        Ok(())
    }

    /// Traces out `qubits`: symplectic elimination cleans their X then Z
    /// columns, lowest qubit first, discarding each pivot generator.
    /// The qubits stay in the register, maximally mixed.
    pub fn trace_out(&mut self, qubits: &[usize]) -> Result<()> {
        self.check_targets(qubits)?;
        let mut qs = qubits.to_vec();
        qs.sort_unstable();
        for &q in &qs {
            for use_x in [true, false] {
                let bit = |p: &PauliString| if use_x { p.x_bit(q) } else { p.z_bit(q) };
                let Some(piv) = self.gens.iter().position(bit) else {
                    continue;
                };
                let pg = self.gens.remove(piv);
                for g in &mut self.gens {
                    if bit(g) {
                        g.mul_assign_right(&pg);
                    }
                }
            }
        }
        Ok(())
    }

    /// Replaces `qubits` by fresh `|0>` after tracing them out.
    pub fn trace_out_and_reset(&mut self, qubits: &[usize]) -> Result<()> {
        self.trace_out(qubits)?;
        for &q in qubits {
            self.gens.push(PauliString::single(self.n, q, Pauli::Z));
        }
        Ok(())
    }

    /// Von Neumann entropy of `region` in bits:
    /// `|A| - dim G_A` with `dim G_A = |G| - rank(G restricted to the complement)`.
    pub fn entropy(&self, region: &[usize]) -> Result<usize> {
        self.check_targets(region)?;
        let w = words(self.n);
        let mut keep = vec![!0u64; w];
        if self.n % 64 != 0 {
            keep[w - 1] = (1u64 << (self.n % 64)) - 1;
        }
        for &q in region {
            keep[q / 64] &= !(1u64 << (q % 64));
        }
        let mut rows: Vec<Vec<u64>> = self
            .gens
            .iter()
            .map(|g| {
                let mut r = Vec::with_capacity(2 * w);
                r.extend(g.x_words().iter().zip(&keep).map(|(a, m)| a & m));
                r.extend(g.z_words().iter().zip(&keep).map(|(a, m)| a & m));
                r
            })
            .collect();
        let rank = gf2_rank(&mut rows);
        Ok(region.len() + rank - self.gens.len())
    }

    /// `S(R) + S(A) - S(RA)` in bits.
    pub fn mutual_info(&self, r: &[usize], a: &[usize]) -> Result<usize> {
        if let Some(&q) = r.iter().find(|q| a.contains(q)) {
            return Err(Error::Overlap(q));
        }
        let ra: Vec<usize> = r.iter().chain(a).copied().collect();
        Ok(self.entropy(r)? + self.entropy(a)? - self.entropy(&ra)?)
    }
}

fn packed(p: &PauliString) -> Vec<u64> {
    p.x_words().iter().chain(p.z_words()).copied().collect()
}

/// Rank of bit-packed rows over GF(2); rows are clobbered.
pub(crate) fn gf2_rank(rows: &mut [Vec<u64>]) -> usize {
    let Some(width) = rows.first().map(Vec::len) else {
        return 0;
    };
    let mut rank = 0;
    for word in 0..width {
        for bit in 0..64 {
            let mask = 1u64 << bit;
            let Some(piv) = (rank..rows.len()).find(|&r| rows[r][word] & mask != 0) else {
                continue;
            };
            rows.swap(rank, piv);
            let (head, tail) = rows.split_at_mut(rank + 1);
            let pr = &head[rank];
            for row in tail.iter_mut() {
                if row[word] & mask != 0 {
                    for (a, b) in row[word..].iter_mut().zip(&pr[word..]) {
                        *a ^= b;
                    }
                }
            }
            rank += 1;
            if rank == rows.len() {
                return rank;
            }
        }
    }
    rank
}
