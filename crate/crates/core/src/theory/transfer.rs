// SPDX-License-Identifier: Apache-2.0

//! Two-dimensional transfer matrices on the `(tau, e)` basis of swap-like
//! operators, used as an independent route to the closed forms.

use super::{dim, purity};
use crate::error::{Error, Result};
use crate::shape::SystemShape;

pub type M2 = [[f64; 2]; 2];

fn apply(a: &M2, v: [f64; 2]) -> [f64; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

fn pow_apply(a: &M2, k: usize, mut v: [f64; 2]) -> [f64; 2] {
    for _ in 0..k {
        v = apply(a, v);
    }
    v
}

/// Replica step for monitored dynamics with pure reset; `m = -1` is the
/// replica limit. Eigenvalues `q_tau ± q_e`.
pub fn q_matrix(m: i32, d_a: f64, d_b: f64) -> M2 {
    let pre = d_b.powi(-(m + 1));
    let qt = pre * (1.0 - 1.0 / (d_a * d_a * d_b));
    let qe = pre * (1.0 - 1.0 / d_b) / d_a;
    [[qt, qe], [qe, qt]]
}

/// Erasure step: `d_e` of the bath dimension is discarded, the remaining
/// `d_b / d_e` measured.
pub fn q_erasure_matrix(m: i32, d_a: f64, d_b: f64, d_e: f64) -> M2 {
    let d_bp = d_b / d_e;
    let pre = d_bp.powi(-(m + 1));
    let d_ae = d_a * d_e;
    [
        [pre * (1.0 - 1.0 / (d_a * d_a * d_bp)) / d_e, pre * (1.0 - 1.0 / d_bp) / d_ae],
        [pre * (1.0 - 1.0 / (d_e * d_e * d_bp)) / d_a, pre * (1.0 - 1.0 / (d_ae * d_ae * d_bp))],
    ]
}

/// Heisenberg step of the unmonitored channel with a pure bath.
pub fn pure_reset_step(d_a: f64, d_b: f64) -> M2 {
    let d2 = (d_a * d_b).powi(2);
    let r = d_b * (d_a * d_a - 1.0) / (d2 - 1.0);
    let s = d_a * (d_b * d_b - 1.0) / (d2 - 1.0);
    [[r, 0.0], [s, 1.0]]
}

/// Heisenberg step of the unmonitored channel with a maximally mixed bath.
pub fn mixed_reset_step(d_a: f64, d_b: f64) -> M2 {
    let v = (d_a * d_a - 1.0) / ((d_a * d_b).powi(2) - 1.0);
    [[v, 0.0], [(1.0 - v) / d_a, 1.0]]
}

/// Step of the dephased-bath dynamics after the first one.
pub fn no_reset_step(d_a: f64, d_b: f64) -> M2 {
    let n = (d_a * d_b).powi(2) - 1.0;
    [[(d_a * d_a * d_b - 1.0) / n, 0.0], [d_a * (d_b - 1.0) / n, 1.0]]
}

/// First-order number `v + d·eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Jet(f64, f64);

impl Jet {
    fn mul(self, o: Jet) -> Jet {
        Jet(self.0 * o.0, self.0 * o.1 + self.1 * o.0)
    }
    fn add(self, o: Jet) -> Jet {
        Jet(self.0 + o.0, self.1 + o.1)
    }
    fn at(self, eps: f64) -> f64 {
        self.0 + self.1 * eps
    }
}

type J2 = [[Jet; 2]; 2];

fn jmul(a: &J2, v: [Jet; 2]) -> [Jet; 2] {
    [a[0][0].mul(v[0]).add(a[0][1].mul(v[1])), a[1][0].mul(v[0]).add(a[1][1].mul(v[1]))]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Conditioned,
    PureReset,
    FullyMixedReset,
    NoReset,
    /// Leading order in `1/d_A`.
    Partial { n_e: usize, s: Option<usize> },
    /// Full erasure matrix, without expansion.
    PartialExact { n_e: usize, s: Option<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    R,
    A,
    RA,
}

/// `(tau_2 | c` and `(e | c`. The replica prefactors cancel against the
/// normalization, so neither depends on `m`.
fn pair_tau(d: f64, c: [f64; 2]) -> f64 {
    c[0] + c[1] / d
}

fn pair_e(d: f64, c: [f64; 2]) -> f64 {
    c[0] / d + c[1]
}

/// Averaged (pseudo-)purity after `t` steps from `N_R` Bell pairs.
///
/// `m` only enters the monitored variants; the unmonitored variants are
/// physical purities. Unmonitored pairings use `d_R`, the monitored ones
/// the register they describe.
pub fn transfer_purity(variant: Variant, m: i32, shape: &SystemShape, t: usize, boundary: Boundary) -> Result<f64> {
    shape.validate()?;
    let (d_r, d_a, d_b) = (shape.d_r(), shape.d_a(), shape.d_b());
    if 2 * (shape.n_a + shape.n_b) > 1000 {
        return Err(Error::Param("dimensions are outside f64 range".into()));
    }
    let unconditioned = |v: [f64; 2]| match boundary {
        Boundary::R => 1.0 / d_r,
        Boundary::A => v[0] / d_r + v[1],
        Boundary::RA => v[0] + v[1] / d_r,
    };
    Ok(match variant {
        Variant::Conditioned => match boundary {
            Boundary::RA => 1.0,
            _ => pair_e(d_r, pow_apply(&q_matrix(m, d_a, d_b), t, [1.0, 0.0])),
        },
        Variant::PureReset => unconditioned(pow_apply(&pure_reset_step(d_a, d_b), t, [1.0, 0.0])),
        Variant::FullyMixedReset => {
            let v = if t == 0 {
                [1.0, 0.0]
            } else {
                let inner = pow_apply(&mixed_reset_step(d_a, d_b), t - 1, [1.0, 0.0]);
                apply(&pure_reset_step(d_a, d_b), inner)
            };
            unconditioned(v)
        }
        Variant::NoReset => {
            let v = if t == 0 {
                [1.0, 0.0]
            } else {
                let first = apply(&pure_reset_step(d_a, d_b), [1.0, 0.0]);
                pow_apply(&no_reset_step(d_a, d_b), t - 1, first)
            };
            unconditioned(v)
        }
        Variant::Partial { n_e, s } => {
            check_partial(shape, n_e, s)?;
            let (z, one) = (Jet(0.0, 0.0), Jet(1.0, 0.0));
            let eps = Jet(0.0, 1.0);
            let q: J2 = [[one, eps], [eps, one]];
            let le = 1.0 / dim(n_e);
            let qp: J2 = [[Jet(le, 0.0), Jet(0.0, le)], [eps, one]];
            let start = match boundary {
                Boundary::R => [z, one],
                Boundary::A | Boundary::RA => [one, z],
            };
            let mut c = start;
            for k in 1..=t {
                let erase = s.is_some_and(|s| k % s == 0);
                c = jmul(if erase { &qp } else { &q }, c);
            }
            let pair = match boundary {
                Boundary::A => c[0].mul(eps).add(c[1]),
                _ => c[0].add(c[1].mul(eps)),
            };
            pair.at(1.0 / d_a)
        }
        Variant::PartialExact { n_e, s } => {
            check_partial(shape, n_e, s)?;
            let q = q_matrix(m, d_a, d_b);
            let qp = q_erasure_matrix(m, d_a, d_b, dim(n_e));
            let mut c = match boundary {
                Boundary::R => [0.0, 1.0],
                Boundary::A | Boundary::RA => [1.0, 0.0],
            };
            for k in 1..=t {
                let erase = s.is_some_and(|s| k % s == 0);
                c = apply(if erase { &qp } else { &q }, c);
            }
            match boundary {
                Boundary::A => pair_e(d_a, c),
                _ => pair_tau(d_a, c),
            }
        }
    })
}

fn check_partial(shape: &SystemShape, n_e: usize, s: Option<usize>) -> Result<()> {
    if n_e == 0 || n_e > shape.n_b || s == Some(0) {
        return Err(Error::Param(format!("need 1 <= n_e <= n_b and s >= 1 (n_e = {n_e}, s = {s:?})")));
    }
    if shape.n_r != shape.n_a {
        return Err(Error::Param("partial monitoring curves assume n_r = n_a".into()));
    }
    Ok(())
}

/// `-log2 γ_R - log2 γ_A + log2 γ_RA` from transfer-matrix purities.
pub fn transfer_qmi(variant: Variant, m: i32, shape: &SystemShape, t: usize) -> Result<f64> {
    let p = |b| transfer_purity(variant, m, shape, t, b);
    Ok(-p(Boundary::R)?.log2() - p(Boundary::A)?.log2() + p(Boundary::RA)?.log2())
}

/// Largest relative gap between transfer-matrix and closed-form purities at
/// `m = -1` over `t <= t_max`, `1 <= N_A <= na_max`, `1 <= N_B <= nb_max`.
pub fn max_closed_form_deviation(t_max: usize, na_max: usize, nb_max: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    let mut track = |a: f64, b: f64| worst = worst.max((a - b).abs() / b.abs());
    for n_a in 1..=na_max {
        for n_b in 1..=nb_max {
            for n_r in 1..=n_a {
                let shape = SystemShape::new(n_r, n_a, n_b)?;
                for t in 0..=t_max {
                    let tp = |v, b| transfer_purity(v, -1, &shape, t, b);
                    track(tp(Variant::Conditioned, Boundary::A)?, purity::conditioned(n_r, n_a, n_b, t));
                    let pr = purity::pure_reset(n_r, n_a, n_b, t);
                    track(tp(Variant::PureReset, Boundary::A)?, pr.a);
                    track(tp(Variant::PureReset, Boundary::RA)?, pr.ra);
                    if n_r != n_a {
                        continue;
                    }
                    // The no-reset and mixed-reset closed forms start at t = 1.
                    if t > 0 {
                        let nr = purity::no_reset(n_a, n_b, t);
                        track(tp(Variant::NoReset, Boundary::A)?, nr.a);
                        track(tp(Variant::NoReset, Boundary::RA)?, nr.ra);
                        let fm = purity::fully_mixed(n_a, n_b, t);
                        track(tp(Variant::FullyMixedReset, Boundary::A)?, fm.a);
                        track(tp(Variant::FullyMixedReset, Boundary::RA)?, fm.ra);
                    }
                    for n_e in 1..=n_b {
                        for s in [None, Some(1), Some(3), Some(7)] {
                            let v = Variant::Partial { n_e, s };
                            let p = purity::partial(n_a, n_e, s, t);
                            track(tp(v, Boundary::R)?, p.r);
                            track(tp(v, Boundary::A)?, p.a);
                            track(tp(v, Boundary::RA)?, p.ra);
                        }
                    }
                }
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{thm1_lower_bound, thm5_partial, Form};

    #[test]
    fn closed_forms_match_transfer_products() {
        let worst = max_closed_form_deviation(100, 6, 3).unwrap();
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn q_eigenvalues() {
        let q = q_matrix(-1, 8.0, 4.0);
        let (tr, det) = (q[0][0] + q[1][1], q[0][0] * q[1][1] - q[0][1] * q[1][0]);
        let disc = (tr * tr / 4.0 - det).sqrt();
        assert!((tr / 2.0 + disc - (q[0][0] + q[0][1])).abs() < 1e-15);
        assert!((tr / 2.0 - disc - (q[0][0] - q[0][1])).abs() < 1e-15);
    }

    #[test]
    fn partial_qmi_reproduces_closed_form() {
        let shape = SystemShape::new(6, 6, 3).unwrap();
        for t in 0..30 {
            let v = Variant::Partial { n_e: 2, s: Some(4) };
            let a = transfer_qmi(v, -1, &shape, t).unwrap();
            let b = thm5_partial(6, 3, 2, Some(4), t, Form::Full).unwrap();
            assert!((a - b).abs() < 1e-10, "{t}: {a} {b}");
        }
    }

    #[test]
    fn exact_erasure_approaches_leading_order_for_large_a() {
        let shape = SystemShape::new(14, 14, 12).unwrap();
        for t in [1, 5, 12] {
            let exact = transfer_qmi(Variant::PartialExact { n_e: 2, s: Some(3) }, -1, &shape, t).unwrap();
            let lead = transfer_qmi(Variant::Partial { n_e: 2, s: Some(3) }, -1, &shape, t).unwrap();
            assert!((exact - lead).abs() < 0.02, "{t}: {exact} {lead}");
        }
    }

    #[test]
    fn conditioned_with_no_erasure_matches_lower_bound() {
        let shape = SystemShape::new(5, 5, 2).unwrap();
        for t in 0..20 {
            let v = Variant::PartialExact { n_e: 1, s: None };
            let g = transfer_purity(v, -1, &shape, t, Boundary::A).unwrap();
            let b = thm1_lower_bound(5, 2, t, Form::Full).unwrap();
            assert!((-2.0 * g.log2() - b).abs() < 1e-10);
        }
    }
}
