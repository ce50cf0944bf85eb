// SPDX-License-Identifier: Apache-2.0

//! Closed-form information curves and lifetimes.
//!
//! Every curve is a Rényi-2 mutual information in bits built from averaged
//! (pseudo-)purities. The purities are exposed separately in [`purity`] so
//! that [`transfer`] can check them against explicit matrix products.
//!
//! Dimensions enter as `2^N` in `f64`, which is exact for the counts used
//! here; forms that square `d_A d_B` refuse counts that would overflow.

pub mod transfer;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LN2: f64 = std::f64::consts::LN_2;

pub(crate) fn dim(n: usize) -> f64 {
    2f64.powi(n as i32)
}

/// `log2(1 + x)` without cancellation for small `x`.
fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / LN2
}

/// `log2(1 + 2^x)`.
fn log2_1p_exp2(x: f64) -> f64 {
    if x > 0.0 {
        x + log2_1p(2f64.powf(-x))
    } else {
        log2_1p(2f64.powf(x))
    }
}

fn check_exponent(total_bits: usize) -> Result<()> {
    if total_bits > 1000 {
        return Err(Error::Param(format!("dimension 2^{total_bits} is outside f64 range")));
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Param(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    Ok(())
}

/// Averaged purities behind each curve.
pub mod purity {
    use super::*;

    /// Purities of `A` and of `RA` for an unconditioned curve; `R` stays
    /// maximally mixed so `I_2 = N_R - log2 a + log2 ra`.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct Unconditioned {
        pub a: f64,
        pub ra: f64,
    }

    impl Unconditioned {
        pub fn qmi(&self, n_r: usize) -> f64 {
            n_r as f64 - self.a.log2() + self.ra.log2()
        }
    }

    /// Pseudo-purities of `R`, `A` and `RA` under partial monitoring.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct Partial {
        pub r: f64,
        pub a: f64,
        pub ra: f64,
    }

    impl Partial {
        pub fn qmi(&self) -> f64 {
            -self.r.log2() - self.a.log2() + self.ra.log2()
        }
    }

    /// Trajectory-averaged purity of `A` for monitored dynamics with pure reset,
    /// starting from `n_r` Bell pairs:
    /// `[(d_A+1)^t (d_A d_B-1)^t (1+d_R) - (d_A-1)^t (d_A d_B+1)^t (d_R-1)] / (2 d_R d_A^{2t} d_B^t)`.
    pub fn conditioned(n_r: usize, n_a: usize, n_b: usize, t: usize) -> f64 {
        let (d_r, d_a, d_b) = (dim(n_r), dim(n_a), dim(n_b));
        let t = t as f64;
        let x = 1.0 / (d_a * d_b);
        let alpha = t * (1.0 / d_a).ln_1p() + t * (-x).ln_1p();
        let beta = t * (-1.0 / d_a).ln_1p() + t * x.ln_1p();
        beta.exp() / (2.0 * d_r) * ((1.0 + d_r) * (alpha - beta).exp_m1() + 2.0)
    }

    /// Pure-state reset, unmonitored.
    pub fn pure_reset(n_r: usize, n_a: usize, n_b: usize, t: usize) -> Unconditioned {
        let (d_r, d_a, d_b) = (dim(n_r), dim(n_a), dim(n_b));
        let d2 = d_a * d_a;
        let r = d_b * (d2 - 1.0) / (d2 * d_b * d_b - 1.0);
        let c = d_a * (d_b + 1.0) / (d2 * d_b + 1.0);
        let rt = r.powi(t as i32);
        Unconditioned { a: c + (1.0 / d_r - c) * rt, ra: c / d_r + (1.0 - c / d_r) * rt }
    }

    /// No reset, unmonitored (the bath is dephased and kept).
    pub fn no_reset(n_a: usize, n_b: usize, t: usize) -> Unconditioned {
        let (d_a, d_b) = (dim(n_a), dim(n_b));
        let d2 = d_a * d_a;
        let w = (d2 * d_b - 1.0) / (d2 * d_b * d_b - 1.0);
        let wt = w.powi(t as i32);
        Unconditioned {
            a: (1.0 + (d2 - 1.0) * (d_b - 1.0) / (d2 * d_b - 1.0) * wt) / d_a,
            ra: ((d2 - 1.0) * wt + 1.0) / d2,
        }
    }

    /// Fully-mixed reset after a first step with a `|0>` bath. At `t = 0`
    /// both purities carry a spurious factor `d_B` that cancels in the QMI.
    pub fn fully_mixed(n_a: usize, n_b: usize, t: usize) -> Unconditioned {
        let (d_a, d_b) = (dim(n_a), dim(n_b));
        let d2 = d_a * d_a;
        let v = (d2 - 1.0) / (d2 * d_b * d_b - 1.0);
        let vt = v.powi(t as i32);
        Unconditioned { a: (d_b - 1.0) / d_a * vt + 1.0 / d_a, ra: (d_b - 1.0 / d2) * vt + 1.0 / d2 }
    }

    /// Leading-order pseudo-purities under periodic erasure of `n_e` qubits
    /// every `s` steps (`None` = never).
    pub fn partial(n_a: usize, n_e: usize, s: Option<usize>, t: usize) -> Partial {
        let (d_a, d_e) = (dim(n_a), dim(n_e));
        let (ns, s) = match s {
            Some(s) => ((t / s) as i32, s as f64),
            None => (0, 0.0),
        };
        let tail = t as f64 - s * ns as f64;
        let decay = d_e.powi(-ns);
        let geo = if ns == 0 { 0.0 } else { (1.0 - decay) / (d_e - 1.0) };
        Partial {
            r: (s * geo + tail + 1.0) / d_a,
            a: (s * d_e * geo + (tail + 1.0) * decay) / d_a,
            ra: decay,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    Full,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Exact,
    Early,
    Late,
}

fn check_conditioned(n_a: usize, n_b: usize) -> Result<()> {
    if n_a == 0 || n_b == 0 {
        return Err(Error::Param("monitored curves need n_a >= 1 and n_b >= 1".into()));
    }
    Ok(())
}

/// Lower bound on the monitored information, `N_R = N_A` Bell pairs.
pub fn thm1_lower_bound(n_a: usize, n_b: usize, t: usize, form: Form) -> Result<f64> {
    check_conditioned(n_a, n_b)?;
    Ok(match form {
        Form::Full => -2.0 * purity::conditioned(n_a, n_a, n_b, t).log2(),
        Form::Asymptotic => {
            2.0 * n_a as f64 - 2.0 * ((1.0 - 1.0 / dim(n_b)) * t as f64 + 1.0).log2()
        }
    })
}

/// Steps until the asymptotic bound falls to `eps` of its start.
pub fn thm1_lifetime(n_a: usize, n_b: usize, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    if n_b == 0 {
        return Err(Error::Param("lifetime is undefined without a bath".into()));
    }
    let d_b = dim(n_b);
    Ok(d_b / (d_b - 1.0) * (2f64.powf((1.0 - eps) * n_a as f64) - 1.0))
}

/// Lower bound on the monitored information for `N_R <= N_A` Bell pairs.
pub fn thm2_lower_bound(n_r: usize, n_a: usize, n_b: usize, t: usize, form: Form) -> Result<f64> {
    check_conditioned(n_a, n_b)?;
    if n_r == 0 || n_r > n_a {
        return Err(Error::Param(format!("need 1 <= n_r <= n_a, got n_r = {n_r}")));
    }
    Ok(match form {
        Form::Full => -2.0 * purity::conditioned(n_r, n_a, n_b, t).log2(),
        Form::Asymptotic => {
            let (d_r, d_a, d_b) = (dim(n_r), dim(n_a), dim(n_b));
            let k = 1.0 - (d_r + 1.0) / (d_r * d_b) + 1.0 / (2.0 * d_r);
            2.0 * n_r as f64 - 2.0 * log2_1p(d_r * t as f64 / d_a * k)
        }
    })
}

/// Unmonitored information with pure reset, `N_R = N_A`.
pub fn thm3_unconditioned(n_a: usize, n_b: usize, t: usize, regime: Regime) -> Result<f64> {
    let (na, nb, t) = (n_a as f64, n_b as f64, t as f64);
    match regime {
        Regime::Exact => {
            check_exponent(2 * n_a + 2 * n_b)?;
            Ok(purity::pure_reset(n_a, n_a, n_b, t as usize).qmi(n_a))
        }
        Regime::Early => Ok(2.0 * na - t * nb),
        Regime::Late => Ok(2f64.powf(2.0 * na - t * nb)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LifetimeRegime {
    Linear,
    Residual,
}

pub fn thm3_lifetime(n_a: usize, n_b: usize, eps: f64, regime: LifetimeRegime) -> Result<f64> {
    check_eps(eps)?;
    if n_b == 0 {
        return Err(Error::Param("lifetime is undefined without a bath".into()));
    }
    let (na, nb) = (n_a as f64, n_b as f64);
    Ok(match regime {
        LifetimeRegime::Linear => 2.0 * (1.0 - eps) * na / nb,
        LifetimeRegime::Residual => (1.0 / eps).log2() / nb,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionForm {
    Exact,
    Asymptotic,
    Piecewise,
}

/// Unmonitored information for `N_R <= N_A` Bell pairs.
pub fn thm4_transition(n_r: usize, n_a: usize, n_b: usize, t: usize, form: TransitionForm) -> Result<f64> {
    if n_r > n_a {
        return Err(Error::Param(format!("n_r = {n_r} exceeds n_a = {n_a}")));
    }
    let (nr, na, nb, tf) = (n_r as f64, n_a as f64, n_b as f64, t as f64);
    Ok(match form {
        TransitionForm::Exact => {
            check_exponent(2 * n_a + 2 * n_b)?;
            purity::pure_reset(n_r, n_a, n_b, t).qmi(n_r)
        }
        TransitionForm::Asymptotic => {
            let first = log2_1p_exp2(nr + na - tf * nb);
            let second = if n_a == n_r {
                0.0
            } else {
                let k = na - nr;
                let log2_dm1 = k + log2_1p(-(2f64.powf(-k)));
                log2_1p_exp2(log2_dm1 - tf * nb)
            };
            first - second
        }
        TransitionForm::Piecewise => {
            if n_b == 0 {
                return Ok(2.0 * nr);
            }
            let (lo, hi) = ((na - nr) / nb, (na + nr) / nb);
            if tf < lo {
                2.0 * nr
            } else if tf < hi {
                na + nr - nb * tf
            } else {
                0.0
            }
        }
    })
}

/// Monitored information with `n_e` of the bath erased every `s` steps
/// (`s = None` never erases).
pub fn thm5_partial(
    n_a: usize,
    n_b: usize,
    n_e: usize,
    s: Option<usize>,
    t: usize,
    form: Form,
) -> Result<f64> {
    check_conditioned(n_a, n_b)?;
    if n_e == 0 || n_e > n_b || s == Some(0) {
        return Err(Error::Param(format!("need 1 <= n_e <= n_b and s >= 1 (n_e = {n_e}, s = {s:?})")));
    }
    Ok(match form {
        Form::Full => purity::partial(n_a, n_e, s, t).qmi(),
        Form::Asymptotic => {
            let (na, ne, tf) = (n_a as f64, n_e as f64, t as f64);
            match s {
                Some(s) if t >= s => {
                    let ns = (t / s) as f64;
                    let sf = s as f64;
                    2.0 * na - ns * ne - (1.0 + tf - sf * ns).log2() - sf.log2()
                }
                // Before the first erasure the leading-order form is the
                // erasure-free one.
                _ => 2.0 * na - 2.0 * (1.0 + tf).log2(),
            }
        }
    })
}

pub fn thm5_lifetime(n_a: usize, n_e: usize, s: usize, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    if n_e == 0 || s == 0 {
        return Err(Error::Param("need n_e >= 1 and s >= 1".into()));
    }
    let sf = s as f64;
    Ok(sf * ((2.0 - eps) * n_a as f64 - sf.log2()) / n_e as f64)
}

/// Unmonitored information without reset. The expression holds for
/// `t >= 1`; `t = 0` returns `2 N_A` by continuity.
pub fn thm6_no_reset(n_a: usize, n_b: usize, t: usize) -> Result<f64> {
    check_exponent(2 * n_a + 2 * n_b)?;
    if t == 0 {
        return Ok(2.0 * n_a as f64);
    }
    Ok(purity::no_reset(n_a, n_b, t).qmi(n_a))
}

/// Unmonitored information with a fully-mixed bath reset.
pub fn thm7_mixed_reset(n_a: usize, n_b: usize, t: usize, regime: Regime) -> Result<f64> {
    let (na, nb, tf) = (n_a as f64, n_b as f64, t as f64);
    match regime {
        Regime::Exact => {
            check_exponent(2 * n_a + 2 * n_b)?;
            Ok(purity::fully_mixed(n_a, n_b, t).qmi(n_a))
        }
        Regime::Early => Ok(2.0 * na + nb - 2.0 * nb * tf),
        Regime::Late => Ok(2f64.powf(2.0 * na + nb * (1.0 - 2.0 * tf))),
    }
}

pub fn thm7_lifetime(n_a: usize, n_b: usize, eps: f64, regime: LifetimeRegime) -> Result<f64> {
    check_eps(eps)?;
    if n_b == 0 {
        return Err(Error::Param("lifetime is undefined without a bath".into()));
    }
    let (na, nb) = (n_a as f64, n_b as f64);
    Ok(match regime {
        LifetimeRegime::Linear => (1.0 - eps) * (na / nb + 0.5),
        LifetimeRegime::Residual => (1.0 / eps).log2() / (2.0 * nb),
    })
}

/// Named curves, as used on the command line and in suite configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    Thm1Lb,
    Thm1Asymptotic,
    Thm2Lb,
    Thm2Asymptotic,
    Thm3Exact,
    Thm3Early,
    Thm3Late,
    Thm4Exact,
    Thm4Asymptotic,
    Thm4Piecewise,
    Thm5Full,
    Thm5Simplified,
    Thm6Exact,
    Thm7Exact,
    Thm7Early,
    Thm7Late,
}

impl CurveKind {
    pub const ALL: [CurveKind; 16] = [
        Self::Thm1Lb,
        Self::Thm1Asymptotic,
        Self::Thm2Lb,
        Self::Thm2Asymptotic,
        Self::Thm3Exact,
        Self::Thm3Early,
        Self::Thm3Late,
        Self::Thm4Exact,
        Self::Thm4Asymptotic,
        Self::Thm4Piecewise,
        Self::Thm5Full,
        Self::Thm5Simplified,
        Self::Thm6Exact,
        Self::Thm7Exact,
        Self::Thm7Early,
        Self::Thm7Late,
    ];

    pub fn name(&self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Param(format!("unknown curve kind {s:?}")))
    }

    pub fn value(&self, p: &TheoryParams, t: usize) -> Result<f64> {
        let n_r = p.n_r.unwrap_or(p.n_a);
        let n_e = p.n_e.unwrap_or(p.n_b);
        match self {
            Self::Thm1Lb => thm1_lower_bound(p.n_a, p.n_b, t, Form::Full),
            Self::Thm1Asymptotic => thm1_lower_bound(p.n_a, p.n_b, t, Form::Asymptotic),
            Self::Thm2Lb => thm2_lower_bound(n_r, p.n_a, p.n_b, t, Form::Full),
            Self::Thm2Asymptotic => thm2_lower_bound(n_r, p.n_a, p.n_b, t, Form::Asymptotic),
            Self::Thm3Exact => thm3_unconditioned(p.n_a, p.n_b, t, Regime::Exact),
            Self::Thm3Early => thm3_unconditioned(p.n_a, p.n_b, t, Regime::Early),
            Self::Thm3Late => thm3_unconditioned(p.n_a, p.n_b, t, Regime::Late),
            Self::Thm4Exact => thm4_transition(n_r, p.n_a, p.n_b, t, TransitionForm::Exact),
            Self::Thm4Asymptotic => thm4_transition(n_r, p.n_a, p.n_b, t, TransitionForm::Asymptotic),
            Self::Thm4Piecewise => thm4_transition(n_r, p.n_a, p.n_b, t, TransitionForm::Piecewise),
            Self::Thm5Full => thm5_partial(p.n_a, p.n_b, n_e, p.s, t, Form::Full),
            Self::Thm5Simplified => thm5_partial(p.n_a, p.n_b, n_e, p.s, t, Form::Asymptotic),
            Self::Thm6Exact => thm6_no_reset(p.n_a, p.n_b, t),
            Self::Thm7Exact => thm7_mixed_reset(p.n_a, p.n_b, t, Regime::Exact),
            Self::Thm7Early => thm7_mixed_reset(p.n_a, p.n_b, t, Regime::Early),
            Self::Thm7Late => thm7_mixed_reset(p.n_a, p.n_b, t, Regime::Late),
        }
    }
}

/// Inputs shared by all curves; unused fields are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoryParams {
    /// Defaults to `n_a`.
    #[serde(default)]
    pub n_r: Option<usize>,
    pub n_a: usize,
    pub n_b: usize,
    /// Defaults to `n_b`.
    #[serde(default)]
    pub n_e: Option<usize>,
    /// Erasure period; `None` never erases.
    #[serde(default)]
    pub s: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryPoint {
    pub t: usize,
    pub bits: f64,
    /// False where the expression is negative or only defined by convention.
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryCurve {
    pub kind: CurveKind,
    pub params: TheoryParams,
    pub points: Vec<TheoryPoint>,
}

impl TheoryCurve {
    pub fn evaluate(kind: CurveKind, params: TheoryParams, t_max: usize) -> Result<Self> {
        let points = (0..=t_max)
            .map(|t| {
                let bits = kind.value(&params, t)?;
                let by_convention = kind == CurveKind::Thm6Exact && t == 0;
                Ok(TheoryPoint { t, bits, valid: bits >= 0.0 && !by_convention })
            })
            .collect::<Result<_>>()?;
        Ok(Self { kind, params, points })
    }

    pub fn at(&self, t: usize) -> Option<f64> {
        self.points.iter().find(|p| p.t == t).map(|p| p.bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reference values from an independent 50-digit evaluation of the
    /// printed expressions.
    const FROZEN: &[(&str, f64, f64)] = &[
        ("thm1 full 5,1,0", 10.0, 0.0),
        ("thm1 full 5,1,1", 8.8310144060482509, 0.0),
        ("thm1 full 5,1,10", 4.8306713656295772, 0.0),
        ("thm1 full 3,2,7", 0.5932978746484421, 0.0),
        ("thm1 simp 5,1,1", 8.8300749985576876, 0.0),
        ("thm1 simp 64,16,64", 115.95530772448031, 0.0),
        ("thm2 full 2,5,1,3", 3.5063322991646426, 0.0),
        ("thm2 full 4,4,2,5", 3.4926971477866317, 0.0),
        ("thm2 simp 2,5,1,3", 3.504144973112829, 0.0),
        ("thm3 exact 4,1,0", 8.0, 0.0),
        ("thm3 exact 4,1,1", 6.6831428946600596, 0.0),
        ("thm3 exact 4,1,6", 1.8593131578265992, 0.0),
        ("thm3 exact 4,1,12", 0.056788936506312371, 0.0),
        ("thm4 exact 2,4,1,3", 2.3543588125572753, 0.0),
        ("thm4 asym 8,64,16,4", 8.0, 0.0),
        ("thm5 full 64,16,4,8", 93.99988993253101, 0.0),
        ("thm5 full 6,2,3,7", 4.4912148379354874, 0.0),
        ("thm6 4,1,1", 6.6831428946600596, 0.0),
        ("thm6 4,1,5", 3.1364241729292697, 0.0),
        ("thm6 3,2,4", 0.30995901758898239, 0.0),
        ("thm7 4,1,1", 6.6831428946600596, 0.0),
        ("thm7 4,1,3", 3.1339544005423949, 0.0),
        ("thm7 3,2,2", 0.9597463140050336, 0.0),
    ];

    fn computed(label: &str) -> f64 {
        let args: Vec<usize> =
            label.rsplit(' ').next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        let head: Vec<&str> = label.split(' ').collect();
        let r = match (head[0], head[1]) {
            ("thm1", "full") => thm1_lower_bound(args[0], args[1], args[2], Form::Full),
            ("thm1", "simp") => thm1_lower_bound(args[0], args[1], args[2], Form::Asymptotic),
            ("thm2", "full") => thm2_lower_bound(args[0], args[1], args[2], args[3], Form::Full),
            ("thm2", "simp") => thm2_lower_bound(args[0], args[1], args[2], args[3], Form::Asymptotic),
            ("thm3", "exact") => thm3_unconditioned(args[0], args[1], args[2], Regime::Exact),
            ("thm4", "exact") => thm4_transition(args[0], args[1], args[2], args[3], TransitionForm::Exact),
            ("thm4", "asym") => {
                thm4_transition(args[0], args[1], args[2], args[3], TransitionForm::Asymptotic)
            }
            ("thm5", "full") => thm5_partial(args[0], args[1], args[1], Some(args[2]), args[3], Form::Full),
            ("thm6", _) => thm6_no_reset(args[0], args[1], args[2]),
            ("thm7", _) => thm7_mixed_reset(args[0], args[1], args[2], Regime::Exact),
            _ => unreachable!("{label}"),
        };
        r.unwrap()
    }

    #[test]
    fn frozen_reference_values() {
        for &(label, want, _) in FROZEN {
            let got = computed(label);
            let tol = 1e-12 * want.abs().max(1.0);
            assert!((got - want).abs() < tol, "{label}: {got} vs {want}");
        }
    }

    #[test]
    fn lifetimes() {
        assert!((thm1_lifetime(5, 1, 0.25).unwrap() - 24.908685288118865).abs() < 1e-10);
        assert!((thm1_lifetime(8, 1, 0.25).unwrap() - 126.0).abs() < 1e-10);
        assert!(thm1_lifetime(5, 0, 0.25).is_err());
        assert!((thm3_lifetime(5, 1, 0.25, LifetimeRegime::Linear).unwrap() - 7.5).abs() < 1e-12);
        assert!((thm3_lifetime(9, 1, 0.25, LifetimeRegime::Residual).unwrap() - 2.0).abs() < 1e-12);
        assert!((thm5_lifetime(10, 2, 1, 0.25).unwrap() - 8.75).abs() < 1e-12);
        assert!((thm7_lifetime(4, 1, 0.25, LifetimeRegime::Linear).unwrap() - 3.375).abs() < 1e-12);
        assert!(thm1_lifetime(5, 1, 1.0).is_err());
    }

    #[test]
    fn early_and_piecewise_examples() {
        assert_eq!(thm3_unconditioned(32, 16, 2, Regime::Early).unwrap(), 32.0);
        assert_eq!(thm7_mixed_reset(4, 1, 1, Regime::Early).unwrap(), 7.0);
        assert!(thm7_mixed_reset(4, 1, 5, Regime::Late).unwrap() < 1.0);
        assert_eq!(thm4_transition(8, 64, 16, 3, TransitionForm::Piecewise).unwrap(), 16.0);
        assert_eq!(thm4_transition(8, 64, 16, 4, TransitionForm::Piecewise).unwrap(), 8.0);
        assert_eq!(thm4_transition(8, 64, 16, 5, TransitionForm::Piecewise).unwrap(), 0.0);
        for form in [TransitionForm::Asymptotic, TransitionForm::Piecewise, TransitionForm::Exact] {
            assert!((thm4_transition(3, 5, 2, 0, form).unwrap() - 6.0).abs() < 0.01, "{form:?}");
        }
    }

    #[test]
    fn large_bath_limit_is_universal() {
        let v = thm1_lower_bound(10, 60, 3, Form::Asymptotic).unwrap();
        assert!((v - 16.0).abs() < 1e-12);
    }

    #[test]
    fn partial_limits() {
        for t in 0..50 {
            let never = thm5_partial(12, 3, 2, None, t, Form::Full).unwrap();
            let thm1_large_b = 24.0 - 2.0 * ((t + 1) as f64).log2();
            assert!((never - thm1_large_b).abs() < 1e-12);
            let every = thm5_partial(12, 3, 3, Some(1), t, Form::Asymptotic).unwrap();
            assert_eq!(every, thm3_unconditioned(12, 3, t, Regime::Early).unwrap());
        }
        assert_eq!(thm5_partial(64, 16, 16, Some(4), 8, Form::Asymptotic).unwrap(), 94.0);
        assert!(thm5_partial(4, 2, 3, Some(1), 1, Form::Full).is_err());
    }

    #[test]
    fn consistency_between_curve_kinds() {
        for t in 0..=200 {
            let a = thm2_lower_bound(12, 12, 30, t, Form::Full).unwrap();
            let b = thm1_lower_bound(12, 30, t, Form::Full).unwrap();
            assert!((a - b).abs() < 1e-9);
            let c = thm2_lower_bound(12, 12, 30, t, Form::Asymptotic).unwrap();
            let d = thm1_lower_bound(12, 30, t, Form::Asymptotic).unwrap();
            assert!((c - d).abs() < 2e-3 * (1.0 + t as f64).log2().max(1.0), "{t}: {c} {d}");
            let e = thm4_transition(12, 12, 4, t, TransitionForm::Exact).unwrap();
            let f = thm3_unconditioned(12, 4, t, Regime::Exact).unwrap();
            assert!((e - f).abs() < 1e-9);
        }
        // Early-time agreement of the exact and linear forms.
        for t in 0..=3 {
            let exact = thm3_unconditioned(10, 2, t, Regime::Exact).unwrap();
            let early = thm3_unconditioned(10, 2, t, Regime::Early).unwrap();
            assert!((exact - early).abs() < 0.5, "{t}");
        }
        // No reset and pure reset agree in the large-system limit.
        for t in 1..=20 {
            let a = thm6_no_reset(20, 4, t).unwrap();
            let b = thm3_unconditioned(20, 4, t, Regime::Exact).unwrap();
            assert!((a - b).abs() < 0.1, "{t}: {a} {b}");
        }
        assert!((thm6_no_reset(4, 1, 1).unwrap() - thm3_unconditioned(4, 1, 1, Regime::Exact).unwrap()).abs() < 0.2);
    }

    #[test]
    fn curves_are_monotone() {
        let p = TheoryParams { n_r: Some(3), n_a: 6, n_b: 2, n_e: Some(1), s: Some(3) };
        // The simplified partial form is a sawtooth at erasure steps.
        for kind in CurveKind::ALL.into_iter().filter(|k| *k != CurveKind::Thm5Simplified) {
            let c = TheoryCurve::evaluate(kind, p, 40).unwrap();
            for w in c.points.windows(2).skip(1) {
                assert!(w[1].bits <= w[0].bits + 1e-9, "{kind:?} at {}", w[1].t);
            }
        }
        let p0 = TheoryParams { n_r: None, n_a: 6, n_b: 2, n_e: None, s: None };
        assert_eq!(TheoryCurve::evaluate(CurveKind::Thm3Exact, p0, 0).unwrap().points[0].bits, 12.0);
    }

    #[test]
    fn names_round_trip() {
        for k in CurveKind::ALL {
            assert_eq!(CurveKind::parse(&k.name()).unwrap(), k);
        }
        assert_eq!(CurveKind::Thm1Lb.name(), "thm1-lb");
        assert!(CurveKind::parse("thm9").is_err());
    }
}
