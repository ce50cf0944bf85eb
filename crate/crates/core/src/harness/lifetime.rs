// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// First time the series reaches `eps` times its initial value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Lifetime {
    Crossed { tau: f64 },
    /// Never crossed within the horizon; not extrapolated.
    Censored { horizon: usize },
}

impl Lifetime {
    pub fn value(&self) -> Option<f64> {
        match self {
            Self::Crossed { tau } => Some(*tau),
            Self::Censored { .. } => None,
        }
    }
}

impl fmt::Display for Lifetime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Crossed { tau } => write!(f, "{tau}"),
            Self::Censored { horizon } => write!(f, "> {horizon}"),
        }
    }
}

/// `values[t]` is the information at step `t`; the crossing is linearly
/// interpolated between the bracketing steps.
pub fn estimate_lifetime(values: &[f64], eps: f64) -> Result<Lifetime> {
    if values.len() < 2 {
        return Err(Error::Param("a lifetime needs at least two points".into()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Param(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    if !(values[0] > 0.0) {
        return Err(Error::ZeroInitial);
    }
    let target = eps * values[0];
    for t in 1..values.len() {
        if values[t] <= target {
            let (hi, lo) = (values[t - 1], values[t]);
            let frac = if hi > lo { (hi - target) / (hi - lo) } else { 1.0 };
            return Ok(Lifetime::Crossed { tau: (t - 1) as f64 + frac });
        }
    }
    Ok(Lifetime::Censored { horizon: values.len() - 1 })
}

/// As [`estimate_lifetime`] on `(t, value)` rows, which must be consecutive
/// from `t = 0`.
pub fn estimate_lifetime_rows(rows: &[(usize, f64)], eps: f64) -> Result<Lifetime> {
    if rows.iter().enumerate().any(|(i, (t, _))| *t != i) {
        return Err(Error::Param("series steps must run 0, 1, 2, ...".into()));
    }
    let values: Vec<f64> = rows.iter().map(|r| r.1).collect();
    estimate_lifetime(&values, eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(estimate_lifetime(&[8.0, 4.0, 2.0, 1.0], 0.5).unwrap(), Lifetime::Crossed { tau: 1.0 });
        let linear: Vec<f64> = (0..11).map(|t| 10.0 - t as f64).collect();
        assert_eq!(estimate_lifetime(&linear, 0.25).unwrap(), Lifetime::Crossed { tau: 7.5 });
        let flat = [3.0, 3.0, 3.0];
        let c = estimate_lifetime(&flat, 0.25).unwrap();
        assert_eq!(c, Lifetime::Censored { horizon: 2 });
        assert_eq!(c.to_string(), "> 2");
        assert!(matches!(estimate_lifetime(&[0.0, 0.0], 0.5), Err(Error::ZeroInitial)));
        assert!(estimate_lifetime(&[1.0], 0.5).is_err());
    }

    #[test]
    fn scale_equivariant() {
        let s = [12.0, 9.5, 7.0, 3.0, 1.0, 0.5];
        let base = estimate_lifetime(&s, 0.25).unwrap();
        for c in [0.1, 3.0, 1e6] {
            let scaled: Vec<f64> = s.iter().map(|x| x * c).collect();
            let got = estimate_lifetime(&scaled, 0.25).unwrap().value().unwrap();
            assert!((got - base.value().unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn rows_must_be_consecutive() {
        assert!(estimate_lifetime_rows(&[(0, 2.0), (2, 1.0)], 0.5).is_err());
        assert!(estimate_lifetime_rows(&[(0, 2.0), (1, 1.0)], 0.5).is_ok());
    }
}
