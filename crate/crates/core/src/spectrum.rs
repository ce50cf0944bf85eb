// SPDX-License-Identifier: Apache-2.0

//! Single-step channels as explicit superoperators, their spectra, fixed
//! points and memory times, and the classical-quantum probe built from the
//! slowest mode.
//!
//! Superoperators use computational matrix units with column-major
//! vectorization, `vec(rho)[i + j d] = rho[i, j]`, so that
//! `vec(K rho K^dag) = (conj(K) ⊗ K) vec(rho)`.

use std::path::Path;

use ndarray::{s, Array2};
use ndarray_linalg::Eig;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dense::state::{dagger, eigvalsh, kron, trace, DenseState, Mat, Vector};
use crate::dense::dynamics::kraus;
use crate::error::{Error, Result};
use crate::protocol::ResetMode;

/// Largest `N_A` for channels acting on `A` alone.
pub const MAX_CHANNEL_A: usize = 6;
/// Largest `N_A + N_B` for the dephasing channel on `A ∪ B`.
pub const MAX_CHANNEL_AB: usize = 7;
/// Outlier threshold in units of the bulk disk radius.
pub const OUTLIER_FACTOR: f64 = 1.3;
pub const FORMAT_VERSION: u32 = 1;

const TP_TOL: f64 = 1e-6;
const TIE_TOL: f64 = 1e-9;

/// Kraus operators of one step, already weighted.
pub fn channel_kraus(u: &Mat, n_a: usize, n_b: usize, reset: ResetMode) -> Result<Vec<Mat>> {
    let (d_a, d_b) = (1usize << n_a, 1usize << n_b);
    let d = d_a * d_b;
    if u.dim() != (d, d) {
        return Err(Error::Shape(format!("unitary is {:?}, expected {d}x{d}", u.dim())));
    }
    Ok(match reset {
        ResetMode::PureZero => (0..d_b).map(|b| kraus(u, d_b, b, 0).to_owned()).collect(),
        ResetMode::FullyMixed => {
            let w = C64::new((1.0 / d_b as f64).sqrt(), 0.0);
            (0..d_b)
                .flat_map(|bo| (0..d_b).map(move |bi| (bo, bi)))
                .map(|(bo, bi)| kraus(u, d_b, bo, bi).mapv(|c| c * w))
                .collect()
        }
        ResetMode::None => (0..d_b)
            .map(|b| {
                let mut k = u.clone();
                for (row, mut r) in k.rows_mut().into_iter().enumerate() {
                    if row % d_b != b {
                        r.fill(C64::new(0.0, 0.0));
                    }
                }
                k
            })
            .collect(),
    })
}

pub fn apply_kraus(ks: &[Mat], rho: &Mat) -> Mat {
    let mut out = Mat::zeros((ks[0].nrows(), ks[0].nrows()));
    for k in ks {
        out += &k.dot(rho).dot(&dagger(k));
    }
    out
}

/// Superoperator of one step: on `A` for pure-zero and fully-mixed resets,
/// on `A ∪ B` for the dephasing (no-reset) channel.
pub fn build_superoperator(u: &Mat, n_a: usize, n_b: usize, reset: ResetMode) -> Result<Mat> {
    match reset {
        ResetMode::None if n_a + n_b > MAX_CHANNEL_AB => {
            return Err(Error::Resource(format!("dephasing channel limited to N_A + N_B <= {MAX_CHANNEL_AB}")))
        }
        _ if n_a > MAX_CHANNEL_A => {
            return Err(Error::Resource(format!("channel on A limited to N_A <= {MAX_CHANNEL_A}")))
        }
        _ => {}
    }
    let ks = channel_kraus(u, n_a, n_b, reset)?;
    let d = ks[0].nrows();
    let mut sup = Mat::zeros((d * d, d * d));
    for k in &ks {
        sup += &kron(&k.mapv(|c| c.conj()), k);
    }
    Ok(sup)
}

pub fn vec_cm(rho: &Mat) -> Vector {
    rho.t().iter().copied().collect()
}

pub fn unvec_cm(v: &Vector, d: usize) -> Result<Mat> {
    if v.len() != d * d {
        return Err(Error::Shape(format!("vector of length {} is not {d}x{d}", v.len())));
    }
    Ok(Array2::from_shape_fn((d, d), |(i, j)| v[i + j * d]))
}

pub fn apply_superoperator(sup: &Mat, rho: &Mat) -> Result<Mat> {
    let d = rho.nrows();
    if sup.nrows() != d * d {
        return Err(Error::Shape(format!("superoperator of size {} cannot act on {d}x{d}", sup.nrows())));
    }
    unvec_cm(&sup.dot(&vec_cm(rho)), d)
}

#[cfg(test)]
fn trace_norm_hermitian(m: &Mat) -> Result<f64> {
    let h = (m + &dagger(m)).mapv(|c| c * 0.5);
    Ok(eigvalsh(&h)?.iter().map(|x| x.abs()).sum())
}

#[derive(Debug, Clone)]
pub struct ChannelSpectrum {
    /// Sorted by modulus, descending.
    pub eigenvalues: Vec<C64>,
    pub lambda0: C64,
    /// `None` for a one-dimensional operator space.
    pub lambda1: Option<C64>,
    /// Right eigenvector of `lambda1` as a matrix, unit Frobenius norm, with
    /// its phase chosen to maximize the Hermitian part.
    pub sigma1: Option<Mat>,
    pub fixed_point: Mat,
    /// `-1/log2|lambda1|`; infinite when `|lambda1| = 1`.
    pub tau_eig: f64,
    /// `sqrt(2)` times the median modulus of the non-unit eigenvalues, the
    /// radius of a uniformly filled disk with the same median.
    pub bulk_radius: f64,
}

impl ChannelSpectrum {
    pub fn lambda1_modulus(&self) -> f64 {
        self.lambda1.map_or(0.0, |l| l.norm())
    }

    /// Fraction of eigenvalues other than `lambda0` with modulus above `radius`.
    pub fn fraction_outside(&self, radius: f64) -> f64 {
        let rest = &self.eigenvalues[1..];
        if rest.is_empty() {
            return 0.0;
        }
        rest.iter().filter(|l| l.norm() > radius).count() as f64 / rest.len() as f64
    }

    pub fn summary(&self, radius: Option<f64>) -> SpectrumSummary {
        let l1 = self.lambda1.unwrap_or_default();
        SpectrumSummary {
            format_version: FORMAT_VERSION,
            dim: self.eigenvalues.len(),
            lambda1_re: l1.re,
            lambda1_im: l1.im,
            lambda1_modulus: l1.norm(),
            tau_eig: self.tau_eig.is_finite().then_some(self.tau_eig),
            bulk_radius: self.bulk_radius,
            disk_radius: radius,
            outlier_threshold: radius.map(|r| OUTLIER_FACTOR * r),
            fraction_outside: radius.map(|r| self.fraction_outside(OUTLIER_FACTOR * r)),
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["index", "re", "im", "modulus", "format_version"])?;
        for (i, l) in self.eigenvalues.iter().enumerate() {
            w.write_record([
                i.to_string(),
                format!("{:.17e}", l.re),
                format!("{:.17e}", l.im),
                format!("{:.17e}", l.norm()),
                FORMAT_VERSION.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Scalar record of a spectrum; `tau_eig = None` means infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub format_version: u32,
    pub dim: usize,
    pub lambda1_re: f64,
    pub lambda1_im: f64,
    pub lambda1_modulus: f64,
    pub tau_eig: Option<f64>,
    pub bulk_radius: f64,
    pub disk_radius: Option<f64>,
    pub outlier_threshold: Option<f64>,
    pub fraction_outside: Option<f64>,
}

/// Bulk disk radius of the random-unitary channel: `1/sqrt(d_B)` with a
/// pure or dephased bath, `1/d_B` with a fully-mixed bath.
pub fn disk_radius(n_b: usize, reset: ResetMode) -> f64 {
    let d_b = (1u64 << n_b) as f64;
    match reset {
        ResetMode::FullyMixed => 1.0 / d_b,
        _ => 1.0 / d_b.sqrt(),
    }
}

pub fn spectrum_of(sup: &Mat) -> Result<ChannelSpectrum> {
    let n = sup.nrows();
    let d = (n as f64).sqrt().round() as usize;
    if sup.ncols() != n || d * d != n {
        return Err(Error::Shape(format!("superoperator {:?} is not d^2 x d^2", sup.dim())));
    }
    let (vals, vecs) = sup.eig().map_err(|e| Error::Numerical(format!("eig: {e}")))?;
    let scale = sup.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[j].norm().total_cmp(&vals[i].norm()));

    let i0 = (0..n)
        .min_by(|&i, &j| (vals[i] - 1.0).norm().total_cmp(&(vals[j] - 1.0).norm()))
        .expect("non-empty");
    if (vals[i0] - 1.0).norm() > TP_TOL {
        return Err(Error::Numerical("no eigenvalue at 1: channel is not trace preserving".into()));
    }
    let column = |k: usize| -> Result<Mat> {
        let v = vecs.column(k).to_owned();
        let res = sup.dot(&v) - v.mapv(|c| c * vals[k]);
        let err = res.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if err > 1e-8 * scale * n as f64 {
            return Err(Error::Numerical(format!("eigenvector residual {err:.2e}")));
        }
        unvec_cm(&v, d)
    };

    let raw = column(i0)?;
    let tr = trace(&raw);
    if tr.norm() < 1e-12 {
        return Err(Error::Numerical("fixed-point eigenvector is traceless".into()));
    }
    let fixed = raw.mapv(|c| c / tr);
    let mut fixed_point = (&fixed + &dagger(&fixed)).mapv(|c| c * 0.5);
    let tr = trace(&fixed_point).re;
    fixed_point.mapv_inplace(|c| c / tr);

    let rest: Vec<usize> = order.iter().copied().filter(|&i| i != i0).collect();
    let lambda1_idx = rest.first().map(|&first| {
        let top = vals[first].norm();
        rest.iter()
            .copied()
            .take_while(|&i| top - vals[i].norm() <= TIE_TOL)
            .max_by(|&i, &j| {
                if (vals[i].re - vals[j].re).abs() > TIE_TOL {
                    vals[i].re.total_cmp(&vals[j].re)
                } else {
                    vals[i].im.total_cmp(&vals[j].im)
                }
            })
            .expect("non-empty")
    });
    let (lambda1, sigma1) = match lambda1_idx {
        Some(k) => (Some(vals[k]), Some(hermitian_phase(&column(k)?))),
        None => (None, None),
    };
    let m1 = lambda1.map_or(0.0, |l| l.norm());
    let tau_eig = if m1 >= 1.0 - 1e-12 {
        f64::INFINITY
    } else if m1 == 0.0 {
        0.0
    } else {
        -1.0 / m1.log2()
    };
    let mut mods: Vec<f64> = rest.iter().map(|&i| vals[i].norm()).collect();
    mods.sort_by(f64::total_cmp);
    let median = if mods.is_empty() {
        0.0
    } else if mods.len() % 2 == 1 {
        mods[mods.len() / 2]
    } else {
        0.5 * (mods[mods.len() / 2 - 1] + mods[mods.len() / 2])
    };
    let mut eigenvalues = vec![vals[i0]];
    eigenvalues.extend(rest.iter().map(|&i| vals[i]));
    Ok(ChannelSpectrum {
        eigenvalues,
        lambda0: vals[i0],
        lambda1,
        sigma1,
        fixed_point,
        tau_eig,
        bulk_radius: std::f64::consts::SQRT_2 * median,
    })
}

/// Unit-norm rescaling `e^{i phi} v` maximizing `|| e^{i phi} v + h.c. ||`.
fn hermitian_phase(v: &Mat) -> Mat {
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    // ||e^{i phi} v + e^{-i phi} v^dag||^2 = 2||v||^2 + 2 Re(e^{2 i phi} tr(v v)).
    let z: C64 = v.iter().zip(v.t().iter()).map(|(a, b)| a * b).sum();
    let phase = if z.norm() > 1e-14 { C64::from_polar(1.0, -z.arg() / 2.0) } else { C64::new(1.0, 0.0) };
    v.mapv(|c| c * phase / norm)
}

fn probe_perturbation(spec: &ChannelSpectrum) -> Result<Mat> {
    let sigma = spec
        .sigma1
        .as_ref()
        .ok_or_else(|| Error::Param("spectrum has no slow mode for a probe state".into()))?;
    let h = sigma + &dagger(sigma);
    if h.iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-12 {
        return Err(Error::Param("slow mode has no Hermitian component".into()));
    }
    Ok(h)
}

fn min_eig(m: &Mat) -> Result<f64> {
    Ok(eigvalsh(m)?.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Largest `a` keeping `rho_fix + a (sigma1 + sigma1^dag)` positive
/// semidefinite, by bisection to `1e-6`.
pub fn probe_mixing_max(spec: &ChannelSpectrum) -> Result<f64> {
    let h = probe_perturbation(spec)?;
    let ok = |a: f64| -> Result<bool> { Ok(min_eig(&(&spec.fixed_point + &h.mapv(|c| c * a)))? >= -1e-12) };
    if !ok(0.0)? {
        return Err(Error::Numerical("fixed point is not positive semidefinite".into()));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while ok(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Numerical("probe mixing is unbounded".into()));
        }
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn cq_block(rho_fix: &Mat, pert: &Mat) -> Mat {
    let d = rho_fix.nrows();
    let mut rho = Mat::zeros((2 * d, 2 * d));
    rho.slice_mut(s![..d, ..d]).assign(&rho_fix.mapv(|c| c * 0.5));
    rho.slice_mut(s![d.., d..]).assign(&(rho_fix + pert).mapv(|c| c * 0.5));
    rho
}

/// `½[|0><0| ⊗ rho_fix + |1><1| ⊗ (rho_fix + a(sigma1 + sigma1^dag))]` on one
/// reference qubit and `A`; `a = None` takes half the largest admissible value.
pub fn probe_state(spec: &ChannelSpectrum, a: Option<f64>) -> Result<(DenseState, f64)> {
    let h = probe_perturbation(spec)?;
    let a_max = probe_mixing_max(spec)?;
    let a = a.unwrap_or(0.5 * a_max);
    if !(0.0..=a_max + 1e-6).contains(&a) {
        return Err(Error::Param(format!("probe mixing {a} outside [0, {a_max:.6}]")));
    }
    let rho = cq_block(&spec.fixed_point, &h.mapv(|c| c * a));
    let n = rho.nrows().trailing_zeros() as usize;
    Ok((DenseState::Mixed { n, rho }, a))
}

/// Probe state after `t` steps predicted from the spectrum alone.
pub fn spectral_prediction(spec: &ChannelSpectrum, a: f64, t: usize) -> Result<Mat> {
    let sigma = spec.sigma1.as_ref().ok_or_else(|| Error::Param("no slow mode".into()))?;
    let l = spec.lambda1.expect("sigma1 implies lambda1").powu(t as u32);
    let x = sigma.mapv(|c| c * l * a);
    Ok(cq_block(&spec.fixed_point, &(&x + &dagger(&x))))
}

/// Least-squares fit of `log q(t) = log A + c t log|lambda1|` with `c`
/// rounded to a positive integer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub amplitude: f64,
    pub r_squared: f64,
    pub c: u32,
    pub lambda_fit: f64,
}

pub fn fit_decay(normalized: &[f64], lambda1_modulus: f64) -> Result<DecayFit> {
    if normalized.len() < 3 || normalized.iter().any(|&q| !(q > 0.0)) {
        return Err(Error::Param("decay fit needs at least 3 positive points".into()));
    }
    if !(lambda1_modulus > 0.0 && lambda1_modulus < 1.0) {
        return Err(Error::Param(format!("|lambda1| = {lambda1_modulus} admits no decay")));
    }
    let n = normalized.len() as f64;
    let ys: Vec<f64> = normalized.iter().map(|q| q.ln()).collect();
    let tm = (n - 1.0) / 2.0;
    let ym = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, y) in ys.iter().enumerate() {
        sxy += (t as f64 - tm) * (y - ym);
        sxx += (t as f64 - tm).powi(2);
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * tm;
    let ss_tot: f64 = ys.iter().map(|y| (y - ym).powi(2)).sum();
    let ss_res: f64 = ys.iter().enumerate().map(|(t, y)| (y - intercept - slope * t as f64).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    let c = (slope / lambda1_modulus.ln()).round().max(1.0) as u32;
    Ok(DecayFit { slope, amplitude: intercept.exp(), r_squared, c, lambda_fit: (slope / c as f64).exp() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::dynamics::DenseTrajectory;
    use crate::dense::state::EntropyKind;
    use crate::dense::unitary::{haar_unitary, HamiltonianParams, DEFAULT_T_H};
    use crate::protocol::{Monitoring, Protocol};
    use crate::shape::SystemShape;
    use rand::SeedableRng;

    fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(seed)
    }

    fn random_density(d: usize, seed: u64) -> Mat {
        let g = haar_unitary(d, &mut rng(seed));
        let mut r = rng(seed + 1);
        let w: Vec<f64> = (0..d).map(|_| rand::Rng::random::<f64>(&mut r)).collect();
        let tot: f64 = w.iter().sum();
        let diag = Mat::from_diag(&ndarray::Array1::from_iter(w.iter().map(|x| C64::new(x / tot, 0.0))));
        g.dot(&diag).dot(&dagger(&g))
    }

    #[test]
    fn identity_channel() {
        let u = Mat::eye(8);
        let spec = spectrum_of(&build_superoperator(&u, 2, 1, ResetMode::PureZero).unwrap()).unwrap();
        assert!(spec.eigenvalues.iter().all(|l| (l - 1.0).norm() < 1e-10));
        assert!(spec.tau_eig.is_infinite());
    }

    #[test]
    fn swap_is_a_replacement_channel() {
        let mut u = Mat::zeros((4, 4));
        for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            u[[i, j]] = C64::new(1.0, 0.0);
        }
        let spec = spectrum_of(&build_superoperator(&u, 1, 1, ResetMode::PureZero).unwrap()).unwrap();
        let mods: Vec<f64> = spec.eigenvalues.iter().map(|l| l.norm()).collect();
        assert!((mods[0] - 1.0).abs() < 1e-12 && mods[1..].iter().all(|m| *m < 1e-12));
        assert!((spec.fixed_point[[0, 0]].re - 1.0).abs() < 1e-12);
        assert_eq!(spec.tau_eig, 0.0);
    }

    #[test]
    fn superoperator_matches_dense_engine() {
        let shape = SystemShape::new(0, 2, 1).unwrap();
        let u = haar_unitary(8, &mut rng(3));
        let sup = build_superoperator(&u, 2, 1, ResetMode::PureZero).unwrap();
        let protocol = Protocol::new(Monitoring::Unmonitored, ResetMode::PureZero);
        for k in 0..100 {
            let rho = random_density(4, 100 + 2 * k);
            let mut traj = DenseTrajectory::new(shape, protocol, DenseState::Mixed { n: 2, rho: rho.clone() }).unwrap();
            traj.step(&u, &mut rng(0)).unwrap();
            let dense = traj.state().to_density();
            let ours = apply_superoperator(&sup, &rho).unwrap();
            let err = (&dense - &ours).iter().map(|c| c.norm()).fold(0.0, f64::max);
            assert!(err < 1e-10, "{err}");
        }
    }

    #[test]
    fn channels_preserve_trace_and_positivity() {
        let u = haar_unitary(16, &mut rng(4));
        for (reset, d) in [(ResetMode::PureZero, 4), (ResetMode::FullyMixed, 4), (ResetMode::None, 16)] {
            let sup = build_superoperator(&u, 2, 2, reset).unwrap();
            let ks = channel_kraus(&u, 2, 2, reset).unwrap();
            for k in 0..5 {
                let rho = random_density(d, 7 + 2 * k);
                let out = apply_superoperator(&sup, &rho).unwrap();
                assert!((trace(&out).re - 1.0).abs() < 1e-10);
                assert!(min_eig(&out).unwrap() >= -1e-8);
                let direct = apply_kraus(&ks, &rho);
                assert!((&out - &direct).iter().all(|c| c.norm() < 1e-12));
            }
        }
    }

    #[test]
    fn spectrum_invariants() {
        for (seed, reset) in [(5, ResetMode::PureZero), (6, ResetMode::FullyMixed), (7, ResetMode::None)] {
            let u = haar_unitary(8, &mut rng(seed));
            let sup = build_superoperator(&u, 2, 1, reset).unwrap();
            let spec = spectrum_of(&sup).unwrap();
            assert!(spec.eigenvalues.iter().all(|l| l.norm() <= 1.0 + 1e-8));
            assert!((spec.lambda0 - 1.0).norm() < 1e-8);
            let image = apply_superoperator(&sup, &spec.fixed_point).unwrap();
            assert!(trace_norm_hermitian(&(&image - &spec.fixed_point)).unwrap() < 1e-8);
            assert!(min_eig(&spec.fixed_point).unwrap() > -1e-8);
            for l in spec.eigenvalues.iter().filter(|l| l.im.abs() > 1e-8) {
                assert!(spec.eigenvalues.iter().any(|m| (m - l.conj()).norm() < 1e-8));
            }
            let l1 = spec.lambda1.unwrap();
            assert!(l1.im >= -1e-12, "conjugate pairs report the upper member");
        }
    }

    #[test]
    fn haar_bulk_fills_disk() {
        let mut outside = 0.0;
        for seed in 0..20 {
            let u = haar_unitary(64, &mut rng(50 + seed));
            let spec = spectrum_of(&build_superoperator(&u, 4, 2, ResetMode::PureZero).unwrap()).unwrap();
            outside += spec.fraction_outside(OUTLIER_FACTOR * disk_radius(2, ResetMode::PureZero));
        }
        assert!(outside / 20.0 < 0.05, "{}", outside / 20.0);
    }

    #[test]
    fn probe_state_and_spectral_prediction() {
        let mut r = rng(9);
        let h = HamiltonianParams::random_ising(4, DEFAULT_T_H, &mut r);
        let u = h.unitary().unwrap();
        let spec = spectrum_of(&build_superoperator(&u, 2, 2, ResetMode::PureZero).unwrap()).unwrap();
        let (zero, _) = probe_state(&spec, Some(0.0)).unwrap();
        let r_reg = [0usize];
        let a_reg = [1usize, 2];
        assert!(zero.qmi(&r_reg, &a_reg, EntropyKind::VonNeumann).unwrap().abs() < 1e-9);

        let (probe, a) = probe_state(&spec, None).unwrap();
        assert!(min_eig(&probe.to_density()).unwrap() > 0.0);
        probe.validate(1e-10).unwrap();
        let shape = SystemShape::new(1, 2, 2).unwrap();
        let protocol = Protocol::new(Monitoring::Unmonitored, ResetMode::PureZero);
        let mut traj = DenseTrajectory::new(shape, protocol, probe).unwrap();
        for t in 1..=8 {
            traj.step(&u, &mut r).unwrap();
            let want = spectral_prediction(&spec, a, t).unwrap();
            let diff = &traj.state().to_density() - &want;
            assert!(0.5 * trace_norm_hermitian(&diff).unwrap() < 1e-8, "{t}");
        }
        assert!(probe_state(&spec, Some(10.0 * a + 1.0)).is_err());
    }

    #[test]
    fn decay_fit_recovers_exponent() {
        let l: f64 = 0.6;
        let q: Vec<f64> = (0..10).map(|t| 0.9 * l.powi(2 * t)).collect();
        let fit = fit_decay(&q, l).unwrap();
        assert_eq!(fit.c, 2);
        assert!((fit.lambda_fit - l).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit_decay(&[1.0, 0.0, 0.5], l).is_err());
    }

    #[test]
    fn size_ceilings() {
        let u = Mat::eye(1 << 8);
        assert!(build_superoperator(&u, 7, 1, ResetMode::PureZero).is_err());
    }

    #[test]
    fn vectorization_is_column_major() {
        let m = Array2::from_shape_fn((2, 2), |(i, j)| C64::new((i + 2 * j) as f64, 0.0));
        let v = vec_cm(&m);
        assert_eq!(v.iter().map(|c| c.re).collect::<Vec<_>>(), vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(unvec_cm(&v, 2).unwrap(), m);
    }
}
