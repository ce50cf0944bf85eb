// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::{Engine, ExperimentSpec};
use super::{CODE_VERSION, FORMAT_VERSION};
use crate::dense::dynamics::DenseTrajectory;
use crate::dense::init::{make_initial_state, InitialStateSpec};
use crate::dense::state::{DenseState, Mat};
use crate::error::{Error, Result};
use crate::protocol::{Monitoring, Protocol, ResetMode};
use crate::rng::{stream, StreamRng, SHARED_STEP};
use crate::spectrum::{build_superoperator, probe_state, spectrum_of};
use crate::stab::{dynamics as stab_dyn, CliffordOp, StabilizerState};

/// Experiment-id bit separating measurement draws from unitary draws, so
/// that monitored and unmonitored runs with one seed see the same unitaries.
const OUTCOME_DOMAIN: u64 = 1 << 63;
/// Step keys used while warming up late-time initial states.
const WARMUP_BASE: u64 = 1 << 62;

pub fn unitary_rng(seed: u64, experiment: u64, trajectory: u64, step: u64) -> StreamRng {
    stream(seed, experiment, trajectory, step)
}

pub fn outcome_rng(seed: u64, experiment: u64, trajectory: u64, step: u64) -> StreamRng {
    stream(seed, experiment | OUTCOME_DOMAIN, trajectory, step)
}

/// Mean mutual information per step with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QmiSeries {
    pub t: Vec<usize>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_traj: Vec<usize>,
    pub entropy_kind: String,
    pub meta: SeriesMeta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub format_version: u32,
    pub code_version: String,
    pub spec_hash: String,
    /// Trajectories dropped after a probability underflow.
    pub aborted: usize,
}

impl QmiSeries {
    /// Reduces per-trajectory rows in their given order; `std / sqrt(M)` with
    /// the unbiased sample deviation.
    pub fn from_rows(rows: &[Vec<f64>], entropy_kind: &str, spec_hash: String, aborted: usize) -> Result<Self> {
        let len = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != len) {
            return Err(Error::Numerical("trajectory rows differ in length".into()));
        }
        let m = rows.len();
        let mut mean = vec![0.0; len];
        let mut stderr = vec![0.0; len];
        for t in 0..len {
            let mu = rows.iter().map(|r| r[t]).sum::<f64>() / m as f64;
            mean[t] = mu;
            if m > 1 {
                let var = rows.iter().map(|r| (r[t] - mu).powi(2)).sum::<f64>() / (m - 1) as f64;
                stderr[t] = (var / m as f64).sqrt();
            }
        }
        Ok(Self {
            t: (0..len).collect(),
            mean,
            stderr,
            n_traj: vec![m; len],
            entropy_kind: entropy_kind.to_owned(),
            meta: SeriesMeta {
                format_version: FORMAT_VERSION,
                code_version: CODE_VERSION.to_owned(),
                spec_hash,
                aborted,
            },
        })
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["t", "mean_qmi_bits", "stderr", "n_traj", "entropy_kind", "format_version"])?;
        for i in 0..self.t.len() {
            w.write_record([
                self.t[i].to_string(),
                format!("{:.12}", self.mean[i]),
                format!("{:.12}", self.stderr[i]),
                self.n_traj[i].to_string(),
                self.entropy_kind.clone(),
                FORMAT_VERSION.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the `t` and `mean_qmi_bits` columns of a series CSV.
    pub fn read_means(path: &Path) -> Result<Vec<(usize, f64)>> {
        #[derive(Deserialize)]
        struct Row {
            t: usize,
            mean_qmi_bits: f64,
        }
        let mut r = csv::Reader::from_path(path)?;
        let mut out = Vec::new();
        for row in r.deserialize() {
            let row: Row = row?;
            out.push((row.t, row.mean_qmi_bits));
        }
        Ok(out)
    }
}

#[derive(Serialize)]
struct Sidecar<'a> {
    format_version: u32,
    code_version: &'a str,
    spec_hash: &'a str,
    spec: &'a ExperimentSpec,
    experiment_index: u64,
    aborted: usize,
}

/// Writes `<name>.csv` and `<name>.json` into `dir`; returns the CSV path.
pub fn persist(dir: &Path, name: &str, series: &QmiSeries, spec: &ExperimentSpec, experiment: u64) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let csv = dir.join(format!("{name}.csv"));
    series.write_csv(&csv)?;
    let side = Sidecar {
        format_version: FORMAT_VERSION,
        code_version: CODE_VERSION,
        spec_hash: &series.meta.spec_hash,
        spec,
        experiment_index: experiment,
        aborted: series.meta.aborted,
    };
    std::fs::write(dir.join(format!("{name}.json")), serde_json::to_string_pretty(&side)? + "\n")?;
    Ok(csv)
}

/// Runs `spec` as experiment number `experiment` of its seed.
pub fn run(spec: &ExperimentSpec, experiment: u64) -> Result<QmiSeries> {
    spec.validate()?;
    if spec.engine == Engine::Dense {
        crate::dense::dynamics::check_resources(&spec.shape, false)?;
    }
    let rows: Vec<Result<Option<Vec<f64>>>> = (0..spec.trajectories as u64)
        .into_par_iter()
        .map(|traj| match spec.engine {
            Engine::Stabilizer => stabilizer_trajectory(spec, experiment, traj).map(Some),
            Engine::Dense => match dense_trajectory(spec, experiment, traj) {
                Err(Error::Underflow { .. }) => Ok(None),
                other => other.map(Some),
            },
        })
        .collect();
    let mut kept = Vec::with_capacity(rows.len());
    let mut aborted = 0;
    for r in rows {
        match r? {
            Some(row) => kept.push(row),
            None => aborted += 1,
        }
    }
    if kept.is_empty() {
        return Err(Error::Numerical("every trajectory underflowed".into()));
    }
    let label = match spec.engine {
        Engine::Stabilizer => "stabilizer",
        Engine::Dense => spec.entropy.label(),
    };
    QmiSeries::from_rows(&kept, label, spec.hash(), aborted)
}

fn stabilizer_trajectory(spec: &ExperimentSpec, exp: u64, traj: u64) -> Result<Vec<f64>> {
    let shape = spec.shape;
    let protocol = spec.protocol();
    let n_ab = shape.n_a + shape.n_b;
    let shared = if spec.identical() {
        Some(CliffordOp::random(n_ab, &mut unitary_rng(spec.seed, exp, traj, SHARED_STEP))?)
    } else {
        None
    };
    let mut state = StabilizerState::bell_pairs(&shape)?;
    let mut out = Vec::with_capacity(spec.steps + 1);
    out.push(stab_dyn::qmi(&state, &shape)? as f64);
    for t in 1..=spec.steps {
        let fresh;
        let op = match &shared {
            Some(op) => op,
            None => {
                fresh = CliffordOp::random(n_ab, &mut unitary_rng(spec.seed, exp, traj, t as u64))?;
                &fresh
            }
        };
        let mut rng = outcome_rng(spec.seed, exp, traj, t as u64);
        stab_dyn::run_step(&mut state, &shape, op, &protocol, t, &mut rng)?;
        out.push(stab_dyn::qmi(&state, &shape)? as f64);
    }
    Ok(out)
}

/// Unitaries of one trajectory: either one shared draw or one per step key.
pub struct UnitarySource<'a> {
    spec: &'a ExperimentSpec,
    exp: u64,
    traj: u64,
    shared: Option<Mat>,
}

impl<'a> UnitarySource<'a> {
    pub fn new(spec: &'a ExperimentSpec, exp: u64, traj: u64) -> Result<Self> {
        let n = spec.shape.n_a + spec.shape.n_b;
        let shared = if spec.identical() {
            Some(spec.ensemble.draw_dense(n, &mut unitary_rng(spec.seed, exp, traj, SHARED_STEP))?)
        } else {
            None
        };
        Ok(Self { spec, exp, traj, shared })
    }

    pub fn get(&self, key: u64) -> Result<std::borrow::Cow<'_, Mat>> {
        Ok(match &self.shared {
            Some(u) => std::borrow::Cow::Borrowed(u),
            None => {
                let n = self.spec.shape.n_a + self.spec.shape.n_b;
                let mut rng = unitary_rng(self.spec.seed, self.exp, self.traj, key);
                std::borrow::Cow::Owned(self.spec.ensemble.draw_dense(n, &mut rng)?)
            }
        })
    }
}

/// Initial `R ⊗ A` state, including warm-up of the late-time families and
/// the spectral probe.
pub fn dense_initial(spec: &ExperimentSpec, exp: u64, traj: u64, source: &UnitarySource) -> Result<DenseState> {
    let shape = spec.shape;
    let mut rng = unitary_rng(spec.seed, exp, traj, SHARED_STEP - 1);
    match spec.initial {
        InitialStateSpec::CqProbe { a } => {
            let u = source.get(1)?;
            let spectrum = spectrum_of(&build_superoperator(&u, shape.n_a, shape.n_b, spec.reset)?)?;
            Ok(probe_state(&spectrum, a)?.0)
        }
        InitialStateSpec::LateTimeConditional { t0 } | InitialStateSpec::LateTimeUnconditional { t0 } => {
            let protocol = match spec.initial {
                InitialStateSpec::LateTimeConditional { .. } => {
                    let reset = if spec.reset == ResetMode::FullyMixed { ResetMode::PureZero } else { spec.reset };
                    Protocol::new(Monitoring::Monitored, reset)
                }
                _ => Protocol::new(Monitoring::Unmonitored, spec.reset),
            };
            let init = make_initial_state(&spec.initial, &shape, &mut rng)?;
            let mut warm = DenseTrajectory::new(shape, protocol, init)?;
            for k in 0..t0 as u64 {
                let u = source.get(WARMUP_BASE + k)?;
                warm.step(&u, &mut outcome_rng(spec.seed, exp, traj, WARMUP_BASE + k))?;
            }
            Ok(warm.state())
        }
        _ => make_initial_state(&spec.initial, &shape, &mut rng),
    }
}

fn dense_trajectory(spec: &ExperimentSpec, exp: u64, traj: u64) -> Result<Vec<f64>> {
    let source = UnitarySource::new(spec, exp, traj)?;
    let init = dense_initial(spec, exp, traj, &source)?;
    let mut run = DenseTrajectory::new(spec.shape, spec.protocol(), init)?;
    let mut out = Vec::with_capacity(spec.steps + 1);
    out.push(run.qmi(spec.entropy)?);
    for t in 1..=spec.steps as u64 {
        let u = source.get(t)?;
        run.step(&u, &mut outcome_rng(spec.seed, exp, traj, t))?;
        out.push(run.qmi(spec.entropy)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::state::EntropyKind;
    use crate::harness::spec::Ensemble;
    use crate::shape::SystemShape;

    pub(crate) fn spec(engine: Engine, ensemble: Ensemble, shape: (usize, usize, usize)) -> ExperimentSpec {
        ExperimentSpec {
            name: "t".into(),
            shape: SystemShape::new(shape.0, shape.1, shape.2).unwrap(),
            engine,
            ensemble,
            identical_unitary: None,
            monitoring: Monitoring::Monitored,
            reset: ResetMode::PureZero,
            initial: InitialStateSpec::BellPairs,
            steps: 5,
            trajectories: 4,
            entropy: EntropyKind::VonNeumann,
            seed: 1,
            epsilon: 0.25,
        }
    }

    #[test]
    fn no_bath_keeps_information() {
        for (engine, ensemble) in [(Engine::Stabilizer, Ensemble::Clifford), (Engine::Dense, Ensemble::Haar)] {
            for monitoring in [Monitoring::Monitored, Monitoring::Unmonitored] {
                let mut s = spec(engine, ensemble.clone(), (2, 3, 0));
                s.monitoring = monitoring;
                let series = run(&s, 0).unwrap();
                assert!(series.mean.iter().all(|m| (m - 4.0).abs() < 1e-9), "{engine:?} {monitoring:?}");
                assert!(series.stderr.iter().all(|e| e.abs() < 1e-9));
            }
        }
    }

    #[test]
    fn runs_are_reproducible() {
        let s = spec(Engine::Dense, Ensemble::Haar, (2, 2, 1));
        assert_eq!(run(&s, 3).unwrap(), run(&s, 3).unwrap());
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        assert_eq!(pool.install(|| run(&s, 3).unwrap()), run(&s, 3).unwrap());
        assert_ne!(run(&s, 3).unwrap().mean, run(&s, 4).unwrap().mean);
    }

    #[test]
    fn stderr_is_sample_deviation_over_root_m() {
        let rows = vec![vec![1.0, 2.0], vec![3.0, 2.0]];
        let s = QmiSeries::from_rows(&rows, "x", String::new(), 0).unwrap();
        assert_eq!(s.mean, vec![2.0, 2.0]);
        assert!((s.stderr[0] - 1.0).abs() < 1e-12);
        assert_eq!(s.stderr[1], 0.0);
    }

    #[test]
    fn csv_round_trip() {
        let dir = std::env::temp_dir().join(format!("qinfo-life-run-{}", std::process::id()));
        let s = spec(Engine::Stabilizer, Ensemble::Clifford, (2, 2, 1));
        let series = run(&s, 0).unwrap();
        let path = persist(&dir, "x", &series, &s, 0).unwrap();
        let back = QmiSeries::read_means(&path).unwrap();
        assert_eq!(back.len(), 6);
        assert!((back[0].1 - 4.0).abs() < 1e-12);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("t,mean_qmi_bits,stderr,n_traj,entropy_kind,format_version"));
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn late_time_and_probe_initial_states() {
        let mut s = spec(Engine::Dense, Ensemble::Haar, (2, 2, 1));
        s.initial = InitialStateSpec::LateTimeConditional { t0: 3 };
        let late = run(&s, 0).unwrap();
        assert!(late.mean[0] < 4.0);
        let mut p = spec(Engine::Dense, Ensemble::Ising { t_h: 50.0 }, (1, 2, 2));
        p.monitoring = Monitoring::Unmonitored;
        p.initial = InitialStateSpec::CqProbe { a: None };
        let probe = run(&p, 0).unwrap();
        assert!(probe.mean[0] > 0.0 && probe.mean[5] < probe.mean[0]);
    }

    #[test]
    fn resource_ceiling_is_enforced() {
        let s = spec(Engine::Dense, Ensemble::Haar, (5, 5, 5));
        assert!(matches!(run(&s, 0), Err(Error::Resource(_))));
    }
}
