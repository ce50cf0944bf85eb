// SPDX-License-Identifier: Apache-2.0

//! Config-driven batches of experiments with paired theory curves.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::acceptance::{evaluate, Verdict};
use super::run::{persist, run, QmiSeries};
use super::spec::ExperimentSpec;
use super::{CODE_VERSION, FORMAT_VERSION};
use crate::error::{Error, Result};
use crate::theory::{CurveKind, TheoryCurve, TheoryParams};

fn default_stderr_mult() -> f64 {
    3.0
}

/// Simulation passes where `|mean - theory| <= max(abs_tol, stderr_mult * stderr)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Comparison {
    pub kind: CurveKind,
    pub params: TheoryParams,
    #[serde(default)]
    pub abs_tol: f64,
    #[serde(default = "default_stderr_mult")]
    pub stderr_mult: f64,
    #[serde(default)]
    pub t_min: usize,
    /// Defaults to the last simulated step.
    #[serde(default)]
    pub t_max: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteExperiment {
    pub name: String,
    #[serde(default)]
    pub spec: Option<ExperimentSpec>,
    /// Relative to the config file.
    #[serde(default)]
    pub spec_file: Option<PathBuf>,
    #[serde(default)]
    pub compare: Option<Comparison>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub experiments: Vec<SuiteExperiment>,
    /// Acceptance criteria to run, e.g. `["AC10", "AC11"]`.
    #[serde(default)]
    pub acceptance: Vec<String>,
}

impl SuiteConfig {
    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Toml(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Error,
    /// Ran without a theory comparison.
    Recorded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub index: usize,
    pub name: String,
    pub seed: u64,
    pub spec_hash: Option<String>,
    pub csv: Option<String>,
    pub wall_time_s: f64,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceRecord {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub code_version: String,
    pub seed: u64,
    pub experiments: Vec<ExperimentRecord>,
    pub acceptance: Vec<AcceptanceRecord>,
}

impl Manifest {
    pub fn all_pass(&self) -> bool {
        self.experiments.iter().all(|e| matches!(e.status, Status::Pass | Status::Recorded))
            && self.acceptance.iter().all(|a| a.verdict.pass)
    }

    /// One line per experiment and criterion.
    pub fn report(&self) -> String {
        let mut out = String::new();
        for e in &self.experiments {
            let status = serde_json::to_value(e.status).ok().and_then(|v| v.as_str().map(str::to_uppercase));
            out += &format!("{} {}: {}\n", e.name, status.unwrap_or_default(), e.detail);
        }
        for a in &self.acceptance {
            out += &a.verdict.line();
            out.push('\n');
        }
        out
    }
}

/// Writes a theory curve as `t, bits, valid, kind, format_version`.
pub fn write_theory_csv(curve: &TheoryCurve, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "bits", "valid", "kind", "format_version"])?;
    let kind = curve.kind.name();
    for p in &curve.points {
        w.write_record([p.t.to_string(), format!("{:.12}", p.bits), p.valid.to_string(), kind.clone(), FORMAT_VERSION.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Compares a series against `cmp`; returns pass and a one-line summary.
pub fn compare(series: &QmiSeries, cmp: &Comparison) -> Result<(bool, String)> {
    let last = series.t.len().saturating_sub(1);
    let t_max = cmp.t_max.unwrap_or(last).min(last);
    let mut worst = (0.0f64, 0usize, 0.0f64);
    for t in cmp.t_min..=t_max {
        let th = cmp.kind.value(&cmp.params, t)?.max(0.0);
        let gap = (series.mean[t] - th).abs();
        let tol = cmp.abs_tol.max(cmp.stderr_mult * series.stderr[t]).max(1e-9);
        if gap / tol > worst.0 {
            worst = (gap / tol, t, gap);
        }
    }
    Ok((
        worst.0 <= 1.0,
        format!("vs {}: worst gap {:.4} bits at t={} ({:.2} x tolerance)", cmp.kind.name(), worst.2, worst.1, worst.0),
    ))
}

fn resolve(exp: &SuiteExperiment, base: &Path, seed: u64) -> Result<ExperimentSpec> {
    let mut spec = match (&exp.spec, &exp.spec_file) {
        (Some(s), None) => s.clone(),
        (None, Some(f)) => ExperimentSpec::load(&base.join(f))?,
        _ => return Err(Error::Spec(format!("experiment {:?} needs exactly one of spec, spec_file", exp.name))),
    };
    spec.name = exp.name.clone();
    spec.seed = seed;
    spec.validate()?;
    Ok(spec)
}

fn run_one(exp: &SuiteExperiment, index: usize, base: &Path, seed: u64, out: &Path) -> ExperimentRecord {
    let start = Instant::now();
    let mut record = ExperimentRecord {
        index,
        name: exp.name.clone(),
        seed,
        spec_hash: None,
        csv: None,
        wall_time_s: 0.0,
        status: Status::Error,
        detail: String::new(),
    };
    let result = (|| -> Result<(Status, String)> {
        let spec = resolve(exp, base, seed)?;
        record.spec_hash = Some(spec.hash());
        let series = run(&spec, index as u64)?;
        let csv = persist(out, &exp.name, &series, &spec, index as u64)?;
        record.csv = csv.file_name().map(|f| f.to_string_lossy().into_owned());
        let Some(cmp) = &exp.compare else {
            return Ok((Status::Recorded, format!("{} steps, {} trajectories", spec.steps, spec.trajectories)));
        };
        let curve = TheoryCurve::evaluate(cmp.kind, cmp.params, spec.steps)?;
        write_theory_csv(&curve, &out.join(format!("{}_theory.csv", exp.name)))?;
        let (pass, detail) = compare(&series, cmp)?;
        Ok((if pass { Status::Pass } else { Status::Fail }, detail))
    })();
    match result {
        Ok((status, detail)) => {
            record.status = status;
            record.detail = detail;
        }
        Err(e) => record.detail = format!("error: {e}"),
    }
    record.wall_time_s = start.elapsed().as_secs_f64();
    record
}

/// Runs every experiment and criterion of `config`, writing CSVs,
/// `manifest.json` and `report.txt` under `out`.
///
/// Experiment `i` runs as experiment index `i` of the suite seed, so its
/// streams do not depend on scheduling.
pub fn run_suite(config: &SuiteConfig, base: &Path, out: &Path) -> Result<Manifest> {
    std::fs::create_dir_all(out)?;
    let mut names: Vec<&str> = config.experiments.iter().map(|e| e.name.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Spec(format!("duplicate experiment name {:?}", w[0])));
    }
    let experiments: Vec<ExperimentRecord> = config
        .experiments
        .par_iter()
        .enumerate()
        .map(|(i, e)| run_one(e, i, base, config.seed, out))
        .collect();
    let acceptance = config
        .acceptance
        .iter()
        .map(|id| {
            let start = Instant::now();
            let verdict = evaluate(id, config.seed, Some(&out.join("acceptance")));
            AcceptanceRecord { verdict, wall_time_s: start.elapsed().as_secs_f64() }
        })
        .collect();
    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        code_version: CODE_VERSION.into(),
        seed: config.seed,
        experiments,
        acceptance,
    };
    std::fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    std::fs::write(out.join("report.txt"), manifest.report())?;
    Ok(manifest)
}

/// Loads a TOML config from disk, applies an optional seed override and runs it.
pub fn run_suite_file(path: &Path, out: &Path, seed: Option<u64>) -> Result<Manifest> {
    let mut config = SuiteConfig::from_toml(&std::fs::read_to_string(path)?)?;
    if let Some(s) = seed {
        config.seed = s;
    }
    let base = path.parent().unwrap_or(Path::new("."));
    run_suite(&config, base, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CONFIG: &str = r#"
seed = 4
acceptance = ["AC10"]

[[experiments]]
name = "no-bath"
compare = { kind = "thm1-asymptotic", params = { n_a = 2, n_b = 1 }, t_max = 0 }
[experiments.spec]
engine = "stabilizer"
ensemble = { kind = "clifford" }
steps = 3
trajectories = 4
shape = { n_r = 2, n_a = 2, n_b = 0 }

[[experiments]]
name = "uncond"
compare = { kind = "thm3-early", params = { n_a = 8, n_b = 2 }, abs_tol = 0.5, t_max = 3 }
[experiments.spec]
engine = "stabilizer"
ensemble = { kind = "clifford" }
monitoring = "unmonitored"
steps = 6
trajectories = 4
shape = { n_r = 8, n_a = 8, n_b = 2 }
"#;

    fn tmp(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("qinfo-suite-{name}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        dir
    }

    #[test]
    fn empty_suite_succeeds() {
        let out = tmp("empty");
        let m = run_suite(&SuiteConfig::default(), Path::new("."), &out).unwrap();
        assert!(m.all_pass());
        assert!(m.experiments.is_empty());
        assert!(out.join("manifest.json").exists());
    }

    #[test]
    fn runs_compares_and_is_deterministic() {
        let config = SuiteConfig::from_toml(CONFIG).unwrap();
        let (a, b) = (tmp("a"), tmp("b"));
        let m = run_suite(&config, Path::new("."), &a).unwrap();
        run_suite(&config, Path::new("."), &b).unwrap();
        assert!(m.all_pass(), "{}", m.report());
        assert_eq!(m.acceptance.len(), 1);
        for f in ["no-bath.csv", "uncond.csv", "uncond_theory.csv"] {
            assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
        }
    }

    #[test]
    fn failures_are_recorded_per_experiment() {
        let mut config = SuiteConfig::from_toml(CONFIG).unwrap();
        config.acceptance.clear();
        if let Some(c) = config.experiments[1].compare.as_mut() {
            c.kind = CurveKind::Thm1Asymptotic;
            c.abs_tol = 0.0;
        }
        config.experiments[0].spec.as_mut().unwrap().shape.n_r = 9;
        let m = run_suite(&config, Path::new("."), &tmp("fail")).unwrap();
        assert_eq!(m.experiments[0].status, Status::Error);
        assert_eq!(m.experiments[1].status, Status::Fail);
        assert!(!m.all_pass());
        assert!(config.experiments.iter().all(|e| e.spec_file.is_none()));
        config.experiments[1].name = "no-bath".into();
        assert!(run_suite(&config, Path::new("."), &tmp("dup")).is_err());
    }
}
