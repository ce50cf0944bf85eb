// SPDX-License-Identifier: Apache-2.0

//! `qinfo-life`: simulate, evaluate theory curves, analyze channel spectra,
//! estimate Q2C information, run suites and extract lifetimes.
//!
//! Exit codes: 0 success, 1 an acceptance row failed, 2 any error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qinfo_life::harness::channel::ChannelSpec;
use qinfo_life::harness::lifetime::{estimate_lifetime, estimate_lifetime_rows, Lifetime};
use qinfo_life::harness::q2c::{q2c_series, Q2cMode, Q2cSource};
use qinfo_life::harness::suite::{run_suite_file, write_theory_csv};
use qinfo_life::harness::{persist, run, ExperimentSpec, QmiSeries, FORMAT_VERSION};
use qinfo_life::theory::{CurveKind, TheoryCurve, TheoryParams};

#[derive(Parser)]
#[command(name = "qinfo-life", version, about = "Information lifetime under mid-circuit measurement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed of the spec or config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment spec (TOML or JSON).
    Simulate {
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a theory curve, e.g. `theory thm1-asymptotic --n-a 5 --n-b 1`.
    Theory {
        kind: String,
        #[arg(long)]
        n_a: usize,
        #[arg(long)]
        n_b: usize,
        #[arg(long)]
        n_r: Option<usize>,
        #[arg(long)]
        n_e: Option<usize>,
        /// Erasure period for the partial-monitoring curves.
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, default_value_t = 64)]
        t_max: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Diagonalize the channel described by a channel spec.
    Spectrum {
        channel: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Q2C mutual information for a dense spec.
    Q2c {
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Both)]
        mode: ModeArg,
        /// Estimate distributions from this many shots instead of exactly.
        #[arg(long)]
        shots: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a suite config; exits 1 if any comparison or criterion fails.
    Suite {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Lifetime of a series CSV at threshold `epsilon`.
    Lifetime {
        csv: PathBuf,
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Conditioned,
    Unconditioned,
    Both,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n").with_context(|| format!("writing {}", path.display()))
}

fn load_spec(path: &Path, seed: Option<u64>) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::load(path).with_context(|| format!("loading {}", path.display()))?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    Ok(spec)
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate { spec, common } => {
            let spec = load_spec(&spec, common.seed)?;
            let series = run(&spec, 0)?;
            let csv = persist(&common.out, &spec.name, &series, &spec, 0)?;
            let tau = estimate_lifetime(&series.mean, spec.epsilon).ok();
            println!(
                "{}: {} steps, {} trajectories ({} aborted), lifetime at eps={}: {}",
                csv.display(),
                spec.steps,
                series.n_traj.first().copied().unwrap_or(0),
                series.meta.aborted,
                spec.epsilon,
                tau.map_or("undefined".into(), |t| t.to_string())
            );
            Ok(true)
        }
        Command::Theory { kind, n_a, n_b, n_r, n_e, s, t_max, common } => {
            let kind = CurveKind::parse(&kind)?;
            let curve = TheoryCurve::evaluate(kind, TheoryParams { n_r, n_a, n_b, n_e, s }, t_max)?;
            std::fs::create_dir_all(&common.out)?;
            let stem = format!("theory_{}", kind.name());
            write_theory_csv(&curve, &common.out.join(format!("{stem}.csv")))?;
            #[derive(Serialize)]
            struct Out<'a> {
                format_version: u32,
                #[serde(flatten)]
                curve: &'a TheoryCurve,
            }
            write_json(&common.out.join(format!("{stem}.json")), &Out { format_version: FORMAT_VERSION, curve: &curve })?;
            for p in curve.points.iter().take(4) {
                println!("t={} {:.6}", p.t, p.bits);
            }
            println!("... {} points written to {}", curve.points.len(), common.out.display());
            Ok(true)
        }
        Command::Spectrum { channel, common } => {
            let mut spec = ChannelSpec::load(&channel).with_context(|| format!("loading {}", channel.display()))?;
            if let Some(s) = common.seed {
                spec.seed = s;
            }
            let spectrum = spec.analyze()?;
            std::fs::create_dir_all(&common.out)?;
            spectrum.write_csv(&common.out.join("spectrum.csv"))?;
            let summary = spec.summary(&spectrum);
            #[derive(Serialize)]
            struct Out<'a> {
                channel: &'a ChannelSpec,
                #[serde(flatten)]
                summary: &'a qinfo_life::spectrum::SpectrumSummary,
            }
            write_json(&common.out.join("spectrum.json"), &Out { channel: &spec, summary: &summary })?;
            println!(
                "|lambda1| = {:.6}, tau_eig = {}, bulk radius {:.4}, {:.1}% outside {:.4}",
                summary.lambda1_modulus,
                summary.tau_eig.map_or("inf".into(), |t| format!("{t:.4}")),
                summary.bulk_radius,
                100.0 * summary.fraction_outside.unwrap_or(0.0),
                summary.outlier_threshold.unwrap_or(f64::NAN)
            );
            Ok(true)
        }
        Command::Q2c { spec, mode, shots, common } => {
            let spec = load_spec(&spec, common.seed)?;
            let source = shots.map_or(Q2cSource::ExactDistribution, |shots| Q2cSource::Sampled { shots });
            let modes: &[Q2cMode] = match mode {
                ModeArg::Conditioned => &[Q2cMode::Conditioned],
                ModeArg::Unconditioned => &[Q2cMode::Unconditioned],
                ModeArg::Both => &[Q2cMode::Conditioned, Q2cMode::Unconditioned],
            };
            std::fs::create_dir_all(&common.out)?;
            for &m in modes {
                let result = q2c_series(&spec, 0, m, source)?;
                let name = format!("{}_{}", spec.name, result.series.entropy_kind);
                result.series.write_csv(&common.out.join(format!("{name}.csv")))?;
                #[derive(Serialize)]
                struct Out<'a> {
                    format_version: u32,
                    spec: &'a ExperimentSpec,
                    mode: Q2cMode,
                    source: Q2cSource,
                    low_shot_warning: bool,
                    enumerated: bool,
                }
                write_json(
                    &common.out.join(format!("{name}.json")),
                    &Out { format_version: FORMAT_VERSION, spec: &spec, mode: m, source, low_shot_warning: result.low_shot_warning, enumerated: result.enumerated },
                )?;
                if result.low_shot_warning {
                    eprintln!("warning: fewer shots than twice the outcome support; estimates are high-variance");
                }
                let last = result.series.mean.last().copied().unwrap_or(0.0);
                println!("{name}: final {last:.6} bits");
            }
            Ok(true)
        }
        Command::Suite { config, common } => {
            let manifest = run_suite_file(&config, &common.out, common.seed)?;
            print!("{}", manifest.report());
            Ok(manifest.all_pass())
        }
        Command::Lifetime { csv, epsilon, common } => {
            let rows = QmiSeries::read_means(&csv).with_context(|| format!("reading {}", csv.display()))?;
            if rows.is_empty() {
                bail!("{} has no rows", csv.display());
            }
            let lifetime = estimate_lifetime_rows(&rows, epsilon)?;
            std::fs::create_dir_all(&common.out)?;
            #[derive(Serialize)]
            struct Out<'a> {
                format_version: u32,
                source: &'a Path,
                epsilon: f64,
                #[serde(flatten)]
                lifetime: Lifetime,
            }
            write_json(&common.out.join("lifetime.json"), &Out { format_version: FORMAT_VERSION, source: &csv, epsilon, lifetime })?;
            println!("{lifetime}");
            Ok(true)
        }
    }
}
