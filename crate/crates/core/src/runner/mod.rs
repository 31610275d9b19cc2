//! Reproducible runs: configuration, per-step CSV output, parameter sweeps
//! and manifests with checksums.

pub mod config;
pub mod output;

use std::path::PathBuf;
use std::time::Instant;

use log::info;
use rayon::prelude::*;

use crate::classical::{ehrenfest_time, lyapunov, LyapunovEstimate, LAMBDA_CAT};
use crate::coarse_grain::{build_kernel, CoarseGrainedMap};
use crate::error::{Error, Result};
use crate::maps::QuantumMap;
use crate::otoc::{analytic_cat_otoc, fit_lyapunov_from_otoc, otoc_series, OtocSeries, RateFit};
use crate::phase_space::TorusSpace;
use crate::resonances::{
    dense_spectrum, fit_tail_rate, krylov_leading, trim_tail_window, KrylovSeed, ResonanceSpectrum, TailFit, TAIL_TRIM_LEVEL,
};

pub use config::{default_output_root, KrylovSeedKind, MapKind, OperatorSpec, RunConfig, OUTPUT_ROOT_ENV};
pub use output::{sha256_hex, write_atomic, Cell, CsvTable, RunManifest, RunOutput, RunWriter};

/// Trajectories and horizon for the classical reference exponent.
const REFERENCE_TRAJECTORIES: usize = 256;
const REFERENCE_HORIZON: usize = 64;

fn base_manifest(cfg: &RunConfig, kind: &str) -> RunManifest {
    let mut m = RunManifest::default();
    m.push("run", kind);
    m.push("code_version", env!("CARGO_PKG_VERSION"));
    for (k, v) in cfg.entries() {
        m.push(format!("config.{k}"), v);
    }
    m
}

/// Lyapunov exponent used for reference curves and the Ehrenfest time:
/// exact for the unperturbed cat map, otherwise a classical estimate.
pub fn reference_lambda(cfg: &RunConfig) -> Result<(f64, &'static str)> {
    let spec = cfg.spec();
    if spec.is_linear_cat() {
        return Ok((LAMBDA_CAT, "exact"));
    }
    let est = lyapunov(&spec, REFERENCE_TRAJECTORIES, REFERENCE_HORIZON, cfg.seed)?;
    Ok((est.lambda, "classical_estimate"))
}

/// Default growth window `[1, floor(t_E) - 1]`, if it has at least two points.
pub fn default_growth_window(t_e: f64, t_max: usize) -> Option<(usize, usize)> {
    let end = (t_e.floor() as i64 - 1).min(t_max as i64);
    (end > 1).then_some((1, end as usize))
}

/// Default tail window `[ceil(t_E) + 2, t_max]`, if it has at least four points.
/// Runs trim it further with [`crate::resonances::trim_tail_window`].
pub fn default_tail_window(t_e: f64, t_max: usize) -> Option<(usize, usize)> {
    let start = t_e.ceil() as usize + 2;
    (t_max >= start + 3).then_some((start, t_max))
}

fn build_channel(cfg: &RunConfig) -> Result<CoarseGrainedMap> {
    cfg.validate()?;
    let space = TorusSpace::new(cfg.n)?;
    let map = QuantumMap::new(&cfg.spec(), &space, cfg.kick_mode)?;
    let kernel = build_kernel(&space, cfg.epsilon)?;
    CoarseGrainedMap::new(map, kernel)
}

#[derive(Debug, Clone)]
pub struct OtocRun {
    pub output: RunOutput,
    pub series: OtocSeries,
    pub lambda_reference: f64,
    pub ehrenfest_time: Option<f64>,
    pub growth: Option<RateFit>,
    pub tail: Option<TailFit>,
}

/// OTOC series plus reference overlays, written to `otoc.csv` in
/// `cfg.outputs`.
pub fn run_otoc(cfg: &RunConfig) -> Result<OtocRun> {
    let started = Instant::now();
    let channel = build_channel(cfg)?;
    let space = *crate::otoc::Propagator::space(&channel);
    let choice = cfg.operators.resolve(&space);
    let (a, b) = choice.build(&space);
    let series = otoc_series(&channel, &a, &b, cfg.t_max, &choice.to_string())?;

    let (lambda, lambda_source) = reference_lambda(cfg)?;
    let t_e = ehrenfest_time(cfg.n, lambda).ok();
    let growth_window = cfg.growth_window.or_else(|| t_e.and_then(|t| default_growth_window(t, cfg.t_max)));
    let tail_window = cfg.tail_window.or_else(|| {
        let (s, e) = default_tail_window(t_e?, cfg.t_max)?;
        trim_tail_window(&series, s, e, TAIL_TRIM_LEVEL)
    });
    let growth = growth_window.map(|(s, e)| fit_lyapunov_from_otoc(&series, s, e)).transpose()?;
    let tail = match tail_window {
        Some((s, e)) if e - s >= 3 => Some(fit_tail_rate(&series, s, e)?),
        _ => None,
    };

    let exact = cfg.spec().is_linear_cat() && cfg.operators == OperatorSpec::XP;
    let mut header = vec!["t", "C", "O1_re", "O1_im", "O1_abs", "O2", "growth_ref"];
    if tail.is_some() {
        header.push("tail_ref");
    }
    if exact {
        header.extend(["C_exact", "O1_exact"]);
    }
    let mut table = CsvTable::new(header);
    let c0 = series.points[0].c;
    for p in &series.points {
        let mut row: Vec<Cell> = vec![
            p.t.into(),
            p.c.into(),
            p.o1.re.into(),
            p.o1.im.into(),
            p.o1.norm().into(),
            p.o2.into(),
            (c0 * (2.0 * lambda * p.t as f64).exp()).into(),
        ];
        if let Some(f) = &tail {
            let anchor = series.points[f.start].o1.norm();
            row.push((anchor * f.alpha.powf(2.0 * (p.t as f64 - f.start as f64))).into());
        }
        if exact {
            let an = analytic_cat_otoc(p.t, cfg.n);
            row.push(an.c.into());
            row.push(an.o1.into());
        }
        table.push(row);
    }

    let mut writer = RunWriter::new(cfg.outputs.clone())?;
    writer.manifest = base_manifest(cfg, "otoc");
    let m = &mut writer.manifest;
    m.push("kernel_normalization", "unit_sum");
    m.push("lambda_reference", format!("{lambda:.16e}"));
    m.push("lambda_source", lambda_source);
    if let Some(t) = t_e {
        m.push("ehrenfest_time", format!("{t:.16e}"));
    }
    if let Some(f) = &growth {
        m.push("growth_window", format!("{},{}", f.start, f.end));
        m.push("growth_lambda", format!("{:.16e}", f.value));
        m.push("growth_r2", format!("{:.16e}", f.r_squared));
    }
    if let Some(f) = &tail {
        m.push("tail_window", format!("{},{}", f.start, f.end));
        m.push("tail_alpha1", format!("{:.16e}", f.alpha));
        m.push("tail_r2", format!("{:.16e}", f.r_squared));
        m.push("tail_hit_floor", f.hit_floor);
    }
    writer.write_csv("otoc.csv", &table)?;
    writer.manifest.push("wall_clock_seconds", format!("{:.3}", started.elapsed().as_secs_f64()));
    let output = writer.finish()?;
    info!("otoc run written to {}", output.dir.display());
    Ok(OtocRun {
        output,
        series,
        lambda_reference: lambda,
        ehrenfest_time: t_e,
        growth,
        tail,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    Epsilon(Vec<f64>),
    MapParam(Vec<f64>),
    N(Vec<usize>),
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Epsilon(_) => "epsilon",
            SweepAxis::MapParam(_) => "map_param",
            SweepAxis::N(_) => "N",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SweepAxis::Epsilon(v) | SweepAxis::MapParam(v) => v.len(),
            SweepAxis::N(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn label(&self, i: usize) -> String {
        match self {
            SweepAxis::Epsilon(v) | SweepAxis::MapParam(v) => format!("{:?}", v[i]),
            SweepAxis::N(v) => v[i].to_string(),
        }
    }

    fn apply(&self, base: &RunConfig, i: usize, dir: PathBuf) -> RunConfig {
        let mut cfg = base.clone();
        match self {
            SweepAxis::Epsilon(v) => cfg.epsilon = v[i],
            SweepAxis::MapParam(v) => cfg.map_param = v[i],
            SweepAxis::N(v) => cfg.n = v[i],
        }
        cfg.outputs = dir;
        cfg
    }
}

#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub value: String,
    pub dir: PathBuf,
    pub result: std::result::Result<(Option<RateFit>, Option<TailFit>), String>,
}

#[derive(Debug, Clone)]
pub struct SweepRun {
    pub output: RunOutput,
    pub entries: Vec<SweepEntry>,
}

/// One OTOC sub-run per axis value (in parallel), then `summary.csv`.
/// Failed sub-runs are recorded in the summary rather than aborting.
pub fn run_sweep(base: &RunConfig, axis: &SweepAxis) -> Result<SweepRun> {
    if axis.is_empty() {
        return Err(Error::InvalidParameter(
            "empty sweep list; usage: sweep --axis <epsilon|map_param|N> --values v1,v2,...".into(),
        ));
    }
    base.validate()?;
    let started = Instant::now();
    let entries: Vec<SweepEntry> = (0..axis.len())
        .into_par_iter()
        .map(|i| {
            let dir = base.outputs.join(format!("{}_{i:03}", axis.name()));
            let cfg = axis.apply(base, i, dir.clone());
            let result = run_otoc(&cfg).map(|r| (r.growth, r.tail)).map_err(|e| format!("{}: {e}", e.kind()));
            SweepEntry {
                value: axis.label(i),
                dir,
                result,
            }
        })
        .collect();

    let mut table = CsvTable::new([
        "value", "status", "alpha1", "tail_r2", "tail_start", "tail_end", "lambda_fit", "growth_r2", "growth_start",
        "growth_end", "dir", "error",
    ]);
    let blank = || Cell::Text(String::new());
    for e in &entries {
        let dir = e.dir.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let mut row: Vec<Cell> = vec![e.value.clone().into()];
        match &e.result {
            Ok((growth, tail)) => {
                row.push("ok".into());
                match tail {
                    Some(f) => row.extend([f.alpha.into(), f.r_squared.into(), f.start.into(), f.end.into()]),
                    None => row.extend([blank(), blank(), blank(), blank()]),
                }
                match growth {
                    Some(f) => row.extend([f.value.into(), f.r_squared.into(), f.start.into(), f.end.into()]),
                    None => row.extend([blank(), blank(), blank(), blank()]),
                }
                row.extend([dir.into(), blank()]);
            }
            Err(msg) => {
                row.push("failed".into());
                row.extend((0..8).map(|_| blank()));
                row.extend([dir.into(), msg.clone().into()]);
            }
        }
        table.push(row);
    }
    let mut writer = RunWriter::new(base.outputs.clone())?;
    writer.manifest = base_manifest(base, "sweep");
    writer.manifest.push("sweep_axis", axis.name());
    writer
        .manifest
        .push("sweep_values", (0..axis.len()).map(|i| axis.label(i)).collect::<Vec<_>>().join(","));
    writer
        .manifest
        .push("sweep_failures", entries.iter().filter(|e| e.result.is_err()).count());
    writer.write_csv("summary.csv", &table)?;
    writer.manifest.push("wall_clock_seconds", format!("{:.3}", started.elapsed().as_secs_f64()));
    Ok(SweepRun {
        output: writer.finish()?,
        entries,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResonanceMethod {
    Dense,
    Krylov,
}

impl ResonanceMethod {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dense" => Some(ResonanceMethod::Dense),
            "krylov" => Some(ResonanceMethod::Krylov),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ResonanceRun {
    pub output: RunOutput,
    pub spectrum: ResonanceSpectrum,
}

/// Resonance spectrum to `resonances.csv`. Non-converged Krylov values are
/// kept and flagged.
pub fn run_resonances(cfg: &RunConfig, method: ResonanceMethod, depth: usize, n_wanted: usize) -> Result<ResonanceRun> {
    let started = Instant::now();
    let channel = build_channel(cfg)?;
    let seed = match cfg.krylov_seed {
        KrylovSeedKind::Position => KrylovSeed::Position,
        KrylovSeedKind::Random => KrylovSeed::Random(cfg.seed),
    };
    let spectrum = match method {
        ResonanceMethod::Dense => {
            let mut s = dense_spectrum(&channel)?.spectrum;
            s.alphas.truncate(n_wanted);
            s.residuals.truncate(n_wanted);
            s.converged.truncate(n_wanted);
            s
        }
        ResonanceMethod::Krylov => krylov_leading(&channel, &seed, depth, n_wanted)?,
    };
    let mut table = CsvTable::new(["index", "re", "im", "abs", "residual", "converged"]);
    for (i, a) in spectrum.alphas.iter().enumerate() {
        table.push(vec![
            i.into(),
            a.re.into(),
            a.im.into(),
            a.norm().into(),
            spectrum.residuals[i].into(),
            spectrum.converged[i].into(),
        ]);
    }
    let mut writer = RunWriter::new(cfg.outputs.clone())?;
    writer.manifest = base_manifest(cfg, "resonances");
    let m = &mut writer.manifest;
    m.push("kernel_normalization", "unit_sum");
    m.push("method", spectrum.method);
    m.push("n_wanted", n_wanted);
    if method == ResonanceMethod::Krylov {
        m.push("depth", depth);
    }
    if let Some(a1) = spectrum.alpha1() {
        m.push("alpha1_abs", format!("{:.16e}", a1.norm()));
    }
    m.push("leading_cluster_size", spectrum.leading_cluster().len());
    m.push("degenerate", spectrum.degenerate);
    m.push("all_converged", spectrum.converged.iter().all(|c| *c));
    writer.write_csv("resonances.csv", &table)?;
    writer.manifest.push("wall_clock_seconds", format!("{:.3}", started.elapsed().as_secs_f64()));
    Ok(ResonanceRun {
        output: writer.finish()?,
        spectrum,
    })
}

#[derive(Debug, Clone)]
pub struct LyapunovRun {
    pub output: RunOutput,
    pub estimate: LyapunovEstimate,
}

/// Classical Lyapunov exponents to `lyapunov.csv`.
pub fn run_lyapunov(cfg: &RunConfig, n_traj: usize, t_horizon: usize) -> Result<LyapunovRun> {
    cfg.validate()?;
    let started = Instant::now();
    let estimate = lyapunov(&cfg.spec(), n_traj, t_horizon, cfg.seed)?;
    let t_e = ehrenfest_time(cfg.n, estimate.lambda).ok();
    let mut table = CsvTable::new([
        "n_traj",
        "t_horizon",
        "lambda",
        "lambda_generalized",
        "standard_error",
        "resampled",
        "ehrenfest_time",
    ]);
    table.push(vec![
        estimate.n_trajectories.into(),
        estimate.t_horizon.into(),
        estimate.lambda.into(),
        estimate.lambda_generalized.into(),
        estimate.standard_error.into(),
        estimate.resampled.into(),
        t_e.map(Cell::from).unwrap_or(Cell::Text(String::new())),
    ]);
    let mut writer = RunWriter::new(cfg.outputs.clone())?;
    writer.manifest = base_manifest(cfg, "lyapunov");
    writer.manifest.push("n_traj", n_traj);
    writer.manifest.push("t_horizon", t_horizon);
    writer.manifest.push("burn_in", crate::classical::LYAPUNOV_BURN_IN);
    writer.write_csv("lyapunov.csv", &table)?;
    writer.manifest.push("wall_clock_seconds", format!("{:.3}", started.elapsed().as_secs_f64()));
    Ok(LyapunovRun {
        output: writer.finish()?,
        estimate,
    })
}
