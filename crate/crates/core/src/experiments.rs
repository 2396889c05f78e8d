//! Theory-vs-simulation parameter sweeps and their CSV output.
//!
//! Every sweep point produces a `theory` row, a `sim` row and a flat
//! `rls-baseline` row, all computed from the same `(s, λ, β, κ, P_ν)`.
//! Trials at different sweep points reuse the same random streams, so curves
//! are smooth in the swept parameter.

use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::filter::FilterConfig;
use crate::montecarlo::{self, default_iters, lemma1_check, Lemma1Result, TrialPlan};
use crate::sysmodel::{
    generate_nested_systems, generate_sparse_system, InputMode, SignalModel, SparseSystem,
    SystemRecord,
};
use crate::theory::{min_msd_ratio_limit, SteadyAnalysis, TheoryCoeffs};

pub const CSV_HEADER: &str = "experiment,sweep_var,sweep_value,source,steady_msd,steady_msd_db,kappa,theta,seed,trials,n_iters";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    KappaSweep,
    BetaSweep,
    SparsitySweep,
    SingleRun,
    Lemma1,
}

impl ExperimentKind {
    pub fn id(&self) -> &'static str {
        match self {
            ExperimentKind::KappaSweep => "exp1",
            ExperimentKind::BetaSweep => "exp2",
            ExperimentKind::SparsitySweep => "exp3",
            ExperimentKind::SingleRun => "single",
            ExperimentKind::Lemma1 => "lemma1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    #[default]
    Desk,
    Paper,
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Preset::Desk),
            "paper" => Ok(Preset::Paper),
            other => Err(invalid(format!(
                "unknown preset '{other}' (expected desk or paper)"
            ))),
        }
    }
}

/// `start:stop:points[:log]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub log: bool,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.log {
            log_grid(self.start, self.stop, self.points)
        } else {
            lin_grid(self.start, self.stop, self.points)
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || {
            invalid(format!(
                "malformed grid '{s}', expected start:stop:points[:log]"
            ))
        };
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let points: usize = parts[2].trim().parse().map_err(|_| bad())?;
        let log = match parts.get(3).map(|p| p.trim()) {
            None | Some("lin") => false,
            Some("log") => true,
            Some(_) => return Err(bad()),
        };
        if points == 0 || !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        if log && (start <= 0.0 || stop <= 0.0) {
            return Err(invalid(format!("log grid '{s}' needs positive endpoints")));
        }
        Ok(Self {
            start,
            stop,
            points,
            log,
        })
    }
}

pub fn log_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![start];
    }
    let (a, b) = (start.ln(), stop.ln());
    (0..points)
        .map(|i| match i {
            0 => start,
            i if i == points - 1 => stop,
            i => (a + (b - a) * i as f64 / (points - 1) as f64).exp(),
        })
        .collect()
}

pub fn lin_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![start];
    }
    (0..points)
        .map(|i| start + (stop - start) * i as f64 / (points - 1) as f64)
        .collect()
}

/// Full description of an experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub preset: Preset,
    /// Filter length `N`.
    pub taps: usize,
    /// Sparsity `K`.
    pub sparsity: usize,
    pub lambda: f64,
    pub beta: f64,
    /// Fixed `κ` for single runs; `None` means `κ_opt`.
    pub kappa: Option<f64>,
    pub snr_db: f64,
    pub px: f64,
    /// `P₀ = δ⁻¹ I`; `None` means `0.01 P_x`.
    pub delta_init: Option<f64>,
    pub trials: usize,
    /// `None` means `10/(1−λ)`.
    pub iters: Option<usize>,
    pub seed: u64,
    /// Overrides the default grid of the swept variable.
    pub grid: Option<GridSpec>,
    /// Sparsity values of the `K` sweep when no `grid` is given.
    pub k_values: Vec<usize>,
    pub redraw_system: bool,
    pub input_mode: InputMode,
}

impl ExperimentSpec {
    /// Preset defaults. Paper: `N=64, K=6, λ=0.995, β=5, SNR 50 dB, 100 trials`;
    /// desk: `N=32, K=3`, 50 trials, same `λ, β, SNR`.
    pub fn preset(kind: ExperimentKind, preset: Preset) -> Self {
        let (taps, sparsity, trials, k_values) = match preset {
            Preset::Paper => (64, 6, 100, (1..=61).collect()),
            Preset::Desk => (32, 3, 50, vec![1, 4, 8, 16, 24]),
        };
        Self {
            kind,
            preset,
            taps,
            sparsity,
            lambda: 0.995,
            beta: 5.0,
            kappa: None,
            snr_db: 50.0,
            px: 1.0,
            delta_init: None,
            trials,
            iters: None,
            seed: 1,
            grid: None,
            k_values,
            redraw_system: false,
            input_mode: InputMode::TappedDelay,
        }
    }

    pub fn n_iters(&self) -> usize {
        self.iters.unwrap_or_else(|| default_iters(self.lambda))
    }

    pub fn delta(&self) -> f64 {
        self.delta_init.unwrap_or(0.01 * self.px)
    }

    pub fn validate(&self) -> Result<()> {
        if self.taps == 0 {
            return Err(invalid("N must be at least 1"));
        }
        if self.sparsity > self.taps {
            return Err(invalid(format!(
                "K={} exceeds N={}",
                self.sparsity, self.taps
            )));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(invalid(format!(
                "lambda must lie in (0,1), got {}",
                self.lambda
            )));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(invalid(format!("beta must be positive, got {}", self.beta)));
        }
        if let Some(k) = self.kappa {
            if !(k >= 0.0) || !k.is_finite() {
                return Err(invalid(format!("kappa must be non-negative, got {k}")));
            }
        }
        if !(self.px > 0.0) {
            return Err(invalid("input power must be positive"));
        }
        if self.snr_db.is_nan() {
            return Err(invalid("snr_db must be a number"));
        }
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        let iters = self.n_iters();
        if iters <= montecarlo::default_steady_window(iters) {
            return Err(invalid(format!(
                "iters={iters} too short for the steady-state window"
            )));
        }
        if let Some(g) = &self.grid {
            if g.values().is_empty() {
                return Err(invalid("grid must be nonempty"));
            }
        }
        if self.kind == ExperimentKind::SparsitySweep
            && self.grid.is_none()
            && self.k_values.is_empty()
        {
            return Err(invalid("sparsity sweep needs K values"));
        }
        Ok(())
    }

    fn system(&self, sparsity: usize, seed: u64) -> Result<SparseSystem<f64>> {
        generate_sparse_system(self.taps, sparsity, seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Sim,
    Theory,
    RlsBaseline,
}

impl Source {
    pub fn as_str(&self) -> &'static str {
        match self {
            Source::Sim => "sim",
            Source::Theory => "theory",
            Source::RlsBaseline => "rls-baseline",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sim" => Ok(Source::Sim),
            "theory" => Ok(Source::Theory),
            "rls-baseline" => Ok(Source::RlsBaseline),
            other => Err(invalid(format!("unknown source '{other}'"))),
        }
    }
}

/// One CSV record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub sweep_var: String,
    pub sweep_value: f64,
    pub source: Source,
    pub steady_msd: f64,
    pub steady_msd_db: f64,
    pub kappa: f64,
    pub theta: f64,
    pub seed: u64,
    pub trials: usize,
    pub n_iters: usize,
}

pub fn to_db(v: f64) -> f64 {
    10.0 * v.log10()
}

/// Rows plus scalar summaries (`κ_opt`, asymptotes, …) and non-fatal notes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<(String, f64)>,
    pub notes: Vec<String>,
    pub systems: Vec<SystemRecord>,
}

impl ExperimentOutput {
    pub fn summary_value(&self, key: &str) -> Option<f64> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    /// Rows of one source in sweep order.
    pub fn series(&self, source: Source) -> Vec<&ResultRow> {
        self.rows.iter().filter(|r| r.source == source).collect()
    }

    fn sort_rows(&mut self) {
        self.rows.sort_by(|a, b| {
            a.sweep_value
                .total_cmp(&b.sweep_value)
                .then(a.source.cmp(&b.source))
        });
    }
}

struct Point {
    sweep_value: f64,
    system: SparseSystem<f64>,
    system_seed: u64,
    beta: f64,
    kappa: f64,
}

struct PointResult {
    rows: Vec<ResultRow>,
    note: Option<String>,
}

fn signal_for(
    spec: &ExperimentSpec,
    system: &SparseSystem<f64>,
    seed: u64,
) -> Result<SignalModel<f64>> {
    SignalModel::from_snr(spec.px, system, spec.snr_db, seed)
}

fn analysis_for(
    spec: &ExperimentSpec,
    system: &SparseSystem<f64>,
    beta: f64,
    kappa: f64,
) -> Result<SteadyAnalysis<f64>> {
    let coeffs = TheoryCoeffs::new(
        spec.lambda,
        kappa,
        beta,
        spec.px,
        spec.taps,
        system.sparsity(),
    )?;
    let signal = signal_for(spec, system, spec.seed)?;
    Ok(SteadyAnalysis::for_system(coeffs, system, signal.pnu))
}

fn simulate_point(spec: &ExperimentSpec, pt: &Point) -> Result<f64> {
    let signal = signal_for(spec, &pt.system, pt.system_seed)?;
    let config = FilterConfig::new(spec.taps, spec.lambda, pt.kappa, pt.beta, spec.delta())?;
    let mut plan = TrialPlan::new(
        config,
        pt.system.clone(),
        signal,
        spec.n_iters(),
        spec.trials,
        spec.seed,
    )?;
    plan.input_mode = spec.input_mode;
    plan.redraw_system = spec.redraw_system;
    Ok(montecarlo::simulate(&plan)?.steady_msd_estimate)
}

fn evaluate_point(spec: &ExperimentSpec, sweep_var: &str, pt: &Point) -> Result<PointResult> {
    let analysis = analysis_for(spec, &pt.system, pt.beta, pt.kappa)?;
    let theta = analysis.coeffs.theta;
    let row = |source: Source, msd: f64, kappa: f64, theta: f64, trials: usize, n_iters: usize| {
        ResultRow {
            experiment: spec.kind.id().to_string(),
            sweep_var: sweep_var.to_string(),
            sweep_value: pt.sweep_value,
            source,
            steady_msd: msd,
            steady_msd_db: to_db(msd),
            kappa,
            theta,
            seed: pt.system_seed,
            trials,
            n_iters,
        }
    };
    let sim = simulate_point(spec, pt)?;
    Ok(PointResult {
        rows: vec![
            row(
                Source::Sim,
                sim,
                pt.kappa,
                theta,
                spec.trials,
                spec.n_iters(),
            ),
            row(
                Source::Theory,
                analysis.msd_at_theta(theta),
                pt.kappa,
                theta,
                0,
                0,
            ),
            row(Source::RlsBaseline, analysis.baseline, 0.0, 0.0, 0, 0),
        ],
        note: None,
    })
}

fn run_points(
    spec: &ExperimentSpec,
    sweep_var: &str,
    points: Vec<Point>,
) -> Result<Vec<PointResult>> {
    points
        .par_iter()
        .map(|pt| evaluate_point(spec, sweep_var, pt))
        .collect()
}

fn finish(
    spec: &ExperimentSpec,
    results: Vec<PointResult>,
    mut out: ExperimentOutput,
) -> ExperimentOutput {
    for r in results {
        out.rows.extend(r.rows);
        out.notes.extend(r.note);
    }
    if spec.redraw_system {
        out.notes
            .push("systems redrawn per trial; theory rows refer to the base system".to_string());
    }
    out.sort_rows();
    out
}

fn expect_kind(spec: &ExperimentSpec, kind: ExperimentKind) -> Result<()> {
    if spec.kind != kind {
        return Err(invalid(format!(
            "expected a {:?} spec, got {:?}",
            kind, spec.kind
        )));
    }
    spec.validate()
}

/// `κ` sweep at fixed `β`: logarithmic grid from `5e−7` to `10^0.1 κ_max` by default.
pub fn run_experiment_1(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    expect_kind(spec, ExperimentKind::KappaSweep)?;
    let system = spec.system(spec.sparsity, spec.seed)?;
    let analysis = analysis_for(spec, &system, spec.beta, 0.0)?;
    let kappa_max = analysis.kappa_max()?;
    let kappa_opt = analysis.kappa_opt()?;
    let grid = match spec.grid {
        Some(g) => g.values(),
        None => {
            if !(kappa_max * 10f64.powf(0.1) > 5e-7) {
                return Err(invalid(format!(
                    "kappa_max {kappa_max:e} is below the grid start 5e-7"
                )));
            }
            log_grid(5e-7, 10f64.powf(0.1) * kappa_max, 20)
        }
    };
    let nearest = nearest_log_index(&grid, kappa_opt);
    let notes = grid
        .iter()
        .filter(|&&kappa| kappa >= kappa_max)
        .map(|kappa| {
            format!(
                "kappa={kappa:e}: at or above kappa_max={kappa_max:e}, excess MSD is non-negative"
            )
        })
        .collect();
    let points = grid
        .iter()
        .map(|&kappa| Point {
            sweep_value: kappa,
            system: system.clone(),
            system_seed: spec.seed,
            beta: spec.beta,
            kappa,
        })
        .collect();
    let results = run_points(spec, "kappa", points)?;
    let out = ExperimentOutput {
        summary: vec![
            ("kappa_max".into(), kappa_max),
            ("kappa_opt".into(), kappa_opt),
            ("theta_opt".into(), analysis.theta_opt()?),
            ("nearest_grid_index".into(), nearest as f64),
            ("nearest_grid_kappa".into(), grid[nearest]),
            ("min_msd".into(), analysis.min_msd()?),
            ("rls_baseline".into(), analysis.baseline),
        ],
        notes,
        systems: vec![system.record(spec.beta, spec.seed)],
        ..Default::default()
    };
    Ok(finish(spec, results, out))
}

/// Index of the grid value closest to `target` on a log scale.
pub fn nearest_log_index(grid: &[f64], target: f64) -> usize {
    grid.iter()
        .enumerate()
        .min_by(|a, b| {
            let da = (a.1.ln() - target.ln()).abs();
            let db = (b.1.ln() - target.ln()).abs();
            da.total_cmp(&db)
        })
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// `β` sweep at `κ_opt(β)`, recomputing the partition and `G(s)` per point.
pub fn run_experiment_2(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    expect_kind(spec, ExperimentKind::BetaSweep)?;
    let system = spec.system(spec.sparsity, spec.seed)?;
    let grid = match spec.grid {
        Some(g) => g.values(),
        None => log_grid(0.1, 50.0, 20),
    };
    let mut notes = Vec::new();
    let mut points = Vec::new();
    for &beta in &grid {
        if !(beta > 0.0) {
            notes.push(format!("beta={beta}: skipped, beta must be positive"));
            continue;
        }
        match analysis_for(spec, &system, beta, 0.0).and_then(|a| a.kappa_opt()) {
            Ok(kappa) => points.push(Point {
                sweep_value: beta,
                system: system.clone(),
                system_seed: spec.seed,
                beta,
                kappa,
            }),
            Err(e) => notes.push(format!("beta={beta}: {e}")),
        }
    }
    let results = run_points(spec, "beta", points)?;
    let limit = min_msd_ratio_limit(spec.lambda, system.sparsity(), spec.taps);
    let mut out = ExperimentOutput {
        summary: vec![("ratio_limit".into(), limit)],
        notes,
        systems: vec![system.record(spec.beta, spec.seed)],
        ..Default::default()
    };
    out = finish(spec, results, out);
    if let (Some(th), Some(base)) = (
        out.series(Source::Theory).last(),
        out.series(Source::RlsBaseline).last(),
    ) {
        let ratio = th.steady_msd / base.steady_msd;
        out.summary
            .push(("largest_beta_theory_ratio".into(), ratio));
    }
    if let (Some(sim), Some(base)) = (
        out.series(Source::Sim).last(),
        out.series(Source::RlsBaseline).last(),
    ) {
        let ratio = sim.steady_msd / base.steady_msd;
        out.summary.push(("largest_beta_sim_ratio".into(), ratio));
    }
    Ok(out)
}

/// Sparsity sweep at `κ_opt(K)`. Each `K` gets its own system, drawn as a
/// nested family from one seed so that `G` and `‖s‖²` never shrink as `K` grows.
pub fn run_experiment_3(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    expect_kind(spec, ExperimentKind::SparsitySweep)?;
    let requested: Vec<usize> = match spec.grid {
        Some(g) => g.values().iter().map(|v| v.round() as usize).collect(),
        None => spec.k_values.clone(),
    };
    let mut notes = Vec::new();
    let mut ks = Vec::new();
    for k in requested {
        if k == 0 || k > spec.taps {
            notes.push(format!("K={k}: skipped, needs 1 <= K <= N"));
        } else if !ks.contains(&k) {
            ks.push(k);
        }
    }
    let family = generate_nested_systems(spec.taps, &ks, spec.seed)?;
    let mut points = Vec::new();
    let mut systems = Vec::new();
    for (k, system) in ks.into_iter().zip(family) {
        match analysis_for(spec, &system, spec.beta, 0.0).and_then(|a| a.kappa_opt()) {
            Ok(kappa) => {
                systems.push(system.record(spec.beta, spec.seed));
                points.push(Point {
                    sweep_value: k as f64,
                    system,
                    system_seed: spec.seed,
                    beta: spec.beta,
                    kappa,
                })
            }
            Err(e) => notes.push(format!("K={k}: {e}")),
        }
    }
    let results = run_points(spec, "K", points)?;
    let out = ExperimentOutput {
        notes,
        systems,
        ..Default::default()
    };
    Ok(finish(spec, results, out))
}

/// One operating point at the given `κ` (or `κ_opt` when unset).
pub fn run_single(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    expect_kind(spec, ExperimentKind::SingleRun)?;
    let system = spec.system(spec.sparsity, spec.seed)?;
    let analysis = analysis_for(spec, &system, spec.beta, 0.0)?;
    let kappa = match spec.kappa {
        Some(k) => k,
        None => analysis.kappa_opt()?,
    };
    let point = Point {
        sweep_value: kappa,
        system: system.clone(),
        system_seed: spec.seed,
        beta: spec.beta,
        kappa,
    };
    let results = run_points(spec, "kappa", vec![point])?;
    let mut summary = vec![("rls_baseline".into(), analysis.baseline)];
    if let Ok(k) = analysis.kappa_opt() {
        summary.push(("kappa_opt".into(), k));
    }
    if let Ok(k) = analysis.kappa_max() {
        summary.push(("kappa_max".into(), k));
    }
    let out = ExperimentOutput {
        summary,
        systems: vec![system.record(spec.beta, spec.seed)],
        ..Default::default()
    };
    Ok(finish(spec, results, out))
}

/// Lemma-1 statistic with the spec's `λ`, `N`, `P_x`, `iters` (as `n`), trials and seed.
pub fn run_lemma1(spec: &ExperimentSpec) -> Result<Lemma1Result> {
    let n = spec.iters.unwrap_or(2000);
    lemma1_check(spec.lambda, spec.taps, spec.px, n, spec.trials, spec.seed)
}

/// Dispatches on `spec.kind` for the row-producing experiments.
pub fn run(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    match spec.kind {
        ExperimentKind::KappaSweep => run_experiment_1(spec),
        ExperimentKind::BetaSweep => run_experiment_2(spec),
        ExperimentKind::SparsitySweep => run_experiment_3(spec),
        ExperimentKind::SingleRun => run_single(spec),
        ExperimentKind::Lemma1 => Err(invalid("lemma1 produces no result rows; use run_lemma1")),
    }
}

fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Writes header and rows; floats carry 17 significant digits.
pub fn write_csv<W: Write>(rows: &[ResultRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.experiment,
            r.sweep_var,
            fmt_f64(r.sweep_value),
            r.source,
            fmt_f64(r.steady_msd),
            fmt_f64(r.steady_msd_db),
            fmt_f64(r.kappa),
            fmt_f64(r.theta),
            r.seed,
            r.trials,
            r.n_iters
        )?;
    }
    w.flush()
}

pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(invalid("no rows to write"));
    }
    let io_err = |source| Error::Io {
        context: format!("writing {}", path.display()),
        source,
    };
    let file = std::fs::File::create(path).map_err(io_err)?;
    write_csv(rows, std::io::BufWriter::new(file)).map_err(io_err)
}

pub fn parse_csv<R: std::io::Read>(reader: R) -> Result<Vec<ResultRow>> {
    let mut lines = BufReader::new(reader).lines().enumerate();
    match lines.next() {
        Some((_, Ok(h))) if h.trim_end() == CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: "missing or unexpected header".into(),
            })
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.trim_end().split(',').collect();
        let perr = |msg: String| Error::Parse { line: line_no, msg };
        if f.len() != 11 {
            return Err(perr(format!("expected 11 fields, got {}", f.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| perr(format!("'{s}': {e}")));
        let int = |s: &str| s.parse::<u64>().map_err(|e| perr(format!("'{s}': {e}")));
        rows.push(ResultRow {
            experiment: f[0].to_string(),
            sweep_var: f[1].to_string(),
            sweep_value: num(f[2])?,
            source: f[3].parse().map_err(|e: Error| perr(e.to_string()))?,
            steady_msd: num(f[4])?,
            steady_msd_db: num(f[5])?,
            kappa: num(f[6])?,
            theta: num(f[7])?,
            seed: int(f[8])?,
            trials: int(f[9])? as usize,
            n_iters: int(f[10])? as usize,
        });
    }
    Ok(rows)
}
