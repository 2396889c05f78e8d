//! `l0rls` experiment runner.
//!
//! Exit status: 0 on success, 1 for usage errors (bad flags, malformed grid,
//! invalid parameters), 2 for failures while running or writing results.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use l0rls::experiments::{
    self, ExperimentKind, ExperimentOutput, ExperimentSpec, GridSpec, Preset,
};
use l0rls::montecarlo::{assumption_audit, TrialPlan};
use l0rls::{FilterConfig, InputMode, SignalModel, SteadyAnalysis, TheoryCoeffs};

const OUT_DIR_ENV: &str = "L0RLS_OUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "l0rls",
    version,
    about = "Theory vs simulation sweeps for the l0-norm constrained RLS filter"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Steady-state MSD versus the penalty κ at fixed β
    Exp1(CommonArgs),
    /// Minimum steady-state MSD versus β, at κ_opt(β)
    Exp2(CommonArgs),
    /// Minimum steady-state MSD versus sparsity K, at κ_opt(K)
    Exp3(CommonArgs),
    /// One operating point; κ defaults to κ_opt
    Single(CommonArgs),
    /// Deviation of the normalised correlation estimate Φₙ/Σλᵐ from R = P_x I
    Lemma1(CommonArgs),
    /// Check the zero-tap Gaussianity, sign and attraction-range assumptions
    Audit(CommonArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum PresetArg {
    Desk,
    Paper,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Desk => Preset::Desk,
            PresetArg::Paper => Preset::Paper,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum InputArg {
    TappedDelay,
    Independent,
}

#[derive(Args, Debug, Default, Clone)]
struct CommonArgs {
    /// Scale preset: `paper` uses the published parameter table, `desk` a faster N=32 setup
    #[arg(long, value_enum)]
    preset: Option<PresetArg>,
    /// Filter length N
    #[arg(long)]
    n: Option<usize>,
    /// Sparsity K, the number of nonzero taps of s
    #[arg(long)]
    k: Option<usize>,
    /// Forgetting factor λ, in (0, 1)
    #[arg(long)]
    lambda: Option<f64>,
    /// Attractor steepness β; the attraction range is |t| ≤ 1/β
    #[arg(long)]
    beta: Option<f64>,
    /// Zero-attraction strength κ (single/audit; default κ_opt)
    #[arg(long)]
    kappa: Option<f64>,
    /// SNR = P_x‖s‖²/P_ν in dB; sets the noise power P_ν
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    snr_db: Option<f64>,
    /// Input power P_x
    #[arg(long)]
    px: Option<f64>,
    /// Monte-Carlo trial count
    #[arg(long)]
    trials: Option<usize>,
    /// Iterations per trial n (default 10/(1−λ); lemma1 default 2000)
    #[arg(long)]
    iters: Option<usize>,
    /// Base RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path (default: $L0RLS_OUT_DIR/<command>.csv, else stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sweep grid start:stop:points[:log] over κ (exp1), β (exp2) or K (exp3)
    #[arg(long)]
    grid: Option<String>,
    /// JSON file with any of the above fields; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the drawn system(s) s as JSON
    #[arg(long = "system-out")]
    system_out: Option<PathBuf>,
    /// Draw a fresh system s in every trial
    #[arg(long = "redraw-system")]
    redraw_system: bool,
    /// Regressor model: tapped delay line or independent vectors
    #[arg(long = "input-mode", value_enum)]
    input_mode: Option<InputArg>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    preset: Option<PresetArg>,
    n: Option<usize>,
    k: Option<usize>,
    lambda: Option<f64>,
    beta: Option<f64>,
    kappa: Option<f64>,
    #[serde(alias = "snr-db")]
    snr_db: Option<f64>,
    px: Option<f64>,
    trials: Option<usize>,
    iters: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    grid: Option<String>,
    #[serde(alias = "k-values")]
    k_values: Option<Vec<usize>>,
    #[serde(alias = "system-out")]
    system_out: Option<PathBuf>,
    #[serde(alias = "redraw-system")]
    redraw_system: Option<bool>,
    #[serde(alias = "input-mode")]
    input_mode: Option<InputArg>,
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

/// Fully resolved invocation.
struct Invocation {
    spec: ExperimentSpec,
    out: Option<PathBuf>,
    system_out: Option<PathBuf>,
}

fn resolve(kind: ExperimentKind, args: &CommonArgs) -> Result<Invocation, Failure> {
    let file: ConfigFile = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Failure::Usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("invalid config {}: {e}", path.display())))?
        }
        None => ConfigFile::default(),
    };
    let preset = args.preset.or(file.preset).unwrap_or(PresetArg::Desk);
    let mut spec = ExperimentSpec::preset(kind, preset.into());
    if kind == ExperimentKind::Lemma1 {
        spec.taps = 8;
        spec.lambda = 0.99;
        spec.trials = 500;
    }
    macro_rules! merge {
        ($field:ident => $target:expr) => {
            if let Some(v) = args.$field.clone().or(file.$field.clone()) {
                $target = v;
            }
        };
    }
    merge!(n => spec.taps);
    merge!(k => spec.sparsity);
    merge!(lambda => spec.lambda);
    merge!(beta => spec.beta);
    merge!(snr_db => spec.snr_db);
    merge!(px => spec.px);
    merge!(trials => spec.trials);
    merge!(seed => spec.seed);
    spec.kappa = args.kappa.or(file.kappa);
    spec.iters = args.iters.or(file.iters);
    if let Some(ks) = file.k_values {
        spec.k_values = ks;
    }
    if let Some(g) = args.grid.as_ref().or(file.grid.as_ref()) {
        spec.grid = Some(g.parse::<GridSpec>().map_err(usage)?);
    }
    spec.redraw_system = args.redraw_system || file.redraw_system.unwrap_or(false);
    if let Some(m) = args.input_mode.or(file.input_mode) {
        spec.input_mode = match m {
            InputArg::TappedDelay => InputMode::TappedDelay,
            InputArg::Independent => InputMode::Independent,
        };
    }
    if kind == ExperimentKind::Lemma1 {
        if spec.taps == 0
            || spec.trials == 0
            || !(spec.lambda > 0.0 && spec.lambda <= 1.0)
            || !(spec.px > 0.0)
        {
            return Err(Failure::Usage(
                "lemma1 needs N >= 1, trials >= 1, λ in (0,1], P_x > 0".into(),
            ));
        }
    } else {
        spec.validate().map_err(usage)?;
    }
    let out = args.out.clone().or(file.out).or_else(|| {
        std::env::var_os(OUT_DIR_ENV)
            .filter(|d| !d.is_empty())
            .map(|d| Path::new(&d).join(format!("{}.csv", kind.id())))
    });
    Ok(Invocation {
        spec,
        out,
        system_out: args.system_out.clone().or(file.system_out),
    })
}

fn write_rows(out: &ExperimentOutput, path: Option<&Path>) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            experiments::emit_csv(&out.rows, p)?;
            eprintln!("wrote {} rows to {}", out.rows.len(), p.display());
        }
        None => experiments::write_csv(&out.rows, io::stdout().lock())
            .context("writing CSV to stdout")?,
    }
    Ok(())
}

fn report(out: &ExperimentOutput) {
    for (k, v) in &out.summary {
        eprintln!("{k} = {v:.12e}");
    }
    for n in &out.notes {
        eprintln!("note: {n}");
    }
}

fn run_rows(inv: &Invocation) -> Result<(), Failure> {
    let out = experiments::run(&inv.spec).context("experiment failed")?;
    report(&out);
    if let Some(p) = &inv.system_out {
        let json = serde_json::to_string_pretty(&out.systems).context("serialising systems")?;
        fs::write(p, json).with_context(|| format!("writing {}", p.display()))?;
    }
    write_rows(&out, inv.out.as_deref())?;
    Ok(())
}

fn run_lemma1(inv: &Invocation) -> Result<(), Failure> {
    let spec = &inv.spec;
    let r = experiments::run_lemma1(spec).context("lemma1 failed")?;
    let text = format!(
        "lambda = {}\nn_taps = {}\nn = {}\ntrials = {}\nempirical = {:.12e}\nempirical_std_error = {:.12e}\nempirical_directional = {:.12e}\npredicted = {:.12e}\nratio = {:.6}\n",
        spec.lambda,
        spec.taps,
        spec.iters.unwrap_or(2000),
        spec.trials,
        r.empirical,
        r.empirical_std_error,
        r.empirical_directional,
        r.predicted,
        r.empirical / r.predicted
    );
    emit_text(&text, inv.out.as_deref())
}

fn run_audit(inv: &Invocation) -> Result<(), Failure> {
    let spec = &inv.spec;
    let system = l0rls::generate_sparse_system(spec.taps, spec.sparsity, spec.seed)
        .context("drawing system")?;
    let signal = SignalModel::from_snr(spec.px, &system, spec.snr_db, spec.seed).map_err(usage)?;
    let kappa = match spec.kappa {
        Some(k) => k,
        None => {
            let coeffs = TheoryCoeffs::new(
                spec.lambda,
                0.0,
                spec.beta,
                spec.px,
                spec.taps,
                system.sparsity(),
            )
            .map_err(usage)?;
            SteadyAnalysis::for_system(coeffs, &system, signal.pnu)
                .kappa_opt()
                .context("computing kappa_opt")?
        }
    };
    let config =
        FilterConfig::new(spec.taps, spec.lambda, kappa, spec.beta, spec.delta()).map_err(usage)?;
    let mut plan = TrialPlan::new(
        config,
        system,
        signal,
        spec.n_iters(),
        spec.trials,
        spec.seed,
    )
    .map_err(usage)?;
    plan.input_mode = spec.input_mode;
    plan.redraw_system = spec.redraw_system;
    let a = assumption_audit(&plan).context("audit failed")?;
    let opt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.6}"));
    let mut text = format!(
        "kappa = {kappa:.12e}\nsnr_db = {}\ntrials = {}\nsampled_iters = {:?}\nzero_tap_jarque_bera = {}\nzero_tap_normal_fraction = {}\nsign_agreement = {}\nlarge_outside_range = {}\ninside_range = {}\nrange_agreement = {:.6}\n",
        spec.snr_db,
        a.trials,
        a.sampled_iters,
        opt(a.zero_tap_jarque_bera),
        opt(a.zero_tap_normal_fraction),
        opt(a.sign_agreement),
        opt(a.large_outside_range),
        opt(a.inside_range),
        a.range_agreement
    );
    for n in &a.notes {
        text.push_str(&format!("note = {n}\n"));
    }
    emit_text(&text, inv.out.as_deref())
}

fn emit_text(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))?
        }
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .context("writing to stdout")?,
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let (kind, args) = match &cli.command {
        Command::Exp1(a) => (ExperimentKind::KappaSweep, a),
        Command::Exp2(a) => (ExperimentKind::BetaSweep, a),
        Command::Exp3(a) => (ExperimentKind::SparsitySweep, a),
        Command::Single(a) => (ExperimentKind::SingleRun, a),
        Command::Lemma1(a) => (ExperimentKind::Lemma1, a),
        Command::Audit(a) => (ExperimentKind::SingleRun, a),
    };
    let inv = resolve(kind, args)?;
    match cli.command {
        Command::Lemma1(_) => run_lemma1(&inv),
        Command::Audit(_) => run_audit(&inv),
        _ => run_rows(&inv),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run with --help for usage");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
