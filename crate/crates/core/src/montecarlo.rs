//! Seeded multi-trial simulation of the filters against known systems.
//!
//! Trial `i` of a plan draws its input and noise from stream `i + 1` of the
//! plan's base seed (stream 0 is reserved for system generation), so every
//! number in a [`SimResult`] is a function of the plan alone. Trials run in
//! parallel; results are reduced in trial-index order.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::filter::{Filter, FilterConfig, Variant};
use crate::scalar::Scalar;
use crate::sysmodel::{
    generate_sparse_system_with, noise_power_from_snr, seeded_rng, InputMode, InputStream,
    Partition, SignalModel, SparseSystem,
};
use crate::theory::{MsdTrajectory, Provenance};

/// Default run length, ten memory lengths `1/(1−λ)`; shorter runs still carry
/// the `(1−λⁿ)` start-up bias in the trailing window.
pub fn default_iters(lambda: f64) -> usize {
    (10.0 / (1.0 - lambda)).round() as usize
}

/// Default trailing window used for steady-state averages.
pub fn default_steady_window(n_iters: usize) -> usize {
    200.max(n_iters / 10)
}

const REDRAW_SALT: u64 = 0x5EED_5157_E500_0001;

/// Everything needed to reproduce a batch of trials.
#[derive(Debug, Clone)]
pub struct TrialPlan<T> {
    pub config: FilterConfig<T>,
    pub system: SparseSystem<T>,
    pub signal: SignalModel<T>,
    pub n_iters: usize,
    pub n_trials: usize,
    /// Trailing sample count for steady-state averages.
    pub steady_window: usize,
    pub base_seed: u64,
    pub input_mode: InputMode,
    /// Draw a fresh system (same `N`, `K`) for every trial instead of reusing `system`.
    pub redraw_system: bool,
    pub variant: Variant,
    /// Iterations (1-based) at which the full weight vector is recorded.
    pub snapshot_iters: Vec<usize>,
}

impl<T: Scalar> TrialPlan<T> {
    /// Plan with default window, tapped-delay input and RLS/l0-RLS picked from `κ`.
    pub fn new(
        config: FilterConfig<T>,
        system: SparseSystem<T>,
        signal: SignalModel<T>,
        n_iters: usize,
        n_trials: usize,
        base_seed: u64,
    ) -> Result<Self> {
        let variant = if config.is_conventional() {
            Variant::Rls
        } else {
            Variant::L0Rls
        };
        let plan = Self {
            config,
            system,
            signal,
            n_iters,
            n_trials,
            steady_window: default_steady_window(n_iters),
            base_seed,
            input_mode: InputMode::TappedDelay,
            redraw_system: false,
            variant,
            snapshot_iters: Vec::new(),
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn with_steady_window(mut self, window: usize) -> Result<Self> {
        self.steady_window = window;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        self.signal.validate()?;
        if self.system.taps() != self.config.taps {
            return Err(Error::Dimension {
                expected: self.config.taps,
                got: self.system.taps(),
            });
        }
        if self.n_trials == 0 {
            return Err(invalid("n_trials must be at least 1"));
        }
        if self.steady_window == 0 || self.n_iters <= self.steady_window {
            return Err(invalid(format!(
                "need n_iters > steady_window >= 1, got {} and {}",
                self.n_iters, self.steady_window
            )));
        }
        if let Some(&bad) = self
            .snapshot_iters
            .iter()
            .find(|&&n| n == 0 || n > self.n_iters)
        {
            return Err(invalid(format!(
                "snapshot iteration {bad} outside 1..={}",
                self.n_iters
            )));
        }
        Ok(())
    }

    /// `(seed, stream)` driving trial `trial`.
    pub fn trial_seed(&self, trial: usize) -> (u64, u64) {
        (self.base_seed, trial as u64 + 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TapSnapshot<T> {
    pub n: usize,
    pub w: Vec<T>,
}

/// Output of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord<T> {
    pub trial: usize,
    pub seed: (u64, u64),
    /// `‖hₙ‖²` for `n = 1..=n_iters`.
    pub d: Vec<T>,
    /// `Σ_{k∈C₀} h²_{k,n}`.
    pub omega: Vec<T>,
    /// Per-tap mean of `h_{k,n}` over the trailing window.
    pub tap_mean: Vec<T>,
    pub snapshots: Vec<TapSnapshot<T>>,
    /// The system this trial identified.
    pub system: SparseSystem<T>,
    /// Noise power actually used.
    pub pnu: T,
}

impl<T: Scalar> TrialRecord<T> {
    pub fn final_deviation(&self) -> T {
        *self.d.last().expect("trials have at least one iteration")
    }
}

/// Runs one trial, deterministic in `(plan, trial_index)`.
pub fn run_trial<T: Scalar>(plan: &TrialPlan<T>, trial_index: usize) -> Result<TrialRecord<T>> {
    plan.validate()?;
    run_trial_unchecked(plan, trial_index).map_err(|e| Error::Trial {
        trial: trial_index,
        source: Box::new(e),
    })
}

fn run_trial_unchecked<T: Scalar>(
    plan: &TrialPlan<T>,
    trial_index: usize,
) -> Result<TrialRecord<T>> {
    let (system, pnu) = if plan.redraw_system {
        let mut rng = seeded_rng(plan.base_seed ^ REDRAW_SALT, trial_index as u64);
        let sys: SparseSystem<T> =
            generate_sparse_system_with(plan.system.taps(), plan.system.sparsity(), &mut rng)?;
        let pnu = match plan.signal.snr_db {
            Some(snr) => noise_power_from_snr(plan.signal.px, sys.coefficients(), snr)?,
            None => plan.signal.pnu,
        };
        (sys, pnu)
    } else {
        (plan.system.clone(), plan.signal.pnu)
    };
    let s = system.coefficients();
    let zero_set = Partition::zero_indices(s);
    let noise_std = pnu.sqrt();

    let (seed, stream) = plan.trial_seed(trial_index);
    let mut input = InputStream::new(
        seeded_rng(seed, stream),
        plan.input_mode,
        plan.config.taps,
        plan.signal.px,
    );
    let mut filter = Filter::new(plan.config, plan.variant)?;

    let taps = plan.config.taps;
    let window_start = plan.n_iters - plan.steady_window;
    let mut d = Vec::with_capacity(plan.n_iters);
    let mut omega = Vec::with_capacity(plan.n_iters);
    let mut tap_sum = vec![T::zero(); taps];
    let mut snapshots = Vec::with_capacity(plan.snapshot_iters.len());

    for i in 0..plan.n_iters {
        let x = input.next_vector().to_vec();
        let y = system.output(&x) + noise_std * input.standard_normal();
        filter.step(&x, y)?;
        let w = filter.state().weights();

        let mut dev = T::zero();
        for (k, (&wk, &sk)) in w.iter().zip(s).enumerate() {
            let h = wk - sk;
            dev = dev + h * h;
            if i >= window_start {
                tap_sum[k] = tap_sum[k] + h;
            }
        }
        let om = zero_set.iter().fold(T::zero(), |acc, &k| acc + w[k] * w[k]);
        d.push(dev);
        omega.push(om);
        if plan.snapshot_iters.contains(&(i + 1)) {
            snapshots.push(TapSnapshot {
                n: i + 1,
                w: w.to_vec(),
            });
        }
    }
    let inv = T::of_count(plan.steady_window).recip();
    Ok(TrialRecord {
        trial: trial_index,
        seed: (seed, stream),
        d,
        omega,
        tap_mean: tap_sum.into_iter().map(|v| v * inv).collect(),
        snapshots,
        system,
        pnu,
    })
}

/// Runs every trial of the plan in parallel and returns them in trial order.
pub fn run_trials<T: Scalar>(plan: &TrialPlan<T>) -> Result<Vec<TrialRecord<T>>> {
    plan.validate()?;
    (0..plan.n_trials)
        .into_par_iter()
        .map(|i| run_trial(plan, i))
        .collect()
}

/// Monte-Carlo estimate of the MSD behaviour.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult<T> {
    pub msd_trajectory: MsdTrajectory<T>,
    /// Trailing-window mean of the trial-averaged `Dₙ`.
    pub steady_msd_estimate: T,
    /// Trailing-window mean of the trial-averaged `Ωₙ`.
    pub steady_omega_estimate: T,
    /// Standard error of the steady estimate across trials.
    pub steady_msd_std_error: T,
    pub trial_seeds: Vec<(u64, u64)>,
    pub steady_window: usize,
}

impl<T: Scalar> SimResult<T> {
    pub fn trials(&self) -> usize {
        self.trial_seeds.len()
    }
}

fn trailing_mean<T: Scalar>(v: &[T], window: usize) -> T {
    let tail = &v[v.len() - window..];
    tail.iter().fold(T::zero(), |a, &b| a + b) / T::of_count(window)
}

/// Pointwise mean over trials (summed in trial order) plus trailing-window steady estimates.
pub fn aggregate<T: Scalar>(
    trials: &[TrialRecord<T>],
    steady_window: usize,
) -> Result<SimResult<T>> {
    let first = trials
        .first()
        .ok_or_else(|| invalid("aggregate needs at least one trial"))?;
    let len = first.d.len();
    if steady_window == 0 || steady_window > len {
        return Err(invalid(format!(
            "steady window {steady_window} outside 1..={len}"
        )));
    }
    let zero_taps = first.system.taps() - first.system.sparsity();
    let mut d = vec![T::zero(); len];
    let mut om = vec![T::zero(); len];
    for t in trials {
        if t.d.len() != len {
            return Err(Error::InconsistentLengths(len, t.d.len()));
        }
        if t.omega.len() != len {
            return Err(Error::InconsistentLengths(len, t.omega.len()));
        }
        for i in 0..len {
            d[i] = d[i] + t.d[i];
            om[i] = om[i] + t.omega[i];
        }
    }
    let inv = T::of_count(trials.len()).recip();
    d.iter_mut().for_each(|v| *v = *v * inv);
    om.iter_mut().for_each(|v| *v = *v * inv);

    let per_trial: Vec<T> = trials
        .iter()
        .map(|t| trailing_mean(&t.d, steady_window))
        .collect();
    let steady = trailing_mean(&d, steady_window);
    let std_error = if trials.len() > 1 {
        let m = T::of_count(trials.len());
        let var = per_trial
            .iter()
            .fold(T::zero(), |a, &v| a + (v - steady) * (v - steady))
            / (m - T::one());
        (var / m).sqrt()
    } else {
        T::zero()
    };

    Ok(SimResult {
        steady_msd_estimate: steady,
        steady_omega_estimate: trailing_mean(&om, steady_window),
        steady_msd_std_error: std_error,
        msd_trajectory: MsdTrajectory::from_series(&d, &om, zero_taps, Provenance::Simulation)?,
        trial_seeds: trials.iter().map(|t| t.seed).collect(),
        steady_window,
    })
}

/// Runs and aggregates a plan.
pub fn simulate<T: Scalar>(plan: &TrialPlan<T>) -> Result<SimResult<T>> {
    aggregate(&run_trials(plan)?, plan.steady_window)
}

/// Per-tap mean and standard error (across trials) of the trailing-window mean deviation.
pub fn tap_mean_statistics<T: Scalar>(trials: &[TrialRecord<T>]) -> Vec<(f64, f64)> {
    let Some(first) = trials.first() else {
        return Vec::new();
    };
    let m = trials.len() as f64;
    (0..first.tap_mean.len())
        .map(|k| {
            let vals: Vec<f64> = trials.iter().map(|t| t.tap_mean[k].as_f64()).collect();
            let mean = vals.iter().sum::<f64>() / m;
            let se = if trials.len() > 1 {
                let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
                (var / m).sqrt()
            } else {
                0.0
            };
            (mean, se)
        })
        .collect()
}

/// Empirical and predicted values of the forgetting-window ergodicity statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Result {
    /// Mean over trials of `‖Φₙ(1−λ)/(1−λⁿ⁺¹) − R‖₂²` (spectral norm).
    pub empirical: f64,
    pub empirical_std_error: f64,
    /// Mean over trials of `‖(Φₙ(1−λ)/(1−λⁿ⁺¹) − R) e₀‖²`, the same deviation along a fixed unit direction.
    pub empirical_directional: f64,
    /// `((1−λ)/(1+λ)) (N+1) P_x²`.
    pub predicted: f64,
}

/// `((1−λ)/(1+λ)) (N+1) P_x²`.
pub fn lemma1_prediction(lambda: f64, taps: usize, px: f64) -> f64 {
    (1.0 - lambda) / (1.0 + lambda) * (taps as f64 + 1.0) * px * px
}

/// Builds `Φₙ = Σ_{m=0}^{n} λ^{n−m} x_m x_mᵀ` from independent white Gaussian
/// regressors and averages the squared spectral norm of its normalised deviation from `R = P_x I`.
pub fn lemma1_check(
    lambda: f64,
    taps: usize,
    px: f64,
    n: usize,
    n_trials: usize,
    seed: u64,
) -> Result<Lemma1Result> {
    lemma1_check_with_mode(lambda, taps, px, n, n_trials, seed, InputMode::Independent)
}

pub fn lemma1_check_with_mode(
    lambda: f64,
    taps: usize,
    px: f64,
    n: usize,
    n_trials: usize,
    seed: u64,
    mode: InputMode,
) -> Result<Lemma1Result> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(invalid(format!("lambda must lie in (0,1], got {lambda}")));
    }
    if taps == 0 || n_trials == 0 || !(px > 0.0) {
        return Err(invalid("need N >= 1, n_trials >= 1 and P_x > 0"));
    }
    let window = if lambda == 1.0 {
        (n + 1) as f64
    } else {
        (1.0 - lambda.powi(n as i32 + 1)) / (1.0 - lambda)
    };
    let samples: Vec<(f64, f64)> = (0..n_trials)
        .into_par_iter()
        .map(|trial| {
            let mut stream: InputStream<f64> =
                InputStream::new(seeded_rng(seed, trial as u64 + 1), mode, taps, px);
            let mut phi = DMatrix::<f64>::zeros(taps, taps);
            for _ in 0..=n {
                let x = stream.next_vector();
                phi *= lambda;
                for i in 0..taps {
                    for j in 0..taps {
                        phi[(i, j)] += x[i] * x[j];
                    }
                }
            }
            let mut dev = phi / window;
            for i in 0..taps {
                dev[(i, i)] -= px;
            }
            let directional = dev.column(0).norm_squared();
            let eig = SymmetricEigen::new(dev);
            let spec = eig.eigenvalues.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            (spec * spec, directional)
        })
        .collect();
    let m = n_trials as f64;
    let mean = samples.iter().map(|s| s.0).sum::<f64>() / m;
    let var = if n_trials > 1 {
        samples.iter().map(|s| (s.0 - mean).powi(2)).sum::<f64>() / (m - 1.0)
    } else {
        0.0
    };
    Ok(Lemma1Result {
        empirical: mean,
        empirical_std_error: (var / m).sqrt(),
        empirical_directional: samples.iter().map(|s| s.1).sum::<f64>() / m,
        predicted: lemma1_prediction(lambda, taps, px),
    })
}

/// Diagnostics for the tap-distribution assumptions of the steady-state analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    /// Jarque–Bera statistic of the pooled, per-tap standardised zero-tap weights.
    pub zero_tap_jarque_bera: Option<f64>,
    /// Fraction of (zero tap, sampled iteration) pairs whose Jarque–Bera p-value exceeds 0.05.
    pub zero_tap_normal_fraction: Option<f64>,
    /// Fraction of nonzero-tap samples whose weight has the sign of the true tap.
    pub sign_agreement: Option<f64>,
    /// Fraction of large-tap samples outside the attraction range.
    pub large_outside_range: Option<f64>,
    /// Fraction of zero/small-tap samples inside the attraction range.
    pub inside_range: Option<f64>,
    /// `large_outside_range` and `inside_range` combined over all taps.
    pub range_agreement: f64,
    pub sampled_iters: Vec<usize>,
    pub trials: usize,
    pub notes: Vec<String>,
}

/// Jarque–Bera statistic and its χ²₂ p-value `exp(−JB/2)`.
pub fn jarque_bera(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let m2 = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if m2 == 0.0 {
        return (f64::INFINITY, 0.0);
    }
    let m3 = samples.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
    let m4 = samples.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    let skew = m3 / m2.powf(1.5);
    let kurt = m4 / (m2 * m2);
    let jb = n / 6.0 * (skew * skew + (kurt - 3.0).powi(2) / 4.0);
    (jb, (-jb / 2.0).exp())
}

/// Default audit sample points: four iterations spread over the steady window.
pub fn default_audit_iters(n_iters: usize, steady_window: usize) -> Vec<usize> {
    let start = n_iters - steady_window + 1;
    let mut v: Vec<usize> = (0..4)
        .map(|i| start + i * (steady_window - 1) / 3)
        .collect();
    v.dedup();
    v
}

/// Runs the plan with weight snapshots and reports how well the zero-tap
/// Gaussianity, sign and attraction-range assumptions hold.
pub fn assumption_audit<T: Scalar>(plan: &TrialPlan<T>) -> Result<AuditReport> {
    let mut plan = plan.clone();
    if plan.snapshot_iters.is_empty() {
        plan.snapshot_iters = default_audit_iters(plan.n_iters, plan.steady_window);
    }
    plan.validate()?;
    let trials = run_trials(&plan)?;
    audit_trials(&trials, plan.config.beta.as_f64(), &plan.snapshot_iters)
}

/// Audit over already-recorded trials (each must carry the same snapshot iterations).
pub fn audit_trials<T: Scalar>(
    trials: &[TrialRecord<T>],
    beta: f64,
    iters: &[usize],
) -> Result<AuditReport> {
    if trials.is_empty() {
        return Err(invalid("audit needs at least one trial"));
    }
    let inv_beta = 1.0 / beta;
    let mut notes = Vec::new();
    let (mut sign_hits, mut sign_total) = (0usize, 0usize);
    let (mut large_hits, mut large_total) = (0usize, 0usize);
    let (mut inside_hits, mut inside_total) = (0usize, 0usize);
    let mut pooled = Vec::new();
    let (mut normal_hits, mut normal_total) = (0usize, 0usize);

    for (si, &n) in iters.iter().enumerate() {
        let mut zero_cols: Vec<Vec<f64>> = Vec::new();
        for t in trials {
            let snap = t.snapshots.get(si).filter(|s| s.n == n).ok_or_else(|| {
                invalid(format!(
                    "trial {} has no snapshot at iteration {n}",
                    t.trial
                ))
            })?;
            let s: Vec<f64> = t.system.coefficients().iter().map(|v| v.as_f64()).collect();
            let part = crate::sysmodel::partition_system(&s, beta);
            if zero_cols.is_empty() {
                zero_cols = vec![Vec::new(); part.zero.len()];
            }
            for (col, &k) in part.zero.iter().enumerate() {
                let w = snap.w[k].as_f64();
                if let Some(c) = zero_cols.get_mut(col) {
                    c.push(w);
                }
                inside_total += 1;
                inside_hits += usize::from(w.abs() <= inv_beta);
            }
            for k in part.nonzero() {
                let w = snap.w[k].as_f64();
                sign_total += 1;
                sign_hits += usize::from(w.signum() == s[k].signum() && w != 0.0);
            }
            for &k in &part.large {
                large_total += 1;
                large_hits += usize::from(snap.w[k].as_f64().abs() > inv_beta);
            }
            for &k in &part.small {
                inside_total += 1;
                inside_hits += usize::from(snap.w[k].as_f64().abs() <= inv_beta);
            }
        }
        if trials.len() >= 8 {
            for col in &zero_cols {
                let (_, p) = jarque_bera(col);
                normal_total += 1;
                normal_hits += usize::from(p > 0.05);
                let m = col.iter().sum::<f64>() / col.len() as f64;
                let sd =
                    (col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / col.len() as f64).sqrt();
                if sd > 0.0 {
                    pooled.extend(col.iter().map(|v| (v - m) / sd));
                }
            }
        }
    }

    let frac = |hits: usize, total: usize| (total > 0).then(|| hits as f64 / total as f64);
    if sign_total == 0 {
        notes.push("no nonzero taps: sign and large/small range checks are vacuous".to_string());
    }
    if normal_total == 0 {
        notes.push("normality check skipped (no zero taps or fewer than 8 trials)".to_string());
    }
    let range_total = large_total + inside_total;
    Ok(AuditReport {
        zero_tap_jarque_bera: (!pooled.is_empty()).then(|| jarque_bera(&pooled).0),
        zero_tap_normal_fraction: frac(normal_hits, normal_total),
        sign_agreement: frac(sign_hits, sign_total),
        large_outside_range: frac(large_hits, large_total),
        inside_range: frac(inside_hits, inside_total),
        range_agreement: if range_total > 0 {
            (large_hits + inside_hits) as f64 / range_total as f64
        } else {
            1.0
        },
        sampled_iters: iters.to_vec(),
        trials: trials.len(),
        notes,
    })
}
