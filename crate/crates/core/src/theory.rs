//! Closed-form analysis of l0-RLS under white Gaussian input.
//!
//! Notation follows the usual steady-state analysis: `Dₙ = E‖hₙ‖²` is the
//! mean square deviation, `Ωₙ` the part of it carried by the zero taps and
//! `ωₙ² = Ωₙ/(N−K)` the per-zero-tap power. `θ = βκ(1−λ)/P_x` is the
//! normalised attraction strength every steady-state quantity depends on.

use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::filter::zero_attractor;
use crate::scalar::Scalar;
use crate::sysmodel::SparseSystem;

fn lambda_pow<T: Scalar>(lambda: T, n: u64) -> T {
    if n <= i32::MAX as u64 {
        lambda.powi(n as i32)
    } else {
        lambda.powf(T::of(n as f64))
    }
}

/// `ηₙ = λ(1−λⁿ)/(1−λⁿ⁺¹)`.
pub fn coeff_eta<T: Scalar>(n: u64, lambda: T) -> T {
    let one = T::one();
    lambda * (one - lambda_pow(lambda, n)) / (one - lambda_pow(lambda, n + 1))
}

/// `ρₙ = (κ/P_x)(1−λ)/(1−λⁿ⁺¹)`.
pub fn coeff_rho<T: Scalar>(n: u64, lambda: T, kappa: T, px: T) -> T {
    let one = T::one();
    kappa / px * (one - lambda) / (one - lambda_pow(lambda, n + 1))
}

/// `cₙ = λⁿ(1−λ)/(1−λⁿ⁺¹)`, the product `η₁⋯ηₙ`.
pub fn coeff_c<T: Scalar>(n: u64, lambda: T) -> T {
    let one = T::one();
    lambda_pow(lambda, n) * (one - lambda) / (one - lambda_pow(lambda, n + 1))
}

/// `dₙ = (κ/P_x)(1−λⁿ)/(1−λⁿ⁺¹)`.
pub fn coeff_d<T: Scalar>(n: u64, lambda: T, kappa: T, px: T) -> T {
    let one = T::one();
    kappa / px * (one - lambda_pow(lambda, n)) / (one - lambda_pow(lambda, n + 1))
}

/// Large-λ approximation of the per-tap gain power, `pₙ² = (1−λ)²/(λ²(1−λⁿ)²P_x)`.
pub fn gain_power<T: Scalar>(n: u64, lambda: T, px: T) -> T {
    let one = T::one();
    let q = (one - lambda) / (lambda * (one - lambda_pow(lambda, n)));
    q * q / px
}

/// `p∞² = (1−λ)²/(λ²P_x)`.
pub fn gain_power_limit<T: Scalar>(lambda: T, px: T) -> T {
    let q = (T::one() - lambda) / lambda;
    q * q / px
}

/// Scalars shared by all theory formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryCoeffs<T> {
    pub lambda: T,
    pub kappa: T,
    pub beta: T,
    pub px: T,
    pub taps: usize,
    pub sparsity: usize,
    /// `θ = βκ(1−λ)/P_x`.
    pub theta: T,
    /// `p∞²`.
    pub p_inf_sq: T,
    /// `a² = λP_x/(1−λ)`.
    pub a_sq: T,
}

impl<T: Scalar> TheoryCoeffs<T> {
    pub fn new(lambda: T, kappa: T, beta: T, px: T, taps: usize, sparsity: usize) -> Result<Self> {
        if !(lambda > T::zero() && lambda < T::one()) {
            return Err(invalid(format!("lambda must lie in (0,1), got {lambda}")));
        }
        if !(beta > T::zero()) || !beta.is_finite() {
            return Err(invalid(format!("beta must be positive, got {beta}")));
        }
        if !(kappa >= T::zero()) || !kappa.is_finite() {
            return Err(invalid(format!("kappa must be non-negative, got {kappa}")));
        }
        if !(px > T::zero()) || !px.is_finite() {
            return Err(invalid(format!("input power must be positive, got {px}")));
        }
        if taps == 0 || sparsity > taps {
            return Err(invalid(format!(
                "need 0 <= K <= N and N >= 1, got N={taps}, K={sparsity}"
            )));
        }
        let one = T::one();
        Ok(Self {
            lambda,
            kappa,
            beta,
            px,
            taps,
            sparsity,
            theta: beta * kappa * (one - lambda) / px,
            p_inf_sq: gain_power_limit(lambda, px),
            a_sq: lambda * px / (one - lambda),
        })
    }

    pub fn with_kappa(&self, kappa: T) -> Result<Self> {
        Self::new(
            self.lambda,
            kappa,
            self.beta,
            self.px,
            self.taps,
            self.sparsity,
        )
    }

    pub fn with_beta(&self, beta: T) -> Result<Self> {
        Self::new(
            self.lambda,
            self.kappa,
            beta,
            self.px,
            self.taps,
            self.sparsity,
        )
    }

    /// Inverse of the `θ` map at this `β`, `λ`, `P_x`.
    pub fn kappa_for_theta(&self, theta: T) -> T {
        theta * self.px / (self.beta * (T::one() - self.lambda))
    }

    pub fn zero_taps(&self) -> usize {
        self.taps - self.sparsity
    }

    pub fn eta(&self, n: u64) -> T {
        coeff_eta(n, self.lambda)
    }

    pub fn rho(&self, n: u64) -> T {
        coeff_rho(n, self.lambda, self.kappa, self.px)
    }

    pub fn c(&self, n: u64) -> T {
        coeff_c(n, self.lambda)
    }

    pub fn d(&self, n: u64) -> T {
        coeff_d(n, self.lambda, self.kappa, self.px)
    }

    pub fn p_sq(&self, n: u64) -> T {
        gain_power(n, self.lambda, self.px)
    }

    /// `aₙ² = (1−λⁿ)a²`.
    pub fn a_n_sq(&self, n: u64) -> T {
        (T::one() - lambda_pow(self.lambda, n)) * self.a_sq
    }

    pub fn rho_inf(&self) -> T {
        self.kappa * (T::one() - self.lambda) / self.px
    }

    pub fn d_inf(&self) -> T {
        self.kappa / self.px
    }
}

/// Mean deviation `E h_{k,n}` per tap: `cₙ E h_{k,0} + dₙ g(s_k)` on the small set,
/// `cₙ E h_{k,0}` elsewhere.
pub fn mean_deviation<T: Scalar>(
    n: u64,
    system: &SparseSystem<T>,
    coeffs: &TheoryCoeffs<T>,
    h0_mean: &[T],
) -> Result<Vec<T>> {
    if h0_mean.len() != system.taps() {
        return Err(Error::Dimension {
            expected: system.taps(),
            got: h0_mean.len(),
        });
    }
    let part = system.partition(coeffs.beta);
    let (c, d) = (coeffs.c(n), coeffs.d(n));
    let mut out: Vec<T> = h0_mean.iter().map(|&h| c * h).collect();
    for &k in &part.small {
        out[k] = out[k] + d * zero_attractor(system.coefficients()[k], coeffs.beta)?;
    }
    Ok(out)
}

/// `n → ∞` limit of [`mean_deviation`]: `(κ/P_x) g(s_k)` on the small set, zero elsewhere.
pub fn mean_deviation_limit<T: Scalar>(
    system: &SparseSystem<T>,
    coeffs: &TheoryCoeffs<T>,
) -> Result<Vec<T>> {
    let part = system.partition(coeffs.beta);
    let mut out = vec![T::zero(); system.taps()];
    for &k in &part.small {
        out[k] = coeffs.d_inf() * zero_attractor(system.coefficients()[k], coeffs.beta)?;
    }
    Ok(out)
}

/// Steady-state per-zero-tap deviation `ω∞`.
pub fn omega_infinity<T: Scalar>(theta: T, lambda: T, pnu: T, p_inf_sq: T) -> T {
    let one = T::one();
    let two = T::of(2.0);
    let pi = T::PI();
    let l2 = lambda * lambda;
    let disc = two * l2 * theta * theta / pi + (one - l2) * (theta * theta + pnu * p_inf_sq);
    let num = -two * lambda * theta / (two * pi).sqrt() + disc.sqrt();
    (num / (one - l2)).max(T::zero())
}

/// `N P_ν p∞² / (1−λ²)`: steady-state MSD of conventional RLS.
pub fn rls_baseline<T: Scalar>(taps: usize, pnu: T, p_inf_sq: T, lambda: T) -> T {
    T::of_count(taps) * pnu * p_inf_sq / (T::one() - lambda * lambda)
}

/// Where an [`MsdTrajectory`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Model,
    Simulation,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Model => "model",
            Provenance::Simulation => "simulation",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MsdPoint<T> {
    pub n: u64,
    /// `Dₙ`.
    pub d: T,
    /// `Ωₙ`.
    pub omega: T,
    /// `ωₙ = √(Ωₙ/(N−K))`, zero when there are no zero taps.
    pub omega_small: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MsdTrajectory<T> {
    pub points: Vec<MsdPoint<T>>,
    pub provenance: Provenance,
}

impl<T: Scalar> MsdTrajectory<T> {
    pub fn from_series(
        d: &[T],
        omega: &[T],
        zero_taps: usize,
        provenance: Provenance,
    ) -> Result<Self> {
        if d.len() != omega.len() {
            return Err(Error::InconsistentLengths(d.len(), omega.len()));
        }
        let points = d
            .iter()
            .zip(omega)
            .enumerate()
            .map(|(i, (&d, &om))| MsdPoint {
                n: i as u64 + 1,
                d,
                omega: om,
                omega_small: per_tap(om, zero_taps),
            })
            .collect();
        Ok(Self { points, provenance })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Option<&MsdPoint<T>> {
        self.points.last()
    }

    pub fn d_values(&self) -> Vec<T> {
        self.points.iter().map(|p| p.d).collect()
    }

    pub fn omega_values(&self) -> Vec<T> {
        self.points.iter().map(|p| p.omega).collect()
    }
}

fn per_tap<T: Scalar>(omega: T, zero_taps: usize) -> T {
    if zero_taps == 0 {
        T::zero()
    } else {
        (omega / T::of_count(zero_taps)).max(T::zero()).sqrt()
    }
}

/// Linearised two-state model `[Dₙ; Ωₙ] = Aₙ [Dₙ₋₁; Ωₙ₋₁] + bₙ`, linearised around `ω∞`.
/// It is a large-`n` model; early iterations are only indicative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MsdModel<T> {
    pub coeffs: TheoryCoeffs<T>,
    pub pnu: T,
    /// `G = Σ_{small} g²(s_k)`.
    pub g: T,
    /// `G′ = Σ_{small} s_k g(s_k)`.
    pub gp: T,
    pub omega_inf: T,
}

impl<T: Scalar> MsdModel<T> {
    pub fn new(coeffs: TheoryCoeffs<T>, g: T, gp: T, pnu: T) -> Result<Self> {
        if !(pnu >= T::zero()) {
            return Err(invalid(format!(
                "noise power must be non-negative, got {pnu}"
            )));
        }
        Ok(Self {
            omega_inf: omega_infinity(coeffs.theta, coeffs.lambda, pnu, coeffs.p_inf_sq),
            coeffs,
            pnu,
            g,
            gp,
        })
    }

    pub fn for_system(coeffs: TheoryCoeffs<T>, system: &SparseSystem<T>, pnu: T) -> Result<Self> {
        let (g, gp) = system.small_set_attraction(coeffs.beta);
        Self::new(coeffs, g, gp, pnu)
    }

    // 2βρₙηₙ/√(2πω∞²); zero without attraction.
    fn zero_tap_slope(&self, n: u64) -> T {
        let rho = self.coeffs.rho(n);
        if rho == T::zero() || self.coeffs.zero_taps() == 0 {
            return T::zero();
        }
        let two = T::of(2.0);
        let denom = (two * T::PI()).sqrt() * self.omega_inf;
        two * self.coeffs.beta * rho * self.coeffs.eta(n) / denom
    }

    /// `Aₙ` as `[[a11, a12], [a21, a22]]`.
    pub fn transition(&self, n: u64) -> [[T; 2]; 2] {
        let eta = self.coeffs.eta(n);
        let slope = self.zero_tap_slope(n);
        [[eta * eta, -slope], [T::zero(), eta * eta - slope]]
    }

    /// `(bₙ(1), bₙ(2))`.
    pub fn forcing(&self, n: u64) -> (T, T) {
        let c = &self.coeffs;
        let two = T::of(2.0);
        let (eta, rho, cn, dn, p2) = (c.eta(n), c.rho(n), c.c(n), c.d(n), c.p_sq(n));
        let zero_taps = T::of_count(c.zero_taps());
        let attraction_pull = if c.zero_taps() == 0 {
            T::zero()
        } else {
            self.zero_tap_slope(n) * zero_taps * self.omega_inf * self.omega_inf
        };
        let beta_rho_sq = c.beta * c.beta * rho * rho;
        let b1 = T::of_count(c.taps) * self.pnu * p2 + zero_taps * beta_rho_sq
            - attraction_pull
            - two * rho * cn * eta * self.gp
            + (two * rho * dn * eta + rho * rho) * self.g;
        let b2 = zero_taps * (self.pnu * p2 + beta_rho_sq) - attraction_pull;
        (b1, b2)
    }

    /// One model step from `(Dₙ₋₁, Ωₙ₋₁)` to `(Dₙ, Ωₙ)`. Without zero taps `Ω` stays 0.
    pub fn step(&self, n: u64, d_prev: T, omega_prev: T) -> (T, T) {
        let a = self.transition(n);
        let (b1, b2) = self.forcing(n);
        let d = a[0][0] * d_prev + a[0][1] * omega_prev + b1;
        if self.coeffs.zero_taps() == 0 {
            return (d, T::zero());
        }
        (d, a[1][1] * omega_prev + b2)
    }

    /// Runs the model for `n_iters` steps starting from `(D₀, Ω₀)`.
    pub fn trajectory(&self, d0: T, omega0: T, n_iters: usize) -> MsdTrajectory<T> {
        let zero_taps = self.coeffs.zero_taps();
        let (mut d, mut om) = (d0, omega0);
        let points = (1..=n_iters as u64)
            .map(|n| {
                (d, om) = self.step(n, d, om);
                MsdPoint {
                    n,
                    d,
                    omega: om,
                    omega_small: per_tap(om, zero_taps),
                }
            })
            .collect();
        MsdTrajectory {
            points,
            provenance: Provenance::Model,
        }
    }

    /// Model trajectory from `w₀ = 0`: `D₀ = ‖s‖²`, `Ω₀ = 0`.
    pub fn trajectory_from_zero(
        &self,
        system: &SparseSystem<T>,
        n_iters: usize,
    ) -> MsdTrajectory<T> {
        self.trajectory(system.norm_sq(), T::zero(), n_iters)
    }

    /// `(D, Ω)` after iterating `n_iters` steps from the given start.
    pub fn iterate(&self, d0: T, omega0: T, n_iters: u64) -> (T, T) {
        let (mut d, mut om) = (d0, omega0);
        for n in 1..=n_iters {
            (d, om) = self.step(n, d, om);
        }
        (d, om)
    }
}

/// Steady-state shape constants `β₁, β₂, β₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyBetas<T> {
    pub beta1: T,
    pub beta2: T,
    pub beta3: T,
}

impl<T: Scalar> SteadyBetas<T> {
    fn check_ordered(&self) -> Result<()> {
        if self.beta1 > self.beta2 {
            Ok(())
        } else {
            Err(Error::UnboundedImprovement {
                beta1: self.beta1.as_f64(),
                beta2: self.beta2.as_f64(),
            })
        }
    }
}

/// `β₁, β₂, β₃` for the given coefficients, small-set statistic `G` and noise power.
pub fn steady_betas<T: Scalar>(coeffs: &TheoryCoeffs<T>, g: T, pnu: T) -> SteadyBetas<T> {
    let one = T::one();
    let two = T::of(2.0);
    let four = T::of(4.0);
    let pi = T::PI();
    let l = coeffs.lambda;
    let l2 = l * l;
    let q = one - l2;
    let zero_taps = T::of_count(coeffs.zero_taps());
    let b = coeffs.beta;
    let beta1 =
        zero_taps / q + g / (b * b * (one - l) * (one - l)) + four * l2 * zero_taps / (pi * q * q);
    let beta2 = four * l * zero_taps / ((two * pi).sqrt() * q * q) * (two * l2 / pi + q).sqrt();
    let beta3 = pnu * coeffs.p_inf_sq / (two * l2 / (pi * q) + one);
    SteadyBetas {
        beta1,
        beta2,
        beta3,
    }
}

/// `D∞ = N P_ν p∞²/(1−λ²) + β₁θ² − β₂θ√(θ² + β₃)`.
pub fn steady_msd<T: Scalar>(
    theta: T,
    betas: &SteadyBetas<T>,
    taps: usize,
    pnu: T,
    p_inf_sq: T,
    lambda: T,
) -> T {
    rls_baseline(taps, pnu, p_inf_sq, lambda) + excess_msd(theta, betas)
}

/// The attraction-induced part `β₁θ² − β₂θ√(θ² + β₃)`; negative means l0-RLS beats RLS.
pub fn excess_msd<T: Scalar>(theta: T, betas: &SteadyBetas<T>) -> T {
    betas.beta1 * theta * theta - betas.beta2 * theta * (theta * theta + betas.beta3).sqrt()
}

/// Upper end of the improving interval `0 < θ < √(β₂²β₃/(β₁²−β₂²))`.
/// Without zero taps (`β₂ = 0`) the interval is empty and 0 is returned.
pub fn theta_upper_bound<T: Scalar>(betas: &SteadyBetas<T>) -> Result<T> {
    if betas.beta2 == T::zero() && betas.beta1 >= T::zero() {
        return Ok(T::zero());
    }
    betas.check_ordered()?;
    let (b1, b2) = (betas.beta1, betas.beta2);
    Ok((b2 * b2 * betas.beta3 / ((b1 - b2) * (b1 + b2))).sqrt())
}

/// `κ_max` corresponding to [`theta_upper_bound`].
pub fn kappa_upper_bound<T: Scalar>(betas: &SteadyBetas<T>, coeffs: &TheoryCoeffs<T>) -> Result<T> {
    Ok(coeffs.kappa_for_theta(theta_upper_bound(betas)?))
}

/// Minimiser of the steady-state MSD over `θ`.
pub fn theta_opt<T: Scalar>(betas: &SteadyBetas<T>) -> Result<T> {
    betas.check_ordered()?;
    let (b1, b2) = (betas.beta1, betas.beta2);
    let quarter = T::of(0.25);
    let r = ((b1 + b2) / (b1 - b2)).powf(quarter);
    Ok(betas.beta3.sqrt() / T::of(2.0) * (r - r.recip()))
}

pub fn kappa_opt<T: Scalar>(betas: &SteadyBetas<T>, coeffs: &TheoryCoeffs<T>) -> Result<T> {
    Ok(coeffs.kappa_for_theta(theta_opt(betas)?))
}

/// Minimum steady-state MSD `N P_ν p∞²/(1−λ²) + (β₃/2)(√(β₁²−β₂²) − β₁)`.
pub fn min_msd<T: Scalar>(
    betas: &SteadyBetas<T>,
    taps: usize,
    pnu: T,
    p_inf_sq: T,
    lambda: T,
) -> Result<T> {
    betas.check_ordered()?;
    let (b1, b2) = (betas.beta1, betas.beta2);
    // (√(β₁²−β₂²) − β₁) rewritten as −β₂²/(√(β₁²−β₂²) + β₁) to avoid cancellation.
    let root = ((b1 - b2) * (b1 + b2)).sqrt();
    let gain = -b2 * b2 / (root + b1);
    Ok(rls_baseline(taps, pnu, p_inf_sq, lambda) + betas.beta3 / T::of(2.0) * gain)
}

/// `β → ∞` limit of `D∞^min / D_RLS`: `(π(1−λ²) + 2(K/N)λ²)/(π(1−λ²) + 2λ²)`.
pub fn min_msd_ratio_limit<T: Scalar>(lambda: T, sparsity: usize, taps: usize) -> T {
    let pi = T::PI();
    let two = T::of(2.0);
    let l2 = lambda * lambda;
    let q = pi * (T::one() - l2);
    let frac = T::of_count(sparsity) / T::of_count(taps);
    (q + two * frac * l2) / (q + two * l2)
}

/// Steady-state summary of one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyAnalysis<T> {
    pub coeffs: TheoryCoeffs<T>,
    pub pnu: T,
    pub g: T,
    pub betas: SteadyBetas<T>,
    /// Conventional RLS steady-state MSD.
    pub baseline: T,
}

impl<T: Scalar> SteadyAnalysis<T> {
    pub fn new(coeffs: TheoryCoeffs<T>, g: T, pnu: T) -> Self {
        Self {
            betas: steady_betas(&coeffs, g, pnu),
            baseline: rls_baseline(coeffs.taps, pnu, coeffs.p_inf_sq, coeffs.lambda),
            coeffs,
            pnu,
            g,
        }
    }

    pub fn for_system(coeffs: TheoryCoeffs<T>, system: &SparseSystem<T>, pnu: T) -> Self {
        let (g, _) = system.small_set_attraction(coeffs.beta);
        Self::new(coeffs, g, pnu)
    }

    pub fn msd_at_theta(&self, theta: T) -> T {
        self.baseline + excess_msd(theta, &self.betas)
    }

    pub fn msd_at_kappa(&self, kappa: T) -> T {
        let theta = self.coeffs.beta * kappa * (T::one() - self.coeffs.lambda) / self.coeffs.px;
        self.msd_at_theta(theta)
    }

    pub fn theta_max(&self) -> Result<T> {
        theta_upper_bound(&self.betas)
    }

    pub fn kappa_max(&self) -> Result<T> {
        kappa_upper_bound(&self.betas, &self.coeffs)
    }

    pub fn theta_opt(&self) -> Result<T> {
        theta_opt(&self.betas)
    }

    pub fn kappa_opt(&self) -> Result<T> {
        kappa_opt(&self.betas, &self.coeffs)
    }

    pub fn min_msd(&self) -> Result<T> {
        min_msd(
            &self.betas,
            self.coeffs.taps,
            self.pnu,
            self.coeffs.p_inf_sq,
            self.coeffs.lambda,
        )
    }
}

/// Parameter grid for the monotonicity audit of the minimum steady-state MSD.
#[derive(Debug, Clone)]
pub struct MonotonicityGrid<T> {
    pub lambda: T,
    pub px: T,
    pub pnu: T,
    pub taps: usize,
    pub beta: T,
    /// Sparsity used by the `G` sweep.
    pub sparsity: usize,
    /// `G` used by the `K` sweep.
    pub g: T,
    pub g_values: Vec<T>,
    pub k_values: Vec<usize>,
    pub beta_values: Vec<T>,
    /// System whose `G(β)` is recomputed along the `β` sweep; `G` is held fixed when absent.
    pub system: Option<SparseSystem<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub parameter: &'static str,
    pub index: usize,
    pub previous: f64,
    pub current: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MonotonicityReport {
    pub comparisons: usize,
    pub violations: Vec<Violation>,
}

impl MonotonicityReport {
    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `D∞^min` is nondecreasing in `G` and in `K` and nonincreasing in `β`.
pub fn msd_min_monotonicity_check<T: Scalar>(
    grid: &MonotonicityGrid<T>,
) -> Result<MonotonicityReport> {
    let min_for = |k: usize, beta: T, g: T| -> Result<T> {
        let coeffs = TheoryCoeffs::new(grid.lambda, T::zero(), beta, grid.px, grid.taps, k)?;
        SteadyAnalysis::new(coeffs, g, grid.pnu).min_msd()
    };
    let mut report = MonotonicityReport::default();
    let mut scan = |name: &'static str, values: Vec<T>, increasing: bool| {
        for (i, pair) in values.windows(2).enumerate() {
            report.comparisons += 1;
            let ok = if increasing {
                pair[1] >= pair[0]
            } else {
                pair[1] <= pair[0]
            };
            if !ok {
                report.violations.push(Violation {
                    parameter: name,
                    index: i + 1,
                    previous: pair[0].as_f64(),
                    current: pair[1].as_f64(),
                });
            }
        }
    };

    let by_g = grid
        .g_values
        .iter()
        .map(|&g| min_for(grid.sparsity, grid.beta, g))
        .collect::<Result<Vec<_>>>()?;
    scan("G", by_g, true);

    let by_k = grid
        .k_values
        .iter()
        // K = N has no zero taps and no improvement interval; the minimum is the baseline.
        .map(|&k| match min_for(k, grid.beta, grid.g) {
            Err(Error::UnboundedImprovement { .. }) if k == grid.taps => Ok(rls_baseline(
                grid.taps,
                grid.pnu,
                gain_power_limit(grid.lambda, grid.px),
                grid.lambda,
            )),
            other => other,
        })
        .collect::<Result<Vec<_>>>()?;
    scan("K", by_k, true);

    let by_beta = grid
        .beta_values
        .iter()
        .map(|&b| {
            let (k, g) = match &grid.system {
                Some(sys) => (sys.sparsity(), sys.small_set_attraction(b).0),
                None => (grid.sparsity, grid.g),
            };
            min_for(k, b, g)
        })
        .collect::<Result<Vec<_>>>()?;
    scan("beta", by_beta, false);

    Ok(report)
}
