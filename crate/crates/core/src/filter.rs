//! Conventional RLS and l0-RLS per-sample recursions.
//!
//! One step of the l0-RLS filter, given the input regressor `x` and the
//! observed output `y`:
//!
//! ```text
//! ξ  = y − w_{n−1}ᵀ x
//! k  = P_{n−1} x / (λ + xᵀ P_{n−1} x)
//! P  = λ⁻¹ (I − k xᵀ) P_{n−1}
//! w  = w_{n−1} + k ξ + κ P g(w_{n−1})
//! ```
//!
//! The attraction term is applied with the *updated* `P` while the gain is
//! built from the previous one. `g` is the zero-point attractor
//! `β² t − β sgn(t)` on `|t| ≤ 1/β` and zero elsewhere. Setting `κ = 0`
//! gives conventional exponentially weighted RLS.

use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, SquareMatrix};
use crate::scalar::{signum0, Scalar};

/// Static parameters of an (l0-)RLS filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig<T> {
    /// Number of taps `N`.
    pub taps: usize,
    /// Forgetting factor `λ ∈ (0, 1)`.
    pub lambda: T,
    /// Attraction strength `κ ≥ 0`; relates to the penalty weight as `κ = γ(1 − λ)`.
    pub kappa: T,
    /// Attractor steepness `β > 0`; the attraction range is `(−1/β, 1/β)`.
    pub beta: T,
    /// Initial regularisation `δ > 0`, `P₀ = δ⁻¹ I`.
    pub delta_init: T,
}

impl<T: Scalar> FilterConfig<T> {
    pub fn new(taps: usize, lambda: T, kappa: T, beta: T, delta_init: T) -> Result<Self> {
        let cfg = Self {
            taps,
            lambda,
            kappa,
            beta,
            delta_init,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Conventional RLS (`κ = 0`). `β` is irrelevant and set to 1.
    pub fn rls(taps: usize, lambda: T, delta_init: T) -> Result<Self> {
        Self::new(taps, lambda, T::zero(), T::one(), delta_init)
    }

    /// Builds the config from the penalty weight `γ` instead of `κ`.
    pub fn from_gamma(taps: usize, lambda: T, gamma: T, beta: T, delta_init: T) -> Result<Self> {
        Self::new(taps, lambda, gamma * (T::one() - lambda), beta, delta_init)
    }

    pub fn gamma(&self) -> T {
        self.kappa / (T::one() - self.lambda)
    }

    pub fn validate(&self) -> Result<()> {
        if self.taps == 0 {
            return Err(invalid("filter length must be at least 1"));
        }
        if !(self.lambda > T::zero() && self.lambda < T::one()) {
            return Err(invalid(format!(
                "lambda must lie in (0,1), got {}",
                self.lambda
            )));
        }
        if !(self.beta > T::zero()) || !self.beta.is_finite() {
            return Err(invalid(format!("beta must be positive, got {}", self.beta)));
        }
        if !(self.kappa >= T::zero()) || !self.kappa.is_finite() {
            return Err(invalid(format!(
                "kappa must be non-negative, got {}",
                self.kappa
            )));
        }
        if !(self.delta_init > T::zero()) || !self.delta_init.is_finite() {
            return Err(invalid(format!(
                "delta_init must be positive, got {}",
                self.delta_init
            )));
        }
        Ok(())
    }

    pub fn is_conventional(&self) -> bool {
        self.kappa == T::zero()
    }
}

/// Mutable filter state: weight estimate `w`, inverse correlation matrix `P` and step count.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterState<T> {
    w: Vec<T>,
    p: SquareMatrix<T>,
    n: u64,
}

impl<T: Scalar> FilterState<T> {
    /// `w₀ = 0`, `P₀ = δ⁻¹ I`.
    pub fn new(config: &FilterConfig<T>) -> Self {
        Self {
            w: vec![T::zero(); config.taps],
            p: SquareMatrix::scaled_identity(config.taps, config.delta_init.recip()),
            n: 0,
        }
    }

    pub fn with_weights(config: &FilterConfig<T>, w0: Vec<T>) -> Result<Self> {
        if w0.len() != config.taps {
            return Err(Error::Dimension {
                expected: config.taps,
                got: w0.len(),
            });
        }
        Ok(Self {
            w: w0,
            ..Self::new(config)
        })
    }

    pub fn from_parts(w: Vec<T>, p: SquareMatrix<T>, n: u64) -> Result<Self> {
        if p.dim() != w.len() {
            return Err(Error::Dimension {
                expected: w.len(),
                got: p.dim(),
            });
        }
        Ok(Self { w, p, n })
    }

    pub fn weights(&self) -> &[T] {
        &self.w
    }

    pub fn inverse_correlation(&self) -> &SquareMatrix<T> {
        &self.p
    }

    pub fn iteration(&self) -> u64 {
        self.n
    }

    pub fn taps(&self) -> usize {
        self.w.len()
    }

    /// `‖w − s‖²`.
    pub fn deviation_sq(&self, reference: &[T]) -> T {
        self.w
            .iter()
            .zip(reference)
            .fold(T::zero(), |acc, (&w, &s)| acc + (w - s) * (w - s))
    }
}

/// Diagnostics of a single update.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<T> {
    /// A-priori error `ξ = y − w_{n−1}ᵀ x`.
    pub xi: T,
    /// Gain vector.
    pub k: Vec<T>,
    /// `‖w_n − s‖²` when a reference system was supplied.
    pub h_sq: Option<T>,
}

/// Zero-point attractor `g(t)`; the boundary `|t| = 1/β` belongs to the
/// attraction branch (its value is 0 there) and `sgn(0) = 0`.
pub fn zero_attractor<T: Scalar>(t: T, beta: T) -> Result<T> {
    if !t.is_finite() {
        return Err(Error::NonFinite("zero attractor input"));
    }
    Ok(attract(t, beta))
}

#[inline]
fn attract<T: Scalar>(t: T, beta: T) -> T {
    if t.abs() * beta <= T::one() {
        beta * beta * t - beta * signum0(t)
    } else {
        T::zero()
    }
}

pub fn zero_attractor_vec<T: Scalar>(w: &[T], beta: T) -> Result<Vec<T>> {
    w.iter().map(|&t| zero_attractor(t, beta)).collect()
}

/// `k = P x / (λ + xᵀ P x)`.
pub fn gain_vector<T: Scalar>(state: &FilterState<T>, x: &[T], lambda: T) -> Result<Vec<T>> {
    check_len(state.taps(), x.len())?;
    let px = state.p.mul_vec(x);
    gain_from_px(&px, x, lambda)
}

fn gain_from_px<T: Scalar>(px: &[T], x: &[T], lambda: T) -> Result<Vec<T>> {
    let denom = lambda + dot(x, px);
    if !(denom > T::zero()) {
        return Err(Error::NotPositiveDefinite(denom.as_f64()));
    }
    let inv = denom.recip();
    Ok(px.iter().map(|&v| v * inv).collect())
}

/// Riccati update `P ← λ⁻¹ (I − k xᵀ) P`, re-symmetrised.
pub fn riccati_update<T: Scalar>(
    p: &SquareMatrix<T>,
    k: &[T],
    x: &[T],
    lambda: T,
) -> Result<SquareMatrix<T>> {
    check_len(p.dim(), x.len())?;
    check_len(p.dim(), k.len())?;
    let xt_p = p.vec_mul(x);
    let mut next = p.clone();
    apply_riccati(&mut next, k, &xt_p, lambda)?;
    Ok(next)
}

// `P ← (P − k (xᵀP)) / λ`; `xᵀP` is supplied by the caller.
fn apply_riccati<T: Scalar>(p: &mut SquareMatrix<T>, k: &[T], xt_p: &[T], lambda: T) -> Result<()> {
    p.rank_one_update_scaled(k, xt_p, lambda.recip());
    p.symmetrize();
    if !p.is_finite() {
        return Err(Error::NonFinite("inverse correlation matrix"));
    }
    Ok(())
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension { expected, got });
    }
    Ok(())
}

fn check_inputs<T: Scalar>(state: &FilterState<T>, x: &[T], y: T) -> Result<()> {
    check_len(state.taps(), x.len())?;
    if !y.is_finite() {
        return Err(Error::NonFinite("desired output"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("input regressor"));
    }
    Ok(())
}

fn step_impl<T: Scalar>(
    config: &FilterConfig<T>,
    state: &mut FilterState<T>,
    x: &[T],
    y: T,
    attract_taps: bool,
    reference: Option<&[T]>,
) -> Result<StepRecord<T>> {
    check_inputs(state, x, y)?;
    if let Some(s) = reference {
        check_len(state.taps(), s.len())?;
    }
    let xi = y - dot(&state.w, x);
    // P is kept exactly symmetric, so P x doubles as (xᵀ P)ᵀ.
    let px = state.p.mul_vec(x);
    let k = gain_from_px(&px, x, config.lambda)?;

    let attraction = if attract_taps && config.kappa != T::zero() {
        let g = zero_attractor_vec(&state.w, config.beta)?;
        g.iter().any(|&v| v != T::zero()).then_some(g)
    } else {
        None
    };

    apply_riccati(&mut state.p, &k, &px, config.lambda)?;

    for (w, &kk) in state.w.iter_mut().zip(&k) {
        *w = *w + kk * xi;
    }
    if let Some(g) = attraction {
        let pg = state.p.mul_vec(&g);
        for (w, v) in state.w.iter_mut().zip(pg) {
            *w = *w + config.kappa * v;
        }
    }
    if state.w.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("weight estimate"));
    }
    state.n += 1;

    Ok(StepRecord {
        xi,
        k,
        h_sq: reference.map(|s| state.deviation_sq(s)),
    })
}

/// One l0-RLS update. With `κ = 0` it is bit-identical to [`rls_step`].
pub fn l0_rls_step<T: Scalar>(
    config: &FilterConfig<T>,
    state: &mut FilterState<T>,
    x: &[T],
    y: T,
) -> Result<StepRecord<T>> {
    step_impl(config, state, x, y, true, None)
}

/// One conventional RLS update (the attraction term is omitted regardless of `κ`).
pub fn rls_step<T: Scalar>(
    config: &FilterConfig<T>,
    state: &mut FilterState<T>,
    x: &[T],
    y: T,
) -> Result<StepRecord<T>> {
    step_impl(config, state, x, y, false, None)
}

/// Which recursion a [`Filter`] runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Rls,
    L0Rls,
}

/// Config plus state, stepping either recursion.
#[derive(Debug, Clone)]
pub struct Filter<T> {
    config: FilterConfig<T>,
    state: FilterState<T>,
    variant: Variant,
}

impl<T: Scalar> Filter<T> {
    pub fn new(config: FilterConfig<T>, variant: Variant) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            state: FilterState::new(&config),
            config,
            variant,
        })
    }

    /// l0-RLS when `κ > 0`, conventional RLS otherwise.
    pub fn auto(config: FilterConfig<T>) -> Result<Self> {
        let variant = if config.is_conventional() {
            Variant::Rls
        } else {
            Variant::L0Rls
        };
        Self::new(config, variant)
    }

    pub fn config(&self) -> &FilterConfig<T> {
        &self.config
    }

    pub fn state(&self) -> &FilterState<T> {
        &self.state
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn step(&mut self, x: &[T], y: T) -> Result<StepRecord<T>> {
        self.step_tracked(x, y, None)
    }

    /// Same as [`Filter::step`], also reporting `‖w − s‖²` for the given reference.
    pub fn step_tracked(
        &mut self,
        x: &[T],
        y: T,
        reference: Option<&[T]>,
    ) -> Result<StepRecord<T>> {
        let attract_taps = self.variant == Variant::L0Rls;
        step_impl(&self.config, &mut self.state, x, y, attract_taps, reference)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, lambda: f64, kappa: f64, beta: f64) -> FilterConfig<f64> {
        FilterConfig::new(n, lambda, kappa, beta, 1.0).unwrap()
    }

    #[test]
    fn attractor_values() {
        assert_eq!(zero_attractor(0.0, 5.0).unwrap(), 0.0);
        assert!((zero_attractor(0.1_f64, 5.0).unwrap() + 2.5).abs() < 1e-12);
        assert!(zero_attractor(0.2_f64, 5.0).unwrap().abs() < 1e-12);
        assert_eq!(zero_attractor(0.3, 5.0).unwrap(), 0.0);
        assert!(zero_attractor(f64::NAN, 5.0).is_err());
        assert!(zero_attractor(f64::INFINITY, 5.0).is_err());
    }

    #[test]
    fn attractor_vec_values() {
        assert_eq!(zero_attractor_vec(&[0.0; 3], 5.0).unwrap(), vec![0.0; 3]);
        let g = zero_attractor_vec(&[0.1_f64, -0.1, 1.0], 5.0).unwrap();
        assert!((g[0] + 2.5).abs() < 1e-12);
        assert!((g[1] - 2.5).abs() < 1e-12);
        assert_eq!(g[2], 0.0);
        assert!(zero_attractor_vec(&[0.2_f64], 5.0).unwrap()[0].abs() < 1e-12);
        assert!(zero_attractor_vec(&[0.0, f64::NAN], 5.0).is_err());
    }

    #[test]
    fn gain_vector_examples() {
        let c = cfg(2, 0.5, 0.0, 1.0);
        let st = FilterState::new(&c);
        assert_eq!(gain_vector(&st, &[1.0, 0.0], 1.0).unwrap(), vec![0.5, 0.0]);
        assert_eq!(gain_vector(&st, &[0.0, 0.0], 1.0).unwrap(), vec![0.0, 0.0]);

        let p = SquareMatrix::from_diagonal(&[2.0_f64, 1.0]);
        let st = FilterState::from_parts(vec![0.0, 0.0], p, 0).unwrap();
        let k = gain_vector(&st, &[1.0, 1.0], 0.5).unwrap();
        assert!((k[0] - 2.0 / 3.5).abs() < 1e-12);
        assert!((k[1] - 1.0 / 3.5).abs() < 1e-12);
    }

    #[test]
    fn gain_vector_rejects_indefinite() {
        let p = SquareMatrix::from_diagonal(&[-4.0, 1.0]);
        let st = FilterState::from_parts(vec![0.0, 0.0], p, 0).unwrap();
        assert!(matches!(
            gain_vector(&st, &[1.0, 0.0], 0.5),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn riccati_examples() {
        let p = SquareMatrix::<f64>::identity(3);
        let next = riccati_update(&p, &[0.0; 3], &[0.0; 3], 0.8).unwrap();
        assert_eq!(next, SquareMatrix::scaled_identity(3, 1.0 / 0.8));

        let next = riccati_update(&p, &[0.5, 0.0, 0.0], &[1.0, 0.0, 0.0], 1.0).unwrap();
        let mut expected = SquareMatrix::identity(3);
        expected.set(0, 0, 0.5);
        assert_eq!(next, expected);
    }

    #[test]
    fn toy_trace_two_taps() {
        // hand trace: ξ = 1, k = [1/1.9, 0], g(0) = 0
        let c = FilterConfig::<f64>::new(2, 0.9, 0.01, 5.0, 1.0).unwrap();
        let mut st = FilterState::new(&c);
        let rec = l0_rls_step(&c, &mut st, &[1.0, 0.0], 1.0).unwrap();
        assert_eq!(rec.xi, 1.0);
        assert!((rec.k[0] - 1.0 / 1.9).abs() < 1e-15);
        assert_eq!(rec.k[1], 0.0);
        assert!((st.weights()[0] - 0.526_315_789_473_684_2).abs() < 1e-12);
        assert_eq!(st.weights()[1], 0.0);
        assert_eq!(st.iteration(), 1);

        let mut st2 = FilterState::new(&c);
        rls_step(&c, &mut st2, &[1.0, 0.0], 1.0).unwrap();
        assert_eq!(st2.weights(), st.weights());
    }

    #[test]
    fn exact_start_noiseless_stays_put() {
        let s = [0.3, -1.2, 0.0];
        let c = cfg(3, 0.95, 0.0, 5.0);
        let mut st = FilterState::with_weights(&c, s.to_vec()).unwrap();
        let x = [0.7, -0.1, 2.0];
        let y = dot(&s, &x);
        let rec = l0_rls_step(&c, &mut st, &x, y).unwrap();
        assert_eq!(rec.xi, 0.0);
        assert_eq!(st.weights(), &s);
    }

    #[test]
    fn attraction_uses_updated_matrix() {
        // w₀ inside the attraction range so g ≠ 0; compare against explicit formula.
        let c = FilterConfig::<f64>::new(2, 0.9, 0.01, 5.0, 1.0).unwrap();
        let w0 = vec![0.1, -0.05];
        let mut st = FilterState::with_weights(&c, w0.clone()).unwrap();
        let x = [1.0, 2.0];
        let y = 0.5;
        let p0 = st.inverse_correlation().clone();
        l0_rls_step(&c, &mut st, &x, y).unwrap();

        let xi = y - dot(&w0, &x);
        let pre = FilterState::from_parts(w0.clone(), p0.clone(), 0).unwrap();
        let k = gain_vector(&pre, &x, 0.9).unwrap();
        let p1 = riccati_update(&p0, &k, &x, 0.9).unwrap();
        let g = zero_attractor_vec(&w0, 5.0).unwrap();
        let pg = p1.mul_vec(&g);
        for i in 0..2 {
            let expected = w0[i] + k[i] * xi + 0.01 * pg[i];
            assert!((st.weights()[i] - expected).abs() < 1e-14);
        }
        assert_eq!(st.inverse_correlation(), &p1);
    }

    #[test]
    fn rejects_bad_inputs() {
        let c = cfg(2, 0.9, 0.0, 5.0);
        let mut st = FilterState::new(&c);
        assert!(matches!(
            l0_rls_step(&c, &mut st, &[1.0], 0.0),
            Err(Error::Dimension { .. })
        ));
        assert!(l0_rls_step(&c, &mut st, &[1.0, f64::NAN], 0.0).is_err());
        assert!(l0_rls_step(&c, &mut st, &[1.0, 0.0], f64::INFINITY).is_err());
        assert_eq!(st.iteration(), 0);
    }

    #[test]
    fn config_validation() {
        assert!(FilterConfig::new(0, 0.9, 0.0, 1.0, 1.0).is_err());
        assert!(FilterConfig::new(2, 1.0, 0.0, 1.0, 1.0).is_err());
        assert!(FilterConfig::new(2, 0.0, 0.0, 1.0, 1.0).is_err());
        assert!(FilterConfig::new(2, 0.9, -1.0, 1.0, 1.0).is_err());
        assert!(FilterConfig::new(2, 0.9, 0.0, 0.0, 1.0).is_err());
        assert!(FilterConfig::new(2, 0.9, 0.0, 1.0, 0.0).is_err());
        let c = FilterConfig::<f64>::from_gamma(2, 0.9, 0.5, 1.0, 1.0).unwrap();
        assert!((c.kappa - 0.05).abs() < 1e-15);
        assert!((c.gamma() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn runs_in_single_precision() {
        let c = FilterConfig::<f32>::new(2, 0.9, 0.01, 5.0, 1.0).unwrap();
        let mut st = FilterState::new(&c);
        l0_rls_step(&c, &mut st, &[1.0, 0.0], 1.0).unwrap();
        assert!((st.weights()[0] - 1.0 / 1.9).abs() < 1e-6);
    }
}
