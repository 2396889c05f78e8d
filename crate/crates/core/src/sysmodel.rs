//! Sparse unknown systems, their tap partition, and white Gaussian signal streams.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::filter::zero_attractor;
use crate::linalg::{dot, norm_sq};
use crate::scalar::Scalar;

/// Deterministic generator for `(seed, stream)`; distinct streams never overlap.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Index sets of zero, large (`|s| > 1/β`) and small (`0 < |s| ≤ 1/β`) taps, zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Partition {
    pub zero: Vec<usize>,
    pub large: Vec<usize>,
    pub small: Vec<usize>,
}

impl Partition {
    pub fn sparsity(&self) -> usize {
        self.large.len() + self.small.len()
    }

    /// Indices of the exactly-zero taps (independent of `β`).
    pub fn zero_indices<T: Scalar>(s: &[T]) -> Vec<usize> {
        s.iter()
            .enumerate()
            .filter_map(|(k, &v)| (v == T::zero()).then_some(k))
            .collect()
    }

    pub fn nonzero(&self) -> impl Iterator<Item = usize> + '_ {
        self.large.iter().chain(&self.small).copied()
    }
}

/// Splits tap indices by magnitude relative to the attraction half-width `1/β`.
pub fn partition_system<T: Scalar>(s: &[T], beta: T) -> Partition {
    let mut part = Partition::default();
    for (k, &v) in s.iter().enumerate() {
        if v == T::zero() {
            part.zero.push(k);
        } else if v.abs() * beta > T::one() {
            part.large.push(k);
        } else {
            part.small.push(k);
        }
    }
    part
}

/// Small-set attraction statistics `G = Σ g²(s_k)` and `G′ = Σ s_k g(s_k)`, both over the small set.
pub fn small_set_attraction<T: Scalar>(s: &[T], partition: &Partition, beta: T) -> (T, T) {
    partition
        .small
        .iter()
        .fold((T::zero(), T::zero()), |(g, gp), &k| {
            let gk = zero_attractor(s[k], beta).unwrap_or(T::zero());
            (g + gk * gk, gp + s[k] * gk)
        })
}

/// True parameter vector of the unknown system.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSystem<T> {
    s: Vec<T>,
    sparsity: usize,
}

impl<T: Scalar> SparseSystem<T> {
    pub fn from_vec(s: Vec<T>) -> Result<Self> {
        if s.is_empty() {
            return Err(invalid("system must have at least one tap"));
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("system coefficients"));
        }
        let sparsity = s.iter().filter(|&&v| v != T::zero()).count();
        Ok(Self { s, sparsity })
    }

    pub fn coefficients(&self) -> &[T] {
        &self.s
    }

    pub fn taps(&self) -> usize {
        self.s.len()
    }

    /// Number of nonzero taps `K`.
    pub fn sparsity(&self) -> usize {
        self.sparsity
    }

    pub fn norm_sq(&self) -> T {
        norm_sq(&self.s)
    }

    pub fn partition(&self, beta: T) -> Partition {
        partition_system(&self.s, beta)
    }

    /// `(G, G′)` at the given `β`.
    pub fn small_set_attraction(&self, beta: T) -> (T, T) {
        small_set_attraction(&self.s, &self.partition(beta), beta)
    }

    /// Noiseless output `sᵀx`.
    pub fn output(&self, x: &[T]) -> T {
        dot(&self.s, x)
    }

    pub fn record(&self, beta: f64, seed: u64) -> SystemRecord {
        SystemRecord {
            n: self.taps(),
            k: self.sparsity,
            beta,
            seed,
            s: self.s.iter().map(|v| v.as_f64()).collect(),
        }
    }
}

/// Draws a `K`-sparse system: support uniform without replacement, nonzero entries i.i.d. 𝒩(0,1).
pub fn generate_sparse_system<T: Scalar>(n: usize, k: usize, seed: u64) -> Result<SparseSystem<T>> {
    generate_sparse_system_with(n, k, &mut seeded_rng(seed, 0))
}

pub fn generate_sparse_system_with<T: Scalar, R: Rng + ?Sized>(
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<SparseSystem<T>> {
    if n == 0 {
        return Err(invalid("system must have at least one tap"));
    }
    if k > n {
        return Err(invalid(format!("sparsity K={k} exceeds length N={n}")));
    }
    let mut s = vec![T::zero(); n];
    let mut support: Vec<usize> = index::sample(rng, n, k).into_vec();
    support.sort_unstable();
    for idx in support {
        let mut v: f64 = rng.sample(StandardNormal);
        while v == 0.0 {
            v = rng.sample(StandardNormal);
        }
        s[idx] = T::of(v);
    }
    SparseSystem::from_vec(s)
}

/// Systems of increasing sparsity sharing one random tap ordering and one set
/// of values: the `K`-sparse member keeps the first `K` taps of that ordering,
/// so every member's support contains the supports of the sparser ones.
pub fn generate_nested_systems<T: Scalar>(
    n: usize,
    ks: &[usize],
    seed: u64,
) -> Result<Vec<SparseSystem<T>>> {
    if n == 0 {
        return Err(invalid("system must have at least one tap"));
    }
    if let Some(&k) = ks.iter().find(|&&k| k > n) {
        return Err(invalid(format!("sparsity K={k} exceeds length N={n}")));
    }
    let mut rng = seeded_rng(seed, 0);
    let order = index::sample(&mut rng, n, n).into_vec();
    let values: Vec<f64> = (0..n)
        .map(|_| loop {
            let v: f64 = rng.sample(StandardNormal);
            if v != 0.0 {
                break v;
            }
        })
        .collect();
    ks.iter()
        .map(|&k| {
            let mut s = vec![T::zero(); n];
            for (&idx, &v) in order.iter().zip(&values).take(k) {
                s[idx] = T::of(v);
            }
            SparseSystem::from_vec(s)
        })
        .collect()
}

/// Flat JSON form of a generated system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemRecord {
    pub n: usize,
    pub k: usize,
    pub beta: f64,
    pub seed: u64,
    pub s: Vec<f64>,
}

impl SystemRecord {
    pub fn to_system<T: Scalar>(&self) -> Result<SparseSystem<T>> {
        if self.s.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: self.s.len(),
            });
        }
        SparseSystem::from_vec(self.s.iter().map(|&v| T::of(v)).collect())
    }
}

/// `P_ν = P_x ‖s‖² 10^(−SNR/10)`: SNR is the noiseless output power over the noise power.
/// An infinite SNR gives a noiseless model.
pub fn noise_power_from_snr<T: Scalar>(px: T, s: &[T], snr_db: T) -> Result<T> {
    if snr_db == T::infinity() {
        return Ok(T::zero());
    }
    if !snr_db.is_finite() {
        return Err(invalid(format!(
            "snr_db must be finite or +inf, got {snr_db}"
        )));
    }
    let energy = norm_sq(s);
    if energy == T::zero() {
        return Err(invalid("finite SNR is undefined for the zero system"));
    }
    Ok(px * energy * T::of(10.0).powf(-snr_db / T::of(10.0)))
}

/// Input and noise powers of the white Gaussian signal model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalModel<T> {
    /// Input variance `P_x`.
    pub px: T,
    /// Noise variance `P_ν`.
    pub pnu: T,
    pub snr_db: Option<T>,
    pub seed: u64,
}

impl<T: Scalar> SignalModel<T> {
    pub fn new(px: T, pnu: T, seed: u64) -> Result<Self> {
        let m = Self {
            px,
            pnu,
            snr_db: None,
            seed,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn from_snr(px: T, system: &SparseSystem<T>, snr_db: T, seed: u64) -> Result<Self> {
        let pnu = noise_power_from_snr(px, system.coefficients(), snr_db)?;
        let m = Self {
            px,
            pnu,
            snr_db: Some(snr_db),
            seed,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.px > T::zero()) || !self.px.is_finite() {
            return Err(invalid(format!(
                "input power must be positive, got {}",
                self.px
            )));
        }
        if !(self.pnu >= T::zero()) || !self.pnu.is_finite() {
            return Err(invalid(format!(
                "noise power must be non-negative, got {}",
                self.pnu
            )));
        }
        Ok(())
    }
}

/// How regressors are formed from the white input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputMode {
    /// `x_n = [x(n), …, x(n−N+1)]` from a single scalar stream.
    #[default]
    TappedDelay,
    /// Each `x_n` drawn fresh.
    Independent,
}

/// Endless stream of regressor vectors. The tapped delay line starts full
/// (warmed with `N − 1` samples), so the stream is stationary from the first vector.
#[derive(Debug, Clone)]
pub struct InputStream<T, R = ChaCha8Rng> {
    rng: R,
    mode: InputMode,
    std: f64,
    current: Vec<T>,
    started: bool,
}

impl<T: Scalar, R: Rng> InputStream<T, R> {
    pub fn new(rng: R, mode: InputMode, taps: usize, px: T) -> Self {
        Self {
            rng,
            mode,
            std: px.as_f64().sqrt(),
            current: vec![T::zero(); taps],
            started: false,
        }
    }

    fn sample(&mut self) -> T {
        let z: f64 = self.rng.sample(StandardNormal);
        T::of(self.std * z)
    }

    /// Advances and returns the next regressor.
    pub fn next_vector(&mut self) -> &[T] {
        let taps = self.current.len();
        match self.mode {
            InputMode::Independent => {
                for i in 0..taps {
                    self.current[i] = self.sample();
                }
            }
            InputMode::TappedDelay => {
                if !self.started {
                    for i in (0..taps).rev() {
                        self.current[i] = self.sample();
                    }
                } else {
                    self.current.rotate_right(1);
                    self.current[0] = self.sample();
                }
            }
        }
        self.started = true;
        &self.current
    }

    /// Standard normal draw from the same generator (used for the additive noise).
    pub fn standard_normal(&mut self) -> T {
        T::of(self.rng.sample::<f64, _>(StandardNormal))
    }
}

/// Collects `n_steps` regressors of the given model.
pub fn input_stream<T: Scalar>(
    model: &SignalModel<T>,
    mode: InputMode,
    taps: usize,
    n_steps: usize,
) -> Result<Vec<Vec<T>>> {
    if n_steps == 0 {
        return Err(invalid("n_steps must be at least 1"));
    }
    if taps == 0 {
        return Err(invalid("filter length must be at least 1"));
    }
    model.validate()?;
    let mut stream = InputStream::new(seeded_rng(model.seed, 0), mode, taps, model.px);
    Ok((0..n_steps)
        .map(|_| stream.next_vector().to_vec())
        .collect())
}
