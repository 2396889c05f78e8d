//! Sparse system identification with the l0-norm constrained RLS filter.
//!
//! The crate bundles the per-sample filter recursions ([`filter`]), sparse
//! system and signal generation ([`sysmodel`]), the closed-form mean and
//! mean-square analysis ([`theory`]), seeded Monte-Carlo estimation
//! ([`montecarlo`]) and the parameter sweeps that compare the two
//! ([`experiments`]).
//!
//! Filter and theory code is generic over [`Scalar`] (`f32` or `f64`);
//! the `*64` aliases below fix the usual double precision choice.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod filter;
pub mod linalg;
pub mod montecarlo;
mod scalar;
pub mod sysmodel;
pub mod theory;

pub use error::{Error, Result};
pub use filter::{
    gain_vector, l0_rls_step, riccati_update, rls_step, zero_attractor, zero_attractor_vec, Filter,
    FilterConfig, FilterState, StepRecord, Variant,
};
pub use linalg::SquareMatrix;
pub use scalar::Scalar;
pub use sysmodel::{
    generate_nested_systems, generate_sparse_system, noise_power_from_snr, partition_system,
    small_set_attraction, InputMode, Partition, SignalModel, SparseSystem, SystemRecord,
};
pub use theory::{MsdModel, MsdTrajectory, SteadyAnalysis, SteadyBetas, TheoryCoeffs};

pub type FilterConfig64 = FilterConfig<f64>;
pub type FilterState64 = FilterState<f64>;
pub type Filter64 = Filter<f64>;
pub type SparseSystem64 = SparseSystem<f64>;
pub type SignalModel64 = SignalModel<f64>;
pub type TheoryCoeffs64 = TheoryCoeffs<f64>;
pub type MsdModel64 = MsdModel<f64>;
pub type SteadyAnalysis64 = SteadyAnalysis<f64>;
pub type FilterConfig32 = FilterConfig<f32>;
pub type Filter32 = Filter<f32>;
