//! Exact state-vector simulation of alternating-operator optimization for
//! constrained binary problems, with mixers that keep the evolution inside the
//! feasible set.

pub mod analysis;
pub mod bits;
pub mod engine;
pub mod error;
pub mod mixers;
pub mod problems;
pub mod qstate;
pub mod scalar;

pub use analysis::{check_connectivity_conditions, compare_mixers, mixer_report, ComparisonRow, MixerReport};
pub use bits::BitString;
pub use engine::{optimize, run_projected_scheme, InitialState, MixerChoice, RunConfig};
pub use error::{Error, Result};
pub use problems::{FeasibleSet, LinearConstraint, ProblemInstance};
pub use scalar::Real;

pub type QuantumStateF64 = qstate::QuantumState<f64>;
pub type QuantumStateF32 = qstate::QuantumState<f32>;
pub type DiagonalCostF64 = qstate::DiagonalCost<f64>;
pub type DiagonalCostF32 = qstate::DiagonalCost<f32>;
pub type SparseHermitianF64 = qstate::SparseHermitian<f64>;
pub type SparseHermitianF32 = qstate::SparseHermitian<f32>;
pub type MixerOperatorF64 = mixers::MixerOperator<f64>;
pub type MixerOperatorF32 = mixers::MixerOperator<f32>;
pub type QaoaScheduleF64 = engine::QaoaSchedule<f64>;
pub type QaoaScheduleF32 = engine::QaoaSchedule<f32>;
pub type RunResultF64 = engine::RunResult<f64>;
pub type RunResultF32 = engine::RunResult<f32>;
