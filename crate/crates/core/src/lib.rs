//! Chained Bell operators for n qubits, their local-realist bounds and
//! quantum spectra, and the Hardy-type nonlocality arguments built on them.

// `!(x < tol)` is used throughout so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod eigen;
pub mod error;
pub mod hardy;
pub mod lhv;
pub mod operators;
pub mod poly;
pub mod quantum;
pub mod simplex;

pub use chain::{ChainMember, Factor, MemberKind, Setting, Term};
pub use error::{Error, Result};
pub use hardy::{
    check_hardy, construct_stationary_state_n3, maximize_violation, scan_stationary_surface_n3,
    stationary_probability_n3, HardyKind, HardyReport, HardyVariant, LocalUnitaryParams, OptimizationResult,
    OptimizerConfig,
};
pub use lhv::{
    eval_chain_member, lhv_bounds_bruteforce, master_identity_check, pointwise_chain_check, Assignment,
    ExhaustiveCheck, LhvBounds,
};
pub use quantum::{expectation, joint_probability, Event, HermitianOperator, MeasurementFrame, StateVector, C64};
