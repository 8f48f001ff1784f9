//! Numerics for the confidence-width calculus of position and momentum
//! measurements on a one-dimensional grid.
//!
//! The crate is `no_std` (it needs `alloc`) and is organised bottom-up:
//!
//! - [`grid_measure`]: probability measures on a uniform grid, overall widths,
//!   centred windows, convolution and reflection.
//! - [`states`]: pure and mixed wave functions with FFT position/momentum
//!   duality, Weyl displacements and parity.
//! - [`observables`]: sharp, smeared, covariant phase-space and warped
//!   observables as state-to-distribution kernels, plus the two-dimensional
//!   joint distribution of a covariant phase-space observable.
//! - [`metrology`]: calibration error, error bar width, resolution width,
//!   Werner distances, the lower-bound formulas and the verification and
//!   optimisation drivers built on them.
//!
//! Everything is immutable after construction and every operation is a pure
//! function of its inputs.

#![cfg_attr(not(test), no_std)]
// `!(a < b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
pub mod fft;
pub mod grid_measure;
pub mod metrology;
pub mod observables;
pub mod states;

pub use error::{Error, Result};
pub use grid_measure::{GridMeasure, GridSpec, Interval};
pub use metrology::{
    bound_simple, bound_uffink, calibration_error, check_distance_error_inequality, error_bar_width,
    minimize_width_product, resolution_width, verify_joint_ur, werner_distance_covariant, werner_distance_lower_bound,
    CalibrationConfig, ConfidencePair, ErrorBar, ProbeFamily, ProbeKind, WidthReport,
};
pub use observables::{
    covariance_residual, joint_distribution, marginal_measures, outcome_distribution, warp, Axis, JointDistribution,
    ObservableKernel, PhaseSpaceObservable, PiecewiseLinear, WarpMap,
};
pub use states::{MixedState, MomentumGrid, StateSpec, WaveFunction};

/// Mass slack used whenever two probability masses are compared.
pub const MASS_TOL: f64 = 1e-6;

/// Tolerance on the normalization of states and measures.
pub const NORM_TOL: f64 = 1e-9;
