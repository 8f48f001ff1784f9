//! Uncertainty functionals: widths, calibration error, error bars,
//! resolution, Werner distances, the product bounds and the drivers that
//! check them.

mod bounds;
mod calibration;
mod optimize;
mod verify;
mod werner;

pub use bounds::{bound_simple, bound_uffink, product_tolerance, ConfidencePair};
pub use calibration::{
    calibration_error, error_bar_width, resolution_width, CalibrationConfig, ErrorBar, ProbeFamily, ProbeKind,
};
pub use optimize::{minimize_width_product, width_product, GaussianFamily, Minimum, StateFamily, TwoLobeFamily};
pub use verify::{
    axis_report, check_distance_error_inequality, verify_joint_ur, verify_marginals, AxisReport, DistanceCheck,
    WidthReport,
};
pub use werner::{werner_distance_covariant, werner_distance_lower_bound, Hat};
