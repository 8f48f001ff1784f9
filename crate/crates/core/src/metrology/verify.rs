//! Verification drivers for the joint-measurement relations.

use crate::error::{Error, Result};
use crate::observables::{Axis, ObservableKernel};
use crate::states::MixedState;

use super::bounds::{bound_simple, bound_uffink, product_tolerance, ConfidencePair};
use super::calibration::{error_bar_width, resolution_width, CalibrationConfig, ErrorBar, ProbeFamily};

/// Width functionals of one marginal.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisReport {
    /// Overall width of the smearing measure (0 for sharp kernels).
    pub overall_width: f64,
    pub resolution_width: f64,
    pub error_bar: ErrorBar,
    /// Closed-form distance to the sharp observable, when one exists.
    pub werner_distance: Option<f64>,
    /// Grid step of the reference axis.
    pub step: f64,
}

/// Outcome of checking both joint-measurement relations for one observable
/// and one confidence pair.
#[derive(Debug, Clone, PartialEq)]
pub struct WidthReport {
    pub eps: ConfidencePair,
    pub hbar: f64,
    pub q: AxisReport,
    pub p: AxisReport,
    pub error_bar_product: f64,
    pub resolution_product: f64,
    pub bound_simple: f64,
    pub bound_uffink: f64,
    /// `min(error-bar product, resolution product) - bound`.
    pub margin_simple: f64,
    pub margin_uffink: f64,
    pub tolerance: f64,
    /// False when `eps1 + eps2 >= 1`: both bounds are then 0.
    pub positive_bound: bool,
    pub pass: bool,
}

impl WidthReport {
    pub fn note(&self) -> &'static str {
        if self.positive_bound {
            ""
        } else {
            "no positive bound"
        }
    }
}

/// Width functionals of a single kernel.
pub fn axis_report(
    kernel: &ObservableKernel,
    eps: f64,
    cfg: &CalibrationConfig,
    family: &ProbeFamily,
) -> Result<AxisReport> {
    let error_bar = error_bar_width(kernel, eps, cfg)?;
    let resolution_width = resolution_width(kernel, eps, family, cfg)?;
    let overall_width = match kernel.smearing() {
        Some(mu) => mu.overall_width(eps)?,
        None => 0.0,
    };
    let step = kernel.reference_grid().or(cfg.lattice).map_or(0.0, |g| g.dx());
    Ok(AxisReport {
        overall_width,
        resolution_width,
        error_bar,
        werner_distance: kernel.closed_form_distance().ok(),
        step,
    })
}

/// Error-bar and resolution products of a pair of marginals against both bounds.
pub fn verify_marginals(
    kq: &ObservableKernel,
    kp: &ObservableKernel,
    eps: ConfidencePair,
    hbar: f64,
    cfg: &CalibrationConfig,
    family: &ProbeFamily,
) -> Result<WidthReport> {
    if kq.axis() != Axis::Q || kp.axis() != Axis::P {
        return Err(crate::error::invalid("kernels", "need a position kernel and a momentum kernel"));
    }
    let q = axis_report(kq, eps.eps1, cfg, family)?;
    let p = axis_report(kp, eps.eps2, cfg, family)?;
    let error_bar_product = q.error_bar.value * p.error_bar.value;
    let resolution_product = q.resolution_width * p.resolution_width;
    let b_simple = bound_simple(eps, hbar);
    let b_uffink = bound_uffink(eps, hbar);
    let tolerance = product_tolerance(
        q.step,
        p.step,
        q.error_bar.value.max(q.resolution_width),
        p.error_bar.value.max(p.resolution_width),
    );
    let smaller = error_bar_product.min(resolution_product);
    let margin_simple = smaller - b_simple;
    let margin_uffink = smaller - b_uffink;
    let positive_bound = eps.valid_bound();
    let pass = margin_simple >= -tolerance && margin_uffink >= -tolerance;
    Ok(WidthReport {
        eps,
        hbar,
        q,
        p,
        error_bar_product,
        resolution_product,
        bound_simple: b_simple,
        bound_uffink: b_uffink,
        margin_simple,
        margin_uffink,
        tolerance,
        positive_bound,
        pass,
    })
}

/// Both relations for the covariant phase-space observable generated by `gen`.
pub fn verify_joint_ur(gen: &MixedState, eps: ConfidencePair, cfg: &CalibrationConfig) -> Result<WidthReport> {
    let kq = ObservableKernel::phase_marginal(gen, Axis::Q)?;
    let kp = ObservableKernel::phase_marginal(gen, Axis::P)?;
    verify_marginals(&kq, &kp, eps, gen.hbar(), cfg, &ProbeFamily::default())
}

/// Both sides of `error bar <= (2 / eps) * distance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceCheck {
    pub error_bar: f64,
    pub distance: f64,
    /// `(2 / eps) * distance + tolerance`.
    pub rhs: f64,
    pub tolerance: f64,
}

/// Checks that a covariant kernel's error bar is controlled by its distance
/// to the sharp observable. Fails with both sides on violation.
pub fn check_distance_error_inequality(
    kernel: &ObservableKernel,
    eps: f64,
    cfg: &CalibrationConfig,
) -> Result<DistanceCheck> {
    let distance = kernel.closed_form_distance()?;
    let eb = error_bar_width(kernel, eps, cfg)?;
    let dx = kernel.reference_grid().or(cfg.lattice).map_or(0.0, |g| g.dx());
    let tolerance = 2.0 * dx;
    let rhs = 2.0 / eps * distance + tolerance;
    if eb.value > rhs {
        return Err(Error::RelationViolated { relation: "error bar <= (2/eps) * distance", lhs: eb.value, rhs });
    }
    Ok(DistanceCheck { error_bar: eb.value, distance, rhs, tolerance })
}
