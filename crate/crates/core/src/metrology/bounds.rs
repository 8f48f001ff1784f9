//! Lower bounds on width products.

use core::f64::consts::PI;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{invalid, Result};

/// Confidence parameters `(eps1, eps2)` of a position/momentum pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidencePair {
    pub eps1: f64,
    pub eps2: f64,
}

impl ConfidencePair {
    pub fn new(eps1: f64, eps2: f64) -> Result<Self> {
        for (name, e) in [("eps1", eps1), ("eps2", eps2)] {
            if !(e > 0.0 && e < 1.0) {
                return Err(invalid(name, alloc::format!("{e} is outside (0, 1)")));
            }
        }
        Ok(ConfidencePair { eps1, eps2 })
    }

    pub fn symmetric(eps: f64) -> Result<Self> {
        ConfidencePair::new(eps, eps)
    }

    /// Whether the bounds are positive, i.e. `eps1 + eps2 < 1`.
    pub fn valid_bound(&self) -> bool {
        self.eps1 + self.eps2 < 1.0
    }
}

/// `2 pi hbar (1 - eps1 - eps2)^2`, or 0 when `eps1 + eps2 >= 1`.
pub fn bound_simple(eps: ConfidencePair, hbar: f64) -> f64 {
    if !eps.valid_bound() {
        return 0.0;
    }
    let s = 1.0 - eps.eps1 - eps.eps2;
    2.0 * PI * hbar * (s * s)
}

/// `2 pi hbar (sqrt((1-eps1)(1-eps2)) - sqrt(eps1 eps2))^2`, or 0 when
/// `eps1 + eps2 >= 1`.
///
/// Evaluated through the identity
/// `(sqrt((1-a)(1-b)) - sqrt(ab))^2 = (1-a-b)^2 + (sqrt(a(1-a)) - sqrt(b(1-b)))^2`,
/// which shows the excess over [`bound_simple`] as a square and keeps the
/// ordering exact in floating point.
pub fn bound_uffink(eps: ConfidencePair, hbar: f64) -> f64 {
    if !eps.valid_bound() {
        return 0.0;
    }
    let (a, b) = (eps.eps1, eps.eps2);
    let s = 1.0 - a - b;
    let t = (a * (1.0 - a)).sqrt() - (b * (1.0 - b)).sqrt();
    2.0 * PI * hbar * (s * s + t * t)
}

/// Slack on a product `W_q * W_p` of widths each known to within two cells:
/// `(W_q + 2dq)(W_p + 2dp) - W_q W_p` with the cross terms kept.
pub fn product_tolerance(dq: f64, dp: f64, w_q: f64, w_p: f64) -> f64 {
    2.0 * dq * w_p + 2.0 * dp * w_q + 4.0 * dq * dp
}
