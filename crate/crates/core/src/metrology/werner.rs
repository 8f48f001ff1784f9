//! Werner distances between observables.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::grid_measure::GridMeasure;
use crate::observables::{outcome_distribution, ObservableKernel};
use crate::states::MixedState;

/// `sum |x| mu(x)`: the distance between a covariant smearing of a sharp
/// observable and the sharp observable itself.
pub fn werner_distance_covariant(mu: &GridMeasure) -> f64 {
    mu.expectation(f64::abs)
}

/// Piecewise-linear test function, constant beyond its outermost knots.
#[derive(Debug, Clone, PartialEq)]
pub struct Hat {
    knots: Vec<(f64, f64)>,
}

impl Hat {
    /// Rejects knots that are unsorted or make the function steeper than slope 1.
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(invalid("knots", "a hat needs at least one knot"));
        }
        for w in knots.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if !(x1 > x0) {
                return Err(invalid("knots", "knot abscissae must increase"));
            }
            let slope = (y1 - y0) / (x1 - x0);
            if slope.abs() > 1.0 + 1e-12 {
                return Err(Error::NotLipschitz { slope });
            }
        }
        Ok(Hat { knots })
    }

    /// `x` clipped to `[-a, a]`.
    pub fn clipped_identity(a: f64) -> Result<Self> {
        Hat::new(alloc::vec![(-a, -a), (a, a)])
    }

    /// Tent of height `half_width` over `[center - half_width, center + half_width]`.
    pub fn tent(center: f64, half_width: f64) -> Result<Self> {
        Hat::new(alloc::vec![(center - half_width, 0.0), (center, half_width), (center + half_width, 0.0)])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let first = self.knots[0];
        let last = self.knots[self.knots.len() - 1];
        if x <= first.0 {
            return first.1;
        }
        if x >= last.0 {
            return last.1;
        }
        let i = self.knots.partition_point(|k| k.0 <= x);
        let (xa, ya) = self.knots[i - 1];
        let (xb, yb) = self.knots[i];
        ya + (yb - ya) * (x - xa) / (xb - xa)
    }
}

/// Certified lower bound on the Werner distance between two observables:
/// the largest `|E1[h] - E2[h]|` over the supplied states and test functions.
pub fn werner_distance_lower_bound(
    k1: &ObservableKernel,
    k2: &ObservableKernel,
    states: &[MixedState],
    hats: &[Hat],
) -> Result<f64> {
    let mut best: f64 = 0.0;
    for rho in states {
        let a = outcome_distribution(k1, rho)?;
        let b = outcome_distribution(k2, rho)?;
        for h in hats {
            let d = a.expectation(|x| h.eval(x)) - b.expectation(|x| h.eval(x));
            best = best.max(d.abs());
        }
    }
    Ok(best)
}
