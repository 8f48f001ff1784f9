//! Derivative-free search for small width products.

use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::grid_measure::check_eps;
use crate::states::{MixedState, StateSpec};

use super::bounds::{bound_simple, bound_uffink, ConfidencePair};

/// Golden-section iterations per coordinate sweep.
const GOLDEN_STEPS: usize = 24;
const SWEEPS: usize = 3;
const RESTARTS: usize = 3;

/// A family of states indexed by a point in a parameter box.
pub trait StateFamily {
    fn name(&self) -> &str;
    fn bounds(&self) -> &[(f64, f64)];
    fn build(&self, params: &[f64]) -> Result<MixedState>;
}

/// Centred Gaussians, parameter `sigma`, each on its natural grid.
#[derive(Debug, Clone)]
pub struct GaussianFamily {
    pub n: usize,
    pub hbar: f64,
    bounds: [(f64, f64); 1],
}

impl GaussianFamily {
    pub fn new(sigma_lo: f64, sigma_hi: f64, n: usize, hbar: f64) -> Result<Self> {
        if !(sigma_lo > 0.0 && sigma_hi > sigma_lo) {
            return Err(invalid("sigma", "need 0 < sigma_lo < sigma_hi"));
        }
        Ok(GaussianFamily { n, hbar, bounds: [(sigma_lo, sigma_hi)] })
    }
}

impl StateFamily for GaussianFamily {
    fn name(&self) -> &str {
        "gaussian"
    }

    fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    fn build(&self, params: &[f64]) -> Result<MixedState> {
        let spec = StateSpec::Gaussian { sigma: params[0], x0: 0.0, p0: 0.0 };
        spec.build(spec.natural_grid(self.n, self.hbar)?, self.hbar)
    }
}

/// Two Gaussian lobes at `±separation/2`, coherent or incoherent;
/// parameters `(sigma, separation)`.
#[derive(Debug, Clone)]
pub struct TwoLobeFamily {
    pub n: usize,
    pub hbar: f64,
    pub coherent: bool,
    bounds: [(f64, f64); 2],
}

impl TwoLobeFamily {
    pub fn new(sigma: (f64, f64), separation: (f64, f64), coherent: bool, n: usize, hbar: f64) -> Result<Self> {
        if !(sigma.0 > 0.0 && sigma.1 > sigma.0) || !(separation.0 >= 0.0 && separation.1 > separation.0) {
            return Err(invalid("bounds", "parameter ranges must be nonempty with positive sigma"));
        }
        Ok(TwoLobeFamily { n, hbar, coherent, bounds: [sigma, separation] })
    }
}

impl StateFamily for TwoLobeFamily {
    fn name(&self) -> &str {
        if self.coherent {
            "superposition"
        } else {
            "mixture"
        }
    }

    fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    fn build(&self, params: &[f64]) -> Result<MixedState> {
        let (sigma, separation) = (params[0], params[1]);
        let spec = if self.coherent {
            StateSpec::Superposition { sigma, separation }
        } else {
            StateSpec::Mixture { sigma, separation }
        };
        spec.build(spec.natural_grid(self.n, self.hbar)?, self.hbar)
    }
}

/// `W_eps1(rho^Q) * W_eps2(rho^P)`.
pub fn width_product(rho: &MixedState, eps: ConfidencePair) -> Result<f64> {
    check_eps(eps.eps1)?;
    check_eps(eps.eps2)?;
    Ok(rho.position_distribution().overall_width(eps.eps1)? * rho.momentum_distribution().overall_width(eps.eps2)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub params: Vec<f64>,
    pub product: f64,
    /// `product / bound_uffink` (infinite when the bound is 0).
    pub ratio_uffink: f64,
    pub ratio_simple: f64,
    pub evaluations: usize,
}

/// Minimizes the width product over a state family by golden-section
/// coordinate descent from a few fixed starting points. Parameters whose
/// state cannot be built (e.g. it escapes the grid) are skipped.
pub fn minimize_width_product(family: &dyn StateFamily, eps: ConfidencePair, hbar: f64) -> Result<Minimum> {
    let bounds = family.bounds().to_vec();
    if bounds.is_empty() {
        return Err(invalid("family", "parameter box is empty"));
    }
    let mut evaluations = 0;
    let mut objective = |x: &[f64]| {
        evaluations += 1;
        family.build(x).and_then(|rho| width_product(&rho, eps)).unwrap_or(f64::INFINITY)
    };
    let mut best: Option<(Vec<f64>, f64)> = None;
    for r in 0..RESTARTS {
        let frac = (r + 1) as f64 / (RESTARTS + 1) as f64;
        let mut x: Vec<f64> = bounds.iter().map(|(lo, hi)| lo + frac * (hi - lo)).collect();
        let mut fx = objective(&x);
        for _ in 0..SWEEPS {
            for (d, &(lo, hi)) in bounds.iter().enumerate() {
                let (t, ft) = golden(lo, hi, |t| {
                    let mut y = x.clone();
                    y[d] = t;
                    objective(&y)
                });
                if ft < fx {
                    x[d] = t;
                    fx = ft;
                }
            }
        }
        if best.as_ref().is_none_or(|(_, fb)| fx < *fb) {
            best = Some((x, fx));
        }
    }
    let (params, product) = best.expect("at least one restart");
    if !product.is_finite() {
        return Err(invalid("family", "no parameter in the box yields a state on the grid"));
    }
    let ratio = |b: f64| if b > 0.0 { product / b } else { f64::INFINITY };
    Ok(Minimum {
        params,
        product,
        ratio_uffink: ratio(bound_uffink(eps, hbar)),
        ratio_simple: ratio(bound_simple(eps, hbar)),
        evaluations,
    })
}

/// Golden-section search on `[lo, hi]`; returns the best point seen.
fn golden(lo: f64, hi: f64, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    for _ in 0..GOLDEN_STEPS {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
            if fc < best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
            if fd < best.1 {
                best = (d, fd);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, fx) = golden(-3.0, 5.0, |t| (t - 1.3) * (t - 1.3) + 2.0);
        assert!((x - 1.3).abs() < 1e-3);
        assert!((fx - 2.0).abs() < 1e-6);
    }
}
