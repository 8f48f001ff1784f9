//! Observables as maps from states to outcome distributions.
//!
//! Every kernel here depends on a state only through its position or its
//! momentum distribution (the kernel's reference axis), so kernels act on
//! [`GridMeasure`]s and [`outcome_distribution`] merely picks the axis.
//!
//! Sign conventions. A smeared observable built from a measure `mu` maps a
//! sharp input `x` to `x - y` with `y ~ mu`: its outcome is `rho * reflect(mu)`.
//! The marginals of the covariant phase-space observable generated by `m`
//! are `rho^Q * mu_m` and `rho^P * nu_m` without reflection, where `mu_m`,
//! `nu_m` are the distributions of the parity-transformed generator; this
//! follows from integrating `W(q,p) m W(q,p)*` over the other coordinate.
//! The two coincide for parity-symmetric generators.

mod joint;
mod warp;

pub use joint::{covariance_residual, joint_distribution, JointDistribution, PhaseSpaceObservable};
pub use warp::{PiecewiseLinear, WarpMap};

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid_measure::{GridMeasure, GridSpec};
use crate::states::MixedState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Q,
    P,
}

/// A one-dimensional observable, described by how it turns the reference
/// distribution of a state into an outcome distribution.
///
/// Build the phase-space variants with [`ObservableKernel::phase_marginal`]
/// and [`warp`]; they cache the generator's marginal measure.
#[derive(Debug, Clone, PartialEq)]
pub enum ObservableKernel {
    SharpPosition,
    SharpMomentum,
    SmearedPosition(GridMeasure),
    SmearedMomentum(GridMeasure),
    PhaseMarginal { gen: MixedState, axis: Axis, marginal: GridMeasure },
    WarpedMarginal { gen: MixedState, axis: Axis, marginal: GridMeasure, warp: WarpMap },
}

impl ObservableKernel {
    pub fn phase_marginal(gen: &MixedState, axis: Axis) -> Result<Self> {
        let (mu, nu) = marginal_measures(gen)?;
        let marginal = match axis {
            Axis::Q => mu,
            Axis::P => nu,
        };
        Ok(ObservableKernel::PhaseMarginal { gen: gen.clone(), axis, marginal })
    }

    pub fn axis(&self) -> Axis {
        match self {
            ObservableKernel::SharpPosition | ObservableKernel::SmearedPosition(_) => Axis::Q,
            ObservableKernel::SharpMomentum | ObservableKernel::SmearedMomentum(_) => Axis::P,
            ObservableKernel::PhaseMarginal { axis, .. } | ObservableKernel::WarpedMarginal { axis, .. } => *axis,
        }
    }

    fn gamma(&self) -> Option<&PiecewiseLinear> {
        match self {
            ObservableKernel::WarpedMarginal { warp, axis, .. } => Some(match axis {
                Axis::Q => &warp.gamma_q,
                Axis::P => &warp.gamma_p,
            }),
            _ => None,
        }
    }

    /// Whether the kernel commutes with translations of the reference axis.
    pub fn is_covariant(&self) -> bool {
        self.gamma().is_none_or(PiecewiseLinear::is_translation)
    }

    /// `sup |gamma(x) - x|` of the outcome warp; zero for unwarped kernels.
    pub fn displacement_bound(&self) -> f64 {
        self.gamma().map_or(0.0, PiecewiseLinear::displacement_bound)
    }

    /// The grid of the reference axis the kernel is tied to, if any:
    /// the generator's position or momentum grid for phase-space marginals,
    /// the smearing measure's grid (as a lattice) for smeared kernels.
    pub fn reference_grid(&self) -> Option<GridSpec> {
        match self {
            ObservableKernel::SharpPosition | ObservableKernel::SharpMomentum => None,
            ObservableKernel::SmearedPosition(mu) | ObservableKernel::SmearedMomentum(mu) => Some(*mu.grid()),
            ObservableKernel::PhaseMarginal { gen, axis, .. } | ObservableKernel::WarpedMarginal { gen, axis, .. } => {
                Some(match axis {
                    Axis::Q => *gen.grid(),
                    Axis::P => gen.momentum_grid().as_grid(),
                })
            }
        }
    }

    /// Whether the reference grid bounds the admissible inputs (true for
    /// phase-space marginals, whose states live on that grid).
    pub(crate) fn has_window(&self) -> bool {
        matches!(self, ObservableKernel::PhaseMarginal { .. } | ObservableKernel::WarpedMarginal { .. })
    }

    /// The measure whose translates are the outcomes of sharp inputs,
    /// before any warp: `reflect(mu)` for smeared kernels, the generator
    /// marginal for phase-space kernels.
    pub fn smearing(&self) -> Option<GridMeasure> {
        match self {
            ObservableKernel::SharpPosition | ObservableKernel::SharpMomentum => None,
            ObservableKernel::SmearedPosition(mu) | ObservableKernel::SmearedMomentum(mu) => Some(mu.reflect()),
            ObservableKernel::PhaseMarginal { marginal, .. } | ObservableKernel::WarpedMarginal { marginal, .. } => {
                Some(marginal.clone())
            }
        }
    }

    /// Outcome distribution for a state with reference-axis distribution `reference`.
    pub fn outcome_from_reference(&self, reference: &GridMeasure) -> Result<GridMeasure> {
        let covariant = match self.smearing() {
            None => reference.clone(),
            Some(s) => reference.convolve(&s)?,
        };
        match self.gamma() {
            None => Ok(covariant),
            Some(g) => g.pushforward(&covariant),
        }
    }

    /// Closed-form Werner distance to the sharp observable of the same
    /// axis, `sum |x| mu(x)`; available for unwarped kernels.
    pub fn closed_form_distance(&self) -> Result<f64> {
        match self {
            ObservableKernel::SharpPosition | ObservableKernel::SharpMomentum => Ok(0.0),
            ObservableKernel::WarpedMarginal { .. } => {
                Err(Error::ClosedFormUnavailable("distance of a warped marginal"))
            }
            _ => Ok(crate::metrology::werner_distance_covariant(
                &self.smearing().expect("smeared kernels have a smearing measure"),
            )),
        }
    }
}

/// Outcome distribution of `kernel` in state `rho`.
pub fn outcome_distribution(kernel: &ObservableKernel, rho: &MixedState) -> Result<GridMeasure> {
    if kernel.has_window() {
        let own = kernel.reference_grid().expect("phase-space kernels have a grid");
        let theirs = match kernel.axis() {
            Axis::Q => *rho.grid(),
            Axis::P => rho.momentum_grid().as_grid(),
        };
        if own != theirs {
            return Err(Error::GridMismatch("state and generator live on different grids".into()));
        }
    }
    let reference = match kernel.axis() {
        Axis::Q => rho.position_distribution(),
        Axis::P => rho.momentum_distribution(),
    };
    kernel.outcome_from_reference(&reference)
}

/// `(mu_m, nu_m)`: position and momentum distributions of the
/// parity-transformed generator.
pub fn marginal_measures(gen: &MixedState) -> Result<(GridMeasure, GridMeasure)> {
    let flipped = gen.parity()?;
    Ok((flipped.position_distribution(), flipped.momentum_distribution()))
}

/// Warped marginal `G^m o gamma^-1` on one axis.
pub fn warp(gen: &MixedState, w: &WarpMap, axis: Axis) -> Result<ObservableKernel> {
    let ObservableKernel::PhaseMarginal { gen, axis, marginal } = ObservableKernel::phase_marginal(gen, axis)? else {
        unreachable!()
    };
    Ok(ObservableKernel::WarpedMarginal { gen, axis, marginal, warp: w.clone() })
}

/// Outcome distributions of `kernel` for each state.
pub fn outcome_batch(kernel: &ObservableKernel, states: &[MixedState]) -> Result<Vec<GridMeasure>> {
    states.iter().map(|rho| outcome_distribution(kernel, rho)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{gaussian_state, StateSpec};

    fn grid() -> GridSpec {
        GridSpec::centered(1024, 0.05).unwrap()
    }

    #[test]
    fn identity_smearing_is_sharp() {
        let rho: MixedState = gaussian_state(0.4, 0.0, 1.0, grid(), 1.0).unwrap().into();
        let delta = GridMeasure::dirac(GridSpec::centered(5, 0.05).unwrap(), 0.0).unwrap();
        let out = outcome_distribution(&ObservableKernel::SmearedPosition(delta), &rho).unwrap();
        let sharp = outcome_distribution(&ObservableKernel::SharpPosition, &rho).unwrap();
        assert!(out.max_abs_diff(&sharp).unwrap() < 1e-15);
    }

    #[test]
    fn smeared_gaussian_adds_variance() {
        let rho: MixedState = gaussian_state(0.0, 0.0, 0.8, grid(), 1.0).unwrap().into();
        let mu = GridMeasure::gaussian(grid(), 0.0, 0.6).unwrap();
        let out = outcome_distribution(&ObservableKernel::SmearedPosition(mu), &rho).unwrap();
        assert!((out.variance() - 1.0).abs() < 1e-4);
        let nu = GridMeasure::gaussian(rho.momentum_grid().as_grid(), 0.0, 1.0).unwrap();
        let out_p = outcome_distribution(&ObservableKernel::SmearedMomentum(nu), &rho).unwrap();
        assert!((out_p.total() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn vacuum_marginals() {
        let sigma = 0.7;
        let gen = StateSpec::Gaussian { sigma, x0: 0.0, p0: 0.0 }.build(grid(), 1.0).unwrap();
        let (mu, nu) = marginal_measures(&gen).unwrap();
        assert!((mu.variance() - sigma * sigma).abs() < 1e-6);
        let sp = 1.0 / (2.0 * sigma);
        assert!((nu.variance() - sp * sp).abs() < 1e-6);
    }

    #[test]
    fn displaced_generator_marginal_is_reflected() {
        let gen = StateSpec::Gaussian { sigma: 0.5, x0: 1.0, p0: 0.0 }.build(grid(), 1.0).unwrap();
        let (mu, _) = marginal_measures(&gen).unwrap();
        assert!((mu.mean() + 1.0).abs() < 0.05);
    }

    #[test]
    fn marginals_need_symmetric_grid() {
        let g = GridSpec::new(-20.0, 0.05, 1024).unwrap();
        let gen = StateSpec::Gaussian { sigma: 0.5, x0: 0.0, p0: 0.0 }.build(g, 1.0).unwrap();
        assert!(matches!(marginal_measures(&gen), Err(Error::AsymmetricGrid { .. })));
    }

    #[test]
    fn warp_kernels() {
        let gen = StateSpec::Gaussian { sigma: 1.0, x0: 0.0, p0: 0.0 }.build(grid(), 1.0).unwrap();
        let rho = StateSpec::Gaussian { sigma: 0.5, x0: 0.0, p0: 0.0 }.build(grid(), 1.0).unwrap();
        let plain = ObservableKernel::phase_marginal(&gen, Axis::Q).unwrap();
        let base = outcome_distribution(&plain, &rho).unwrap();

        let same = warp(&gen, &WarpMap::identity(), Axis::Q).unwrap();
        let out = outcome_distribution(&same, &rho).unwrap();
        assert!(out.max_abs_diff(&base).unwrap() < 1e-9);

        let shifted = WarpMap::new(PiecewiseLinear::shift(0.3), PiecewiseLinear::identity());
        let k = warp(&gen, &shifted, Axis::Q).unwrap();
        assert!(k.is_covariant());
        let out = outcome_distribution(&k, &rho).unwrap();
        assert!((out.mean() - base.mean() - 0.3).abs() < grid().dx());

        let wavy =
            WarpMap::new(PiecewiseLinear::sinusoidal(0.5, 4.0, -8.0, 4, 16).unwrap(), PiecewiseLinear::identity());
        let k = warp(&gen, &wavy, Axis::Q).unwrap();
        assert!(!k.is_covariant());
        assert_eq!(k.displacement_bound(), wavy.bound_q);
        assert!((outcome_distribution(&k, &rho).unwrap().total() - 1.0).abs() < 1e-9);
    }
}
