//! Pure and mixed states on a position grid.
//!
//! Momentum amplitudes come from a discrete Fourier transform with physical
//! scaling,
//! `phi(p_k) = dx / sqrt(2 pi hbar) * sum_j psi(x_j) exp(-i p_k x_j / hbar)`,
//! on the dual grid `p_k = p_min + k dp` with `dp = 2 pi hbar / (n dx)` and
//! `p_min = -(n/2) dp`. With these factors Parseval holds exactly:
//! `sum |psi|^2 dx = sum |phi|^2 dp`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::fft;
use crate::grid_measure::{GridMeasure, GridSpec};
use crate::NORM_TOL;

/// Dual grid of a position grid under the discrete Fourier transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumGrid {
    pub p_min: f64,
    pub dp: f64,
    pub n: usize,
}

impl MomentumGrid {
    pub fn dual_of(grid: &GridSpec, hbar: f64) -> MomentumGrid {
        let n = grid.len();
        let dp = 2.0 * PI * hbar / (n as f64 * grid.dx());
        MomentumGrid { p_min: -((n / 2) as f64) * dp, dp, n }
    }

    pub fn point(&self, k: usize) -> f64 {
        self.p_min + k as f64 * self.dp
    }

    pub fn p_max(&self) -> f64 {
        self.point(self.n - 1)
    }

    pub fn as_grid(&self) -> GridSpec {
        GridSpec::new(self.p_min, self.dp, self.n).expect("momentum grid is valid by construction")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: GridSpec,
    amps: Vec<Complex64>,
    hbar: f64,
}

impl WaveFunction {
    /// Normalizes `amps` in L²(dx). The grid length must be a power of two.
    pub fn from_amplitudes(grid: GridSpec, amps: Vec<Complex64>, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(invalid("hbar", "must be positive"));
        }
        if !grid.len().is_power_of_two() {
            return Err(invalid("n", alloc::format!("{} is not a power of two", grid.len())));
        }
        if amps.len() != grid.len() {
            return Err(Error::GridMismatch(alloc::format!(
                "{} amplitudes for {} grid points",
                amps.len(),
                grid.len()
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * grid.dx();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(invalid("amps", "state has zero or non-finite norm"));
        }
        let scale = 1.0 / norm.sqrt();
        Ok(WaveFunction { grid, amps: amps.into_iter().map(|a| a * scale).collect(), hbar })
    }

    /// Builds a state from its momentum amplitudes on the dual grid.
    pub fn from_momentum_amplitudes(grid: GridSpec, amps_p: Vec<Complex64>, hbar: f64) -> Result<Self> {
        if amps_p.len() != grid.len() || !grid.len().is_power_of_two() {
            return Err(invalid("amps_p", "need one amplitude per grid point on a power-of-two grid"));
        }
        let mg = MomentumGrid::dual_of(&grid, hbar);
        let x0 = grid.x_min();
        // psi_j = dp / sqrt(2 pi hbar) sum_k phi_k exp(i p_k x_j / hbar)
        let mut buf: Vec<Complex64> =
            amps_p.iter().enumerate().map(|(k, a)| a * cis(k as f64 * mg.dp * x0 / hbar)).collect();
        fft::inverse(&mut buf);
        let amps = buf.into_iter().enumerate().map(|(j, v)| v * cis(mg.p_min * grid.point(j) / hbar)).collect();
        WaveFunction::from_amplitudes(grid, amps, hbar)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn momentum_grid(&self) -> MomentumGrid {
        MomentumGrid::dual_of(&self.grid, self.hbar)
    }

    pub fn momentum_amplitudes(&self) -> Vec<Complex64> {
        to_momentum(&self.grid, self.hbar, self.amps.clone())
    }

    pub fn position_distribution(&self) -> GridMeasure {
        let dx = self.grid.dx();
        let w = self.amps.iter().map(|a| a.norm_sqr() * dx).collect();
        GridMeasure::from_transform(self.grid, w).expect("wave functions are normalized")
    }

    pub fn momentum_distribution(&self) -> GridMeasure {
        let mg = self.momentum_grid();
        let w = self.momentum_amplitudes().iter().map(|a| a.norm_sqr() * mg.dp).collect();
        GridMeasure::from_transform(mg.as_grid(), w).expect("Parseval keeps the mass")
    }

    /// `W(q, p) psi (x) = exp(i p x / hbar - i q p / 2 hbar) psi(x - q)`.
    ///
    /// `q` must be a multiple of the grid step; mass pushed off the grid
    /// beyond the normalization tolerance is an error.
    pub fn weyl_displace(&self, q: f64, p: f64) -> Result<WaveFunction> {
        let s = grid_shift(&self.grid, q)?;
        let n = self.amps.len() as i64;
        let dx = self.grid.dx();
        let lost: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(j, _)| {
                let t = *j as i64 + s;
                t < 0 || t >= n
            })
            .map(|(_, a)| a.norm_sqr() * dx)
            .sum();
        if lost > NORM_TOL {
            return Err(Error::StateEscapesGrid(alloc::format!(
                "displacement by q = {q} pushes mass {lost:e} off the position grid"
            )));
        }
        let hbar = self.hbar;
        let global = -q * p / (2.0 * hbar);
        let amps = (0..n)
            .map(|j| {
                let src = j - s;
                if src < 0 || src >= n {
                    Complex64::new(0.0, 0.0)
                } else {
                    let x = self.grid.point(j as usize);
                    self.amps[src as usize] * cis(p * x / hbar + global)
                }
            })
            .collect();
        Ok(WaveFunction { grid: self.grid, amps, hbar })
    }

    /// `(Pi psi)(x) = psi(-x)` on a grid symmetric about the origin.
    pub fn parity(&self) -> Result<WaveFunction> {
        if !self.grid.is_symmetric() {
            return Err(Error::AsymmetricGrid { x_min: self.grid.x_min(), x_max: self.grid.x_max() });
        }
        let mut amps = self.amps.clone();
        amps.reverse();
        Ok(WaveFunction { grid: self.grid, amps, hbar: self.hbar })
    }

    /// Normalized coherent sum `sum_i c_i psi_i`.
    pub fn superpose(terms: &[(Complex64, &WaveFunction)]) -> Result<WaveFunction> {
        let (_, first) = terms.first().ok_or_else(|| invalid("terms", "empty superposition"))?;
        let mut amps = alloc::vec![Complex64::new(0.0, 0.0); first.amps.len()];
        for (c, psi) in terms {
            if psi.grid != first.grid || psi.hbar != first.hbar {
                return Err(Error::GridMismatch("superposed states live on different grids".into()));
            }
            for (a, b) in amps.iter_mut().zip(&psi.amps) {
                *a += c * b;
            }
        }
        WaveFunction::from_amplitudes(first.grid, amps, first.hbar)
    }
}

/// Physically scaled transform of position-grid amplitudes onto the dual
/// momentum grid.
pub(crate) fn to_momentum(grid: &GridSpec, hbar: f64, amps: Vec<Complex64>) -> Vec<Complex64> {
    let mg = MomentumGrid::dual_of(grid, hbar);
    let mut buf: Vec<Complex64> =
        amps.into_iter().enumerate().map(|(j, a)| a * cis(-mg.p_min * grid.point(j) / hbar)).collect();
    fft::forward(&mut buf);
    let scale = grid.dx() / (2.0 * PI * hbar).sqrt();
    let x0 = grid.x_min();
    buf.into_iter().enumerate().map(|(k, v)| v * cis(-(k as f64) * mg.dp * x0 / hbar) * scale).collect()
}

fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

pub(crate) fn grid_shift(grid: &GridSpec, q: f64) -> Result<i64> {
    let cells = q / grid.dx();
    let s = cells.round();
    if (cells - s).abs() > 1e-6 {
        return Err(Error::OffGrid { what: "q", value: q, step: grid.dx() });
    }
    Ok(s as i64)
}

/// Normalized Gaussian `exp(-(x - x0)^2 / 4 sigma^2 + i p0 x / hbar)`.
///
/// The position grid must contain `[x0 - 8 sigma, x0 + 8 sigma]` and the
/// momentum grid `p0 ± 8 hbar / (2 sigma)`.
pub fn gaussian_state(x0: f64, p0: f64, sigma: f64, grid: GridSpec, hbar: f64) -> Result<WaveFunction> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(invalid("sigma", "must be positive"));
    }
    if grid.x_min() > x0 - 8.0 * sigma || grid.x_max() < x0 + 8.0 * sigma {
        return Err(Error::StateEscapesGrid(alloc::format!(
            "Gaussian at {x0} with sigma {sigma} needs [{}, {}], grid is [{}, {}]",
            x0 - 8.0 * sigma,
            x0 + 8.0 * sigma,
            grid.x_min(),
            grid.x_max()
        )));
    }
    let mg = MomentumGrid::dual_of(&grid, hbar);
    let sigma_p = hbar / (2.0 * sigma);
    if mg.p_min > p0 - 8.0 * sigma_p || mg.p_max() < p0 + 8.0 * sigma_p {
        return Err(Error::StateEscapesGrid(alloc::format!(
            "Gaussian with momentum {p0} and spread {sigma_p} does not fit momentum window [{}, {}]",
            mg.p_min,
            mg.p_max()
        )));
    }
    let amps = grid
        .points()
        .map(|x| {
            let d = x - x0;
            cis(p0 * x / hbar) * (-d * d / (4.0 * sigma * sigma)).exp()
        })
        .collect();
    WaveFunction::from_amplitudes(grid, amps, hbar)
}

/// Constant amplitude on the grid points of `[center - width/2, center + width/2]`.
pub fn box_state(center: f64, width: f64, grid: GridSpec, hbar: f64) -> Result<WaveFunction> {
    if !(width >= 2.0 * grid.dx() * (1.0 - 1e-9)) {
        return Err(invalid("width", alloc::format!("box width {width} is below two grid steps")));
    }
    let (lo, hi) = grid
        .index_range(center - width / 2.0, center + width / 2.0)
        .ok_or_else(|| Error::StateEscapesGrid(alloc::format!("box at {center} is off the grid")))?;
    if grid.x_min() > center - width / 2.0 + grid.dx() || grid.x_max() < center + width / 2.0 - grid.dx() {
        return Err(Error::StateEscapesGrid(alloc::format!("box at {center} with width {width} is truncated")));
    }
    indicator_state(grid, lo, hi, hbar)
}

/// State concentrated on the single grid point `index`.
pub fn point_state(grid: GridSpec, index: usize, hbar: f64) -> Result<WaveFunction> {
    if index >= grid.len() {
        return Err(invalid("index", "outside the grid"));
    }
    indicator_state(grid, index, index, hbar)
}

fn indicator_state(grid: GridSpec, lo: usize, hi: usize, hbar: f64) -> Result<WaveFunction> {
    let amps = (0..grid.len())
        .map(|j| if j >= lo && j <= hi { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
        .collect();
    WaveFunction::from_amplitudes(grid, amps, hbar)
}

/// State whose momentum amplitude is constant on the momentum-grid points
/// `lo..=hi` and zero elsewhere.
pub fn momentum_indicator_state(grid: GridSpec, lo: usize, hi: usize, hbar: f64) -> Result<WaveFunction> {
    if lo > hi || hi >= grid.len() {
        return Err(invalid("momentum range", "empty or outside the momentum grid"));
    }
    let amps_p = (0..grid.len())
        .map(|k| if k >= lo && k <= hi { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
        .collect();
    WaveFunction::from_momentum_amplitudes(grid, amps_p, hbar)
}

/// Gaussian profile cut to the grid points `lo..=hi` of position
/// (`momentum == false`) or momentum space.
pub fn truncated_gaussian_state(
    grid: GridSpec,
    lo: usize,
    hi: usize,
    momentum: bool,
    hbar: f64,
) -> Result<WaveFunction> {
    if lo > hi || hi >= grid.len() {
        return Err(invalid("support", "empty or outside the grid"));
    }
    let mid = (lo + hi) as f64 / 2.0;
    let spread = ((hi - lo) as f64 / 4.0).max(0.5);
    let amps: Vec<Complex64> = (0..grid.len())
        .map(|j| {
            if j >= lo && j <= hi {
                let z = (j as f64 - mid) / spread;
                Complex64::new((-z * z / 4.0).exp(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    if momentum {
        WaveFunction::from_momentum_amplitudes(grid, amps, hbar)
    } else {
        WaveFunction::from_amplitudes(grid, amps, hbar)
    }
}

/// Finite convex mixture of pure states sharing grid and ħ.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    components: Vec<(f64, WaveFunction)>,
}

impl MixedState {
    pub fn new(components: Vec<(f64, WaveFunction)>) -> Result<Self> {
        let (_, first) = components.first().ok_or_else(|| invalid("components", "empty mixture"))?;
        let total: f64 = components.iter().map(|(w, _)| *w).sum();
        if components.iter().any(|(w, _)| !(*w >= 0.0)) {
            return Err(invalid("weights", "mixture weights must be nonnegative"));
        }
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { total });
        }
        if components.iter().any(|(_, psi)| psi.grid != first.grid || psi.hbar != first.hbar) {
            return Err(Error::GridMismatch("mixture components live on different grids".into()));
        }
        Ok(MixedState { components })
    }

    pub fn pure(psi: WaveFunction) -> Self {
        MixedState { components: alloc::vec![(1.0, psi)] }
    }

    pub fn components(&self) -> &[(f64, WaveFunction)] {
        &self.components
    }

    pub fn grid(&self) -> &GridSpec {
        self.components[0].1.grid()
    }

    pub fn hbar(&self) -> f64 {
        self.components[0].1.hbar
    }

    pub fn momentum_grid(&self) -> MomentumGrid {
        self.components[0].1.momentum_grid()
    }

    pub fn position_distribution(&self) -> GridMeasure {
        self.mix(|psi| psi.position_distribution(), *self.grid())
    }

    pub fn momentum_distribution(&self) -> GridMeasure {
        self.mix(|psi| psi.momentum_distribution(), self.momentum_grid().as_grid())
    }

    fn mix(&self, f: impl Fn(&WaveFunction) -> GridMeasure, grid: GridSpec) -> GridMeasure {
        let mut w = alloc::vec![0.0; grid.len()];
        for (c, psi) in &self.components {
            for (acc, v) in w.iter_mut().zip(f(psi).weights()) {
                *acc += c * v;
            }
        }
        GridMeasure::from_transform(grid, w).expect("mixtures of normalized states are normalized")
    }

    pub fn weyl_displace(&self, q: f64, p: f64) -> Result<MixedState> {
        self.try_map(|psi| psi.weyl_displace(q, p))
    }

    pub fn parity(&self) -> Result<MixedState> {
        self.try_map(WaveFunction::parity)
    }

    fn try_map(&self, f: impl Fn(&WaveFunction) -> Result<WaveFunction>) -> Result<MixedState> {
        let components = self.components.iter().map(|(w, psi)| f(psi).map(|p| (*w, p))).collect::<Result<Vec<_>>>()?;
        Ok(MixedState { components })
    }
}

impl From<WaveFunction> for MixedState {
    fn from(psi: WaveFunction) -> Self {
        MixedState::pure(psi)
    }
}

pub fn position_distribution(rho: &MixedState) -> GridMeasure {
    rho.position_distribution()
}

pub fn momentum_distribution(rho: &MixedState) -> GridMeasure {
    rho.momentum_distribution()
}

/// Parametric description of the standard test states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Gaussian {
        sigma: f64,
        x0: f64,
        p0: f64,
    },
    Box {
        center: f64,
        width: f64,
    },
    /// Coherent sum of two Gaussians of width `sigma` at `±separation/2`.
    Superposition {
        sigma: f64,
        separation: f64,
    },
    /// Equal incoherent mixture of the same two Gaussians.
    Mixture {
        sigma: f64,
        separation: f64,
    },
}

impl StateSpec {
    pub fn build(&self, grid: GridSpec, hbar: f64) -> Result<MixedState> {
        match *self {
            StateSpec::Gaussian { sigma, x0, p0 } => gaussian_state(x0, p0, sigma, grid, hbar).map(Into::into),
            StateSpec::Box { center, width } => box_state(center, width, grid, hbar).map(Into::into),
            StateSpec::Superposition { sigma, separation } => {
                let a = gaussian_state(-separation / 2.0, 0.0, sigma, grid, hbar)?;
                let b = gaussian_state(separation / 2.0, 0.0, sigma, grid, hbar)?;
                let one = Complex64::new(1.0, 0.0);
                WaveFunction::superpose(&[(one, &a), (one, &b)]).map(Into::into)
            }
            StateSpec::Mixture { sigma, separation } => {
                let a = gaussian_state(-separation / 2.0, 0.0, sigma, grid, hbar)?;
                let b = gaussian_state(separation / 2.0, 0.0, sigma, grid, hbar)?;
                MixedState::new(alloc::vec![(0.5, a), (0.5, b)])
            }
        }
    }

    /// A centred power-of-two grid of `n` points adapted to the state.
    ///
    /// Gaussian-like states get the step that spends equal relative
    /// resolution on position and momentum, `dx = 2 sigma sqrt(pi / n)`,
    /// widened if needed to hold the 8-sigma support.
    pub fn natural_grid(&self, n: usize, hbar: f64) -> Result<GridSpec> {
        if !n.is_power_of_two() || n < 16 {
            return Err(invalid("n", alloc::format!("{n} is not a power of two >= 16")));
        }
        let nf = n as f64;
        let dx = match *self {
            StateSpec::Gaussian { sigma, x0, .. } => {
                let reach = x0.abs() + 8.0 * sigma;
                (2.0 * sigma * (PI / nf).sqrt() * hbar.sqrt()).max(2.0 * reach / (nf - 2.0))
            }
            StateSpec::Box { center, width } => 2.0 * (center.abs() + 4.0 * width) / nf,
            StateSpec::Superposition { sigma, separation } | StateSpec::Mixture { sigma, separation } => {
                let reach = separation.abs() / 2.0 + 8.0 * sigma;
                (2.0 * sigma * (PI / nf).sqrt() * hbar.sqrt()).max(2.0 * reach / (nf - 2.0))
            }
        };
        GridSpec::centered(n, dx)
    }
}
