//! Calibration error, error bar width and resolution width.
//!
//! Inputs are probed through their reference-axis distribution. A probe is
//! localized in `J_{x;delta}` when every grid cell it occupies lies inside
//! the interval. The single-cell probes are the extreme points of the
//! localized set; since outcome masses are affine in the state, the worst
//! of them realizes the supremum over all localized states on the grid. One
//! extra probe of the configured shape covering all admissible cells is
//! added for robustness.
//!
//! For covariant kernels the supremum over `x` reduces to the alignment of
//! `J_{x;delta}` against the cells: the interval is placed with one end on
//! a cell edge (each end in turn), which admits the most cells and puts the
//! outermost probe at the interval's edge.

use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::grid_measure::{check_eps, GridMeasure, GridSpec};
use crate::observables::{Axis, ObservableKernel};

/// Relative slack when deciding whether a cell fits inside an interval.
const FIT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeKind {
    Box,
    TruncatedGaussian,
}

/// How calibration and resolution probes are laid out.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationConfig {
    /// Decreasing localization widths for position-axis kernels.
    pub delta_ladder: Vec<f64>,
    /// Ladder for momentum-axis kernels; falls back to `delta_ladder`.
    pub delta_ladder_p: Option<Vec<f64>>,
    /// Centres swept for kernels that are not translation covariant.
    pub probe_centers: Vec<f64>,
    pub probe_centers_p: Option<Vec<f64>>,
    pub probe_kind: ProbeKind,
    /// Reference lattice for kernels that carry no grid of their own.
    pub lattice: Option<GridSpec>,
}

impl CalibrationConfig {
    pub fn new(delta_ladder: Vec<f64>, probe_centers: Vec<f64>, probe_kind: ProbeKind) -> Result<Self> {
        check_ladder(&delta_ladder)?;
        Ok(CalibrationConfig {
            delta_ladder,
            delta_ladder_p: None,
            probe_centers,
            probe_centers_p: None,
            probe_kind,
            lattice: None,
        })
    }

    /// Ladders of `rungs` cells on both axes, for steps `dx` and `dp`.
    pub fn in_cells(rungs: &[f64], dx: f64, dp: f64) -> Result<Self> {
        let mut cfg = CalibrationConfig::new(rungs.iter().map(|r| r * dx).collect(), Vec::new(), ProbeKind::Box)?;
        cfg.delta_ladder_p = Some(rungs.iter().map(|r| r * dp).collect());
        Ok(cfg)
    }

    pub fn with_momentum(mut self, ladder_p: Vec<f64>, centers_p: Vec<f64>) -> Result<Self> {
        check_ladder(&ladder_p)?;
        self.delta_ladder_p = Some(ladder_p);
        self.probe_centers_p = Some(centers_p);
        Ok(self)
    }

    pub fn with_centers(mut self, centers: Vec<f64>, centers_p: Option<Vec<f64>>) -> Self {
        self.probe_centers = centers;
        self.probe_centers_p = centers_p;
        self
    }

    pub fn with_lattice(mut self, lattice: GridSpec) -> Self {
        self.lattice = Some(lattice);
        self
    }

    pub fn with_kind(mut self, kind: ProbeKind) -> Self {
        self.probe_kind = kind;
        self
    }

    pub fn ladder(&self, axis: Axis) -> &[f64] {
        match (axis, &self.delta_ladder_p) {
            (Axis::P, Some(l)) => l,
            _ => &self.delta_ladder,
        }
    }

    pub fn centers(&self, axis: Axis) -> &[f64] {
        match (axis, &self.probe_centers_p) {
            (Axis::P, Some(c)) => c,
            _ => &self.probe_centers,
        }
    }
}

fn check_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.is_empty() {
        return Err(invalid("delta_ladder", "ladder is empty"));
    }
    if ladder.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
        return Err(invalid("delta_ladder", "widths must be positive"));
    }
    if ladder.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid("delta_ladder", "widths must strictly decrease"));
    }
    Ok(())
}

/// Probe shapes searched by [`resolution_width`]: for each entry of `cells`,
/// a probe occupying that many consecutive cells.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeFamily {
    pub kind: ProbeKind,
    pub cells: Vec<usize>,
}

impl ProbeFamily {
    pub fn new(kind: ProbeKind, cells: Vec<usize>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if cells.contains(&0) {
            return Err(invalid("cells", "a probe occupies at least one cell"));
        }
        Ok(ProbeFamily { kind, cells })
    }
}

impl Default for ProbeFamily {
    fn default() -> Self {
        ProbeFamily { kind: ProbeKind::Box, cells: alloc::vec![1, 2, 4, 8] }
    }
}

/// `delta -> 0` estimate of the calibration error.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorBar {
    /// Calibration error at the smallest rung.
    pub value: f64,
    /// Difference between the two smallest rungs, as an uncertainty estimate.
    pub spread: f64,
    /// `(delta, calibration error)` along the ladder.
    pub ladder: Vec<(f64, f64)>,
}

/// Reference lattice of a kernel and, for kernels tied to a state grid,
/// the number of admissible lattice points.
struct Reference {
    lattice: GridSpec,
    bounded: bool,
}

impl Reference {
    fn of(kernel: &ObservableKernel, cfg: &CalibrationConfig) -> Result<Self> {
        let bounded = kernel.has_window();
        let lattice = kernel
            .reference_grid()
            .or(cfg.lattice)
            .ok_or_else(|| invalid("lattice", "kernel has no reference grid and none is configured"))?;
        Ok(Reference { lattice, bounded })
    }

    fn dx(&self) -> f64 {
        self.lattice.dx()
    }

    /// Lattice index nearest `x` (may lie beyond the grid).
    fn index_of(&self, x: f64) -> i64 {
        self.lattice.position(x).round() as i64
    }

    fn point(&self, i: i64) -> f64 {
        self.lattice.x_min() + i as f64 * self.lattice.dx()
    }

    fn check_inside(&self, lo: i64, hi: i64) -> Result<()> {
        if self.bounded && (lo < 0 || hi >= self.lattice.len() as i64) {
            return Err(Error::StateEscapesGrid(alloc::format!(
                "probe on [{}, {}] leaves the window [{}, {}]",
                self.point(lo),
                self.point(hi),
                self.lattice.x_min(),
                self.lattice.x_max()
            )));
        }
        Ok(())
    }

    /// Reference distribution of a probe on lattice cells `lo..=hi`.
    fn probe(&self, lo: i64, hi: i64, kind: ProbeKind) -> Result<GridMeasure> {
        self.check_inside(lo, hi)?;
        let len = (hi - lo + 1) as usize;
        let grid = GridSpec::new(self.point(lo), self.dx(), len.max(2))?;
        let mut w = alloc::vec![0.0; grid.len()];
        let mid = (len - 1) as f64 / 2.0;
        let spread = ((len - 1) as f64 / 4.0).max(0.5);
        for (i, v) in w.iter_mut().enumerate().take(len) {
            *v = match kind {
                ProbeKind::Box => 1.0,
                ProbeKind::TruncatedGaussian => {
                    let z = (i as f64 - mid) / spread;
                    (-z * z / 2.0).exp()
                }
            };
        }
        GridMeasure::from_unnormalized(grid, w)
    }

    /// Cell edge nearest `y`.
    fn edge_near(&self, y: f64) -> f64 {
        let i = (self.lattice.position(y) + 0.5).round() as i64;
        self.point(i) - self.dx() / 2.0
    }

    /// Centres of `J_{x;delta}` to sweep. Covariant kernels use the two
    /// edge-aligned placements near 0; others use the configured list.
    fn centers(&self, kernel: &ObservableKernel, cfg: &CalibrationConfig, delta: f64) -> Result<Vec<f64>> {
        if kernel.is_covariant() {
            let x0 = self.point(self.index_of(0.0));
            let left = self.edge_near(x0 - delta / 2.0) + delta / 2.0;
            let right = self.edge_near(x0 + delta / 2.0) - delta / 2.0;
            return Ok(if (left - right).abs() <= FIT_SLACK * self.dx() {
                alloc::vec![left]
            } else {
                alloc::vec![left, right]
            });
        }
        let c = cfg.centers(kernel.axis());
        if c.is_empty() {
            return Err(invalid("probe_centers", "a non-covariant kernel needs probe centres"));
        }
        Ok(c.to_vec())
    }
}

/// Smallest `w` such that every probe localized in `J_{x;delta}` yields
/// outcome mass at least `1 - eps` on `J_{x;w}`, worst case over the
/// probe centres.
pub fn calibration_error(kernel: &ObservableKernel, eps: f64, delta: f64, cfg: &CalibrationConfig) -> Result<f64> {
    check_eps(eps)?;
    let r = Reference::of(kernel, cfg)?;
    calibration_error_at(kernel, eps, delta, cfg, &r)
}

fn calibration_error_at(
    kernel: &ObservableKernel,
    eps: f64,
    delta: f64,
    cfg: &CalibrationConfig,
    r: &Reference,
) -> Result<f64> {
    let dx = r.dx();
    if !(delta >= 2.0 * dx * (1.0 - FIT_SLACK)) {
        return Err(invalid("delta", alloc::format!("{delta} is below two grid steps ({})", 2.0 * dx)));
    }
    let mut worst: f64 = 0.0;
    for x in r.centers(kernel, cfg, delta)? {
        let reach = delta / 2.0 - dx / 2.0;
        let lo = (r.lattice.position(x - reach) - FIT_SLACK).ceil() as i64;
        let hi = (r.lattice.position(x + reach) + FIT_SLACK).floor() as i64;
        for i in lo..=hi {
            let out = kernel.outcome_from_reference(&r.probe(i, i, cfg.probe_kind)?)?;
            worst = worst.max(out.centered_width(x, eps)?);
        }
        if hi > lo {
            let out = kernel.outcome_from_reference(&r.probe(lo, hi, cfg.probe_kind)?)?;
            worst = worst.max(out.centered_width(x, eps)?);
        }
    }
    if r.bounded && worst > r.lattice.span() {
        return Err(Error::ExceedsWindow { required: worst, window: r.lattice.span() });
    }
    Ok(worst)
}

/// Calibration error along the configured ladder; the value at the smallest
/// rung is the error bar width.
pub fn error_bar_width(kernel: &ObservableKernel, eps: f64, cfg: &CalibrationConfig) -> Result<ErrorBar> {
    check_eps(eps)?;
    let ladder = cfg.ladder(kernel.axis());
    check_ladder(ladder)?;
    let r = Reference::of(kernel, cfg)?;
    let mut values: Vec<(f64, f64)> = Vec::with_capacity(ladder.len());
    for &delta in ladder {
        let v = calibration_error_at(kernel, eps, delta, cfg, &r)?;
        if let Some(&(_, wider)) = values.last() {
            if v > wider + r.dx() * (1.0 + FIT_SLACK) {
                return Err(Error::LadderInconsistent { wider, narrower: v, delta });
            }
        }
        values.push((delta, v));
    }
    let value = values[values.len() - 1].1;
    let spread = if values.len() > 1 { (values[values.len() - 2].1 - value).abs() } else { 0.0 };
    Ok(ErrorBar { value, spread, ladder: values })
}

/// Smallest `w` such that for every probe centre some probe of the family
/// concentrates the outcome on `J_{x;w}` with mass at least `1 - eps`.
///
/// For covariant kernels every centre is equivalent and the result is the
/// smallest overall width of a probe outcome. Otherwise probes are searched
/// within the warp's displacement bound (plus one cell) of each centre.
pub fn resolution_width(
    kernel: &ObservableKernel,
    eps: f64,
    family: &ProbeFamily,
    cfg: &CalibrationConfig,
) -> Result<f64> {
    check_eps(eps)?;
    if family.cells.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let r = Reference::of(kernel, cfg)?;
    let span = |i0: i64, c: usize| {
        let lo = i0 - (c as i64 - 1) / 2;
        (lo, lo + c as i64 - 1)
    };
    if kernel.is_covariant() {
        let i0 = r.index_of(0.0);
        let mut best = f64::INFINITY;
        for &c in &family.cells {
            let (lo, hi) = span(i0, c);
            let out = kernel.outcome_from_reference(&r.probe(lo, hi, family.kind)?)?;
            best = best.min(out.overall_width(eps)?);
        }
        return Ok(best);
    }
    let reach = (kernel.displacement_bound() / r.dx()).ceil() as i64 + 1;
    let mut worst: f64 = 0.0;
    for x in r.centers(kernel, cfg, 0.0)? {
        let ix = r.index_of(x);
        let mut best = f64::INFINITY;
        for s in -reach..=reach {
            for &c in &family.cells {
                let (lo, hi) = span(ix + s, c);
                let out = kernel.outcome_from_reference(&r.probe(lo, hi, family.kind)?)?;
                best = best.min(out.centered_width(x, eps)?);
            }
        }
        worst = worst.max(best);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice() -> GridSpec {
        GridSpec::centered(2001, 0.7 / 16.0).unwrap()
    }

    fn cfg() -> CalibrationConfig {
        let dx = lattice().dx();
        CalibrationConfig::new(alloc::vec![8.0 * dx, 4.0 * dx, 2.0 * dx], Vec::new(), ProbeKind::Box)
            .unwrap()
            .with_lattice(lattice())
    }

    fn dirac_at(c: f64) -> ObservableKernel {
        ObservableKernel::SmearedPosition(GridMeasure::dirac(GridSpec::centered(65, 0.7 / 16.0).unwrap(), c).unwrap())
    }

    #[test]
    fn config_validation() {
        assert!(CalibrationConfig::new(alloc::vec![0.1, 0.2], Vec::new(), ProbeKind::Box).is_err());
        assert!(CalibrationConfig::new(Vec::new(), Vec::new(), ProbeKind::Box).is_err());
        assert!(matches!(ProbeFamily::new(ProbeKind::Box, Vec::new()), Err(Error::EmptyFamily)));
    }

    #[test]
    fn identity_smearing_calibration_covers_input() {
        let dx = lattice().dx();
        let k = dirac_at(0.0);
        for cells in [2.0, 6.0, 10.0] {
            let w = calibration_error(&k, 0.1, cells * dx, &cfg()).unwrap();
            assert!((w - cells * dx).abs() <= dx + 1e-12, "{cells}: {w}");
        }
        assert!(calibration_error(&k, 0.1, dx, &cfg()).is_err());
    }

    #[test]
    fn offset_point_smearing() {
        let dx = lattice().dx();
        let k = dirac_at(0.7);
        let eb = error_bar_width(&k, 0.05, &cfg()).unwrap();
        assert!((eb.value - 1.4).abs() <= 2.0 * dx, "{}", eb.value);
        let fam = ProbeFamily::default();
        let res = resolution_width(&k, 0.05, &fam, &cfg()).unwrap();
        assert!(res <= dx + 1e-12);
        let sharp = resolution_width(&ObservableKernel::SharpPosition, 0.05, &fam, &cfg()).unwrap();
        assert!(sharp <= dx + 1e-12);
    }

    #[test]
    fn sharp_kernel_needs_lattice() {
        let plain = CalibrationConfig::new(alloc::vec![0.1], Vec::new(), ProbeKind::Box).unwrap();
        assert!(calibration_error(&ObservableKernel::SharpPosition, 0.1, 0.1, &plain).is_err());
    }
}
