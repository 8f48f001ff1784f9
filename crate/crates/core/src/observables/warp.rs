//! Monotone piecewise-linear outcome maps and their pushforwards.

use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::grid_measure::{GridMeasure, GridSpec};

/// Strictly increasing piecewise-linear bijection of the line.
///
/// Between knots the map interpolates linearly; beyond the outermost knots
/// it continues with slope 1, so the displacement `gamma(x) - x` stays
/// bounded by its largest value at a knot. No knots means the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(invalid("knots", "knot coordinates must be finite"));
        }
        for w in knots.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if !(x1 > x0) || !(y1 > y0) {
                return Err(Error::NonMonotone(alloc::format!(
                    "knots ({x0}, {y0}) and ({x1}, {y1}) are not strictly increasing"
                )));
            }
        }
        Ok(PiecewiseLinear { knots })
    }

    pub fn identity() -> Self {
        PiecewiseLinear { knots: Vec::new() }
    }

    /// `x -> x + c`.
    pub fn shift(c: f64) -> Self {
        PiecewiseLinear { knots: alloc::vec![(0.0, c)] }
    }

    /// Knots of `x + amplitude * sin(2 pi x / period)` at `pieces_per_period`
    /// points per period over `periods` whole periods starting at `start`.
    /// Outside that range the map is the identity.
    pub fn sinusoidal(
        amplitude: f64,
        period: f64,
        start: f64,
        periods: usize,
        pieces_per_period: usize,
    ) -> Result<Self> {
        if !(period > 0.0) || pieces_per_period < 4 || periods == 0 {
            return Err(invalid("period", "need a positive period, at least one period and four pieces per period"));
        }
        let total = periods * pieces_per_period;
        let knots = (0..=total)
            .map(|i| {
                let x = start + period * i as f64 / pieces_per_period as f64;
                let phase = 2.0 * core::f64::consts::PI * i as f64 / pieces_per_period as f64;
                (x, x + amplitude * phase.sin())
            })
            .collect();
        PiecewiseLinear::new(knots)
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// `sup |gamma(x) - x|`, attained at a knot.
    pub fn displacement_bound(&self) -> f64 {
        self.knots.iter().fold(0.0, |m, (x, y)| m.max((y - x).abs()))
    }

    /// Whether the map is a pure translation.
    pub fn is_translation(&self) -> bool {
        match self.knots.first() {
            None => true,
            Some((x0, y0)) => {
                let d = y0 - x0;
                self.knots.iter().all(|(x, y)| ((y - x) - d).abs() <= 1e-12 * (1.0 + d.abs()))
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        interpolate(&self.knots, x, |k| k)
    }

    pub fn inverse(&self, y: f64) -> f64 {
        interpolate(&self.knots, y, |(a, b)| (b, a))
    }

    /// Knot abscissae strictly inside `(a, b)`.
    fn breaks_in(&self, a: f64, b: f64) -> impl Iterator<Item = f64> + '_ {
        let start = self.knots.partition_point(|(x, _)| *x <= a);
        self.knots[start..].iter().map(|(x, _)| *x).take_while(move |x| *x < b)
    }

    /// Image of a grid measure, each cell read as a uniform density.
    ///
    /// Each cell is split at the knots it contains; the image of a piece is
    /// an interval carrying the piece's share of the cell mass uniformly,
    /// spread over the output cells it overlaps. The output grid keeps the
    /// step and alignment of the input and is padded by the displacement
    /// bound, so no mass is lost.
    pub fn pushforward(&self, m: &GridMeasure) -> Result<GridMeasure> {
        let (lo, hi) = m.support();
        let (grid, out) = self.push_raw(m.grid(), m.weights(), lo, hi, self.padding(m.grid().dx()))?;
        GridMeasure::from_transform(grid, out)
    }

    /// Cells of padding needed on each side of a pushforward.
    pub(crate) fn padding(&self, dx: f64) -> usize {
        (self.displacement_bound() / dx).ceil() as usize + 2
    }

    /// Pushforward of the raw weights at indices `lo..=hi` onto the grid
    /// running from `lo - pad` to `hi + pad`.
    pub(crate) fn push_raw(
        &self,
        g: &GridSpec,
        weights: &[f64],
        lo: usize,
        hi: usize,
        pad: usize,
    ) -> Result<(GridSpec, Vec<f64>)> {
        let first = lo as i64 - pad as i64;
        let len = hi - lo + 1 + 2 * pad;
        let out_grid = GridSpec::new(g.x_min() + first as f64 * g.dx(), g.dx(), len.max(2))?;
        let mut out = alloc::vec![0.0; out_grid.len()];
        for (j, &w) in weights.iter().enumerate().take(hi + 1).skip(lo) {
            if w == 0.0 {
                continue;
            }
            let a = g.point(j) - g.dx() / 2.0;
            let b = a + g.dx();
            let mut u = a;
            for v in self.breaks_in(a, b).chain(core::iter::once(b)) {
                deposit(&mut out, &out_grid, self.eval(u), self.eval(v), w * (v - u) / g.dx());
                u = v;
            }
        }
        Ok((out_grid, out))
    }
}

fn interpolate(knots: &[(f64, f64)], x: f64, orient: impl Fn((f64, f64)) -> (f64, f64)) -> f64 {
    let Some(&first) = knots.first() else { return x };
    let (x0, y0) = orient(first);
    let (xn, yn) = orient(*knots.last().unwrap());
    if x <= x0 {
        return y0 + (x - x0);
    }
    if x >= xn {
        return yn + (x - xn);
    }
    let i = knots.partition_point(|k| orient(*k).0 <= x);
    let (xa, ya) = orient(knots[i - 1]);
    let (xb, yb) = orient(knots[i]);
    ya + (yb - ya) * (x - xa) / (xb - xa)
}

/// Spreads `mass` uniformly over `[c, d]` into the cells of `grid`.
fn deposit(out: &mut [f64], grid: &GridSpec, c: f64, d: f64, mass: f64) {
    let dx = grid.dx();
    let edge0 = grid.x_min() - dx / 2.0;
    let len = d - c;
    let last = out.len() as i64 - 1;
    let i0 = (((c - edge0) / dx).floor() as i64).clamp(0, last);
    let i1 = (((d - edge0) / dx).floor() as i64).clamp(0, last);
    if i0 == i1 || !(len > 0.0) {
        out[i0 as usize] += mass;
        return;
    }
    for i in i0..=i1 {
        let lo = edge0 + i as f64 * dx;
        let overlap = (d.min(lo + dx) - c.max(lo)).max(0.0);
        out[i as usize] += mass * overlap / len;
    }
}

/// Pair of outcome maps `gamma = (gamma_q, gamma_p)` applied to the two
/// coordinates of a phase-space observable.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpMap {
    pub gamma_q: PiecewiseLinear,
    pub gamma_p: PiecewiseLinear,
    pub bound_q: f64,
    pub bound_p: f64,
}

impl WarpMap {
    pub fn new(gamma_q: PiecewiseLinear, gamma_p: PiecewiseLinear) -> Self {
        let bound_q = gamma_q.displacement_bound();
        let bound_p = gamma_p.displacement_bound();
        WarpMap { gamma_q, gamma_p, bound_q, bound_p }
    }

    pub fn identity() -> Self {
        WarpMap::new(PiecewiseLinear::identity(), PiecewiseLinear::identity())
    }
}
