//! Probability measures on a uniform one-dimensional grid.
//!
//! A [`GridMeasure`] stores one probability mass per grid point. Interval
//! membership is decided by grid-point location, and widths are counted in
//! whole cells: a run of `k` consecutive points is covered by the window
//! `[x_i - dx/2, x_{i+k-1} + dx/2]` of length `k * dx`.

use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::fft;

/// Relative slack used when locating a coordinate on a grid.
const LOCATE_SLACK: f64 = 1e-9;

/// Slack on the target mass `1 - eps` so that windows holding exactly the
/// target are not lost to summation roundoff.
const TARGET_SLACK: f64 = 1e-12;

/// Below this support length convolution is done directly instead of by FFT.
const DIRECT_CONVOLUTION_LEN: usize = 32;

/// Uniform grid `x_j = x_min + j * dx`, `j = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    x_min: f64,
    dx: f64,
    n: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, dx: f64, n: usize) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(invalid("dx", "grid step must be positive and finite"));
        }
        if !x_min.is_finite() {
            return Err(invalid("x_min", "must be finite"));
        }
        if n < 2 {
            return Err(invalid("n", "a grid needs at least two points"));
        }
        Ok(GridSpec { x_min, dx, n })
    }

    /// Grid symmetric about the origin. For even `n` the origin falls halfway
    /// between the two central points.
    pub fn centered(n: usize, dx: f64) -> Result<Self> {
        GridSpec::new(-(n as f64 - 1.0) * dx / 2.0, dx, n)
    }

    /// Grid with both endpoints included.
    pub fn from_range(n: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n < 2 {
            return Err(invalid("n", "a grid needs at least two points"));
        }
        if !(x_max > x_min) {
            return Err(invalid("x_max", "must exceed x_min"));
        }
        GridSpec::new(x_min, (x_max - x_min) / (n as f64 - 1.0), n)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.point(self.n - 1)
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Distance between the first and last grid point.
    pub fn span(&self) -> f64 {
        (self.n - 1) as f64 * self.dx
    }

    pub fn point(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.point(j))
    }

    /// Whether `x_min = -x_max` up to roundoff.
    pub fn is_symmetric(&self) -> bool {
        (self.x_min + self.x_max()).abs() <= 1e-6 * self.dx
    }

    /// Fractional index of `x`.
    pub fn position(&self, x: f64) -> f64 {
        (x - self.x_min) / self.dx
    }

    /// Index of the grid point closest to `x`, if `x` lies within half a
    /// cell of the grid.
    pub fn nearest_index(&self, x: f64) -> Option<usize> {
        let r = self.position(x).round();
        if r < 0.0 || r > (self.n - 1) as f64 {
            None
        } else {
            Some(r as usize)
        }
    }

    /// Index of the grid point at `x`, requiring `x` to be on the grid.
    pub fn exact_index(&self, x: f64) -> Result<usize> {
        let pos = self.position(x);
        let r = pos.round();
        if (pos - r).abs() > 1e-6 || r < 0.0 || r > (self.n - 1) as f64 {
            return Err(Error::OffGrid { what: "location", value: x, step: self.dx });
        }
        Ok(r as usize)
    }

    pub(crate) fn same_step(&self, other: &GridSpec) -> bool {
        (self.dx - other.dx).abs() <= LOCATE_SLACK * self.dx.max(other.dx)
    }

    /// Number of cells from this grid's origin to `other`'s, when the two
    /// grids share step and alignment.
    pub(crate) fn offset_cells(&self, other: &GridSpec) -> Option<i64> {
        if !self.same_step(other) {
            return None;
        }
        let off = (other.x_min - self.x_min) / self.dx;
        let r = off.round();
        if (off - r).abs() > 1e-6 {
            None
        } else {
            Some(r as i64)
        }
    }

    pub fn translated(&self, shift: f64) -> GridSpec {
        GridSpec { x_min: self.x_min + shift, ..*self }
    }

    pub(crate) fn with_len(&self, x_min: f64, n: usize) -> GridSpec {
        GridSpec { x_min, dx: self.dx, n: n.max(2) }
    }

    /// Index range `[lo, hi]` of grid points inside the closed interval.
    pub(crate) fn index_range(&self, lo: f64, hi: f64) -> Option<(usize, usize)> {
        let a = (self.position(lo) - LOCATE_SLACK).ceil().max(0.0);
        let b = (self.position(hi) + LOCATE_SLACK).floor().min((self.n - 1) as f64);
        if a > b {
            None
        } else {
            Some((a as usize, b as usize))
        }
    }
}

/// Closed interval `[center - width/2, center + width/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub center: f64,
    pub width: f64,
}

impl Interval {
    pub fn new(center: f64, width: f64) -> Result<Self> {
        if !(width >= 0.0) || !center.is_finite() {
            return Err(invalid("width", "interval width must be nonnegative"));
        }
        Ok(Interval { center, width })
    }

    pub fn lo(&self) -> f64 {
        self.center - self.width / 2.0
    }

    pub fn hi(&self) -> f64 {
        self.center + self.width / 2.0
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo() && x <= self.hi()
    }
}

/// Normalized nonnegative weights on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridMeasure {
    grid: GridSpec,
    weights: Vec<f64>,
}

impl GridMeasure {
    /// Builds a measure from weights that already sum to one. Totals within
    /// [`crate::MASS_TOL`] of one are renormalized; anything further off is
    /// rejected.
    pub fn new(grid: GridSpec, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != grid.len() {
            return Err(Error::GridMismatch(alloc::format!(
                "{} weights for a grid of {} points",
                weights.len(),
                grid.len()
            )));
        }
        if let Some((index, &value)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::NegativeWeight { index, value });
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > crate::MASS_TOL {
            return Err(Error::NotNormalized { total });
        }
        Ok(GridMeasure::scaled(grid, weights, total))
    }

    /// Normalizes an arbitrary nonnegative weight vector with positive total.
    pub fn from_unnormalized(grid: GridSpec, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::NotNormalized { total });
        }
        let scaled = weights.into_iter().map(|w| w / total).collect();
        GridMeasure::new(grid, scaled)
    }

    /// Samples a density at the grid points (midpoint rule) and normalizes.
    pub fn from_density(grid: GridSpec, density: impl Fn(f64) -> f64) -> Result<Self> {
        let w = grid.points().map(|x| density(x).max(0.0)).collect();
        GridMeasure::from_unnormalized(grid, w)
    }

    /// Unit mass at the grid point nearest `c`.
    pub fn dirac(grid: GridSpec, c: f64) -> Result<Self> {
        let j = grid.nearest_index(c).ok_or_else(|| invalid("c", "point mass lies outside the grid"))?;
        let mut w = alloc::vec![0.0; grid.len()];
        w[j] = 1.0;
        GridMeasure::new(grid, w)
    }

    pub fn gaussian(grid: GridSpec, mean: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(invalid("sigma", "must be positive"));
        }
        GridMeasure::from_density(grid, |x| {
            let z = (x - mean) / sigma;
            (-0.5 * z * z).exp()
        })
    }

    /// Equal weights on the grid points inside `[a, b]`.
    pub fn uniform(grid: GridSpec, a: f64, b: f64) -> Result<Self> {
        if !(b >= a) {
            return Err(invalid("b", "uniform support needs a <= b"));
        }
        let (lo, hi) = grid.index_range(a, b).ok_or_else(|| invalid("a", "uniform support contains no grid point"))?;
        let w = (0..grid.len()).map(|j| if j >= lo && j <= hi { 1.0 } else { 0.0 }).collect();
        GridMeasure::from_unnormalized(grid, w)
    }

    /// Finishes the output of a numerical transform: clamps roundoff
    /// negatives and renormalizes if the total is within tolerance.
    pub(crate) fn from_transform(grid: GridSpec, mut weights: Vec<f64>) -> Result<Self> {
        let scale = weights.iter().fold(0.0f64, |m, w| m.max(w.abs()));
        for (index, w) in weights.iter_mut().enumerate() {
            if *w < 0.0 {
                if *w < -1e-10 * scale.max(1e-300) - 1e-15 {
                    return Err(Error::NegativeWeight { index, value: *w });
                }
                *w = 0.0;
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > crate::MASS_TOL {
            return Err(Error::NotNormalized { total });
        }
        Ok(GridMeasure::scaled(grid, weights, total))
    }

    fn scaled(grid: GridSpec, mut weights: Vec<f64>, total: f64) -> Self {
        if total != 1.0 {
            for w in &mut weights {
                *w /= total;
            }
        }
        GridMeasure { grid, weights }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.points().zip(self.weights.iter().copied())
    }

    /// Weight at the grid point nearest `x`, or 0 off the grid.
    pub fn weight_at(&self, x: f64) -> f64 {
        self.grid.nearest_index(x).map_or(0.0, |j| self.weights[j])
    }

    pub fn expectation(&self, h: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| h(x) * w).sum()
    }

    pub fn mean(&self) -> f64 {
        self.expectation(|x| x)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.expectation(|x| (x - m) * (x - m))
    }

    /// Indices of the first and last nonzero weight.
    pub fn support(&self) -> (usize, usize) {
        let first = self.weights.iter().position(|&w| w > 0.0).unwrap_or(0);
        let last = self.weights.iter().rposition(|&w| w > 0.0).unwrap_or(first);
        (first, last)
    }

    /// Probability of the closed interval `J`, by grid-point location.
    pub fn mass(&self, j: &Interval) -> f64 {
        match self.grid.index_range(j.lo(), j.hi()) {
            Some((lo, hi)) => self.weights[lo..=hi].iter().sum(),
            None => 0.0,
        }
    }

    /// Shortest window carrying mass at least `1 - eps`.
    ///
    /// Each weight is read as a uniform density over its cell. A shortest
    /// window then has an endpoint on a cell edge, so it suffices to scan
    /// windows starting at every left edge and, mirrored, ending at every
    /// right edge, letting the free end cut a cell fractionally.
    pub fn overall_width(&self, eps: f64) -> Result<f64> {
        check_eps(eps)?;
        let target = 1.0 - eps - TARGET_SLACK;
        let forward = shortest_from_left_edges(&self.weights, target);
        let mut reversed = self.weights.clone();
        reversed.reverse();
        let backward = shortest_from_left_edges(&reversed, target);
        Ok(forward.min(backward) * self.grid.dx)
    }

    /// Smallest `w` such that `J_{x;w}` carries mass at least `1 - eps`,
    /// with weights read as uniform cell densities.
    pub fn centered_width(&self, x: f64, eps: f64) -> Result<f64> {
        check_eps(eps)?;
        let target = 1.0 - eps - TARGET_SLACK;
        let n = self.weights.len() as i64;
        let dx = self.grid.dx;
        let density = |i: i64| if i >= 0 && i < n { self.weights[i as usize] / dx } else { 0.0 };
        // Cell i covers [x_i - dx/2, x_i + dx/2]; start in the cell holding x.
        let home = self.grid.position(x).round() as i64;
        let edge_lo = |i: i64| self.grid.x_min + (i as f64 - 0.5) * dx;
        // dl and dr are the distances at which the current left and right
        // cells end; r is the half-width reached so far.
        let (mut left, mut right) = (home, home);
        let mut dl = x - edge_lo(home);
        let mut dr = edge_lo(home + 1) - x;
        let mut r = 0.0;
        // Skip the empty stretch between x and a grid lying wholly to one side.
        if home >= n {
            r = x - edge_lo(n);
            left = n - 1;
            dl = x - edge_lo(n - 1);
            right = n;
            dr = f64::INFINITY;
        } else if home < 0 {
            r = edge_lo(0) - x;
            right = 0;
            dr = edge_lo(1) - x;
            left = -1;
            dl = f64::INFINITY;
        }
        let mut acc = 0.0;
        loop {
            if left < 0 && right >= n {
                return Ok(2.0 * r);
            }
            let rate = density(left) + density(right);
            let next = dl.min(dr);
            if rate > 0.0 {
                let gain = rate * (next - r);
                if acc + gain >= target {
                    return Ok(2.0 * (r + (target - acc) / rate));
                }
                acc += gain;
            }
            r = next;
            if dl == next {
                left -= 1;
                dl += dx;
            }
            if dr == next {
                right += 1;
                dr += dx;
            }
        }
    }

    /// The measure restricted to its support, on a grid of the same step.
    pub fn trimmed(&self) -> GridMeasure {
        let (a, b) = self.support();
        let (a, b) = if b > a {
            (a, b)
        } else if a + 1 < self.weights.len() {
            (a, a + 1)
        } else {
            (a - 1, a)
        };
        GridMeasure { grid: self.grid.with_len(self.grid.point(a), b - a + 1), weights: self.weights[a..=b].to_vec() }
    }

    /// Law of `X + Y` for independent `X ~ self`, `Y ~ other`.
    ///
    /// The output grid spans the Minkowski sum of the two supports, so no
    /// mass wraps around.
    pub fn convolve(&self, other: &GridMeasure) -> Result<GridMeasure> {
        if !self.grid.same_step(&other.grid) {
            return Err(Error::GridMismatch(alloc::format!(
                "cannot convolve measures with steps {} and {}",
                self.grid.dx,
                other.grid.dx
            )));
        }
        let a = self.trimmed();
        let b = other.trimmed();
        let n = a.weights.len() + b.weights.len() - 1;
        let weights = if a.weights.len().min(b.weights.len()) <= DIRECT_CONVOLUTION_LEN {
            let mut out = alloc::vec![0.0; n];
            for (i, wa) in a.weights.iter().enumerate() {
                if *wa == 0.0 {
                    continue;
                }
                for (j, wb) in b.weights.iter().enumerate() {
                    out[i + j] += wa * wb;
                }
            }
            out
        } else {
            fft::convolve_real(&a.weights, &b.weights)
        };
        let grid = self.grid.with_len(a.grid.x_min + b.grid.x_min, n);
        let mut weights = weights;
        weights.resize(grid.len(), 0.0);
        GridMeasure::from_transform(grid, weights)
    }

    /// Image under `x -> -x`.
    pub fn reflect(&self) -> GridMeasure {
        let mut weights = self.weights.clone();
        weights.reverse();
        GridMeasure { grid: self.grid.with_len(-self.grid.x_max(), self.grid.n), weights }
    }

    /// Image under `x -> x + shift`. Weights are unchanged; only the grid
    /// origin moves.
    pub fn translated(&self, shift: f64) -> GridMeasure {
        GridMeasure { grid: self.grid.translated(shift), weights: self.weights.clone() }
    }

    /// Copies the measure onto `target`, which must share step and
    /// alignment. Fails if more than [`crate::MASS_TOL`] falls outside.
    pub fn project_onto(&self, target: &GridSpec) -> Result<GridMeasure> {
        let off = target.offset_cells(&self.grid).ok_or_else(|| {
            Error::GridMismatch(alloc::format!(
                "grid with origin {} and step {} is not aligned with origin {} and step {}",
                self.grid.x_min,
                self.grid.dx,
                target.x_min,
                target.dx
            ))
        })?;
        let mut w = alloc::vec![0.0; target.len()];
        let mut kept = 0.0;
        for (j, &v) in self.weights.iter().enumerate() {
            let t = j as i64 + off;
            if t >= 0 && (t as usize) < target.len() {
                w[t as usize] += v;
                kept += v;
            }
        }
        let lost = self.total() - kept;
        if lost > crate::MASS_TOL {
            return Err(Error::MassDeficit {
                window: alloc::format!("[{}, {}]", target.x_min(), target.x_max()),
                deficit: lost,
            });
        }
        GridMeasure::from_unnormalized(*target, w)
    }

    /// Largest absolute weight difference against a measure on an aligned
    /// grid; points missing from either grid count as zero.
    pub fn max_abs_diff(&self, other: &GridMeasure) -> Result<f64> {
        let off = self
            .grid
            .offset_cells(&other.grid)
            .ok_or_else(|| Error::GridMismatch(alloc::string::String::from("grids are not aligned")))?;
        let lo = 0.min(off);
        let hi = (self.weights.len() as i64).max(off + other.weights.len() as i64);
        let mut worst: f64 = 0.0;
        for t in lo..hi {
            let a = if t >= 0 && (t as usize) < self.weights.len() { self.weights[t as usize] } else { 0.0 };
            let s = t - off;
            let b = if s >= 0 && (s as usize) < other.weights.len() { other.weights[s as usize] } else { 0.0 };
            worst = worst.max((a - b).abs());
        }
        Ok(worst)
    }
}

/// Length, in cells, of the shortest window that starts on a left cell
/// edge and holds `target`, its right end cutting a cell fractionally.
fn shortest_from_left_edges(weights: &[f64], target: f64) -> f64 {
    let n = weights.len();
    let mut best = n as f64;
    let mut r = 0;
    let mut acc = 0.0;
    for l in 0..n {
        // acc = sum of weights[l..r]
        while r < n && acc + weights[r] < target {
            acc += weights[r];
            r += 1;
        }
        if r == n {
            break;
        }
        let frac = ((target - acc) / weights[r]).clamp(0.0, 1.0);
        best = best.min((r - l) as f64 + frac);
        if r == l {
            r += 1;
            acc = 0.0;
        } else {
            acc -= weights[l];
        }
    }
    best
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(invalid("eps", alloc::format!("confidence parameter {eps} is outside (0, 1)")))
    }
}
