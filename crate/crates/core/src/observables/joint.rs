//! Joint phase-space distribution of a covariant phase-space observable.
//!
//! For a pure state `psi` and pure generator `phi` the cell `(q_s, p_k)`
//! carries
//! `|<W(q_s, p_k) phi, psi>|^2 / (2 pi hbar) * dq dp = |F[f](p_k)|^2 dx dp`,
//! where `f_j = conj(phi(x_j - q_s)) psi(x_j)` and `F` is the momentum
//! transform of the states module. Outcome positions are therefore grid
//! multiples and outcome momenta are points of the dual momentum grid.
//! Mixtures are handled by bilinearity.

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid_measure::{GridMeasure, GridSpec};
use crate::states::{grid_shift, to_momentum, MixedState, MomentumGrid};

use super::warp::WarpMap;

/// Rows whose marginal mass is below this are skipped.
const ROW_CUTOFF: f64 = 1e-25;

/// Largest mass the outcome window may miss.
const WINDOW_DEFICIT: f64 = 1e-3;

/// Covariant phase-space observable `G^m`, optionally composed with an
/// outcome warp, together with its outcome grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceObservable {
    gen: MixedState,
    q_grid: GridSpec,
    p_grid: GridSpec,
    warp: Option<WarpMap>,
}

impl PhaseSpaceObservable {
    /// Outcome grid: `n` grid multiples of `dx` centred on 0 by the full
    /// dual momentum grid.
    pub fn new(gen: MixedState) -> Result<Self> {
        let g = *gen.grid();
        let n = g.len();
        let q_grid = GridSpec::new(-((n / 2) as f64) * g.dx(), g.dx(), n)?;
        let p_grid = gen.momentum_grid().as_grid();
        Ok(PhaseSpaceObservable { gen, q_grid, p_grid, warp: None })
    }

    /// Custom outcome window. Positions must be grid multiples with the
    /// state step; momenta must be points of the dual momentum grid.
    pub fn with_grids(gen: MixedState, q_grid: GridSpec, p_grid: GridSpec) -> Result<Self> {
        let g = *gen.grid();
        let multiples = GridSpec::new(0.0, g.dx(), 2)?;
        if multiples.offset_cells(&q_grid).is_none() {
            return Err(Error::GridMismatch("outcome positions must be multiples of the state grid step".into()));
        }
        let mg = gen.momentum_grid().as_grid();
        match mg.offset_cells(&p_grid) {
            Some(off) if off >= 0 && off as usize + p_grid.len() <= mg.len() => {}
            _ => return Err(Error::GridMismatch("outcome momenta must be a window of the dual momentum grid".into())),
        }
        Ok(PhaseSpaceObservable { gen, q_grid, p_grid, warp: None })
    }

    /// `G^m o gamma^-1`.
    pub fn warped(mut self, warp: WarpMap) -> Self {
        self.warp = Some(warp);
        self
    }

    pub fn gen(&self) -> &MixedState {
        &self.gen
    }

    pub fn q_grid(&self) -> &GridSpec {
        &self.q_grid
    }

    pub fn p_grid(&self) -> &GridSpec {
        &self.p_grid
    }

    pub fn warp(&self) -> Option<&WarpMap> {
        self.warp.as_ref()
    }
}

/// Cell masses on a `q_grid x p_grid` outcome window, row-major in `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    q_grid: GridSpec,
    p_grid: GridSpec,
    weights: Vec<f64>,
}

impl JointDistribution {
    pub fn q_grid(&self) -> &GridSpec {
        &self.q_grid
    }

    pub fn p_grid(&self) -> &GridSpec {
        &self.p_grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, iq: usize, ip: usize) -> f64 {
        self.weights[iq * self.p_grid.len() + ip]
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    fn row(&self, iq: usize) -> &[f64] {
        let np = self.p_grid.len();
        &self.weights[iq * np..(iq + 1) * np]
    }

    /// Row sums, renormalized.
    pub fn q_marginal(&self) -> Result<GridMeasure> {
        let w = (0..self.q_grid.len()).map(|i| self.row(i).iter().sum()).collect();
        GridMeasure::from_unnormalized(self.q_grid, w)
    }

    /// Column sums, renormalized.
    pub fn p_marginal(&self) -> Result<GridMeasure> {
        let mut w = alloc::vec![0.0; self.p_grid.len()];
        for i in 0..self.q_grid.len() {
            for (acc, v) in w.iter_mut().zip(self.row(i)) {
                *acc += v;
            }
        }
        GridMeasure::from_unnormalized(self.p_grid, w)
    }
}

/// Cell masses of `G(Z)` in state `rho` over the observable's outcome window.
pub fn joint_distribution(g: &PhaseSpaceObservable, rho: &MixedState) -> Result<JointDistribution> {
    let grid = *g.gen.grid();
    if *rho.grid() != grid || rho.hbar() != g.gen.hbar() {
        return Err(Error::GridMismatch("state and generator live on different grids".into()));
    }
    let hbar = rho.hbar();
    let mg = MomentumGrid::dual_of(&grid, hbar);
    let p_off = mg.as_grid().offset_cells(&g.p_grid).expect("validated at construction") as usize;
    let nq = g.q_grid.len();
    let np = g.p_grid.len();
    let cell = grid.dx() * mg.dp;
    let mut weights = alloc::vec![0.0; nq * np];

    for iq in 0..nq {
        let s = grid_shift(&grid, g.q_grid.point(iq))?;
        // Row mass sum_j rho(x_j) m(x_j - q) dx^2, used to skip empty rows.
        let mut row_mass = 0.0;
        for (wa, psi) in rho.components() {
            for (wb, phi) in g.gen.components() {
                row_mass += wa * wb * overlap_row(psi.amps(), phi.amps(), s).0 * grid.dx() * grid.dx();
            }
        }
        if row_mass < ROW_CUTOFF {
            continue;
        }
        let row = &mut weights[iq * np..(iq + 1) * np];
        for (wa, psi) in rho.components() {
            for (wb, phi) in g.gen.components() {
                let f = overlap_row(psi.amps(), phi.amps(), s).1;
                let fh = to_momentum(&grid, hbar, f);
                for (k, cell_w) in row.iter_mut().enumerate() {
                    *cell_w += wa * wb * fh[k + p_off].norm_sqr() * cell;
                }
            }
        }
    }

    let total: f64 = weights.iter().sum();
    if 1.0 - total > WINDOW_DEFICIT {
        return Err(Error::MassDeficit {
            window: alloc::format!(
                "q in [{}, {}], p in [{}, {}]",
                g.q_grid.x_min(),
                g.q_grid.x_max(),
                g.p_grid.x_min(),
                g.p_grid.x_max()
            ),
            deficit: 1.0 - total,
        });
    }
    let joint = JointDistribution { q_grid: g.q_grid, p_grid: g.p_grid, weights };
    match &g.warp {
        None => Ok(joint),
        Some(w) => push_joint(&joint, w),
    }
}

/// `f_j = conj(phi_{j-s}) psi_j` and `sum |f_j|^2`.
fn overlap_row(psi: &[Complex64], phi: &[Complex64], s: i64) -> (f64, Vec<Complex64>) {
    let n = psi.len() as i64;
    let mut norm = 0.0;
    let f = (0..n)
        .map(|j| {
            let src = j - s;
            if src < 0 || src >= n {
                Complex64::new(0.0, 0.0)
            } else {
                let v = phi[src as usize].conj() * psi[j as usize];
                norm += v.norm_sqr();
                v
            }
        })
        .collect();
    (norm, f)
}

/// Pushforward of a joint distribution through a product warp, first along
/// momentum in every row, then along position in every column.
fn push_joint(joint: &JointDistribution, warp: &WarpMap) -> Result<JointDistribution> {
    let nq = joint.q_grid.len();
    let np = joint.p_grid.len();
    let pad_p = warp.gamma_p.padding(joint.p_grid.dx());
    let pad_q = warp.gamma_q.padding(joint.q_grid.dx());

    let mut p_grid = joint.p_grid;
    let mut rows = Vec::with_capacity(nq);
    for iq in 0..nq {
        let (g, r) = warp.gamma_p.push_raw(&joint.p_grid, joint.row(iq), 0, np - 1, pad_p)?;
        p_grid = g;
        rows.push(r);
    }
    let np2 = p_grid.len();
    let nq2 = nq + 2 * pad_q;
    let mut weights = alloc::vec![0.0; nq2 * np2];
    let mut q_grid = joint.q_grid;
    let mut column = alloc::vec![0.0; nq];
    for ip in 0..np2 {
        for (c, r) in column.iter_mut().zip(&rows) {
            *c = r[ip];
        }
        if column.iter().all(|v| *v == 0.0) {
            continue;
        }
        let (g, pushed) = warp.gamma_q.push_raw(&joint.q_grid, &column, 0, nq - 1, pad_q)?;
        q_grid = g;
        for (iq, v) in pushed.into_iter().enumerate() {
            weights[iq * np2 + ip] = v;
        }
    }
    if q_grid == joint.q_grid {
        // Every column was empty; still report the padded window.
        q_grid = GridSpec::new(joint.q_grid.x_min() - pad_q as f64 * joint.q_grid.dx(), joint.q_grid.dx(), nq2)?;
    }
    Ok(JointDistribution { q_grid, p_grid, weights })
}

/// Largest difference in density (cell weight over cell area) between the
/// joint distribution of the displaced state `W(q,p) rho W(q,p)*` and the
/// `(q,p)`-translate of the joint distribution of `rho`, over the cells
/// present in both windows.
///
/// `q` must be a multiple of the position step and `p` of the momentum step.
pub fn covariance_residual(g: &PhaseSpaceObservable, rho: &MixedState, q: f64, p: f64) -> Result<f64> {
    let s = grid_shift(rho.grid(), q)?;
    let dp = rho.momentum_grid().dp;
    let kp = (p / dp).round();
    if (p / dp - kp).abs() > 1e-6 {
        return Err(Error::OffGrid { what: "p", value: p, step: dp });
    }
    let kp = kp as i64;
    let base = joint_distribution(g, rho)?;
    let moved = joint_distribution(g, &rho.weyl_displace(q, p)?)?;
    let nq = base.q_grid.len() as i64;
    let np = base.p_grid.len() as i64;
    let mut worst: f64 = 0.0;
    for iq in 0..nq {
        let tq = iq + s;
        if tq < 0 || tq >= nq {
            continue;
        }
        for ip in 0..np {
            let tp = ip + kp;
            if tp < 0 || tp >= np {
                continue;
            }
            let a = base.weight(iq as usize, ip as usize);
            let b = moved.weight(tq as usize, tp as usize);
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst / (base.q_grid.dx() * base.p_grid.dx()))
}
