//! The three commands, as functions from validated input to report text.

use std::collections::BTreeMap;

use errbar_core::metrology::{axis_report, product_tolerance, verify_marginals};
use errbar_core::{
    bound_simple, bound_uffink, check_distance_error_inequality, verify_joint_ur, warp, Axis, ConfidencePair, Error,
    ObservableKernel, ProbeFamily, StateSpec,
};
use rayon::prelude::*;

use crate::config::{check_eps, check_hbar, check_n, Defaults, ScanConfig, Scenario};
use crate::report::{fmt_num, AxisColumns, ReportRow, CSV_HEADER};
use crate::spec;
use crate::CliError;

enum Job {
    Joint { gen: usize, eps: usize },
    Warped { gen: usize, warp: usize, eps: usize },
    Smearing { smearing: usize, eps: usize },
}

impl Job {
    fn id(&self, prefix: &str) -> String {
        match self {
            Job::Joint { gen, eps } => format!("{prefix}/g{gen}/e{eps}"),
            Job::Warped { gen, warp, eps } => format!("{prefix}/g{gen}/w{warp}/e{eps}"),
            Job::Smearing { smearing, eps } => format!("{prefix}/s{smearing}/e{eps}"),
        }
    }
}

/// Rows of `verify`: every generator and every warped generator against
/// every confidence pair, then every position smearing at each `eps1`.
///
/// Rows are evaluated in parallel and returned in this fixed order.
pub fn run_verify(s: &Scenario) -> Result<Vec<ReportRow>, CliError> {
    let mut jobs = Vec::new();
    for gen in 0..s.generators.len() {
        for eps in 0..s.confidence.len() {
            jobs.push(Job::Joint { gen, eps });
        }
        for warp in 0..s.warps.len() {
            for eps in 0..s.confidence.len() {
                jobs.push(Job::Warped { gen, warp, eps });
            }
        }
    }
    for smearing in 0..s.smearings.len() {
        for eps in 0..s.confidence.len() {
            jobs.push(Job::Smearing { smearing, eps });
        }
    }
    jobs.par_iter()
        .map(|job| {
            let id = job.id(&s.id);
            evaluate(s, job, id.clone()).map_err(|source| CliError::Scenario { id, source })
        })
        .collect()
}

fn evaluate(s: &Scenario, job: &Job, id: String) -> errbar_core::Result<ReportRow> {
    match *job {
        Job::Joint { gen, eps } => {
            let r = verify_joint_ur(&s.generators[gen], s.confidence[eps], &s.calibration)?;
            Ok(ReportRow::from_width_report(id, "joint", &r))
        }
        Job::Warped { gen, warp: w, eps } => {
            let g = &s.generators[gen];
            let kq = warp(g, &s.warps[w], Axis::Q)?;
            let kp = warp(g, &s.warps[w], Axis::P)?;
            let r = verify_marginals(&kq, &kp, s.confidence[eps], s.hbar, &s.calibration, &ProbeFamily::default())?;
            Ok(ReportRow::from_width_report(id, "warped", &r))
        }
        Job::Smearing { smearing, eps } => smearing_row(s, smearing, s.confidence[eps].eps1, id),
    }
}

/// Single-axis row for `Q_mu`: checks that the error bar is not below the
/// resolution width and is controlled by the distance to `Q`.
fn smearing_row(s: &Scenario, index: usize, eps: f64, id: String) -> errbar_core::Result<ReportRow> {
    let kernel = ObservableKernel::SmearedPosition(s.smearings[index].clone());
    let a = axis_report(&kernel, eps, &s.calibration, &ProbeFamily::default())?;
    let tolerance = 2.0 * a.step;
    let mut notes = Vec::new();
    if a.error_bar.value < a.resolution_width - tolerance {
        notes.push("error bar below resolution width");
    }
    match check_distance_error_inequality(&kernel, eps, &s.calibration) {
        Ok(_) => {}
        Err(Error::RelationViolated { .. }) => notes.push("error bar exceeds (2/eps) * distance"),
        Err(e) => return Err(e),
    }
    Ok(ReportRow {
        scenario_id: id,
        kind: "smearing",
        eps1: Some(eps),
        eps2: None,
        q: AxisColumns::from_report(&a),
        p: AxisColumns::default(),
        error_bar_product: None,
        resolution_product: None,
        bound_simple: None,
        bound_uffink: None,
        margin_simple: None,
        margin_uffink: None,
        tolerance: Some(tolerance),
        pass: notes.is_empty(),
        note: notes.join("; "),
    })
}

/// Overall widths of one state and how their product compares with the bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct Widths {
    pub n: usize,
    pub dx: f64,
    pub dp: f64,
    pub width_q: f64,
    pub width_p: f64,
    pub product: f64,
    pub bound_simple: f64,
    pub bound_uffink: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Widths {
    pub fn ratio_uffink(&self) -> f64 {
        if self.bound_uffink > 0.0 {
            self.product / self.bound_uffink
        } else {
            f64::INFINITY
        }
    }
}

/// Overall widths of `state` on its natural grid of `n` points.
pub fn state_widths(state: &StateSpec, eps: ConfidencePair, n: usize, hbar: f64) -> errbar_core::Result<Widths> {
    let grid = state.natural_grid(n, hbar)?;
    let rho = state.build(grid, hbar)?;
    let dp = rho.momentum_grid().dp;
    let width_q = rho.position_distribution().overall_width(eps.eps1)?;
    let width_p = rho.momentum_distribution().overall_width(eps.eps2)?;
    let product = width_q * width_p;
    let bs = bound_simple(eps, hbar);
    let bu = bound_uffink(eps, hbar);
    let tolerance = product_tolerance(grid.dx(), dp, width_q, width_p);
    Ok(Widths {
        n,
        dx: grid.dx(),
        dp,
        width_q,
        width_p,
        product,
        bound_simple: bs,
        bound_uffink: bu,
        tolerance,
        pass: product >= bs - tolerance && product >= bu - tolerance,
    })
}

/// `widths` output: a two-column table.
pub fn widths_table(state: &StateSpec, eps: ConfidencePair, w: &Widths) -> String {
    let rows = [
        ("state", spec::describe(state)),
        ("eps", format!("{} {}", fmt_num(eps.eps1), fmt_num(eps.eps2))),
        ("grid", format!("n={} dx={} dp={}", w.n, fmt_num(w.dx), fmt_num(w.dp))),
        ("width_q", fmt_num(w.width_q)),
        ("width_p", fmt_num(w.width_p)),
        ("product", fmt_num(w.product)),
        ("bound_simple", fmt_num(w.bound_simple)),
        ("bound_uffink", fmt_num(w.bound_uffink)),
        ("ratio_uffink", fmt_num(w.ratio_uffink())),
        ("tolerance", fmt_num(w.tolerance)),
        ("pass", w.pass.to_string()),
    ];
    rows.iter().map(|(k, v)| format!("{k:<14}{v}\n")).collect()
}

pub const DEFAULT_SCAN_CAP: usize = 10_000;

/// `scan` output as CSV text, and whether every row passed.
pub fn run_scan(cfg: &ScanConfig, defaults: Defaults) -> Result<(String, bool), CliError> {
    let bad = |field: &str, reason: String| CliError::Config { field: field.into(), reason };
    let hbar = check_hbar(cfg.hbar.unwrap_or(defaults.hbar))?;
    let n = check_n(cfg.grid_n.unwrap_or(defaults.grid_n), "grid_n")?;
    let base: StateSpec = cfg.state.into();
    let names: Vec<&str> = spec::params(&base).iter().map(|(k, _)| *k).collect();

    if cfg.lattice.is_empty() || cfg.lattice.len() > 2 {
        return Err(bad("lattice", "declare one or two swept parameters".into()));
    }
    for key in cfg.lattice.keys() {
        if !names.contains(&key.as_str()) && !["eps", "eps1", "eps2"].contains(&key.as_str()) {
            return Err(bad(
                &format!("lattice.{key}"),
                format!("not a parameter of a {} state or eps", spec::kind(&base)),
            ));
        }
    }
    let sweeps_eps = |k: &str| cfg.lattice.contains_key(k);
    if sweeps_eps("eps") && (sweeps_eps("eps1") || sweeps_eps("eps2")) {
        return Err(bad("lattice.eps", "sweep either eps or eps1/eps2, not both".into()));
    }
    let covered = sweeps_eps("eps") || (sweeps_eps("eps1") && sweeps_eps("eps2"));
    if cfg.eps.is_none() && !covered {
        return Err(bad("eps", "required unless the lattice sweeps it".into()));
    }
    let cap = cfg.max_points.unwrap_or(DEFAULT_SCAN_CAP);
    let axes: Vec<(&String, Vec<f64>)> = cfg
        .lattice
        .iter()
        .map(|(k, v)| {
            let mut v = v.clone();
            v.sort_by(f64::total_cmp);
            v.dedup();
            (k, v)
        })
        .collect();
    let count = axes.iter().map(|(_, v)| v.len()).product::<usize>();
    if count > cap {
        return Err(bad("lattice", format!("{count} points exceed the cap of {cap}; coarsen the lattice")));
    }

    let mut points: Vec<BTreeMap<&str, f64>> = vec![BTreeMap::new()];
    for (key, values) in &axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |&v| {
                    let mut p = p.clone();
                    p.insert(key.as_str(), v);
                    p
                })
            })
            .collect();
    }
    if count == 0 {
        points.clear();
    }

    let rows: Vec<Result<(String, bool), CliError>> = points
        .par_iter()
        .map(|point| {
            let mut state = base;
            let (mut e1, mut e2) = cfg.eps.unwrap_or((f64::NAN, f64::NAN));
            for (&k, &v) in point {
                match k {
                    "eps" => (e1, e2) = (v, v),
                    "eps1" => e1 = v,
                    "eps2" => e2 = v,
                    _ => spec::set_param(&mut state, k, v)?,
                }
            }
            let eps = check_eps("eps", e1, e2)?;
            let label = point.iter().map(|(k, v)| format!("{k}={}", fmt_num(*v))).collect::<Vec<_>>().join(" ");
            let w = state_widths(&state, eps, n, hbar)
                .map_err(|source| CliError::Scenario { id: format!("scan point {label}"), source })?;
            let mut cells: Vec<String> = spec::params(&state).iter().map(|(_, v)| fmt_num(*v)).collect();
            cells.extend([fmt_num(eps.eps1), fmt_num(eps.eps2), w.n.to_string(), fmt_num(w.dx), fmt_num(w.dp)]);
            cells.extend(
                [w.width_q, w.width_p, w.product, w.bound_simple, w.bound_uffink, w.ratio_uffink(), w.tolerance]
                    .map(fmt_num),
            );
            cells.push(w.pass.to_string());
            Ok((cells.join(","), w.pass))
        })
        .collect();

    let mut columns: Vec<&str> = names.clone();
    columns.extend([
        "eps1",
        "eps2",
        "n",
        "dx",
        "dp",
        "width_q",
        "width_p",
        "product",
        "bound_simple",
        "bound_uffink",
        "ratio_uffink",
        "tolerance",
        "pass",
    ]);
    let mut out = format!("{CSV_HEADER}\n{}\n", columns.join(","));
    let mut all_pass = true;
    for row in rows {
        let (line, pass) = row?;
        out.push_str(&line);
        out.push('\n');
        all_pass &= pass;
    }
    Ok((out, all_pass))
}
