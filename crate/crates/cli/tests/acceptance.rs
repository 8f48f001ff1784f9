//! Acceptance criteria 1-9 at desk scale (n = 4096, hbar = 1).
//!
//! Runs as a plain binary so the one-line verdict per criterion is always
//! printed; exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use errbar_cli::config::{Defaults, ScanConfig, ScenarioConfig};
use errbar_cli::report::{csv_text, json_text};
use errbar_cli::run::{run_scan, run_verify};
use errbar_core::metrology::product_tolerance;
use errbar_core::{
    bound_simple, bound_uffink, check_distance_error_inequality, covariance_residual, error_bar_width,
    marginal_measures, resolution_width, verify_joint_ur, warp, werner_distance_covariant, Axis, CalibrationConfig,
    ConfidencePair, GridMeasure, GridSpec, MixedState, ObservableKernel, PhaseSpaceObservable, PiecewiseLinear,
    ProbeFamily, StateSpec, WarpMap,
};
use statrs::distribution::{ContinuousCDF, Normal};

const N: usize = 4096;
const HBAR: f64 = 1.0;
/// Lattice step for kernels without a state grid: c = 0.7 sits on the 16th point.
const LATTICE_DX: f64 = 0.7 / 16.0;

struct Verdict {
    pass: bool,
    detail: String,
}

type Check = fn() -> Verdict;

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

/// Two-sided normal quantile `z` with `P(|Z| <= z) = 1 - eps`.
fn z(eps: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().inverse_cdf(1.0 - eps / 2.0)
}

fn battery() -> Vec<(&'static str, StateSpec)> {
    let g = |sigma, x0, p0| StateSpec::Gaussian { sigma, x0, p0 };
    let b = |center, width| StateSpec::Box { center, width };
    let s = |sigma, separation| StateSpec::Superposition { sigma, separation };
    let m = |sigma, separation| StateSpec::Mixture { sigma, separation };
    vec![
        ("gaussian sigma=0.25", g(0.25, 0.0, 0.0)),
        ("gaussian sigma=1", g(1.0, 0.0, 0.0)),
        ("gaussian sigma=4", g(4.0, 0.0, 0.0)),
        ("gaussian sigma=1 at (1.5,-2)", g(1.0, 1.5, -2.0)),
        ("box width=0.5", b(0.0, 0.5)),
        ("box width=1", b(0.0, 1.0)),
        ("box width=2", b(0.0, 2.0)),
        ("box width=1 at 1", b(1.0, 1.0)),
        ("superposition sigma=0.3 sep=2", s(0.3, 2.0)),
        ("superposition sigma=0.5 sep=3", s(0.5, 3.0)),
        ("superposition sigma=1 sep=5", s(1.0, 5.0)),
        ("mixture sigma=0.5 sep=3", m(0.5, 3.0)),
        ("mixture sigma=1 sep=5", m(1.0, 5.0)),
    ]
}

fn build(spec: &StateSpec) -> MixedState {
    let grid = spec.natural_grid(N, HBAR).unwrap();
    spec.build(grid, HBAR).unwrap()
}

/// Worst `product - (bound - tolerance)` over the battery for one bound.
fn state_relation(bound: fn(ConfidencePair, f64) -> f64) -> Verdict {
    let mut violations = Vec::new();
    let mut min_ratio = f64::INFINITY;
    let mut cases = 0;
    for (name, spec) in battery() {
        let rho = build(&spec);
        let dx = rho.grid().dx();
        let dp = rho.momentum_grid().dp;
        let pq = rho.position_distribution();
        let pp = rho.momentum_distribution();
        for eps in [0.01, 0.05, 0.1, 0.2] {
            let wq = pq.overall_width(eps).unwrap();
            let wp = pp.overall_width(eps).unwrap();
            let b = bound(ConfidencePair::symmetric(eps).unwrap(), HBAR);
            let tol = product_tolerance(dx, dp, wq, wp);
            min_ratio = min_ratio.min(wq * wp / b);
            cases += 1;
            if wq * wp < b - tol {
                violations.push(format!("{name} eps={eps}: {} < {b}", wq * wp));
            }
        }
    }
    verdict(
        violations.is_empty(),
        format!(
            "{cases} cases, {} violations, min product/bound = {min_ratio:.4} (tolerance 2dx*W_p + 2dp*W_q + 4dx*dp){}",
            violations.len(),
            if violations.is_empty() { String::new() } else { format!(": {}", violations.join("; ")) }
        ),
    )
}

fn criterion_1() -> Verdict {
    state_relation(bound_simple)
}

fn criterion_2() -> Verdict {
    let states = state_relation(bound_uffink);
    let mut compared = 0;
    let mut bad = Vec::new();
    for i in 1..=100 {
        for j in 1..=100 {
            let (e1, e2) = (i as f64 / 101.0, j as f64 / 101.0);
            if e1 + e2 >= 1.0 {
                continue;
            }
            let eps = ConfidencePair::new(e1, e2).unwrap();
            compared += 1;
            if bound_uffink(eps, HBAR) < bound_simple(eps, HBAR) {
                bad.push((e1, e2));
            }
        }
    }
    verdict(
        states.pass && bad.is_empty(),
        format!("{}; exact sweep: {compared} pairs, {} with uffink < simple", states.detail, bad.len()),
    )
}

fn lattice() -> GridSpec {
    GridSpec::centered(4001, LATTICE_DX).unwrap()
}

fn smearing_grid(reach: f64) -> GridSpec {
    let half = (reach / LATTICE_DX).ceil() as usize + 4;
    GridSpec::centered(2 * half + 1, LATTICE_DX).unwrap()
}

fn smearings() -> Vec<(&'static str, GridMeasure)> {
    vec![
        ("delta_0", GridMeasure::dirac(smearing_grid(0.0), 0.0).unwrap()),
        ("delta_0.7", GridMeasure::dirac(smearing_grid(0.7), 0.7).unwrap()),
        ("gaussian 0.5", GridMeasure::gaussian(smearing_grid(4.0), 0.0, 0.5).unwrap()),
        ("uniform[-1,1]", GridMeasure::uniform(smearing_grid(1.0), -1.0, 1.0).unwrap()),
    ]
}

fn lattice_cfg() -> CalibrationConfig {
    CalibrationConfig::in_cells(&[8.0, 4.0, 2.0], LATTICE_DX, LATTICE_DX).unwrap().with_lattice(lattice())
}

fn criterion_3() -> Verdict {
    let cfg = lattice_cfg();
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for (name, mu) in smearings() {
        let kernel = ObservableKernel::SmearedPosition(mu.clone());
        for eps in [0.05, 0.2] {
            let gamma = resolution_width(&kernel, eps, &ProbeFamily::default(), &cfg).unwrap();
            let w = mu.overall_width(eps).unwrap();
            worst = worst.max((gamma - w).abs() / LATTICE_DX);
            lines.push(format!("{name}@{eps}: {gamma:.4} vs {w:.4}"));
        }
    }
    verdict(worst <= 2.0, format!("max |gamma - W| = {worst:.3} dx; {}", lines.join(", ")))
}

/// Generator on its natural grid with an 8/4/2-cell ladder on both axes.
fn generator(sigma: f64) -> (MixedState, CalibrationConfig) {
    let gen = build(&StateSpec::Gaussian { sigma, x0: 0.0, p0: 0.0 });
    let dx = gen.grid().dx();
    let dp = gen.momentum_grid().dp;
    let cfg = CalibrationConfig::in_cells(&[8.0, 4.0, 2.0], dx, dp).unwrap();
    (gen, cfg)
}

fn test_warp() -> WarpMap {
    WarpMap::new(
        PiecewiseLinear::sinusoidal(0.5, 4.0, -8.0, 4, 32).unwrap(),
        PiecewiseLinear::sinusoidal(0.25, 2.0, -4.0, 4, 32).unwrap(),
    )
}

/// Warped-kernel calibration of the sigma = 1 generator with probe centres.
fn warped_cfg(cfg: &CalibrationConfig) -> CalibrationConfig {
    cfg.clone().with_centers(vec![-2.0, -0.5, 0.0, 0.37, 1.0, 2.0], Some(vec![-1.0, -0.25, 0.0, 0.2, 0.5, 1.0]))
}

/// Every kernel of the battery with its calibration config and step.
fn kernel_battery(include_warped: bool) -> Vec<(String, ObservableKernel, CalibrationConfig, f64)> {
    let mut out = Vec::new();
    let lcfg = lattice_cfg();
    for (name, mu) in smearings() {
        out.push((format!("Q[{name}]"), ObservableKernel::SmearedPosition(mu.clone()), lcfg.clone(), LATTICE_DX));
        out.push((format!("P[{name}]"), ObservableKernel::SmearedMomentum(mu), lcfg.clone(), LATTICE_DX));
    }
    out.push(("Q".into(), ObservableKernel::SharpPosition, lcfg.clone(), LATTICE_DX));
    out.push(("P".into(), ObservableKernel::SharpMomentum, lcfg, LATTICE_DX));
    for sigma in [0.3, 1.0, 3.0] {
        let (gen, cfg) = generator(sigma);
        let (dx, dp) = (gen.grid().dx(), gen.momentum_grid().dp);
        out.push((format!("G{sigma}_Q"), ObservableKernel::phase_marginal(&gen, Axis::Q).unwrap(), cfg.clone(), dx));
        out.push((format!("G{sigma}_P"), ObservableKernel::phase_marginal(&gen, Axis::P).unwrap(), cfg.clone(), dp));
        if include_warped && sigma == 1.0 {
            let wcfg = warped_cfg(&cfg);
            out.push((format!("warped G{sigma}_Q"), warp(&gen, &test_warp(), Axis::Q).unwrap(), wcfg.clone(), dx));
            out.push((format!("warped G{sigma}_P"), warp(&gen, &test_warp(), Axis::P).unwrap(), wcfg, dp));
        }
    }
    out
}

fn criterion_4() -> Verdict {
    let family = ProbeFamily::default();
    let mut checked = 0;
    let mut bad = Vec::new();
    for (name, kernel, cfg, step) in kernel_battery(true) {
        for eps in [0.05, 0.2] {
            let eb = error_bar_width(&kernel, eps, &cfg).unwrap().value;
            let res = resolution_width(&kernel, eps, &family, &cfg).unwrap();
            checked += 1;
            if eb < res - 2.0 * step {
                bad.push(format!("{name}@{eps}: {eb} < {res}"));
            }
        }
    }
    let (_, offset) = smearings().swap_remove(1);
    let kernel = ObservableKernel::SmearedPosition(offset);
    let cfg = lattice_cfg();
    let eb = error_bar_width(&kernel, 0.05, &cfg).unwrap().value;
    let res = resolution_width(&kernel, 0.05, &family, &cfg).unwrap();
    let gap_ok =
        (eb - 1.4).abs() <= 2.0 * LATTICE_DX && res <= 2.0 * LATTICE_DX && (eb - res - 1.4).abs() <= 2.0 * LATTICE_DX;
    verdict(
        bad.is_empty() && gap_ok,
        format!(
            "{checked} kernel/eps pairs, {} below resolution - 2dx{}; delta_0.7: error bar {eb:.4} (|-1.4| = {:.2} dx), resolution {res:.4} ({:.2} dx), gap {:.4}",
            bad.len(),
            if bad.is_empty() { String::new() } else { format!(" ({})", bad.join("; ")) },
            (eb - 1.4).abs() / LATTICE_DX,
            res / LATTICE_DX,
            eb - res
        ),
    )
}

fn criterion_5() -> Verdict {
    let eps = ConfidencePair::symmetric(0.05).unwrap();
    let oracle = 2.0 * HBAR * z(0.05).powi(2);
    let bound = bound_simple(eps, HBAR);
    let mut pass = true;
    let mut lines = Vec::new();
    for sigma in [0.3, 1.0, 3.0] {
        let (gen, cfg) = generator(sigma);
        let r = verify_joint_ur(&gen, eps, &cfg).unwrap();
        let rel = r.error_bar_product / oracle - 1.0;
        pass &= rel.abs() <= 0.02 && r.error_bar_product > bound && r.resolution_product >= bound;
        lines.push(format!(
            "sigma={sigma}: error-bar product {:.4} ({:+.2}%), resolution product {:.4}",
            r.error_bar_product,
            100.0 * rel,
            r.resolution_product
        ));
    }
    verdict(pass, format!("oracle 2z^2 = {oracle:.4}, bound {bound:.4}; {}", lines.join("; ")))
}

fn criterion_6() -> Verdict {
    let (gen, cfg) = generator(1.0);
    let grid = *gen.grid();
    let (dx, dp) = (grid.dx(), gen.momentum_grid().dp);
    let rho: MixedState = StateSpec::Gaussian { sigma: 0.8, x0: 0.5, p0: 0.3 }.build(grid, HBAR).unwrap();
    let g = PhaseSpaceObservable::new(gen.clone()).unwrap();
    let mut covariant: f64 = 0.0;
    for (k, m) in [(4, 0), (0, 3), (8, -5)] {
        covariant = covariant.max(covariance_residual(&g, &rho, k as f64 * dx, m as f64 * dp).unwrap());
    }
    let w = test_warp();
    let warped_obs = PhaseSpaceObservable::new(gen.clone()).unwrap().warped(w.clone());
    let warped = covariance_residual(&warped_obs, &rho, 4.0 * dx, 0.0).unwrap();

    let wcfg = warped_cfg(&cfg);
    let mut bars_ok = true;
    let mut lines = Vec::new();
    for (axis, bound, step) in [(Axis::Q, w.bound_q, dx), (Axis::P, w.bound_p, dp)] {
        let plain = error_bar_width(&ObservableKernel::phase_marginal(&gen, axis).unwrap(), 0.05, &cfg).unwrap().value;
        let bent = error_bar_width(&warp(&gen, &w, axis).unwrap(), 0.05, &wcfg).unwrap().value;
        let diff = (bent - plain).abs();
        bars_ok &= bent.is_finite() && diff <= 2.0 * bound + 2.0 * step;
        lines.push(format!("{axis:?}: {plain:.4} -> {bent:.4} (|diff| {diff:.4}, bound {bound})"));
    }
    verdict(
        covariant <= 1e-6 && warped > 1e-3 && bars_ok,
        format!(
            "covariant residual {covariant:.2e}, warped residual {warped:.2e}; warped error bars {}",
            lines.join(", ")
        ),
    )
}

fn criterion_7() -> Verdict {
    let mut pass = true;
    let mut lines = Vec::new();
    for sigma in [0.3, 1.0, 3.0] {
        let (gen, _) = generator(sigma);
        let (mu, nu) = marginal_measures(&gen).unwrap();
        let (dq, dp) = (werner_distance_covariant(&mu), werner_distance_covariant(&nu));
        let fold = (2.0 / PI).sqrt();
        let sigma_p = HBAR / (2.0 * sigma);
        let product = dq * dp;
        pass &= product >= 0.3047 * HBAR
            && (dq - sigma * fold).abs() <= gen.grid().dx()
            && (dp - sigma_p * fold).abs() <= gen.momentum_grid().dp;
        lines.push(format!("sigma={sigma}: d_Q {dq:.5} d_P {dp:.5} product {product:.5}"));
    }
    verdict(pass, format!("hbar/pi = {:.5}; {}", HBAR / PI, lines.join("; ")))
}

fn criterion_8() -> Verdict {
    let mut checked = 0;
    let mut bad = Vec::new();
    for (name, kernel, cfg, _) in kernel_battery(false) {
        for eps in [0.05, 0.2, 0.5] {
            checked += 1;
            if let Err(e) = check_distance_error_inequality(&kernel, eps, &cfg) {
                bad.push(format!("{name}@{eps}: {e}"));
            }
        }
    }
    verdict(
        bad.is_empty(),
        format!(
            "{checked} kernel/eps pairs, {} violations{}",
            bad.len(),
            if bad.is_empty() { String::new() } else { format!(": {}", bad.join("; ")) }
        ),
    )
}

const SCENARIO: &str = r#"{
  "id": "acc",
  "grid": { "x_min": -113.4, "x_max": 113.4 },
  "confidence": [[0.05, 0.05], [0.6, 0.5]],
  "generators": [{ "gaussian": { "sigma": 1.0 } }],
  "smearings": [{ "delta": { "c": 0.7 } }, { "uniform": { "a": -1.0, "b": 1.0 } }],
  "warps": [{ "gamma_q": { "sinusoidal": { "amplitude": 0.5, "period": 4.0, "start": -8.0, "periods": 4, "pieces_per_period": 32 } } }],
  "calibration": { "delta_ladder_cells": [8, 4, 2], "probe_centers": [-1.0, 0.0, 0.37, 1.0] }
}"#;

const SCAN: &str = r#"{
  "state": { "gaussian": { "sigma": 1.0 } },
  "lattice": { "sigma": [4, 0.25, 1, 0.5, 2], "eps": [0.05, 0.2] }
}"#;

fn reports_on(threads: usize) -> (String, String, String) {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| {
        let defaults = Defaults { hbar: HBAR, grid_n: N };
        let scenario = serde_json::from_str::<ScenarioConfig>(SCENARIO).unwrap().build("acc", defaults).unwrap();
        let rows = run_verify(&scenario).unwrap();
        let scan: ScanConfig = serde_json::from_str(SCAN).unwrap();
        (csv_text(&rows), json_text(&rows), run_scan(&scan, defaults).unwrap().0)
    })
}

fn criterion_9() -> Verdict {
    let mut worst_norm: f64 = 0.0;
    for (_, spec) in battery() {
        let rho = build(&spec);
        let dp = rho.momentum_grid().dp;
        for (_, psi) in rho.components() {
            let q: f64 = psi.amps().iter().map(|a| a.norm_sqr()).sum::<f64>() * psi.grid().dx();
            let p: f64 = psi.momentum_amplitudes().iter().map(|a| a.norm_sqr()).sum::<f64>() * dp;
            worst_norm = worst_norm.max((q - 1.0).abs()).max((p - 1.0).abs());
        }
    }

    let grid = GridSpec::centered(2001, 0.01).unwrap();
    let a = GridMeasure::gaussian(grid, 0.0, 0.6).unwrap();
    let b = GridMeasure::gaussian(grid, 0.0, 0.8).unwrap();
    let u = GridMeasure::uniform(grid, -1.0, 1.0).unwrap();
    let rel = |got: f64, want: f64| (got / want - 1.0).abs();
    let analytic = rel(a.convolve(&b).unwrap().variance(), 1.0);
    let additive = rel(u.convolve(&b).unwrap().variance(), u.variance() + b.variance());

    let first = reports_on(1);
    let second = reports_on(4);
    let identical = first == second;
    verdict(
        worst_norm <= 1e-9 && analytic <= 1e-4 && additive <= 1e-4 && identical,
        format!(
            "max Parseval defect {worst_norm:.1e}; variance additivity rel. error {analytic:.1e} (0.6*0.8 Gaussians), {additive:.1e} (uniform*Gaussian); reports byte-identical across runs and thread counts: {identical}"
        ),
    )
}

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("state uncertainty relation", criterion_1),
        ("Uffink refinement", criterion_2),
        ("resolution of smeared position equals overall width of the smearing", criterion_3),
        ("error bar never below resolution width", criterion_4),
        ("joint measurement relation for Gaussian generators", criterion_5),
        ("covariance and the warped non-covariant example", criterion_6),
        ("Werner constant", criterion_7),
        ("error bar controlled by distance", criterion_8),
        ("numerical hygiene", criterion_9),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        failed += usize::from(!v.pass);
        println!(
            "criterion {}: {} - {title} [{:.1}s] {}",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
