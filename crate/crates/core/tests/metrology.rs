use errbar_core::metrology::{GaussianFamily, Hat, TwoLobeFamily};
use errbar_core::states::gaussian_state;
use errbar_core::{
    bound_simple, bound_uffink, calibration_error, check_distance_error_inequality, error_bar_width,
    minimize_width_product, resolution_width, verify_joint_ur, werner_distance_covariant, werner_distance_lower_bound,
    Axis, CalibrationConfig, ConfidencePair, Error, GridMeasure, GridSpec, MixedState, ObservableKernel, ProbeFamily,
    StateSpec,
};
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

const DX: f64 = 0.7 / 16.0;

fn z(eps: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().inverse_cdf(1.0 - eps / 2.0)
}

fn support(reach: f64) -> GridSpec {
    let half = (reach / DX).ceil() as usize + 4;
    GridSpec::centered(2 * half + 1, DX).unwrap()
}

fn dirac(c: f64) -> ObservableKernel {
    ObservableKernel::SmearedPosition(GridMeasure::dirac(support(c.abs()), c).unwrap())
}

fn gaussian(sigma: f64) -> ObservableKernel {
    ObservableKernel::SmearedPosition(GridMeasure::gaussian(support(8.0 * sigma), 0.0, sigma).unwrap())
}

fn cfg() -> CalibrationConfig {
    CalibrationConfig::in_cells(&[8.0, 4.0, 2.0], DX, DX).unwrap().with_lattice(GridSpec::centered(4001, DX).unwrap())
}

fn pair(e1: f64, e2: f64) -> ConfidencePair {
    ConfidencePair::new(e1, e2).unwrap()
}

#[test]
fn bound_examples() {
    let tau = 2.0 * std::f64::consts::PI;
    assert!((bound_simple(pair(0.05, 0.05), 1.0) - tau * 0.81).abs() < 1e-12);
    assert!((bound_simple(pair(0.05, 0.05), 1.0) - 5.0894).abs() < 1e-4);
    assert_eq!(bound_simple(pair(0.6, 0.5), 1.0), 0.0);
    assert!((bound_simple(pair(1e-12, 1e-12), 1.0) - tau).abs() < 1e-9);

    assert!((bound_uffink(pair(0.05, 0.05), 1.0) - tau * 0.81).abs() < 1e-12);
    let direct = tau * (0.882f64.sqrt() - 0.002f64.sqrt()).powi(2);
    assert!((bound_uffink(pair(0.1, 0.02), 1.0) - direct).abs() < 1e-12);
    assert!((direct - 5.0265).abs() < 1e-3);
    assert_eq!(bound_uffink(pair(0.6, 0.5), 1.0), 0.0);
    assert!((bound_simple(pair(0.05, 0.05), 2.0) - 2.0 * bound_simple(pair(0.05, 0.05), 1.0)).abs() < 1e-12);
}

#[test]
fn resolution_examples() {
    let family = ProbeFamily::default();
    let cfg = cfg();
    for eps in [0.05, 0.2] {
        assert!(resolution_width(&ObservableKernel::SharpPosition, eps, &family, &cfg).unwrap() <= DX);
        assert!(resolution_width(&dirac(0.7), eps, &family, &cfg).unwrap() <= DX);
        for sigma in [0.3, 1.0] {
            let k = gaussian(sigma);
            let w = k.smearing().unwrap().overall_width(eps).unwrap();
            assert!((resolution_width(&k, eps, &family, &cfg).unwrap() - w).abs() <= DX);
        }
    }
    assert!(matches!(
        resolution_width(&ObservableKernel::SharpPosition, 0.05, &ProbeFamily { cells: vec![], ..family }, &cfg),
        Err(Error::EmptyFamily)
    ));
}

#[test]
fn calibration_examples() {
    let cfg = cfg();
    for eps in [0.05, 0.3] {
        for cells in [2.0, 6.0, 20.0] {
            let delta = cells * DX;
            assert!((calibration_error(&dirac(0.0), eps, delta, &cfg).unwrap() - delta).abs() <= DX);
            let c = 0.7;
            let v = calibration_error(&dirac(c), eps, delta, &cfg).unwrap();
            assert!((v - (2.0 * c + delta)).abs() <= DX, "{v}");
        }
    }
    for sigma in [0.5, 1.0] {
        let v = calibration_error(&gaussian(sigma), 0.05, 2.0 * DX, &cfg).unwrap();
        assert!((v - 2.0 * z(0.05) * sigma).abs() <= 2.0 * DX, "{v}");
    }
    assert!(calibration_error(&dirac(0.0), 0.05, 1.5 * DX, &cfg).is_err());
}

#[test]
fn error_bar_examples() {
    let cfg = cfg();
    let family = ProbeFamily::default();
    let eb = error_bar_width(&dirac(0.0), 0.05, &cfg).unwrap();
    assert!(eb.value <= 2.0 * DX + eb.spread);

    let c = 0.7;
    let eb = error_bar_width(&dirac(c), 0.05, &cfg).unwrap().value;
    let res = resolution_width(&dirac(c), 0.05, &family, &cfg).unwrap();
    assert!((eb - 2.0 * c).abs() <= 2.0 * DX, "{eb}");
    assert!(eb - res >= 2.0 * c - 2.0 * DX);

    // Symmetric smearings: the error bar is the centred quantile width.
    for (name, mu) in [
        ("gaussian", GridMeasure::gaussian(support(4.0), 0.0, 0.5).unwrap()),
        ("uniform", GridMeasure::uniform(support(1.0), -1.0, 1.0).unwrap()),
    ] {
        let k = ObservableKernel::SmearedPosition(mu.clone());
        for eps in [0.05, 0.2] {
            let eb = error_bar_width(&k, eps, &cfg).unwrap().value;
            let centred = mu.centered_width(0.0, eps).unwrap();
            let res = resolution_width(&k, eps, &family, &cfg).unwrap();
            let w = mu.overall_width(eps).unwrap();
            assert!((eb - centred).abs() <= DX, "{name} {eps}: {eb} vs {centred}");
            assert!((eb - w).abs() <= 2.0 * DX && (res - w).abs() <= 2.0 * DX, "{name} {eps}");
        }
    }
}

#[test]
fn error_bar_ladder_is_monotone() {
    let cfg = CalibrationConfig::in_cells(&[64.0, 32.0, 16.0, 8.0, 4.0, 2.0], DX, DX)
        .unwrap()
        .with_lattice(GridSpec::centered(4001, DX).unwrap());
    for k in [dirac(0.0), dirac(-0.35), gaussian(0.4)] {
        let eb = error_bar_width(&k, 0.1, &cfg).unwrap();
        for w in eb.ladder.windows(2) {
            assert!(w[1].0 < w[0].0 && w[1].1 <= w[0].1 + DX, "{:?}", eb.ladder);
        }
    }
}

#[test]
fn werner_examples() {
    let fine = GridSpec::centered(4001, 0.005).unwrap();
    assert_eq!(werner_distance_covariant(&GridMeasure::dirac(fine, 0.0).unwrap()), 0.0);
    let folded = (2.0 / std::f64::consts::PI).sqrt();
    assert!((werner_distance_covariant(&GridMeasure::gaussian(fine, 0.0, 1.0).unwrap()) - folded).abs() <= 0.005);
    for a in [0.5, 2.0] {
        let d = werner_distance_covariant(&GridMeasure::uniform(fine, -a, a).unwrap());
        assert!((d - a / 2.0).abs() <= 0.005);
    }
}

#[test]
fn werner_lower_bound_examples() {
    let g = GridSpec::centered(1024, DX).unwrap();
    let states: Vec<MixedState> =
        [-1.0, 0.0, 2.0].iter().map(|&x0| gaussian_state(x0, 0.0, 0.8, g, 1.0).unwrap().into()).collect();
    let sharp = ObservableKernel::SharpPosition;
    let hats: Vec<Hat> = [1.0, 3.0, 10.0].iter().map(|&a| Hat::clipped_identity(a).unwrap()).collect();
    assert_eq!(werner_distance_lower_bound(&sharp, &sharp, &states, &hats).unwrap(), 0.0);

    let c = 0.7;
    let mut last = 0.0;
    for a in [0.5, 1.0, 2.0, 5.0, 10.0] {
        let lb = werner_distance_lower_bound(&dirac(c), &sharp, &states, &[Hat::clipped_identity(a).unwrap()]).unwrap();
        assert!(lb >= last - 1e-12 && lb <= c + 1e-9, "{a}: {lb}");
        last = lb;
    }
    assert!((last - c).abs() < 1e-6);

    assert!(matches!(Hat::new(vec![(0.0, 0.0), (1.0, 1.5)]), Err(Error::NotLipschitz { .. })));
}

#[test]
fn distance_error_inequality_examples() {
    let cfg = cfg();
    check_distance_error_inequality(&dirac(0.7), 0.5, &cfg).unwrap();
    check_distance_error_inequality(&gaussian(0.6), 0.05, &cfg).unwrap();
    check_distance_error_inequality(&dirac(0.0), 0.2, &cfg).unwrap();
    let eb = error_bar_width(&gaussian(0.6), 0.05, &cfg).unwrap().value;
    let d = gaussian(0.6).closed_form_distance().unwrap();
    assert!(eb <= 2.0 / 0.05 * d);
    assert!((d - 0.6 * (2.0 / std::f64::consts::PI).sqrt()).abs() <= DX);
}

fn vacuum(sigma: f64, n: usize) -> (MixedState, CalibrationConfig) {
    let spec = StateSpec::Gaussian { sigma, x0: 0.0, p0: 0.0 };
    let gen = spec.build(spec.natural_grid(n, 1.0).unwrap(), 1.0).unwrap();
    let cfg = CalibrationConfig::in_cells(&[8.0, 4.0, 2.0], gen.grid().dx(), gen.momentum_grid().dp).unwrap();
    (gen, cfg)
}

#[test]
fn joint_relation_examples() {
    let oracle = 2.0 * z(0.05).powi(2);
    assert!((oracle - 7.683).abs() < 1e-3);
    let mut products = Vec::new();
    for sigma in [0.3, 1.0, 2.5] {
        let (gen, cfg) = vacuum(sigma, 2048);
        let r = verify_joint_ur(&gen, pair(0.05, 0.05), &cfg).unwrap();
        assert!(r.pass && r.positive_bound);
        assert!(r.error_bar_product >= r.bound_simple && r.resolution_product >= r.bound_simple);
        assert!((r.error_bar_product / oracle - 1.0).abs() < 0.02);
        products.push(r.error_bar_product);
    }
    let spread = products.iter().cloned().fold(0.0, f64::max) / products.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread - 1.0 < 0.01);

    let (gen, cfg) = vacuum(1.0, 1024);
    let r = verify_joint_ur(&gen, pair(0.6, 0.5), &cfg).unwrap();
    assert!(!r.positive_bound && r.bound_simple == 0.0);
    assert_eq!(r.note(), "no positive bound");
}

#[test]
fn width_product_minimization() {
    let eps = pair(0.05, 0.05);
    let g = minimize_width_product(&GaussianFamily::new(0.3, 3.0, 1024, 1.0).unwrap(), eps, 1.0).unwrap();
    assert!((g.product / (2.0 * z(0.05)).powi(2) / 0.5 - 1.0).abs() < 0.01, "{}", g.product);
    assert!(g.ratio_uffink >= 0.98);

    let lobes =
        minimize_width_product(&TwoLobeFamily::new((0.3, 1.5), (1.0, 4.0), false, 1024, 1.0).unwrap(), eps, 1.0)
            .unwrap();
    assert!(lobes.ratio_uffink >= 0.98);

    let single = StateSpec::Gaussian { sigma: 1.0, x0: 0.0, p0: 0.0 };
    let double = StateSpec::Mixture { sigma: 1.0, separation: 3.0 };
    let product = |s: &StateSpec| {
        let rho = s.build(s.natural_grid(2048, 1.0).unwrap(), 1.0).unwrap();
        errbar_core::metrology::width_product(&rho, eps).unwrap()
    };
    assert!(product(&double) > product(&single));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn uffink_dominates_simple(e1 in 0.0001..0.9999f64, t in 0.0..1.0f64) {
        let e2 = (1.0 - e1) * t;
        prop_assume!(e2 > 0.0 && e1 + e2 < 1.0);
        let eps = pair(e1, e2);
        prop_assert!(bound_uffink(eps, 1.0) >= bound_simple(eps, 1.0));
    }

    #[test]
    fn error_bar_is_at_least_the_resolution(c in -1.0..1.0f64, sigma in 0.05..0.8f64, eps in 0.02..0.6f64, offset in any::<bool>()) {
        let cfg = cfg();
        let k = if offset { dirac(c) } else { gaussian(sigma) };
        let eb = error_bar_width(&k, eps, &cfg).unwrap().value;
        let res = resolution_width(&k, eps, &ProbeFamily::default(), &cfg).unwrap();
        prop_assert!(eb.is_finite() && res.is_finite());
        prop_assert!(eb >= res - 2.0 * DX, "{eb} < {res}");
    }

    #[test]
    fn widths_are_nonincreasing_in_eps(sigma in 0.05..0.8f64, a in 0.02..0.6f64, b in 0.02..0.6f64) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let cfg = cfg();
        let k = gaussian(sigma);
        let family = ProbeFamily::default();
        prop_assert!(error_bar_width(&k, lo, &cfg).unwrap().value >= error_bar_width(&k, hi, &cfg).unwrap().value - 1e-12);
        prop_assert!(resolution_width(&k, lo, &family, &cfg).unwrap() >= resolution_width(&k, hi, &family, &cfg).unwrap() - 1e-12);
    }

    #[test]
    fn lower_bound_never_beats_the_closed_form(sigma in 0.1..1.0f64, shift in -1.0..1.0f64, a in 0.2..6.0f64, x0 in -2.0..2.0f64) {
        let g = GridSpec::centered(1024, DX).unwrap();
        let mu = GridMeasure::gaussian(support(8.0 * sigma), shift, sigma).unwrap();
        let k = ObservableKernel::SmearedPosition(mu);
        let states: Vec<MixedState> = vec![gaussian_state(x0, 0.0, 0.6, g, 1.0).unwrap().into()];
        let hats = vec![Hat::clipped_identity(a).unwrap(), Hat::tent(x0, a).unwrap()];
        let lb = werner_distance_lower_bound(&k, &ObservableKernel::SharpPosition, &states, &hats).unwrap();
        prop_assert!(lb <= k.closed_form_distance().unwrap() + DX);
    }

    #[test]
    fn phase_marginals_respect_both_propositions(sigma in 0.3..3.0f64, eps in 0.03..0.5f64) {
        let (gen, cfg) = vacuum(sigma, 512);
        let dx = gen.grid().dx();
        for axis in [Axis::Q, Axis::P] {
            let k = ObservableKernel::phase_marginal(&gen, axis).unwrap();
            let step = if axis == Axis::Q { dx } else { gen.momentum_grid().dp };
            let eb = error_bar_width(&k, eps, &cfg).unwrap().value;
            let res = resolution_width(&k, eps, &ProbeFamily::default(), &cfg).unwrap();
            prop_assert!(eb >= res - 2.0 * step);
            prop_assert!(check_distance_error_inequality(&k, eps, &cfg).is_ok());
        }
    }
}
