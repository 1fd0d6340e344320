mod common;

use qsense::noise::{sample_projection_with, stream};
use qsense::pt_ep::*;

const TOL: f64 = 1e-12;

#[test]
fn exceptional_point_regressions() {
    // J = 1, w = 1: the first sign change of PJ - PG in (0.01, 3).
    let g = find_ep(1.0, 1.0, 0.01, 3.0, 1e-12, TOL).unwrap();
    assert!((g - 0.618_033_988_749_6).abs() < 1e-11, "{g}");
    let below = ep_indicator(1.0, 1.0, g - 1e-3, TOL).unwrap();
    let above = ep_indicator(1.0, 1.0, g + 1e-3, TOL).unwrap();
    assert!(below * above < 0.0);

    let defaults = default_params(TOL).unwrap();
    assert!((defaults.gamma - 1.118_006_162_559_8).abs() < 1e-11, "{}", defaults.gamma);
    assert!((defaults.c0() - 108.103_949_827).abs() < 1e-6);
}

#[test]
fn bisection_tolerance_is_respected() {
    let coarse = find_ep(1.0, 3.0, 0.01, 3.0, 1e-4, TOL).unwrap();
    let fine = find_ep(1.0, 3.0, 0.01, 3.0, 5e-5, TOL).unwrap();
    let exact = find_ep(1.0, 3.0, 0.01, 3.0, 1e-13, TOL).unwrap();
    assert!((coarse - exact).abs() <= 1e-4);
    assert!((fine - exact).abs() <= 5e-5);
}

#[test]
fn determinant_and_population_bounds() {
    let p = default_params(TOL).unwrap();
    for wd in [0.5, 1.7, 2.9, 4.4] {
        let u = propagate_period(&p.with_omega_delta(wd), TOL).unwrap();
        assert!((u.det().norm() - 1.0).abs() < 1e-9);
        let (pj, pg) = pj_pgamma(&u);
        assert!(pj >= 0.0 && pj <= p.c0() + 1e-9);
        assert!(pg >= 0.0 && pg <= p.c0() + 1e-9);
    }
}

#[test]
fn variance_formula_equals_delta_method_composition() {
    let c0 = 1.8;
    let period = 2.0;
    for k in 0..100 {
        let pg = 0.05 + 0.6 * (k as f64 / 99.0);
        let pj = pg + 0.01 + 0.97 * ((k * 37 % 100) as f64 / 99.0);
        let direct = response_variance(pj, pg, c0, 7, period).unwrap();
        let composed = response_variance_delta_method(pj, pg, c0, 7, period).unwrap();
        assert!((direct - composed).abs() <= 1e-12 * direct.max(1.0), "{pj} {pg}");
    }
}

#[test]
fn variance_monte_carlo_mid_range() {
    let (pj, pg, c0, nu, period) = (0.8, 0.3, 1.5, 10_000u64, 1.3);
    let expected = response_variance(pj, pg, c0, nu, period).unwrap();
    let mut rng = stream(99, 0);
    let trials = 20_000;
    let mut energies = Vec::with_capacity(trials);
    for _ in 0..trials {
        let sj = sample_projection_with(pj, c0, nu, &mut rng).unwrap();
        let sg = sample_projection_with(pg, c0, nu, &mut rng).unwrap();
        energies.push(response_energy(sj, sg, period).unwrap());
    }
    let (_, var) = qsense::noise::mean_and_variance(&energies);
    assert!((var - expected).abs() <= 0.1 * expected, "{var} vs {expected}");
}

#[test]
fn susceptibility_step_halving_is_stable() {
    let p = default_params(TOL).unwrap();
    for wd in [1.8, 2.4] {
        let q = p.with_omega_delta(wd);
        let a = ep_susceptibility(&q, Some(1e-4 * wd), TOL).unwrap();
        let b = ep_susceptibility(&q, Some(5e-5 * wd), TOL).unwrap();
        assert!((a - b).abs() <= 1e-6 * a, "{a} {b}");
    }
}

#[test]
fn approach_to_dip_cancels_divergences() {
    let p = default_params(TOL).unwrap();
    let dip = find_dip(&p, 1.5, 3.5, 1e-13, TOL).unwrap();
    assert!((dip - 3.003_461_027_888).abs() < 1e-9, "{dip}");
    let points: Vec<EpPoint> = (0..20)
        .map(|k| {
            let d = 1e-2 * 10f64.powf(-4.0 * k as f64 / 19.0);
            ep_sensitivity(&p.with_omega_delta(dip - d), Some(d / 20.0), TOL).unwrap()
        })
        .collect();
    let sens: Vec<f64> = points.iter().map(|q| q.sensitivity).collect();
    let (lo, hi) = sens.iter().fold((f64::MAX, f64::MIN), |(a, b), &s| (a.min(s), b.max(s)));
    assert!(hi / lo < 1.5);
    let first = points.first().unwrap();
    let last = points.last().unwrap();
    assert!(last.chi_e / first.chi_e > 10.0);
    assert!((last.var_e / first.var_e).sqrt() > 10.0);
    // The last two decades move the sensitivity by far less than 20 %.
    let tail = &sens[10..];
    let (tlo, thi) = tail.iter().fold((f64::MAX, f64::MIN), |(a, b), &s| (a.min(s), b.max(s)));
    assert!(thi / tlo < 1.2);
}

#[test]
fn scan_fixture() {
    let params = default_params(TOL).unwrap();
    let spec = ScanSpec { params, start: 1.5, stop: 3.5, count: 201, tol: 1e-10, relative_step: None };
    let rows = scan(&spec).unwrap();
    let kept: Vec<&EpScanRow> = rows.iter().filter(|r| !r.is_excluded()).collect();
    assert!(kept.len() > 100);
    for r in &kept {
        let d = r.pj - r.pgamma;
        assert!(d > DOMAIN_MARGIN && d < 1.0 - DOMAIN_MARGIN);
        assert!(r.sensitivity >= r.hermitian_bound - 1e-9, "{r:?}");
    }
    for r in rows.iter().filter(|r| r.is_excluded()) {
        assert!(r.omega_delta > 3.0);
    }
    let values: Vec<Vec<f64>> = rows.iter().map(|r| r.values().to_vec()).collect();
    common::check_fixture("scan_ep_defaults.csv", &EpScanRow::COLUMNS[..8], &values, 1e-6);
}
