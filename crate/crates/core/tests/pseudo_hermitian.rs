mod common;

use num_complex::Complex64 as C64;

use qsense::evolution::{propagate, propagate_unitary};
use qsense::pseudo_hermitian::*;
use qsense::qfi::qfi_series;

fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    linspace(lo, hi, count)
}

#[test]
fn dilation_reproduces_two_level_population() {
    let base = PseudoHermitianParams::new(0.1, 1.0, 0.0).unwrap();
    let times = grid(0.0, 2.0 * base.tau(), 20);
    for lam in grid(-1.0, 1.0, 50) {
        let p = base.with_lambda(lam);
        let conditional = conditional_populations(&p, &times, 1e-12).unwrap();
        for (t, c) in times.iter().zip(&conditional) {
            let value = c.value.expect("success probability stays above the floor");
            assert!((value - two_level_population(&p, *t)).abs() <= 1e-8, "lam {lam} t {t}");
            assert!((c.p00 - p1_closed(&p, *t).unwrap()).abs() <= 1e-10, "lam {lam} t {t}");
            assert!(c.success_probability > 0.0 && c.success_probability <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn dilation_single_points() {
    let p = PseudoHermitianParams::new(0.1, 1.0, 0.0).unwrap();
    let start = conditional_population_from_dilation(&p, 0.0, 1e-12).unwrap();
    assert_eq!(start.value, Some(1.0));
    let dip = conditional_population_from_dilation(&p, p.tau(), 1e-12).unwrap();
    assert!(dip.value.unwrap() < 1e-10);
}

#[test]
fn probe_is_balanced_in_the_sigma_y_basis() {
    let psi = probe_state(0.1).unwrap();
    let a = psi.amplitudes();
    // Ancilla amplitudes with the system in |0>; |+-y> = (|0> +- i|1>)/sqrt 2.
    let plus = (a[0] - C64::i() * a[2]) / 2f64.sqrt();
    let minus = (a[0] + C64::i() * a[2]) / 2f64.sqrt();
    assert!((plus.norm_sqr() - minus.norm_sqr()).abs() < 1e-15);
}

#[test]
fn closed_forms_match_numerics() {
    for eps in [0.1, 0.01] {
        for lam in [-0.2, 0.0, 0.3] {
            let p = PseudoHermitianParams::new(eps, 1.0, lam).unwrap();
            let family = DilatedFamily::new(eps, 1.0).unwrap();
            let times = grid(0.0, 2.0 * p.tau(), 25);
            let record = propagate(&family, lam, &times, 1e-11).unwrap();
            let series = qfi_series(&record, &probe_state(eps).unwrap(), &family).unwrap();
            for (k, &t) in times.iter().enumerate().skip(1) {
                let exact = qfi_closed(&p, t);
                assert!((series.qfi[k] - exact).abs() <= 1e-8 * exact, "eps {eps} lam {lam} t {t}");
                let rate = qfi_rate_closed(&p, t);
                assert!((series.sqrt_qfi_rate[k] - rate).abs() <= 1e-5, "eps {eps} lam {lam} t {t}");
                assert!(rate.abs() <= 2.0 + 1e-12);
                assert!(series.qfi[k].sqrt() <= 2.0 * t + 1e-8);
            }
        }
    }
}

#[test]
fn ancilla_population_matches_direct_propagation() {
    let base = PseudoHermitianParams::new(0.01, 1.3, 0.0).unwrap();
    let family = DilatedFamily::new(0.01, 1.3).unwrap();
    let psi = probe_state(0.01).unwrap();
    let times = grid(0.0, 3.0 * base.tau(), 13);
    for lam in grid(-0.5, 0.5, 11) {
        let us = propagate_unitary(&family, lam, &times, 1e-12).unwrap();
        for (t, u) in times.iter().zip(&us) {
            let direct = psi.evolve(u).unwrap().probability(0);
            assert!((direct - p1_closed(&base.with_lambda(lam), *t).unwrap()).abs() <= 1e-10);
        }
    }
}

#[test]
fn sensitivity_never_beats_hermitian_bound() {
    for eps in [0.1, 0.01, 0.001] {
        let base = PseudoHermitianParams::new(eps, 1.0, 0.0).unwrap();
        let t = base.tau();
        let bound = hermitian_bound(t, 1).unwrap();
        let mut undefined = 0;
        for lam in grid(-0.5, 0.5, 501) {
            match sensitivity(&base.with_lambda(lam), t, 1).unwrap() {
                Sensitivity::Finite(v) => assert!(v >= bound - 1e-9, "eps {eps} lam {lam}: {v} < {bound}"),
                Sensitivity::Divergent => {}
                Sensitivity::Undefined => undefined += 1,
            }
        }
        assert_eq!(undefined, 1, "only the exact dip at lambda = 0 is a 0/0 point");
    }
}

#[test]
fn susceptibility_peak_grows_but_sensitivity_stays_finite() {
    let peaks: Vec<SusceptibilityPeak> =
        [0.1, 0.01, 0.001].iter().map(|&e| max_susceptibility(e, 1.0, -0.5, 0.5, 501).unwrap()).collect();
    for w in peaks.windows(2) {
        assert!(w[1].chi >= 5.0 * w[0].chi, "{:?}", w);
    }
    let p = PseudoHermitianParams::new(0.001, 1.0, peaks[2].lam).unwrap();
    let s = sensitivity(&p, p.tau(), 1).unwrap();
    assert!(matches!(s, Sensitivity::Finite(v) if v.is_finite() && v >= hermitian_bound(p.tau(), 1).unwrap()));
    let low = conditional_population_from_dilation(&p, p.tau(), 1e-12).unwrap();
    assert!(low.success_probability < 0.01);
}

#[test]
fn sweep_fixture() {
    let spec = SweepSpec { epsilon: 0.1, omega: 1.0, nu: 1, lam_start: -0.5, lam_stop: 0.5, count: 201, tol: 1e-10 };
    let rows = sweep(&spec).unwrap();
    assert_eq!(rows.len(), 201);
    for r in &rows {
        assert!((0.0..=1.0).contains(&r.s) && (0.0..=1.0).contains(&r.p1));
        if let Sensitivity::Finite(v) = r.sensitivity {
            assert!(v >= r.hermitian_bound - 1e-9);
        }
    }
    assert_eq!(rows.iter().filter(|r| r.flag.is_some()).count(), 1);
    let values: Vec<Vec<f64>> = rows.iter().map(|r| r.values().to_vec()).collect();
    common::check_fixture("sweep_ph_eps0.1.csv", &SweepRow::COLUMNS, &values, 1e-8);
}
