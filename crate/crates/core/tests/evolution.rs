use qsense::evolution::{generator_finite_difference, propagate, DEFAULT_TOL};
use qsense::noise::stream;
use qsense::pseudo_hermitian::{generator_closed, DilatedFamily, PseudoHermitianParams};
use qsense::random::RandomFamily;

fn grid(stop: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| stop * k as f64 / (count - 1) as f64).collect()
}

#[test]
fn dilated_generator_matches_closed_form() {
    let p = PseudoHermitianParams::new(0.1, 1.0, 0.2).unwrap();
    let family = DilatedFamily::new(0.1, 1.0).unwrap();
    let times = grid(2.0 * p.tau(), 41);
    let record = propagate(&family, 0.2, &times, DEFAULT_TOL).unwrap();
    assert!(record.generators[0].matrix().max_abs() == 0.0);
    for (t, h) in times.iter().zip(&record.generators) {
        let exact = generator_closed(&p, *t).unwrap();
        let diff = exact.matrix().max_abs_diff(h.matrix());
        assert!(diff <= 1e-8, "t = {t}: {diff:e}");
    }
    assert!(record.unitarity_error <= 10.0 * DEFAULT_TOL);
}

#[test]
fn dilated_generator_matches_finite_difference() {
    let family = DilatedFamily::new(0.1, 1.0).unwrap();
    let times = [0.0, 0.8, 1.7, 2.5];
    let record = propagate(&family, 0.2, &times, 1e-10).unwrap();
    for (k, &t) in times.iter().enumerate() {
        let fd = generator_finite_difference(&family, 0.2, t, 1e-4, 1e-10).unwrap();
        let diff = fd.matrix().max_abs_diff(record.generators[k].matrix());
        assert!(diff <= 1e-6, "t = {t}: {diff:e}");
    }
}

#[test]
fn random_families_generator_routes_agree() {
    for (dim, seed) in [(2, 11), (2, 12), (4, 13), (4, 14)] {
        let mut rng = stream(seed, 0);
        let family = RandomFamily::new(&mut rng, dim);
        let times = grid(2.0, 5);
        let record = propagate(&family, 0.3, &times, 1e-10).unwrap();
        assert!(record.unitarity_error <= 1e-9);
        for (k, &t) in times.iter().enumerate().skip(1) {
            let fd = generator_finite_difference(&family, 0.3, t, 1e-4, 1e-10).unwrap();
            let diff = fd.matrix().max_abs_diff(record.generators[k].matrix());
            assert!(diff <= 1e-6, "dim {dim} t {t}: {diff:e}");
        }
    }
}

#[test]
fn halving_tolerance_stays_within_coarse_tolerance() {
    for seed in 0..4 {
        let mut rng = stream(seed, 1);
        let family = RandomFamily::new(&mut rng, 4);
        let times = grid(3.0, 7);
        for tol in [1e-7, 1e-9] {
            let coarse = propagate(&family, -0.4, &times, tol).unwrap();
            let fine = propagate(&family, -0.4, &times, tol / 2.0).unwrap();
            for (a, b) in coarse.unitaries.iter().zip(&fine.unitaries) {
                assert!(a.max_abs_diff(b) <= tol, "seed {seed} tol {tol}");
            }
        }
    }
}
