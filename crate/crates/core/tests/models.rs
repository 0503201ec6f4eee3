use geodesy_core::models::axisym;
use geodesy_core::models::boundary::{boundary_classify, BoundaryClass};
use geodesy_core::models::gowdy::{self, avtd, vtd_residuals, AvtdParams, Fourier, GowdyFields};
use geodesy_core::models::weyl::{weyl_k, weyl_psi, WeylCoefficients};
use geodesy_core::solvers::convergence::fit_order;
use geodesy_core::verify::{self, Model, Suite};
use geodesy_core::{Error, FieldMap};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn series(a: &[f64]) -> WeylCoefficients {
    WeylCoefficients::new(a.to_vec()).unwrap()
}

#[test]
fn monopole_values_at_three_four() {
    let c = series(&[-1.0]);
    let (psi, _) = weyl_psi(&c, [3.0, 4.0]).unwrap();
    let k = weyl_k(&c, [3.0, 4.0]).unwrap();
    assert!((psi + 0.2).abs() <= 1e-12, "{psi}");
    assert!((k + 0.0072).abs() <= 1e-12, "{k}");
    // Curzon: k = −m²ρ²/(2r⁴) with m = 1, r = 5.
    assert!((k - -9.0 / (2.0 * 625.0)).abs() <= 1e-15);
    assert!((psi - axisym::curzon_psi(1.0, [3.0, 4.0])).abs() <= 1e-15);
}

#[test]
fn dipole_is_z_over_r_cubed() {
    let c = series(&[0.0, 1.0]);
    for p in [[1.0f64, 0.5], [2.0, -3.0], [0.3, 4.0]] {
        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
        let (psi, _) = weyl_psi(&c, p).unwrap();
        assert!((psi - p[1] / r.powi(3)).abs() <= 1e-12);
    }
}

#[test]
fn empty_series_vanishes_and_origin_is_rejected() {
    let c = series(&[]);
    assert_eq!(weyl_psi(&c, [1.0, 2.0]).unwrap().0, 0.0);
    assert_eq!(weyl_k(&c, [1.0, 2.0]).unwrap(), 0.0);
    assert!(matches!(weyl_psi(&series(&[1.0]), [0.0, 0.0]), Err(Error::MultipoleOrigin)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn weyl_gradient_and_k_match_finite_differences(
        a in prop::collection::vec(-1.0f64..1.0, 1..5),
        rho in 1.0f64..4.0,
        z in -3.0f64..3.0,
    ) {
        let c = WeylCoefficients::new(a).unwrap();
        let h = 1e-5;
        let psi = |p| weyl_psi(&c, p).unwrap().0;
        let k = |p| weyl_k(&c, p).unwrap();
        let (_, [pr, pz]) = weyl_psi(&c, [rho, z]).unwrap();
        let fd_r = (psi([rho + h, z]) - psi([rho - h, z])) / (2.0 * h);
        let fd_z = (psi([rho, z + h]) - psi([rho, z - h])) / (2.0 * h);
        prop_assert!((pr - fd_r).abs() <= 1e-7 && (pz - fd_z).abs() <= 1e-7);
        let kr = (k([rho + h, z]) - k([rho - h, z])) / (2.0 * h);
        let kz = (k([rho, z + h]) - k([rho, z - h])) / (2.0 * h);
        prop_assert!((kr - rho * (pr * pr - pz * pz)).abs() <= 1e-7, "{kr}");
        prop_assert!((kz - 2.0 * rho * pr * pz).abs() <= 1e-7, "{kz}");
    }
}

#[test]
fn random_weyl_series_laplace_residual_is_second_order() {
    let c = verify::weyl_random_coefficients();
    assert_eq!(c.a.len(), 5);
    let (mut hs, mut errs) = (Vec::new(), Vec::new());
    for m in verify::LEVELS {
        let grid = verify::weyl_window(m + 1).unwrap();
        let psi = grid.sample(|p| weyl_psi(&c, p).unwrap().0);
        hs.push(grid.spacing[0]);
        errs.push(axisym::laplace_residual(&grid, &psi).sup_norm());
    }
    let order = fit_order("weyl", &hs, &errs).unwrap().order.unwrap();
    assert!((order - 2.0).abs() <= 0.2, "order {order}");
}

#[test]
fn vtd_identities_hold_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let [a, b, c, d, tau, theta] =
            [(0.2, 3.0), (-2.0, 2.0), (0.05, 2.0), (-1.0, 1.0), (-3.0, 10.0), (0.0, std::f64::consts::TAU)]
                .map(|(lo, hi)| rng.random_range(lo..hi));
        let v = avtd(&AvtdParams::constant(a, b, c, d), [tau, theta]).unwrap();
        let [r0, r1] = vtd_residuals(&v);
        let s0 = v.p_tautau.abs() + (2.0 * v.p).exp() * v.q_tau * v.q_tau;
        let s1 = v.q_tautau.abs() + (2.0 * v.p_tau * v.q_tau).abs();
        assert!(r0.abs() <= 1e-12 * s0.max(1.0), "{r0:e} at {:?}", (a, b, c, tau));
        assert!(r1.abs() <= 1e-12 * s1.max(1.0), "{r1:e} at {:?}", (a, b, c, tau));
    }
}

#[test]
fn avtd_amplitude_must_be_positive() {
    let params = AvtdParams { a: Fourier { mean: 0.0, cos: vec![1.0], sin: vec![] }, ..verify::avtd_fixture() };
    assert!(matches!(avtd(&params, [0.0, std::f64::consts::PI]), Err(Error::Domain(_))));
}

#[test]
fn full_gowdy_residual_decays_like_exp_minus_two_tau() {
    let params = verify::avtd_decay_fixture();
    let norm = |tau: f64| {
        let f = GowdyFields::from_avtd(verify::gowdy_window(tau, 65).unwrap(), &params).unwrap();
        gowdy::gowdy_residuals(&f).iter().map(|p| p.sup_norm()).fold(0.0, f64::max)
    };
    let n: Vec<f64> = [4.0, 5.0, 6.0].into_iter().map(norm).collect();
    let target = (-2.0f64).exp();
    for w in n.windows(2) {
        let ratio = w[1] / w[0];
        assert!((ratio / target - 1.0).abs() <= 0.1, "ratio {ratio}");
    }
}

#[test]
fn conservation_suite_passes_for_every_model() {
    for model in Model::ALL {
        let report = verify::run_suite(Suite::Conservation, model).unwrap();
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).collect();
        assert!(failed.is_empty(), "{}: {failed:?}", model.name());
    }
}

#[test]
fn convergence_suite_passes_for_every_model() {
    for model in Model::ALL {
        let report = verify::run_suite(Suite::Convergence, model).unwrap();
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).collect();
        assert!(failed.is_empty(), "{}: {failed:?}", model.name());
    }
}

#[test]
fn p_minus_tau_has_zero_residual() {
    let f = GowdyFields::from_fns(verify::gowdy_window(3.0, 33).unwrap(), |[t, _]| -t, |_| 0.0).unwrap();
    for p in gowdy::gowdy_residuals(&f) {
        assert_eq!(p.sup_norm(), 0.0);
    }
}

#[test]
fn boundary_fixtures_classify_as_expected() {
    for model in Model::ALL {
        let report = verify::run_suite(Suite::Boundary, model).unwrap();
        assert!(report.passed(), "{}: {:?}", model.name(), report.checks);
    }
    let gowdy = GowdyFields::from_avtd(verify::gowdy_window(8.0, 33).unwrap(), &verify::avtd_fixture()).unwrap();
    let found = boundary_classify(&gowdy.to_map().unwrap(), verify::CLOSED_TOL);
    assert_eq!(found.class, BoundaryClass::ClosedString);
    assert!(found.closed.fields <= verify::CLOSED_TOL && found.closed.slope <= verify::CLOSED_TOL);
}

#[test]
fn curzon_far_window_is_an_open_string() {
    let grid = geodesy_core::GridSpec::from_extents(axisym::COORDS, [20.0, -5.0], [30.0, 5.0], [33, 33], [false; 2])
        .unwrap();
    let map: FieldMap = axisym::curzon_fields(&grid, 1.0).unwrap().to_map().unwrap();
    assert_eq!(boundary_classify(&map, verify::OPEN_TOL).class, BoundaryClass::OpenString);
}

#[test]
fn extension_suite_passes_for_every_model() {
    for model in Model::ALL {
        let report = verify::run_suite(Suite::Extension, model).unwrap();
        assert!(report.passed(), "{}: {:?}", model.name(), report.checks);
    }
}
