use geodesy_core::models::axisym::{self, f_jet_from_psi, main_equations, static_equation};
use geodesy_core::models::weyl::{self, weyl_k, weyl_psi, WeylCoefficients};
use geodesy_core::solvers::convergence::fit_order;
use geodesy_core::verify::{self, Model};
use geodesy_core::{conservation_residual, GridSpec, ScalarJet};
use proptest::prelude::*;

#[test]
fn curzon_k_gradient_at_three_four() {
    let c = WeylCoefficients::new(vec![-1.0]).unwrap();
    let (_, [pr, pz]) = weyl_psi(&c, [3.0, 4.0]).unwrap();
    let (kr, kz) = (3.0 * (pr * pr - pz * pz), 2.0 * 3.0 * pr * pz);
    assert!((kr - -0.001344).abs() <= 1e-15, "{kr}");
    assert!((kz - 0.004608).abs() <= 1e-15, "{kz}");

    // The same values from the field-level operation on a grid through (3, 4).
    let grid = GridSpec::from_extents(axisym::COORDS, [2.0, 3.0], [4.0, 5.0], [257, 257], [false; 2]).unwrap();
    let [gr, gz] = axisym::k_gradient(&axisym::curzon_fields(&grid, 1.0).unwrap());
    assert!((gr.at(128, 128) - kr).abs() <= 1e-6 && (gz.at(128, 128) - kz).abs() <= 1e-6);
}

#[test]
fn curzon_k_by_quadrature_matches_closed_form() {
    let grid = verify::axisym_window(256).unwrap();
    let fields = axisym::curzon_fields(&grid, 1.0).unwrap();
    let exact = |[r, z]: [f64; 2]| -r * r / (2.0 * (r * r + z * z).powi(2));
    let k = axisym::integrate_k(&fields, [0, 0], exact(grid.point(0, 0)));
    let err = k.field.indexed_iter().map(|((i, j), v)| (v - exact(grid.point(i, j))).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-5, "{err:e}");
}

#[test]
fn weyl_k_series_matches_the_quadrature_gradient() {
    let c = WeylCoefficients::new(vec![-1.0, 0.4, 0.2]).unwrap();
    let grid = verify::weyl_window(257).unwrap();
    let [gr, gz] = axisym::k_gradient(&weyl::static_fields(&c, &grid).unwrap());
    let h = 1e-5;
    for (i, j) in [(64, 64), (128, 200), (200, 30)] {
        let [r, z] = grid.point(i, j);
        let kr = (weyl_k(&c, [r + h, z]).unwrap() - weyl_k(&c, [r - h, z]).unwrap()) / (2.0 * h);
        let kz = (weyl_k(&c, [r, z + h]).unwrap() - weyl_k(&c, [r, z - h]).unwrap()) / (2.0 * h);
        assert!((gr.at(i, j) - kr).abs() <= 1e-6, "{} vs {kr}", gr.at(i, j));
        assert!((gz.at(i, j) - kz).abs() <= 1e-6, "{} vs {kz}", gz.at(i, j));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn static_reduction_of_the_main_equations(
        v in -1.0f64..1.0,
        d in prop::array::uniform2(-2.0f64..2.0),
        dd in prop::array::uniform3(-2.0f64..2.0),
        rho in 0.2f64..5.0,
    ) {
        let psi = ScalarJet { v, d, dd: [[dd[0], dd[1]], [dd[1], dd[2]]] };
        let f = f_jet_from_psi(&psi);
        let zero = ScalarJet { v: 0.0, d: [0.0; 2], dd: [[0.0; 2]; 2] };
        let [m1, m2] = main_equations(rho, &f, &zero);
        let expected = 2.0 * f.v * static_equation(rho, &psi);
        let scale = f.v * (dd.iter().map(|x| x.abs()).sum::<f64>() + d[0].abs() / rho + 4.0 * (d[0] * d[0] + d[1] * d[1]));
        prop_assert!((m1 - expected).abs() <= 1e-12 * scale.max(1.0), "{m1} vs {expected}");
        prop_assert_eq!(m2, 0.0);
    }
}

#[test]
fn on_shell_conservation_defect_is_second_order() {
    for model in Model::ALL {
        let (mut hs, mut errs) = (Vec::new(), Vec::new());
        // The sup sits next to the corner nearest the Curzon source, where
        // 32 to 128 intervals are still pre-asymptotic.
        for m in [128, 256, 512] {
            let map = verify::exact_map(model, m + 1).unwrap();
            hs.push(map.grid().spacing[0].max(map.grid().spacing[1]));
            let [c0, c1] = conservation_residual(&map).unwrap();
            errs.push(c0.sup_norm().max(c1.sup_norm()));
        }
        let order = fit_order(model.name(), &hs, &errs).unwrap().order.unwrap();
        assert!((order - 2.0).abs() <= 0.2, "{}: order {order}, errors {errs:?}", model.name());
    }
}
