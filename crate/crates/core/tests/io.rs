use std::collections::BTreeMap;

use geodesy_core::io::csv::{self, GridData};
use geodesy_core::io::report::{Check, DiagnosticsReport, LoopDefect, Norms, SCHEMA};
use geodesy_core::solvers::convergence::fit_order;
use geodesy_core::verify::{self, Model, Suite};
use geodesy_core::GridSpec;
use ndarray::Array2;
use proptest::prelude::*;
use serde_json::Value;

fn validator() -> jsonschema::Validator {
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn assert_valid(report: &DiagnosticsReport) {
    let v = validator();
    let doc: Value = serde_json::from_str(&report.to_json().unwrap()).unwrap();
    let errors: Vec<String> = v.iter_errors(&doc).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

#[test]
fn suite_reports_validate_against_the_schema() {
    for suite in Suite::ALL {
        let report = verify::run_suite(suite, Model::Axisym).unwrap();
        assert_valid(&report);
    }
    let report = verify::run_suite(Suite::Boundary, Model::Gowdy).unwrap();
    assert!(report.boundary.is_some() || !report.checks.is_empty());
    assert_valid(&report);
}

#[test]
fn schema_rejects_negative_norms_and_unknown_keys() {
    let v = validator();
    let mut report = DiagnosticsReport::new("weyl", "axisym");
    report.residuals.push(Norms { name: "laplace".into(), sup: 1.0, l2: 0.5 });
    let mut doc: Value = serde_json::to_value(&report).unwrap();
    assert!(v.is_valid(&doc));
    doc["residuals"][0]["sup"] = Value::from(-1.0);
    assert!(!v.is_valid(&doc));
    let mut doc: Value = serde_json::to_value(&report).unwrap();
    doc["surprise"] = Value::from(1);
    assert!(!v.is_valid(&doc));
}

#[test]
fn report_round_trips_losslessly() {
    let mut report = DiagnosticsReport::new("solve", "axisym");
    report.residuals.push(Norms { name: "main_f".into(), sup: 0.1 + 0.2, l2: 1e-300 });
    report.potentials.push(LoopDefect { name: "k".into(), loop_defect: std::f64::consts::PI });
    report.checks.push(Check::at_most("x", 1.0 / 3.0, 0.5));
    report.checks.push(Check::near("y", 2.0, 2.1, 0.05));
    report.convergence.push(fit_order("z", &[0.4, 0.2, 0.1], &[1.6e-2, 4.1e-3, 1.0e-3]).unwrap());
    report.convergence.push(fit_order("floor", &[0.4, 0.2, 0.1], &[0.0, 0.0, 0.0]).unwrap());
    report.extra.insert("iterations".into(), 1234.0);
    report.timings = Some(BTreeMap::from([("relax".to_string(), 0.125)]));
    let text = report.to_json().unwrap();
    let back = DiagnosticsReport::from_json(&text).unwrap();
    assert_eq!(back, report);
    assert_eq!(back.to_json().unwrap(), text);
    assert!(!report.passed());
    assert_valid(&report);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn csv_round_trips_every_bit(
        n0 in 5usize..9,
        n1 in 5usize..9,
        origin in prop::array::uniform2(-10.0f64..10.0),
        spacing in prop::array::uniform2(1e-3f64..2.0),
        seed in any::<u64>(),
    ) {
        let grid = GridSpec::new(["t", "rho"], origin, spacing, [n0, n1], [false; 2]).unwrap();
        let mut state = seed | 1;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            f64::from_bits(state >> 2) * if state & 1 == 0 { 1.0 } else { -1.0 }
        };
        let a = Array2::from_shape_fn((n0, n1), |_| next());
        let b = Array2::from_shape_fn((n0, n1), |_| next() * 1e-300);
        let data = GridData::new("er", grid, vec![("psi", a), ("omega", b)]).unwrap();
        let text = csv::to_string(&data);
        let back = csv::parse(&text).unwrap();
        for (x, y) in back.fields.iter().zip(&data.fields) {
            prop_assert!(x.iter().zip(y).all(|(p, q)| p.to_bits() == q.to_bits()));
        }
        prop_assert_eq!(csv::to_string(&back), text);
    }
}

#[test]
fn csv_files_round_trip_through_disk() {
    let dir = tempfile_dir();
    let grid = GridSpec::from_extents(["rho", "z"], [1.0, 1.0], [3.0, 3.0], [6, 5], [false; 2]).unwrap();
    let f = grid.sample(|[r, z]| (r / z).ln());
    let data = GridData::new("axisym", grid, vec![("f", f)]).unwrap();
    let path = dir.join("f.csv");
    csv::write(&path, &data).unwrap();
    assert_eq!(csv::read(&path).unwrap(), data);
    std::fs::remove_dir_all(dir).unwrap();
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("geodesy-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
