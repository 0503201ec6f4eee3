//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use geodesy_core::io::report::DiagnosticsReport;
use geodesy_core::models::axisym;
use geodesy_core::models::gowdy::{self, avtd, vtd_residuals, AvtdParams, Fourier, GowdyFields};
use geodesy_core::models::weyl::{weyl_k, weyl_psi, WeylCoefficients};
use geodesy_core::solvers::convergence::fit_order;
use geodesy_core::solvers::evolve::{evolve, EvolveConfig, Initial};
use geodesy_core::solvers::relax::{relax_stationary, Dirichlet, RelaxConfig};
use geodesy_core::verify::{self, Model, Suite};
use geodesy_core::GridSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORACLE_TOL: f64 = 1e-12;
const ORDER: f64 = 2.0;
const ORDER_TOL: f64 = 0.2;
const IDENTITY_TOL: f64 = 1e-12;
const OFF_SHELL_MIN: f64 = 1e-3;
const WEYL_REL_TOL: f64 = 1e-12;
const WEYL_VALUE_TOL: f64 = 1e-12;
const VTD_TOL: f64 = 1e-12;
const DECAY_REL_TOL: f64 = 0.1;
const AVTD_EVOLVE_TOL: f64 = 1e-4;
const SOR_TOL: f64 = 5e-4;
const SOR_MAX_ITERS: usize = 200_000;
const GOWDY_EXACT_TOL: f64 = 1e-6;
const EXTRA_RHO2_TOL: f64 = 1e-10;
const OPEN_TOL: f64 = 1e-2;
const CLOSED_TOL: f64 = 1e-12;

type Outcome = Result<String, String>;

struct Tally {
    failed: usize,
}

impl Tally {
    fn run(&mut self, id: usize, name: &str, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[{id:>2}] PASS {name:<28} {detail} ({secs:.1}s)"),
            Err(detail) => {
                self.failed += 1;
                println!("[{id:>2}] FAIL {name:<28} {detail} ({secs:.1}s)");
            }
        }
    }
}

fn suite(s: Suite, m: Model) -> DiagnosticsReport {
    verify::run_suite(s, m).unwrap_or_else(|e| panic!("{} {}: {e}", s.name(), m.name()))
}

/// Value of the named check.
fn value(report: &DiagnosticsReport, name: &str) -> f64 {
    report
        .checks
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("{} report has no check {name}", report.model))
        .value
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle() -> Outcome {
    let mut worst = 0.0f64;
    for m in Model::ALL {
        let r = suite(Suite::Oracle, m);
        for label in ["exact", "generic"] {
            worst = worst.max(value(&r, &format!("{label}_generic_vs_hand_coded")));
        }
    }
    verdict(worst <= ORACLE_TOL, format!("max |generic - hand-coded| {worst:.2e} <= {ORACLE_TOL:e}"))
}

fn exact_residuals() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (m, name) in [(Model::Axisym, "curzon"), (Model::Er, "bessel"), (Model::Gowdy, "polarized_bessel")] {
        let (hs, errs) = verify::residual_levels(m, &verify::LEVELS[..3]).unwrap();
        let order = fit_order(name, &hs, &errs).unwrap().order.unwrap_or(f64::NAN);
        ok &= (order - ORDER).abs() <= ORDER_TOL;
        parts.push(format!("{name} {order:.3}"));
    }
    let f = GowdyFields::from_fns(verify::gowdy_window(0.0, 65).unwrap(), |[t, _]| -t, |_| 0.0).unwrap();
    let p_tau = gowdy::gowdy_residuals(&f).iter().map(|p| p.sup_norm()).fold(0.0, f64::max);
    ok &= p_tau == 0.0;
    parts.push(format!("P=-tau residual {p_tau:e}"));
    verdict(ok, format!("orders {} (target {ORDER}±{ORDER_TOL})", parts.join(", ")))
}

fn potentials() -> Outcome {
    let mut ok = true;
    let (mut identity, mut on_shell, mut off_shell) = (0.0f64, 0.0f64, f64::INFINITY);
    for m in Model::ALL {
        let r = suite(Suite::Conservation, m);
        let p = match m {
            Model::Axisym => "k",
            Model::Er => "gamma",
            Model::Gowdy => "lambda",
        };
        for label in ["exact", "generic", "off_shell"] {
            identity = identity.max(value(&r, &format!("{label}_{p}_gradient_vs_emt")));
        }
        let check = r.checks.iter().find(|c| c.name == format!("exact_{p}_loop_defect")).unwrap();
        ok &= check.passed;
        on_shell = on_shell.max(check.value);
        off_shell = off_shell.min(value(&r, &format!("off_shell_{p}_loop_defect_exceeds")));
    }
    ok &= identity <= IDENTITY_TOL && off_shell > OFF_SHELL_MIN;
    verdict(
        ok,
        format!("gradient vs EMT {identity:.1e}, on-shell loop {on_shell:.1e} (O(h²)), off-shell loop min {off_shell:.1e} > {OFF_SHELL_MIN:e}"),
    )
}

fn emt_structure() -> Outcome {
    let (mut trace, mut factor, mut exact) = (0.0f64, 0.0f64, 0.0f64);
    for m in Model::ALL {
        let r = suite(Suite::Conservation, m);
        for label in ["exact", "generic", "off_shell"] {
            trace = trace.max(value(&r, &format!("{label}_emt_trace")));
            factor = factor.max(value(&r, &format!("{label}_emt_canonical_factor_two")));
            match m {
                Model::Axisym => exact = exact.max(value(&r, &format!("{label}_T_rr_plus_T_zz"))),
                Model::Er => exact = exact.max(value(&r, &format!("{label}_T_tt_minus_T_rr"))),
                Model::Gowdy => {}
            }
        }
    }
    verdict(
        trace <= IDENTITY_TOL && factor <= IDENTITY_TOL && exact == 0.0,
        format!("trace {trace:.1e}, canonical-2T {factor:.1e}, closed-form structure {exact:e}"),
    )
}

fn symmetries() -> Outcome {
    let (mut weyl, mut affine, mut ok) = (0.0f64, 0.0f64, true);
    for m in Model::ALL {
        let r = suite(Suite::Conservation, m);
        weyl = weyl.max(value(&r, "weyl_rescaling_action_rel"));
        let c = r.checks.iter().find(|c| c.name == "affine_reparametrisation_action_rel").unwrap();
        ok &= c.passed;
        affine = affine.max(c.value);
    }
    verdict(ok && weyl <= WEYL_REL_TOL, format!("Weyl rel {weyl:.1e} (10 samples), affine rel {affine:.1e} (<= h²)"))
}

fn weyl_series() -> Outcome {
    let c = WeylCoefficients::new(vec![-1.0]).unwrap();
    let psi = weyl_psi(&c, [3.0, 4.0]).unwrap().0;
    let k = weyl_k(&c, [3.0, 4.0]).unwrap();
    let coeffs = verify::weyl_random_coefficients();
    let (mut hs, mut errs) = (Vec::new(), Vec::new());
    for m in verify::LEVELS {
        let grid = verify::weyl_window(m + 1).unwrap();
        let v = grid.sample(|p| weyl_psi(&coeffs, p).unwrap().0);
        hs.push(grid.spacing[0]);
        errs.push(axisym::laplace_residual(&grid, &v).sup_norm());
    }
    let order = fit_order("weyl", &hs, &errs).unwrap().order.unwrap_or(f64::NAN);
    let ok = (psi + 0.2).abs() <= WEYL_VALUE_TOL && (k + 0.0072).abs() <= WEYL_VALUE_TOL && (order - ORDER).abs() <= ORDER_TOL;
    verdict(ok, format!("psi(3,4) {psi:.15}, k(3,4) {k:.15}, Laplace order {order:.3}"))
}

/// Max |closed form − evolved| at the final time.
fn avtd_evolution_error(params: &AvtdParams) -> f64 {
    let init = Initial::gowdy_avtd(params, 8.0, 256).unwrap();
    let run = evolve(&init, &EvolveConfig { t_final: 9.0, output_stride: 1000, ..EvolveConfig::default() }).unwrap();
    let last = run.last();
    run.coords
        .iter()
        .enumerate()
        .map(|(j, &th)| {
            let v = avtd(params, [last.time, th]).unwrap();
            (last.fields[0][j] - v.p).abs().max((last.fields[1][j] - v.q).abs())
        })
        .fold(0.0, f64::max)
}

fn avtd_criterion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xa77d);
    let mut vtd = 0.0f64;
    for _ in 0..100 {
        let params = AvtdParams {
            a: Fourier { mean: 1.0, cos: vec![rng.random_range(-0.5..0.5)], sin: vec![rng.random_range(-0.3..0.3)] },
            b: Fourier::constant(rng.random_range(-1.0..1.0)),
            c: Fourier { mean: rng.random_range(0.2..1.5), cos: vec![0.1], sin: vec![] },
            d: Fourier::constant(rng.random_range(-1.0..1.0)),
        };
        let p = [rng.random_range(-2.0..10.0), rng.random_range(0.0..std::f64::consts::TAU)];
        let v = avtd(&params, p).unwrap();
        let [r0, r1] = vtd_residuals(&v);
        let s0 = v.p_tautau.abs() + (2.0 * v.p).exp() * v.q_tau * v.q_tau;
        let s1 = v.q_tautau.abs() + (2.0 * v.p_tau * v.q_tau).abs();
        vtd = vtd.max(r0.abs() / s0.max(1.0)).max(r1.abs() / s1.max(1.0));
    }

    let decay = verify::avtd_decay_fixture();
    let norm = |tau: f64| {
        let f = GowdyFields::from_avtd(verify::gowdy_window(tau, 65).unwrap(), &decay).unwrap();
        gowdy::gowdy_residuals(&f).iter().map(|p| p.sup_norm()).fold(0.0, f64::max)
    };
    let norms: Vec<f64> = [4.0, 5.0, 6.0].into_iter().map(norm).collect();
    let target = (-2.0f64).exp();
    let ratios: Vec<f64> = norms.windows(2).map(|w| w[1] / w[0]).collect();
    let decay_ok = ratios.iter().all(|r| (r / target - 1.0).abs() <= DECAY_REL_TOL);

    let err = avtd_evolution_error(&verify::avtd_fixture());
    let steep = AvtdParams { c: Fourier::constant(1.0), ..verify::avtd_fixture() };
    println!("     info: c = 1 data gives {:.2e} at tau = 9 (the closed form itself is off by O(e^-2tau) there)", avtd_evolution_error(&steep));
    verdict(
        vtd <= VTD_TOL && decay_ok && err <= AVTD_EVOLVE_TOL,
        format!("VTD rel {vtd:.1e}, decay ratios {:.4}/{:.4} vs {target:.4}, evolution error {err:.2e}", ratios[0], ratios[1]),
    )
}

fn solvers() -> Outcome {
    let grid = GridSpec::from_extents(axisym::COORDS, [1.0, 1.0], [3.0, 3.0], [128, 128], [false; 2]).unwrap();
    let exact = axisym::curzon_fields(&grid, 1.0).unwrap();
    let config = RelaxConfig { max_iters: SOR_MAX_ITERS, ..RelaxConfig::default() };
    let (fields, report) = relax_stationary(&grid, &Dirichlet::from_fields(&exact), &config).unwrap();
    let sor = fields
        .f
        .indexed_iter()
        .map(|((i, j), &f)| (0.5 * f.ln() - axisym::curzon_psi(1.0, grid.point(i, j))).abs())
        .fold(0.0, f64::max);

    let zero = |_: f64| 0.0;
    let init = Initial::gowdy(2.0, 512, &|_| -2.0, &zero, &|_| -1.0, &zero).unwrap();
    let run = evolve(&init, &EvolveConfig { cfl: 0.5, t_final: 3.0, output_stride: 1000, ..EvolveConfig::default() }).unwrap();
    let last = run.last();
    let gowdy = last.fields[0].iter().map(|p| (p + last.time).abs()).chain(last.fields[1].iter().map(|q| q.abs())).fold(0.0, f64::max);
    verdict(
        sor <= SOR_TOL && report.iterations <= SOR_MAX_ITERS && gowdy <= GOWDY_EXACT_TOL,
        format!("SOR error {sor:.2e} in {} sweeps, Gowdy P=-tau error {gowdy:.1e}", report.iterations),
    )
}

fn extension() -> Outcome {
    let mut ok = true;
    let mut bits = 0.0f64;
    for m in Model::ALL {
        let r = suite(Suite::Extension, m);
        bits = bits.max(value(&r, "gravitational_residual_differing_bits"));
        ok &= value(&r, "coupled_block_rejected") == 0.0 && value(&r, "degenerate_block_rejected") == 0.0;
    }
    let r = suite(Suite::Extension, Model::Axisym);
    let z = value(&r, "extra_harmonic_residual");
    let rho2 = value(&r, "extra_rho_squared_residual_minus_2");
    ok &= bits == 0.0 && z == 0.0 && rho2 <= EXTRA_RHO2_TOL;
    verdict(ok, format!("differing bits {bits}, X=z residual {z:e}, |X=rho² residual - 2| {rho2:.1e}, couplings rejected"))
}

fn boundary() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for m in Model::ALL {
        let r = suite(Suite::Boundary, m);
        let b = r.boundary.as_ref().unwrap();
        let want = if m == Model::Gowdy { CLOSED_TOL } else { OPEN_TOL };
        ok &= r.passed() && b.tolerance == want;
        parts.push(format!("{} {:?}@{:.0e}", m.name(), b.class, b.tolerance));
    }
    verdict(ok, format!("{}, noise unclassified", parts.join(", ")))
}

fn run_cli(dir: &Path, threads: &str, suite: &str, model: &str) -> Vec<u8> {
    let out = dir.join(format!("{suite}-{model}-{threads}"));
    let status = Command::new(env!("CARGO_BIN_EXE_geodesy"))
        .args(["verify", "--suite", suite, "--model", model, "--out"])
        .arg(&out)
        .env("GEODESY_THREADS", threads)
        .output()
        .expect("running geodesy");
    assert!(status.status.success(), "verify {suite} {model}: {}", String::from_utf8_lossy(&status.stderr));
    std::fs::read(out.join("report.json")).unwrap()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut mismatches = Vec::new();
    let mut runs = 0;
    for s in Suite::ALL {
        for m in Model::ALL {
            let one = run_cli(dir.path(), "1", s.name(), m.name());
            let four = run_cli(dir.path(), "4", s.name(), m.name());
            let again = run_cli(&dir.path().join("rerun"), "1", s.name(), m.name());
            runs += 3;
            if one != four || one != again {
                mismatches.push(format!("{}/{}", s.name(), m.name()));
            }
        }
    }
    verdict(mismatches.is_empty(), format!("{runs} CLI runs, byte-identical reports; mismatches: {mismatches:?}"))
}

fn main() {
    let mut tally = Tally { failed: 0 };
    tally.run(1, "oracle equivalence", oracle);
    tally.run(2, "exact-solution residuals", exact_residuals);
    tally.run(3, "potential identities", potentials);
    tally.run(4, "EMT structure", emt_structure);
    tally.run(5, "symmetries", symmetries);
    tally.run(6, "Weyl series", weyl_series);
    tally.run(7, "AVTD", avtd_criterion);
    tally.run(8, "solver accuracy", solvers);
    tally.run(9, "dimensional extension", extension);
    tally.run(10, "boundary classification", boundary);
    tally.run(11, "determinism", determinism);
    println!("acceptance: {} of 11 criteria passed", 11 - tally.failed);
    if tally.failed > 0 {
        std::process::exit(1);
    }
}
