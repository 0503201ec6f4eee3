use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use geodesy_core::engine::el_residual;
use geodesy_core::io::csv::{self, GridData};
use geodesy_core::io::report::{Check, DiagnosticsReport, LoopDefect, Norms, SCHEMA};
use geodesy_core::metric::TargetMetric;
use geodesy_core::models::axisym::{self, AxisymFields};
use geodesy_core::models::extension::{self, ExtensionSpec};
use geodesy_core::models::gowdy::{self, AvtdParams};
use geodesy_core::models::weyl::{self, WeylCoefficients};
use geodesy_core::models::er;
use geodesy_core::solvers::evolve::{self, EvolveConfig, EvolveModel, FrameDiagnostics, Initial};
use geodesy_core::solvers::relax::{relax_stationary, Dirichlet, RelaxConfig};
use geodesy_core::verify::{self, Model, Suite};
use geodesy_core::{conservation_residual, FieldMap, GridSpec, Patch};
use nalgebra::DMatrix;
use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::args::{
    BoundarySource, EvolveArgs, EvolveModelArg, ExtendArgs, GridArgs, ModelArg, ReportArgs, SolveArgs, VerifyArgs,
    WeylArgs,
};
use crate::args::Global;
use crate::config::resolve;
use crate::output::{summarize, ChecksFailed, Output};

fn rz_grid(g: &GridArgs) -> Result<GridSpec> {
    let lo = [g.rho_min.unwrap_or(1.0), g.z_min.unwrap_or(1.0)];
    let hi = [g.rho_max.unwrap_or(3.0), g.z_max.unwrap_or(3.0)];
    let dims = [g.n_rho.unwrap_or(64), g.n_z.unwrap_or(64)];
    let grid = GridSpec::from_extents(axisym::COORDS, lo, hi, dims, [false; 2])?;
    axisym::check_grid(&grid)?;
    Ok(grid)
}

fn read_coeffs(path: Option<&Path>) -> Result<WeylCoefficients> {
    let path = path.context("--coeffs is required")?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(WeylCoefficients::from_json(&text)?)
}

fn sample(grid: &GridSpec, f: impl Fn([f64; 2]) -> geodesy_core::Result<f64>) -> Result<Array2<f64>> {
    let mut out = grid.zeros();
    for ((i, j), v) in out.indexed_iter_mut() {
        *v = f(grid.point(i, j))?;
    }
    Ok(out)
}

pub fn weyl(global: &Global, args: WeylArgs) -> Result<()> {
    let run = resolve(global, args)?;
    let a = run.opts;
    let coeffs = read_coeffs(a.coeffs.as_deref())?;
    let grid = rz_grid(&a.grid)?;
    let mut out = Output::create(&run.out, run.timings)?;

    let psi = sample(&grid, |p| Ok(weyl::weyl_psi(&coeffs, p)?.0))?;
    let k = sample(&grid, |p| weyl::weyl_k(&coeffs, p))?;
    let f = psi.mapv(|v| (2.0 * v).exp());
    let laplace = axisym::laplace_residual(&grid, &psi);
    out.mark("compute");

    let mut report = DiagnosticsReport::new("weyl", "axisym");
    report.residuals.push(Norms::of("laplace", &laplace));
    report.extra.insert("residual_sup".into(), laplace.sup_norm());
    report.extra.insert("coefficients".into(), coeffs.a.len() as f64);
    out.csv("weyl.csv", &GridData::new("axisym", grid, vec![("psi", psi), ("k", k), ("f", f)])?)?;
    out.finish(report)
}

pub fn solve(global: &Global, args: SolveArgs) -> Result<()> {
    let run = resolve(global, args)?;
    let a = run.opts;
    let defaults = RelaxConfig::default();
    let config = RelaxConfig {
        over_relaxation: a.over_relaxation.unwrap_or(defaults.over_relaxation),
        tol: a.tol.unwrap_or(defaults.tol),
        max_iters: a.max_iters.unwrap_or(defaults.max_iters),
        check_every: a.check_every.unwrap_or(defaults.check_every),
    };

    type Exact = Box<dyn Fn([f64; 2]) -> geodesy_core::Result<f64>>;
    let source = a.boundary.unwrap_or(BoundarySource::Curzon);
    let (grid, boundary, exact): (GridSpec, Dirichlet, Option<Exact>) = match source {
        BoundarySource::Curzon => {
            let m = a.mass.unwrap_or(1.0);
            let grid = rz_grid(&a.grid)?;
            let psi = move |p: [f64; 2]| Ok(axisym::curzon_psi(m, p));
            let f = sample(&grid, |p| Ok((2.0 * psi(p)?).exp()))?;
            let omega = grid.zeros();
            (grid, Dirichlet { f, omega }, Some(Box::new(psi)))
        }
        BoundarySource::Weyl => {
            let coeffs = read_coeffs(a.coeffs.as_deref())?;
            let grid = rz_grid(&a.grid)?;
            let psi = move |p: [f64; 2]| Ok(weyl::weyl_psi(&coeffs, p)?.0);
            let f = sample(&grid, |p| Ok((2.0 * psi(p)?).exp()))?;
            let omega = grid.zeros();
            (grid, Dirichlet { f, omega }, Some(Box::new(psi)))
        }
        BoundarySource::Csv => {
            let path = a.input.as_deref().context("--input is required with --boundary csv")?;
            let data = csv::read(path).with_context(|| format!("reading {}", path.display()))?;
            let column = |name: &str| {
                data.field(name).cloned().with_context(|| format!("{} has no {name} column", path.display()))
            };
            let (f, omega) = (column("f")?, column("omega")?);
            let grid = data.grid.clone();
            axisym::check_grid(&grid)?;
            (grid, Dirichlet { f, omega }, None)
        }
    };
    let mut out = Output::create(&run.out, run.timings)?;

    let (fields, relax) = relax_stationary(&grid, &boundary, &config)?;
    out.mark("relax");

    let mut report = DiagnosticsReport::new("solve", "axisym");
    let [r1, r2] = axisym::axisym_residuals(&fields);
    report.residuals.push(Norms::of("main_f", &r1));
    report.residuals.push(Norms::of("main_omega", &r2));
    let [c0, c1] = conservation_residual(&fields.to_map()?)?;
    report.conservation.push(Norms::of("conservation_rho", &c0));
    report.conservation.push(Norms::of("conservation_z", &c1));
    let k = axisym::integrate_k(&fields, [0, 0], 0.0);
    report.potentials.push(LoopDefect { name: "k".into(), loop_defect: k.loop_defect });
    report.extra.insert("iterations".into(), relax.iterations as f64);
    report.extra.insert("final_residual".into(), relax.residual);
    let psi = fields.f.mapv(|f| 0.5 * f.ln());
    if let Some(exact) = exact {
        let reference = sample(&grid, exact)?;
        let err = (&psi - &reference).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        report.extra.insert("psi_error_sup".into(), err);
    }
    let AxisymFields { f, omega, .. } = fields;
    out.csv("solve.csv", &GridData::new("axisym", grid, vec![("f", f), ("omega", omega), ("psi", psi)])?)?;
    out.finish(report)
}

fn minus_one() -> f64 {
    -1.0
}

/// Initial data for `evolve`, selected by `kind`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum InitialDoc {
    /// AVTD closed form at tau0.
    Avtd { tau0: f64, n_theta: usize, params: Box<AvtdParams> },
    /// Spatially homogeneous P = p_tau·τ, Q = 0.
    Homogeneous {
        tau0: f64,
        n_theta: usize,
        #[serde(default = "minus_one")]
        p_tau: f64,
    },
    /// ψ = J₀(ρ) at t = 0.
    ErBessel { rho_max: f64, n_rho: usize },
    /// The regular pulse of width a at t = 0.
    ErPulse { a: f64, rho_max: f64, n_rho: usize },
}

type ExactPair = Box<dyn Fn(f64, f64) -> geodesy_core::Result<[f64; 2]>>;

impl InitialDoc {
    fn model(&self) -> EvolveModel {
        match self {
            InitialDoc::Avtd { .. } | InitialDoc::Homogeneous { .. } => EvolveModel::Gowdy,
            InitialDoc::ErBessel { .. } | InitialDoc::ErPulse { .. } => EvolveModel::Er,
        }
    }

    fn build(&self) -> Result<(Initial, ExactPair)> {
        Ok(match self.clone() {
            InitialDoc::Avtd { tau0, n_theta, params } => {
                let init = Initial::gowdy_avtd(&params, tau0, n_theta)?;
                let exact = move |t, x| gowdy::avtd(&params, [t, x]).map(|v| [v.p, v.q]);
                (init, Box::new(exact))
            }
            InitialDoc::Homogeneous { tau0, n_theta, p_tau } => {
                let p0 = p_tau * tau0;
                let init = Initial::gowdy(tau0, n_theta, &|_| p0, &|_| 0.0, &|_| p_tau, &|_| 0.0)?;
                (init, Box::new(move |t, _| Ok([p_tau * t, 0.0])))
            }
            InitialDoc::ErBessel { rho_max, n_rho } => {
                let init = Initial::er_bessel(rho_max, n_rho)?;
                (init, Box::new(|t, r| Ok([er::bessel_psi([t, r]), 0.0])))
            }
            InitialDoc::ErPulse { a, rho_max, n_rho } => {
                let init = Initial::er_pulse(a, rho_max, n_rho)?;
                (init, Box::new(move |t, r| Ok([er::pulse(a, [t, r]).0, 0.0])))
            }
        })
    }
}

#[derive(Serialize)]
struct ManifestFrame<'a> {
    level: usize,
    time: f64,
    dt: f64,
    file: String,
    diagnostics: &'a FrameDiagnostics,
}

#[derive(Serialize)]
struct Manifest<'a> {
    model: &'static str,
    coords: [&'static str; 2],
    columns: [&'static str; 4],
    spacing: f64,
    samples: usize,
    steps: usize,
    config: &'a EvolveConfig,
    frames: Vec<ManifestFrame<'a>>,
}

pub fn evolve(global: &Global, args: EvolveArgs) -> Result<()> {
    let run = resolve(global, args)?;
    let a = run.opts;
    let path = a.initial.as_deref().context("--initial is required")?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: InitialDoc = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let model = doc.model();
    if let Some(m) = a.model {
        let wanted = match m {
            EvolveModelArg::Er => EvolveModel::Er,
            EvolveModelArg::Gowdy => EvolveModel::Gowdy,
        };
        if wanted != model {
            bail!("--model {} does not match {} initial data", wanted.name(), model.name());
        }
    }
    let (initial, exact) = doc.build()?;
    let defaults = EvolveConfig::default();
    let config = EvolveConfig {
        cfl: a.cfl.unwrap_or(defaults.cfl),
        t_final: a.t_final.unwrap_or(initial.t0 + defaults.t_final),
        output_stride: a.output_stride.unwrap_or(defaults.output_stride),
        max_dt: a.max_dt.unwrap_or(defaults.max_dt),
        boundary_tol: a.boundary_tol.unwrap_or(defaults.boundary_tol),
    };
    let mut out = Output::create(&run.out, run.timings)?;

    let evolution = evolve::evolve(&initial, &config)?;
    out.mark("evolve");

    let n = evolution.coords.len();
    let rho_max = evolution.spacing * n as f64;
    let columns = match model {
        EvolveModel::Er => ["psi", "omega", "psi_t", "omega_t"],
        EvolveModel::Gowdy => ["P", "Q", "P_tau", "Q_tau"],
    };
    let coords = model.coords();
    let mut report = DiagnosticsReport::new("evolve", model.name());
    let mut frames = Vec::with_capacity(evolution.frames.len());
    let mut error_max = 0.0f64;
    let mut error_final = 0.0;
    let mut worst = |key: &str, v: Option<f64>| {
        if let Some(v) = v {
            let e = report.extra.entry(format!("{key}_max")).or_insert(0.0);
            *e = e.max(v);
        }
    };
    for frame in &evolution.frames {
        let trusted = match model {
            EvolveModel::Er => evolve::er_trusted_radius(rho_max, frame.time - initial.t0),
            EvolveModel::Gowdy => f64::INFINITY,
        };
        let mut err = 0.0f64;
        for (j, &x) in evolution.coords.iter().enumerate() {
            if x > trusted {
                break;
            }
            let e = exact(frame.time, x)?;
            for c in 0..2 {
                err = err.max((frame.fields[c][j] - e[c]).abs());
            }
        }
        error_max = error_max.max(err);
        error_final = err;
        let d = &frame.diagnostics;
        worst("step_residual", Some(d.step_residual));
        worst("conservation", d.conservation);
        worst("energy_balance", d.energy_balance);
        worst("lambda_closure", d.lambda_closure.map(f64::abs));

        let grid = GridSpec {
            coord_names: coords.map(str::to_owned),
            origin: [frame.time, evolution.coords[0]],
            spacing: [frame.dt, evolution.spacing],
            dims: [1, n],
            periodic: [false, model == EvolveModel::Gowdy],
        };
        let row = |v: &Vec<f64>| Array2::from_shape_vec((1, n), v.clone()).expect("frame arrays have n samples");
        let named = vec![
            (columns[0], row(&frame.fields[0])),
            (columns[1], row(&frame.fields[1])),
            (columns[2], row(&frame.velocities[0])),
            (columns[3], row(&frame.velocities[1])),
        ];
        let file = format!("frames/frame_{:06}.csv", frame.level);
        out.csv(&file, &GridData::new(model.name(), grid, named)?)?;
        frames.push(ManifestFrame { level: frame.level, time: frame.time, dt: frame.dt, file, diagnostics: d });
    }

    let last = evolution.last();
    report.extra.insert("exact_error_final".into(), error_final);
    report.extra.insert("exact_error_max".into(), error_max);
    report.extra.insert("final_time".into(), last.time);
    report.extra.insert("steps".into(), evolution.steps as f64);
    report.extra.insert("frames".into(), evolution.frames.len() as f64);
    let boundary = last.diagnostics.boundary.clone();
    if model == EvolveModel::Gowdy {
        let c = boundary.closed;
        let defect = c.metric.max(c.fields).max(c.slope);
        report.checks.push(Check::at_most("final_closed_string_defect", defect, verify::CLOSED_TOL));
    }
    report.boundary = Some(boundary);

    let manifest = Manifest {
        model: model.name(),
        coords,
        columns,
        spacing: evolution.spacing,
        samples: n,
        steps: evolution.steps,
        config: &config,
        frames,
    };
    out.json("manifest.json", &manifest)?;
    out.finish(report)
}

fn core_model(m: ModelArg) -> Model {
    match m {
        ModelArg::Axisym => Model::Axisym,
        ModelArg::Er => Model::Er,
        ModelArg::Gowdy => Model::Gowdy,
    }
}

pub fn verify(global: &Global, args: VerifyArgs) -> Result<()> {
    let run = resolve(global, args)?;
    let suite = run.opts.suite.context("--suite is required")?;
    let model = run.opts.model.context("--model is required")?;
    let suite_name = serde_json::to_value(suite)?;
    let suite = Suite::from_str(suite_name.as_str().unwrap_or_default())?;
    let mut out = Output::create(&run.out, run.timings)?;
    let report = verify::run_suite(suite, core_model(model))?;
    out.mark("verify");
    out.finish(report)
}

/// Extra block c·(1 + Σ κ_μ (X^μ)²); any nonzero κ couples it to gravity.
struct ScaledBlock {
    block: DMatrix<f64>,
    coupling: Vec<f64>,
}

impl TargetMetric for ScaledBlock {
    fn dim(&self) -> usize {
        self.block.nrows()
    }
    fn eval(&self, fields: &[f64], _x: [f64; 2]) -> DMatrix<f64> {
        let s: f64 = self.coupling.iter().zip(fields).map(|(k, x)| k * x * x).sum();
        &self.block * (1.0 + s)
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ExtensionDoc {
    /// Constant metric of the extra block [default: [[1]]].
    block: Option<Vec<Vec<f64>>>,
    /// Per-gravitational-field coupling coefficients.
    coupling: Vec<f64>,
    /// Initial profile of each extra field.
    fields: Vec<String>,
}

/// `0`, `<c>`, `<c>^2` or `exp(-<c>)` for a coordinate name c.
fn profile(grid: &GridSpec, spec: &str) -> Result<Array2<f64>> {
    let s = spec.replace(' ', "");
    if s == "0" {
        return Ok(grid.zeros());
    }
    let axis = |name: &str| grid.coord_names.iter().position(|c| c == name);
    if let Some(a) = axis(&s) {
        return Ok(grid.sample(|x| x[a]));
    }
    if let Some(a) = s.strip_suffix("^2").and_then(axis) {
        return Ok(grid.sample(|x| x[a] * x[a]));
    }
    if let Some(a) = s.strip_prefix("exp(-").and_then(|r| r.strip_suffix(')')).and_then(axis) {
        return Ok(grid.sample(|x| (-x[a]).exp()));
    }
    bail!("unrecognized field profile {spec:?}; use 0, <coord>, <coord>^2 or exp(-<coord>)")
}

fn differing_bits(a: &[Patch], b: &[Patch]) -> usize {
    a.iter()
        .zip(b)
        .map(|(p, q)| p.data.iter().zip(&q.data).filter(|(x, y)| x.to_bits() != y.to_bits()).count())
        .sum()
}

pub fn extend(global: &Global, args: ExtendArgs) -> Result<()> {
    let run = resolve(global, args)?;
    let a = run.opts;
    let model = core_model(a.model.context("--model is required")?);
    if a.static_ && model != Model::Axisym {
        bail!("--static applies to the axisym model only");
    }
    let doc: ExtensionDoc = match &a.extension {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => ExtensionDoc::default(),
    };
    let rows = doc.block.unwrap_or_else(|| vec![vec![1.0]]);
    let m = rows.len();
    if m == 0 || rows.iter().any(|r| r.len() != m) || rows.iter().flatten().any(|v| !v.is_finite()) {
        bail!("extension block must be a non-empty square matrix of finite numbers");
    }
    let block = DMatrix::from_fn(m, m, |i, j| rows[i][j]);

    let map = verify::exact_map(model, a.n.unwrap_or(verify::EXTENSION_N))?;
    let grid = map.grid().clone();
    let default_profile = match model {
        Model::Gowdy => "exp(-tau)".to_string(),
        _ => grid.coord_names[1].clone(),
    };
    let specs = if doc.fields.is_empty() { vec![default_profile; m] } else { doc.fields };
    if specs.len() != m {
        bail!("{} field profiles for a {m}-dimensional block", specs.len());
    }
    let extra = specs.iter().map(|s| profile(&grid, s)).collect::<Result<Vec<_>>>()?;
    let mut out = Output::create(&run.out, run.timings)?;

    let spec = if doc.coupling.iter().all(|&k| k == 0.0) {
        ExtensionSpec::constant(block)
    } else {
        ExtensionSpec { extra_dim: m, metric: Arc::new(ScaledBlock { block, coupling: doc.coupling }) }
    };
    let target = extension::extend_target(map.target().clone(), spec, &grid)?;
    let grav_dim = target.grav_dim();
    let before = el_residual(&map)?;
    let ext = extension::extended_map(&grid, map.base().clone(), target, map.components(), &extra)?;
    let after = el_residual(&ext)?;

    let mut report = DiagnosticsReport::new("extend", model.name());
    let grav_names: [&str; 2] = match model {
        Model::Axisym => ["f", "omega"],
        Model::Er => ["psi", "omega"],
        Model::Gowdy => ["P", "Q"],
    };
    for (name, r) in grav_names.iter().zip(&after) {
        report.residuals.push(Norms::of(name, r));
    }
    let extra_names: Vec<String> = (1..=m).map(|k| format!("x{k}")).collect();
    for (name, r) in extra_names.iter().zip(&after[grav_dim..]) {
        report.residuals.push(Norms::of(name, r));
    }
    let diff = differing_bits(&before, &after[..grav_dim]);
    report.checks.push(Check::at_most("gravitational_residual_differing_bits", diff as f64, 0.0));

    if a.static_ {
        let f = map.component(0).clone();
        let one = FieldMap::new(grid.clone(), vec![f.clone()], map.base().clone(), Arc::new(extension::StaticTarget))?;
        let two = extension::extended_map(
            &grid,
            map.base().clone(),
            extension::static_extension(&grid)?,
            &[f],
            &[extra[0].clone()],
        )?;
        let (r1, r2) = (el_residual(&one)?, el_residual(&two)?);
        report.residuals.push(Norms::of("static_f", &r1[0]));
        let diff = differing_bits(&r1, &r2[..1]);
        report.checks.push(Check::at_most("static_f_residual_differing_bits", diff as f64, 0.0));
    }
    out.mark("extend");

    let mut named: Vec<(&str, Array2<f64>)> =
        grav_names.iter().copied().zip(map.components().iter().cloned()).collect();
    named.extend(extra_names.iter().map(String::as_str).zip(extra));
    out.csv("extend.csv", &GridData::new(model.name(), grid, named)?)?;
    out.finish(report)
}

pub fn report(args: ReportArgs) -> Result<()> {
    if args.schema {
        print!("{SCHEMA}");
        return Ok(());
    }
    let path = args.input.context("--input is required")?;
    let report = DiagnosticsReport::read(&path).with_context(|| format!("reading {}", path.display()))?;
    summarize(&report);
    if report.passed() {
        Ok(())
    } else {
        Err(ChecksFailed(report.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect()).into())
    }
}
