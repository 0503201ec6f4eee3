//! Successive over-relaxation for the stationary main field equations with
//! Dirichlet data on all four edges.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{sup_norm, GridSpec};
use crate::models::axisym::{self, AxisymFields};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RelaxConfig {
    pub over_relaxation: f64,
    pub tol: f64,
    pub max_iters: usize,
    /// Sweeps between residual evaluations.
    pub check_every: usize,
}

impl Default for RelaxConfig {
    fn default() -> Self {
        RelaxConfig { over_relaxation: 1.8, tol: 1e-10, max_iters: 200_000, check_every: 50 }
    }
}

impl RelaxConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.over_relaxation > 1.0 && self.over_relaxation < 2.0) {
            return Err(Error::Config(format!(
                "over_relaxation must lie in (1, 2), got {}",
                self.over_relaxation
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 || self.check_every == 0 {
            return Err(Error::Config("max_iters and check_every must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxReport {
    pub iterations: usize,
    pub residual: f64,
    /// Sup-norm residual at each check, in sweep order.
    pub history: Vec<(usize, f64)>,
}

/// Boundary values of f and Ω; only edge samples are read.
#[derive(Debug, Clone, PartialEq)]
pub struct Dirichlet {
    pub f: Array2<f64>,
    pub omega: Array2<f64>,
}

impl Dirichlet {
    pub fn from_fns(grid: &GridSpec, f: impl Fn([f64; 2]) -> f64, omega: impl Fn([f64; 2]) -> f64) -> Self {
        Dirichlet { f: grid.sample(f), omega: grid.sample(omega) }
    }

    pub fn from_fields(fields: &AxisymFields) -> Self {
        Dirichlet { f: fields.f.clone(), omega: fields.omega.clone() }
    }
}

fn on_edge(grid: &GridSpec, i: usize, j: usize) -> bool {
    i == 0 || j == 0 || i + 1 == grid.dims[0] || j + 1 == grid.dims[1]
}

/// Transfinite (Coons) interpolation of the edge values into the interior.
fn coons(grid: &GridSpec, edge: &Array2<f64>) -> Array2<f64> {
    let (n0, n1) = (grid.dims[0], grid.dims[1]);
    let (l0, l1) = (n0 - 1, n1 - 1);
    Array2::from_shape_fn((n0, n1), |(i, j)| {
        if on_edge(grid, i, j) {
            return edge[[i, j]];
        }
        let u = i as f64 / l0 as f64;
        let v = j as f64 / l1 as f64;
        (1.0 - u) * edge[[0, j]] + u * edge[[l0, j]] + (1.0 - v) * edge[[i, 0]] + v * edge[[i, l1]]
            - ((1.0 - u) * (1.0 - v) * edge[[0, 0]]
                + u * (1.0 - v) * edge[[l0, 0]]
                + (1.0 - u) * v * edge[[0, l1]]
                + u * v * edge[[l0, l1]])
    })
}

/// Solves the main field equations by lexicographic SOR sweeps with the
/// nonlinear terms evaluated at the latest iterate.
pub fn relax_stationary(
    grid: &GridSpec,
    boundary: &Dirichlet,
    config: &RelaxConfig,
) -> Result<(AxisymFields, RelaxReport)> {
    config.validate()?;
    axisym::check_grid(grid)?;
    let (n0, n1) = (grid.dims[0], grid.dims[1]);
    for i in 0..n0 {
        for j in 0..n1 {
            if !on_edge(grid, i, j) {
                continue;
            }
            let (f, o) = (boundary.f[[i, j]], boundary.omega[[i, j]]);
            if !f.is_finite() || !o.is_finite() {
                return Err(Error::NonFinite { component: usize::from(f.is_finite()), i, j });
            }
            if f <= 0.0 {
                return Err(Error::Domain(format!("boundary f must be positive, got {f} at ({i}, {j})")));
            }
        }
    }

    let mut f = coons(grid, &boundary.f);
    let mut om = coons(grid, &boundary.omega);
    let [hr, hz] = grid.spacing;
    let (ir2, iz2) = (1.0 / (hr * hr), 1.0 / (hz * hz));
    let diag = -2.0 * (ir2 + iz2);
    let neg_inv_diag = -1.0 / diag;
    let (cr, cz) = (0.5 / hr, 0.5 / hz);
    let w = config.over_relaxation;

    let residual = |f: &Array2<f64>, om: &Array2<f64>| -> Result<f64> {
        let fields = AxisymFields::new(grid.clone(), f.clone(), om.clone())?;
        let [a, b] = axisym::axisym_residuals(&fields);
        Ok(a.sup_norm().max(b.sup_norm()))
    };

    let mut history = Vec::new();
    let mut best = f64::INFINITY;
    let mut iter = 0;
    loop {
        let fs = f.as_slice_mut().expect("standard layout");
        let os = om.as_slice_mut().expect("standard layout");
        for i in 1..n0 - 1 {
            let rho = grid.coord(0, i);
            let c = 0.5 / (hr * rho);
            for j in 1..n1 - 1 {
                let k = i * n1 + j;
                let (up, dn, rt, lt) = (k + n1, k - n1, k + 1, k - 1);
                let fv = fs[k];
                let (fr, fz) = ((fs[up] - fs[dn]) * cr, (fs[rt] - fs[lt]) * cz);
                let (or, oz) = ((os[up] - os[dn]) * cr, (os[rt] - os[lt]) * cz);
                let nb = |a: &[f64]| (a[up] + a[dn]) * ir2 + (a[rt] + a[lt]) * iz2 + (a[up] - a[dn]) * c;
                let src_f = (or * or + oz * oz - fr * fr - fz * fz) / fv;
                let target_f = (nb(fs) + src_f) * neg_inv_diag;
                fs[k] = fv + w * (target_f - fv);

                let fv = fs[k];
                let src_o = -2.0 / fv * (fr * or + fz * oz);
                let ov = os[k];
                let target_o = (nb(os) + src_o) * neg_inv_diag;
                os[k] = ov + w * (target_o - ov);
            }
        }
        iter += 1;

        if iter % config.check_every == 0 || iter == config.max_iters {
            if !(sup_norm(&f).is_finite() && sup_norm(&om).is_finite()) || f.iter().any(|&v| v <= 0.0) {
                return Err(Error::Diverged { iteration: iter, residual: f64::INFINITY });
            }
            let r = residual(&f, &om)?;
            history.push((iter, r));
            if !r.is_finite() || r > 10.0 * best {
                return Err(Error::Diverged { iteration: iter, residual: r });
            }
            best = best.min(r);
            if r <= config.tol {
                let fields = AxisymFields::new(grid.clone(), f, om)?;
                return Ok((fields, RelaxReport { iterations: iter, residual: r, history }));
            }
            if iter >= config.max_iters {
                return Err(Error::MaxIterations { max_iters: config.max_iters, residual: r });
            }
        }
    }
}
