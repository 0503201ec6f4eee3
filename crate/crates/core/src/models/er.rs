//! Einstein–Rosen cylindrical waves: base diag(1, −1) over (t, ρ), target
//! G = diag(2ρ, (ρ/2)e^{−4ψ}) over X = (ψ, Ω).

use std::sync::Arc;

use nalgebra::DMatrix;
use ndarray::Array2;
use num_complex::Complex64;

use crate::engine::EmtField;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, Patch, ScalarJet};
use crate::map::FieldMap;
use crate::metric::{BaseMetric, Minkowski, TargetMetric};
use crate::models::potential::{integrate_potential, Potential};
use crate::special::bessel_j0;

pub const COORDS: [&str; 2] = ["t", "rho"];

/// The generic motion equations for this pair equal this factor times the
/// field equations in the form returned by [`er_residuals`].
pub const ORIENTATION: f64 = -1.0;

#[derive(Debug, Clone, Copy, Default)]
pub struct ErTarget;

impl TargetMetric for ErTarget {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, fields: &[f64], x: [f64; 2]) -> DMatrix<f64> {
        let rho = x[1];
        let e = (-4.0 * fields[0]).exp();
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0 * rho, 0.5 * rho * e]))
    }

    fn field_partials(&self, fields: &[f64], x: [f64; 2]) -> Option<Vec<DMatrix<f64>>> {
        let e = (-4.0 * fields[0]).exp();
        let mut d_psi = DMatrix::zeros(2, 2);
        d_psi[(1, 1)] = -2.0 * x[1] * e;
        Some(vec![d_psi, DMatrix::zeros(2, 2)])
    }

    fn coord_partials(&self, fields: &[f64], _x: [f64; 2]) -> Option<[DMatrix<f64>; 2]> {
        let e = (-4.0 * fields[0]).exp();
        let d_rho = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 0.5 * e]));
        Some([DMatrix::zeros(2, 2), d_rho])
    }
}

pub fn check_grid(grid: &GridSpec) -> Result<()> {
    if !grid.has_names(COORDS) {
        return Err(Error::Domain(format!(
            "Einstein-Rosen model needs coordinates (t, rho), got {:?}",
            grid.names()
        )));
    }
    if grid.origin[1] < 0.0 {
        return Err(Error::Domain(format!("rho must be non-negative, grid starts at {}", grid.origin[1])));
    }
    Ok(())
}

pub fn er_model(grid: &GridSpec) -> Result<(Arc<dyn BaseMetric>, Arc<dyn TargetMetric>)> {
    check_grid(grid)?;
    Ok((Arc::new(Minkowski), Arc::new(ErTarget)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErFields {
    pub grid: GridSpec,
    pub psi: Array2<f64>,
    pub omega: Array2<f64>,
    pub gamma_potential: Option<Array2<f64>>,
    pub omega_lower: Option<Array2<f64>>,
}

impl ErFields {
    pub fn new(grid: GridSpec, psi: Array2<f64>, omega: Array2<f64>) -> Result<Self> {
        grid.validate()?;
        check_grid(&grid)?;
        for (c, a) in [&psi, &omega].into_iter().enumerate() {
            if a.dim() != (grid.dims[0], grid.dims[1]) {
                return Err(Error::InvalidGrid(format!("field {c} does not match the grid")));
            }
            if let Some(((i, j), _)) = a.indexed_iter().find(|(_, v)| !v.is_finite()) {
                return Err(Error::NonFinite { component: c, i, j });
            }
        }
        Ok(ErFields { grid, psi, omega, gamma_potential: None, omega_lower: None })
    }

    pub fn from_fns(
        grid: GridSpec,
        psi: impl Fn([f64; 2]) -> f64,
        omega: impl Fn([f64; 2]) -> f64,
    ) -> Result<Self> {
        let (p, o) = (grid.sample(psi), grid.sample(omega));
        Self::new(grid, p, o)
    }

    pub fn to_map(&self) -> Result<FieldMap> {
        let (base, target) = er_model(&self.grid)?;
        FieldMap::new(self.grid.clone(), vec![self.psi.clone(), self.omega.clone()], base, target)
    }

    fn jets(&self, i: usize, j: usize, second: bool) -> (ScalarJet, ScalarJet) {
        (self.grid.jet(&self.psi, i, j, second), self.grid.jet(&self.omega, i, j, second))
    }
}

/// Left sides of the ψ and Ω equations at one point (jets over (t, ρ)).
pub fn er_equations(rho: f64, psi: &ScalarJet, om: &ScalarJet) -> [f64; 2] {
    let e = (-4.0 * psi.v).exp();
    let wave = |s: &ScalarJet| s.dd[1][1] + s.d[1] / rho - s.dd[0][0];
    [
        wave(psi) + 0.5 * e * (om.d[1] * om.d[1] - om.d[0] * om.d[0]),
        wave(om) + 4.0 * (om.d[0] * psi.d[0] - om.d[1] * psi.d[1]),
    ]
}

/// Field-equation residuals on the interior.
pub fn er_residuals(fields: &ErFields) -> Result<[Patch; 2]> {
    let grid = &fields.grid;
    if !(grid.origin[1] > 0.0) {
        return Err(Error::Domain("rho = 0 lies on the stencil; use a staggered grid".into()));
    }
    let region = grid.interior();
    let eval = |c: usize| {
        Patch::from_fn(region.clone(), |i, j| {
            let (p, o) = fields.jets(i, j, true);
            er_equations(grid.coord(1, j), &p, &o)[c]
        })
    };
    Ok([eval(0), eval(1)])
}

/// 2ρ(ψ_t² − ψ_ρ²) + ½ρe^{−4ψ}(Ω_t² − Ω_ρ²).
pub fn er_lagrangian(rho: f64, psi: &ScalarJet, om: &ScalarJet) -> f64 {
    let e = (-4.0 * psi.v).exp();
    2.0 * rho * (psi.d[0] * psi.d[0] - psi.d[1] * psi.d[1])
        + 0.5 * rho * e * (om.d[0] * om.d[0] - om.d[1] * om.d[1])
}

/// (T_tt, T_tρ) at one point; T_ρρ = T_tt.
pub fn er_emt_point(rho: f64, psi: &ScalarJet, om: &ScalarJet) -> [f64; 2] {
    let e = (-4.0 * psi.v).exp();
    [
        rho * (psi.d[0] * psi.d[0] + psi.d[1] * psi.d[1])
            + 0.25 * rho * e * (om.d[0] * om.d[0] + om.d[1] * om.d[1]),
        2.0 * rho * psi.d[0] * psi.d[1] + 0.5 * rho * e * om.d[0] * om.d[1],
    ]
}

pub fn er_emt(fields: &ErFields) -> EmtField {
    let grid = &fields.grid;
    EmtField::from_lower(grid, &Minkowski, &grid.region(0), |i, j| {
        let (p, o) = fields.jets(i, j, false);
        let [tt, tr] = er_emt_point(grid.coord(1, j), &p, &o);
        [[tt, tr], [tr, tt]]
    })
}

/// Gradient of the metric function γ by grid axis: (∂_tγ, ∂_ργ) = (T_tρ, T_tt).
pub fn gamma_gradient(fields: &ErFields) -> [Patch; 2] {
    let grid = &fields.grid;
    let region = grid.region(0);
    let eval = |c: usize| {
        Patch::from_fn(region.clone(), |i, j| {
            let (p, o) = fields.jets(i, j, false);
            let [tt, tr] = er_emt_point(grid.coord(1, j), &p, &o);
            [tr, tt][c]
        })
    };
    [eval(0), eval(1)]
}

pub fn integrate_gamma(fields: &ErFields, anchor: [usize; 2], value: f64) -> Potential {
    let [gt, gr] = gamma_gradient(fields);
    integrate_potential([&gt.expand(&fields.grid), &gr.expand(&fields.grid)], &fields.grid, anchor, value)
}

/// Ω from ω through ρΩ_t = e^{4ψ}ω_ρ and ρΩ_ρ = e^{4ψ}ω_t, as printed.
pub fn twist_from_lower(
    grid: &GridSpec,
    psi: &Array2<f64>,
    omega_lower: &Array2<f64>,
    anchor: [usize; 2],
    anchor_value: f64,
) -> Result<Potential> {
    if !(grid.origin[1] > 0.0) {
        return Err(Error::Domain("rho = 0 on the grid".into()));
    }
    let mut gt = grid.zeros();
    let mut gr = grid.zeros();
    for ((i, j), v) in gt.indexed_iter_mut() {
        let e = (4.0 * psi[[i, j]]).exp() / grid.coord(1, j);
        *v = e * grid.d1(omega_lower, 1, i, j);
        gr[[i, j]] = e * grid.d1(omega_lower, 0, i, j);
    }
    Ok(integrate_potential([&gt, &gr], grid, anchor, anchor_value))
}

/// Standing wave ψ = J₀(ρ) cos t.
pub fn bessel_psi([t, rho]: [f64; 2]) -> f64 {
    bessel_j0(rho) * t.cos()
}

/// Regular pulse ψ = Re[((a + it)² + ρ²)^{−1/2}] and its time derivative.
pub fn pulse(a: f64, [t, rho]: [f64; 2]) -> (f64, f64) {
    let w = Complex64::new(a, t);
    let s = w * w + rho * rho;
    let inv = s.sqrt().inv();
    let dt = -Complex64::i() * w * inv / s;
    (inv.re, dt.re)
}
