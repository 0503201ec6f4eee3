//! Stationary axisymmetric vacuum fields in Weyl–Lewis–Papapetrou form,
//! as a map from the flat (ρ, z) half-plane into the target with metric
//! G = (ρ/2f²) δ over the fields X = (f, Ω).

use std::sync::Arc;

use nalgebra::DMatrix;
use ndarray::Array2;

use crate::engine::EmtField;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, Patch, ScalarJet};
use crate::map::FieldMap;
use crate::metric::{BaseMetric, Euclidean, TargetMetric};
use crate::models::potential::{integrate_potential, Potential};

pub const COORDS: [&str; 2] = ["rho", "z"];

/// G_μν = (ρ/2f²) δ_μν on X = (f, Ω), with x = (ρ, z).
#[derive(Debug, Clone, Copy, Default)]
pub struct AxisymTarget;

impl TargetMetric for AxisymTarget {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, fields: &[f64], x: [f64; 2]) -> DMatrix<f64> {
        let f = fields[0];
        DMatrix::identity(2, 2) * (x[0] / (2.0 * f * f))
    }

    fn field_partials(&self, fields: &[f64], x: [f64; 2]) -> Option<Vec<DMatrix<f64>>> {
        let f = fields[0];
        Some(vec![DMatrix::identity(2, 2) * (-x[0] / (f * f * f)), DMatrix::zeros(2, 2)])
    }

    fn coord_partials(&self, fields: &[f64], _x: [f64; 2]) -> Option<[DMatrix<f64>; 2]> {
        let f = fields[0];
        Some([DMatrix::identity(2, 2) * (1.0 / (2.0 * f * f)), DMatrix::zeros(2, 2)])
    }
}

pub fn check_grid(grid: &GridSpec) -> Result<()> {
    if !grid.has_names(COORDS) {
        return Err(Error::Domain(format!(
            "stationary model needs coordinates (rho, z), got {:?}",
            grid.names()
        )));
    }
    if !(grid.origin[0] > 0.0) {
        return Err(Error::AxisOnGrid);
    }
    Ok(())
}

/// Flat base and the target above.
pub fn axisym_model(grid: &GridSpec) -> Result<(Arc<dyn BaseMetric>, Arc<dyn TargetMetric>)> {
    check_grid(grid)?;
    Ok((Arc::new(Euclidean), Arc::new(AxisymTarget)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisymFields {
    pub grid: GridSpec,
    pub f: Array2<f64>,
    pub omega: Array2<f64>,
    pub k: Option<Array2<f64>>,
    pub omega_lower: Option<Array2<f64>>,
}

impl AxisymFields {
    pub fn new(grid: GridSpec, f: Array2<f64>, omega: Array2<f64>) -> Result<Self> {
        grid.validate()?;
        check_grid(&grid)?;
        for (c, a) in [&f, &omega].into_iter().enumerate() {
            if a.dim() != (grid.dims[0], grid.dims[1]) {
                return Err(Error::InvalidGrid(format!("field {c} does not match the grid")));
            }
            if let Some(((i, j), _)) = a.indexed_iter().find(|(_, v)| !v.is_finite()) {
                return Err(Error::NonFinite { component: c, i, j });
            }
        }
        if let Some(((i, j), v)) = f.indexed_iter().find(|(_, v)| **v <= 0.0) {
            return Err(Error::Domain(format!("f must be positive, got {v} at ({i}, {j})")));
        }
        Ok(AxisymFields { grid, f, omega, k: None, omega_lower: None })
    }

    pub fn from_fns(
        grid: GridSpec,
        f: impl Fn([f64; 2]) -> f64,
        omega: impl Fn([f64; 2]) -> f64,
    ) -> Result<Self> {
        let (fa, oa) = (grid.sample(f), grid.sample(omega));
        Self::new(grid, fa, oa)
    }

    pub fn to_map(&self) -> Result<FieldMap> {
        let (base, target) = axisym_model(&self.grid)?;
        FieldMap::new(self.grid.clone(), vec![self.f.clone(), self.omega.clone()], base, target)
    }

    fn jets(&self, i: usize, j: usize, second: bool) -> (ScalarJet, ScalarJet) {
        (self.grid.jet(&self.f, i, j, second), self.grid.jet(&self.omega, i, j, second))
    }
}

/// Curzon monopole ψ = −m/r.
pub fn curzon_psi(m: f64, [rho, z]: [f64; 2]) -> f64 {
    -m / rho.hypot(z)
}

/// Static fields f = e^{2ψ}, Ω = 0 of the Curzon solution.
pub fn curzon_fields(grid: &GridSpec, m: f64) -> Result<AxisymFields> {
    AxisymFields::from_fns(grid.clone(), |p| (2.0 * curzon_psi(m, p)).exp(), |_| 0.0)
}

/// Left sides of the two main field equations at one point.
pub fn main_equations(rho: f64, f: &ScalarJet, om: &ScalarJet) -> [f64; 2] {
    let fv = f.v;
    let lap_f = f.dd[0][0] + f.d[0] / rho + f.dd[1][1];
    let lap_o = om.dd[0][0] + om.d[0] / rho + om.dd[1][1];
    let grad_o2 = om.d[0] * om.d[0] + om.d[1] * om.d[1];
    let grad_f2 = f.d[0] * f.d[0] + f.d[1] * f.d[1];
    [
        lap_f + (grad_o2 - grad_f2) / fv,
        lap_o - 2.0 / fv * (f.d[0] * om.d[0] + f.d[1] * om.d[1]),
    ]
}

/// Static Laplace equation ψ_ρρ + ψ_ρ/ρ + ψ_zz at one point.
pub fn static_equation(rho: f64, psi: &ScalarJet) -> f64 {
    psi.dd[0][0] + psi.d[0] / rho + psi.dd[1][1]
}

/// Jet of f = e^{2ψ} from the jet of ψ.
pub fn f_jet_from_psi(psi: &ScalarJet) -> ScalarJet {
    let f = (2.0 * psi.v).exp();
    let mut dd = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            dd[a][b] = 2.0 * f * (psi.dd[a][b] + 2.0 * psi.d[a] * psi.d[b]);
        }
    }
    ScalarJet { v: f, d: [2.0 * f * psi.d[0], 2.0 * f * psi.d[1]], dd }
}

/// Residuals of the two main field equations on the interior.
pub fn axisym_residuals(fields: &AxisymFields) -> [Patch; 2] {
    let grid = &fields.grid;
    let region = grid.interior();
    let eval = |c: usize| {
        Patch::from_fn(region.clone(), |i, j| {
            let (f, o) = fields.jets(i, j, true);
            main_equations(grid.coord(0, i), &f, &o)[c]
        })
    };
    [eval(0), eval(1)]
}

/// Static Laplace residual of a sampled ψ on the interior.
pub fn laplace_residual(grid: &GridSpec, psi: &Array2<f64>) -> Patch {
    Patch::from_fn(grid.interior(), |i, j| static_equation(grid.coord(0, i), &grid.jet(psi, i, j, true)))
}

fn k_point(rho: f64, f: &ScalarJet, o: &ScalarJet) -> [f64; 2] {
    let c = rho / (f.v * f.v);
    [
        0.25 * c * (f.d[0] * f.d[0] + o.d[0] * o.d[0] - f.d[1] * f.d[1] - o.d[1] * o.d[1]),
        0.5 * c * (f.d[0] * f.d[1] + o.d[0] * o.d[1]),
    ]
}

/// (∂_ρk, ∂_zk) at every grid point.
pub fn k_gradient(fields: &AxisymFields) -> [Patch; 2] {
    let grid = &fields.grid;
    let region = grid.region(0);
    let eval = |c: usize| {
        Patch::from_fn(region.clone(), |i, j| {
            let (f, o) = fields.jets(i, j, false);
            k_point(grid.coord(0, i), &f, &o)[c]
        })
    };
    [eval(0), eval(1)]
}

/// Energy-momentum tensor in closed form: T_ρρ = −T_zz and T_ρz.
pub fn axisym_emt(fields: &AxisymFields) -> EmtField {
    let grid = &fields.grid;
    EmtField::from_lower(grid, &Euclidean, &grid.region(0), |i, j| {
        let (f, o) = fields.jets(i, j, false);
        let [t_rr, t_rz] = k_point(grid.coord(0, i), &f, &o);
        [[t_rr, t_rz], [t_rz, -t_rr]]
    })
}

/// k by quadrature of its gradient, anchored at grid indices `anchor`.
pub fn integrate_k(fields: &AxisymFields, anchor: [usize; 2], value: f64) -> Potential {
    let [gr, gz] = k_gradient(fields);
    integrate_potential([&gr.expand(&fields.grid), &gz.expand(&fields.grid)], &fields.grid, anchor, value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmegaDirection {
    /// From the metric function ω to the twist potential Ω.
    LowerToTwist,
    /// From Ω back to ω.
    TwistToLower,
}

/// Converts between ω and Ω by integrating the defining first-order
/// relations (Ω_ρ, Ω_z) = (f²ω_z/ρ, −f²ω_ρ/ρ). The loop defect is returned
/// rather than treated as an error, since the relations are integrable only
/// on solutions.
pub fn omega_conversion(
    grid: &GridSpec,
    f: &Array2<f64>,
    source: &Array2<f64>,
    direction: OmegaDirection,
    anchor: [usize; 2],
    anchor_value: f64,
) -> Result<Potential> {
    check_grid(grid)?;
    let mut g0 = grid.zeros();
    let mut g1 = grid.zeros();
    for i in 0..grid.dims[0] {
        let rho = grid.coord(0, i);
        for j in 0..grid.dims[1] {
            let fv = f[[i, j]];
            if !(fv > 0.0) {
                return Err(Error::Domain(format!("f must be positive, got {fv} at ({i}, {j})")));
            }
            let (s0, s1) = (grid.d1(source, 0, i, j), grid.d1(source, 1, i, j));
            let (a, b) = match direction {
                OmegaDirection::LowerToTwist => (fv * fv * s1 / rho, -fv * fv * s0 / rho),
                OmegaDirection::TwistToLower => (-rho * s1 / (fv * fv), rho * s0 / (fv * fv)),
            };
            g0[[i, j]] = a;
            g1[[i, j]] = b;
        }
    }
    Ok(integrate_potential([&g0, &g1], grid, anchor, anchor_value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::christoffel;

    fn window(n: usize) -> GridSpec {
        GridSpec::from_extents(COORDS, [1.0, 1.0], [3.0, 3.0], [n, n], [false; 2]).unwrap()
    }

    #[test]
    fn target_values_and_partials() {
        let g = AxisymTarget.eval(&[1.0, 0.0], [2.0, 0.0]);
        assert_eq!(g, DMatrix::identity(2, 2));
        let d = AxisymTarget.coord_partials(&[1.0, 0.0], [2.0, 0.0]).unwrap();
        assert_eq!(d[0], DMatrix::identity(2, 2) * 0.5);
    }

    #[test]
    fn christoffels_at_reference_point() {
        let c = christoffel(&AxisymTarget, &[2.0, 0.0], [1.0, 0.0]).unwrap();
        assert!((c.get(0, 0, 0) + 0.5).abs() < 1e-15);
        assert!((c.get(0, 1, 1) - 0.5).abs() < 1e-15);
        assert!((c.get(1, 0, 1) + 0.5).abs() < 1e-15);
        assert_eq!(c.get(1, 0, 0), 0.0);
    }

    #[test]
    fn axis_rejected() {
        let g = GridSpec::from_extents(COORDS, [0.0, 1.0], [3.0, 3.0], [9, 9], [false; 2]).unwrap();
        assert_eq!(axisym_model(&g).err().unwrap().to_string(), "axis not allowed for stationary model; use offset grid");
    }

    #[test]
    fn non_positive_f_rejected() {
        assert!(matches!(AxisymFields::from_fns(window(9), |_| -1.0, |_| 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn flat_space_and_negative_control() {
        let flat = AxisymFields::from_fns(window(9), |_| 1.0, |_| 0.0).unwrap();
        let [r1, r2] = axisym_residuals(&flat);
        assert_eq!(r1.sup_norm() + r2.sup_norm(), 0.0);
        let twisted = AxisymFields::from_fns(window(9), |_| 1.0, |[_, z]| z).unwrap();
        let [r1, r2] = axisym_residuals(&twisted);
        assert!((r1.sup_norm() - 1.0).abs() < 1e-12);
        assert!(r2.sup_norm() < 1e-12);
    }

    #[test]
    fn omega_from_rho_squared() {
        let g = window(17);
        let f = g.sample(|_| 1.0);
        let w = g.sample(|[r, _]| r * r);
        let p = omega_conversion(&g, &f, &w, OmegaDirection::LowerToTwist, [0, 0], 0.0).unwrap();
        for ((i, j), v) in p.field.indexed_iter() {
            let z = g.coord(1, j);
            assert!((v - (-2.0 * (z - 1.0))).abs() < 1e-12, "{i} {j}");
        }
    }
}
