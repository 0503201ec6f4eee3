//! Dimensional extension of a target space by a decoupled block
//! G = diag(G_μν(X^μ, x), G_αβ(X^α, x)).

use std::sync::Arc;

use nalgebra::DMatrix;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, Patch};
use crate::linalg;
use crate::map::FieldMap;
use crate::metric::{self, BaseMetric, ConstantTarget, TargetMetric};
use crate::models::axisym;

/// Samples drawn when checking the decoupling conditions.
pub const COUPLING_SAMPLES: usize = 64;
const SAMPLE_SEED: u64 = 0x0005_eed0_fe17;

/// Extra target block. `metric.eval` receives the full field vector
/// (gravitational fields first) and returns the `extra_dim`² block G_αβ.
#[derive(Clone)]
pub struct ExtensionSpec {
    pub extra_dim: usize,
    pub metric: Arc<dyn TargetMetric>,
}

impl ExtensionSpec {
    /// G_αβ = δ_αβ.
    pub fn flat(extra_dim: usize) -> Self {
        ExtensionSpec { extra_dim, metric: Arc::new(FullVector(ConstantTarget::identity(extra_dim))) }
    }

    /// Constant block, e.g. η_αβ.
    pub fn constant(block: DMatrix<f64>) -> Self {
        ExtensionSpec { extra_dim: block.nrows(), metric: Arc::new(FullVector(ConstantTarget(block))) }
    }
}

/// Adapts a block that ignores the field vector.
struct FullVector(ConstantTarget);

impl TargetMetric for FullVector {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval(&self, _fields: &[f64], x: [f64; 2]) -> DMatrix<f64> {
        self.0.eval(&[], x)
    }
    fn field_partials(&self, fields: &[f64], _x: [f64; 2]) -> Option<Vec<DMatrix<f64>>> {
        let n = self.dim();
        Some(vec![DMatrix::zeros(n, n); fields.len()])
    }
    fn coord_partials(&self, _fields: &[f64], _x: [f64; 2]) -> Option<[DMatrix<f64>; 2]> {
        let n = self.dim();
        Some([DMatrix::zeros(n, n), DMatrix::zeros(n, n)])
    }
}

/// Block-diagonal target over (X^μ, X^α).
pub struct ExtendedTarget {
    grav: Arc<dyn TargetMetric>,
    ext: ExtensionSpec,
}

impl ExtendedTarget {
    pub fn grav_dim(&self) -> usize {
        self.grav.dim()
    }

    pub fn extra_dim(&self) -> usize {
        self.ext.extra_dim
    }

    fn assemble(&self, top: &DMatrix<f64>, bottom: &DMatrix<f64>) -> DMatrix<f64> {
        let (n, m) = (self.grav.dim(), self.ext.extra_dim);
        let mut g = DMatrix::zeros(n + m, n + m);
        g.view_mut((0, 0), (n, n)).copy_from(top);
        g.view_mut((n, n), (m, m)).copy_from(bottom);
        g
    }
}

impl TargetMetric for ExtendedTarget {
    fn dim(&self) -> usize {
        self.grav.dim() + self.ext.extra_dim
    }

    fn eval(&self, fields: &[f64], x: [f64; 2]) -> DMatrix<f64> {
        let n = self.grav.dim();
        self.assemble(&self.grav.eval(&fields[..n], x), &self.ext.metric.eval(fields, x))
    }

    fn field_partials(&self, fields: &[f64], x: [f64; 2]) -> Option<Vec<DMatrix<f64>>> {
        let (n, m) = (self.grav.dim(), self.ext.extra_dim);
        let top = metric::field_partials(self.grav.as_ref(), &fields[..n], x);
        let bottom = metric::field_partials(self.ext.metric.as_ref(), fields, x);
        Some(
            (0..n + m)
                .map(|l| {
                    let t = if l < n { top[l].clone() } else { DMatrix::zeros(n, n) };
                    self.assemble(&t, &bottom[l])
                })
                .collect(),
        )
    }

    fn coord_partials(&self, fields: &[f64], x: [f64; 2]) -> Option<[DMatrix<f64>; 2]> {
        let n = self.grav.dim();
        let top = metric::coord_partials(self.grav.as_ref(), &fields[..n], x);
        let bottom = metric::coord_partials(self.ext.metric.as_ref(), fields, x);
        Some([self.assemble(&top[0], &bottom[0]), self.assemble(&top[1], &bottom[1])])
    }
}

/// Builds the extended target, checking by deterministic sampling over the
/// grid that G_αβ does not depend on X^μ, is symmetric and nondegenerate.
pub fn extend_target(
    grav: Arc<dyn TargetMetric>,
    ext: ExtensionSpec,
    grid: &GridSpec,
) -> Result<Arc<ExtendedTarget>> {
    let (n, m) = (grav.dim(), ext.extra_dim);
    if m == 0 || ext.metric.dim() != m {
        return Err(Error::Coupling(format!(
            "extension block has dimension {}, expected extra_dim = {m} ≥ 1",
            ext.metric.dim()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    for _ in 0..COUPLING_SAMPLES {
        let fields: Vec<f64> = (0..n + m).map(|_| rng.random_range(0.5..1.5)).collect();
        let x = [0, 1].map(|a| grid.origin[a] + rng.random_range(0.0..=1.0) * (grid.end(a) - grid.origin[a]));
        let block = ext.metric.eval(&fields, x);
        if block.shape() != (m, m) {
            return Err(Error::Coupling(format!("block has shape {:?}, expected {m}x{m}", block.shape())));
        }
        if (&block - block.transpose()).amax() > 1e-14 * block.amax().max(1.0) {
            return Err(Error::Coupling(format!("G_αβ not symmetric at x = {x:?}")));
        }
        if linalg::factorize(&block).is_none() {
            return Err(Error::Coupling(format!("G_αβ degenerate at x = {x:?}")));
        }
        for mu in 0..n {
            let mut moved = fields.clone();
            moved[mu] += 0.25 + 0.5 * rng.random::<f64>();
            let other = ext.metric.eval(&moved, x);
            if (&other - &block).amax() > 1e-12 * block.amax().max(1.0) {
                return Err(Error::Coupling(format!(
                    "G_αβ depends on gravitational field {mu} (at X = {fields:?}, x = {x:?})"
                )));
            }
        }
    }
    Ok(Arc::new(ExtendedTarget { grav, ext }))
}

/// Field map of an extended model: gravitational fields then extra fields.
pub fn extended_map(
    grid: &GridSpec,
    base: Arc<dyn BaseMetric>,
    target: Arc<ExtendedTarget>,
    grav_fields: &[Array2<f64>],
    extra_fields: &[Array2<f64>],
) -> Result<FieldMap> {
    let comps = grav_fields.iter().chain(extra_fields).cloned().collect();
    FieldMap::new(grid.clone(), comps, base, target)
}

/// Residuals of the extra-field equations (components n.. of the motion
/// equations).
pub fn extra_field_residual(map: &FieldMap, grav_dim: usize) -> Result<Vec<Patch>> {
    Ok(crate::engine::el_residual(map)?.split_off(grav_dim))
}

/// One-dimensional static target G = ρ/(2f²) over X = (f).
#[derive(Debug, Clone, Copy, Default)]
pub struct StaticTarget;

impl TargetMetric for StaticTarget {
    fn dim(&self) -> usize {
        1
    }
    fn eval(&self, fields: &[f64], x: [f64; 2]) -> DMatrix<f64> {
        axisym::AxisymTarget.eval(&[fields[0], 0.0], x).view((0, 0), (1, 1)).into_owned()
    }
    fn field_partials(&self, fields: &[f64], x: [f64; 2]) -> Option<Vec<DMatrix<f64>>> {
        let d = axisym::AxisymTarget.field_partials(&[fields[0], 0.0], x)?;
        Some(vec![d[0].view((0, 0), (1, 1)).into_owned()])
    }
    fn coord_partials(&self, fields: &[f64], x: [f64; 2]) -> Option<[DMatrix<f64>; 2]> {
        let [a, b] = axisym::AxisymTarget.coord_partials(&[fields[0], 0.0], x)?;
        Some([a.view((0, 0), (1, 1)).into_owned(), b.view((0, 0), (1, 1)).into_owned()])
    }
}

/// Static fields on the two-dimensional target diag(ρ/2f², 1).
pub fn static_extension(grid: &GridSpec) -> Result<Arc<ExtendedTarget>> {
    axisym::check_grid(grid)?;
    extend_target(Arc::new(StaticTarget), ExtensionSpec::flat(1), grid)
}
