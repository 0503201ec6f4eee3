use std::sync::Arc;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarJet};
use crate::metric::{BaseMetric, TargetMetric};

/// A map X: M → N sampled on a grid, together with the metrics of both
/// spaces.
#[derive(Clone)]
pub struct FieldMap {
    grid: GridSpec,
    components: Vec<Array2<f64>>,
    base: Arc<dyn BaseMetric>,
    target: Arc<dyn TargetMetric>,
}

impl std::fmt::Debug for FieldMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldMap")
            .field("grid", &self.grid)
            .field("components", &self.components.len())
            .finish_non_exhaustive()
    }
}

impl FieldMap {
    pub fn new(
        grid: GridSpec,
        components: Vec<Array2<f64>>,
        base: Arc<dyn BaseMetric>,
        target: Arc<dyn TargetMetric>,
    ) -> Result<Self> {
        grid.validate()?;
        if base.dim() != 2 {
            return Err(Error::Domain(format!(
                "base metric has dimension {}, grids are two-dimensional",
                base.dim()
            )));
        }
        if components.len() != target.dim() {
            return Err(Error::ComponentMismatch { expected: target.dim(), found: components.len() });
        }
        for (c, field) in components.iter().enumerate() {
            if field.dim() != (grid.dims[0], grid.dims[1]) {
                return Err(Error::InvalidGrid(format!(
                    "component {c} has shape {:?}, grid is {:?}",
                    field.dim(),
                    grid.dims
                )));
            }
            if let Some(((i, j), _)) = field.indexed_iter().find(|(_, v)| !v.is_finite()) {
                return Err(Error::NonFinite { component: c, i, j });
            }
        }
        Ok(FieldMap { grid, components, base, target })
    }

    /// Samples every component from a closure of the base point.
    pub fn from_fns(
        grid: GridSpec,
        fields: &[&dyn Fn([f64; 2]) -> f64],
        base: Arc<dyn BaseMetric>,
        target: Arc<dyn TargetMetric>,
    ) -> Result<Self> {
        let components = fields.iter().map(|f| grid.sample(f)).collect();
        Self::new(grid, components, base, target)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn components(&self) -> &[Array2<f64>] {
        &self.components
    }

    pub fn component(&self, mu: usize) -> &Array2<f64> {
        &self.components[mu]
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn base(&self) -> &Arc<dyn BaseMetric> {
        &self.base
    }

    pub fn target(&self) -> &Arc<dyn TargetMetric> {
        &self.target
    }

    pub fn with_base(&self, base: Arc<dyn BaseMetric>) -> Result<Self> {
        Self::new(self.grid.clone(), self.components.clone(), base, self.target.clone())
    }

    pub fn with_target(&self, target: Arc<dyn TargetMetric>) -> Result<Self> {
        Self::new(self.grid.clone(), self.components.clone(), self.base.clone(), target)
    }

    /// Same samples on a relabelled grid (used for coordinate changes).
    pub fn with_grid(
        &self,
        grid: GridSpec,
        base: Arc<dyn BaseMetric>,
        target: Arc<dyn TargetMetric>,
    ) -> Result<Self> {
        Self::new(grid, self.components.clone(), base, target)
    }

    pub fn values(&self, i: usize, j: usize) -> Vec<f64> {
        self.components.iter().map(|c| c[[i, j]]).collect()
    }

    pub fn jets(&self, i: usize, j: usize, second: bool) -> Vec<ScalarJet> {
        self.components.iter().map(|c| self.grid.jet(c, i, j, second)).collect()
    }
}
