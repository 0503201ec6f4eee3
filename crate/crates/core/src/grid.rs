//! Rectangular two-dimensional lattices and second-order finite-difference
//! stencils on them.
//!
//! Axis 0 is the slow (row) index, axis 1 the fast (column) index; a field on
//! a grid is an `Array2<f64>` of shape `dims`. A periodic axis stores its
//! period endpoint explicitly: the last sample is identified with the first,
//! so an axis with `n` points has `n - 1` distinct positions and spacing
//! `period / (n - 1)`.

use std::ops::Range;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible extent along either axis.
pub const MIN_POINTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub coord_names: [String; 2],
    pub origin: [f64; 2],
    pub spacing: [f64; 2],
    pub dims: [usize; 2],
    pub periodic: [bool; 2],
}

impl GridSpec {
    pub fn new(
        coord_names: [&str; 2],
        origin: [f64; 2],
        spacing: [f64; 2],
        dims: [usize; 2],
        periodic: [bool; 2],
    ) -> Result<Self> {
        let grid = GridSpec {
            coord_names: coord_names.map(str::to_owned),
            origin,
            spacing,
            dims,
            periodic,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Grid whose first and last samples sit exactly on `lo` and `hi`.
    pub fn from_extents(
        coord_names: [&str; 2],
        lo: [f64; 2],
        hi: [f64; 2],
        dims: [usize; 2],
        periodic: [bool; 2],
    ) -> Result<Self> {
        for a in 0..2 {
            if dims[a] < 2 || !(hi[a] > lo[a]) {
                return Err(Error::InvalidGrid(format!(
                    "axis {a}: need hi > lo and at least two points"
                )));
            }
        }
        let spacing = [
            (hi[0] - lo[0]) / (dims[0] - 1) as f64,
            (hi[1] - lo[1]) / (dims[1] - 1) as f64,
        ];
        Self::new(coord_names, lo, spacing, dims, periodic)
    }

    pub fn validate(&self) -> Result<()> {
        for a in 0..2 {
            if !(self.spacing[a] > 0.0) || !self.spacing[a].is_finite() {
                return Err(Error::InvalidGrid(format!(
                    "spacing along axis {a} must be positive, got {}",
                    self.spacing[a]
                )));
            }
            if !self.origin[a].is_finite() {
                return Err(Error::InvalidGrid(format!("origin along axis {a} is not finite")));
            }
            if self.dims[a] < MIN_POINTS {
                return Err(Error::GridTooSmall(format!(
                    "axis {a} has {} points; central stencils need at least {MIN_POINTS}",
                    self.dims[a]
                )));
            }
        }
        Ok(())
    }

    pub fn coord(&self, axis: usize, idx: usize) -> f64 {
        self.origin[axis] + idx as f64 * self.spacing[axis]
    }

    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        [self.coord(0, i), self.coord(1, j)]
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn names(&self) -> [&str; 2] {
        [&self.coord_names[0], &self.coord_names[1]]
    }

    pub fn has_names(&self, names: [&str; 2]) -> bool {
        self.coord_names[0] == names[0] && self.coord_names[1] == names[1]
    }

    /// Upper coordinate along an axis.
    pub fn end(&self, axis: usize) -> f64 {
        self.coord(axis, self.dims[axis] - 1)
    }

    pub fn cell_area(&self) -> f64 {
        self.spacing[0] * self.spacing[1]
    }

    pub fn sample(&self, f: impl Fn([f64; 2]) -> f64) -> Array2<f64> {
        Array2::from_shape_fn((self.dims[0], self.dims[1]), |(i, j)| f(self.point(i, j)))
    }

    pub fn zeros(&self) -> Array2<f64> {
        Array2::zeros((self.dims[0], self.dims[1]))
    }

    /// Same extents with spacing divided by `factor` (`n -> factor*(n-1)+1`).
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let dims = [
            (self.dims[0] - 1) * factor + 1,
            (self.dims[1] - 1) * factor + 1,
        ];
        let spacing = [
            self.spacing[0] / factor as f64,
            self.spacing[1] / factor as f64,
        ];
        Self::new(self.names(), self.origin, spacing, dims, self.periodic)
    }

    /// Points whose stencils stay `margin` samples away from non-periodic
    /// edges. Periodic axes contribute their distinct positions only.
    pub fn region(&self, margin: usize) -> Region {
        let span = |a: usize| {
            if self.periodic[a] {
                0..self.dims[a] - 1
            } else {
                debug_assert!(2 * margin < self.dims[a]);
                margin..self.dims[a] - margin
            }
        };
        Region { rows: span(0), cols: span(1) }
    }

    /// Points reachable by central first and second differences.
    pub fn interior(&self) -> Region {
        self.region(1)
    }

    /// Index reached from `idx` by `offset` steps, wrapping on periodic axes.
    pub fn neighbor(&self, axis: usize, idx: usize, offset: isize) -> Option<usize> {
        let n = self.dims[axis];
        if self.periodic[axis] {
            let m = (n - 1) as isize;
            Some((idx as isize + offset).rem_euclid(m) as usize)
        } else {
            let k = idx as isize + offset;
            (0..n as isize).contains(&k).then_some(k as usize)
        }
    }

    /// First-derivative weights (already divided by the spacing): central
    /// where both neighbours exist, second-order one-sided otherwise.
    pub fn d1_stencil(&self, axis: usize, idx: usize) -> Stencil {
        let h = self.spacing[axis];
        match (self.neighbor(axis, idx, -1), self.neighbor(axis, idx, 1)) {
            (Some(m), Some(p)) => Stencil::new(&[(m, -0.5 / h), (p, 0.5 / h)]),
            (None, Some(p)) => {
                let p2 = idx + 2;
                Stencil::new(&[(idx, -1.5 / h), (p, 2.0 / h), (p2, -0.5 / h)])
            }
            (Some(m), None) => {
                let m2 = idx - 2;
                Stencil::new(&[(idx, 1.5 / h), (m, -2.0 / h), (m2, 0.5 / h)])
            }
            (None, None) => unreachable!("grid validated to at least {MIN_POINTS} points"),
        }
    }

    /// Second-derivative weights along one axis, one-sided (four points) at
    /// non-periodic edges.
    pub fn d2_stencil(&self, axis: usize, idx: usize) -> Stencil {
        let h2 = self.spacing[axis] * self.spacing[axis];
        match (self.neighbor(axis, idx, -1), self.neighbor(axis, idx, 1)) {
            (Some(m), Some(p)) => Stencil::new(&[(m, 1.0 / h2), (idx, -2.0 / h2), (p, 1.0 / h2)]),
            (None, Some(_)) => Stencil::new(&[
                (idx, 2.0 / h2),
                (idx + 1, -5.0 / h2),
                (idx + 2, 4.0 / h2),
                (idx + 3, -1.0 / h2),
            ]),
            (Some(_), None) => Stencil::new(&[
                (idx, 2.0 / h2),
                (idx - 1, -5.0 / h2),
                (idx - 2, 4.0 / h2),
                (idx - 3, -1.0 / h2),
            ]),
            (None, None) => unreachable!("grid validated to at least {MIN_POINTS} points"),
        }
    }

    pub fn d1(&self, field: &Array2<f64>, axis: usize, i: usize, j: usize) -> f64 {
        let s = self.d1_stencil(axis, if axis == 0 { i } else { j });
        s.apply(|k| if axis == 0 { field[[k, j]] } else { field[[i, k]] })
    }

    pub fn d2(&self, field: &Array2<f64>, axis: usize, i: usize, j: usize) -> f64 {
        let s = self.d2_stencil(axis, if axis == 0 { i } else { j });
        s.apply(|k| if axis == 0 { field[[k, j]] } else { field[[i, k]] })
    }

    /// Mixed derivative: the axis-1 first-derivative stencil applied to the
    /// axis-0 first derivatives.
    pub fn d01(&self, field: &Array2<f64>, i: usize, j: usize) -> f64 {
        let s = self.d1_stencil(1, j);
        s.apply(|k| self.d1(field, 0, i, k))
    }

    /// Value, gradient and (optionally) Hessian of a sampled scalar.
    pub fn jet(&self, field: &Array2<f64>, i: usize, j: usize, second: bool) -> ScalarJet {
        let d = [self.d1(field, 0, i, j), self.d1(field, 1, i, j)];
        let dd = if second {
            let m = self.d01(field, i, j);
            [[self.d2(field, 0, i, j), m], [m, self.d2(field, 1, i, j)]]
        } else {
            [[0.0; 2]; 2]
        };
        ScalarJet { v: field[[i, j]], d, dd }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Stencil {
    pts: [(usize, f64); 4],
    len: usize,
}

impl Stencil {
    fn new(pts: &[(usize, f64)]) -> Self {
        let mut s = Stencil { pts: [(0, 0.0); 4], len: pts.len() };
        s.pts[..pts.len()].copy_from_slice(pts);
        s
    }

    pub fn points(&self) -> &[(usize, f64)] {
        &self.pts[..self.len]
    }

    pub fn apply(&self, value: impl Fn(usize) -> f64) -> f64 {
        self.points().iter().map(|&(k, w)| w * value(k)).sum()
    }
}

/// Local Taylor data of a scalar at a grid point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScalarJet {
    pub v: f64,
    pub d: [f64; 2],
    pub dd: [[f64; 2]; 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub rows: Range<usize>,
    pub cols: Range<usize>,
}

impl Region {
    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows.contains(&i) && self.cols.contains(&j)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.clone().flat_map(move |i| self.cols.clone().map(move |j| (i, j)))
    }
}

/// Values of a scalar on a sub-rectangle of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub region: Region,
    pub data: Array2<f64>,
}

impl Patch {
    pub fn from_fn(region: Region, f: impl Fn(usize, usize) -> f64) -> Self {
        let (r0, c0) = (region.rows.start, region.cols.start);
        let data = Array2::from_shape_fn(region.shape(), |(a, b)| f(r0 + a, c0 + b));
        Patch { region, data }
    }

    /// Full-grid array from a patch covering `grid.region(0)`, repeating the
    /// first sample at the endpoint of periodic axes.
    pub fn expand(&self, grid: &GridSpec) -> Array2<f64> {
        assert_eq!(self.region, grid.region(0), "patch does not cover the grid");
        let wrap = |a: usize, k: usize| if grid.periodic[a] && k + 1 == grid.dims[a] { 0 } else { k };
        Array2::from_shape_fn((grid.dims[0], grid.dims[1]), |(i, j)| self.at(wrap(0, i), wrap(1, j)))
    }

    /// Value at grid indices `(i, j)`.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[[i - self.region.rows.start, j - self.region.cols.start]]
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Root-mean-square over the patch.
    pub fn l2_norm(&self) -> f64 {
        let n = self.data.len().max(1) as f64;
        (self.data.iter().map(|v| v * v).sum::<f64>() / n).sqrt()
    }

    pub fn max_abs_diff(&self, other: &Patch) -> f64 {
        assert_eq!(self.region, other.region, "patches cover different regions");
        self.data
            .iter()
            .zip(other.data.iter())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn scaled(&self, factor: f64) -> Patch {
        Patch { region: self.region.clone(), data: &self.data * factor }
    }
}

pub fn sup_norm(field: &Array2<f64>) -> f64 {
    field.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}
