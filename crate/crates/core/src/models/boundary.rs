//! String boundary conditions along the spatial world-sheet axis (axis 1):
//! open strings have vanishing Ẋ and X′ at both ends, closed strings have
//! γ_ab, X^μ and X′^μ periodic between the first and last samples.

use serde::{Deserialize, Serialize};

use crate::map::FieldMap;
use crate::metric::BaseMetric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryClass {
    OpenString,
    ClosedString,
    Unclassified,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OpenDefects {
    /// max |∂_0 X^μ| over both ends.
    pub velocity: f64,
    /// max |∂_1 X^μ| over both ends.
    pub slope: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClosedDefects {
    pub metric: f64,
    pub fields: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub class: BoundaryClass,
    pub tolerance: f64,
    pub open: OpenDefects,
    pub closed: ClosedDefects,
}

impl OpenDefects {
    fn max(self, o: OpenDefects) -> OpenDefects {
        OpenDefects { velocity: self.velocity.max(o.velocity), slope: self.slope.max(o.slope) }
    }
    fn holds(&self, tol: f64) -> bool {
        self.velocity <= tol && self.slope <= tol
    }
}

impl ClosedDefects {
    fn max(self, o: ClosedDefects) -> ClosedDefects {
        ClosedDefects {
            metric: self.metric.max(o.metric),
            fields: self.fields.max(o.fields),
            slope: self.slope.max(o.slope),
        }
    }
    fn holds(&self, tol: f64) -> bool {
        self.metric <= tol && self.fields <= tol && self.slope <= tol
    }
}

/// One row of data: coordinates along axis 1 at fixed axis-0 coordinate
/// `t`, field values and their axis-0 derivatives.
pub struct Slice<'a> {
    pub t: f64,
    pub origin: f64,
    pub spacing: f64,
    pub fields: &'a [Vec<f64>],
    pub velocities: &'a [Vec<f64>],
}

fn forward(v: &[f64], at: usize, h: f64) -> f64 {
    (-3.0 * v[at] + 4.0 * v[at + 1] - v[at + 2]) / (2.0 * h)
}

fn backward(v: &[f64], at: usize, h: f64) -> f64 {
    (3.0 * v[at] - 4.0 * v[at - 1] + v[at - 2]) / (2.0 * h)
}

pub fn open_defects(s: &Slice) -> OpenDefects {
    let mut d = OpenDefects::default();
    for (x, v) in s.fields.iter().zip(s.velocities) {
        let n = x.len();
        d.velocity = d.velocity.max(v[0].abs()).max(v[n - 1].abs());
        d.slope = d.slope.max(forward(x, 0, s.spacing).abs()).max(backward(x, n - 1, s.spacing).abs());
    }
    d
}

/// Periodicity defects between the first and last samples. X′ is compared
/// with seam stencils: the one-sided difference into the interior from the
/// last sample against the same stencil with the first sample in its
/// place, and likewise from the other side.
pub fn closed_defects(s: &Slice, base: &dyn BaseMetric) -> ClosedDefects {
    let mut d = ClosedDefects::default();
    let h = s.spacing;
    for x in s.fields {
        let n = x.len();
        d.fields = d.fields.max((x[0] - x[n - 1]).abs());
        let mut wrapped = x.clone();
        wrapped[n - 1] = x[0];
        d.slope = d.slope.max((backward(&wrapped, n - 1, h) - backward(x, n - 1, h)).abs());
        let mut front = x.clone();
        front[0] = x[n - 1];
        d.slope = d.slope.max((forward(&front, 0, h) - forward(x, 0, h)).abs());
    }
    let n = s.fields.first().map_or(0, Vec::len);
    let g0 = base.eval([s.t, s.origin]);
    let g1 = base.eval([s.t, s.origin + (n.max(1) - 1) as f64 * h]);
    d.metric = (g0 - g1).amax();
    d
}

pub fn classify(open: OpenDefects, closed: ClosedDefects, periodic: bool, tolerance: f64) -> BoundaryReport {
    let class = match (periodic, open.holds(tolerance), closed.holds(tolerance)) {
        (true, _, true) => BoundaryClass::ClosedString,
        (_, true, _) => BoundaryClass::OpenString,
        (false, false, true) => BoundaryClass::ClosedString,
        _ => BoundaryClass::Unclassified,
    };
    BoundaryReport { class, tolerance, open, closed }
}

/// Classifies a sampled map, taking the worst defect over all rows.
pub fn boundary_classify(map: &FieldMap, tolerance: f64) -> BoundaryReport {
    let grid = map.grid();
    let (n0, n1) = (grid.dims[0], grid.dims[1]);
    let mut open = OpenDefects::default();
    let mut closed = ClosedDefects::default();
    for i in 0..n0 {
        let fields: Vec<Vec<f64>> = map.components().iter().map(|c| c.row(i).to_vec()).collect();
        let velocities: Vec<Vec<f64>> = map
            .components()
            .iter()
            .map(|c| (0..n1).map(|j| grid.d1(c, 0, i, j)).collect())
            .collect();
        let s = Slice {
            t: grid.coord(0, i),
            origin: grid.origin[1],
            spacing: grid.spacing[1],
            fields: &fields,
            velocities: &velocities,
        };
        open = open.max(open_defects(&s));
        closed = closed.max(closed_defects(&s, map.base().as_ref()));
    }
    classify(open, closed, grid.periodic[1], tolerance)
}
