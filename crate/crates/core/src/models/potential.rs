use ndarray::Array2;

use crate::grid::GridSpec;

/// A scalar reconstructed from its gradient, with the largest discrepancy
/// between the two staircase paths to each point.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub field: Array2<f64>,
    pub loop_defect: f64,
}

/// Cumulative trapezoid integral of `g` along `axis`, starting at index `from`.
fn cumulative(grid: &GridSpec, g: &Array2<f64>, axis: usize, from: usize) -> Array2<f64> {
    let h = grid.spacing[axis];
    let (n0, n1) = (grid.dims[0], grid.dims[1]);
    let mut out = Array2::zeros((n0, n1));
    let n = grid.dims[axis];
    let at = |k: usize, l: usize| if axis == 0 { [k, l] } else { [l, k] };
    let other = grid.dims[1 - axis];
    for l in 0..other {
        let mut acc = 0.0;
        for k in from + 1..n {
            acc += 0.5 * h * (g[at(k - 1, l)] + g[at(k, l)]);
            out[at(k, l)] = acc;
        }
        let mut acc = 0.0;
        for k in (0..from).rev() {
            acc -= 0.5 * h * (g[at(k + 1, l)] + g[at(k, l)]);
            out[at(k, l)] = acc;
        }
    }
    out
}

/// Integrates the gradient `(grad[0], grad[1])` (components along axes 0
/// and 1) from `anchor` with the trapezoid rule. Each point is reached by
/// the two L-shaped paths through the anchor row and the anchor column; the
/// result is their mean and `loop_defect` the largest difference between
/// them, i.e. the largest circulation around an anchored rectangle.
pub fn integrate_potential(
    grad: [&Array2<f64>; 2],
    grid: &GridSpec,
    anchor: [usize; 2],
    anchor_value: f64,
) -> Potential {
    let [i0, j0] = anchor;
    let c0 = cumulative(grid, grad[0], 0, i0);
    let c1 = cumulative(grid, grad[1], 1, j0);
    let mut field = Array2::zeros((grid.dims[0], grid.dims[1]));
    let mut loop_defect = 0.0_f64;
    for ((i, j), v) in field.indexed_iter_mut() {
        let via_row = c1[[i0, j]] + c0[[i, j]];
        let via_col = c0[[i, j0]] + c1[[i, j]];
        *v = anchor_value + 0.5 * (via_row + via_col);
        loop_defect = loop_defect.max((via_row - via_col).abs());
    }
    Potential { field, loop_defect }
}
