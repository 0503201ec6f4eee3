//! Generic operations on generalized harmonic maps: motion-equation
//! residuals, action, induced metric, energy-momentum tensor and the
//! conservation-law defect.
//!
//! Index conventions: `grad[μ][a] = ∂_a X^μ`, `A^{ab} = √|γ| γ^{ab}`.

use nalgebra::{DMatrix, Matrix2};
use ndarray::Array2;

use crate::error::Result;
use crate::grid::{Patch, Region, ScalarJet};
use crate::map::FieldMap;
use crate::metric::{self, BaseMetric, TargetMetric};
use crate::parallel::map_rows;

type Sym2 = [[f64; 2]; 2];

fn grads(jets: &[ScalarJet]) -> Vec<[f64; 2]> {
    jets.iter().map(|j| j.d).collect()
}

/// G^{μλ}(Γ_λνσ γ^{ab}∂_aX^ν ∂_bX^σ + γ^{ab}∂_aX^ν ∂_bG_λν), the part of the
/// motion equations coming from the target geometry. ∂_bG is the explicit
/// coordinate partial at fixed X.
pub fn target_term(
    target: &dyn TargetMetric,
    gamma_inv: &Matrix2<f64>,
    fields: &[f64],
    grad: &[[f64; 2]],
    x: [f64; 2],
) -> Result<Vec<f64>> {
    let n = fields.len();
    let (_, lu) = metric::factor_target(target, fields, x)?;
    let first = metric::christoffel_first_kind(&metric::field_partials(target, fields, x));
    let dg = metric::coord_partials(target, fields, x);

    // q[ν][λ] = γ^{ab} ∂_aX^ν ∂_bX^λ and u[ν][b] = γ^{ab} ∂_aX^ν
    let mut u = vec![[0.0; 2]; n];
    for v in 0..n {
        for b in 0..2 {
            u[v][b] = gamma_inv[(0, b)] * grad[v][0] + gamma_inv[(1, b)] * grad[v][1];
        }
    }
    let mut rhs = vec![0.0; n];
    for s in 0..n {
        let mut acc = 0.0;
        for v in 0..n {
            for l in 0..n {
                let gam = first[(s * n + v) * n + l];
                if gam != 0.0 {
                    acc += gam * (u[v][0] * grad[l][0] + u[v][1] * grad[l][1]);
                }
            }
        }
        for v in 0..n {
            for b in 0..2 {
                let p = dg[b][(s, v)];
                if p != 0.0 {
                    acc += u[v][b] * p;
                }
            }
        }
        rhs[s] = acc;
    }
    Ok(lu.solve(&rhs))
}

/// Motion-equation residual at one point from the field jets.
pub fn point_residual(
    base: &dyn BaseMetric,
    target: &dyn TargetMetric,
    x: [f64; 2],
    jets: &[ScalarJet],
) -> Result<Vec<f64>> {
    let a = base.density_inverse(x);
    let da = metric::density_inverse_partials(base, x);
    let sqrtg = base.sqrt_abs_det(x);
    let fields: Vec<f64> = jets.iter().map(|j| j.v).collect();
    let grad = grads(jets);
    let nonlinear = target_term(target, &base.inverse(x), &fields, &grad, x)?;
    Ok(jets
        .iter()
        .zip(nonlinear)
        .map(|(j, y)| {
            let mut box_ = 0.0;
            for p in 0..2 {
                for q in 0..2 {
                    box_ += a[(p, q)] * j.dd[p][q];
                }
            }
            for p in 0..2 {
                box_ += (da[0][(p, 0)] + da[1][(p, 1)]) * j.d[p];
            }
            box_ / sqrtg + y
        })
        .collect())
}

fn gather<F>(map: &FieldMap, region: &Region, f: F) -> Result<Vec<Patch>>
where
    F: Fn(usize, usize) -> Result<Vec<f64>> + Sync + Send,
{
    let rows = map_rows(region.rows.clone(), |i| {
        region.cols.clone().map(|j| f(i, j)).collect::<Result<Vec<_>>>()
    });
    let mut out: Vec<Array2<f64>> = Vec::new();
    for (ii, row) in rows.into_iter().enumerate() {
        let row = row?;
        if out.is_empty() {
            let k = row.first().map_or(map.n(), Vec::len);
            out = vec![Array2::zeros(region.shape()); k];
        }
        for (jj, vals) in row.into_iter().enumerate() {
            for (c, v) in vals.into_iter().enumerate() {
                out[c][[ii, jj]] = v;
            }
        }
    }
    Ok(out.into_iter().map(|data| Patch { region: region.clone(), data }).collect())
}

/// Motion-equation residual per component on the interior.
pub fn el_residual(map: &FieldMap) -> Result<Vec<Patch>> {
    el_residual_in(map, &map.grid().interior())
}

/// Motion-equation residual on an arbitrary region; edges use one-sided
/// stencils.
pub fn el_residual_in(map: &FieldMap, region: &Region) -> Result<Vec<Patch>> {
    let grid = map.grid();
    let (base, target) = (map.base().as_ref(), map.target().as_ref());
    gather(map, region, |i, j| point_residual(base, target, grid.point(i, j), &map.jets(i, j, true)))
}

/// γ^{ab}(Γ^μ_νλ ∂_bX^λ + G^{μλ}∂_bG_λν)∂_aX^ν. Vanishes when the map
/// satisfies the plain (linear) wave or Laplace equation in the base.
pub fn linearity_residual(map: &FieldMap) -> Result<Vec<Patch>> {
    let grid = map.grid();
    let (base, target) = (map.base().as_ref(), map.target().as_ref());
    gather(map, &grid.interior(), |i, j| {
        let x = grid.point(i, j);
        let jets = map.jets(i, j, false);
        let fields: Vec<f64> = jets.iter().map(|j| j.v).collect();
        target_term(target, &base.inverse(x), &fields, &grads(&jets), x)
    })
}

/// h_ab = G_μν ∂_aX^μ ∂_bX^ν.
pub fn point_induced(g: &DMatrix<f64>, grad: &[[f64; 2]]) -> Sym2 {
    let n = grad.len();
    let mut h = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let mut s = 0.0;
            for m in 0..n {
                for v in 0..n {
                    s += g[(m, v)] * grad[m][a] * grad[v][b];
                }
            }
            h[a][b] = s;
        }
    }
    h
}

fn contract(a: &Matrix2<f64>, h: &Sym2) -> f64 {
    let mut s = 0.0;
    for p in 0..2 {
        for q in 0..2 {
            s += a[(p, q)] * h[p][q];
        }
    }
    s
}

/// Lagrangian density √|γ|γ^{ab}G_μν∂_aX^μ∂_bX^ν at one point.
pub fn point_lagrangian(
    base: &dyn BaseMetric,
    target: &dyn TargetMetric,
    x: [f64; 2],
    fields: &[f64],
    grad: &[[f64; 2]],
) -> f64 {
    contract(&base.density_inverse(x), &point_induced(&target.eval(fields, x), grad))
}

/// Lagrangian density at every grid point.
pub fn lagrangian_density(map: &FieldMap) -> Patch {
    let grid = map.grid();
    let (base, target) = (map.base().as_ref(), map.target().as_ref());
    let region = grid.region(0);
    let rows = map_rows(region.rows.clone(), |i| {
        region
            .cols
            .clone()
            .map(|j| {
                let jets = map.jets(i, j, false);
                let fields: Vec<f64> = jets.iter().map(|j| j.v).collect();
                point_lagrangian(base, target, grid.point(i, j), &fields, &grads(&jets))
            })
            .collect::<Vec<_>>()
    });
    patch_from_rows(region, rows)
}

fn patch_from_rows(region: Region, rows: Vec<Vec<f64>>) -> Patch {
    let (nr, nc) = region.shape();
    let data = Array2::from_shape_vec((nr, nc), rows.into_iter().flatten().collect())
        .expect("row lengths match region");
    Patch { region, data }
}

/// Discrete action with cell-centred midpoint quadrature: fields and their
/// gradients are averaged to each cell centre from its four corners.
pub fn action(map: &FieldMap) -> f64 {
    let grid = map.grid();
    let (base, target) = (map.base().as_ref(), map.target().as_ref());
    let [h0, h1] = grid.spacing;
    let n = map.n();
    let row_sums = map_rows(0..grid.dims[0] - 1, |i| {
        let mut fields = vec![0.0; n];
        let mut grad = vec![[0.0; 2]; n];
        let mut s = 0.0;
        for j in 0..grid.dims[1] - 1 {
            for (m, c) in map.components().iter().enumerate() {
                let (a, b, cc, d) = (c[[i, j]], c[[i + 1, j]], c[[i, j + 1]], c[[i + 1, j + 1]]);
                fields[m] = 0.25 * (a + b + cc + d);
                grad[m] = [0.5 * ((b + d) - (a + cc)) / h0, 0.5 * ((cc + d) - (a + b)) / h1];
            }
            let x = [grid.coord(0, i) + 0.5 * h0, grid.coord(1, j) + 0.5 * h1];
            s += point_lagrangian(base, target, x, &fields, &grad);
        }
        s
    });
    row_sums.into_iter().sum::<f64>() * grid.cell_area()
}

/// Symmetric rank-2 field on the base, stored componentwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor2Field {
    pub c: [[Patch; 2]; 2],
}

impl Tensor2Field {
    fn from_points(region: &Region, pts: &[Vec<Sym2>]) -> Self {
        let comp = |a: usize, b: usize| {
            let rows = pts.iter().map(|row| row.iter().map(|t| t[a][b]).collect()).collect();
            patch_from_rows(region.clone(), rows)
        };
        Tensor2Field { c: [[comp(0, 0), comp(0, 1)], [comp(1, 0), comp(1, 1)]] }
    }

    pub fn from_fn(region: &Region, f: impl Fn(usize, usize) -> Sym2) -> Self {
        let pts: Vec<Vec<Sym2>> =
            region.rows.clone().map(|i| region.cols.clone().map(|j| f(i, j)).collect()).collect();
        Self::from_points(region, &pts)
    }

    pub fn at(&self, a: usize, b: usize, i: usize, j: usize) -> f64 {
        self.c[a][b].at(i, j)
    }

    pub fn region(&self) -> &Region {
        &self.c[0][0].region
    }

    pub fn symmetry_defect(&self) -> f64 {
        self.c[0][1].max_abs_diff(&self.c[1][0])
    }

    pub fn max_abs_diff(&self, other: &Tensor2Field) -> f64 {
        let mut m = 0.0_f64;
        for a in 0..2 {
            for b in 0..2 {
                m = m.max(self.c[a][b].max_abs_diff(&other.c[a][b]));
            }
        }
        m
    }

    pub fn scaled(&self, k: f64) -> Tensor2Field {
        let s = |a: usize, b: usize| self.c[a][b].scaled(k);
        Tensor2Field { c: [[s(0, 0), s(0, 1)], [s(1, 0), s(1, 1)]] }
    }
}

/// h_ab at every grid point.
pub fn induced_metric(map: &FieldMap) -> Tensor2Field {
    let grid = map.grid();
    let target = map.target().as_ref();
    let region = grid.region(0);
    let pts = map_rows(region.rows.clone(), |i| {
        region
            .cols
            .clone()
            .map(|j| {
                let jets = map.jets(i, j, false);
                let fields: Vec<f64> = jets.iter().map(|j| j.v).collect();
                point_induced(&target.eval(&fields, grid.point(i, j)), &grads(&jets))
            })
            .collect::<Vec<_>>()
    });
    Tensor2Field::from_points(&region, &pts)
}

/// Energy-momentum tensor at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEmt {
    /// T_ab, lowered with γ.
    pub lower: Sym2,
    /// T_a^b as a density, `mixed[a][b]`.
    pub mixed: Sym2,
    /// T̃_ab from the canonical momenta.
    pub canonical: Sym2,
    pub trace: f64,
    pub lagrangian: f64,
}

pub fn point_emt(
    base: &dyn BaseMetric,
    target: &dyn TargetMetric,
    x: [f64; 2],
    fields: &[f64],
    grad: &[[f64; 2]],
) -> PointEmt {
    let n = fields.len();
    let g = target.eval(fields, x);
    let gam = base.eval(x);
    let a = base.density_inverse(x);
    let h = point_induced(&g, grad);
    let lag = contract(&a, &h);

    let mut mixed = [[0.0; 2]; 2];
    for p in 0..2 {
        for q in 0..2 {
            let mut s = a[(q, 0)] * h[p][0] + a[(q, 1)] * h[p][1];
            if p == q {
                s -= 0.5 * lag;
            }
            mixed[p][q] = s;
        }
    }

    // canonical route: momenta π^b_μ = ∂L/∂(∂_bX^μ)
    let mut pi = vec![[0.0; 2]; n];
    for m in 0..n {
        for b in 0..2 {
            let mut s = 0.0;
            for c in 0..2 {
                for v in 0..n {
                    s += a[(b, c)] * g[(m, v)] * grad[v][c];
                }
            }
            pi[m][b] = 2.0 * s;
        }
    }
    let mut canon_mixed = [[0.0; 2]; 2];
    for p in 0..2 {
        for q in 0..2 {
            let mut s: f64 = (0..n).map(|m| pi[m][q] * grad[m][p]).sum();
            if p == q {
                s -= lag;
            }
            canon_mixed[p][q] = s;
        }
    }

    let lower_with = |t: &Sym2| {
        let mut out = [[0.0; 2]; 2];
        for p in 0..2 {
            for q in 0..2 {
                out[p][q] = t[p][0] * gam[(0, q)] + t[p][1] * gam[(1, q)];
            }
        }
        out
    };
    PointEmt {
        lower: lower_with(&mixed),
        mixed,
        canonical: lower_with(&canon_mixed),
        trace: mixed[0][0] + mixed[1][1],
        lagrangian: lag,
    }
}

/// Energy-momentum tensor field.
#[derive(Debug, Clone, PartialEq)]
pub struct EmtField {
    /// T_ab.
    pub lower: Tensor2Field,
    /// T_a^b (density).
    pub mixed: Tensor2Field,
    /// T̃_ab.
    pub canonical: Tensor2Field,
    /// T^a_a.
    pub trace: Patch,
}

impl EmtField {
    pub fn region(&self) -> &Region {
        self.lower.region()
    }

    /// Assembles the full record from covariant components T_ab given in
    /// closed form, raising one index with the base metric.
    pub fn from_lower(
        grid: &crate::grid::GridSpec,
        base: &dyn BaseMetric,
        region: &Region,
        lower: impl Fn(usize, usize) -> Sym2,
    ) -> Self {
        let lower = Tensor2Field::from_fn(region, lower);
        let mixed_at = |i: usize, j: usize| {
            let x = grid.point(i, j);
            let (inv, s) = (base.inverse(x), base.sqrt_abs_det(x));
            let mut m = [[0.0; 2]; 2];
            for a in 0..2 {
                for b in 0..2 {
                    m[a][b] = s * (lower.at(a, 0, i, j) * inv[(0, b)] + lower.at(a, 1, i, j) * inv[(1, b)]);
                }
            }
            m
        };
        let mixed = Tensor2Field::from_fn(region, mixed_at);
        let trace = Patch::from_fn(region.clone(), |i, j| mixed.at(0, 0, i, j) + mixed.at(1, 1, i, j));
        EmtField { canonical: lower.scaled(2.0), lower, mixed, trace }
    }

    pub fn trace_sup(&self) -> f64 {
        self.trace.sup_norm()
    }

    /// max |T̃_ab − 2T_ab|.
    pub fn factor_two_defect(&self) -> f64 {
        self.canonical.max_abs_diff(&self.lower.scaled(2.0))
    }
}

pub fn emt(map: &FieldMap) -> EmtField {
    emt_in(map, &map.grid().region(0))
}

pub fn emt_in(map: &FieldMap, region: &Region) -> EmtField {
    let grid = map.grid();
    let (base, target) = (map.base().as_ref(), map.target().as_ref());
    let pts = map_rows(region.rows.clone(), |i| {
        region
            .cols
            .clone()
            .map(|j| {
                let jets = map.jets(i, j, false);
                let fields: Vec<f64> = jets.iter().map(|j| j.v).collect();
                point_emt(base, target, grid.point(i, j), &fields, &grads(&jets))
            })
            .collect::<Vec<_>>()
    });
    let pick = |f: fn(&PointEmt) -> Sym2| {
        let rows: Vec<Vec<Sym2>> = pts.iter().map(|r| r.iter().map(f).collect()).collect();
        Tensor2Field::from_points(region, &rows)
    };
    let trace_rows = pts.iter().map(|r| r.iter().map(|p| p.trace).collect()).collect();
    EmtField {
        lower: pick(|p| p.lower),
        mixed: pick(|p| p.mixed),
        canonical: pick(|p| p.canonical),
        trace: patch_from_rows(region.clone(), trace_rows),
    }
}

/// ∂L/∂x^a at fixed X and ∂X: the explicit dependence through γ and G.
pub fn explicit_lagrangian_gradient(
    base: &dyn BaseMetric,
    target: &dyn TargetMetric,
    x: [f64; 2],
    fields: &[f64],
    grad: &[[f64; 2]],
) -> [f64; 2] {
    let a = base.density_inverse(x);
    let da = metric::density_inverse_partials(base, x);
    let h = point_induced(&target.eval(fields, x), grad);
    let dg = metric::coord_partials(target, fields, x);
    [0, 1].map(|c| contract(&da[c], &h) + contract(&a, &point_induced(&dg[c], grad)))
}

/// ∂_b T_a^b + ½ ∂L/∂x^a per covector component, on points two samples
/// away from non-periodic edges.
pub fn conservation_residual(map: &FieldMap) -> Result<[Patch; 2]> {
    let grid = map.grid();
    if grid.dims.iter().zip(grid.periodic).any(|(&n, p)| !p && n < 7) {
        return Err(crate::Error::GridTooSmall(
            "conservation defect needs at least 7 points along non-periodic axes".into(),
        ));
    }
    let (base, target) = (map.base().as_ref(), map.target().as_ref());
    let all = grid.region(0);
    let t = emt_in(map, &all).mixed;
    let mixed = |a: usize, b: usize| &t.c[a][b].data;
    let region = grid.region(2);
    let rows = map_rows(region.rows.clone(), |i| {
        region
            .cols
            .clone()
            .map(|j| {
                let jets = map.jets(i, j, false);
                let fields: Vec<f64> = jets.iter().map(|j| j.v).collect();
                let dl = explicit_lagrangian_gradient(base, target, grid.point(i, j), &fields, &grads(&jets));
                [0, 1].map(|a| {
                    grid.d1(mixed(a, 0), 0, i, j) + grid.d1(mixed(a, 1), 1, i, j) + 0.5 * dl[a]
                })
            })
            .collect::<Vec<_>>()
    });
    let comp = |a: usize| {
        patch_from_rows(region.clone(), rows.iter().map(|r| r.iter().map(|v| v[a]).collect()).collect())
    };
    Ok([comp(0), comp(1)])
}
