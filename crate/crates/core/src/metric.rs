//! Base-space and target-space metrics.
//!
//! All metrics store covariant components. Target metrics may depend on the
//! base point `x` as well as on the field values `X`; their partial
//! derivatives are split into the `X`-partials (which feed the Christoffel
//! symbols) and the explicit `x`-partials at fixed `X`.

use std::sync::Arc;

use nalgebra::{DMatrix, Matrix2};

use crate::error::{Error, Result};
use crate::linalg::{self, det2, inv2};

/// Relative step for central-difference metric partials.
pub const FD_REL_STEP: f64 = 1e-6;

fn fd_step(v: f64) -> f64 {
    FD_REL_STEP * v.abs().max(1.0)
}

pub trait BaseMetric: Send + Sync {
    /// Declared dimension of the base. Grids are two-dimensional, so only
    /// `dim() == 2` metrics can be bound to a field map.
    fn dim(&self) -> usize {
        2
    }

    /// Covariant components γ_ab(x).
    fn eval(&self, x: [f64; 2]) -> Matrix2<f64>;

    fn det(&self, x: [f64; 2]) -> f64 {
        det2(&self.eval(x))
    }

    /// Contravariant components γ^ab(x).
    fn inverse(&self, x: [f64; 2]) -> Matrix2<f64> {
        inv2(&self.eval(x)).unwrap_or_else(|| Matrix2::repeat(f64::NAN))
    }

    fn sqrt_abs_det(&self, x: [f64; 2]) -> f64 {
        self.det(x).abs().sqrt()
    }

    /// √|γ| γ^ab, the combination entering the action.
    fn density_inverse(&self, x: [f64; 2]) -> Matrix2<f64> {
        self.inverse(x) * self.sqrt_abs_det(x)
    }

    /// ∂_c(√|γ| γ^ab) for c = 0, 1, when known in closed form.
    fn density_inverse_partials(&self, _x: [f64; 2]) -> Option<[Matrix2<f64>; 2]> {
        None
    }
}

/// Analytic partials of √|γ|γ^ab when available, central differences otherwise.
pub fn density_inverse_partials(base: &dyn BaseMetric, x: [f64; 2]) -> [Matrix2<f64>; 2] {
    base.density_inverse_partials(x).unwrap_or_else(|| {
        let d = |c: usize| {
            let h = fd_step(x[c]);
            let (mut xp, mut xm) = (x, x);
            xp[c] += h;
            xm[c] -= h;
            (base.density_inverse(xp) - base.density_inverse(xm)) / (xp[c] - xm[c])
        };
        [d(0), d(1)]
    })
}

pub trait TargetMetric: Send + Sync {
    fn dim(&self) -> usize;

    /// Covariant components G_μν(X, x).
    fn eval(&self, fields: &[f64], x: [f64; 2]) -> DMatrix<f64>;

    /// ∂G_μν/∂X^λ for λ = 0..dim, when known in closed form.
    fn field_partials(&self, _fields: &[f64], _x: [f64; 2]) -> Option<Vec<DMatrix<f64>>> {
        None
    }

    /// Explicit ∂G_μν/∂x^a at fixed X, when known in closed form.
    fn coord_partials(&self, _fields: &[f64], _x: [f64; 2]) -> Option<[DMatrix<f64>; 2]> {
        None
    }
}

/// Central-difference X-partials with step 1e-6·max(1,|X^λ|).
pub fn field_partials_fd(target: &dyn TargetMetric, fields: &[f64], x: [f64; 2]) -> Vec<DMatrix<f64>> {
    (0..fields.len())
        .map(|l| {
            let h = fd_step(fields[l]);
            let mut fp = fields.to_vec();
            let mut fm = fields.to_vec();
            fp[l] += h;
            fm[l] -= h;
            (target.eval(&fp, x) - target.eval(&fm, x)) / (fp[l] - fm[l])
        })
        .collect()
}

pub fn coord_partials_fd(target: &dyn TargetMetric, fields: &[f64], x: [f64; 2]) -> [DMatrix<f64>; 2] {
    let d = |c: usize| {
        let h = fd_step(x[c]);
        let (mut xp, mut xm) = (x, x);
        xp[c] += h;
        xm[c] -= h;
        (target.eval(fields, xp) - target.eval(fields, xm)) / (xp[c] - xm[c])
    };
    [d(0), d(1)]
}

pub fn field_partials(target: &dyn TargetMetric, fields: &[f64], x: [f64; 2]) -> Vec<DMatrix<f64>> {
    target
        .field_partials(fields, x)
        .unwrap_or_else(|| field_partials_fd(target, fields, x))
}

pub fn coord_partials(target: &dyn TargetMetric, fields: &[f64], x: [f64; 2]) -> [DMatrix<f64>; 2] {
    target
        .coord_partials(fields, x)
        .unwrap_or_else(|| coord_partials_fd(target, fields, x))
}

/// Evaluates and factorizes G, failing on degeneracy.
pub fn factor_target(target: &dyn TargetMetric, fields: &[f64], x: [f64; 2]) -> Result<(DMatrix<f64>, linalg::Lu)> {
    let g = target.eval(fields, x);
    let lu = linalg::factorize(&g).ok_or_else(|| Error::DegenerateTarget {
        fields: fields.to_vec(),
        point: x,
    })?;
    Ok((g, lu))
}

/// Christoffel symbols of the first kind, Γ_σνλ = ½(∂_ν G_σλ + ∂_λ G_σν − ∂_σ G_νλ),
/// from the X-partials. Indexed `[(σ * n + ν) * n + λ]`.
pub fn christoffel_first_kind(partials: &[DMatrix<f64>]) -> Vec<f64> {
    let n = partials.len();
    let mut out = vec![0.0; n * n * n];
    for s in 0..n {
        for v in 0..n {
            for l in 0..n {
                out[(s * n + v) * n + l] =
                    0.5 * (partials[v][(s, l)] + partials[l][(s, v)] - partials[s][(v, l)]);
            }
        }
    }
    out
}

/// Γ^μ_νλ at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, mu: usize, nu: usize, lam: usize) -> f64 {
        self.data[(mu * self.n + nu) * self.n + lam]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Christoffel symbols of G with respect to X only; the explicit
/// x-dependence of G plays no part.
pub fn christoffel(target: &dyn TargetMetric, fields: &[f64], x: [f64; 2]) -> Result<Christoffel> {
    let n = target.dim();
    let (_, lu) = factor_target(target, fields, x)?;
    let first = christoffel_first_kind(&field_partials(target, fields, x));
    let mut data = vec![0.0; n * n * n];
    let mut col = vec![0.0; n];
    for v in 0..n {
        for l in 0..n {
            for s in 0..n {
                col[s] = first[(s * n + v) * n + l];
            }
            let up = lu.solve(&col);
            for m in 0..n {
                data[(m * n + v) * n + l] = up[m];
            }
        }
    }
    Ok(Christoffel { n, data })
}

/// δ_ab.
#[derive(Debug, Clone, Copy, Default)]
pub struct Euclidean;

impl BaseMetric for Euclidean {
    fn eval(&self, _x: [f64; 2]) -> Matrix2<f64> {
        Matrix2::identity()
    }
    fn det(&self, _x: [f64; 2]) -> f64 {
        1.0
    }
    fn inverse(&self, _x: [f64; 2]) -> Matrix2<f64> {
        Matrix2::identity()
    }
    fn sqrt_abs_det(&self, _x: [f64; 2]) -> f64 {
        1.0
    }
    fn density_inverse_partials(&self, _x: [f64; 2]) -> Option<[Matrix2<f64>; 2]> {
        Some([Matrix2::zeros(); 2])
    }
}

/// diag(1, −1) with the first coordinate timelike.
#[derive(Debug, Clone, Copy, Default)]
pub struct Minkowski;

impl BaseMetric for Minkowski {
    fn eval(&self, _x: [f64; 2]) -> Matrix2<f64> {
        Matrix2::new(1.0, 0.0, 0.0, -1.0)
    }
    fn det(&self, _x: [f64; 2]) -> f64 {
        -1.0
    }
    fn inverse(&self, _x: [f64; 2]) -> Matrix2<f64> {
        Matrix2::new(1.0, 0.0, 0.0, -1.0)
    }
    fn sqrt_abs_det(&self, _x: [f64; 2]) -> f64 {
        1.0
    }
    fn density_inverse_partials(&self, _x: [f64; 2]) -> Option<[Matrix2<f64>; 2]> {
        Some([Matrix2::zeros(); 2])
    }
}

/// Constant target metric, e.g. δ_μν or η_μν.
#[derive(Debug, Clone)]
pub struct ConstantTarget(pub DMatrix<f64>);

impl ConstantTarget {
    pub fn identity(n: usize) -> Self {
        ConstantTarget(DMatrix::identity(n, n))
    }
}

impl TargetMetric for ConstantTarget {
    fn dim(&self) -> usize {
        self.0.nrows()
    }
    fn eval(&self, _fields: &[f64], _x: [f64; 2]) -> DMatrix<f64> {
        self.0.clone()
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

/// Hides the analytic partials of a target so that the finite-difference
/// fallbacks are exercised.
pub struct WithoutPartials(pub Arc<dyn TargetMetric>);

impl TargetMetric for WithoutPartials {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval(&self, fields: &[f64], x: [f64; 2]) -> DMatrix<f64> {
        self.0.eval(fields, x)
    }
}

type ScalarFn = Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>;

/// γ'_ab = e^{σ(x)} γ_ab.
pub struct WeylRescaled {
    inner: Arc<dyn BaseMetric>,
    sigma: ScalarFn,
}

impl BaseMetric for WeylRescaled {
    fn eval(&self, x: [f64; 2]) -> Matrix2<f64> {
        self.inner.eval(x) * (self.sigma)(x).exp()
    }
    fn det(&self, x: [f64; 2]) -> f64 {
        (2.0 * (self.sigma)(x)).exp() * self.inner.det(x)
    }
    fn inverse(&self, x: [f64; 2]) -> Matrix2<f64> {
        self.inner.inverse(x) * (-(self.sigma)(x)).exp()
    }
    fn sqrt_abs_det(&self, x: [f64; 2]) -> f64 {
        (self.sigma)(x).exp() * self.inner.sqrt_abs_det(x)
    }
}

/// Weyl transformation of a two-dimensional base metric.
pub fn weyl_rescale(
    base: Arc<dyn BaseMetric>,
    sigma: impl Fn([f64; 2]) -> f64 + Send + Sync + 'static,
) -> Result<Arc<dyn BaseMetric>> {
    if base.dim() != 2 {
        return Err(Error::WeylDimension);
    }
    Ok(Arc::new(WeylRescaled { inner: base, sigma: Arc::new(sigma) }))
}

/// Base metric pulled back through the affine change x' = scale⊙x + shift.
pub struct AffineBase {
    pub inner: Arc<dyn BaseMetric>,
    pub scale: [f64; 2],
    pub shift: [f64; 2],
}

fn pull(x: [f64; 2], scale: [f64; 2], shift: [f64; 2]) -> [f64; 2] {
    [(x[0] - shift[0]) / scale[0], (x[1] - shift[1]) / scale[1]]
}

impl BaseMetric for AffineBase {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval(&self, x: [f64; 2]) -> Matrix2<f64> {
        let g = self.inner.eval(pull(x, self.scale, self.shift));
        let s = self.scale;
        Matrix2::new(
            g[(0, 0)] / (s[0] * s[0]),
            g[(0, 1)] / (s[0] * s[1]),
            g[(1, 0)] / (s[1] * s[0]),
            g[(1, 1)] / (s[1] * s[1]),
        )
    }
}

/// Target metric with its explicit coordinate dependence expressed in the
/// affinely transformed coordinates.
pub struct AffineTarget {
    pub inner: Arc<dyn TargetMetric>,
    pub scale: [f64; 2],
    pub shift: [f64; 2],
}

impl TargetMetric for AffineTarget {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval(&self, fields: &[f64], x: [f64; 2]) -> DMatrix<f64> {
        self.inner.eval(fields, pull(x, self.scale, self.shift))
    }
    fn field_partials(&self, fields: &[f64], x: [f64; 2]) -> Option<Vec<DMatrix<f64>>> {
        self.inner.field_partials(fields, pull(x, self.scale, self.shift))
    }
    fn coord_partials(&self, fields: &[f64], x: [f64; 2]) -> Option<[DMatrix<f64>; 2]> {
        self.inner
            .coord_partials(fields, pull(x, self.scale, self.shift))
            .map(|[a, b]| [a / self.scale[0], b / self.scale[1]])
    }
}
