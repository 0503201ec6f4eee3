//! Small dense solves for target-space metrics.
//!
//! Gaussian elimination with partial pivoting, skipping rows whose
//! elimination factor is exactly zero. On a block-diagonal matrix this
//! performs, operation for operation, the same arithmetic as on each block
//! alone, which is what makes dimensional extensions bit-exact.

use nalgebra::{DMatrix, Matrix2};

/// |det G| at or below this is treated as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct Lu {
    /// Row-echelon form (upper triangle meaningful).
    u: DMatrix<f64>,
    /// Eliminations recorded as (pivot row, target row, factor).
    ops: Vec<(usize, usize, f64)>,
    swaps: Vec<(usize, usize)>,
    det: f64,
}

impl Lu {
    pub fn new(m: &DMatrix<f64>) -> Option<Lu> {
        let n = m.nrows();
        assert_eq!(n, m.ncols(), "metric must be square");
        let mut u = m.clone();
        let mut ops = Vec::new();
        let mut swaps = Vec::new();
        let mut det = 1.0;
        for k in 0..n {
            let mut piv = k;
            for r in k + 1..n {
                if u[(r, k)].abs() > u[(piv, k)].abs() {
                    piv = r;
                }
            }
            if u[(piv, k)] == 0.0 {
                return None;
            }
            if piv != k {
                u.swap_rows(piv, k);
                swaps.push((k, piv));
                det = -det;
            }
            let p = u[(k, k)];
            det *= p;
            for r in k + 1..n {
                let factor = u[(r, k)] / p;
                if factor == 0.0 {
                    continue;
                }
                for c in k..n {
                    u[(r, c)] -= factor * u[(k, c)];
                }
                ops.push((k, r, factor));
            }
        }
        Some(Lu { u, ops, swaps, det })
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.u.nrows();
        let mut b = rhs.to_vec();
        let mut swaps = self.swaps.iter().peekable();
        let mut ops = self.ops.iter().peekable();
        for k in 0..n {
            while let Some(&&(row, other)) = swaps.peek() {
                if row != k {
                    break;
                }
                b.swap(row, other);
                swaps.next();
            }
            while let Some(&&(piv, r, factor)) = ops.peek() {
                if piv != k {
                    break;
                }
                b[r] -= factor * b[piv];
                ops.next();
            }
        }
        let mut y = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..n {
                let uij = self.u[(i, j)];
                if uij != 0.0 {
                    s -= uij * y[j];
                }
            }
            y[i] = s / self.u[(i, i)];
        }
        y
    }

    pub fn inverse(&self) -> DMatrix<f64> {
        let n = self.u.nrows();
        let mut inv = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for c in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[c] = 1.0;
            let col = self.solve(&e);
            for r in 0..n {
                inv[(r, c)] = col[r];
            }
        }
        inv
    }
}

/// Factorizes `m`, rejecting it when |det| ≤ [`DEGENERACY_THRESHOLD`].
pub fn factorize(m: &DMatrix<f64>) -> Option<Lu> {
    Lu::new(m).filter(|lu| lu.det().abs() > DEGENERACY_THRESHOLD && lu.det().is_finite())
}

pub fn det2(m: &Matrix2<f64>) -> f64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

pub fn inv2(m: &Matrix2<f64>) -> Option<Matrix2<f64>> {
    let d = det2(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    Some(Matrix2::new(m[(1, 1)] / d, -m[(0, 1)] / d, -m[(1, 0)] / d, m[(0, 0)] / d))
}
