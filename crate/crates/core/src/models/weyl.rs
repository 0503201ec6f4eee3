//! Static Weyl solutions: the Legendre multipole series for ψ = ½ ln f and
//! the double series for the metric function k.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::models::axisym::AxisymFields;

/// Multipole coefficients a_0 … a_N.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WeylCoefficients {
    pub a: Vec<f64>,
}

impl WeylCoefficients {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if let Some(v) = a.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite multipole coefficient {v}")));
        }
        Ok(WeylCoefficients { a })
    }

    /// Accepts `{"a": [...]}` or a bare array.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Doc {
            Obj { a: Vec<f64> },
            Bare(Vec<f64>),
        }
        let doc: Doc = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("Weyl coefficients: {e}")))?;
        match doc {
            Doc::Obj { a } | Doc::Bare(a) => Self::new(a),
        }
    }
}

/// P_0 … P_nmax at x by the Bonnet recurrence.
pub fn legendre_all(nmax: usize, x: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(nmax + 1);
    p.push(1.0);
    if nmax >= 1 {
        p.push(x);
    }
    for n in 1..nmax {
        let nf = n as f64;
        p.push(((2.0 * nf + 1.0) * x * p[n] - nf * p[n - 1]) / (nf + 1.0));
    }
    p
}

/// Derivatives P'_0 … P'_nmax from P'_{k+1} = (k+1)P_k + xP'_k.
fn legendre_derivs(p: &[f64], x: f64) -> Vec<f64> {
    let mut d = vec![0.0; p.len()];
    for k in 0..p.len().saturating_sub(1) {
        d[k + 1] = (k as f64 + 1.0) * p[k] + x * d[k];
    }
    d
}

pub fn legendre(n: usize, x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0 + 1e-12) {
        return Err(Error::Domain(format!("Legendre argument {x} outside [-1, 1]")));
    }
    Ok(legendre_all(n, x)[n])
}

fn polar(rho: f64, z: f64) -> Result<(f64, f64)> {
    let r = rho.hypot(z);
    if r == 0.0 {
        return Err(Error::MultipoleOrigin);
    }
    Ok((r, z / r))
}

/// ψ = Σ a_n P_n(cos θ)/r^{n+1} and its gradient (∂_ρψ, ∂_zψ).
pub fn weyl_psi(coeffs: &WeylCoefficients, [rho, z]: [f64; 2]) -> Result<(f64, [f64; 2])> {
    let (r, u) = polar(rho, z)?;
    let n = coeffs.a.len();
    let p = legendre_all(n + 1, u);
    let dp = legendre_derivs(&p, u);
    let (mut psi, mut d_rho, mut d_z) = (0.0, 0.0, 0.0);
    let mut rn = r; // r^{n+1}
    for (k, &a) in coeffs.a.iter().enumerate() {
        let kf = k as f64;
        psi += a * p[k] / rn;
        // ∂_z(P_n/r^{n+1}) = −(n+1)P_{n+1}/r^{n+2}, ∂_ρ(P_n/r^{n+1}) = −ρP'_{n+1}/r^{n+3}
        d_z -= a * (kf + 1.0) * p[k + 1] / (rn * r);
        d_rho -= a * rho * dp[k + 1] / (rn * r * r);
        rn *= r;
    }
    Ok((psi, [d_rho, d_z]))
}

/// k = −Σ_{n,m} a_n a_m (n+1)(m+1)/((n+m+2) r^{n+m+2}) (P_nP_m − P_{n+1}P_{m+1}).
pub fn weyl_k(coeffs: &WeylCoefficients, [rho, z]: [f64; 2]) -> Result<f64> {
    let (r, u) = polar(rho, z)?;
    let a = &coeffs.a;
    let p = legendre_all(a.len() + 1, u);
    let mut k = 0.0;
    for (n, &an) in a.iter().enumerate() {
        for (m, &am) in a.iter().enumerate() {
            let s = (n + m + 2) as f64;
            let w = (n as f64 + 1.0) * (m as f64 + 1.0) / (s * r.powi((n + m + 2) as i32));
            k -= an * am * w * (p[n] * p[m] - p[n + 1] * p[m + 1]);
        }
    }
    Ok(k)
}

/// Static fields f = e^{2ψ}, Ω = 0 sampled on a (ρ, z) grid.
pub fn static_fields(coeffs: &WeylCoefficients, grid: &GridSpec) -> Result<AxisymFields> {
    let mut f = grid.zeros();
    for ((i, j), v) in f.indexed_iter_mut() {
        *v = (2.0 * weyl_psi(coeffs, grid.point(i, j))?.0).exp();
    }
    AxisymFields::new(grid.clone(), f, grid.zeros())
}
