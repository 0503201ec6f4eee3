//! Observed convergence order from errors at successive refinements.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Errors below this are treated as round-off and yield no order.
pub const ERROR_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceFit {
    pub name: String,
    pub spacings: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of log(error) against log(h).
    pub order: Option<f64>,
    pub r_squared: Option<f64>,
    /// Orders from consecutive pairs of levels.
    pub pairwise: Vec<f64>,
    /// Errors strictly decrease under refinement.
    pub monotone: bool,
    /// Every error is at round-off level.
    pub below_floor: bool,
}

/// Fits error ∝ h^p. Needs at least three levels with spacing ratio 2.
pub fn fit_order(name: &str, spacings: &[f64], errors: &[f64]) -> Result<ConvergenceFit> {
    if spacings.len() != errors.len() {
        return Err(Error::Config(format!(
            "{} spacings but {} errors",
            spacings.len(),
            errors.len()
        )));
    }
    if spacings.len() < 3 {
        return Err(Error::Config(format!("convergence study needs at least 3 levels, got {}", spacings.len())));
    }
    for w in spacings.windows(2) {
        if ((w[0] / w[1]) - 2.0).abs() > 1e-9 {
            return Err(Error::Config(format!("refinement ratio must be 2, got {}", w[0] / w[1])));
        }
    }
    if let Some(e) = errors.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
        return Err(Error::Config(format!("error values must be finite and non-negative, got {e}")));
    }

    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    let below_floor = errors.iter().all(|&e| e < ERROR_FLOOR);
    let mut fit = ConvergenceFit {
        name: name.to_string(),
        spacings: spacings.to_vec(),
        errors: errors.to_vec(),
        order: None,
        r_squared: None,
        pairwise: Vec::new(),
        monotone,
        below_floor,
    };
    if below_floor || errors.contains(&0.0) {
        return Ok(fit);
    }
    fit.pairwise = spacings
        .windows(2)
        .zip(errors.windows(2))
        .map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect();

    let x: Vec<f64> = spacings.iter().map(|h| h.ln()).collect();
    let y: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    fit.order = Some(slope);
    fit.r_squared = Some(if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) });
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let h = [0.1, 0.05, 0.025, 0.0125];
        let e: Vec<f64> = h.iter().map(|h| 3.0 * h * h).collect();
        let fit = fit_order("x", &h, &e).unwrap();
        assert!((fit.order.unwrap() - 2.0).abs() < 1e-12);
        assert!((fit.r_squared.unwrap() - 1.0).abs() < 1e-12);
        assert!(fit.monotone && !fit.below_floor);
    }

    #[test]
    fn round_off_has_no_order() {
        let fit = fit_order("x", &[0.4, 0.2, 0.1], &[1e-15, 3e-15, 2e-15]).unwrap();
        assert!(fit.below_floor);
        assert_eq!(fit.order, None);
    }

    #[test]
    fn rejects_two_levels_and_wrong_ratio() {
        assert!(fit_order("x", &[0.2, 0.1], &[1.0, 0.25]).is_err());
        assert!(fit_order("x", &[0.3, 0.1, 0.05], &[1.0, 0.1, 0.02]).is_err());
    }
}
