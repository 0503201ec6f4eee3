//! Special functions.

/// Bessel function of the first kind of order zero.
pub fn bessel_j0(x: f64) -> f64 {
    libm::j0(x)
}
