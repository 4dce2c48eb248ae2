//! Terminating Gauss hypergeometric series F(−n, b; c; z).

use crate::error::{Error, Result};

fn check_denominator(n: u32, c: f64) -> Result<()> {
    // (c)_k for k ≤ n vanishes iff c ∈ {0, −1, …, −(n−1)}
    let forbidden = c <= 0.0 && c.fract() == 0.0 && c > -f64::from(n);
    if forbidden || !c.is_finite() {
        Err(Error::ForbiddenHypergeometric { n, c })
    } else {
        Ok(())
    }
}

/// Ratio t_{k+1}/t_k of consecutive terms without the power of z.
fn term_ratio(n: u32, b: f64, c: f64, k: u32) -> f64 {
    let k = f64::from(k);
    (k - f64::from(n)) * (b + k) / ((c + k) * (k + 1.0))
}

/// Coefficients [(−n)_k (b)_k / ((c)_k k!)] for k = 0..=n.
pub fn series_coefficients(n: u32, b: f64, c: f64) -> Result<Vec<f64>> {
    check_denominator(n, c)?;
    let mut coeffs = Vec::with_capacity(n as usize + 1);
    let mut term = 1.0;
    coeffs.push(term);
    for k in 0..n {
        term *= term_ratio(n, b, c, k);
        coeffs.push(term);
    }
    Ok(coeffs)
}

/// The k = n+1 coefficient the term recurrence produces; zero for a terminating series.
pub fn truncation_coefficient(n: u32, b: f64, c: f64) -> Result<f64> {
    let coeffs = series_coefficients(n, b, c)?;
    Ok(coeffs[n as usize] * term_ratio(n, b, c, n))
}

/// F(−n, b; c; z) summed term by term; exact up to rounding.
pub fn hypergeom_poly(n: u32, b: f64, c: f64, z: f64) -> Result<f64> {
    check_denominator(n, c)?;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..n {
        term *= term_ratio(n, b, c, k) * z;
        sum += term;
    }
    Ok(sum)
}

pub(crate) fn horner(coeffs: &[f64], z: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
}
