//! Radial eigenfunctions f(x) ∝ x^α (1−x)^γ F(−n, n+1+2α+2γ; 1+2α; x),
//! their normalization under the measure 2a² dx, overlaps and densities.

mod hypergeometric;
mod quadrature;

pub use hypergeometric::{hypergeom_poly, series_coefficients, truncation_coefficient};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{derive_state_quantities, Geometry, ModelParams, QuantumNumbers, StereographicMap};
use hypergeometric::horner;
use quadrature::integrate_unit_interval;

const QUADRATURE_TOL: f64 = 1e-13;

/// Unnormalized radial profile plus its normalization constant.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub qn: QuantumNumbers,
    /// Exponent at x = 0: μa²ω_m/ħ.
    pub alpha: f64,
    /// Exponent at x = 1: M/2.
    pub gamma: f64,
    /// Series coefficients of F(−n, n+1+2α+2γ; 1+2α; x).
    pub poly_coeffs: Vec<f64>,
    /// ln of the constant c with 2a²∫|c f|² dx = 1.
    pub log_norm: f64,
    radius: f64,
    log_scale: f64,
    // F(−n, b; 1+2γ; 1−x) with prefactor (−n−2γ)_n/(1+2α)_n, used for x > ½
    reflected_coeffs: Vec<f64>,
    reflected_log_prefactor: f64,
    reflected_sign: f64,
}

impl RadialProfile {
    pub fn norm(&self) -> f64 {
        self.log_norm.exp()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// The same profile multiplied by `factor` > 0 before normalization.
    pub fn prescaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.log_scale += factor.ln();
        out.log_norm -= factor.ln();
        out
    }

    /// ln|f| and sign of the unnormalized profile, given ln x and ln(1−x).
    fn log_raw(&self, lx: f64, lxc: f64, x: f64, xc: f64) -> (f64, f64) {
        let poly = if x <= 0.5 {
            horner(&self.poly_coeffs, x)
        } else {
            self.reflected_sign * horner(&self.reflected_coeffs, xc)
        };
        let log_poly = if x <= 0.5 {
            poly.abs().ln()
        } else {
            poly.abs().ln() + self.reflected_log_prefactor
        };
        let tail = if self.gamma == 0.0 { 0.0 } else { self.gamma * lxc };
        let head = if self.alpha == 0.0 { 0.0 } else { self.alpha * lx };
        (self.log_scale + head + tail + log_poly, poly.signum())
    }

    fn log_at(&self, x: f64, xc: f64) -> (f64, f64) {
        self.log_raw(x.ln(), xc.ln(), x, xc)
    }

    /// Unnormalized f(x).
    pub fn raw_value(&self, x: f64) -> f64 {
        let (l, s) = self.log_at(x, 1.0 - x);
        s * l.exp()
    }

    /// Normalized c·f(x), with the complement 1 − x supplied for precision near x = 1.
    pub fn value_with_complement(&self, x: f64, complement: f64) -> f64 {
        let (l, s) = self.log_at(x, complement);
        s * (l + self.log_norm).exp()
    }

    pub fn value(&self, x: f64) -> f64 {
        self.value_with_complement(x, 1.0 - x)
    }
}

fn pochhammer_log_ratio(n: u32, top: f64, bottom: f64) -> (f64, f64) {
    let mut log = 0.0;
    let mut sign = 1.0;
    for k in 0..n {
        let k = f64::from(k);
        let ratio = (top + k) / (bottom + k);
        log += ratio.abs().ln();
        sign *= ratio.signum();
    }
    (log, sign)
}

/// Builds the profile for one state and normalizes it.
pub fn radial_profile(params: &ModelParams, qn: QuantumNumbers) -> Result<RadialProfile> {
    let radius = params.geometry().radius().ok_or(Error::RequiresSphere)?;
    let d = derive_state_quantities(params, qn);
    if d.omega_m == 0.0 {
        return Err(Error::DegenerateFrequency { m: qn.m });
    }
    let alpha = radius * radius * d.omega_m;
    let gamma = 0.5 * d.big_m;
    let n = qn.n;
    let b = f64::from(n) + 1.0 + 2.0 * alpha + 2.0 * gamma;
    let poly_coeffs = series_coefficients(n, b, 1.0 + 2.0 * alpha)?;
    let reflected_coeffs = series_coefficients(n, b, 1.0 + 2.0 * gamma)?;
    let (reflected_log_prefactor, reflected_sign) =
        pochhammer_log_ratio(n, -f64::from(n) - 2.0 * gamma, 1.0 + 2.0 * alpha);
    let mut profile = RadialProfile {
        qn,
        alpha,
        gamma,
        poly_coeffs,
        log_norm: 0.0,
        radius,
        log_scale: 0.0,
        reflected_coeffs,
        reflected_log_prefactor,
        reflected_sign,
    };
    profile.log_norm = log_normalization(&profile, params.geometry())?;
    Ok(profile)
}

fn check_exponents(profile: &RadialProfile) -> Result<()> {
    for exponent in [profile.alpha, profile.gamma] {
        if exponent <= -0.5 {
            return Err(Error::NonNormalizable { exponent });
        }
    }
    Ok(())
}

fn log_normalization(profile: &RadialProfile, geometry: Geometry) -> Result<f64> {
    let radius = geometry.radius().ok_or(Error::RequiresSphere)?;
    check_exponents(profile)?;
    let integral = integrate_unit_interval(
        |lx, lxc, x, xc| {
            let (l, _) = profile.log_raw(lx, lxc, x, xc);
            (2.0 * l, 1.0)
        },
        QUADRATURE_TOL,
    )?;
    let log_integral = integral.ln_scale + integral.value.ln();
    Ok(-0.5 * ((2.0 * radius * radius).ln() + log_integral))
}

/// Constant c with 2a²∫₀¹ |c·f(x)|² dx = 1 for the unnormalized profile.
pub fn normalize(profile: &RadialProfile, geometry: Geometry) -> Result<f64> {
    Ok(log_normalization(profile, geometry)?.exp())
}

/// True when the state has a square-integrable profile on the sphere.
pub fn is_normalizable(params: &ModelParams, qn: QuantumNumbers) -> bool {
    let d = derive_state_quantities(params, qn);
    match params.geometry().radius() {
        Some(a) => d.omega_m > 0.0 && a * a * d.omega_m > -0.5 && d.big_m > -1.0,
        None => d.omega_m > 0.0,
    }
}

/// 2a²∫₀¹ f₁f₂ dx for normalized profiles of equal m.
pub fn overlap(params: &ModelParams, q1: QuantumNumbers, q2: QuantumNumbers) -> Result<f64> {
    if q1.m != q2.m {
        return Err(Error::MixedAngularMomentum { m1: q1.m, m2: q2.m });
    }
    let p1 = radial_profile(params, q1)?;
    let p2 = radial_profile(params, q2)?;
    profile_overlap(&p1, &p2)
}

pub fn profile_overlap(p1: &RadialProfile, p2: &RadialProfile) -> Result<f64> {
    let integral = integrate_unit_interval(
        |lx, lxc, x, xc| {
            let (l1, s1) = p1.log_raw(lx, lxc, x, xc);
            let (l2, s2) = p2.log_raw(lx, lxc, x, xc);
            // grouped so that swapping the profiles is bitwise symmetric
            ((l1 + l2) + (p1.log_norm + p2.log_norm), s1 * s2)
        },
        QUADRATURE_TOL,
    )?;
    let a = p1.radius;
    Ok(2.0 * a * a * integral.value * integral.ln_scale.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coordinate {
    Rho,
    Theta,
    X,
}

impl std::str::FromStr for Coordinate {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "rho" => Ok(Coordinate::Rho),
            "theta" => Ok(Coordinate::Theta),
            "x" => Ok(Coordinate::X),
            other => Err(format!("unknown coordinate `{other}` (expected rho|theta|x)")),
        }
    }
}

/// Probability density per unit of the requested coordinate, normalized to 1.
pub fn density_samples(
    params: &ModelParams,
    qn: QuantumNumbers,
    coordinate: Coordinate,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let profile = radial_profile(params, qn)?;
    let map = StereographicMap::new(params.geometry())?;
    let a = profile.radius;
    grid.iter()
        .map(|&t| {
            let (x, xc, jacobian) = match coordinate {
                Coordinate::X => {
                    if !(0.0..=1.0).contains(&t) {
                        return Err(Error::OutOfRange {
                            what: "x",
                            value: t,
                            range: "[0, 1]",
                        });
                    }
                    (t, 1.0 - t, 2.0 * a * a)
                }
                Coordinate::Rho => {
                    let p = map.x_from_rho(t)?;
                    let stretch = 1.0 + (t / (2.0 * a)).powi(2);
                    (p.x, p.complement, t / (stretch * stretch))
                }
                Coordinate::Theta => {
                    if !(0.0..=std::f64::consts::PI).contains(&t) {
                        return Err(Error::OutOfRange {
                            what: "theta",
                            value: t,
                            range: "[0, pi]",
                        });
                    }
                    let (x, xc) = ((0.5 * t).cos().powi(2), (0.5 * t).sin().powi(2));
                    (x, xc, a * a * t.sin())
                }
            };
            let f = profile.value_with_complement(x, xc);
            let density = if f == 0.0 { 0.0 } else { f * f * jacobian };
            Ok((t, density))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free_sphere() -> ModelParams {
        ModelParams::builder().radius(1.0).build().unwrap()
    }

    fn ring() -> ModelParams {
        ModelParams::builder()
            .radius(2.0)
            .confinement(1.0, 1.5)
            .field(0.7)
            .flux(0.25)
            .build()
            .unwrap()
    }

    fn sign_changes(profile: &RadialProfile, samples: usize) -> usize {
        let values: Vec<f64> = (1..samples)
            .map(|i| profile.raw_value(i as f64 / samples as f64))
            .filter(|v| *v != 0.0)
            .collect();
        values.windows(2).filter(|w| w[0].signum() != w[1].signum()).count()
    }

    #[test]
    fn free_sphere_ground_profile() {
        let p = radial_profile(&free_sphere(), QuantumNumbers::new(0, 1)).unwrap();
        assert!((p.alpha - 0.5).abs() < 1e-15 && (p.gamma - 0.5).abs() < 1e-15);
        for x in [0.1f64, 0.5, 0.8] {
            let expected = (x * (1.0 - x)).sqrt();
            assert!((p.raw_value(x) - expected).abs() < 1e-15);
        }
        assert!((p.norm() - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ground_state_has_unit_polynomial() {
        let p = radial_profile(&ring(), QuantumNumbers::new(0, 2)).unwrap();
        assert_eq!(p.poly_coeffs, vec![1.0]);
    }

    #[test]
    fn node_counts_equal_n() {
        for n in 0..4 {
            let p = radial_profile(&ring(), QuantumNumbers::new(n, -1)).unwrap();
            assert_eq!(sign_changes(&p, 10_000), n as usize);
        }
    }

    #[test]
    fn reflected_series_agrees_with_direct_series() {
        let p = radial_profile(&ring(), QuantumNumbers::new(5, 1)).unwrap();
        for x in [0.45, 0.5, 0.55, 0.7] {
            let direct = horner(&p.poly_coeffs, x);
            let reflected = p.reflected_sign * p.reflected_log_prefactor.exp() * horner(&p.reflected_coeffs, 1.0 - x);
            let scale: f64 = p.poly_coeffs.iter().map(|c| c.abs() * x.powi(3)).sum::<f64>().max(1.0);
            assert!((direct - reflected).abs() < 1e-9 * scale, "{x}: {direct} vs {reflected}");
        }
    }

    #[test]
    fn normalization_scales_inversely() {
        let p = radial_profile(&ring(), QuantumNumbers::new(1, 0)).unwrap();
        let geometry = ring().geometry();
        let base = normalize(&p.prescaled(1.0), geometry).unwrap();
        let scaled = normalize(&p.prescaled(7.5), geometry).unwrap();
        // normalize acts on the unnormalized (prescaled) profile
        assert!((scaled * 7.5 - base).abs() < 1e-12 * base);
        assert!((base - p.norm()).abs() < 1e-12 * base);
    }

    #[test]
    fn overlap_self_and_symmetry() {
        let params = ring();
        let q0 = QuantumNumbers::new(0, 1);
        let q1 = QuantumNumbers::new(1, 1);
        assert!((overlap(&params, q0, q0).unwrap() - 1.0).abs() < 1e-9);
        let a = overlap(&params, q0, q1).unwrap();
        assert!(a.abs() < 1e-8, "{a}");
        assert_eq!(a, overlap(&params, q1, q0).unwrap());
        assert!(matches!(
            overlap(&params, q0, QuantumNumbers::new(0, 2)),
            Err(Error::MixedAngularMomentum { .. })
        ));
    }

    #[test]
    fn x_density_of_free_sphere() {
        let d = density_samples(&free_sphere(), QuantumNumbers::new(0, 1), Coordinate::X, &[0.2, 0.5, 0.8]).unwrap();
        for (x, v) in &d {
            assert!((v - 6.0 * x * (1.0 - x) * 2.0 * 0.5).abs() < 1e-12 * v, "{x} {v}");
        }
        assert!((d[0].1 - d[2].1).abs() < 1e-12);
    }

    #[test]
    fn density_grid_out_of_range() {
        let params = free_sphere();
        let q = QuantumNumbers::new(0, 1);
        assert!(density_samples(&params, q, Coordinate::X, &[1.5]).is_err());
        assert!(density_samples(&params, q, Coordinate::Rho, &[-1.0]).is_err());
        assert!(density_samples(&params, q, Coordinate::Theta, &[4.0]).is_err());
    }

    #[test]
    fn flat_geometry_has_no_profile() {
        let flat = ModelParams::builder().flat().confinement(1.0, 1.0).build().unwrap();
        assert_eq!(
            radial_profile(&flat, QuantumNumbers::new(0, 0)).unwrap_err(),
            Error::RequiresSphere
        );
    }

    #[test]
    fn degenerate_frequency_rejected() {
        let p = ModelParams::builder().radius(1.0).field(-0.5).build().unwrap();
        assert_eq!(
            radial_profile(&p, QuantumNumbers::new(0, 1)).unwrap_err(),
            Error::DegenerateFrequency { m: 1 }
        );
    }
}
