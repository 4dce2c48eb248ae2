//! Per-state magnetic moments and persistent currents, and their ensemble sums.

mod ensemble;

pub use ensemble::{
    chemical_potential, fermi_occupation, fill_t0, total_magnetization, EnsembleResult, EnsembleSpec,
    WeightedState, TAIL_TOLERANCE,
};

use crate::error::{Error, Result};
use crate::model::{derive_state_quantities, shifted_cyclotron, ModelParams, QuantumNumbers, EFFECTIVE_MAGNETON};
use crate::oracle::{diff_energy, DiffVariable};
use crate::spectrum::eval_energy;

/// Magnetic moment of one state in units of μ_B*.
///
/// 𝓜/μ_B* = −[(2n+M+1)(ω_c + (m+ν)/2a²)/ω_m + 2c_ω(m+ν)].
pub fn state_moment(params: &ModelParams, qn: QuantumNumbers) -> Result<f64> {
    let d = derive_state_quantities(params, qn);
    if d.omega_m == 0.0 {
        return Err(Error::DegenerateFrequency { m: qn.m });
    }
    let radial = 2.0 * f64::from(qn.n) + d.big_m + 1.0;
    let orbital = radial * shifted_cyclotron(params, d.shifted_m) / d.omega_m;
    Ok(-(orbital + 2.0 * params.convention().coefficient() * d.shifted_m))
}

fn loop_factor(params: &ModelParams, rho_m: f64) -> f64 {
    // (ρ_m/2a)² = ρ_m²·(1/2a²)/2
    1.0 + 0.5 * rho_m * rho_m * params.geometry().curvature()
}

fn current_terms(params: &ModelParams, qn: QuantumNumbers) -> Result<(f64, f64, f64)> {
    let d = derive_state_quantities(params, qn);
    if d.omega_m == 0.0 {
        return Err(Error::DegenerateFrequency { m: qn.m });
    }
    if d.big_m == 0.0 {
        return Err(Error::UndefinedEffectiveRadius { m: qn.m });
    }
    let rho_m = d.effective_radius(qn.m)?;
    let diamagnetic = EFFECTIVE_MAGNETON * d.omega_c / d.omega_m * (2.0 * f64::from(qn.n) + 1.0);
    Ok((rho_m, loop_factor(params, rho_m), diamagnetic))
}

/// Persistent current I = (1/πρ_m²){𝓜[1+(ρ_m/2a)²] + μ_B*(ω_c/ω_m)(2n+1)}, natural units.
pub fn state_current(params: &ModelParams, qn: QuantumNumbers) -> Result<f64> {
    let (rho_m, factor, diamagnetic) = current_terms(params, qn)?;
    let moment = EFFECTIVE_MAGNETON * state_moment(params, qn)?;
    Ok((moment * factor + diamagnetic) / (std::f64::consts::PI * rho_m * rho_m))
}

/// Inverse of [`state_current`]: the moment (in μ_B*) carried by current `current`.
///
/// 𝓜 = [πρ_m²I − μ_B*(ω_c/ω_m)(2n+1)]/[1+(ρ_m/2a)²]. The diamagnetic term is
/// divided by the loop factor as well; the two coincide on the flat plane.
pub fn moment_from_current(params: &ModelParams, qn: QuantumNumbers, current: f64) -> Result<f64> {
    let (rho_m, factor, diamagnetic) = current_terms(params, qn)?;
    let loop_moment = std::f64::consts::PI * rho_m * rho_m * current;
    Ok((loop_moment - diamagnetic) / factor / EFFECTIVE_MAGNETON)
}

/// −∂E/∂Φ_AB of the closed-form energy by Richardson central differences.
pub fn byers_yang_current(params: &ModelParams, qn: QuantumNumbers) -> Result<f64> {
    let d = diff_energy(|p, q| Ok(eval_energy(p, q)), DiffVariable::Flux, params, qn)?;
    Ok(-d.value)
}

/// Closed-form current, or the numeric Byers–Yang value when M = 0.
pub fn current_or_numeric(params: &ModelParams, qn: QuantumNumbers) -> Result<(f64, bool)> {
    match state_current(params, qn) {
        Ok(i) => Ok((i, false)),
        Err(Error::UndefinedEffectiveRadius { .. }) => Ok((byers_yang_current(params, qn)?, true)),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Convention, Fields};

    fn landau() -> ModelParams {
        ModelParams::builder().radius(1.0).field(10.0).build().unwrap()
    }

    fn ring(b: f64, nu: f64) -> ModelParams {
        ModelParams::builder()
            .radius(3.0)
            .confinement(0.8, 1.2)
            .field(b)
            .flux(nu)
            .build()
            .unwrap()
    }

    #[test]
    fn zero_field_zero_flux_m0_has_no_moment() {
        let p = ring(0.0, 0.0);
        assert_eq!(state_moment(&p, QuantumNumbers::new(2, 0)).unwrap(), 0.0);
        assert_eq!(state_current(&p, QuantumNumbers::new(2, 0)).unwrap(), 0.0);
    }

    #[test]
    fn hand_computed_state() {
        let q = QuantumNumbers::new(0, 1);
        let moment = state_moment(&landau(), q).unwrap();
        assert!((moment + 3.0).abs() < 1e-14);
        let current = state_current(&landau(), q).unwrap();
        let expected = -11.5 / (2.0 * std::f64::consts::PI);
        assert!((current - expected).abs() < 1e-14 * expected.abs());
    }

    #[test]
    fn antisymmetry_is_exact() {
        let p = ring(0.9, 0.3);
        let q = ring(-0.9, -0.3);
        for n in 0..3 {
            for m in -3..=3 {
                let a = QuantumNumbers::new(n, m);
                let b = QuantumNumbers::new(n, -m);
                assert_eq!(state_moment(&p, a).unwrap(), -state_moment(&q, b).unwrap());
                assert_eq!(state_current(&p, a).unwrap(), -state_current(&q, b).unwrap());
            }
        }
    }

    #[test]
    fn current_inverts_to_moment() {
        for conv in [Convention::Half, Convention::Full] {
            let p = ring(1.3, 0.15).with_convention(conv);
            for m in -4..=4 {
                let q = QuantumNumbers::new(1, m);
                let i = state_current(&p, q).unwrap();
                let back = moment_from_current(&p, q, i).unwrap();
                let moment = state_moment(&p, q).unwrap();
                assert!((back - moment).abs() <= 1e-12 * moment.abs().max(1e-300), "{m}: {back} vs {moment}");
            }
        }
    }

    #[test]
    fn zero_current_zero_field_gives_zero_moment() {
        let p = ring(0.0, 0.2);
        assert_eq!(moment_from_current(&p, QuantumNumbers::new(0, 1), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn split_with_undivided_diamagnetic_term_only_holds_when_flat() {
        let q = QuantumNumbers::new(1, 2);
        let undivided = |p: &ModelParams| {
            let (rho_m, factor, dia) = current_terms(p, q).unwrap();
            let i = state_current(p, q).unwrap();
            (std::f64::consts::PI * rho_m * rho_m * i / factor - dia) / EFFECTIVE_MAGNETON
        };
        let curved = ring(1.3, 0.15);
        let gap = (undivided(&curved) - state_moment(&curved, q).unwrap()).abs();
        assert!(gap > 1e-3, "{gap}");
        let big = curved.to_builder().radius(1e6).build().unwrap();
        let moment = state_moment(&big, q).unwrap();
        assert!((undivided(&big) - moment).abs() < 1e-9 * moment.abs());
    }

    #[test]
    fn loop_factor_disappears_on_huge_sphere() {
        let p = ModelParams::builder()
            .radius(1e6)
            .confinement(1.0, 1.0)
            .field(0.5)
            .build()
            .unwrap();
        let d = derive_state_quantities(&p, QuantumNumbers::new(0, 1));
        assert!((loop_factor(&p, d.rho_m.unwrap()) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn m_zero_state_uses_numeric_current() {
        let p = landau();
        let q = QuantumNumbers::new(0, 0);
        assert_eq!(
            state_current(&p, q).unwrap_err(),
            Error::UndefinedEffectiveRadius { m: 0 }
        );
        let (i, numeric) = current_or_numeric(&p, q).unwrap();
        assert!(numeric);
        // the |m+ν| cusp averages out: dE/dν = ½·ω_c + ½·∂ω_m/∂ν = 5.25
        let expected = -5.25 / (2.0 * std::f64::consts::PI);
        assert!((i - expected).abs() < 1e-6, "{i} vs {expected}");
    }

    #[test]
    fn degenerate_frequency_is_an_error() {
        let p = ModelParams::builder().radius(1.0).field(-0.5).build().unwrap();
        assert!(state_moment(&p, QuantumNumbers::new(0, 1)).is_err());
        let q = p.with_fields(Fields::new(-0.5, 0.0).unwrap());
        assert!(state_current(&q, QuantumNumbers::new(0, 1)).is_err());
    }
}
