use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Fields, ModelParams, QuantumNumbers, FLUX_QUANTUM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffVariable {
    /// Field strength B (numerically ω_c).
    B,
    /// Aharonov–Bohm flux Φ_AB = 2πν.
    Flux,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Derivative {
    pub value: f64,
    /// |extrapolated − finer central difference|.
    pub error: f64,
}

fn shifted(params: &ModelParams, wrt: DiffVariable, value: f64) -> Result<ModelParams> {
    let f = params.fields();
    let fields = match wrt {
        DiffVariable::B => Fields::new(value, f.nu)?,
        DiffVariable::Flux => Fields::new(f.b, value / FLUX_QUANTUM)?,
    };
    Ok(params.with_fields(fields))
}

/// ∂E/∂p by central differences at h₀ = 10⁻⁴·max(1, |p|) and h₀/2, combined by Richardson.
pub fn diff_energy<F>(energy: F, wrt: DiffVariable, params: &ModelParams, qn: QuantumNumbers) -> Result<Derivative>
where
    F: Fn(&ModelParams, QuantumNumbers) -> Result<f64>,
{
    let p = match wrt {
        DiffVariable::B => params.fields().b,
        DiffVariable::Flux => FLUX_QUANTUM * params.fields().nu,
    };
    let eval = |x: f64| -> Result<f64> {
        let e = energy(&shifted(params, wrt, x)?, qn)?;
        if e.is_finite() {
            Ok(e)
        } else {
            Err(Error::NonFinite {
                context: "differentiating an energy",
            })
        }
    };
    let central = |h: f64| -> Result<f64> { Ok((eval(p + h)? - eval(p - h)?) / (2.0 * h)) };
    let h0 = 1e-4 * p.abs().max(1.0);
    let coarse = central(h0)?;
    let fine = central(0.5 * h0)?;
    let value = (4.0 * fine - coarse) / 3.0;
    Ok(Derivative {
        value,
        error: (value - fine).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::eval_energy;

    fn landau() -> ModelParams {
        ModelParams::builder().radius(1.0).field(10.0).build().unwrap()
    }

    #[test]
    fn linear_in_field() {
        let q = QuantumNumbers::new(0, 1);
        let d = diff_energy(|p, _| Ok(1.125 + 1.5 * p.fields().b), DiffVariable::B, &landau(), q).unwrap();
        assert!((d.value - 1.5).abs() < 1e-10);
        // the closed form is itself linear in ω_c along this state
        let d = diff_energy(|p, q| Ok(eval_energy(p, q)), DiffVariable::B, &landau(), q).unwrap();
        assert!((d.value - 1.5).abs() < 1e-9);
    }

    #[test]
    fn flux_derivative_of_worked_state() {
        let q = QuantumNumbers::new(0, 1);
        let d = diff_energy(|p, q| Ok(eval_energy(p, q)), DiffVariable::Flux, &landau(), q).unwrap();
        let current = -11.5 / (2.0 * std::f64::consts::PI);
        assert!((-d.value - current).abs() < 1e-6 * current.abs());
    }

    #[test]
    fn constant_function() {
        let d = diff_energy(|_, _| Ok(3.0), DiffVariable::Flux, &landau(), QuantumNumbers::new(0, 0)).unwrap();
        assert!(d.value.abs() < 1e-12);
    }

    #[test]
    fn non_finite_rejected() {
        let r = diff_energy(|_, _| Ok(f64::NAN), DiffVariable::B, &landau(), QuantumNumbers::new(0, 0));
        assert!(matches!(r, Err(Error::NonFinite { .. })));
    }
}
