use serde::{Deserialize, Serialize};

use super::{Confinement, Geometry, ModelParams};
use crate::error::{Error, Result};

/// Confinement frequency ω₀, ring radius ρ₀ and offset V₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfinementScales {
    pub omega0: f64,
    pub rho0: f64,
    pub v0: f64,
}

/// ω₀, ρ₀ and V₀ of the curved Tan–Inkson potential.
///
/// With λ₁ = λ₂ = 0 every scale is zero. The flat plane uses the a → ∞ forms
/// and rejects the antidot (λ₁ = 0, λ₂ > 0), whose minimum runs off to infinity.
pub fn derive_confinement(confinement: Confinement, geometry: Geometry) -> Result<ConfinementScales> {
    let Confinement { lambda1, lambda2 } = confinement;
    if confinement.is_free() {
        return Ok(ConfinementScales {
            omega0: 0.0,
            rho0: 0.0,
            v0: 0.0,
        });
    }
    match geometry {
        Geometry::Flat => {
            if lambda1 == 0.0 {
                return Err(Error::FlatAntidot);
            }
            Ok(ConfinementScales {
                omega0: (8.0 * lambda1).sqrt(),
                rho0: (lambda2 / lambda1).sqrt().sqrt(),
                v0: 2.0 * (lambda1 * lambda2).sqrt(),
            })
        }
        Geometry::Sphere { radius } => {
            let effective = lambda1 + lambda2 / (2.0 * radius).powi(4);
            Ok(ConfinementScales {
                omega0: (8.0 * effective).sqrt(),
                rho0: (lambda2 / effective).sqrt().sqrt(),
                v0: lambda2 / (2.0 * radius * radius) + 2.0 * (lambda2 * effective).sqrt(),
            })
        }
    }
}

/// V(ρ) = λ₁ρ² + (λ₂/ρ²)[1 + (ρ/2a)²]² − V₀ at every grid point.
pub fn sample_potential(params: &ModelParams, rho_grid: &[f64]) -> Result<Vec<f64>> {
    let Confinement { lambda1, lambda2 } = params.confinement();
    let v0 = params.confinement_scales().v0;
    let inv_two_a = params.geometry().radius().map_or(0.0, |a| 0.5 / a);
    rho_grid
        .iter()
        .map(|&rho| {
            if !(rho.is_finite() && rho > 0.0) {
                return Err(Error::OutOfRange {
                    what: "rho",
                    value: rho,
                    range: "(0, inf)",
                });
            }
            let stretch = 1.0 + (rho * inv_two_a).powi(2);
            Ok(lambda1 * rho * rho + lambda2 / (rho * rho) * stretch * stretch - v0)
        })
        .collect()
}
