use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// CODATA 2018 exact / recommended values (SI).
const HBAR: f64 = 1.054_571_817e-34;
const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
const MILLI_ELECTRON_VOLT: f64 = 1.602_176_634e-22;

/// GaAs conduction-band effective mass ratio m*/m₀ (standard literature constant).
pub const GAAS_MASS_RATIO: f64 = 0.067;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitSystem {
    Natural,
    Gaas,
}

impl std::str::FromStr for UnitSystem {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "natural" => Ok(UnitSystem::Natural),
            "gaas" => Ok(UnitSystem::Gaas),
            other => Err(format!("unknown unit system `{other}` (expected natural|gaas)")),
        }
    }
}

/// Scale factors from natural units (ħ = μ = e = c = 1) to an output system.
///
/// Moments are measured in effective magnetons μ_B* = eħ/2μc in the natural
/// system and in meV/T in the material preset; currents in natural units and nA.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitScale {
    pub system: UnitSystem,
    pub mass_ratio: f64,
    /// meV per natural energy unit.
    pub energy_unit: f64,
    /// nm per natural length unit.
    pub length_unit: f64,
    /// tesla per natural field unit.
    pub field_unit: f64,
    /// meV/T per μ_B*.
    pub moment_unit: f64,
    /// nA per natural current unit.
    pub current_unit: f64,
}

impl Default for UnitScale {
    fn default() -> Self {
        Self::natural()
    }
}

impl UnitScale {
    pub fn natural() -> Self {
        Self {
            system: UnitSystem::Natural,
            mass_ratio: 1.0,
            energy_unit: 1.0,
            length_unit: 1.0,
            field_unit: 1.0,
            moment_unit: 1.0,
            current_unit: 1.0,
        }
    }

    /// Material preset with one natural energy unit equal to `energy_mev` meV.
    pub fn material(mass_ratio: f64, energy_mev: f64) -> Result<Self> {
        for (name, v) in [("mass_ratio", mass_ratio), ("energy_unit", energy_mev)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("unit scale must be finite and positive, got {v}"),
                });
            }
        }
        let mass = mass_ratio * ELECTRON_MASS;
        let energy = energy_mev * MILLI_ELECTRON_VOLT;
        let length_m = HBAR / (mass * energy).sqrt();
        // ħω_c = ħeB/μ equals one natural energy at one natural field unit.
        let field_t = mass * energy / (HBAR * ELEMENTARY_CHARGE);
        let magneton = ELEMENTARY_CHARGE * HBAR / (2.0 * mass);
        // I = -∂E/∂Φ with Φ₀ = h/e in SI against Φ₀ = 2π in natural units.
        let current_a = ELEMENTARY_CHARGE * energy / HBAR;
        Ok(Self {
            system: UnitSystem::Gaas,
            mass_ratio,
            energy_unit: energy_mev,
            length_unit: length_m * 1e9,
            field_unit: field_t,
            moment_unit: magneton / MILLI_ELECTRON_VOLT,
            current_unit: current_a * 1e9,
        })
    }

    pub fn gaas() -> Self {
        Self::material(GAAS_MASS_RATIO, 1.0).expect("preset constants are positive")
    }

    pub fn for_system(system: UnitSystem) -> Self {
        match system {
            UnitSystem::Natural => Self::natural(),
            UnitSystem::Gaas => Self::gaas(),
        }
    }

    fn factor(&self, kind: QuantityKind) -> f64 {
        match kind {
            QuantityKind::Energy => self.energy_unit,
            QuantityKind::Length => self.length_unit,
            QuantityKind::Field => self.field_unit,
            QuantityKind::Moment => self.moment_unit,
            QuantityKind::Current => self.current_unit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantityKind {
    Energy,
    Length,
    Field,
    Moment,
    Current,
}

impl std::str::FromStr for QuantityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "energy" => Ok(QuantityKind::Energy),
            "length" => Ok(QuantityKind::Length),
            "field" => Ok(QuantityKind::Field),
            "moment" => Ok(QuantityKind::Moment),
            "current" => Ok(QuantityKind::Current),
            other => Err(Error::InvalidParameter {
                name: "quantity-kind",
                reason: format!("unknown quantity kind `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    FromNatural,
    ToNatural,
}

pub fn convert_units(value: f64, kind: QuantityKind, direction: Direction, units: &UnitScale) -> f64 {
    let factor = units.factor(kind);
    match direction {
        Direction::FromNatural => value * factor,
        Direction::ToNatural => value / factor,
    }
}
