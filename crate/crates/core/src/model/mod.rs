//! Input parameters, unit conventions, coordinate maps, the curved Tan–Inkson
//! confinement potential, and the per-state derived scalars.
//!
//! Everything is expressed in natural units with ħ = μ = e = c = 1, where μ is
//! the effective mass. The cyclotron frequency is then numerically equal to the
//! field strength, the flux quantum is 2π and the effective magneton eħ/2μc is ½.

mod coords;
mod potential;
mod units;

pub use coords::{StereographicMap, XPoint};
pub use potential::{derive_confinement, sample_potential, ConfinementScales};
pub use units::{convert_units, Direction, QuantityKind, UnitScale, UnitSystem};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Magnetic flux quantum hc/e in natural units.
pub const FLUX_QUANTUM: f64 = 2.0 * std::f64::consts::PI;

/// Effective magneton eħ/2μc in natural units.
pub const EFFECTIVE_MAGNETON: f64 = 0.5;

/// Surface the particle lives on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    /// Sphere of radius `a`, stereographically projected onto the plane.
    Sphere { radius: f64 },
    /// The a → ∞ limit.
    Flat,
}

impl Geometry {
    pub fn sphere(radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter {
                name: "a",
                reason: format!("sphere radius must be finite and positive, got {radius}"),
            });
        }
        Ok(Geometry::Sphere { radius })
    }

    pub fn radius(&self) -> Option<f64> {
        match *self {
            Geometry::Sphere { radius } => Some(radius),
            Geometry::Flat => None,
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, Geometry::Flat)
    }

    /// ħ/(2μa²): the curvature energy scale, zero for the flat plane.
    pub fn curvature(&self) -> f64 {
        match *self {
            Geometry::Sphere { radius } => 0.5 / (radius * radius),
            Geometry::Flat => 0.0,
        }
    }
}

/// Tan–Inkson parameters λ₁ (harmonic, energy/length²) and λ₂ (centrifugal, energy·length²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Confinement {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl Confinement {
    pub fn new(lambda1: f64, lambda2: f64) -> Result<Self> {
        for (name, value) in [("lambda1", lambda1), ("lambda2", lambda2)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and nonnegative, got {value}"),
                });
            }
        }
        Ok(Self { lambda1, lambda2 })
    }

    pub fn none() -> Self {
        Self {
            lambda1: 0.0,
            lambda2: 0.0,
        }
    }

    pub fn is_free(&self) -> bool {
        self.lambda1 == 0.0 && self.lambda2 == 0.0
    }
}

/// Uniform field `b` and Aharonov–Bohm flux ratio `nu` = Φ_AB/Φ₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fields {
    pub b: f64,
    pub nu: f64,
}

impl Fields {
    pub fn new(b: f64, nu: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(Error::InvalidParameter {
                name: "b",
                reason: format!("must be finite, got {b}"),
            });
        }
        if !nu.is_finite() {
            return Err(Error::InvalidParameter {
                name: "flux-ratio",
                reason: format!("must be finite, got {nu}"),
            });
        }
        Ok(Self { b, nu })
    }

    pub fn zero() -> Self {
        Self { b: 0.0, nu: 0.0 }
    }

    /// Cyclotron frequency eB/μc.
    pub fn omega_c(&self) -> f64 {
        self.b
    }
}

/// Coefficient c_ω of the ħω_c(m+ν) term in the energy.
///
/// `Full` is c_ω = 1, the coefficient of the eigenvalue formula as usually quoted;
/// `Half` is the value the moment, current and flat-limit expressions imply (½).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    #[default]
    Half,
    Full,
}

impl Convention {
    pub fn coefficient(self) -> f64 {
        match self {
            Convention::Half => 0.5,
            Convention::Full => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Convention::Half => "half",
            Convention::Full => "full",
        }
    }

    pub fn other(self) -> Self {
        match self {
            Convention::Half => Convention::Full,
            Convention::Full => Convention::Half,
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "half" => Ok(Convention::Half),
            "full" => Ok(Convention::Full),
            other => Err(format!("unknown convention `{other}` (expected half|full)")),
        }
    }
}

/// Radial index n ≥ 0 and angular momentum m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuantumNumbers {
    pub n: u32,
    pub m: i32,
}

impl QuantumNumbers {
    pub fn new(n: u32, m: i32) -> Self {
        Self { n, m }
    }
}

/// The single immutable input record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    geometry: Geometry,
    confinement: Confinement,
    fields: Fields,
    convention: Convention,
    units: UnitScale,
}

impl ModelParams {
    pub fn new(
        geometry: Geometry,
        confinement: Confinement,
        fields: Fields,
        convention: Convention,
        units: UnitScale,
    ) -> Result<Self> {
        if geometry.is_flat() && confinement.lambda1 == 0.0 && confinement.lambda2 > 0.0 {
            return Err(Error::FlatAntidot);
        }
        Ok(Self {
            geometry,
            confinement,
            fields,
            convention,
            units,
        })
    }

    pub fn builder() -> ParamsBuilder {
        ParamsBuilder::default()
    }

    pub fn to_builder(&self) -> ParamsBuilder {
        ParamsBuilder {
            radius: self.geometry.radius(),
            lambda1: self.confinement.lambda1,
            lambda2: self.confinement.lambda2,
            b: self.fields.b,
            nu: self.fields.nu,
            convention: self.convention,
            units: self.units,
        }
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn confinement(&self) -> Confinement {
        self.confinement
    }

    pub fn fields(&self) -> Fields {
        self.fields
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn units(&self) -> UnitScale {
        self.units
    }

    /// Same physics with the other ω_c(m+ν) coefficient.
    pub fn with_convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }

    pub fn with_fields(mut self, fields: Fields) -> Self {
        self.fields = fields;
        self
    }

    pub fn with_units(mut self, units: UnitScale) -> Self {
        self.units = units;
        self
    }

    pub fn confinement_scales(&self) -> ConfinementScales {
        // Construction already rejected the only failing combination.
        derive_confinement(self.confinement, self.geometry)
            .expect("validated parameters have a well-defined confinement minimum")
    }
}

/// Builder over raw numbers; `radius = None` selects the flat plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamsBuilder {
    pub radius: Option<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
    pub b: f64,
    pub nu: f64,
    pub convention: Convention,
    pub units: UnitScale,
}

impl Default for ParamsBuilder {
    fn default() -> Self {
        Self {
            radius: Some(1.0),
            lambda1: 0.0,
            lambda2: 0.0,
            b: 0.0,
            nu: 0.0,
            convention: Convention::Half,
            units: UnitScale::natural(),
        }
    }
}

impl ParamsBuilder {
    pub fn radius(mut self, a: f64) -> Self {
        self.radius = Some(a);
        self
    }

    pub fn flat(mut self) -> Self {
        self.radius = None;
        self
    }

    pub fn confinement(mut self, lambda1: f64, lambda2: f64) -> Self {
        self.lambda1 = lambda1;
        self.lambda2 = lambda2;
        self
    }

    pub fn field(mut self, b: f64) -> Self {
        self.b = b;
        self
    }

    pub fn flux(mut self, nu: f64) -> Self {
        self.nu = nu;
        self
    }

    pub fn convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }

    pub fn units(mut self, units: UnitScale) -> Self {
        self.units = units;
        self
    }

    pub fn build(self) -> Result<ModelParams> {
        let geometry = match self.radius {
            Some(a) => Geometry::sphere(a)?,
            None => Geometry::Flat,
        };
        ModelParams::new(
            geometry,
            Confinement::new(self.lambda1, self.lambda2)?,
            Fields::new(self.b, self.nu)?,
            self.convention,
            self.units,
        )
    }
}

/// Scalars derived from the parameters and one angular channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    pub omega0: f64,
    pub rho0: f64,
    pub v0: f64,
    pub omega_c: f64,
    /// m + ν.
    pub shifted_m: f64,
    /// Effective angular number M.
    pub big_m: f64,
    /// Hybrid frequency ω_m.
    pub omega_m: f64,
    /// Effective radius √(2M/ω_m); `None` when ω_m = 0.
    pub rho_m: Option<f64>,
}

impl DerivedQuantities {
    pub fn effective_radius(&self, m: i32) -> Result<f64> {
        self.rho_m.ok_or(Error::DegenerateFrequency { m })
    }
}

/// ω_c + ħ(m+ν)/2μa²: the combination ω_m is built from.
pub(crate) fn shifted_cyclotron(params: &ModelParams, shifted_m: f64) -> f64 {
    params.fields.omega_c() + params.geometry.curvature() * shifted_m
}

pub fn derive_state_quantities(params: &ModelParams, qn: QuantumNumbers) -> DerivedQuantities {
    let scales = params.confinement_scales();
    let shifted_m = f64::from(qn.m) + params.fields.nu;
    let coupling = 0.5 * scales.omega0 * scales.rho0 * scales.rho0;
    let big_m = shifted_m.hypot(coupling);
    let omega_m = shifted_cyclotron(params, shifted_m).hypot(scales.omega0);
    let rho_m = (omega_m > 0.0).then(|| (2.0 * big_m / omega_m).sqrt());
    DerivedQuantities {
        omega0: scales.omega0,
        rho0: scales.rho0,
        v0: scales.v0,
        omega_c: params.fields.omega_c(),
        shifted_m,
        big_m,
        omega_m,
        rho_m,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(a: f64, l1: f64, l2: f64, b: f64, nu: f64) -> ModelParams {
        ModelParams::builder()
            .radius(a)
            .confinement(l1, l2)
            .field(b)
            .flux(nu)
            .build()
            .unwrap()
    }

    #[test]
    fn big_m_without_centrifugal_term_is_abs_m() {
        let d = derive_state_quantities(&sphere(1.0, 0.7, 0.0, 0.3, 0.0), QuantumNumbers::new(0, 3));
        assert_eq!(d.big_m, 3.0);
    }

    #[test]
    fn big_m_at_cancelled_flux_is_coupling() {
        let p = sphere(2.0, 1.0, 0.5, 0.3, 1.0);
        let d = derive_state_quantities(&p, QuantumNumbers::new(0, -1));
        let s = p.confinement_scales();
        assert_eq!(d.big_m, 0.5 * s.omega0 * s.rho0 * s.rho0);
    }

    #[test]
    fn flat_big_m_matches_large_sphere() {
        let flat = ModelParams::builder().flat().confinement(1.0, 1.0).build().unwrap();
        let d = derive_state_quantities(&flat, QuantumNumbers::new(0, 0));
        assert!((d.big_m - 2f64.sqrt()).abs() < 1e-14);
        let big = sphere(1e6, 1.0, 1.0, 0.0, 0.0);
        let e = derive_state_quantities(&big, QuantumNumbers::new(0, 0));
        assert!((e.big_m - d.big_m).abs() < 1e-10);
    }

    #[test]
    fn degenerate_frequency_has_no_effective_radius() {
        // ω_c = -m/(2a²) with no confinement makes ω_m vanish.
        let p = sphere(1.0, 0.0, 0.0, -0.5, 0.0);
        let d = derive_state_quantities(&p, QuantumNumbers::new(0, 1));
        assert_eq!(d.omega_m, 0.0);
        assert_eq!(d.effective_radius(1), Err(Error::DegenerateFrequency { m: 1 }));
    }

    #[test]
    fn big_m_identity_holds() {
        let p = sphere(3.0, 0.4, 2.5, 1.5, 0.3);
        for m in -4..=4 {
            let d = derive_state_quantities(&p, QuantumNumbers::new(0, m));
            let coupling = 0.5 * d.omega0 * d.rho0 * d.rho0;
            let rhs = d.shifted_m * d.shifted_m + coupling * coupling;
            assert!((d.big_m * d.big_m - rhs).abs() <= 4.0 * f64::EPSILON * rhs);
        }
    }

    #[test]
    fn flux_shift_is_exact_for_dyadic_flux() {
        let p = sphere(1.5, 0.5, 0.75, 2.0, 0.375);
        for k in -3..=3 {
            let q = p.with_fields(Fields::new(2.0, 0.375 - f64::from(k)).unwrap());
            for m in -3..=3 {
                let a = derive_state_quantities(&p, QuantumNumbers::new(0, m));
                let b = derive_state_quantities(&q, QuantumNumbers::new(0, m + k));
                assert_eq!(a.big_m, b.big_m);
                assert_eq!(a.omega_m, b.omega_m);
            }
        }
    }

    #[test]
    fn builder_rejects_bad_values() {
        assert!(ModelParams::builder().radius(0.0).build().is_err());
        assert!(ModelParams::builder().radius(f64::INFINITY).build().is_err());
        assert!(ModelParams::builder().confinement(-1.0, 0.0).build().is_err());
        assert!(ModelParams::builder().field(f64::NAN).build().is_err());
        assert_eq!(
            ModelParams::builder().flat().confinement(0.0, 1.0).build(),
            Err(Error::FlatAntidot)
        );
    }
}
