//! Spectrum, eigenfunctions, magnetization and persistent currents of an
//! electron on a stereographically projected sphere, confined by a curved
//! Tan–Inkson ring potential and threaded by a uniform field plus an
//! Aharonov–Bohm flux.
//!
//! All quantities are in natural units ħ = μ = e = c = 1; moments are in
//! effective magnetons μ_B*. See [`model::UnitScale`] for material units.

pub mod error;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod spectrum;
pub mod wavefunction;

pub use error::{Error, Result};
pub use model::{Confinement, Convention, Fields, Geometry, ModelParams, QuantumNumbers};
pub use spectrum::{enumerate_states, eval_energy, Enumeration, SpectrumTable, StateRecord};
