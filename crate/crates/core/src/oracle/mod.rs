//! Finite-difference Sturm–Liouville solver for the separated radial equation
//!
//! −d/dx[x(1−x) df/dx] + [M²/4(1−x) + a⁴ω_m²/x] f = κ f,  E = [κ + ¼ − a⁴(ω_c² + ω₀²(1+(ρ₀/2a)²)²)]/2a²,
//!
//! plus numerical differentiation and the closed-form validation harness.

mod numdiff;
mod tridiag;
mod validate;

pub use numdiff::{diff_energy, Derivative, DiffVariable};
pub use tridiag::SymTridiagonal;
pub use validate::{
    validate, DerivativeCheck, Tolerances, ValidationReport, ValidationRow, ValidationSummary, Verdict,
};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{derive_state_quantities, ModelParams, QuantumNumbers};

/// Coefficients of the radial operator for one angular channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialOperator {
    pub m: i32,
    pub big_m: f64,
    /// a⁴ω_m², the coefficient of 1/x.
    pub alpha_sq: f64,
    /// M²/4, the coefficient of 1/(1−x).
    pub gamma_sq: f64,
    energy_offset: f64,
    energy_scale: f64,
}

impl RadialOperator {
    pub fn p(&self, x: f64) -> f64 {
        x * (1.0 - x)
    }

    pub fn q(&self, x: f64) -> f64 {
        self.q_split(x, 1.0 - x)
    }

    fn q_split(&self, x: f64, complement: f64) -> f64 {
        let tail = if self.gamma_sq == 0.0 { 0.0 } else { self.gamma_sq / complement };
        tail + self.alpha_sq / x
    }

    pub fn kappa_to_energy(&self, kappa: f64) -> f64 {
        (kappa + 0.25 - self.energy_offset) * self.energy_scale
    }

    pub fn energy_to_kappa(&self, energy: f64) -> f64 {
        energy / self.energy_scale - 0.25 + self.energy_offset
    }

    /// Natural condition at x = 1 for this channel.
    pub fn natural_boundary(&self) -> Boundary {
        if self.big_m == 0.0 {
            Boundary::Neumann
        } else {
            Boundary::Dirichlet
        }
    }
}

pub fn build_radial_operator(params: &ModelParams, m: i32) -> Result<RadialOperator> {
    let a = params.geometry().radius().ok_or(Error::RequiresSphere)?;
    let d = derive_state_quantities(params, QuantumNumbers::new(0, m));
    if d.omega_m == 0.0 {
        return Err(Error::DegenerateFrequency { m });
    }
    let a2 = a * a;
    let stretch = 1.0 + (d.rho0 / (2.0 * a)).powi(2);
    let omega0_term = if d.omega0 == 0.0 { 0.0 } else { (d.omega0 * stretch).powi(2) };
    Ok(RadialOperator {
        m,
        big_m: d.big_m,
        alpha_sq: (a2 * d.omega_m).powi(2),
        gamma_sq: 0.25 * d.big_m * d.big_m,
        energy_offset: a2 * a2 * (d.omega_c * d.omega_c + omega0_term),
        energy_scale: 0.5 / a2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Dirichlet,
    Neumann,
}

/// Placement of the grid nodes in x.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    /// Uniform in the polar angle: x = sin²(πs/2) for uniform s.
    #[default]
    Angle,
    /// Uniform in x.
    Linear,
}

impl std::str::FromStr for Spacing {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "angle" => Ok(Spacing::Angle),
            "linear" => Ok(Spacing::Linear),
            other => Err(format!("unknown grid spacing `{other}` (expected angle|linear)")),
        }
    }
}

pub const MIN_GRID_POINTS: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleGrid {
    /// Nodes of the coarsest grid including both endpoints; odd so grids nest.
    pub points: usize,
    /// Overrides the channel's natural condition at x = 1.
    pub boundary_at_1: Option<Boundary>,
    /// Number of h² eliminations; grids are refined this many times.
    pub richardson_levels: u8,
    pub spacing: Spacing,
}

impl Default for OracleGrid {
    fn default() -> Self {
        Self {
            points: 4001,
            boundary_at_1: None,
            richardson_levels: 1,
            spacing: Spacing::Angle,
        }
    }
}

impl OracleGrid {
    pub fn check(&self) -> Result<()> {
        if self.points < MIN_GRID_POINTS || self.points.is_multiple_of(2) {
            return Err(Error::InvalidGrid {
                points: self.points,
                min: MIN_GRID_POINTS,
            });
        }
        if !(1..=3).contains(&self.richardson_levels) {
            return Err(Error::InvalidParameter {
                name: "richardson",
                reason: format!("levels must be 1, 2 or 3, got {}", self.richardson_levels),
            });
        }
        Ok(())
    }

    /// Point counts of the nested grids, coarsest first.
    pub fn levels(&self) -> Vec<usize> {
        let mut out = vec![self.points];
        for _ in 0..self.richardson_levels {
            let last = out[out.len() - 1];
            out.push(2 * last - 1);
        }
        out
    }
}

/// x(s) and 1 − x(s) at grid node i of `points`.
fn node(spacing: Spacing, i: usize, points: usize) -> (f64, f64) {
    let last = (points - 1) as f64;
    let (s, sc) = (i as f64 / last, (points - 1 - i) as f64 / last);
    match spacing {
        Spacing::Angle => ((0.5 * PI * s).sin().powi(2), (0.5 * PI * sc).sin().powi(2)),
        Spacing::Linear => (s, sc),
    }
}

/// p(x)/x'(s) at s.
fn stiffness(spacing: Spacing, s: f64) -> f64 {
    match spacing {
        Spacing::Angle => (PI * s).sin() / (2.0 * PI),
        Spacing::Linear => s * (1.0 - s),
    }
}

/// Measure of the control cell around node i: x(s+h/2) − x(s−h/2), clipped to [0, 1].
fn cell_mass(spacing: Spacing, i: usize, points: usize) -> f64 {
    let h = 1.0 / (points - 1) as f64;
    let last = i + 1 == points;
    match (spacing, last) {
        (Spacing::Angle, false) => (0.5 * PI * h).sin() * (PI * i as f64 * h).sin(),
        (Spacing::Angle, true) => (0.25 * PI * h).sin().powi(2),
        (Spacing::Linear, false) => h,
        (Spacing::Linear, true) => 0.5 * h,
    }
}

/// Finite-volume discretization, symmetrized by the cell masses.
pub fn assemble(operator: &RadialOperator, points: usize, spacing: Spacing, boundary: Boundary) -> Result<SymTridiagonal> {
    if boundary == Boundary::Neumann && operator.gamma_sq != 0.0 {
        return Err(Error::InvalidParameter {
            name: "boundary",
            reason: "a Neumann condition at x = 1 needs M = 0".into(),
        });
    }
    let h = 1.0 / (points - 1) as f64;
    let last = match boundary {
        Boundary::Dirichlet => points - 2,
        Boundary::Neumann => points - 1,
    };
    let stiff = |i: usize| -> f64 {
        // P at s_{i+½}; zero beyond the endpoint
        if i + 1 >= points {
            0.0
        } else {
            stiffness(spacing, (i as f64 + 0.5) * h) / h
        }
    };
    let nodes: Vec<usize> = (1..=last).collect();
    let mass: Vec<f64> = nodes.iter().map(|&i| cell_mass(spacing, i, points)).collect();
    let diag: Vec<f64> = nodes
        .iter()
        .zip(&mass)
        .map(|(&i, &w)| {
            let (x, xc) = node(spacing, i, points);
            (stiff(i - 1) + stiff(i)) / w + operator.q_split(x, xc)
        })
        .collect();
    let off: Vec<f64> = nodes
        .windows(2)
        .zip(mass.windows(2))
        .map(|(i, w)| -stiff(i[0]) / (w[0] * w[1]).sqrt())
        .collect();
    SymTridiagonal::new(diag, off)
}

/// The `count` lowest eigenvalues on a single grid of `points` nodes.
pub fn fd_eigenvalues_at(
    operator: &RadialOperator,
    points: usize,
    grid: &OracleGrid,
    count: usize,
) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidParameter {
            name: "count",
            reason: "at least one eigenvalue must be requested".into(),
        });
    }
    let boundary = grid.boundary_at_1.unwrap_or_else(|| operator.natural_boundary());
    assemble(operator, points, grid.spacing, boundary)?.lowest_eigenvalues(count)
}

/// The `count` lowest eigenvalues on the coarsest grid.
pub fn fd_eigenvalues(operator: &RadialOperator, grid: &OracleGrid, count: usize) -> Result<Vec<f64>> {
    grid.check()?;
    fd_eigenvalues_at(operator, grid.points, grid, count)
}

/// (4κ_fine − κ_coarse)/3 per eigenvalue.
pub fn richardson(coarse: &[f64], fine: &[f64]) -> Result<Vec<f64>> {
    richardson_order(coarse, fine, 1)
}

fn richardson_order(coarse: &[f64], fine: &[f64], order: i32) -> Result<Vec<f64>> {
    if coarse.len() != fine.len() {
        return Err(Error::MismatchedCounts {
            coarse: coarse.len(),
            fine: fine.len(),
        });
    }
    let w = 4f64.powi(order);
    Ok(coarse
        .iter()
        .zip(fine)
        .map(|(&c, &f)| if c == f { f } else { (w * f - c) / (w - 1.0) })
        .collect())
}

/// Eliminates successive even powers of h from values on nested grids, coarsest first.
pub fn extrapolate(levels: &[Vec<f64>]) -> Result<Vec<f64>> {
    let mut column = levels.to_vec();
    let mut order = 1;
    while column.len() > 1 {
        column = column
            .windows(2)
            .map(|w| richardson_order(&w[0], &w[1], order))
            .collect::<Result<Vec<_>>>()?;
        order += 1;
    }
    column.pop().ok_or(Error::InvalidParameter {
        name: "levels",
        reason: "no eigenvalues to extrapolate".into(),
    })
}

/// Oracle eigenvalues of one channel on every grid level, plus their extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSpectrum {
    pub operator: RadialOperator,
    pub raw: Vec<Vec<f64>>,
    pub kappa: Vec<f64>,
    pub energies: Vec<f64>,
}

pub fn oracle_spectrum(params: &ModelParams, m: i32, count: usize, grid: &OracleGrid) -> Result<OracleSpectrum> {
    grid.check()?;
    let operator = build_radial_operator(params, m)?;
    let raw = grid
        .levels()
        .into_iter()
        .map(|points| fd_eigenvalues_at(&operator, points, grid, count))
        .collect::<Result<Vec<_>>>()?;
    let kappa = extrapolate(&raw)?;
    let energies = kappa.iter().map(|&k| operator.kappa_to_energy(k)).collect();
    Ok(OracleSpectrum {
        operator,
        raw,
        kappa,
        energies,
    })
}

/// Energy of (n, m) from the extrapolated (n+1)-th eigenvalue.
pub fn oracle_energy(params: &ModelParams, qn: QuantumNumbers, grid: &OracleGrid) -> Result<f64> {
    let spectrum = oracle_spectrum(params, qn.m, qn.n as usize + 1, grid)?;
    Ok(spectrum.energies[qn.n as usize])
}
