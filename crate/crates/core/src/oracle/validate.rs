use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{diff_energy, oracle_spectrum, DiffVariable, OracleGrid};
use crate::model::{derive_state_quantities, Convention, ModelParams, QuantumNumbers, EFFECTIVE_MAGNETON};
use crate::observables::{state_current, state_moment};
use crate::spectrum::{eval_energy, radial_bound};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative energy tolerance for the convention verdict.
    pub adjudication: f64,
    /// Relative tolerance of the derivative-consistency rows.
    pub derivative: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            adjudication: 1e-5,
            derivative: 1e-6,
        }
    }
}

/// Effective angular numbers below this converge slowly on the default grids.
pub const SLOW_CONVERGENCE_M: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub qn: QuantumNumbers,
    #[serde(rename = "E_closed_half")]
    pub e_closed_half: f64,
    #[serde(rename = "E_closed_full")]
    pub e_closed_full: f64,
    #[serde(rename = "E_oracle")]
    pub e_oracle: Option<f64>,
    pub rel_err_half: Option<f64>,
    pub rel_err_full: Option<f64>,
    pub beyond_bound: bool,
    pub slow_convergence: bool,
    pub error: Option<String>,
}

/// Closed-form moment and current against numerical derivatives of the
/// closed-form energy, half convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeCheck {
    pub qn: QuantumNumbers,
    pub moment: Option<f64>,
    pub moment_numeric: Option<f64>,
    pub moment_rel_err: Option<f64>,
    pub current: Option<f64>,
    pub current_numeric: Option<f64>,
    pub current_rel_err: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Half,
    Full,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub max_rel_err_half: f64,
    pub max_rel_err_full: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
    pub derivative_tolerance: f64,
    pub compared_rows: usize,
    pub derivative_checks_passed: bool,
}

impl ValidationSummary {
    /// Neither convention matched the oracle.
    pub fn neither_within(&self) -> bool {
        self.compared_rows > 0 && self.max_rel_err_half >= self.tolerance && self.max_rel_err_full >= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMetadata {
    pub points: Vec<usize>,
    pub richardson_levels: u8,
    pub spacing: super::Spacing,
    pub boundary_at_1: Option<super::Boundary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub params: ModelParams,
    pub grid: GridMetadata,
    pub rows: Vec<ValidationRow>,
    pub derivative_checks: Vec<DerivativeCheck>,
    pub summary: ValidationSummary,
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = b.abs();
    if scale == 0.0 {
        (a - b).abs()
    } else {
        (a - b).abs() / scale
    }
}

fn derivative_check(params: &ModelParams, qn: QuantumNumbers, tol: f64) -> DerivativeCheck {
    let half = params.with_convention(Convention::Half);
    let energy = |p: &ModelParams, q: QuantumNumbers| Ok(eval_energy(p, q));
    let moment = state_moment(&half, qn).ok();
    let moment_numeric = diff_energy(energy, DiffVariable::B, &half, qn)
        .ok()
        .map(|d| -d.value / EFFECTIVE_MAGNETON);
    let current = state_current(&half, qn).ok();
    let current_numeric = diff_energy(energy, DiffVariable::Flux, &half, qn).ok().map(|d| -d.value);
    let pair = |a: Option<f64>, b: Option<f64>| a.zip(b).map(|(a, b)| rel(a, b));
    let moment_rel_err = pair(moment_numeric, moment);
    let current_rel_err = pair(current_numeric, current);
    // the cusp of M at m+ν = 0 leaves no derivative to compare against
    let smooth = derive_state_quantities(params, qn).big_m > 1e-3;
    let passed = !smooth
        || (moment_rel_err.is_some_and(|e| e < tol) && current_rel_err.is_none_or(|e| e < tol));
    DerivativeCheck {
        qn,
        moment,
        moment_numeric,
        moment_rel_err,
        current,
        current_numeric,
        current_rel_err,
        passed,
    }
}

/// Compares closed-form energies under both conventions with the oracle.
pub fn validate(
    params: &ModelParams,
    states: &[QuantumNumbers],
    tolerances: &Tolerances,
    grid: &OracleGrid,
) -> ValidationReport {
    let half = params.with_convention(Convention::Half);
    let full = params.with_convention(Convention::Full);

    let mut per_channel: BTreeMap<i32, u32> = BTreeMap::new();
    for q in states {
        let e = per_channel.entry(q.m).or_insert(0);
        *e = (*e).max(q.n + 1);
    }
    let spectra: BTreeMap<i32, Result<Vec<f64>, String>> = per_channel
        .iter()
        .map(|(&m, &count)| {
            let s = oracle_spectrum(params, m, count as usize, grid)
                .map(|s| s.energies)
                .map_err(|e| e.to_string());
            (m, s)
        })
        .collect();

    let rows: Vec<ValidationRow> = states
        .iter()
        .map(|&qn| {
            let e_half = eval_energy(&half, qn);
            let e_full = eval_energy(&full, qn);
            let d = derive_state_quantities(params, qn);
            let beyond_bound = radial_bound(params, qn.m).map(|b| !b.allows(qn.n)).unwrap_or(true);
            let (e_oracle, error) = match &spectra[&qn.m] {
                Ok(energies) => (Some(energies[qn.n as usize]), None),
                Err(msg) => (None, Some(msg.clone())),
            };
            ValidationRow {
                qn,
                e_closed_half: e_half,
                e_closed_full: e_full,
                e_oracle,
                rel_err_half: e_oracle.map(|o| rel(e_half, o)),
                rel_err_full: e_oracle.map(|o| rel(e_full, o)),
                beyond_bound,
                slow_convergence: d.big_m > 0.0 && d.big_m < SLOW_CONVERGENCE_M,
                error,
            }
        })
        .collect();

    let compared: Vec<&ValidationRow> = rows
        .iter()
        .filter(|r| r.e_oracle.is_some() && !r.slow_convergence)
        .collect();
    let max_of = |f: fn(&ValidationRow) -> Option<f64>| {
        compared.iter().filter_map(|r| f(r)).fold(0.0, f64::max)
    };
    let max_half = max_of(|r| r.rel_err_half);
    let max_full = max_of(|r| r.rel_err_full);
    let compared_rows = compared.len();
    let tol = tolerances.adjudication;
    let verdict = if compared.is_empty() {
        Verdict::Inconclusive
    } else if max_half < tol && max_full >= tol {
        Verdict::Half
    } else if max_full < tol && max_half >= tol {
        Verdict::Full
    } else {
        Verdict::Inconclusive
    };

    let derivative_checks: Vec<DerivativeCheck> = states
        .iter()
        .map(|&qn| derivative_check(params, qn, tolerances.derivative))
        .collect();
    let derivative_checks_passed = derivative_checks.iter().all(|c| c.passed);

    ValidationReport {
        params: *params,
        grid: GridMetadata {
            points: grid.levels(),
            richardson_levels: grid.richardson_levels,
            spacing: grid.spacing,
            boundary_at_1: grid.boundary_at_1,
        },
        rows,
        derivative_checks,
        summary: ValidationSummary {
            max_rel_err_half: max_half,
            max_rel_err_full: max_full,
            verdict,
            tolerance: tol,
            derivative_tolerance: tolerances.derivative,
            compared_rows,
            derivative_checks_passed,
        },
    }
}
