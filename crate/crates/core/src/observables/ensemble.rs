use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::current_or_numeric;
use crate::error::{Error, Result};
use crate::model::{ModelParams, QuantumNumbers};
use crate::spectrum::{enumerate_states, eval_energy, radial_bound, BoundPolicy, Enumeration, MWindow, StateRecord};

/// Largest occupation tolerated for the first state left out of the table.
pub const TAIL_TOLERANCE: f64 = 1e-12;
const FILLING_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub electrons: usize,
    /// k_B T in natural energy units.
    pub temperature: f64,
}

impl EnsembleSpec {
    pub fn new(electrons: usize, temperature: f64) -> Result<Self> {
        if electrons == 0 {
            return Err(Error::InvalidParameter {
                name: "electrons",
                reason: "at least one electron is required".into(),
            });
        }
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "temperature",
                reason: format!("must be finite and nonnegative, got {temperature}"),
            });
        }
        Ok(Self { electrons, temperature })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedState {
    pub record: StateRecord,
    pub weight: f64,
    /// Closed-form current, or the numeric flux derivative for M = 0 states.
    pub current: f64,
    pub numeric_current: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub spec: EnsembleSpec,
    pub states: Vec<WeightedState>,
    /// Only at finite temperature.
    pub chemical_potential: Option<f64>,
    /// Σ weight·moment, in μ_B*.
    pub total_moment: f64,
    pub total_current: f64,
    /// The N-th and (N+1)-th levels coincide: the T = 0 filling is an open shell.
    pub open_shell: bool,
}

/// Fermi function 1/(exp((E−μ)/T) + 1), without overflow.
pub fn fermi_occupation(energy: f64, mu: f64, temperature: f64) -> f64 {
    let t = (energy - mu) / temperature;
    if t > 0.0 {
        let e = (-t).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + t.exp())
    }
}

fn weighted(params: &ModelParams, record: StateRecord, weight: f64) -> Result<WeightedState> {
    let (current, numeric_current) = match record.current {
        Some(i) => (i, false),
        None => current_or_numeric(params, record.qn)?,
    };
    Ok(WeightedState {
        record,
        weight,
        current,
        numeric_current,
    })
}

fn totals(states: &[WeightedState]) -> (f64, f64) {
    states.iter().fold((0.0, 0.0), |(m, i), s| {
        (m + s.weight * s.record.moment, i + s.weight * s.current)
    })
}

fn table_for(params: &ModelParams, spec: &EnsembleSpec, controls: &Enumeration) -> Result<Vec<StateRecord>> {
    let controls = Enumeration {
        max_states: controls.max_states.max(spec.electrons + 1),
        ..*controls
    };
    let table = enumerate_states(params, &controls)?;
    if table.len() < spec.electrons {
        return Err(Error::InsufficientStates {
            required: spec.electrons,
            available: table.len(),
        });
    }
    Ok(table.rows)
}

fn ties(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Occupies the N lowest states in (E, m, n) order.
pub fn fill_t0(params: &ModelParams, spec: &EnsembleSpec, controls: &Enumeration) -> Result<EnsembleResult> {
    let rows = table_for(params, spec, controls)?;
    let n = spec.electrons;
    let open_shell = rows.len() > n && ties(rows[n - 1].energy, rows[n].energy);
    let states = rows[..n]
        .iter()
        .map(|r| weighted(params, *r, 1.0))
        .collect::<Result<Vec<_>>>()?;
    let (total_moment, total_current) = totals(&states);
    Ok(EnsembleResult {
        spec: *spec,
        states,
        chemical_potential: None,
        total_moment,
        total_current,
        open_shell,
    })
}

fn radial_allowed(params: &ModelParams, qn: QuantumNumbers, policy: BoundPolicy) -> Result<bool> {
    match (policy, params.geometry().radius()) {
        (BoundPolicy::Paper, Some(_)) => Ok(radial_bound(params, qn.m)?.allows(qn.n)),
        _ => Ok(true),
    }
}

/// Lowest energies of states the table could have missed.
fn excluded_candidates(params: &ModelParams, rows: &[StateRecord], controls: &Enumeration) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    if rows.len() >= controls.max_states {
        if let Some(last) = rows.last() {
            out.push(last.energy);
        }
    }
    let channels: BTreeSet<i32> = rows.iter().map(|r| r.qn.m).collect();
    for &m in &channels {
        let qn = QuantumNumbers::new(controls.n_cap + 1, m);
        if radial_allowed(params, qn, controls.policy)? {
            out.push(eval_energy(params, qn));
        }
    }
    let (lo, hi) = match controls.window {
        MWindow::Range { min, max } => (min, max),
        MWindow::Auto => match (channels.first(), channels.last()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => return Ok(out),
        },
    };
    for m in [lo.saturating_sub(1), hi.saturating_add(1)] {
        let qn = QuantumNumbers::new(0, m);
        if radial_allowed(params, qn, controls.policy)? {
            out.push(eval_energy(params, qn));
        }
    }
    Ok(out)
}

fn solve_mu(energies: &[f64], electrons: usize, temperature: f64) -> Result<f64> {
    let target = electrons as f64;
    let filling = |mu: f64| energies.iter().map(|&e| fermi_occupation(e, mu, temperature)).sum::<f64>();
    let lowest = energies[0];
    let highest = energies[energies.len() - 1];
    let (mut lo, mut hi) = (lowest - 50.0 * temperature, highest + 50.0 * temperature);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if filling(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    let residual = (filling(mu) - target).abs();
    if residual >= FILLING_TOLERANCE * target.max(1.0) {
        return Err(Error::NonFinite {
            context: "solving the particle-number condition",
        });
    }
    Ok(mu)
}

fn finite_t(
    params: &ModelParams,
    spec: &EnsembleSpec,
    controls: &Enumeration,
) -> Result<(f64, Vec<StateRecord>)> {
    if spec.temperature.is_nan() || spec.temperature <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "temperature",
            reason: "a chemical potential needs T > 0".into(),
        });
    }
    let rows = table_for(params, spec, controls)?;
    if rows.len() <= spec.electrons {
        return Err(Error::InsufficientStates {
            required: spec.electrons + 1,
            available: rows.len(),
        });
    }
    let energies: Vec<f64> = rows.iter().map(|r| r.energy).collect();
    let mu = solve_mu(&energies, spec.electrons, spec.temperature)?;
    let effective = Enumeration {
        max_states: controls.max_states.max(spec.electrons + 1),
        ..*controls
    };
    let tail = excluded_candidates(params, &rows, &effective)?
        .into_iter()
        .map(|e| fermi_occupation(e, mu, spec.temperature))
        .fold(0.0, f64::max);
    if tail >= TAIL_TOLERANCE {
        return Err(Error::WindowTooSmall {
            tail,
            hint: "widen the m window, raise --n-cap or --max-states".into(),
        });
    }
    Ok((mu, rows))
}

/// Chemical potential fixing the mean particle number at N.
pub fn chemical_potential(params: &ModelParams, spec: &EnsembleSpec, controls: &Enumeration) -> Result<f64> {
    finite_t(params, spec, controls).map(|(mu, _)| mu)
}

/// Fermi-weighted totals; T = 0 delegates to [`fill_t0`].
pub fn total_magnetization(
    params: &ModelParams,
    spec: &EnsembleSpec,
    controls: &Enumeration,
) -> Result<EnsembleResult> {
    if spec.temperature == 0.0 {
        return fill_t0(params, spec, controls);
    }
    let (mu, rows) = finite_t(params, spec, controls)?;
    let n = spec.electrons;
    let open_shell = ties(rows[n - 1].energy, rows[n].energy);
    let states = rows
        .iter()
        .map(|r| weighted(params, *r, fermi_occupation(r.energy, mu, spec.temperature)))
        .collect::<Result<Vec<_>>>()?;
    let (total_moment, total_current) = totals(&states);
    Ok(EnsembleResult {
        spec: *spec,
        states,
        chemical_potential: Some(mu),
        total_moment,
        total_current,
        open_shell,
    })
}
