//! Closed-form eigenvalues, the radial-index bound, and state enumeration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{derive_state_quantities, ModelParams, QuantumNumbers};
use crate::observables::{state_current, state_moment};
use crate::wavefunction;

/// Energy of state (n, m) from the closed form, without enforcing the n-bound.
///
/// E = (ħ²/2μa²)[(n+½)² + (n+½)M + ½(m+ν)²] + ħω_m(n+½+M/2) + c_ω·ħω_c(m+ν) − μω₀²ρ₀²/4,
/// with c_ω taken from the parameter convention. On the flat plane the curvature
/// prefactor is zero.
pub fn eval_energy(params: &ModelParams, qn: QuantumNumbers) -> f64 {
    let d = derive_state_quantities(params, qn);
    let radial = f64::from(qn.n) + 0.5;
    let curvature = params.geometry().curvature();
    curvature * (radial * radial + radial * d.big_m + 0.5 * d.shifted_m * d.shifted_m)
        + d.omega_m * (radial + 0.5 * d.big_m)
        + params.convention().coefficient() * d.omega_c * d.shifted_m
        - 0.25 * d.omega0 * d.omega0 * d.rho0 * d.rho0
}

/// Flat-plane Tan–Inkson energies written directly in terms of λ₁, λ₂.
///
/// E = ħω_f(n+½+M/2) + c_ω·ħω_c(m+ν) − 2√(λ₁λ₂), ω_f = √(ω_c² + 8λ₁/μ),
/// M = √((m+ν)² + 2μλ₂/ħ²).
pub fn eval_energy_flat(params: &ModelParams, qn: QuantumNumbers) -> Result<f64> {
    if !params.geometry().is_flat() {
        return Err(Error::RequiresFlat);
    }
    let c = params.confinement();
    let f = params.fields();
    let shifted_m = f64::from(qn.m) + f.nu;
    let big_m = (shifted_m * shifted_m + 2.0 * c.lambda2).sqrt();
    let omega_f = (f.omega_c() * f.omega_c() + 8.0 * c.lambda1).sqrt();
    Ok(omega_f * (f64::from(qn.n) + 0.5 + 0.5 * big_m)
        + params.convention().coefficient() * f.omega_c() * shifted_m
        - 2.0 * (c.lambda1 * c.lambda2).sqrt())
}

/// Landau levels on the sphere: no confinement, no flux.
pub fn landau_sphere_energy(radius: f64, b: f64, qn: QuantumNumbers) -> Result<f64> {
    let params = ModelParams::builder().radius(radius).field(b).build()?;
    Ok(eval_energy(&params, qn))
}

/// Upper bound 0 ≤ n < μω_m a²/ħ − M/2 − ½ on the radial index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialBound {
    pub n_sup: f64,
    /// Largest allowed n; `None` when no state of this m is allowed.
    pub n_max: Option<u32>,
}

impl RadialBound {
    pub fn allows(&self, n: u32) -> bool {
        self.n_max.is_some_and(|max| n <= max)
    }

    pub fn count(&self) -> u64 {
        self.n_max.map_or(0, |max| u64::from(max) + 1)
    }
}

pub fn radial_bound(params: &ModelParams, m: i32) -> Result<RadialBound> {
    let a = params.geometry().radius().ok_or(Error::RequiresSphere)?;
    let d = derive_state_quantities(params, QuantumNumbers::new(0, m));
    let n_sup = d.omega_m * a * a - 0.5 * d.big_m - 0.5;
    // strict inequality: an integer n_sup is itself excluded
    let top = n_sup.ceil() - 1.0;
    let n_max = (top >= 0.0).then(|| top.min(f64::from(u32::MAX)) as u32);
    Ok(RadialBound { n_sup, n_max })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundPolicy {
    /// Only radial indices within the closed-form bound.
    #[default]
    Paper,
    /// Any index up to the cap whose profile is normalizable.
    Relaxed,
}

impl std::str::FromStr for BoundPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "paper" => Ok(BoundPolicy::Paper),
            "relaxed" => Ok(BoundPolicy::Relaxed),
            other => Err(format!("unknown bound policy `{other}` (expected paper|relaxed)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MWindow {
    /// Inclusive range of angular momenta.
    Range { min: i32, max: i32 },
    /// Symmetric window around m = −round(ν), widened until every state
    /// outside it lies above the highest retained energy.
    Auto,
}

/// How the (n, m) lattice is truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enumeration {
    pub window: MWindow,
    pub policy: BoundPolicy,
    /// Largest radial index considered.
    pub n_cap: u32,
    pub max_states: usize,
}

impl Default for Enumeration {
    fn default() -> Self {
        Self {
            window: MWindow::Auto,
            policy: BoundPolicy::Paper,
            n_cap: 50,
            max_states: 200,
        }
    }
}

/// Largest half-width the automatic window will grow to.
pub const AUTO_WINDOW_LIMIT: i32 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StateFlags {
    /// M = 0: effective radius and closed-form current undefined.
    pub m_zero: bool,
    /// Energy coincides with a neighbour within 1e-12 relative.
    pub tie: bool,
    /// Outside the closed-form radial bound (only under the relaxed policy).
    pub beyond_bound: bool,
}

impl StateFlags {
    pub fn labels(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.m_zero {
            out.push("M0");
        }
        if self.tie {
            out.push("tie");
        }
        if self.beyond_bound {
            out.push("beyond_bound");
        }
        out
    }
}

/// One state with its observables, in natural units (moment in μ_B*).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub qn: QuantumNumbers,
    pub energy: f64,
    pub moment: f64,
    pub current: Option<f64>,
    pub rho_m: Option<f64>,
    pub big_m: f64,
    pub omega_m: f64,
    pub flags: StateFlags,
}

/// Builds the full record of one state. Fails only when ω_m = 0.
pub fn state_record(params: &ModelParams, qn: QuantumNumbers) -> Result<StateRecord> {
    let d = derive_state_quantities(params, qn);
    let moment = state_moment(params, qn)?;
    let current = match state_current(params, qn) {
        Ok(i) => Some(i),
        Err(Error::UndefinedEffectiveRadius { .. }) => None,
        Err(e) => return Err(e),
    };
    let beyond_bound = match params.geometry().radius() {
        Some(_) => !radial_bound(params, qn.m)?.allows(qn.n),
        None => false,
    };
    Ok(StateRecord {
        qn,
        energy: eval_energy(params, qn),
        moment,
        current,
        rho_m: d.rho_m.filter(|&r| r > 0.0),
        big_m: d.big_m,
        omega_m: d.omega_m,
        flags: StateFlags {
            m_zero: d.big_m == 0.0,
            tie: false,
            beyond_bound,
        },
    })
}

/// States sorted ascending by (energy, m, n).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub params: ModelParams,
    pub rows: Vec<StateRecord>,
}

impl SpectrumTable {
    /// True when no bound state survived the policy.
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.energy).collect()
    }
}

pub(crate) fn order(a: &StateRecord, b: &StateRecord) -> std::cmp::Ordering {
    a.energy
        .total_cmp(&b.energy)
        .then(a.qn.m.cmp(&b.qn.m))
        .then(a.qn.n.cmp(&b.qn.n))
}

fn allowed_radial_indices(params: &ModelParams, m: i32, controls: &Enumeration) -> Result<Vec<u32>> {
    let bound_max = match params.geometry().radius() {
        Some(_) => radial_bound(params, m)?.n_max,
        None => Some(u32::MAX),
    };
    Ok((0..=controls.n_cap)
        .filter(|&n| match controls.policy {
            BoundPolicy::Paper => bound_max.is_some_and(|max| n <= max),
            BoundPolicy::Relaxed => wavefunction::is_normalizable(params, QuantumNumbers::new(n, m)),
        })
        .collect())
}

fn channel(params: &ModelParams, m: i32, controls: &Enumeration, out: &mut Vec<StateRecord>) -> Result<()> {
    for n in allowed_radial_indices(params, m, controls)? {
        match state_record(params, QuantumNumbers::new(n, m)) {
            Ok(rec) => out.push(rec),
            // ω_m = 0 only at a fine-tuned field; such a channel carries no profile.
            Err(Error::DegenerateFrequency { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

fn finish(params: &ModelParams, mut rows: Vec<StateRecord>, max_states: usize) -> SpectrumTable {
    rows.sort_by(order);
    rows.truncate(max_states);
    for i in 1..rows.len() {
        let (a, b) = (rows[i - 1].energy, rows[i].energy);
        if (a - b).abs() <= 1e-12 * a.abs().max(b.abs()) {
            rows[i - 1].flags.tie = true;
            rows[i].flags.tie = true;
        }
    }
    SpectrumTable { params: *params, rows }
}

/// Enumerates allowed states, sorted and truncated to `max_states`.
pub fn enumerate_states(params: &ModelParams, controls: &Enumeration) -> Result<SpectrumTable> {
    match controls.window {
        MWindow::Range { min, max } => {
            if min > max {
                return Err(Error::InvalidParameter {
                    name: "m-window",
                    reason: format!("empty window [{min}, {max}]"),
                });
            }
            let mut rows = Vec::new();
            for m in min..=max {
                channel(params, m, controls, &mut rows)?;
            }
            Ok(finish(params, rows, controls.max_states))
        }
        MWindow::Auto => enumerate_auto(params, controls),
    }
}

/// Lowest conceivable energy in channel m (E grows with n).
fn channel_floor(params: &ModelParams, m: i32) -> f64 {
    eval_energy(params, QuantumNumbers::new(0, m))
}

fn enumerate_auto(params: &ModelParams, controls: &Enumeration) -> Result<SpectrumTable> {
    let centre = -(params.fields().nu.round() as i32);
    let mut rows = Vec::new();
    channel(params, centre, controls, &mut rows)?;
    let (mut lo, mut hi) = (centre, centre);
    let mut half_width = 4;
    loop {
        while hi < centre + half_width {
            hi += 1;
            channel(params, hi, controls, &mut rows)?;
        }
        while lo > centre - half_width {
            lo -= 1;
            channel(params, lo, controls, &mut rows)?;
        }
        rows.sort_by(order);
        if rows.len() >= controls.max_states {
            let highest = rows[controls.max_states - 1].energy;
            let rising = channel_floor(params, hi + 1) > channel_floor(params, hi)
                && channel_floor(params, lo - 1) > channel_floor(params, lo);
            if rising && channel_floor(params, hi + 1).min(channel_floor(params, lo - 1)) > highest {
                return Ok(finish(params, rows, controls.max_states));
            }
        }
        if half_width >= AUTO_WINDOW_LIMIT {
            if rows.len() < controls.max_states {
                // the lattice itself holds fewer states than requested
                return Ok(finish(params, rows, controls.max_states));
            }
            return Err(Error::WindowDidNotConverge {
                limit: AUTO_WINDOW_LIMIT,
            });
        }
        half_width = (half_width * 2).min(AUTO_WINDOW_LIMIT);
    }
}
