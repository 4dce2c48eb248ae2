//! Integrals over x ∈ (0, 1) of integrands known through their logarithm.
//!
//! The substitution x = 1/(1 + e^{−u}) sends both endpoints to infinity; the
//! power-law endpoint behaviour x^p (1−x)^q turns into exponential decay in u,
//! so composite Gauss–Legendre panels with adaptive bisection converge
//! geometrically whatever the endpoint exponents are.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

const PANEL_ORDER: usize = 20;
const SCAN_STEP: f64 = 0.05;
/// log-magnitude below the peak beyond which the integrand is dropped
const CUTOFF: f64 = 70.0;
const MAX_DEPTH: u32 = 16;

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(PANEL_ORDER).unwrap()))
}

/// ln x and ln(1 − x) for x = 1/(1 + e^{−u}).
pub(crate) fn logit_logs(u: f64) -> (f64, f64) {
    (-softplus(-u), -softplus(u))
}

fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// Integrand value in log form: (ln|g|, sign of g).
pub(crate) type LogTerm = (f64, f64);

/// ∫₀¹ g(x) dx where `log_integrand(ln x, ln(1−x), x, 1−x)` returns (ln|g|, sign).
///
/// Returns the integral as `scale · value` with `scale` = e^{ln_scale} to stay
/// representable for sharply concentrated profiles.
pub(crate) struct ScaledIntegral {
    pub ln_scale: f64,
    pub value: f64,
}

pub(crate) fn integrate_unit_interval<F>(log_integrand: F, rel_tol: f64) -> Result<ScaledIntegral>
where
    F: Fn(f64, f64, f64, f64) -> LogTerm,
{
    // integrand in u carries the Jacobian dx/du = x(1 − x)
    let in_u = |u: f64| -> LogTerm {
        let (lx, lxc) = logit_logs(u);
        let (lg, sign) = log_integrand(lx, lxc, lx.exp(), lxc.exp());
        (lg + lx + lxc, sign)
    };

    let mut half_width = 80.0;
    let (peak, lo, hi) = loop {
        let steps = (2.0 * half_width / SCAN_STEP) as usize;
        let samples: Vec<(f64, f64)> = (0..=steps)
            .map(|i| {
                let u = -half_width + i as f64 * SCAN_STEP;
                (u, in_u(u).0)
            })
            .collect();
        let peak = samples
            .iter()
            .map(|s| s.1)
            .filter(|v| !v.is_nan())
            .fold(f64::NEG_INFINITY, f64::max);
        if !peak.is_finite() {
            return Err(Error::NonFinite {
                context: "locating the integrand peak",
            });
        }
        let keep: Vec<f64> = samples
            .iter()
            .filter(|s| s.1 > peak - CUTOFF)
            .map(|s| s.0)
            .collect();
        let lo = keep[0] - SCAN_STEP;
        let hi = keep[keep.len() - 1] + SCAN_STEP;
        if lo > -half_width && hi < half_width {
            break (peak, lo, hi);
        }
        if half_width > 5_000.0 {
            return Err(Error::NonFinite {
                context: "bracketing the integrand support",
            });
        }
        half_width *= 4.0;
    };

    let scaled = |u: f64| -> f64 {
        let (lg, sign) = in_u(u);
        if lg == f64::NEG_INFINITY {
            0.0
        } else {
            sign * (lg - peak).exp()
        }
    };
    let abs_scaled = |u: f64| scaled(u).abs();

    let panels = ((hi - lo) / 0.5).ceil().max(1.0) as usize;
    let width = (hi - lo) / panels as f64;
    let magnitude: f64 = (0..panels)
        .map(|i| {
            let a = lo + i as f64 * width;
            rule().integrate(a, a + width, abs_scaled)
        })
        .sum();
    let tol = rel_tol * magnitude;
    // exp(lg − peak) carries a relative error of about ε·|lg|
    let noise = 16.0 * f64::EPSILON * (peak.abs() + CUTOFF);
    let mut total = 0.0;
    for i in 0..panels {
        let a = lo + i as f64 * width;
        let whole = rule().integrate(a, a + width, &scaled);
        total += adaptive(&scaled, a, a + width, whole, tol / panels as f64, noise, 0);
    }
    if !total.is_finite() {
        return Err(Error::NonFinite {
            context: "integrating a radial profile",
        });
    }
    Ok(ScaledIntegral {
        ln_scale: peak,
        value: total,
    })
}

fn adaptive<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, whole: f64, tol: f64, noise: f64, depth: u32) -> f64 {
    let mid = 0.5 * (a + b);
    let left = rule().integrate(a, mid, g);
    let right = rule().integrate(mid, b, g);
    let diff = (left + right - whole).abs();
    // below roundoff further bisection cannot help
    let floor = noise * (left.abs() + right.abs());
    if diff <= tol || diff <= floor || depth >= MAX_DEPTH {
        left + right
    } else {
        adaptive(g, a, mid, left, 0.5 * tol, noise, depth + 1) + adaptive(g, mid, b, right, 0.5 * tol, noise, depth + 1)
    }
}
