use proptest::prelude::*;

use qring::model::{derive_state_quantities, Convention, ModelParams, EFFECTIVE_MAGNETON, FLUX_QUANTUM};
use qring::observables::{moment_from_current, state_current, state_moment};
use qring::oracle::{diff_energy, DiffVariable};
use qring::spectrum::{eval_energy, eval_energy_flat, radial_bound};
use qring::QuantumNumbers;

fn ring(a: f64, l1: f64, l2: f64, b: f64, nu: f64) -> ModelParams {
    ModelParams::builder()
        .radius(a)
        .confinement(l1, l2)
        .field(b)
        .flux(nu)
        .build()
        .unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn ring_strategy() -> impl Strategy<Value = ModelParams> {
    (1.0f64..20.0, 0.1f64..3.0, 0.1f64..3.0, -3.0f64..3.0, -64i32..64)
        .prop_map(|(a, l1, l2, b, nu)| ring(a, l1, l2, b, f64::from(nu) / 64.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn integer_flux_shift_relabels_m(p in ring_strategy(), n in 0u32..4, m in -6i32..6, k in -3i32..4) {
        let f = p.fields();
        let shifted = p.to_builder().flux(f.nu + f64::from(k)).build().unwrap();
        let q = QuantumNumbers::new(n, m);
        let qk = QuantumNumbers::new(n, m + k);
        prop_assert_eq!(eval_energy(&shifted, q), eval_energy(&p, qk));
        prop_assert_eq!(state_moment(&shifted, q).unwrap(), state_moment(&p, qk).unwrap());
        prop_assert_eq!(state_current(&shifted, q).unwrap(), state_current(&p, qk).unwrap());
    }

    #[test]
    fn field_reversal_antisymmetry(p in ring_strategy(), n in 0u32..4, m in -6i32..6) {
        let f = p.fields();
        let mirror = p.to_builder().field(-f.b).flux(-f.nu).build().unwrap();
        let q = QuantumNumbers::new(n, m);
        let qm = QuantumNumbers::new(n, -m);
        prop_assert_eq!(eval_energy(&mirror, qm), eval_energy(&p, q));
        prop_assert_eq!(state_moment(&mirror, qm).unwrap(), -state_moment(&p, q).unwrap());
        prop_assert_eq!(state_current(&mirror, qm).unwrap(), -state_current(&p, q).unwrap());
    }

    #[test]
    fn energy_increases_with_n(p in ring_strategy(), m in -6i32..6) {
        let bound = radial_bound(&p, m).unwrap();
        let top = bound.n_max.unwrap_or(0).min(10);
        for n in 0..top {
            let lo = eval_energy(&p, QuantumNumbers::new(n, m));
            let hi = eval_energy(&p, QuantumNumbers::new(n + 1, m));
            prop_assert!(hi > lo, "n = {n}: {lo} !< {hi}");
        }
    }

    #[test]
    fn moment_current_inverse(p in ring_strategy(), n in 0u32..5, m in -6i32..6) {
        let q = QuantumNumbers::new(n, m);
        let i = state_current(&p, q).unwrap();
        let back = moment_from_current(&p, q, i).unwrap();
        let direct = state_moment(&p, q).unwrap();
        prop_assert!(rel(back, direct) < 1e-12, "{back} vs {direct}");
    }

    #[test]
    fn derived_quantity_identities(p in ring_strategy(), m in -6i32..6) {
        let d = derive_state_quantities(&p, QuantumNumbers::new(0, m));
        let c = p.confinement();
        let a = p.geometry().radius().unwrap();
        let eff = c.lambda1 + c.lambda2 / (2.0 * a).powi(4);
        prop_assert!(rel(d.omega0 * d.omega0, 8.0 * eff) < 1e-13);
        prop_assert!(rel(d.rho0.powi(4) * eff, c.lambda2) < 1e-13);
        let coupling = 0.5 * d.omega0 * d.rho0 * d.rho0;
        prop_assert!(rel(d.big_m * d.big_m, d.shifted_m.powi(2) + coupling * coupling) < 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moment_is_field_derivative(p in ring_strategy(), n in 0u32..4, m in -5i32..5) {
        let q = QuantumNumbers::new(n, m);
        prop_assume!(derive_state_quantities(&p, q).big_m > 1e-3);
        let e = |p: &ModelParams, q: QuantumNumbers| Ok(eval_energy(p, q));
        let d = diff_energy(e, DiffVariable::B, &p, q).unwrap();
        let numeric = -d.value / EFFECTIVE_MAGNETON;
        prop_assert!(rel(numeric, state_moment(&p, q).unwrap()) < 1e-6);
    }

    #[test]
    fn current_is_flux_derivative(p in ring_strategy(), n in 0u32..4, m in -5i32..5) {
        let q = QuantumNumbers::new(n, m);
        prop_assume!(derive_state_quantities(&p, q).big_m > 1e-3);
        let e = |p: &ModelParams, q: QuantumNumbers| Ok(eval_energy(p, q));
        let d = diff_energy(e, DiffVariable::Flux, &p, q).unwrap();
        prop_assert!(rel(-d.value, state_current(&p, q).unwrap()) < 1e-6);
    }

    #[test]
    fn full_convention_moment_offset(p in ring_strategy(), n in 0u32..4, m in -5i32..5) {
        // the half-convention closed form against −∂E_full/∂B
        let q = QuantumNumbers::new(n, m);
        prop_assume!(derive_state_quantities(&p, q).big_m > 1e-3);
        let full = p.with_convention(Convention::Full);
        let e = |p: &ModelParams, q: QuantumNumbers| Ok(eval_energy(p, q));
        let numeric = -diff_energy(e, DiffVariable::B, &full, q).unwrap().value / EFFECTIVE_MAGNETON;
        let half = state_moment(&p, q).unwrap();
        let s = derive_state_quantities(&p, q).shifted_m;
        let offset = half - numeric;
        prop_assert!((offset - s).abs() < 1e-6 * (1.0 + half.abs()), "{offset} vs {s}");
    }
}

#[test]
fn flux_derivative_is_per_flux_quantum() {
    let p = ring(5.0, 1.0, 1.0, 0.7, 0.2);
    let q = QuantumNumbers::new(1, 2);
    let e = |p: &ModelParams, q: QuantumNumbers| Ok(eval_energy(p, q));
    let per_phi = diff_energy(e, DiffVariable::Flux, &p, q).unwrap().value;
    let h = 1e-5;
    let up = eval_energy(&p.to_builder().flux(0.2 + h).build().unwrap(), q);
    let down = eval_energy(&p.to_builder().flux(0.2 - h).build().unwrap(), q);
    let per_nu = (up - down) / (2.0 * h);
    assert!(rel(per_nu, per_phi * FLUX_QUANTUM) < 1e-7);
}

/// Planar ring levels written out directly.
fn planar(l1: f64, l2: f64, b: f64, nu: f64, q: QuantumNumbers) -> f64 {
    let omega0 = (8.0 * l1).sqrt();
    let omega = b.hypot(omega0);
    let s = f64::from(q.m) + nu;
    let big_m = (s * s + 2.0 * l2).sqrt();
    omega * (f64::from(q.n) + 0.5 + 0.5 * big_m) + 0.5 * b * s - 2.0 * (l1 * l2).sqrt()
}

#[test]
fn planar_formula_matches_independent_expression() {
    let flat = ModelParams::builder().flat().confinement(0.8, 1.7).field(0.6).flux(0.35).build().unwrap();
    for n in 0..4 {
        for m in -4..5 {
            let q = QuantumNumbers::new(n, m);
            let lib = eval_energy_flat(&flat, q).unwrap();
            assert!(rel(lib, planar(0.8, 1.7, 0.6, 0.35, q)) < 1e-13);
        }
    }
}

#[test]
fn large_radius_approaches_plane_quadratically() {
    let (l1, l2, b, nu): (f64, f64, f64, f64) = (1.0, 1.0, 0.5, 0.25);
    let rho0 = (l2 / l1).sqrt().sqrt();
    let states: Vec<QuantumNumbers> = (0..4).flat_map(|n| (-2..3).map(move |m| QuantumNumbers::new(n, m))).collect();
    let worst = |a: f64| {
        let p = ring(a, l1, l2, b, nu);
        states
            .iter()
            .map(|&q| rel(eval_energy(&p, q), planar(l1, l2, b, nu, q)))
            .fold(0.0, f64::max)
    };
    assert!(worst(1e6 * rho0) < 1e-6);
    let ratio = worst(1e3 * rho0) / worst(2e3 * rho0);
    assert!((3.2..=4.8).contains(&ratio), "{ratio}");
}
