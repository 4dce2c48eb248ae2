use qring::model::{ModelParams, QuantumNumbers};
use qring::wavefunction::{normalize, overlap, radial_profile, truncation_coefficient};

fn ring() -> ModelParams {
    ModelParams::builder()
        .radius(3.0)
        .confinement(0.5, 0.8)
        .field(0.7)
        .flux(0.2)
        .build()
        .unwrap()
}

fn sign_changes(values: &[f64]) -> usize {
    let signs: Vec<f64> = values.iter().filter(|v| v.abs() > 0.0).map(|v| v.signum()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

#[test]
fn node_count_equals_radial_index() {
    let p = ring();
    for m in [-2, 0, 3] {
        for n in 0..5 {
            let prof = radial_profile(&p, QuantumNumbers::new(n, m)).unwrap();
            let xs: Vec<f64> = (1..4000).map(|i| f64::from(i) / 4000.0).collect();
            let vals: Vec<f64> = xs.iter().map(|&x| prof.value(x)).collect();
            assert_eq!(sign_changes(&vals), n as usize, "n = {n}, m = {m}");
        }
    }
}

#[test]
fn gram_matrix_is_identity() {
    let p = ring();
    for m in [-1, 0, 2] {
        for i in 0..5 {
            for j in 0..5 {
                let o = overlap(&p, QuantumNumbers::new(i, m), QuantumNumbers::new(j, m)).unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((o - expect).abs() < 1e-8, "m = {m} ({i},{j}): {o}");
            }
        }
    }
}

#[test]
fn free_sphere_normalization() {
    let p = ModelParams::builder().radius(1.0).build().unwrap();
    let prof = radial_profile(&p, QuantumNumbers::new(0, 1)).unwrap();
    let c = normalize(&prof, p.geometry()).unwrap();
    assert!((c - 3f64.sqrt()).abs() < 1e-9 * 3f64.sqrt());
}

#[test]
fn series_terminates() {
    for n in 0..20 {
        assert_eq!(truncation_coefficient(n, f64::from(n) + 4.2, 3.1).unwrap(), 0.0);
    }
}
