use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tanaka_splitting::mc::{
    discrete_phi_with_pattern, exact_discrete_phi, walk_survival_corr, CorrelationPattern,
};
use tanaka_splitting::walsh::*;
use tanaka_splitting::SeedStream;

fn eps(mask: u64, k: usize) -> f64 {
    if mask >> k & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

fn naive_coefficients(values: &[f64], n: usize) -> Vec<f64> {
    let size = 1u64 << n;
    (0..size)
        .map(|subset| {
            let sum: f64 = (0..size)
                .map(|m| {
                    let chi: f64 = (0..n)
                        .filter(|k| subset >> k & 1 == 1)
                        .map(|k| eps(m, k))
                        .product();
                    values[m as usize] * chi
                })
                .sum();
            sum / size as f64
        })
        .collect()
}

// Sum over all pairs of paths weighted by the coupling law.
fn naive_correlation(values: &[f64], n: usize, rho: &[f64]) -> f64 {
    let size = 1u64 << n;
    let mut total = 0.0;
    for m in 0..size {
        for mp in 0..size {
            let weight: f64 = (0..n)
                .map(|k| {
                    let same = (m >> k & 1) == (mp >> k & 1);
                    if same {
                        (1.0 + rho[k]) / 4.0
                    } else {
                        (1.0 - rho[k]) / 4.0
                    }
                })
                .product();
            total += weight * values[m as usize] * values[mp as usize];
        }
    }
    total
}

#[test]
fn two_step_sign_spectrum() {
    let table = sgn_functional_table(2).unwrap();
    assert_eq!(table.values(), &[1.0, -1.0, 1.0, 1.0]);
    let s = walsh_transform(&table);
    assert_eq!(s.coefficients(), &[0.5, 0.5, -0.5, 0.5]);
    let rho = RhoVector::uniform(2, 0.5).unwrap();
    assert!((noise_functional(&s, &rho).unwrap() - 9.0 / 16.0).abs() < 1e-15);
    assert!((exact_correlation(&table, &rho).unwrap() - 9.0 / 16.0).abs() < 1e-15);
}

#[test]
fn transform_matches_direct_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=7 {
        let values: Vec<f64> = (0..1 << n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let table = FunctionTable::new(n, values.clone()).unwrap();
        let fast = walsh_transform(&table);
        for (a, b) in fast
            .coefficients()
            .iter()
            .zip(naive_coefficients(&values, n))
        {
            assert!((a - b).abs() < 1e-12);
        }
        let back = inverse_walsh(&fast);
        for (a, b) in back.values().iter().zip(&values) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn noise_functional_matches_pair_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in 1..=6 {
        let values: Vec<f64> = (0..1 << n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let rho: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let table = FunctionTable::new(n, values.clone()).unwrap();
        let rv = RhoVector::new(rho.clone()).unwrap();
        let direct = naive_correlation(&values, n, &rho);
        assert!((noise_functional(&walsh_transform(&table), &rv).unwrap() - direct).abs() < 1e-12);
        assert!((exact_correlation(&table, &rv).unwrap() - direct).abs() < 1e-12);
    }
}

#[test]
fn random_tables_satisfy_parseval_and_the_noise_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let n = rng.random_range(1..=12);
        let values: Vec<f64> = (0..1 << n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let table = FunctionTable::new(n, values).unwrap();
        let s = walsh_transform(&table);
        assert!((s.total_mass() - table.norm_sq()).abs() < 1e-12);
        let rho = RhoVector::new((0..n).map(|_| rng.random_range(0.0..=1.0)).collect()).unwrap();
        let a = noise_functional(&s, &rho).unwrap();
        let b = exact_correlation(&table, &rho).unwrap();
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn sign_tables_have_unit_mass() {
    for n in 1..=20 {
        let s = walsh_transform(&sgn_functional_table(n).unwrap());
        assert!((s.total_mass() - 1.0).abs() < 1e-12);
        let m = spectral_measure(&s).unwrap();
        let sizes = m.size_distribution();
        assert_eq!(sizes.len(), n + 1);
        assert!((sizes.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn unnormalized_spectrum_has_no_measure() {
    let t = walk_survival_table(6, 1).unwrap();
    assert!(spectral_measure(&walsh_transform(&t)).is_err());
}

#[test]
fn table_size_is_capped() {
    assert!(sgn_functional_table(MAX_COORDINATES + 1).is_err());
}

#[test]
fn walk_survival_simulation_matches_walsh() {
    let mut entries = vec![1.0; 12];
    for r in &mut entries[4..9] {
        *r = 0.4;
    }
    let pattern = CorrelationPattern::from_entries(entries).unwrap();
    let table = walk_survival_table(12, 2).unwrap();
    let exact = noise_functional(&walsh_transform(&table), &pattern.to_rho_vector()).unwrap();
    let mc = walk_survival_corr(2, &pattern, 200_000, SeedStream::new(5)).unwrap();
    assert!(mc.within(exact, 4.0), "{mc:?} vs {exact}");
}

#[test]
fn discrete_phi_simulation_matches_walsh() {
    let pattern = CorrelationPattern::uniform(16, 0.6).unwrap();
    let exact = exact_discrete_phi(&pattern).unwrap();
    let mc = discrete_phi_with_pattern(&pattern, 200_000, SeedStream::new(6)).unwrap();
    assert!(mc.within(exact, 4.0), "{mc:?} vs {exact}");
}
