// Fourier-Walsh expansion of `sgn(X_n)` and its noise functional.

use tanaka_splitting::walsh::{
    exact_correlation, noise_functional, sgn_functional_table, spectral_measure, walsh_transform,
    RhoVector,
};
use tanaka_splitting::Result;

pub fn run_example() -> Result<()> {
    let n = 10;
    let table = sgn_functional_table(n)?;
    let spectrum = walsh_transform(&table);
    println!("total mass {:.12}", spectrum.total_mass());
    for (subset, c, mass) in spectrum.top(5) {
        println!("subset {subset:#012b}: coefficient {c:+.5}, mass {mass:.5}");
    }
    let sizes = spectral_measure(&spectrum)?.size_distribution();
    let mean_size: f64 = sizes.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
    println!("mean chaos order {mean_size:.3}");

    let mut rho = vec![1.0; n];
    for r in &mut rho[2..5] {
        *r = 0.5;
    }
    let rho = RhoVector::new(rho)?;
    let spectral = noise_functional(&spectrum, &rho)?;
    let direct = exact_correlation(&table, &rho)?;
    println!("E[sgn X_n sgn X'_n] = {spectral:.12} (direct {direct:.12})");
    assert!((spectral - direct).abs() < 1e-10);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
