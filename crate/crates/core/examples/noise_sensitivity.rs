// Perturbing every step by the same amount decorrelates the recovered signs
// as the walk gets longer.

use tanaka_splitting::theorem::sensitivity_curve;
use tanaka_splitting::{Result, SeedStream};

pub fn run_example() -> Result<()> {
    let curve = sensitivity_curve(
        0.5,
        &[4, 8, 12, 16, 64, 256, 1024],
        20_000,
        SeedStream::new(7),
    )?;
    println!(
        "{:>6} {:>10} {:>9} {:>10}",
        "n", "estimate", "stderr", "exact"
    );
    for p in &curve {
        let exact = p
            .exact
            .map(|v| format!("{v:.5}"))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:>6} {:>10.5} {:>9.5} {:>10}",
            p.n, p.estimate.mean, p.estimate.stderr, exact
        );
    }
    let exact: Vec<f64> = curve.iter().filter_map(|p| p.exact).collect();
    assert!(exact.windows(2).all(|w| w[1] < w[0]));
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
