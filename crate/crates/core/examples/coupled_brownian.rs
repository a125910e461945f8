use tanaka_splitting::mc::{argmin_coincidence, gen_coupled_bm, make_pattern};
use tanaka_splitting::{Result, SeedStream, TimeSet};

pub fn run_example() -> Result<()> {
    let a: TimeSet = "1/4..1/2".parse()?;
    let pattern = make_pattern(&a, 0.3, 16)?;
    let path = gen_coupled_bm(&pattern, &mut SeedStream::new(1).rng());
    for (k, (b, bp)) in path.b.iter().zip(&path.b_prime).enumerate() {
        println!(
            "t = {:.4}  B = {b:+.4}  B' = {bp:+.4}  gap = {:+.4}",
            k as f64 * path.dt,
            bp - b
        );
    }

    for rho in [0.0, 0.5, 0.9] {
        let e = argmin_coincidence(&a, rho, 1024, 20_000, SeedStream::new(2))?;
        println!(
            "rho = {rho}: P(same argmin) = {:.4} +- {:.4} (every grid coincidence {:.4}, ties {})",
            e.estimate.mean, e.estimate.stderr, e.raw.mean, e.ties
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
