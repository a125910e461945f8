use tanaka_splitting::mc::{discrete_phi, exact_discrete_phi, make_pattern};
use tanaka_splitting::{Result, SeedStream, TimeSet};

pub fn run_example() -> Result<()> {
    let a: TimeSet = "0..1/2".parse()?;
    let key = SeedStream::new(2024);
    let first = discrete_phi(&a, 0.25, 18, 50_000, key)?;
    let again = discrete_phi(&a, 0.25, 18, 50_000, key)?;
    let other = discrete_phi(&a, 0.25, 18, 50_000, key.child(1))?;
    assert_eq!(first, again);
    let exact = exact_discrete_phi(&make_pattern(&a, 0.25, 18)?)?;
    println!(
        "seed {} stream {}: {:.5} +- {:.5}",
        key.seed, key.stream, first.mean, first.stderr
    );
    println!(
        "child stream {}: {:.5} +- {:.5}",
        key.child(1).stream,
        other.mean,
        other.stderr
    );
    println!("exact {exact:.5}");
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
