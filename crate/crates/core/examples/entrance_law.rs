// The excursion entrance law, its total mass, and the start-time invariance
// of the entrance-law survival functional.

use tanaka_splitting::mc::{
    entrance_survival_mass, m_lambda_functional, make_pattern, PathOptions,
};
use tanaka_splitting::{Result, SeedStream, TimeSet};

pub fn run_example() -> Result<()> {
    let key = SeedStream::new(3);
    for t in [1.0 / 16.0, 0.25, 0.75] {
        let m = entrance_survival_mass(t, 100_000, key)?;
        println!("mass seen from t = {t}: {:.4} +- {:.4}", m.mean, m.stderr);
    }
    let a: TimeSet = "1/2..3/4".parse()?;
    let pattern = make_pattern(&a, 0.5, 512)?;
    for t0 in [1.0 / 32.0, 1.0 / 8.0, 0.5] {
        let e = m_lambda_functional(
            &pattern,
            Some(t0),
            100_000,
            key.child(1),
            PathOptions::default(),
        )?;
        println!("start {t0:<8}: {:.4} +- {:.4}", e.mean, e.stderr);
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
