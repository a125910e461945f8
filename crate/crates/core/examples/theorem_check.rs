// Both sides of the coincidence identity at a small budget, with the
// per-node factors of the arc-sine integral.

use tanaka_splitting::theorem::{verify_theorem, LhsParams, RhsParams};
use tanaka_splitting::{Result, SeedStream, TimeSet};

pub fn run_example() -> Result<()> {
    let a: TimeSet = "1/4..1/2".parse()?;
    let lhs = LhsParams {
        n_grid: 2048,
        n_samples: 20_000,
    };
    let rhs = RhsParams {
        n_nodes: 8,
        n_samples: 5_000,
        n_grid: 1024,
        ..RhsParams::default()
    };
    let (report, nodes) = verify_theorem(&a, 0.5, &lhs, &rhs, SeedStream::new(4))?;
    for r in &nodes {
        println!(
            "t = {:.4}: before {:.4}, after {:.4}, product {:.4}",
            r.t,
            r.left.mean,
            r.right.mean,
            r.value()
        );
    }
    println!("lhs {:.4} +- {:.4}", report.lhs.mean, report.lhs.stderr);
    println!("rhs {:.4} +- {:.4}", report.rhs.mean, report.rhs.stderr);
    println!(
        "discrepancy {:+.4} ({} combined stderr)",
        report.discrepancy,
        if report.pass { "within 4" } else { "beyond 4" }
    );
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
