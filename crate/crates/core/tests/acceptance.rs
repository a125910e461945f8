use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tanaka_splitting::cli::main_with_args;
use tanaka_splitting::mc::{
    discrete_phi, entrance_survival_mass, exact_discrete_phi, m_lambda_functional, make_pattern,
    CorrelationPattern, PathOptions,
};
use tanaka_splitting::theorem::{
    grid_stability, rhs_integral, verify_theorem, LhsParams, RhsParams, PASS_SIGMAS,
};
use tanaka_splitting::walk::{check_identities, recover_sign_parity, x_to_z, z_to_x};
use tanaka_splitting::walsh::{
    exact_correlation, noise_functional, sgn_functional_table, walsh_transform, FunctionTable,
    RhoVector,
};
use tanaka_splitting::{SeedStream, TimeSet, WalkPath};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

fn discrete_identities() -> Outcome {
    let start = Instant::now();
    let mut bad = 0;
    for mask in 0..1u64 << 12 {
        let x = WalkPath::from_mask(mask, 12);
        if !check_identities(&x) || z_to_x(&x_to_z(&x)) != x || x_to_z(&z_to_x(&x)) != x {
            bad += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        bad == 0 && elapsed < Duration::from_secs(10),
        format!("4096 walks, {bad} failures, {}", secs(elapsed)),
    )
}

fn parity_rule() -> Outcome {
    let mut bad = 0;
    for mask in 0..1u64 << 14 {
        let z = WalkPath::from_mask(mask, 14);
        let x = z_to_x(&z);
        for n in 0..=14 {
            let expected = if 2 * x.positions()[n] + 1 > 0 { 1 } else { -1 };
            if recover_sign_parity(&z, n).unwrap() != expected {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("16384 paths x 15 times, {bad} failures"))
}

fn spectral_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst_noise, mut worst_parseval) = (0.0f64, 0.0f64);
    let mut check = |table: &FunctionTable, rng: &mut ChaCha8Rng| {
        let n = table.n();
        let s = walsh_transform(table);
        worst_parseval = worst_parseval.max((s.total_mass() - table.norm_sq()).abs());
        let rho = RhoVector::new((0..n).map(|_| rng.random_range(0.0..=1.0)).collect()).unwrap();
        let gap = noise_functional(&s, &rho).unwrap() - exact_correlation(table, &rho).unwrap();
        worst_noise = worst_noise.max(gap.abs());
    };
    for _ in 0..100 {
        let n = rng.random_range(1..=12);
        let values = (0..1 << n).map(|_| rng.random_range(-1.0..1.0)).collect();
        check(&FunctionTable::new(n, values).unwrap(), &mut rng);
    }
    for n in 1..=20 {
        check(&sgn_functional_table(n).unwrap(), &mut rng);
    }
    outcome(
        worst_noise <= 1e-10 && worst_parseval <= 1e-12,
        format!("max noise gap {worst_noise:.1e}, max Parseval gap {worst_parseval:.1e}"),
    )
}

fn noise_sensitivity() -> Outcome {
    let start = Instant::now();
    let exact: Vec<f64> = (6..=20)
        .map(|n| exact_discrete_phi(&CorrelationPattern::uniform(n, 0.5).unwrap()).unwrap())
        .collect();
    let decreasing = exact.windows(2).all(|w| w[1] < w[0]);
    let by_parity = exact.windows(3).all(|w| w[2] < w[0]);
    let mc = discrete_phi(&TimeSet::full(), 0.5, 1 << 14, 100_000, SeedStream::new(4)).unwrap();
    let elapsed = start.elapsed();
    outcome(
        decreasing && mc.mean.abs() < 0.05 && elapsed < Duration::from_secs(120),
        format!(
            "exact {:.4} (n=6) .. {:.4} (n=20), strictly decreasing {decreasing}, decreasing within odd and within even n {by_parity}; n=2^14 estimate {:.4} +- {:.4}; {}",
            exact[0],
            exact[exact.len() - 1],
            mc.mean,
            mc.stderr,
            secs(elapsed)
        ),
    )
}

fn entrance_mass() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, t) in [1.0 / 16.0, 0.25].into_iter().enumerate() {
        let e = entrance_survival_mass(t, 1_000_000, SeedStream::new(5).child(i as u64)).unwrap();
        pass &= (e.mean - 1.0).abs() <= 0.01;
        parts.push(format!("t={t}: {:.4} +- {:.4}", e.mean, e.stderr));
    }
    outcome(pass, parts.join(", "))
}

fn start_time_consistency() -> Outcome {
    let a: TimeSet = "1/2..3/4".parse().unwrap();
    let pattern = make_pattern(&a, 0.5, 1024).unwrap();
    let key = SeedStream::new(6);
    let run = |i: u64, t0: f64| {
        m_lambda_functional(
            &pattern,
            Some(t0),
            1_000_000,
            key.child(i),
            PathOptions::default(),
        )
        .unwrap()
    };
    let (early, late) = (run(0, 1.0 / 32.0), run(1, 1.0 / 8.0));
    let sigma = early.stderr.hypot(late.stderr);
    let gap = (early.mean - late.mean).abs();
    outcome(
        gap <= PASS_SIGMAS * sigma,
        format!(
            "t0=1/32: {:.4} +- {:.4}, t0=1/8: {:.4} +- {:.4}, gap {:.2} sigma",
            early.mean,
            early.stderr,
            late.mean,
            late.stderr,
            gap / sigma
        ),
    )
}

fn main_theorem() -> Outcome {
    let start = Instant::now();
    let suite = [
        ("1/4..1/2", 0.3),
        ("1/4..1/2", 0.7),
        ("1/4..1/2,5/8..3/4", 0.5),
    ];
    let lhs = LhsParams {
        n_grid: 1 << 13,
        n_samples: 100_000,
    };
    let rhs = RhsParams::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, (set, rho)) in suite.into_iter().enumerate() {
        let a: TimeSet = set.parse().unwrap();
        let key = SeedStream::new(7).child(i as u64);
        let (report, _) = verify_theorem(&a, rho, &lhs, &rhs, key).unwrap();
        let stable = grid_stability(&a, rho, 1 << 13, 100_000, key.child(2)).unwrap();
        pass &= report.pass && report.combined_stderr <= 0.01 && stable.pass && !report.lhs_flagged;
        parts.push(format!(
            "[A={set} rho={rho}: lhs {:.4} rhs {:.4} gap {:.2} sigma, 2^13 vs 2^14 gap {:.2} sigma]",
            report.lhs.mean,
            report.rhs.mean,
            report.discrepancy.abs() / report.combined_stderr,
            stable.discrepancy.abs() / stable.combined_stderr
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(1800);
    outcome(pass, format!("{} {}", parts.join(" "), secs(elapsed)))
}

fn boundary_cases() -> Outcome {
    let key = SeedStream::new(8);
    let lhs = LhsParams {
        n_grid: 1 << 12,
        n_samples: 10_000,
    };
    let rhs = RhsParams {
        n_samples: 2_000,
        n_grid: 1024,
        ..RhsParams::default()
    };
    let (empty, _) = verify_theorem(&TimeSet::empty(), 0.5, &lhs, &rhs, key).unwrap();
    let full = rhs_integral(&TimeSet::full(), 0.5, &rhs, key).unwrap();
    outcome(
        empty.lhs.mean == 1.0 && empty.rhs.mean == 1.0 && empty.pass && full.estimate.mean == 0.0,
        format!(
            "empty set lhs {} rhs {}, full set rhs {}",
            empty.lhs.mean, empty.rhs.mean, full.estimate.mean
        ),
    )
}

fn reproducibility() -> Outcome {
    let commands: [&[&str]; 6] = [
        &[
            "discrete-phi",
            "--A",
            "1/4..1/2",
            "--rho",
            "0.5",
            "--n",
            "16,256",
            "--samples",
            "20000",
        ],
        &["walsh-spectrum", "--n", "12", "--top", "32"],
        &[
            "mc-phi",
            "--A",
            "1/4..1/2",
            "--rho",
            "0.5",
            "--n-grid",
            "512,1024",
            "--samples",
            "10000",
        ],
        &[
            "theorem-check",
            "--A",
            "1/4..1/2",
            "--rho",
            "0.5",
            "--n-grid",
            "1024",
            "--samples",
            "10000",
            "--n-nodes",
            "8",
            "--node-samples",
            "2000",
            "--rhs-grid",
            "512",
            "--grid-check",
        ],
        &[
            "sensitivity-curve",
            "--rho",
            "0.5",
            "--n-list",
            "8,64,512",
            "--samples",
            "10000",
        ],
        &[
            "consistency-check",
            "--A",
            "1/2..3/4",
            "--rho",
            "0.5",
            "--n-grid",
            "256",
            "--samples",
            "20000",
        ],
    ];
    let mut differing = Vec::new();
    for args in commands {
        let argv: Vec<&str> = std::iter::once("tanaka")
            .chain(args.iter().copied())
            .chain(["--seed", "99"])
            .collect();
        let argv = if args[0] == "walsh-spectrum" {
            &argv[..argv.len() - 2]
        } else {
            &argv[..]
        };
        let outputs: Vec<(i32, Vec<u8>)> = (0..2)
            .map(|_| {
                let (mut out, mut err) = (Vec::new(), Vec::new());
                let code = main_with_args(argv.iter().copied(), &mut out, &mut err);
                (code, out)
            })
            .collect();
        if outputs[0] != outputs[1] || outputs[0].1.is_empty() {
            differing.push(args[0]);
        }
    }
    outcome(
        differing.is_empty(),
        format!("{} subcommands, differing: {differing:?}", commands.len()),
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("discrete identities", discrete_identities),
        ("parity rule", parity_rule),
        ("spectral oracle identity", spectral_identity),
        ("noise sensitivity", noise_sensitivity),
        ("entrance-law mass", entrance_mass),
        ("start-time consistency", start_time_consistency),
        ("main theorem", main_theorem),
        ("boundary cases", boundary_cases),
        ("reproducibility", reproducibility),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = check();
        println!(
            "criterion {} {name}: {} ({})",
            i + 1,
            if result.pass { "PASS" } else { "FAIL" },
            result.detail
        );
        if !result.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
