//! Command-line front end used by the `tanaka` binary.
//!
//! Each subcommand runs one estimator or check and writes a JSON record
//! (single results) or CSV (tables) either to `--output` or to stdout. A
//! TOML config can stand in for flags: `tanaka run --config exp.toml`, where
//! the file holds `command = "<subcommand>"` and one key per flag name.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::dyadic::TimeSet;
use crate::error::Error;
use crate::estimate::{EstimateWithError, SeedStream};
use crate::mc::{
    argmin_coincidence, discrete_phi, exact_discrete_phi, m_lambda_functional, make_pattern,
    PathOptions,
};
use crate::theorem::{
    grid_stability, sensitivity_curve, verify_theorem, LhsParams, NodeRecord, RhsParams,
    PASS_SIGMAS,
};
use crate::walsh::{sgn_functional_table, walsh_transform, MAX_COORDINATES};

pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "tanaka",
    version,
    about = "Noise-splitting experiments for the Tanaka equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Correlation of the recovered signs for coupled walks.
    DiscretePhi(DiscretePhiArgs),
    /// Fourier-Walsh coefficients of sgn(X_n), largest mass first.
    WalshSpectrum(WalshArgs),
    /// Probability that coupled Brownian motions share their grid argmin.
    McPhi(McPhiArgs),
    /// Compare the argmin coincidence with the arc-sine integral.
    TheoremCheck(TheoremArgs),
    /// Whole-path sign correlation against walk length.
    SensitivityCurve(CurveArgs),
    /// Start-time invariance of the entrance-law functional.
    ConsistencyCheck(ConsistencyArgs),
    /// Read the subcommand and its flags from a TOML file.
    Run(RunArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Master seed for all random streams.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Result file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiscretePhiArgs {
    /// Perturbed region, e.g. "1/4..1/2,5/8..3/4".
    #[arg(long = "A", visible_alias = "a", default_value = "")]
    pub a: String,
    #[arg(long)]
    pub rho: f64,
    /// Walk length(s); several values give a CSV table.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct WalshArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 16)]
    pub top: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct McPhiArgs {
    #[arg(long = "A", visible_alias = "a", default_value = "")]
    pub a: String,
    #[arg(long)]
    pub rho: f64,
    /// Grid size(s); several values give a CSV table.
    #[arg(long = "n-grid", value_delimiter = ',', default_value = "4096")]
    pub n_grid: Vec<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct TheoremArgs {
    #[arg(long = "A", visible_alias = "a", default_value = "")]
    pub a: String,
    #[arg(long)]
    pub rho: f64,
    /// Grid of the argmin side.
    #[arg(long = "n-grid", default_value_t = 1 << 13)]
    pub n_grid: usize,
    /// Samples on the argmin side.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// Arc-sine nodes per complement component.
    #[arg(long = "n-nodes", default_value_t = 32)]
    pub n_nodes: usize,
    /// Entrance-law samples per factor.
    #[arg(long = "node-samples", default_value_t = 20_000)]
    pub node_samples: u64,
    /// Grid of the factor simulations.
    #[arg(long = "rhs-grid", default_value_t = 4096)]
    pub rhs_grid: usize,
    /// Also compare the argmin side at twice the grid.
    #[arg(long = "grid-check")]
    pub grid_check: bool,
    /// Per-node factor table; defaults to `<output stem>.nodes.csv`.
    #[arg(long = "nodes-csv")]
    pub nodes_csv: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long)]
    pub rho: f64,
    #[arg(long = "n-list", value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ConsistencyArgs {
    #[arg(long = "A", visible_alias = "a")]
    pub a: String,
    #[arg(long)]
    pub rho: f64,
    /// Start times, dyadic fractions or decimals.
    #[arg(long = "t0-list", value_delimiter = ',', default_value = "1/32,1/8")]
    pub t0_list: Vec<String>,
    #[arg(long = "n-grid", default_value_t = 1024)]
    pub n_grid: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// Simulate identical-increment runs step by step.
    #[arg(long = "no-merge")]
    pub no_merge: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
}

/// Error surfaced to the user with its exit status.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Resource(_) => EXIT_RESOURCE,
            _ => EXIT_USAGE,
        };
        CliError {
            code,
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

impl CliError {
    fn io(path: &Path, e: std::io::Error) -> Self {
        CliError {
            code: EXIT_USAGE,
            kind: "io",
            message: format!("{}: {e}", path.display()),
        }
    }

    fn usage(message: String) -> Self {
        CliError {
            code: EXIT_USAGE,
            kind: "usage",
            message,
        }
    }
}

/// A rendered result and where it goes.
#[derive(Debug, Clone, PartialEq)]
pub struct Emission {
    pub path: Option<PathBuf>,
    pub body: String,
}

/// Everything a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub emissions: Vec<Emission>,
    pub exit_code: i32,
}

fn parse_set(text: &str) -> Result<TimeSet, CliError> {
    Ok(text.parse::<TimeSet>()?)
}

fn parse_time(text: &str) -> Result<f64, CliError> {
    if let Ok(d) = text.parse::<crate::dyadic::DyadicRational>() {
        return Ok(d.to_f64());
    }
    text.trim()
        .parse::<f64>()
        .map_err(|_| CliError::usage(format!("cannot parse time {text:?}")))
}

fn record(command: &str, seed: u64, parameters: Value, body: Value) -> Value {
    let mut out = json!({
        "command": command,
        "version": VERSION,
        "seed": seed,
        "parameters": parameters,
    });
    if let (Some(map), Value::Object(extra)) = (out.as_object_mut(), body) {
        map.extend(extra);
    }
    out
}

fn estimate_fields(e: &EstimateWithError) -> Value {
    json!({ "estimate": e.mean, "stderr": e.stderr, "n_samples": e.n_samples })
}

fn json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
    s.push('\n');
    s
}

fn emit(path: Option<PathBuf>, body: String) -> Emission {
    Emission { path, body }
}

pub fn execute(command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::DiscretePhi(args) => discrete_phi_cmd(args),
        Command::WalshSpectrum(args) => walsh_cmd(args),
        Command::McPhi(args) => mc_phi_cmd(args),
        Command::TheoremCheck(args) => theorem_cmd(args),
        Command::SensitivityCurve(args) => curve_cmd(args),
        Command::ConsistencyCheck(args) => consistency_cmd(args),
        Command::Run(args) => {
            let command = load_config(&args.config)?;
            if matches!(command, Command::Run(_)) {
                return Err(CliError::usage("a config file cannot invoke `run`".into()));
            }
            execute(command)
        }
    }
}

fn ok(emissions: Vec<Emission>) -> Result<Outcome, CliError> {
    Ok(Outcome {
        emissions,
        exit_code: 0,
    })
}

fn discrete_phi_cmd(args: DiscretePhiArgs) -> Result<Outcome, CliError> {
    let a = parse_set(&args.a)?;
    let seed = args.common.seed;
    let mut rows = Vec::new();
    for (i, &n) in args.n.iter().enumerate() {
        let key = SeedStream::new(seed).child(i as u64);
        let est = discrete_phi(&a, args.rho, n, args.samples, key)?;
        let exact = if n <= 20 {
            Some(exact_discrete_phi(&make_pattern(&a, args.rho, n)?)?)
        } else {
            None
        };
        rows.push((n, est, exact));
    }
    if let [(n, est, exact)] = rows.as_slice() {
        let params =
            json!({ "A": a.to_string(), "rho": args.rho, "n": n, "samples": args.samples });
        let mut body = estimate_fields(est);
        body["exact"] = json!(exact);
        return ok(vec![emit(
            args.common.output,
            json_text(&record("discrete-phi", seed, params, body)),
        )]);
    }
    let mut csv = String::from("n,estimate,stderr,n_samples,exact\n");
    for (n, est, exact) in rows {
        let exact = exact.map(|v| v.to_string()).unwrap_or_default();
        csv.push_str(&format!(
            "{n},{},{},{},{exact}\n",
            est.mean, est.stderr, est.n_samples
        ));
    }
    ok(vec![emit(args.common.output, csv)])
}

fn walsh_cmd(args: WalshArgs) -> Result<Outcome, CliError> {
    if args.n > MAX_COORDINATES {
        return Err(Error::Resource(format!(
            "n = {} exceeds the cap of {MAX_COORDINATES}",
            args.n
        ))
        .into());
    }
    let spectrum = walsh_transform(&sgn_functional_table(args.n)?);
    let mut csv = String::from("subset-bitmask,coefficient,squared-mass\n");
    for (subset, c, mass) in spectrum.top(args.top) {
        csv.push_str(&format!("{subset},{c},{mass}\n"));
    }
    ok(vec![emit(args.output, csv)])
}

fn mc_phi_cmd(args: McPhiArgs) -> Result<Outcome, CliError> {
    let a = parse_set(&args.a)?;
    let seed = args.common.seed;
    let mut rows = Vec::new();
    for (i, &n_grid) in args.n_grid.iter().enumerate() {
        let key = SeedStream::new(seed).child(i as u64);
        rows.push((
            n_grid,
            argmin_coincidence(&a, args.rho, n_grid, args.samples, key)?,
        ));
    }
    if let [(n_grid, est)] = rows.as_slice() {
        let params = json!({ "A": a.to_string(), "rho": args.rho, "n_grid": n_grid, "samples": args.samples });
        let mut body = estimate_fields(&est.estimate);
        body["raw_estimate"] = json!(est.raw.mean);
        body["raw_stderr"] = json!(est.raw.stderr);
        body["ties"] = json!(est.ties);
        body["flagged"] = json!(est.flagged);
        return ok(vec![emit(
            args.common.output,
            json_text(&record("mc-phi", seed, params, body)),
        )]);
    }
    let mut csv = String::from("n_grid,estimate,stderr,raw_estimate,n_samples,ties\n");
    for (n_grid, est) in rows {
        let e = est.estimate;
        csv.push_str(&format!(
            "{n_grid},{},{},{},{},{}\n",
            e.mean, e.stderr, est.raw.mean, e.n_samples, est.ties
        ));
    }
    ok(vec![emit(args.common.output, csv)])
}

/// Per-node diagnostics table.
pub fn nodes_csv(nodes: &[NodeRecord]) -> String {
    let mut csv = String::from("component,t,weight,left,left_stderr,right,right_stderr,product\n");
    for r in nodes {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.component,
            r.t,
            r.weight,
            r.left.mean,
            r.left.stderr,
            r.right.mean,
            r.right.stderr,
            r.value()
        ));
    }
    csv
}

fn theorem_cmd(args: TheoremArgs) -> Result<Outcome, CliError> {
    let a = parse_set(&args.a)?;
    let seed = args.common.seed;
    let lhs = LhsParams {
        n_grid: args.n_grid,
        n_samples: args.samples,
    };
    let rhs = RhsParams {
        n_nodes: args.n_nodes,
        n_samples: args.node_samples,
        n_grid: args.rhs_grid,
        options: PathOptions::default(),
    };
    let key = SeedStream::new(seed);
    let (report, nodes) = verify_theorem(&a, args.rho, &lhs, &rhs, key)?;
    let stability = if args.grid_check {
        Some(grid_stability(
            &a,
            args.rho,
            args.n_grid,
            args.samples,
            key.child(2),
        )?)
    } else {
        None
    };
    let pass = report.pass && stability.is_none_or(|s| s.pass);
    let params = json!({
        "A": a.to_string(), "rho": args.rho, "n_grid": args.n_grid, "samples": args.samples,
        "n_nodes": args.n_nodes, "node_samples": args.node_samples, "rhs_grid": args.rhs_grid,
        "grid_check": args.grid_check, "pass_sigmas": PASS_SIGMAS,
    });
    let body = json!({ "report": report, "grid_stability": stability, "pass": pass });
    let mut emissions = vec![emit(
        args.common.output.clone(),
        json_text(&record("theorem-check", seed, params, body)),
    )];
    let csv_path = args.nodes_csv.or_else(|| {
        args.common
            .output
            .as_ref()
            .map(|p| p.with_extension("nodes.csv"))
    });
    if let Some(path) = csv_path {
        emissions.push(emit(Some(path), nodes_csv(&nodes)));
    }
    Ok(Outcome {
        emissions,
        exit_code: if pass { 0 } else { EXIT_CHECK_FAILED },
    })
}

fn curve_cmd(args: CurveArgs) -> Result<Outcome, CliError> {
    let curve = sensitivity_curve(
        args.rho,
        &args.n_list,
        args.samples,
        SeedStream::new(args.common.seed),
    )?;
    let mut csv = String::from("n,estimate,stderr,n_samples,exact\n");
    for p in curve {
        let exact = p.exact.map(|v| v.to_string()).unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{exact}\n",
            p.n, p.estimate.mean, p.estimate.stderr, p.estimate.n_samples
        ));
    }
    ok(vec![emit(args.common.output, csv)])
}

fn consistency_cmd(args: ConsistencyArgs) -> Result<Outcome, CliError> {
    let a = parse_set(&args.a)?;
    let seed = args.common.seed;
    let pattern = make_pattern(&a, args.rho, args.n_grid)?;
    let options = PathOptions {
        merge_identical_runs: !args.no_merge,
    };
    let starts = args
        .t0_list
        .iter()
        .map(|s| parse_time(s))
        .collect::<Result<Vec<_>, _>>()?;
    if starts.len() < 2 {
        return Err(CliError::usage(
            "at least two start times are needed".into(),
        ));
    }
    let estimates = starts
        .iter()
        .enumerate()
        .map(|(i, &t0)| {
            let key = SeedStream::new(seed).child(i as u64);
            m_lambda_functional(&pattern, Some(t0), args.samples, key, options)
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for (i, x) in estimates.iter().enumerate() {
        for y in &estimates[i + 1..] {
            let z = (x.mean - y.mean).abs() / x.stderr.hypot(y.stderr).max(f64::MIN_POSITIVE);
            worst = worst.max(z);
        }
    }
    let pass = worst <= PASS_SIGMAS;
    let params = json!({
        "A": a.to_string(), "rho": args.rho, "t0_list": starts, "n_grid": args.n_grid,
        "samples": args.samples, "merge_identical_runs": options.merge_identical_runs,
    });
    let rows: Vec<Value> = starts
        .iter()
        .zip(&estimates)
        .map(|(t0, e)| {
            let mut v = estimate_fields(e);
            v["t0"] = json!(t0);
            v
        })
        .collect();
    let body = json!({ "estimates": rows, "max_z": worst, "pass": pass });
    Ok(Outcome {
        emissions: vec![emit(
            args.common.output,
            json_text(&record("consistency-check", seed, params, body)),
        )],
        exit_code: if pass { 0 } else { EXIT_CHECK_FAILED },
    })
}

/// Translate a TOML config into the equivalent argument vector.
pub fn config_to_args(text: &str) -> Result<Vec<String>, CliError> {
    let table: toml::Table = text
        .parse()
        .map_err(|e| CliError::usage(format!("invalid config: {e}")))?;
    let command = table
        .get("command")
        .and_then(|v| v.as_str())
        .ok_or_else(|| CliError::usage("config needs a string `command` key".into()))?;
    let mut argv = vec!["tanaka".to_string(), command.to_string()];
    for (key, value) in &table {
        if key == "command" {
            continue;
        }
        let flag = format!("--{key}");
        match value {
            toml::Value::Boolean(true) => argv.push(flag),
            toml::Value::Boolean(false) => {}
            toml::Value::String(s) => argv.push(format!("{flag}={s}")),
            toml::Value::Integer(i) => argv.push(format!("{flag}={i}")),
            toml::Value::Float(f) => argv.push(format!("{flag}={f}")),
            toml::Value::Array(items) => {
                let parts: Vec<String> = items
                    .iter()
                    .map(|v| match v {
                        toml::Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                argv.push(format!("{flag}={}", parts.join(",")));
            }
            other => {
                return Err(CliError::usage(format!(
                    "unsupported value for {key}: {other}"
                )))
            }
        }
    }
    Ok(argv)
}

fn load_config(path: &Path) -> Result<Command, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let argv = config_to_args(&text)?;
    Cli::try_parse_from(argv)
        .map(|cli| cli.command)
        .map_err(|e| {
            CliError::usage(
                e.to_string()
                    .lines()
                    .next()
                    .unwrap_or("bad config")
                    .to_string(),
            )
        })
}

fn write_outcome(outcome: &Outcome, stdout: &mut dyn Write) -> Result<(), CliError> {
    for e in &outcome.emissions {
        match &e.path {
            Some(path) => fs::write(path, &e.body).map_err(|err| CliError::io(path, err))?,
            None => stdout
                .write_all(e.body.as_bytes())
                .map_err(|err| CliError::io(Path::new("<stdout>"), err))?,
        }
    }
    Ok(())
}

fn report_error(e: &CliError, stderr: &mut dyn Write) {
    let line = json!({ "error": e.kind, "code": e.code, "message": e.message });
    let _ = writeln!(stderr, "{line}");
    let _ = writeln!(stderr, "error: {}", e.message);
}

/// Entry point shared by the binary and the tests; returns the exit status.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let first = e
                .to_string()
                .lines()
                .next()
                .unwrap_or("invalid arguments")
                .to_string();
            report_error(&CliError::usage(first), stderr);
            let _ = write!(stderr, "{}", e.render());
            return EXIT_USAGE;
        }
    };
    match execute(cli.command).and_then(|outcome| {
        write_outcome(&outcome, stdout)?;
        Ok(outcome.exit_code)
    }) {
        Ok(code) => code,
        Err(e) => {
            report_error(&e, stderr);
            e.code
        }
    }
}
