// Driving the command line from a TOML file.

use tanaka_splitting::cli::{config_to_args, main_with_args};
use tanaka_splitting::Result;

pub fn run_example() -> Result<()> {
    let config = r#"
command = "discrete-phi"
A = "1/4..1/2"
rho = 0.5
n = [8, 16, 256]
samples = 20000
seed = 11
"#;
    let path = std::env::temp_dir().join(format!("tanaka-example-{}.toml", std::process::id()));
    std::fs::write(&path, config).map_err(|e| tanaka_splitting::Error::Resource(e.to_string()))?;
    println!("argv: {:?}", config_to_args(config).expect("valid config"));
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = main_with_args(
        ["tanaka", "run", "--config", path.to_str().unwrap()],
        &mut out,
        &mut err,
    );
    let _ = std::fs::remove_file(&path);
    print!("{}", String::from_utf8_lossy(&out));
    eprint!("{}", String::from_utf8_lossy(&err));
    assert_eq!(code, 0);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
