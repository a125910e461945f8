// The discrete Tanaka equation on a short walk: drive `Z` from `X`, recover
// `X` back, and read the sign of `X_n` off `Z` alone.

use tanaka_splitting::walk::{check_identities, local_time, recover_sign_parity, x_to_z, z_to_x};
use tanaka_splitting::{Result, WalkPath};

pub fn run_example() -> Result<()> {
    let x: WalkPath = "-++--+-".parse()?;
    let z = x_to_z(&x);
    println!("X = {x}  positions {:?}", x.positions());
    println!("Z = {z}  positions {:?}", z.positions());
    println!("local time {:?}", local_time(&x));
    assert_eq!(z_to_x(&z), x);
    assert!(check_identities(&x));
    for n in 0..=z.len() {
        let sign = recover_sign_parity(&z, n)?;
        println!(
            "n = {n}: X_n = {:>2}, sign from Z = {sign:+}",
            x.positions()[n]
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
