use tanaka_splitting::{count_in, PointSet, Region, Result, TimeSet};

pub fn run_example() -> Result<()> {
    let a: TimeSet = "1/4..1/2,5/8..3/4".parse()?;
    println!("A = {a}, |A| = {}", a.measure());
    for (lo, hi) in a.complement_components() {
        println!("gap {lo}..{hi}");
    }
    let t = 0.55;
    let (before, after) = a.boundary_times(t)?;
    println!("around {t}: last point of A before = {before:?}, first after = {after:?}");
    // a minimum at t splits [0, 1] into a reversed piece and a forward piece
    let left = a.affine_preimage(-t, t)?;
    let right = a.affine_preimage(1.0 - t, t)?;
    println!("before the minimum, rescaled: {:?}", left.intervals());
    println!("after the minimum, rescaled: {:?}", right.intervals());
    let s = PointSet::new(vec![0.1, 0.3, 0.45, 0.7, 0.9])?;
    println!("{} of {} points fall in A", count_in(&s, &a), s.len());
    assert!(a.contains_time(0.5));
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
