//! Exact Fourier-Walsh analysis of functions of `n` Rademacher increments.
//!
//! Tables are indexed by bitmask: bit `k` set means increment `k + 1` is `-1`.
//! Spectra use the same indexing for subsets `T` of `{1..n}`. The forward
//! transform carries the `2^-n` factor so that coefficients are expectations
//! and Parseval reads `sum_T c(T)^2 = E[f^2]`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::walk::sgn;

/// Largest supported number of coordinates (16M-entry tables).
pub const MAX_COORDINATES: usize = 24;

/// Butterfly stages below this span run sequentially.
const PARALLEL_SPAN: usize = 1 << 14;

/// Real function on `{-1, +1}^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionTable {
    n: usize,
    values: Vec<f64>,
}

impl FunctionTable {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        check_cap(n)?;
        if values.len() != 1 << n {
            return Err(Error::Domain(format!(
                "table for n = {n} needs {} entries, got {}",
                1usize << n,
                values.len()
            )));
        }
        Ok(Self { n, values })
    }

    pub fn from_fn(n: usize, f: impl Fn(u64) -> f64 + Sync + Send) -> Result<Self> {
        check_cap(n)?;
        let values = (0..1u64 << n).into_par_iter().map(f).collect();
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `E[f^2]` under the uniform measure.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() / self.values.len() as f64
    }
}

/// Fourier-Walsh coefficients `c(T) = E[f(e) prod_{k in T} e_k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChaosSpectrum {
    n: usize,
    coefficients: Vec<f64>,
}

impl ChaosSpectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficient(&self, subset: u64) -> f64 {
        self.coefficients[subset as usize]
    }

    pub fn total_mass(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }

    /// Entries `(subset, coefficient, squared mass)` sorted by mass, largest
    /// first, ties broken by subset index; at most `k` of them.
    pub fn top(&self, k: usize) -> Vec<(u64, f64, f64)> {
        let mut rows: Vec<(u64, f64, f64)> = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, &c)| (i as u64, c, c * c))
            .collect();
        rows.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));
        rows.truncate(k);
        rows
    }
}

/// Per-coordinate correlations.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoVector(Vec<f64>);

impl RhoVector {
    pub fn new(rho: Vec<f64>) -> Result<Self> {
        if let Some(bad) = rho.iter().find(|r| !(-1.0..=1.0).contains(*r)) {
            return Err(Error::Domain(format!(
                "correlation {bad} is outside [-1, 1]"
            )));
        }
        Ok(Self(rho))
    }

    pub fn uniform(n: usize, rho: f64) -> Result<Self> {
        Self::new(vec![rho; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Probability law on coordinate subsets, `P(S = T) = c(T)^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    n: usize,
    masses: Vec<f64>,
}

impl SpectralMeasure {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn probability(&self, subset: u64) -> f64 {
        self.masses[subset as usize]
    }

    /// Law of `|S|`.
    pub fn size_distribution(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n + 1];
        for (t, m) in self.masses.iter().enumerate() {
            out[t.count_ones() as usize] += m;
        }
        out
    }
}

/// `sgn(X_n)` as a function of the increments of `Z`, with `X` recovered
/// from `Z` by the discrete Tanaka equation.
pub fn sgn_functional_table(n: usize) -> Result<FunctionTable> {
    if n == 0 {
        return Err(Error::Domain(
            "sgn functional needs at least one step".into(),
        ));
    }
    FunctionTable::from_fn(n, |mask| {
        let mut x = 0i64;
        for k in 0..n {
            let dz = if mask >> k & 1 == 1 { -1 } else { 1 };
            x += sgn(x) * dz;
        }
        sgn(x) as f64
    })
}

/// Indicator that a walk started at `start` stays strictly positive for all
/// `n` steps.
pub fn walk_survival_table(n: usize, start: i64) -> Result<FunctionTable> {
    if start <= 0 {
        return Err(Error::Domain(format!(
            "start height {start} must be positive"
        )));
    }
    FunctionTable::from_fn(n, |mask| {
        let mut z = start;
        for k in 0..n {
            z += if mask >> k & 1 == 1 { -1 } else { 1 };
            if z <= 0 {
                return 0.0;
            }
        }
        1.0
    })
}

/// In-place unnormalized Walsh-Hadamard butterfly, `O(n 2^n)`.
fn fwht(data: &mut [f64]) {
    let len = data.len();
    let mut half = 1;
    while half < len {
        let butterfly = |block: &mut [f64]| {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        };
        if len >= PARALLEL_SPAN {
            data.par_chunks_mut(2 * half).for_each(butterfly);
        } else {
            data.chunks_mut(2 * half).for_each(butterfly);
        }
        half *= 2;
    }
}

pub fn walsh_transform(f: &FunctionTable) -> ChaosSpectrum {
    let mut coefficients = f.values.clone();
    fwht(&mut coefficients);
    let scale = 1.0 / coefficients.len() as f64;
    coefficients.iter_mut().for_each(|c| *c *= scale);
    ChaosSpectrum {
        n: f.n,
        coefficients,
    }
}

/// Rebuild the table from its coefficients.
pub fn inverse_walsh(s: &ChaosSpectrum) -> FunctionTable {
    let mut values = s.coefficients.clone();
    fwht(&mut values);
    FunctionTable { n: s.n, values }
}

/// Tolerance on `sum c^2 = 1` for the spectral measure.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-9;

pub fn spectral_measure(s: &ChaosSpectrum) -> Result<SpectralMeasure> {
    let total = s.total_mass();
    if (total - 1.0).abs() > UNIT_NORM_TOLERANCE {
        return Err(Error::Precondition(format!(
            "spectrum has total mass {total}, expected 1"
        )));
    }
    Ok(SpectralMeasure {
        n: s.n,
        masses: s.coefficients.iter().map(|c| c * c).collect(),
    })
}

/// `sum_T c(T)^2 prod_{k in T} rho_k`, which is `E[f(e) f(e')]` for a
/// coordinatewise `rho`-correlated pair. For unit-norm spectra this is
/// `E[rho^|S|]` under the spectral measure.
pub fn noise_functional(s: &ChaosSpectrum, rho: &RhoVector) -> Result<f64> {
    check_dims(s.n, rho)?;
    let mut weight = vec![1.0f64; s.coefficients.len()];
    for t in 1..weight.len() {
        let low = t.trailing_zeros() as usize;
        weight[t] = weight[t & (t - 1)] * rho.0[low];
    }
    Ok(s.coefficients
        .iter()
        .zip(&weight)
        .map(|(c, w)| c * c * w)
        .sum())
}

/// `E[f(e) f(e')]` computed directly: apply the coordinatewise averaging
/// operator `e'_k = e_k` with probability `(1 + rho_k)/2`, then pair with `f`.
pub fn exact_correlation(f: &FunctionTable, rho: &RhoVector) -> Result<f64> {
    check_dims(f.n, rho)?;
    let mut smoothed = f.values.clone();
    for (k, &r) in rho.0.iter().enumerate() {
        let keep = 0.5 * (1.0 + r);
        let flip = 0.5 * (1.0 - r);
        let bit = 1usize << k;
        for i in 0..smoothed.len() {
            if i & bit == 0 {
                let (a, b) = (smoothed[i], smoothed[i | bit]);
                smoothed[i] = keep * a + flip * b;
                smoothed[i | bit] = flip * a + keep * b;
            }
        }
    }
    Ok(f.values
        .iter()
        .zip(&smoothed)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        / f.values.len() as f64)
}

fn check_cap(n: usize) -> Result<()> {
    if n > MAX_COORDINATES {
        Err(Error::Resource(format!(
            "{n} coordinates exceeds the cap of {MAX_COORDINATES}"
        )))
    } else {
        Ok(())
    }
}

fn check_dims(n: usize, rho: &RhoVector) -> Result<()> {
    if rho.len() != n {
        Err(Error::Precondition(format!(
            "correlation vector has {} entries for {n} coordinates",
            rho.len()
        )))
    } else {
        Ok(())
    }
}
