//! The discrete Tanaka model on ±1 random-walk paths.
//!
//! `Z` is driven by `X` through `Z_{k+1} - Z_k = sgn(X_k) (X_{k+1} - X_k)` and,
//! unlike the continuous equation, `X` is recovered from `Z`. All arithmetic is
//! in integers; identities carrying halves are checked after doubling.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// `+1` for `a >= 0`, `-1` otherwise.
#[inline]
pub fn sgn(a: i64) -> i64 {
    if a >= 0 {
        1
    } else {
        -1
    }
}

/// Nearest-neighbour lattice path started at zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WalkPath {
    increments: Vec<i8>,
    positions: Vec<i64>,
}

impl WalkPath {
    pub fn from_increments(increments: impl IntoIterator<Item = i8>) -> Result<Self> {
        let increments: Vec<i8> = increments.into_iter().collect();
        if let Some(bad) = increments.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::Domain(format!("step {bad} is not +1 or -1")));
        }
        Ok(Self::from_checked(increments))
    }

    fn from_checked(increments: Vec<i8>) -> Self {
        let mut positions = Vec::with_capacity(increments.len() + 1);
        let mut x = 0i64;
        positions.push(x);
        for &s in &increments {
            x += s as i64;
            positions.push(x);
        }
        Self {
            increments,
            positions,
        }
    }

    /// Path whose step `k` is `-1` exactly when bit `k` of `mask` is set.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        assert!(len <= 64, "mask paths are limited to 64 steps");
        Self::from_checked(
            (0..len)
                .map(|k| if mask >> k & 1 == 1 { -1 } else { 1 })
                .collect(),
        )
    }

    /// Inverse of [`WalkPath::from_mask`].
    pub fn to_mask(&self) -> u64 {
        assert!(self.len() <= 64, "mask paths are limited to 64 steps");
        self.increments
            .iter()
            .enumerate()
            .fold(0, |m, (k, &s)| if s < 0 { m | 1 << k } else { m })
    }

    pub fn increments(&self) -> &[i8] {
        &self.increments
    }

    /// Positions `0 = P_0, P_1, ..., P_len`.
    pub fn positions(&self) -> &[i64] {
        &self.positions
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }
}

impl Default for WalkPath {
    fn default() -> Self {
        Self::from_checked(Vec::new())
    }
}

impl fmt::Display for WalkPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.increments {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl FromStr for WalkPath {
    type Err = Error;

    /// Accepts `+` and either ASCII `-` or U+2212 for down steps.
    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' | '\u{2212}' => Ok(-1),
                other => Err(Error::Parse(format!("unexpected step character {other:?}"))),
            })
            .collect::<Result<Vec<i8>>>()
            .map(WalkPath::from_checked)
    }
}

/// Drive `Z` from `X`.
pub fn x_to_z(x: &WalkPath) -> WalkPath {
    let steps = x
        .increments
        .iter()
        .zip(&x.positions)
        .map(|(&dx, &pos)| (sgn(pos) * dx as i64) as i8)
        .collect();
    WalkPath::from_checked(steps)
}

/// Recover `X` from `Z` by the discrete Tanaka equation.
pub fn z_to_x(z: &WalkPath) -> WalkPath {
    let mut x = 0i64;
    let steps = z
        .increments
        .iter()
        .map(|&dz| {
            let dx = sgn(x) * dz as i64;
            x += dx;
            dx as i8
        })
        .collect();
    WalkPath::from_checked(steps)
}

/// Number of steps up to each time whose two endpoints both lie in `{0, -1}`.
pub fn local_time(x: &WalkPath) -> Vec<u64> {
    let mut out = Vec::with_capacity(x.positions.len());
    let mut acc = 0u64;
    out.push(acc);
    for pair in x.positions.windows(2) {
        if matches!(pair[0], 0 | -1) && matches!(pair[1], 0 | -1) {
            acc += 1;
        }
        out.push(acc);
    }
    out
}

/// Checks, at every time `n`, both pathwise identities
/// `|X_n + 1/2| - 1/2 = sum_k sgn(X_k) dX_k + L_n = Z_n + max_{k<=n}(-Z_k)`.
#[allow(clippy::needless_range_loop)]
pub fn check_identities(x: &WalkPath) -> bool {
    let z = x_to_z(x);
    let local = local_time(x);
    let mut stochastic = 0i64;
    let mut max_neg_z = 0i64;
    for n in 0..=x.len() {
        if n > 0 {
            let k = n - 1;
            stochastic += sgn(x.positions[k]) * x.increments[k] as i64;
        }
        max_neg_z = max_neg_z.max(-z.positions[n]);
        let lhs = (2 * x.positions[n] + 1).abs() - 1;
        if lhs != 2 * (stochastic + local[n] as i64) || lhs != 2 * (z.positions[n] + max_neg_z) {
            return false;
        }
    }
    true
}

/// Sign of `X_n + 1/2` read off `Z` alone: parity of the last time `r <= n`
/// at which `Z` sits at its running minimum.
pub fn recover_sign_parity(z: &WalkPath, n: usize) -> Result<i8> {
    if n > z.len() {
        return Err(Error::Precondition(format!(
            "index {n} exceeds path length {}",
            z.len()
        )));
    }
    let mut running_min = 0i64;
    let mut last = 0usize;
    for (k, &p) in z.positions[..=n].iter().enumerate() {
        if p <= running_min {
            running_min = p;
            last = k;
        }
    }
    Ok(if last.is_multiple_of(2) { 1 } else { -1 })
}
