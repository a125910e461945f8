//! Interval algebra for the perturbation region.
//!
//! A [`TimeSet`] is a finite union of closed intervals in `[0, 1]` whose
//! endpoints are dyadic rationals. Sets derived from it through affine maps
//! generally lose the dyadic property and are held as an [`IntervalSet`] of
//! plain real endpoints; those only ever parameterize Monte Carlo patterns.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported exponent of the denominator.
const MAX_LOG2_DEN: u32 = 52;

/// A number `numerator / 2^log2_denominator` in `[0, 1]`, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    numerator: u64,
    log2_denominator: u32,
}

impl DyadicRational {
    pub const ZERO: DyadicRational = DyadicRational {
        numerator: 0,
        log2_denominator: 0,
    };
    pub const ONE: DyadicRational = DyadicRational {
        numerator: 1,
        log2_denominator: 0,
    };

    pub fn new(numerator: u64, log2_denominator: u32) -> Result<Self> {
        if log2_denominator > MAX_LOG2_DEN {
            return Err(Error::Domain(format!(
                "denominator 2^{log2_denominator} exceeds 2^{MAX_LOG2_DEN}"
            )));
        }
        if numerator > 1u64 << log2_denominator {
            return Err(Error::Domain(format!(
                "{numerator}/2^{log2_denominator} is greater than 1"
            )));
        }
        let (mut num, mut log2) = (numerator, log2_denominator);
        if num == 0 {
            return Ok(Self::ZERO);
        }
        while num % 2 == 0 && log2 > 0 {
            num /= 2;
            log2 -= 1;
        }
        Ok(Self {
            numerator: num,
            log2_denominator: log2,
        })
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn log2_denominator(&self) -> u32 {
        self.log2_denominator
    }

    pub fn denominator(&self) -> u64 {
        1u64 << self.log2_denominator
    }

    /// Exact for every representable value (denominators up to 2^52).
    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator() as f64
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let shift = self.log2_denominator.max(other.log2_denominator);
        let a = (self.numerator as u128) << (shift - self.log2_denominator);
        let b = (other.numerator as u128) << (shift - other.log2_denominator);
        a.cmp(&b)
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log2_denominator == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, self.denominator())
        }
    }
}

impl FromStr for DyadicRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_u64 = |part: &str| {
            part.trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("invalid dyadic rational {s:?}")))
        };
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (parse_u64(n)?, parse_u64(d)?),
            None => (parse_u64(s)?, 1),
        };
        if den == 0 || !den.is_power_of_two() {
            return Err(Error::Parse(format!(
                "denominator of {s:?} is not a power of two"
            )));
        }
        DyadicRational::new(num, den.trailing_zeros()).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Anything that can answer closed-membership queries for times in `[0, 1]`.
pub trait Region {
    fn contains_time(&self, t: f64) -> bool;

    /// Smallest member, if any.
    fn infimum(&self) -> Option<f64>;

    /// Largest member, if any.
    fn supremum(&self) -> Option<f64>;

    fn is_empty(&self) -> bool {
        self.infimum().is_none()
    }
}

/// Finite union of closed, pairwise non-touching intervals with dyadic endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TimeSet {
    components: Vec<(DyadicRational, DyadicRational)>,
}

impl TimeSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full() -> Self {
        Self {
            components: vec![(DyadicRational::ZERO, DyadicRational::ONE)],
        }
    }

    /// Builds the canonical form: sorted, with overlapping or touching
    /// intervals merged.
    pub fn new(
        intervals: impl IntoIterator<Item = (DyadicRational, DyadicRational)>,
    ) -> Result<Self> {
        let mut raw: Vec<_> = intervals.into_iter().collect();
        for &(lo, hi) in &raw {
            if lo >= hi {
                return Err(Error::Domain(format!(
                    "empty or reversed interval {lo}..{hi}"
                )));
            }
        }
        raw.sort();
        let mut components: Vec<(DyadicRational, DyadicRational)> = Vec::with_capacity(raw.len());
        for (lo, hi) in raw {
            match components.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => components.push((lo, hi)),
            }
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[(DyadicRational, DyadicRational)] {
        &self.components
    }

    /// Closed membership test.
    pub fn contains(&self, t: f64) -> Result<bool> {
        check_unit(t)?;
        Ok(self.contains_time(t))
    }

    /// Total length.
    pub fn measure(&self) -> f64 {
        self.components
            .iter()
            .map(|(lo, hi)| hi.to_f64() - lo.to_f64())
            .sum()
    }

    /// The connected components of `[0, 1] \ A`, reported by their closures.
    pub fn complement_components(&self) -> Vec<(DyadicRational, DyadicRational)> {
        let mut out = Vec::with_capacity(self.components.len() + 1);
        let mut cursor = DyadicRational::ZERO;
        for &(lo, hi) in &self.components {
            if lo > cursor {
                out.push((cursor, lo));
            }
            cursor = hi;
        }
        if cursor < DyadicRational::ONE {
            out.push((cursor, DyadicRational::ONE));
        }
        out
    }

    /// For `t` outside the interior of the set, the last member before `t`
    /// and the first member after `t`.
    pub fn boundary_times(&self, t: f64) -> Result<(Option<f64>, Option<f64>)> {
        check_unit(t)?;
        let mut before = None;
        let mut after = None;
        for &(lo, hi) in &self.components {
            let (lo, hi) = (lo.to_f64(), hi.to_f64());
            if lo < t && t < hi {
                return Err(Error::Precondition(format!(
                    "t = {t} lies in the interior of component [{lo}, {hi}]"
                )));
            }
            if lo < t {
                before = Some(hi.min(t));
            }
            if hi > t && after.is_none() {
                after = Some(lo.max(t));
            }
        }
        Ok((before, after))
    }

    /// Pull the set back through `x -> scale * x + shift`, clipped to `[0, 1]`.
    pub fn affine_preimage(&self, scale: f64, shift: f64) -> Result<IntervalSet> {
        IntervalSet::from_time_set(self).affine_preimage(scale, shift)
    }
}

impl Region for TimeSet {
    fn contains_time(&self, t: f64) -> bool {
        self.components
            .iter()
            .any(|(lo, hi)| lo.to_f64() <= t && t <= hi.to_f64())
    }

    fn infimum(&self) -> Option<f64> {
        self.components.first().map(|c| c.0.to_f64())
    }

    fn supremum(&self) -> Option<f64> {
        self.components.last().map(|c| c.1.to_f64())
    }
}

impl fmt::Display for TimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (lo, hi)) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{lo}..{hi}")?;
        }
        Ok(())
    }
}

impl FromStr for TimeSet {
    type Err = Error;

    /// Parses `"lo..hi,lo..hi"`; the empty string is the empty set.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::empty());
        }
        let mut intervals = Vec::new();
        for part in s.split(',') {
            let (lo, hi) = part.split_once("..").ok_or_else(|| {
                Error::Parse(format!("interval {part:?} is not of the form lo..hi"))
            })?;
            intervals.push((lo.parse()?, hi.parse()?));
        }
        TimeSet::new(intervals).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Closed intervals with real endpoints inside `[0, 1]`, sorted and disjoint.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn new(intervals: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut raw: Vec<(f64, f64)> = intervals.into_iter().collect();
        for &(lo, hi) in &raw {
            if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
                return Err(Error::Domain(format!("invalid interval [{lo}, {hi}]")));
            }
        }
        raw.sort_by(|a, b| a.partial_cmp(b).expect("finite endpoints"));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (lo, hi) in raw {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Ok(Self { intervals: merged })
    }

    pub fn from_time_set(set: &TimeSet) -> Self {
        Self {
            intervals: set
                .components()
                .iter()
                .map(|(lo, hi)| (lo.to_f64(), hi.to_f64()))
                .collect(),
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(lo, hi)| hi - lo).sum()
    }

    /// `{x in [0,1] : scale * x + shift in self}`.
    pub fn affine_preimage(&self, scale: f64, shift: f64) -> Result<IntervalSet> {
        if scale == 0.0 || !scale.is_finite() || !shift.is_finite() {
            return Err(Error::Domain(format!(
                "degenerate affine map x -> {scale} x + {shift}"
            )));
        }
        let pulled = self.intervals.iter().filter_map(|&(lo, hi)| {
            let (a, b) = ((lo - shift) / scale, (hi - shift) / scale);
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            let (a, b) = (a.max(0.0), b.min(1.0));
            (a <= b).then_some((a, b))
        });
        IntervalSet::new(pulled.collect::<Vec<_>>())
    }

    /// `{scale * x + shift : x in self}`, clipped to `[0, 1]`.
    pub fn affine_image(&self, scale: f64, shift: f64) -> Result<IntervalSet> {
        if scale == 0.0 {
            return Err(Error::Domain("zero scale".into()));
        }
        let pushed = self.intervals.iter().filter_map(|&(lo, hi)| {
            let (a, b) = (scale * lo + shift, scale * hi + shift);
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            let (a, b) = (a.max(0.0), b.min(1.0));
            (a <= b).then_some((a, b))
        });
        IntervalSet::new(pushed.collect::<Vec<_>>())
    }
}

impl Region for IntervalSet {
    fn contains_time(&self, t: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= t && t <= hi)
    }

    fn infimum(&self) -> Option<f64> {
        self.intervals.first().map(|c| c.0)
    }

    fn supremum(&self) -> Option<f64> {
        self.intervals.last().map(|c| c.1)
    }
}

/// Finite sorted collection of times in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointSet {
    points: Vec<f64>,
}

impl PointSet {
    pub fn new(mut points: Vec<f64>) -> Result<Self> {
        for &p in &points {
            check_unit(p)?;
        }
        points.sort_by(|a, b| a.partial_cmp(b).expect("checked finite"));
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Number of points lying in the (closed) region.
pub fn count_in<R: Region + ?Sized>(points: &PointSet, region: &R) -> usize {
    points
        .points
        .iter()
        .filter(|&&p| region.contains_time(p))
        .count()
}

fn check_unit(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::Domain(format!("time {t} is outside [0, 1]")))
    }
}
