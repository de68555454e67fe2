//! Seeded generation of boundary sets and query values.
//!
//! Every generator is a `ChaCha8Rng` seeded through `seed_from_u64`, so a
//! `(spec, seed)` pair reproduces the same output bit for bit.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use thiserror::Error;

use crate::bins::{BinError, BinSet};

/// Name of the generator algorithm, for reports.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng(seed_from_u64)";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DataError {
    #[error("invalid range [{low}, {high}): bounds must be finite with low < high")]
    InvalidRange { low: f64, high: f64 },
    #[error(
        "range holds only {available} representable values, {needed} distinct boundaries needed"
    )]
    RangeTooNarrow { needed: u64, available: u64 },
    #[error("m1 must be at least 1")]
    NoBins,
    #[error("unknown {kind} '{name}'")]
    UnknownName { kind: &'static str, name: String },
    #[error(transparent)]
    Bins(#[from] BinError),
}

/// Shape of generated query values. All variants are confined to the
/// half-open range by rejection, never by clamping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueDistribution {
    Uniform,
    GaussianClipped,
    ExponentialClipped,
    BimodalMixture,
}

impl ValueDistribution {
    pub const ALL: [ValueDistribution; 4] = [
        ValueDistribution::Uniform,
        ValueDistribution::GaussianClipped,
        ValueDistribution::ExponentialClipped,
        ValueDistribution::BimodalMixture,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ValueDistribution::Uniform => "uniform",
            ValueDistribution::GaussianClipped => "gaussian-clipped",
            ValueDistribution::ExponentialClipped => "exponential-clipped",
            ValueDistribution::BimodalMixture => "bimodal-mixture",
        }
    }
}

impl fmt::Display for ValueDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ValueDistribution {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, DataError> {
        Self::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| DataError::UnknownName {
                kind: "distribution",
                name: s.to_string(),
            })
    }
}

/// How interior boundaries are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryStyle {
    /// Even spacing with each interior boundary jittered by up to 40% of a step.
    UniformSpacingJitter,
    /// Sorted independent uniform draws.
    SortedUniformDraws,
    /// Gaussian clusters around a few random centers.
    Clustered,
}

impl BoundaryStyle {
    pub const ALL: [BoundaryStyle; 3] = [
        BoundaryStyle::UniformSpacingJitter,
        BoundaryStyle::SortedUniformDraws,
        BoundaryStyle::Clustered,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundaryStyle::UniformSpacingJitter => "uniform-spacing-jitter",
            BoundaryStyle::SortedUniformDraws => "sorted-uniform-draws",
            BoundaryStyle::Clustered => "clustered",
        }
    }
}

impl fmt::Display for BoundaryStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundaryStyle {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, DataError> {
        Self::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| DataError::UnknownName {
                kind: "boundary style",
                name: s.to_string(),
            })
    }
}

/// A reproducible request for `count` values in `[low, high)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataSpec {
    pub distribution: ValueDistribution,
    pub count: usize,
    low: f64,
    high: f64,
    pub seed: u64,
}

impl DataSpec {
    pub fn new(
        distribution: ValueDistribution,
        count: usize,
        low: f64,
        high: f64,
        seed: u64,
    ) -> Result<Self, DataError> {
        check_range(low, high)?;
        Ok(DataSpec {
            distribution,
            count,
            low,
            high,
            seed,
        })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.low, self.high)
    }
}

fn check_range(low: f64, high: f64) -> Result<(), DataError> {
    if low.is_finite() && high.is_finite() && low < high {
        Ok(())
    } else {
        Err(DataError::InvalidRange { low, high })
    }
}

/// Generates `spec.count` values in `[low, high)`.
pub fn gen_values(spec: &DataSpec) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (low, high) = (spec.low, spec.high);
    let span = high - low;
    let in_range = |x: f64| x >= low && x < high;
    let mut out = Vec::with_capacity(spec.count);

    match spec.distribution {
        ValueDistribution::Uniform => {
            while out.len() < spec.count {
                let x = rng.random_range(low..high);
                if in_range(x) {
                    out.push(x);
                }
            }
        }
        ValueDistribution::GaussianClipped => {
            let normal = Normal::new(low + 0.5 * span, span / 6.0).expect("finite sd");
            while out.len() < spec.count {
                let x = normal.sample(&mut rng);
                if in_range(x) {
                    out.push(x);
                }
            }
        }
        ValueDistribution::ExponentialClipped => {
            let exp = Exp::new(3.0 / span).expect("positive rate");
            while out.len() < spec.count {
                let x = low + exp.sample(&mut rng);
                if in_range(x) {
                    out.push(x);
                }
            }
        }
        ValueDistribution::BimodalMixture => {
            let left = Normal::new(low + 0.25 * span, span / 10.0).expect("finite sd");
            let right = Normal::new(low + 0.75 * span, span / 10.0).expect("finite sd");
            while out.len() < spec.count {
                let x = if rng.random_bool(0.5) {
                    left.sample(&mut rng)
                } else {
                    right.sample(&mut rng)
                };
                if in_range(x) {
                    out.push(x);
                }
            }
        }
    }
    out
}

// Order-preserving map from finite floats to integers; -0.0 and +0.0 share 0.
fn float_key(x: f64) -> i64 {
    let bits = x.to_bits() as i64;
    if bits >= 0 {
        bits
    } else {
        -(bits & i64::MAX)
    }
}

fn key_float(k: i64) -> f64 {
    if k >= 0 {
        f64::from_bits(k as u64)
    } else {
        -f64::from_bits(k.unsigned_abs())
    }
}

/// Generates `m1 + 1` strictly increasing boundaries from `low` to `high`
/// inclusive. Duplicate draws are discarded and redrawn.
pub fn gen_boundaries(
    m1: usize,
    style: BoundaryStyle,
    low: f64,
    high: f64,
    seed: u64,
) -> Result<BinSet, DataError> {
    if m1 == 0 {
        return Err(DataError::NoBins);
    }
    check_range(low, high)?;
    let (klow, khigh) = (float_key(low), float_key(high));
    let needed = (m1 - 1) as u64;
    let available = (khigh as i128 - klow as i128 - 1).min(u64::MAX as i128) as u64;
    if available < needed {
        return Err(DataError::RangeTooNarrow { needed, available });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keys = BTreeSet::new();
    let accept = |keys: &mut BTreeSet<i64>, x: f64| {
        if x > low && x < high {
            keys.insert(float_key(x));
        }
    };
    let span = high - low;
    let want = m1 - 1;

    match style {
        BoundaryStyle::UniformSpacingJitter => {
            let step = span / m1 as f64;
            for i in 1..m1 {
                let jitter = rng.random_range(-0.4..0.4) * step;
                accept(&mut keys, low + i as f64 * step + jitter);
            }
        }
        BoundaryStyle::SortedUniformDraws => {
            let mut attempts = 8 * want + 64;
            while keys.len() < want && attempts > 0 {
                accept(&mut keys, rng.random_range(low..high));
                attempts -= 1;
            }
        }
        BoundaryStyle::Clustered => {
            let clusters = want.div_ceil(32).max(1);
            let centers: Vec<f64> = (0..clusters).map(|_| rng.random_range(low..high)).collect();
            let sd = span / (16.0 * clusters as f64);
            let mut attempts = 8 * want + 64;
            while keys.len() < want && attempts > 0 {
                let c = centers[rng.random_range(0..clusters)];
                let x = Normal::new(c, sd).expect("finite sd").sample(&mut rng);
                accept(&mut keys, x);
                attempts -= 1;
            }
        }
    }

    // Top up directly in key space; terminates because enough keys exist.
    while keys.len() < want {
        keys.insert(rng.random_range(klow + 1..khigh));
    }

    let mut boundaries = Vec::with_capacity(m1 + 1);
    boundaries.push(low);
    boundaries.extend(keys.into_iter().map(key_float));
    boundaries.push(high);
    Ok(BinSet::new(boundaries)?)
}
