//! Validated bin boundaries and the bin index type shared by every engine.

use std::fmt;

use thiserror::Error;

/// Errors raised while validating boundaries or binning values.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BinError {
    #[error("at least two boundaries are required, got {len}")]
    TooFewBoundaries { len: usize },
    #[error("boundaries are not strictly increasing at index {index} ({prev} >= {value})")]
    NotStrictlyIncreasing { index: usize, prev: f64, value: f64 },
    #[error("boundary at index {index} is not finite ({value})")]
    NonFiniteBoundary { index: usize, value: f64 },
    #[error("input value at index {index} is not finite ({value})")]
    NonFiniteInput { index: usize, value: f64 },
}

/// A strictly increasing, finite sequence of `m + 1` boundaries defining `m`
/// left-closed bins `[b_i, b_{i+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinSet {
    boundaries: Vec<f64>,
}

impl BinSet {
    /// Validates `boundaries` and takes ownership of them. Input order is kept.
    pub fn new(boundaries: Vec<f64>) -> Result<Self, BinError> {
        if boundaries.len() < 2 {
            return Err(BinError::TooFewBoundaries {
                len: boundaries.len(),
            });
        }
        for (index, &value) in boundaries.iter().enumerate() {
            if !value.is_finite() {
                return Err(BinError::NonFiniteBoundary { index, value });
            }
        }
        for (index, pair) in boundaries.windows(2).enumerate() {
            if pair[0] >= pair[1] {
                return Err(BinError::NotStrictlyIncreasing {
                    index: index + 1,
                    prev: pair[0],
                    value: pair[1],
                });
            }
        }
        Ok(BinSet { boundaries })
    }

    /// Number of bins (one less than the number of boundaries).
    #[inline]
    pub fn num_bins(&self) -> usize {
        self.boundaries.len() - 1
    }

    #[inline]
    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    #[inline]
    pub fn low(&self) -> f64 {
        self.boundaries[0]
    }

    #[inline]
    pub fn high(&self) -> f64 {
        self.boundaries[self.boundaries.len() - 1]
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.boundaries
    }
}

/// Shorthand for [`BinSet::new`] on any iterable of reals.
pub fn validate_bins<I>(boundaries: I) -> Result<BinSet, BinError>
where
    I: IntoIterator<Item = f64>,
{
    BinSet::new(boundaries.into_iter().collect())
}

/// Bin index of a value.
///
/// `0` is below the first boundary, `m + 1` is at or above the last one, and
/// `1..=m` means `b_index <= x < b_{index+1}`. Layout is that of `usize`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[repr(transparent)]
pub struct BinResult(pub usize);

impl BinResult {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }

    #[inline]
    pub fn is_below(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn is_above(self, bins: &BinSet) -> bool {
        self.0 == bins.num_bins() + 1
    }
}

impl fmt::Display for BinResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<BinResult> for usize {
    fn from(r: BinResult) -> usize {
        r.0
    }
}

/// Error for the first non-finite value of `xs`, if any.
#[cold]
pub(crate) fn first_non_finite(xs: &[f64]) -> Result<(), BinError> {
    match xs.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(BinError::NonFiniteInput {
            index,
            value: xs[index],
        }),
        None => Ok(()),
    }
}

#[inline]
pub(crate) fn check_finite(index: usize, value: f64) -> Result<(), BinError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(BinError::NonFiniteInput { index, value })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_validates() {
        let bins = validate_bins([2.0, 11.0, 19.0, 20.0, 21.0, 27.0, 29.0, 30.0]).unwrap();
        assert_eq!(bins.num_bins(), 7);
        assert_eq!(bins.low(), 2.0);
        assert_eq!(bins.high(), 30.0);
    }

    #[test]
    fn minimal_input() {
        let bins = validate_bins([0.0, 1.0]).unwrap();
        assert_eq!(bins.num_bins(), 1);
    }

    #[test]
    fn ties_rejected_with_first_index() {
        let err = validate_bins([1.0, 1.0, 2.0]).unwrap_err();
        assert!(matches!(
            err,
            BinError::NotStrictlyIncreasing { index: 1, .. }
        ));
        let err = validate_bins([0.0, 1.0, 3.0, 2.0, 1.0]).unwrap_err();
        assert!(matches!(
            err,
            BinError::NotStrictlyIncreasing { index: 3, .. }
        ));
    }

    #[test]
    fn too_few() {
        assert_eq!(
            validate_bins([]).unwrap_err(),
            BinError::TooFewBoundaries { len: 0 }
        );
        assert_eq!(
            validate_bins([4.0]).unwrap_err(),
            BinError::TooFewBoundaries { len: 1 }
        );
    }

    #[test]
    fn non_finite() {
        let err = validate_bins([0.0, f64::NAN, 2.0]).unwrap_err();
        assert!(matches!(err, BinError::NonFiniteBoundary { index: 1, .. }));
        let err = validate_bins([0.0, 1.0, f64::INFINITY]).unwrap_err();
        assert!(matches!(err, BinError::NonFiniteBoundary { index: 2, .. }));
    }

    #[test]
    fn negative_boundaries_allowed() {
        let bins = validate_bins([-5.0, -1.5, 0.0, 3.0]).unwrap();
        assert_eq!(bins.num_bins(), 3);
    }
}
