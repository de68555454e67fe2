//! Reference binners over the full boundary array. Both serve as correctness
//! oracles for [`AcceleratedBinner`](crate::AcceleratedBinner) and as the
//! benchmark opponents.

use crate::bins::{check_finite, first_non_finite, BinError, BinResult, BinSet};

/// Number of boundaries `<= x`, by binary search. `O(lg m)` comparisons.
pub fn binary_search_bin(bins: &BinSet, x: f64) -> Result<BinResult, BinError> {
    check_finite(0, x)?;
    Ok(BinResult(binary_rank(bins.boundaries(), x)))
}

/// Number of boundaries `<= x`, by a left-to-right scan. `O(m)` comparisons.
pub fn linear_search_bin(bins: &BinSet, x: f64) -> Result<BinResult, BinError> {
    check_finite(0, x)?;
    Ok(BinResult(linear_rank(bins.boundaries(), x)))
}

pub fn binary_search_into(
    bins: &BinSet,
    xs: &[f64],
    out: &mut [BinResult],
) -> Result<(), BinError> {
    fill(bins, xs, out, binary_rank)
}

pub fn linear_search_into(
    bins: &BinSet,
    xs: &[f64],
    out: &mut [BinResult],
) -> Result<(), BinError> {
    fill(bins, xs, out, linear_rank)
}

pub fn binary_search_slice(bins: &BinSet, xs: &[f64]) -> Result<Vec<BinResult>, BinError> {
    let mut out = vec![BinResult(0); xs.len()];
    binary_search_into(bins, xs, &mut out)?;
    Ok(out)
}

pub fn linear_search_slice(bins: &BinSet, xs: &[f64]) -> Result<Vec<BinResult>, BinError> {
    let mut out = vec![BinResult(0); xs.len()];
    linear_search_into(bins, xs, &mut out)?;
    Ok(out)
}

#[inline]
fn fill(
    bins: &BinSet,
    xs: &[f64],
    out: &mut [BinResult],
    rank: impl Fn(&[f64], f64) -> usize,
) -> Result<(), BinError> {
    assert_eq!(xs.len(), out.len(), "output length must match input");
    let b = bins.boundaries();
    let mut finite = true;
    for (&x, slot) in xs.iter().zip(out.iter_mut()) {
        finite &= x.is_finite();
        *slot = BinResult(rank(b, x));
    }
    if finite {
        Ok(())
    } else {
        first_non_finite(xs)
    }
}

#[inline]
fn binary_rank(b: &[f64], x: f64) -> usize {
    b.partition_point(|&v| v <= x)
}

#[inline]
fn linear_rank(b: &[f64], x: f64) -> usize {
    b.iter().take_while(|&&v| v <= x).count()
}
