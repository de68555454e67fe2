//! C ABI for `fastbin`.
//!
//! A binner is created once from a boundary array and then queried from any
//! number of threads. Every fallible call returns a [`FastbinStatus`]; results
//! go through out-pointers. Panics never cross the boundary and are reported
//! as `FASTBIN_STATUS_INTERNAL`.

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::{ptr, slice};

use fastbin::{binary_search_bin, AcceleratedBinner, BinError, BinResult, BinSet};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FastbinStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Fewer than two boundaries.
    TooFewBoundaries = 2,
    /// Boundaries are not strictly increasing.
    NotStrictlyIncreasing = 3,
    /// A boundary is NaN or infinite.
    NonFiniteBoundary = 4,
    /// A value to bin is NaN or infinite.
    NonFiniteInput = 5,
    /// A bug inside the library; the call had no effect.
    Internal = 6,
}

impl From<&BinError> for FastbinStatus {
    fn from(e: &BinError) -> Self {
        match e {
            BinError::TooFewBoundaries { .. } => FastbinStatus::TooFewBoundaries,
            BinError::NotStrictlyIncreasing { .. } => FastbinStatus::NotStrictlyIncreasing,
            BinError::NonFiniteBoundary { .. } => FastbinStatus::NonFiniteBoundary,
            BinError::NonFiniteInput { .. } => FastbinStatus::NonFiniteInput,
        }
    }
}

/// Opaque binner handle. Immutable after creation.
pub struct FastbinBinner {
    inner: AcceleratedBinner,
}

fn guard(f: impl FnOnce() -> FastbinStatus) -> FastbinStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(FastbinStatus::Internal)
}

/// `len` elements at `data`; a null pointer is accepted only when `len == 0`.
unsafe fn input<'a>(data: *const f64, len: usize) -> Option<&'a [f64]> {
    if len == 0 {
        Some(&[])
    } else if data.is_null() {
        None
    } else {
        Some(slice::from_raw_parts(data, len))
    }
}

unsafe fn bin_set(data: *const f64, len: usize) -> Result<BinSet, FastbinStatus> {
    let b = input(data, len).ok_or(FastbinStatus::NullPointer)?;
    BinSet::new(b.to_vec()).map_err(|e| FastbinStatus::from(&e))
}

/// Validates `len` boundaries at `boundaries` and builds a binner with
/// `len - 1 + extra_cells` grid cells. On success `*out` owns the handle,
/// which must be released with `fastbin_binner_free`.
///
/// # Safety
/// `boundaries` must point to `len` readable doubles and `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn fastbin_binner_new(
    boundaries: *const f64,
    len: usize,
    extra_cells: usize,
    out: *mut *mut FastbinBinner,
) -> FastbinStatus {
    guard(|| {
        if out.is_null() {
            return FastbinStatus::NullPointer;
        }
        *out = ptr::null_mut();
        match bin_set(boundaries, len) {
            Ok(bins) => {
                let inner = AcceleratedBinner::new(bins, extra_cells);
                *out = Box::into_raw(Box::new(FastbinBinner { inner }));
                FastbinStatus::Ok
            }
            Err(status) => status,
        }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `binner` must come from `fastbin_binner_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fastbin_binner_free(binner: *mut FastbinBinner) {
    if !binner.is_null() {
        drop(Box::from_raw(binner));
    }
}

/// Number of bins, or 0 for a null handle.
///
/// # Safety
/// `binner` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fastbin_binner_num_bins(binner: *const FastbinBinner) -> usize {
    binner.as_ref().map_or(0, |b| b.inner.bins().num_bins())
}

/// Number of grid cells, or 0 for a null handle.
///
/// # Safety
/// `binner` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fastbin_binner_cells(binner: *const FastbinBinner) -> usize {
    binner.as_ref().map_or(0, |b| b.inner.grid().cells())
}

/// Bins one value into `*out_index`: 0 below the range, `num_bins + 1` at or
/// above its top, otherwise the 1-based bin.
///
/// # Safety
/// `binner` must be a live handle and `out_index` writable.
#[no_mangle]
pub unsafe extern "C" fn fastbin_bin_value(
    binner: *const FastbinBinner,
    x: f64,
    out_index: *mut usize,
) -> FastbinStatus {
    guard(|| {
        let (Some(b), false) = (binner.as_ref(), out_index.is_null()) else {
            return FastbinStatus::NullPointer;
        };
        match b.inner.bin_value(x) {
            Ok(r) => {
                *out_index = r.index();
                FastbinStatus::Ok
            }
            Err(e) => FastbinStatus::from(&e),
        }
    })
}

/// Bins `len` values into `out`. On `FASTBIN_STATUS_NON_FINITE_INPUT` the
/// first offending position is stored in `*error_index` (if non-null) and
/// the contents of `out` are unspecified.
///
/// # Safety
/// `values` must hold `len` readable doubles, `out` room for `len` writable
/// `size_t`, and the two must not overlap.
#[no_mangle]
pub unsafe extern "C" fn fastbin_bin_slice(
    binner: *const FastbinBinner,
    values: *const f64,
    len: usize,
    out: *mut usize,
    error_index: *mut usize,
) -> FastbinStatus {
    guard(|| {
        let Some(b) = binner.as_ref() else {
            return FastbinStatus::NullPointer;
        };
        let Some(xs) = input(values, len) else {
            return FastbinStatus::NullPointer;
        };
        if len > 0 && out.is_null() {
            return FastbinStatus::NullPointer;
        }
        let dst: &mut [BinResult] = if len == 0 {
            &mut []
        } else {
            // BinResult is a transparent usize.
            slice::from_raw_parts_mut(out.cast::<BinResult>(), len)
        };
        match b.inner.bin_into(xs, dst) {
            Ok(()) => FastbinStatus::Ok,
            Err(e) => {
                if let (BinError::NonFiniteInput { index, .. }, false) = (&e, error_index.is_null())
                {
                    *error_index = *index;
                }
                FastbinStatus::from(&e)
            }
        }
    })
}

/// Reference binary search over `len` boundaries, validated on every call.
///
/// # Safety
/// `boundaries` must hold `len` readable doubles and `out_index` be writable.
#[no_mangle]
pub unsafe extern "C" fn fastbin_binary_search_bin(
    boundaries: *const f64,
    len: usize,
    x: f64,
    out_index: *mut usize,
) -> FastbinStatus {
    guard(|| {
        if out_index.is_null() {
            return FastbinStatus::NullPointer;
        }
        let bins = match bin_set(boundaries, len) {
            Ok(bins) => bins,
            Err(status) => return status,
        };
        match binary_search_bin(&bins, x) {
            Ok(r) => {
                *out_index = r.index();
                FastbinStatus::Ok
            }
            Err(e) => FastbinStatus::from(&e),
        }
    })
}

/// Static, NUL-terminated description of a status code. Codes outside
/// `FastbinStatus` give "unknown status".
#[no_mangle]
pub extern "C" fn fastbin_status_message(status: i32) -> *const c_char {
    let msg: &'static [u8] = match status {
        0 => b"ok\0",
        1 => b"null pointer argument\0",
        2 => b"at least two boundaries are required\0",
        3 => b"boundaries are not strictly increasing\0",
        4 => b"boundary is not finite\0",
        5 => b"input value is not finite\0",
        6 => b"internal error\0",
        _ => b"unknown status\0",
    };
    msg.as_ptr().cast()
}
