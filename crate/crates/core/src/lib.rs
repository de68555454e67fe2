//! Non-uniform binning in linear average time.
//!
//! [`AcceleratedBinner`] maps each value to one of `m` non-uniform bins by
//! first locating it in a uniform grid over the same range, then resolving
//! the few bin boundaries that share its grid cell. Most queries take zero,
//! one or two comparisons. [`baselines`] holds the binary and linear search
//! references, [`analysis`] the combinatorial model of how many boundaries
//! land in a cell, and [`bench`](mod@bench) the timing experiments.
//!
//! ```
//! use fastbin::{precompute, validate_bins};
//!
//! let bins = validate_bins([2.0, 11.0, 19.0, 20.0, 21.0, 27.0, 29.0, 30.0]).unwrap();
//! let acc = precompute(bins, 0);
//! assert_eq!(acc.bin_value(19.5).unwrap().index(), 3);
//! ```

pub mod analysis;
pub mod baselines;
pub mod bench;
pub mod binner;
pub mod bins;
pub mod cli;
pub mod datagen;
pub mod grid;

pub use baselines::{binary_search_bin, linear_search_bin};
pub use binner::{precompute, AcceleratedBinner, CaseCounts, QueryCase};
pub use bins::{validate_bins, BinError, BinResult, BinSet};
pub use grid::{build_grid, UniformGrid};
