//! The accelerated binner: a uniform grid over the bin range, a histogram of
//! interior boundaries per grid cell, and its prefix sum.
//!
//! A query maps `x` to its grid cell `q` in constant time. `r = s_q` is the
//! number of boundaries at or left of the cell start, and the `h_q` interior
//! boundaries that fall inside the cell are the contiguous run
//! `b_{r+1} ..= b_{r+h_q}`. The answer is `r` plus the rank of `x` in that run,
//! resolved with at most two comparisons, or a binary search when `h_q > 2`.
//!
//! Every boundary after a cell's run lies in a later cell (or is the top
//! boundary) and so is greater than any `x` in the cell. For `h_q <= 2` the
//! rank is therefore `[x >= b_{r+1}] + [x >= b_{r+2}]` whatever `h_q` is, which
//! lets those cases skip a data-dependent branch. A `+inf` sentinel after the
//! top boundary keeps `b_{r+2}` in bounds.

use rayon::prelude::*;

use crate::bins::{check_finite, first_non_finite, BinError, BinResult, BinSet};
use crate::grid::UniformGrid;

/// Chunk size for [`AcceleratedBinner::bin_slice_par`].
const PAR_CHUNK: usize = 1 << 14;

/// Immutable precomputed binner.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceleratedBinner {
    bins: BinSet,
    grid: UniformGrid,
    // Boundaries followed by one +inf sentinel.
    padded: Vec<f64>,
    hist: Vec<usize>,
    // cumhist[q - 1] holds s_q, so a cell's slice is cumhist[q-1]..cumhist[q].
    cumhist: Vec<usize>,
}

/// Which query path a value took.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueryCase {
    /// Out of range, or a cell with no interior boundary.
    Direct,
    One,
    Two,
    Search,
}

/// Per-case query counts. Out-of-range values count as [`QueryCase::Direct`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CaseCounts {
    pub n0: usize,
    pub n1: usize,
    pub n2: usize,
    pub n_gt2: usize,
}

impl CaseCounts {
    pub fn total(&self) -> usize {
        self.n0 + self.n1 + self.n2 + self.n_gt2
    }

    /// `(f0, f1, f2, f_gt2)`; all zero when no queries were counted.
    pub fn fractions(&self) -> (f64, f64, f64, f64) {
        let total = self.total();
        if total == 0 {
            return (0.0, 0.0, 0.0, 0.0);
        }
        let t = total as f64;
        (
            self.n0 as f64 / t,
            self.n1 as f64 / t,
            self.n2 as f64 / t,
            self.n_gt2 as f64 / t,
        )
    }

    fn record(&mut self, case: QueryCase) {
        match case {
            QueryCase::Direct => self.n0 += 1,
            QueryCase::One => self.n1 += 1,
            QueryCase::Two => self.n2 += 1,
            QueryCase::Search => self.n_gt2 += 1,
        }
    }
}

impl AcceleratedBinner {
    /// Builds the grid, histogram and cumulative histogram for `bins`, with
    /// `num_bins + extra_cells` grid cells.
    pub fn new(bins: BinSet, extra_cells: usize) -> Self {
        let grid = UniformGrid::new(&bins, extra_cells);
        let cells = grid.cells();
        let b = bins.boundaries();

        let mut hist = vec![0usize; cells];
        for &interior in &b[1..b.len() - 1] {
            hist[grid.cell(interior) - 1] += 1;
        }

        let mut cumhist = Vec::with_capacity(cells + 1);
        let mut s = 1usize;
        cumhist.push(s);
        for &h in &hist {
            s += h;
            cumhist.push(s);
        }
        debug_assert_eq!(s, bins.num_bins());

        let mut padded = Vec::with_capacity(b.len() + 1);
        padded.extend_from_slice(b);
        padded.push(f64::INFINITY);

        AcceleratedBinner {
            bins,
            grid,
            padded,
            hist,
            cumhist,
        }
    }

    #[inline]
    pub fn bins(&self) -> &BinSet {
        &self.bins
    }

    #[inline]
    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    /// `h_1 ..= h_cells`.
    pub fn hist(&self) -> &[usize] {
        &self.hist
    }

    /// `s_1 ..= s_{cells+1}`.
    pub fn cumhist(&self) -> &[usize] {
        &self.cumhist
    }

    /// Interior boundaries that map to 1-based grid cell `q`.
    pub fn cell_boundaries(&self, q: usize) -> &[f64] {
        let r = self.cumhist[q - 1];
        let h = self.hist[q - 1];
        &self.bins.boundaries()[r..r + h]
    }

    /// Bins one value.
    pub fn bin_value(&self, x: f64) -> Result<BinResult, BinError> {
        check_finite(0, x)?;
        Ok(BinResult(self.locate(x, &mut true)))
    }

    /// Bins every value of `xs` in order.
    pub fn bin_slice(&self, xs: &[f64]) -> Result<Vec<BinResult>, BinError> {
        let mut out = vec![BinResult(0); xs.len()];
        self.bin_into(xs, &mut out)?;
        Ok(out)
    }

    /// Bins `xs` into `out`, which must have the same length.
    ///
    /// On a non-finite input the error carries the first offending index and
    /// the contents of `out` are unspecified.
    pub fn bin_into(&self, xs: &[f64], out: &mut [BinResult]) -> Result<(), BinError> {
        assert_eq!(xs.len(), out.len(), "output length must match input");
        let mut finite = true;
        for (&x, slot) in xs.iter().zip(out.iter_mut()) {
            *slot = BinResult(self.locate(x, &mut finite));
        }
        if finite {
            Ok(())
        } else {
            first_non_finite(xs)
        }
    }

    /// Chunked parallel [`bin_slice`](Self::bin_slice); output is identical.
    pub fn bin_slice_par(&self, xs: &[f64]) -> Result<Vec<BinResult>, BinError> {
        let mut out = vec![BinResult(0); xs.len()];
        self.bin_into_par(xs, &mut out)?;
        Ok(out)
    }

    /// Parallel [`bin_into`](Self::bin_into), with the same error contract.
    pub fn bin_into_par(&self, xs: &[f64], out: &mut [BinResult]) -> Result<(), BinError> {
        assert_eq!(xs.len(), out.len(), "output length must match input");
        let finite = out
            .par_chunks_mut(PAR_CHUNK)
            .zip(xs.par_chunks(PAR_CHUNK))
            .map(|(out, xs)| {
                let mut finite = true;
                for (slot, &x) in out.iter_mut().zip(xs) {
                    *slot = BinResult(self.locate(x, &mut finite));
                }
                finite
            })
            .reduce(|| true, |a, b| a & b);
        if finite {
            Ok(())
        } else {
            first_non_finite(xs)
        }
    }

    /// Counts how many values of `xs` go down each query path.
    pub fn case_counts(&self, xs: &[f64]) -> Result<CaseCounts, BinError> {
        let mut counts = CaseCounts::default();
        for (index, &x) in xs.iter().enumerate() {
            check_finite(index, x)?;
            counts.record(self.query_case(x));
        }
        Ok(counts)
    }

    /// Query path `x` takes. `x` must be finite.
    pub fn query_case(&self, x: f64) -> QueryCase {
        if x < self.bins.low() || x >= self.bins.high() {
            return QueryCase::Direct;
        }
        match self.hist[self.grid.cell(x) - 1] {
            0 => QueryCase::Direct,
            1 => QueryCase::One,
            2 => QueryCase::Two,
            _ => QueryCase::Search,
        }
    }

    /// Bin index of `x`. Clears `finite` if `x` is NaN or infinite; only
    /// the out-of-range branches can see such values.
    #[inline]
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn locate(&self, x: f64, finite: &mut bool) -> usize {
        let b = &self.padded;
        let top = b.len() - 2;
        if !(x >= b[0]) {
            *finite &= x.is_finite();
            return 0;
        }
        if x >= b[top] {
            *finite &= x.is_finite();
            return top + 1;
        }
        let q = self.grid.cell_from_origin(x);
        // SAFETY: 1 <= q <= cells and cumhist has cells + 1 entries. Every
        // cumhist entry r satisfies 1 <= r <= m1 and r + h <= m1, while
        // padded has m1 + 2 entries, so b[r], b[r + 1] and b[r..r + h] are
        // in bounds.
        unsafe {
            let r = *self.cumhist.get_unchecked(q - 1);
            let h = *self.cumhist.get_unchecked(q) - r;
            // b[r] is b_{r+1} in 1-based terms.
            if h > 2 {
                return r + search_cell(b.get_unchecked(r..r + h), x);
            }
            r + (x >= *b.get_unchecked(r)) as usize + (x >= *b.get_unchecked(r + 1)) as usize
        }
    }
}

/// Rank of `x` in a cell holding more than two boundaries. Kept out of line
/// so the constant-time path stays compact.
#[inline(never)]
fn search_cell(slice: &[f64], x: f64) -> usize {
    slice.partition_point(|&v| v <= x)
}

/// Builds an [`AcceleratedBinner`] for `bins` with `extra_cells` extra grid cells.
pub fn precompute(bins: BinSet, extra_cells: usize) -> AcceleratedBinner {
    AcceleratedBinner::new(bins, extra_cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bins::validate_bins;

    fn worked(k: usize) -> AcceleratedBinner {
        precompute(
            validate_bins([2.0, 11.0, 19.0, 20.0, 21.0, 27.0, 29.0, 30.0]).unwrap(),
            k,
        )
    }

    #[test]
    fn worked_example_tables() {
        let acc = worked(0);
        assert_eq!(acc.hist(), &[0, 0, 1, 0, 3, 0, 2]);
        assert_eq!(acc.cumhist(), &[1, 1, 1, 2, 2, 5, 5, 7]);
        assert_eq!(acc.cell_boundaries(5), &[19.0, 20.0, 21.0]);
        assert_eq!(acc.cell_boundaries(7), &[27.0, 29.0]);
        assert!(acc.cell_boundaries(1).is_empty());
    }

    #[test]
    fn worked_example_queries() {
        let acc = worked(0);
        let q = |x| acc.bin_value(x).unwrap().index();
        assert_eq!(q(25.0), 5);
        assert_eq!(q(13.0), 2);
        assert_eq!(q(10.5), 1);
        assert_eq!(q(19.5), 3);
        assert_eq!(q(1.9), 0);
        assert_eq!(q(30.0), 8);
        // h = 2 cell (26..30)
        assert_eq!(q(26.5), 5);
        assert_eq!(q(27.0), 6);
        assert_eq!(q(29.5), 7);
    }

    #[test]
    fn worked_example_slice_and_cases() {
        let acc = worked(0);
        let out: Vec<usize> = acc
            .bin_slice(&[25.0, 13.0, 10.5, 19.5])
            .unwrap()
            .into_iter()
            .map(usize::from)
            .collect();
        assert_eq!(out, vec![5, 2, 1, 3]);
        assert!(acc.bin_slice(&[]).unwrap().is_empty());

        let c = acc.case_counts(&[25.0]).unwrap();
        assert_eq!((c.n0, c.n1, c.n2, c.n_gt2), (1, 0, 0, 0));
        let c = acc.case_counts(&[19.5]).unwrap();
        assert_eq!((c.n0, c.n1, c.n2, c.n_gt2), (0, 0, 0, 1));
        assert_eq!(acc.case_counts(&[]).unwrap(), CaseCounts::default());
        let c = acc.case_counts(&[13.0, 28.0, -4.0, 31.0]).unwrap();
        assert_eq!((c.n0, c.n1, c.n2, c.n_gt2), (2, 1, 1, 0));
    }

    #[test]
    fn left_closed_on_boundaries() {
        let acc = worked(0);
        for (i, &b) in acc.bins().boundaries().iter().enumerate() {
            assert_eq!(acc.bin_value(b).unwrap().index(), i + 1);
        }
    }

    #[test]
    fn unit_bins() {
        let acc = precompute(validate_bins([0.0, 1.0]).unwrap(), 0);
        assert_eq!(acc.hist(), &[0]);
        assert_eq!(acc.cumhist(), &[1, 1]);
        assert_eq!(acc.bin_value(0.5).unwrap(), BinResult(1));
        assert_eq!(acc.bin_value(-0.5).unwrap(), BinResult(0));
        assert_eq!(acc.bin_value(1.0).unwrap(), BinResult(2));
    }

    /// Places each interior boundary with exact rational arithmetic:
    /// q = floor((b - 2) * 15 / 28) + 1 on the 15-cell grid over [2, 30].
    #[test]
    fn oversampled_worked_example_matches_exact_placement() {
        let interior = [11i64, 19, 20, 21, 27, 29];
        let mut hist = vec![0usize; 15];
        for b in interior {
            let q = ((b - 2) * 15).div_euclid(28) as usize + 1;
            hist[q - 1] += 1;
        }
        let mut cum = vec![1usize];
        for h in &hist {
            cum.push(cum.last().unwrap() + h);
        }
        assert_eq!(hist, vec![0, 0, 0, 0, 1, 0, 0, 0, 0, 2, 1, 0, 0, 1, 1]);
        assert_eq!(cum, vec![1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 4, 5, 5, 5, 6, 7]);

        let acc = worked(8);
        assert_eq!(acc.grid().cells(), 15);
        assert_eq!(acc.hist(), hist.as_slice());
        assert_eq!(acc.cumhist(), cum.as_slice());
        assert_eq!(acc.hist().iter().sum::<usize>(), 6);
        assert_eq!(acc.cumhist()[15], 7);
    }

    #[test]
    fn non_finite_inputs_rejected() {
        let acc = worked(0);
        assert!(matches!(
            acc.bin_value(f64::NAN),
            Err(BinError::NonFiniteInput { index: 0, .. })
        ));
        assert!(matches!(
            acc.bin_slice(&[3.0, 4.0, f64::NEG_INFINITY]),
            Err(BinError::NonFiniteInput { index: 2, .. })
        ));
        assert!(matches!(
            acc.bin_slice_par(&[3.0, f64::INFINITY, f64::NAN]),
            Err(BinError::NonFiniteInput { index: 1, .. })
        ));
        assert!(acc.case_counts(&[f64::NAN]).is_err());
    }

    #[test]
    fn parallel_matches_sequential() {
        let acc = worked(3);
        let xs: Vec<f64> = (0..100_000).map(|i| (i as f64) * 3.3e-4).collect();
        assert_eq!(acc.bin_slice(&xs).unwrap(), acc.bin_slice_par(&xs).unwrap());
    }
}
