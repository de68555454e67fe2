//! Uniform shadow grid spanning the same range as a [`BinSet`].

use crate::bins::BinSet;

/// `cells` equal-width cells starting at `origin`, each `delta` wide.
///
/// Cell lookup multiplies by a precomputed `cells / span` instead of dividing
/// by `delta`. Both the precompute and queries go through [`UniformGrid::cell`],
/// and the mapping is monotone in `x`, which is all the binner relies on.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformGrid {
    origin: f64,
    delta: f64,
    cells: usize,
    scale: f64,
}

impl UniformGrid {
    /// Grid over `bins` with `num_bins + extra_cells` cells.
    pub fn new(bins: &BinSet, extra_cells: usize) -> Self {
        let cells = bins.num_bins() + extra_cells;
        let origin = bins.low();
        let span = bins.high() - origin;
        UniformGrid {
            origin,
            delta: span / cells as f64,
            cells,
            scale: cells as f64 / span,
        }
    }

    #[inline]
    pub fn origin(&self) -> f64 {
        self.origin
    }

    #[inline]
    pub fn delta(&self) -> f64 {
        self.delta
    }

    #[inline]
    pub fn cells(&self) -> usize {
        self.cells
    }

    /// 1-based cell of `x`, clamped into `1..=cells`.
    ///
    /// Intended for `origin <= x < origin + cells * delta`; values outside are
    /// clamped to the first or last cell. NaN maps to cell 1.
    #[inline]
    pub fn cell(&self, x: f64) -> usize {
        // Saturating conversion: negatives and NaN become 0.
        let q0 = ((x - self.origin) * self.scale) as usize;
        q0.min(self.cells - 1) + 1
    }

    /// Same as [`cell`](Self::cell) for `x >= origin`, which makes the
    /// offset non-negative; a signed conversion is then exact and cheaper
    /// than the unsigned one. Other inputs give an unspecified cell in range.
    #[inline]
    pub(crate) fn cell_from_origin(&self, x: f64) -> usize {
        let q0 = ((x - self.origin) * self.scale) as i64 as usize;
        q0.min(self.cells - 1) + 1
    }

    /// Left edge `u_q` of 1-based cell `q`.
    pub fn edge(&self, q: usize) -> f64 {
        self.origin + (q - 1) as f64 * self.delta
    }
}

/// Builds the uniform grid for `bins` with `extra_cells` additional cells.
pub fn build_grid(bins: &BinSet, extra_cells: usize) -> UniformGrid {
    UniformGrid::new(bins, extra_cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bins::validate_bins;

    fn worked() -> BinSet {
        validate_bins([2.0, 11.0, 19.0, 20.0, 21.0, 27.0, 29.0, 30.0]).unwrap()
    }

    #[test]
    fn worked_example_grid() {
        let g = build_grid(&worked(), 0);
        assert_eq!(g.origin(), 2.0);
        assert_eq!(g.cells(), 7);
        assert_eq!(g.delta(), 4.0);
        let edges: Vec<f64> = (1..=8).map(|q| g.edge(q)).collect();
        assert_eq!(edges, vec![2.0, 6.0, 10.0, 14.0, 18.0, 22.0, 26.0, 30.0]);
    }

    #[test]
    fn worked_example_cells() {
        let g = build_grid(&worked(), 0);
        assert_eq!(g.cell(25.0), 6);
        assert_eq!(g.cell(13.0), 3);
        assert_eq!(g.cell(2.0), 1);
        assert_eq!(g.cell(19.5), 5);
        assert_eq!(g.cell(29.999), 7);
    }

    #[test]
    fn clamps_outside_range() {
        let g = build_grid(&worked(), 0);
        assert_eq!(g.cell(30.0), 7);
        assert_eq!(g.cell(1e300), 7);
        assert_eq!(g.cell(-1e300), 1);
        assert_eq!(g.cell(f64::NAN), 1);
    }

    #[test]
    fn unit_grid() {
        let g = build_grid(&validate_bins([0.0, 1.0]).unwrap(), 0);
        assert_eq!((g.origin(), g.cells(), g.delta()), (0.0, 1, 1.0));
    }

    #[test]
    fn oversampled_grid_spans_range() {
        let g = build_grid(&worked(), 8);
        assert_eq!(g.cells(), 15);
        assert_eq!(g.delta(), 28.0 / 15.0);
        let top = g.origin() + g.cells() as f64 * g.delta();
        assert!((top - 30.0).abs() <= f64::EPSILON * 30.0);
    }

    #[test]
    fn fast_path_agrees_from_origin() {
        for k in [0, 3, 8, 100] {
            let g = build_grid(&worked(), k);
            let mut x = 2.0f64;
            while x < 40.0 {
                assert_eq!(g.cell(x), g.cell_from_origin(x), "x={x}");
                x += 0.013;
            }
            for q in 1..=g.cells() {
                let e = g.edge(q);
                for v in [e.next_down(), e, e.next_up()] {
                    if v >= 2.0 {
                        assert_eq!(g.cell(v), g.cell_from_origin(v), "edge {q}");
                    }
                }
            }
        }
    }

    #[test]
    fn cell_is_monotone_across_edges() {
        let g = build_grid(&worked(), 8);
        let mut prev = 0;
        let mut x = 2.0f64;
        while x < 30.0 {
            let q = g.cell(x);
            assert!(q >= prev);
            prev = q;
            x = x.next_up().max(x + 1e-3);
        }
    }
}
