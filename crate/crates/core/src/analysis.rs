//! Occupancy model for how interior boundaries land in grid cells.
//!
//! `m1` boundaries are spread over `m2` cells and every weak composition of
//! `m1` into `m2` parts is taken as equally likely. A composition is a row of
//! `m2` slots; `C` counts rows and `C_j` counts, for one fixed slot position,
//! the rows where that slot holds exactly `j`. `P_j = C_j / C` is then the
//! probability that a cell holds `j` boundaries.
//!
//! Counts are exact big integers. Probabilities for large models come from the
//! ratio recurrence `P_{j+1} = (m1 - j) / (m2 + m1 - j - 2) * P_j`, whose
//! factors never exceed one, so it stays accurate where the binomials would
//! overflow any fixed-width type.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Largest model enumerated by [`enumerate_compositions`].
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

/// Models with `m1 + m2` at or below this get their recurrence checked
/// against exact `C_j / C`.
pub const EXACT_CROSSCHECK_LIMIT: usize = 64;

const CROSSCHECK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("model needs m1 >= 1 and m2 >= 1, got m1={m1} m2={m2}")]
    InvalidModel { m1: usize, m2: usize },
    #[error("slot value {j} out of range 0..={m1}")]
    JOutOfRange { j: usize, m1: usize },
    #[error("{count} compositions exceed the enumeration limit of {ENUMERATION_LIMIT}")]
    TooLargeToEnumerate { count: BigUint },
    #[error("slot probabilities need m2 >= 2, got m2={m2}")]
    DegenerateModel { m2: usize },
    #[error("no slot can hold more than two boundaries (m1={m1}, m2={m2})")]
    EmptyTail { m1: usize, m2: usize },
    #[error("recurrence P_{j}={recurrence} disagrees with exact value {exact}")]
    InconsistentModel {
        j: usize,
        recurrence: f64,
        exact: f64,
    },
}

/// `m1` values distributed over `m2` cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OccupancyModel {
    m1: usize,
    m2: usize,
}

impl OccupancyModel {
    pub fn new(m1: usize, m2: usize) -> Result<Self, AnalysisError> {
        if m1 == 0 || m2 == 0 {
            return Err(AnalysisError::InvalidModel { m1, m2 });
        }
        Ok(OccupancyModel { m1, m2 })
    }

    pub fn m1(&self) -> usize {
        self.m1
    }

    pub fn m2(&self) -> usize {
        self.m2
    }
}

/// Exact binomial coefficient; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // acc * (n - i) is always divisible by i + 1 here.
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `C = binom(m1 + m2 - 1, m1)`, the number of weak compositions.
pub fn count_compositions(model: &OccupancyModel) -> BigUint {
    binomial((model.m1 + model.m2 - 1) as u64, model.m1 as u64)
}

/// `C_j = binom(m2 + m1 - j - 2, m1 - j)`: compositions of the remaining
/// `m1 - j` into the other `m2 - 1` slots.
pub fn count_slot_value(model: &OccupancyModel, j: usize) -> Result<BigUint, AnalysisError> {
    if j > model.m1 {
        return Err(AnalysisError::JOutOfRange { j, m1: model.m1 });
    }
    let k = model.m1 - j;
    if k == 0 {
        return Ok(BigUint::one());
    }
    // m2 = 1 leaves no other slot to hold the remainder.
    let n = (model.m2 + model.m1) as i64 - j as i64 - 2;
    if n < 0 {
        return Ok(BigUint::zero());
    }
    Ok(binomial(n as u64, k as u64))
}

/// Iterator over every weak composition of `m1` into `m2` parts, in
/// descending lexicographic order starting at `(m1, 0, ..., 0)`.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Option<Vec<usize>>,
}

impl Iterator for Compositions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        let last = next.len() - 1;
        if let Some(i) = (0..last).rev().find(|&i| next[i] > 0) {
            next[i] -= 1;
            let rest: usize = next[i + 1..].iter().sum::<usize>() + 1;
            next[i + 1..].fill(0);
            next[i + 1] = rest;
            self.current = Some(next);
        }
        Some(out)
    }
}

/// Enumerates all compositions, refusing models with more than
/// [`ENUMERATION_LIMIT`] of them.
pub fn enumerate_compositions(model: &OccupancyModel) -> Result<Compositions, AnalysisError> {
    let count = count_compositions(model);
    if count > BigUint::from(ENUMERATION_LIMIT) {
        return Err(AnalysisError::TooLargeToEnumerate { count });
    }
    let mut first = vec![0; model.m2];
    first[0] = model.m1;
    Ok(Compositions {
        current: Some(first),
    })
}

/// Exact `P_j = C_j / C` for `j = 0..=m1`.
pub fn exact_slot_probabilities(model: &OccupancyModel) -> Vec<BigRational> {
    let c = count_compositions(model);
    (0..=model.m1)
        .map(|j| {
            let cj = count_slot_value(model, j).expect("j in range");
            BigRational::new(cj.into(), c.clone().into())
        })
        .collect()
}

/// Slot-value distribution of a model with its derived means.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotDistribution {
    /// `P_0 ..= P_{m1}`.
    pub probs: Vec<f64>,
    /// Mean slot value, `m1 / m2`.
    pub mu_all: f64,
    /// Mean slot value over slots holding more than two; `None` when `m1 < 3`.
    pub mu_gt2: Option<f64>,
    /// `P = sum_{j >= 3} P_j`.
    pub p_tail: f64,
}

impl SlotDistribution {
    pub fn p(&self, j: usize) -> f64 {
        self.probs.get(j).copied().unwrap_or(0.0)
    }

    /// `(mu_all - P_1 - 2 P_2) / (1 - P_0 - P_1 - P_2)` evaluated literally.
    ///
    /// Algebraically equal to `mu_gt2`, but it cancels catastrophically once
    /// the tail gets small; `mu_gt2` sums the tail directly.
    pub fn mean_gt2_closed_form(&self) -> f64 {
        let (p0, p1, p2) = (self.p(0), self.p(1), self.p(2));
        (self.mu_all - p1 - 2.0 * p2) / (1.0 - p0 - p1 - p2)
    }

    /// Probability that a query needs at most two comparisons.
    pub fn p_constant(&self) -> f64 {
        self.p(0) + self.p(1) + self.p(2)
    }
}

/// `P_j` from the ratio recurrence, plus `mu_all`, `p_tail` and `mu_gt2`.
///
/// For `m1 + m2 <= 64` every `P_j` is also computed exactly and the two must
/// agree to `1e-12`.
pub fn slot_probabilities(model: &OccupancyModel) -> Result<SlotDistribution, AnalysisError> {
    let (m1, m2) = (model.m1, model.m2);
    if m2 < 2 {
        return Err(AnalysisError::DegenerateModel { m2 });
    }
    let mut probs = Vec::with_capacity(m1 + 1);
    let mut p = (m2 - 1) as f64 / (m1 + m2 - 1) as f64;
    probs.push(p);
    for j in 0..m1 {
        p *= (m1 - j) as f64 / (m2 + m1 - j - 2) as f64;
        probs.push(p);
    }

    if m1 + m2 <= EXACT_CROSSCHECK_LIMIT {
        for (j, exact) in exact_slot_probabilities(model).iter().enumerate() {
            let exact = exact.to_f64().unwrap_or(f64::NAN);
            // Negated so that a NaN on either side also counts as a mismatch.
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !((probs[j] - exact).abs() <= CROSSCHECK_TOL) {
                return Err(AnalysisError::InconsistentModel {
                    j,
                    recurrence: probs[j],
                    exact,
                });
            }
        }
    }

    let tail = probs.get(3..).unwrap_or(&[]);
    let p_tail: f64 = tail.iter().sum();
    let weighted: f64 = tail
        .iter()
        .enumerate()
        .map(|(i, &p)| (i + 3) as f64 * p)
        .sum();
    let mu_gt2 = (p_tail > 0.0).then(|| weighted / p_tail);

    Ok(SlotDistribution {
        probs,
        mu_all: m1 as f64 / m2 as f64,
        mu_gt2,
        p_tail,
    })
}

/// Mean occupancy of cells holding more than two boundaries.
pub fn mean_gt2(model: &OccupancyModel) -> Result<f64, AnalysisError> {
    slot_probabilities(model)?
        .mu_gt2
        .ok_or(AnalysisError::EmptyTail {
            m1: model.m1,
            m2: model.m2,
        })
}

/// Modelled comparison costs of binning `n` values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedupEstimate {
    /// Binary search over all boundaries: `n lg m1`.
    pub t_bs: f64,
    /// Grid method: `n (P_0 + 2 P_1 + 3 P_2 + (1 + lg mu_gt2) P)`.
    pub t_p: f64,
    pub ratio: f64,
}

pub fn theoretical_speedup(
    model: &OccupancyModel,
    n: u64,
) -> Result<SpeedupEstimate, AnalysisError> {
    let dist = slot_probabilities(model)?;
    let mu = dist.mu_gt2.ok_or(AnalysisError::EmptyTail {
        m1: model.m1,
        m2: model.m2,
    })?;
    let n = n as f64;
    let t_bs = n * (model.m1 as f64).log2();
    let t_p = n * (dist.p(0) + 2.0 * dist.p(1) + 3.0 * dist.p(2) + (1.0 + mu.log2()) * dist.p_tail);
    Ok(SpeedupEstimate {
        t_bs,
        t_p,
        ratio: t_bs / t_p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn model(m1: usize, m2: usize) -> OccupancyModel {
        OccupancyModel::new(m1, m2).unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    /// Counts compositions and slot values by brute force.
    fn brute(m1: usize, m2: usize) -> (u64, Vec<u64>) {
        let mut rows = 0u64;
        let mut slots = vec![0u64; m1 + 1];
        for row in enumerate_compositions(&model(m1, m2)).unwrap() {
            rows += 1;
            for v in row {
                slots[v] += 1;
            }
        }
        (rows, slots)
    }

    #[test]
    fn small_example_counts() {
        let m = model(3, 3);
        assert_eq!(count_compositions(&m), big(10));
        let cj: Vec<BigUint> = (0..=3).map(|j| count_slot_value(&m, j).unwrap()).collect();
        assert_eq!(cj, vec![big(4), big(3), big(2), big(1)]);
        assert_eq!(
            count_slot_value(&m, 4).unwrap_err(),
            AnalysisError::JOutOfRange { j: 4, m1: 3 }
        );
    }

    #[test]
    fn small_example_listing() {
        let rows: Vec<Vec<usize>> = enumerate_compositions(&model(3, 3)).unwrap().collect();
        assert_eq!(rows.len(), 10);
        for want in [
            [3, 0, 0],
            [2, 1, 0],
            [2, 0, 1],
            [1, 2, 0],
            [1, 0, 2],
            [1, 1, 1],
            [0, 3, 0],
            [0, 2, 1],
            [0, 1, 2],
            [0, 0, 3],
        ] {
            assert!(rows.contains(&want.to_vec()), "missing {want:?}");
        }
        assert_eq!(rows[0], vec![3, 0, 0]);
    }

    #[test]
    fn tiny_models() {
        assert_eq!(count_compositions(&model(1, 1)), big(1));
        let rows: Vec<_> = enumerate_compositions(&model(1, 2)).unwrap().collect();
        assert_eq!(rows, vec![vec![1, 0], vec![0, 1]]);
        let rows: Vec<_> = enumerate_compositions(&model(4, 1)).unwrap().collect();
        assert_eq!(rows, vec![vec![4]]);
        assert_eq!(count_slot_value(&model(4, 1), 4).unwrap(), big(1));
        assert_eq!(count_slot_value(&model(4, 1), 2).unwrap(), big(0));
        assert_eq!(enumerate_compositions(&model(4, 3)).unwrap().count(), 15);
        assert_eq!(count_compositions(&model(4, 3)), big(15));
    }

    #[test]
    fn brute_force_frozen_values() {
        // Weak compositions of 5 into 4 parts: 56 rows. Slots holding 2
        // across all rows: 40, i.e. 10 per slot position.
        let (rows, slots) = brute(5, 4);
        assert_eq!(rows, 56);
        assert_eq!(slots[2], 40);
        assert_eq!(count_compositions(&model(5, 4)), big(56));
        assert_eq!(count_slot_value(&model(5, 4), 2).unwrap(), big(10));
    }

    #[test]
    fn slot_value_at_m1_is_one() {
        for m1 in 1..8 {
            for m2 in 1..8 {
                assert_eq!(count_slot_value(&model(m1, m2), m1).unwrap(), big(1));
            }
        }
    }

    #[test]
    fn enumeration_guard() {
        let err = enumerate_compositions(&model(30, 30)).unwrap_err();
        assert!(matches!(err, AnalysisError::TooLargeToEnumerate { .. }));
    }

    #[test]
    fn grid_identities() {
        for m1 in 1..=20 {
            for m2 in 1..=20 {
                let m = model(m1, m2);
                let c = count_compositions(&m);
                let cj: Vec<BigUint> = (0..=m1).map(|j| count_slot_value(&m, j).unwrap()).collect();
                let sum: BigUint = cj.iter().sum();
                assert_eq!(c, sum, "m1={m1} m2={m2}");
                let weighted: BigUint = cj
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * BigUint::from(j))
                    .sum();
                assert_eq!(&c * m1, weighted * m2, "m1={m1} m2={m2}");
            }
        }
    }

    #[test]
    fn small_example_probabilities() {
        let d = slot_probabilities(&model(3, 3)).unwrap();
        for (got, want) in d.probs.iter().zip([0.4, 0.3, 0.2, 0.1]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!((d.p_tail - 0.1).abs() < 1e-15);
        assert!((d.mu_all - 1.0).abs() < 1e-15);
        // Only j = 3 is in the tail, so the conditional mean is exactly 3.
        assert!((d.mu_gt2.unwrap() - 3.0).abs() < 1e-12);
        assert!((d.mean_gt2_closed_form() - 3.0).abs() < 1e-12);

        let exact = exact_slot_probabilities(&model(3, 3));
        let want: Vec<BigRational> = [(2, 5), (3, 10), (1, 5), (1, 10)]
            .iter()
            .map(|&(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
            .collect();
        assert_eq!(exact, want);
    }

    #[test]
    fn degenerate_and_empty_tail() {
        assert_eq!(
            slot_probabilities(&model(3, 1)).unwrap_err(),
            AnalysisError::DegenerateModel { m2: 1 }
        );
        assert!(matches!(
            mean_gt2(&model(2, 5)),
            Err(AnalysisError::EmptyTail { .. })
        ));
        assert!(OccupancyModel::new(0, 3).is_err());
        assert!(OccupancyModel::new(3, 0).is_err());
    }

    #[test]
    fn limits() {
        let d = slot_probabilities(&model(1_000_000, 1_000_000)).unwrap();
        assert!((d.p(0) - 0.5).abs() < 1e-5);
        assert!((d.p(1) - 0.25).abs() < 1e-5);
        assert!((d.p(2) - 0.125).abs() < 1e-5);

        let d = slot_probabilities(&model(1_000_000, 2_000_000)).unwrap();
        assert!((d.p(0) - 2.0 / 3.0).abs() < 1e-5);
        assert!((d.p(1) - 2.0 / 9.0).abs() < 1e-5);
        assert!((d.p(2) - 2.0 / 27.0).abs() < 1e-5);
        assert!(d.p_constant() > 0.95);
    }

    #[test]
    fn mean_gt2_tends_to_three_as_cells_grow() {
        let mut prev = f64::INFINITY;
        for m2 in [64, 1_000, 10_000, 100_000] {
            let mu = mean_gt2(&model(64, m2)).unwrap();
            assert!(mu > 3.0 && mu < prev, "m2={m2} mu={mu}");
            prev = mu;
        }
        assert!(prev - 3.0 < 0.01);
    }

    #[test]
    fn closed_form_matches_tail_sum_for_moderate_models() {
        for m in [4, 10, 100, 1000] {
            let d = slot_probabilities(&model(m, m)).unwrap();
            let a = d.mu_gt2.unwrap();
            let b = d.mean_gt2_closed_form();
            assert!((a - b).abs() < 1e-9, "m={m}: {a} vs {b}");
        }
    }

    #[test]
    fn speedup_model() {
        // m1 = m2 = 3 by hand: t_bs = lg 3, t_p = 0.4 + 0.6 + 0.6 + 0.1 (1 + lg 3).
        let s = theoretical_speedup(&model(3, 3), 1).unwrap();
        let lg3 = 3f64.log2();
        assert!((s.t_bs - lg3).abs() < 1e-12);
        assert!((s.t_p - (1.6 + 0.1 * (1.0 + lg3))).abs() < 1e-12);

        let a = theoretical_speedup(&model(512, 512), 1).unwrap();
        let b = theoretical_speedup(&model(512, 512), 1000).unwrap();
        assert!((a.ratio - b.ratio).abs() < 1e-12);
        assert!((b.t_bs - 1000.0 * a.t_bs).abs() < 1e-9);
    }

    #[test]
    fn speedup_model_large_grids() {
        // Limits 1/2, 1/4, 1/8 and mu -> 4: 0.5 + 0.5 + 0.375 + 3 * 0.125.
        let same = theoretical_speedup(&model(512, 512), 1).unwrap();
        assert!((same.t_p - 1.75).abs() < 1e-3, "{}", same.t_p);
        assert!((same.ratio - 5.14).abs() < 0.01);

        // Twice as many cells: limits 2/3, 2/9, 2/27 and mu near 7/2.
        let doubled = theoretical_speedup(&model(512, 1024), 1).unwrap();
        assert!((doubled.t_p - 1.4375).abs() < 1e-3, "{}", doubled.t_p);
        assert!((doubled.ratio - 0.6 * 10.0).abs() < 0.3);
    }
}
