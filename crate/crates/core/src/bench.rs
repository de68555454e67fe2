//! Timing experiments comparing the accelerated binner against binary (and
//! optionally linear) search.
//!
//! Experiment 1 sweeps the bin count with a grid of exactly `m` cells.
//! Experiment 2 keeps boundaries and values fixed per `m` and sweeps the number
//! of extra grid cells `k`. Each timed sample is one full pass over the
//! values into a preallocated buffer; samples for all methods are interleaved
//! run by run so slow drift on the machine hits every method alike. Before any
//! timing the accelerated output is checked against binary search and a
//! mismatch aborts the experiment.

use std::hint::black_box;
use std::io::Write;
use std::time::Instant;

use thiserror::Error;

use crate::baselines::{binary_search_into, linear_search_into};
use crate::binner::{precompute, AcceleratedBinner};
use crate::bins::{BinResult, BinSet};
use crate::datagen::{
    gen_boundaries, gen_values, BoundaryStyle, DataError, DataSpec, ValueDistribution,
};

pub const CSV_HEADER: [&str; 14] = [
    "m",
    "k",
    "n",
    "distribution",
    "method",
    "median_ns",
    "min_ns",
    "max_ns",
    "precompute_ns",
    "speedup_vs_binary",
    "f0",
    "f1",
    "f2",
    "f_gt2",
];

pub const MIN_RUNS: usize = 3;
pub const MIN_N: usize = 10_000;

/// Range every benchmark boundary set spans.
pub const BENCH_RANGE: (f64, f64) = (0.0, 1000.0);

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid benchmark config: {0}")]
    ConfigInvalid(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(
        "accelerated binner disagrees with binary search (m={m}, k={k}, {distribution}): \
         value #{index} = {value} gave {got}, expected {expected}"
    )]
    OracleMismatch {
        m: usize,
        k: usize,
        distribution: ValueDistribution,
        index: usize,
        value: f64,
        expected: usize,
        got: usize,
    },
    #[error("failed to write report: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Proposed,
    Binary,
    Linear,
    /// [`AcceleratedBinner::bin_into_par`]; only timed on request.
    ProposedParallel,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::Binary => "binary",
            Method::Linear => "linear",
            Method::ProposedParallel => "proposed-parallel",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub m_values: Vec<usize>,
    /// Extra grid cells for experiment 2; empty means `0..=m+1` for each `m`.
    pub k_values: Vec<usize>,
    pub n: usize,
    pub runs: usize,
    pub distributions: Vec<ValueDistribution>,
    pub boundary_style: BoundaryStyle,
    pub seed: u64,
    pub include_linear: bool,
    /// Adds a `proposed-parallel` row to experiment 1.
    pub include_parallel: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            m_values: vec![4, 8, 16, 32, 64, 128, 256, 512],
            k_values: Vec::new(),
            n: 2_000_000,
            runs: 30,
            distributions: vec![ValueDistribution::Uniform],
            boundary_style: BoundaryStyle::SortedUniformDraws,
            seed: 0x5eed,
            include_linear: false,
            include_parallel: false,
        }
    }
}

impl BenchConfig {
    /// Defaults for experiment 2: the bin counts 10, 25 and 50.
    pub fn experiment_2_defaults() -> Self {
        BenchConfig {
            m_values: vec![10, 25, 50],
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |msg: String| Err(BenchError::ConfigInvalid(msg));
        if self.m_values.is_empty() {
            return bad("no m values".into());
        }
        if self.m_values.contains(&0) {
            return bad("m values must be positive".into());
        }
        if self.distributions.is_empty() {
            return bad("no distributions".into());
        }
        if self.runs < MIN_RUNS {
            return bad(format!(
                "runs must be at least {MIN_RUNS}, got {}",
                self.runs
            ));
        }
        if self.n < MIN_N {
            return bad(format!("n must be at least {MIN_N}, got {}", self.n));
        }
        Ok(())
    }

    fn k_sweep(&self, m: usize) -> Vec<usize> {
        if self.k_values.is_empty() {
            (0..=m + 1).collect()
        } else {
            self.k_values.clone()
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub distribution: ValueDistribution,
    pub method: Method,
    pub median_ns: u64,
    pub min_ns: u64,
    pub max_ns: u64,
    pub precompute_ns: u64,
    pub speedup_vs_binary: f64,
    pub fractions: (f64, f64, f64, f64),
}

impl BenchRow {
    pub fn per_item_ns(&self) -> f64 {
        self.median_ns as f64 / self.n as f64
    }

    fn record(&self) -> [String; 14] {
        let (f0, f1, f2, f3) = self.fractions;
        [
            self.m.to_string(),
            self.k.to_string(),
            self.n.to_string(),
            self.distribution.name().to_string(),
            self.method.name().to_string(),
            self.median_ns.to_string(),
            self.min_ns.to_string(),
            self.max_ns.to_string(),
            self.precompute_ns.to_string(),
            format!("{:.6}", self.speedup_vs_binary),
            format!("{f0:.6}"),
            format!("{f1:.6}"),
            format!("{f2:.6}"),
            format!("{f3:.6}"),
        ]
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn find(
        &self,
        m: usize,
        k: usize,
        distribution: ValueDistribution,
        method: Method,
    ) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.m == m && r.k == k && r.distribution == distribution && r.method == method)
    }

    /// Throughput of the accelerated binner with `k` extra cells relative to
    /// `k = 0`, on the same data.
    pub fn extra_speedup(
        &self,
        m: usize,
        k: usize,
        distribution: ValueDistribution,
    ) -> Option<f64> {
        let base = self.find(m, 0, distribution, Method::Proposed)?;
        let row = self.find(m, k, distribution, Method::Proposed)?;
        Some(base.median_ns as f64 / row.median_ns as f64)
    }

    /// Writes the header and every row as CSV (LF line endings).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), BenchError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(CSV_HEADER)?;
        for row in &self.rows {
            w.write_record(row.record())?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Median, min and max of a set of samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimingStats {
    pub median_ns: u64,
    pub min_ns: u64,
    pub max_ns: u64,
}

impl TimingStats {
    pub fn from_samples(samples: &[u64]) -> Self {
        assert!(!samples.is_empty(), "no timing samples");
        let mut s = samples.to_vec();
        s.sort_unstable();
        let mid = s.len() / 2;
        let median_ns = if s.len() % 2 == 1 {
            s[mid]
        } else {
            (s[mid - 1] + s[mid]) / 2
        };
        TimingStats {
            median_ns,
            min_ns: s[0],
            max_ns: s[s.len() - 1],
        }
    }
}

// splitmix64 finalizer; spreads config coordinates into independent seeds.
fn mix(seed: u64, a: u64, b: u64) -> u64 {
    let mut z =
        seed ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn dist_id(d: ValueDistribution) -> u64 {
    ValueDistribution::ALL.iter().position(|&x| x == d).unwrap() as u64 + 1
}

/// Boundaries and values for one `(m, distribution)` point.
fn dataset(
    m: usize,
    style: BoundaryStyle,
    distribution: ValueDistribution,
    n: usize,
    seed: u64,
) -> Result<(BinSet, Vec<f64>), BenchError> {
    Ok((boundaries(m, style, seed)?, values(distribution, n, seed)?))
}

fn boundaries(m: usize, style: BoundaryStyle, seed: u64) -> Result<BinSet, BenchError> {
    let (low, high) = BENCH_RANGE;
    Ok(gen_boundaries(m, style, low, high, mix(seed, m as u64, 0))?)
}

/// Query values depend only on the distribution, so every `m` sees the same data.
fn values(distribution: ValueDistribution, n: usize, seed: u64) -> Result<Vec<f64>, BenchError> {
    let (low, high) = BENCH_RANGE;
    let spec = DataSpec::new(
        distribution,
        n,
        low,
        high,
        mix(seed, 0, dist_id(distribution)),
    )?;
    Ok(gen_values(&spec))
}

fn verify(
    acc: &AcceleratedBinner,
    xs: &[f64],
    k: usize,
    distribution: ValueDistribution,
    expected: &[BinResult],
) -> Result<(), BenchError> {
    let got = acc.bin_slice(xs).expect("generated values are finite");
    if let Some(index) = got.iter().zip(expected).position(|(a, b)| a != b) {
        return Err(BenchError::OracleMismatch {
            m: acc.bins().num_bins(),
            k,
            distribution,
            index,
            value: xs[index],
            expected: expected[index].0,
            got: got[index].0,
        });
    }
    Ok(())
}

fn time_ns(f: impl FnOnce()) -> u64 {
    let start = Instant::now();
    f();
    start.elapsed().as_nanos() as u64
}

/// A timed engine: one pass over `xs` into `out`.
type Pass<'a> = Box<dyn Fn(&[f64], &mut [BinResult]) + 'a>;

fn proposed_pass(acc: &AcceleratedBinner) -> Pass<'_> {
    Box::new(move |xs, out| {
        black_box(acc).bin_into(black_box(xs), out).unwrap();
    })
}

fn binary_pass(bins: &BinSet) -> Pass<'_> {
    Box::new(move |xs, out| {
        binary_search_into(black_box(bins), black_box(xs), out).unwrap();
    })
}

fn parallel_pass(acc: &AcceleratedBinner) -> Pass<'_> {
    Box::new(move |xs, out| {
        black_box(acc).bin_into_par(black_box(xs), out).unwrap();
    })
}

fn linear_pass(bins: &BinSet) -> Pass<'_> {
    Box::new(move |xs, out| {
        linear_search_into(black_box(bins), black_box(xs), out).unwrap();
    })
}

/// Warms every pass once, then takes `runs` interleaved samples of each.
fn time_interleaved(passes: &[Pass<'_>], xs: &[f64], runs: usize) -> Vec<TimingStats> {
    let mut out = vec![BinResult(0); xs.len()];
    for pass in passes {
        pass(xs, &mut out);
    }
    let mut samples = vec![Vec::with_capacity(runs); passes.len()];
    for _ in 0..runs {
        for (pass, s) in passes.iter().zip(samples.iter_mut()) {
            s.push(time_ns(|| pass(xs, &mut out)));
            black_box(&out);
        }
    }
    samples
        .iter()
        .map(|s| TimingStats::from_samples(s))
        .collect()
}

fn time_precompute(bins: &BinSet, k: usize, runs: usize) -> (AcceleratedBinner, u64) {
    let mut samples = Vec::with_capacity(runs);
    let mut acc = None;
    for _ in 0..runs {
        let copy = bins.clone();
        let start = Instant::now();
        let built = black_box(precompute(copy, k));
        samples.push(start.elapsed().as_nanos() as u64);
        acc = Some(built);
    }
    (acc.unwrap(), TimingStats::from_samples(&samples).median_ns)
}

#[allow(clippy::too_many_arguments)]
fn row(
    m: usize,
    k: usize,
    n: usize,
    distribution: ValueDistribution,
    method: Method,
    stats: TimingStats,
    precompute_ns: u64,
    binary_median: u64,
    fractions: (f64, f64, f64, f64),
) -> BenchRow {
    BenchRow {
        m,
        k,
        n,
        distribution,
        method,
        median_ns: stats.median_ns,
        min_ns: stats.min_ns,
        max_ns: stats.max_ns,
        precompute_ns,
        speedup_vs_binary: binary_median as f64 / stats.median_ns.max(1) as f64,
        fractions,
    }
}

/// Speedup over binary search as the bin count grows, with `m` grid cells.
///
/// All `(m, method)` passes for one distribution are timed round-robin on the
/// same values, so comparisons across `m` see the same machine conditions.
pub fn run_experiment_1(config: &BenchConfig) -> Result<BenchReport, BenchError> {
    config.validate()?;
    let mut report = BenchReport::default();
    for &distribution in &config.distributions {
        let xs = values(distribution, config.n, config.seed)?;
        let mut expected = vec![BinResult(0); xs.len()];

        struct Prepared {
            m: usize,
            bins: BinSet,
            acc: AcceleratedBinner,
            precompute_ns: u64,
            fractions: (f64, f64, f64, f64),
        }
        let mut prepared = Vec::with_capacity(config.m_values.len());
        for &m in &config.m_values {
            let bins = boundaries(m, config.boundary_style, config.seed)?;
            let (acc, precompute_ns) = time_precompute(&bins, 0, config.runs);
            binary_search_into(&bins, &xs, &mut expected).expect("finite values");
            verify(&acc, &xs, 0, distribution, &expected)?;
            if config.include_linear {
                let mut lin = vec![BinResult(0); xs.len()];
                linear_search_into(&bins, &xs, &mut lin).expect("finite values");
                assert_eq!(lin, expected, "linear and binary search disagree");
            }
            let fractions = acc.case_counts(&xs).expect("finite values").fractions();
            prepared.push(Prepared {
                m,
                bins,
                acc,
                precompute_ns,
                fractions,
            });
        }

        let mut methods = vec![Method::Proposed, Method::Binary];
        if config.include_linear {
            methods.push(Method::Linear);
        }
        if config.include_parallel {
            methods.push(Method::ProposedParallel);
        }
        let mut passes = Vec::with_capacity(prepared.len() * methods.len());
        for p in &prepared {
            for method in &methods {
                passes.push(match method {
                    Method::Proposed => proposed_pass(&p.acc),
                    Method::Binary => binary_pass(&p.bins),
                    Method::Linear => linear_pass(&p.bins),
                    Method::ProposedParallel => parallel_pass(&p.acc),
                });
            }
        }
        let stats = time_interleaved(&passes, &xs, config.runs);

        for (p, stats) in prepared.iter().zip(stats.chunks(methods.len())) {
            let binary_median = stats[1].median_ns;
            for (&method, &s) in methods.iter().zip(stats) {
                let pre = if method == Method::Proposed {
                    p.precompute_ns
                } else {
                    0
                };
                report.rows.push(row(
                    p.m,
                    0,
                    config.n,
                    distribution,
                    method,
                    s,
                    pre,
                    binary_median,
                    p.fractions,
                ));
            }
        }
    }
    Ok(report)
}

/// Extra speedup from `m + k` grid cells on fixed data per `m`.
///
/// Emits one `binary` row (`k = 0`) and one `proposed` row per `k` for every
/// `(m, distribution)`.
pub fn run_experiment_2(config: &BenchConfig) -> Result<BenchReport, BenchError> {
    config.validate()?;
    let mut report = BenchReport::default();
    for &m in &config.m_values {
        let ks = config.k_sweep(m);
        for &distribution in &config.distributions {
            let (bins, xs) = dataset(
                m,
                config.boundary_style,
                distribution,
                config.n,
                config.seed,
            )?;
            let mut expected = vec![BinResult(0); xs.len()];
            binary_search_into(&bins, &xs, &mut expected).expect("finite values");

            let mut built = Vec::with_capacity(ks.len());
            for &k in &ks {
                let (acc, pre) = time_precompute(&bins, k, config.runs);
                verify(&acc, &xs, k, distribution, &expected)?;
                let fractions = acc.case_counts(&xs).expect("finite values").fractions();
                built.push((k, acc, pre, fractions));
            }
            let base_fractions = precompute(bins.clone(), 0)
                .case_counts(&xs)
                .expect("finite values")
                .fractions();

            let mut passes = vec![binary_pass(&bins)];
            passes.extend(built.iter().map(|(_, acc, _, _)| proposed_pass(acc)));
            let stats = time_interleaved(&passes, &xs, config.runs);
            let binary_median = stats[0].median_ns;

            report.rows.push(row(
                m,
                0,
                config.n,
                distribution,
                Method::Binary,
                stats[0],
                0,
                binary_median,
                base_fractions,
            ));
            for ((k, _, pre, fractions), s) in built.iter().zip(&stats[1..]) {
                report.rows.push(row(
                    m,
                    *k,
                    config.n,
                    distribution,
                    Method::Proposed,
                    *s,
                    *pre,
                    binary_median,
                    *fractions,
                ));
            }
        }
    }
    Ok(report)
}

/// Fraction of `n` generated queries taking each path, for `m1` bins and
/// `m1 + k` grid cells.
pub fn measure_case_fractions(
    m1: usize,
    k: usize,
    style: BoundaryStyle,
    distribution: ValueDistribution,
    n: usize,
    seed: u64,
) -> Result<(f64, f64, f64, f64), BenchError> {
    let (bins, xs) = dataset(m1, style, distribution, n, seed)?;
    let acc = precompute(bins, k);
    Ok(acc.case_counts(&xs).expect("finite values").fractions())
}
