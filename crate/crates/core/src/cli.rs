//! `fastbin` command-line front end.
//!
//! Exit codes: 0 on success, 1 for bad input or configuration, 2 when the
//! accelerated binner disagrees with its oracle (always a bug).

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;

use crate::analysis::{
    count_compositions, count_slot_value, enumerate_compositions, slot_probabilities,
    theoretical_speedup, OccupancyModel,
};
use crate::baselines::{binary_search_slice, linear_search_slice};
use crate::bench::{run_experiment_1, run_experiment_2, BenchConfig, BenchError};
use crate::binner::precompute;
use crate::bins::{BinResult, BinSet};
use crate::datagen::{BoundaryStyle, ValueDistribution, RNG_ALGORITHM};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

const DEFAULT_SEED: u64 = 0x5eed;

/// Largest `min(m1, m2 - 1)` for which `analyze` prints `C` exactly.
const EXACT_C_LIMIT: usize = 4096;

#[derive(Debug, Parser)]
#[command(
    name = "fastbin",
    version,
    about = "Non-uniform binning via a uniform shadow grid"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bin every value in a file against a boundary file.
    Bin(BinArgs),
    /// Speedup over binary search as the number of bins grows.
    Bench1(Bench1Args),
    /// Extra speedup from oversampling the grid with m + k cells.
    Bench2(Bench2Args),
    /// Print the occupancy model for m1 boundaries over m2 cells.
    Analyze(AnalyzeArgs),
    /// Run the built-in worked examples and identities.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Proposed,
    Binary,
    Linear,
}

#[derive(Debug, Args)]
pub struct BinArgs {
    /// Boundary file: whitespace-separated numbers, '#' lines ignored.
    #[arg(long)]
    pub boundaries: PathBuf,
    /// Value file, same format.
    #[arg(long)]
    pub values: PathBuf,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Extra grid cells beyond the bin count.
    #[arg(long, default_value_t = 0)]
    pub extra_cells: usize,
    /// Binning engine; all produce identical output.
    #[arg(long, value_enum, default_value_t = Engine::Proposed)]
    pub method: Engine,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Number of values binned per run.
    #[arg(long, default_value_t = 2_000_000)]
    pub n: usize,
    /// Timed runs per method (median reported).
    #[arg(long, default_value_t = 30)]
    pub runs: usize,
    /// Value distributions, comma separated.
    #[arg(long = "dist", value_delimiter = ',', default_value = "uniform")]
    pub distributions: Vec<String>,
    /// Boundary placement style.
    #[arg(long, default_value = "sorted-uniform-draws")]
    pub style: String,
    /// Seed for boundaries and values.
    #[arg(long, env = "FASTBIN_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// CSV output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Bench1Args {
    /// Bin counts, comma separated.
    #[arg(
        long = "m",
        value_delimiter = ',',
        default_value = "4,8,16,32,64,128,256,512"
    )]
    pub m_values: Vec<usize>,
    /// Also time linear search.
    #[arg(long)]
    pub linear: bool,
    /// Also time the multi-threaded proposed binner (never used for speedups).
    #[arg(long)]
    pub parallel: bool,
    #[command(flatten)]
    pub common: BenchArgs,
}

#[derive(Debug, Args)]
pub struct Bench2Args {
    /// Bin counts, comma separated.
    #[arg(long = "m", value_delimiter = ',', default_value = "10,25,50")]
    pub m_values: Vec<usize>,
    /// Extra cells: "a..b" (inclusive) or a comma list. Default 0..m+1.
    #[arg(long = "k", value_parser = parse_k_values)]
    pub k_values: Option<KValues>,
    #[command(flatten)]
    pub common: BenchArgs,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Number of bins.
    #[arg(long)]
    pub m1: usize,
    /// Number of grid cells (at least 2).
    #[arg(long)]
    pub m2: usize,
    /// Number of values for the cost model.
    #[arg(long, default_value_t = 1)]
    pub n: u64,
    /// Print `key,value` CSV instead of `key=value` lines.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KValues(pub Vec<usize>);

fn parse_k_values(s: &str) -> Result<KValues, String> {
    let bad = |_| format!("invalid k list '{s}'");
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(bad)?;
        let b: usize = b.trim().parse().map_err(bad)?;
        if a > b {
            return Err(format!("empty k range '{s}'"));
        }
        return Ok(KValues((a..=b).collect()));
    }
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(bad))
        .collect::<Result<Vec<_>, _>>()
        .map(KValues)
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::OracleMismatch { .. } => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

/// Parses whitespace-separated numbers, skipping lines that start with `#`.
pub fn parse_numbers(text: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| format!("line {}: cannot parse '{tok}' as a number", lineno + 1))?;
            out.push(v);
        }
    }
    Ok(out)
}

fn read_numbers(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_numbers(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn with_output<F>(path: Option<&Path>, stdout: &mut dyn Write, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
{
    match path {
        Some(p) => {
            let file = fs::File::create(p)
                .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            let mut w = io::BufWriter::new(file);
            f(&mut w)?;
            w.flush().map_err(input_err)
        }
        None => f(stdout),
    }
}

fn cmd_bin(args: &BinArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let bins = BinSet::new(read_numbers(&args.boundaries)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.boundaries.display())))?;
    let xs = read_numbers(&args.values)?;
    let result: Vec<BinResult> = match args.method {
        Engine::Proposed => precompute(bins, args.extra_cells).bin_slice(&xs),
        Engine::Binary => binary_search_slice(&bins, &xs),
        Engine::Linear => linear_search_slice(&bins, &xs),
    }
    .map_err(|e| CliError::Input(format!("{}: {e}", args.values.display())))?;

    with_output(args.out.as_deref(), stdout, |w| {
        for r in &result {
            writeln!(w, "{r}").map_err(input_err)?;
        }
        Ok(())
    })
}

fn bench_config(m_values: &[usize], common: &BenchArgs) -> Result<BenchConfig, CliError> {
    let distributions = common
        .distributions
        .iter()
        .map(|d| d.parse::<ValueDistribution>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(input_err)?;
    let boundary_style: BoundaryStyle = common.style.parse().map_err(input_err)?;
    Ok(BenchConfig {
        m_values: m_values.to_vec(),
        k_values: Vec::new(),
        n: common.n,
        runs: common.runs,
        distributions,
        boundary_style,
        seed: common.seed,
        include_linear: false,
        include_parallel: false,
    })
}

fn cmd_bench1(
    args: &Bench1Args,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let mut config = bench_config(&args.m_values, &args.common)?;
    config.include_linear = args.linear;
    config.include_parallel = args.parallel;
    config.validate()?;
    let _ = writeln!(
        stderr,
        "# rng: {RNG_ALGORITHM}, seed {}, median of {} runs",
        config.seed, config.runs
    );
    let report = run_experiment_1(&config)?;
    with_output(args.common.out.as_deref(), stdout, |w| {
        report.write_csv(w).map_err(CliError::from)
    })
}

fn cmd_bench2(
    args: &Bench2Args,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let mut config = bench_config(&args.m_values, &args.common)?;
    if let Some(KValues(ks)) = &args.k_values {
        config.k_values = ks.clone();
    }
    config.validate()?;
    let _ = writeln!(
        stderr,
        "# rng: {RNG_ALGORITHM}, seed {}, median of {} runs",
        config.seed, config.runs
    );
    let report = run_experiment_2(&config)?;
    with_output(args.common.out.as_deref(), stdout, |w| {
        report.write_csv(w).map_err(CliError::from)
    })
}

/// Formats a probability-like real without float noise in the last digits.
fn fmt_real(x: f64) -> String {
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// `log10 C` without building the big integer.
fn log10_compositions(m1: usize, m2: usize) -> f64 {
    let n = (m1 + m2 - 1) as f64;
    let k = m1.min(m2 - 1);
    (0..k)
        .map(|i| ((n - i as f64) / (i as f64 + 1.0)).log10())
        .sum()
}

fn cmd_analyze(args: &AnalyzeArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let model = OccupancyModel::new(args.m1, args.m2).map_err(input_err)?;
    let dist = slot_probabilities(&model).map_err(input_err)?;

    let mut lines: Vec<(String, String)> = vec![
        ("m1".into(), args.m1.to_string()),
        ("m2".into(), args.m2.to_string()),
    ];
    let c = if args.m1.min(args.m2 - 1) <= EXACT_C_LIMIT {
        count_compositions(&model).to_string()
    } else {
        format!("~1e{:.3}", log10_compositions(args.m1, args.m2))
    };
    lines.push(("C".into(), c));
    for j in 0..=args.m1.min(10) {
        lines.push((format!("P_{j}"), fmt_real(dist.p(j))));
    }
    lines.push(("P".into(), fmt_real(dist.p_tail)));
    lines.push(("mu_all".into(), fmt_real(dist.mu_all)));
    match theoretical_speedup(&model, args.n) {
        Ok(s) => {
            lines.push(("mu_gt2".into(), fmt_real(dist.mu_gt2.unwrap_or(f64::NAN))));
            lines.push(("t_bs".into(), fmt_real(s.t_bs)));
            lines.push(("t_p".into(), fmt_real(s.t_p)));
            lines.push(("speedup".into(), fmt_real(s.ratio)));
        }
        Err(_) => {
            lines.push(("mu_gt2".into(), "undefined".into()));
            lines.push(("speedup".into(), "undefined".into()));
        }
    }

    let sep = if args.csv { "," } else { "=" };
    if args.csv {
        writeln!(stdout, "key,value").map_err(input_err)?;
    }
    for (k, v) in lines {
        writeln!(stdout, "{k}{sep}{v}").map_err(input_err)?;
    }
    Ok(())
}

/// One named self-test check.
struct Check {
    name: &'static str,
    ok: bool,
}

fn selftest_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    let mut push = |name, ok| checks.push(Check { name, ok });

    let bins = BinSet::new(vec![2.0, 11.0, 19.0, 20.0, 21.0, 27.0, 29.0, 30.0]).unwrap();
    let acc = precompute(bins.clone(), 0);
    push(
        "grid: delta 4, 7 cells from 2",
        acc.grid().delta() == 4.0 && acc.grid().cells() == 7 && acc.grid().origin() == 2.0,
    );
    push(
        "histogram H = 0 0 1 0 3 0 2",
        acc.hist() == [0, 0, 1, 0, 3, 0, 2],
    );
    push(
        "cumulative S = 1 1 1 2 2 5 5 7",
        acc.cumhist() == [1, 1, 1, 2, 2, 5, 5, 7],
    );

    let xs = [25.0, 13.0, 10.5, 19.5, 1.9, 30.0];
    let want: Vec<BinResult> = [5, 2, 1, 3, 0, 8].into_iter().map(BinResult).collect();
    push(
        "proposed: 25 13 10.5 19.5 1.9 30 -> 5 2 1 3 0 8",
        acc.bin_slice(&xs).ok() == Some(want.clone()),
    );
    push(
        "binary search agrees",
        binary_search_slice(&bins, &xs).ok() == Some(want.clone()),
    );
    push(
        "linear search agrees",
        linear_search_slice(&bins, &xs).ok() == Some(want),
    );

    let mut identities = true;
    for m1 in 1..=6 {
        for m2 in 1..=6 {
            let model = OccupancyModel::new(m1, m2).unwrap();
            let mut rows = 0u64;
            let mut slots = vec![0u64; m1 + 1];
            for row in enumerate_compositions(&model).unwrap() {
                rows += 1;
                for v in row {
                    slots[v] += 1;
                }
            }
            identities &= count_compositions(&model).to_u64() == Some(rows);
            for (j, &s) in slots.iter().enumerate() {
                let cj = count_slot_value(&model, j).unwrap().to_u64().unwrap();
                identities &= s == cj * m2 as u64;
            }
        }
    }
    push(
        "composition counts C and C_j match enumeration (m1, m2 <= 6)",
        identities,
    );

    let probs_ok = OccupancyModel::new(3, 3)
        .ok()
        .and_then(|m| slot_probabilities(&m).ok())
        .is_some_and(|d| {
            [0.4, 0.3, 0.2, 0.1]
                .iter()
                .zip(&d.probs)
                .all(|(w, g)| (w - g).abs() < 1e-12)
                && (d.p_tail - 0.1).abs() < 1e-12
        });
    push("m1 = m2 = 3: P = 0.4 0.3 0.2, tail 0.1", probs_ok);
    checks
}

fn cmd_selftest(stdout: &mut dyn Write) -> Result<(), CliError> {
    let checks = selftest_checks();
    for c in &checks {
        writeln!(stdout, "{} {}", if c.ok { "ok  " } else { "FAIL" }, c.name).map_err(input_err)?;
    }
    let failed = checks.iter().filter(|c| !c.ok).count();
    if failed > 0 {
        return Err(CliError::Internal(format!(
            "{failed} self-test check(s) failed"
        )));
    }
    Ok(())
}

/// Dispatches a parsed command.
pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Bin(a) => cmd_bin(a, stdout),
        Command::Bench1(a) => cmd_bench1(a, stdout, stderr),
        Command::Bench2(a) => cmd_bench2(a, stdout, stderr),
        Command::Analyze(a) => cmd_analyze(a, stdout),
        Command::Selftest => cmd_selftest(stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.code()
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli, stdout, stderr),
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                EXIT_INPUT
            } else {
                let _ = write!(stdout, "{}", e.render());
                EXIT_OK
            }
        }
    }
}
