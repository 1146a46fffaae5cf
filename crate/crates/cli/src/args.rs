//! Argument definitions and their validation.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qes_core::{DistributionKind, GridSpec};

use crate::CliError;

/// Smallest accepted node count per grid axis.
pub const MIN_GRID_NODES: usize = 41;

/// Sextic double-well oscillator: variational states, phase-space
/// distributions and their information measures.
#[derive(Parser, Debug)]
#[command(name = "qes", version, about, long_about = None)]
pub struct Cli {
    /// Worker threads for grid rows and coupling sweeps (default: all cores).
    #[arg(long, global = true, env = "QES_THREADS", value_name = "N")]
    pub threads: Option<usize>,

    /// Plain-text `key = value` manifest; flags on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Variational energy, coefficients and convergence ladder of one state.
    #[command(args_override_self = true)]
    Solve(SolveArgs),
    /// Phase-space grids of W, |W| and/or H.
    #[command(args_override_self = true)]
    Phasespace(GridCommandArgs),
    /// Position and momentum marginals of the requested distributions.
    #[command(args_override_self = true)]
    Marginals(MarginalsArgs),
    /// Shannon entropies and mutual information over a coupling sweep.
    #[command(args_override_self = true)]
    Entropy(EntropyArgs),
    /// Cumulative residual Jeffreys divergences over a coupling sweep.
    #[command(args_override_self = true)]
    Crj(SweepArgs),
    /// Couplings at which the state energy crosses the central barrier top.
    #[command(args_override_self = true)]
    Critical(CriticalArgs),
    /// Matrix, energies and polynomials of the exactly solvable sector.
    #[command(name = "qes-exact", args_override_self = true)]
    QesExact(QesExactArgs),
    /// Run the full reproduction matrix and print a pass/fail report.
    #[command(args_override_self = true)]
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug, Clone)]
pub struct StateArgs {
    /// Coupling λ of the potential.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: f64,

    /// Quantum number: 0 (ground, even) or 1 (first excited, odd).
    #[arg(long, default_value_t = 0)]
    pub n: usize,

    /// Degree 2k of the polynomial prefactor; even and at least 2.
    #[arg(long, default_value_t = 12)]
    pub degree: usize,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// Position nodes.
    #[arg(long, default_value_t = 241)]
    pub nx: usize,

    /// Momentum nodes.
    #[arg(long, default_value_t = 241)]
    pub np: usize,

    /// Half-width of the position window.
    #[arg(long, default_value_t = 6.0)]
    pub x_max: f64,

    /// Half-width of the momentum window.
    #[arg(long, default_value_t = 12.0)]
    pub p_max: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub state: StateArgs,

    /// Output file (default: stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GridCommandArgs {
    #[command(flatten)]
    pub state: StateArgs,

    #[command(flatten)]
    pub grid: GridArgs,

    /// Comma-separated kinds (wigner, abs-wigner, husimi) or `all`.
    #[arg(long, default_value = "all")]
    pub kind: String,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Output file for a single kind, or directory for several (default: stdout, single kind only).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MarginalsArgs {
    #[command(flatten)]
    pub common: GridCommandArgs,

    /// Sample the Wigner marginals from |ψ(x)|² and |φ(p)|² instead of the grid.
    #[arg(long)]
    pub exact_wigner: bool,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Couplings: a list `a,b,c` or an inclusive range `start:stop:steps`.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: String,

    /// Quantum number: 0 or 1.
    #[arg(long, default_value_t = 0)]
    pub n: usize,

    /// Degree 2k of the polynomial prefactor; even and at least 2.
    #[arg(long, default_value_t = 12)]
    pub degree: usize,

    #[command(flatten)]
    pub grid: GridArgs,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Output file (default: stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,

    /// Comma-separated kinds (wigner, abs-wigner, husimi) or `all`.
    #[arg(long, default_value = "all")]
    pub kind: String,

    /// Exit with status 1 when any ordering of the three distributions is violated.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Args, Debug)]
pub struct CriticalArgs {
    /// Quantum number (default: both 0 and 1).
    #[arg(long)]
    pub n: Option<usize>,

    /// Degree 2k of the polynomial prefactor; even and at least 2.
    #[arg(long, default_value_t = 12)]
    pub degree: usize,

    /// Bisection stops once the bracket is narrower than this.
    #[arg(long, default_value_t = 1e-4)]
    pub tolerance: f64,

    /// Output file (default: stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct QesExactArgs {
    /// Sector size N ≥ 0; the sector is exact at λ = N.
    #[arg(allow_negative_numbers = true)]
    pub sector: i64,

    /// Output file (default: stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    /// Also write the report as JSON to this file.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Degree index `k` from the prefactor degree `2k`.
pub fn degree_index(degree: usize) -> Result<usize, CliError> {
    if degree < 2 || !degree.is_multiple_of(2) {
        return Err(CliError::Invalid(format!(
            "--degree must be an even number of at least 2, got {degree}"
        )));
    }
    Ok(degree / 2)
}

pub fn check_lambda(lambda: f64) -> Result<f64, CliError> {
    if lambda.is_finite() {
        Ok(lambda)
    } else {
        Err(CliError::Invalid(format!("coupling must be finite, got {lambda}")))
    }
}

pub fn check_n(n: usize) -> Result<usize, CliError> {
    if n <= 1 {
        Ok(n)
    } else {
        Err(CliError::Invalid(format!("--n must be 0 or 1, got {n}")))
    }
}

impl GridArgs {
    pub fn spec(&self) -> Result<GridSpec, CliError> {
        for (name, count) in [("--nx", self.nx), ("--np", self.np)] {
            if count < MIN_GRID_NODES {
                return Err(CliError::Invalid(format!(
                    "{name} must be at least {MIN_GRID_NODES}, got {count}"
                )));
            }
        }
        for (name, half) in [("--x-max", self.x_max), ("--p-max", self.p_max)] {
            if !(half.is_finite() && half > 0.0) {
                return Err(CliError::Invalid(format!("{name} must be positive, got {half}")));
            }
        }
        Ok(GridSpec::symmetric(self.nx, self.x_max, self.np, self.p_max)?)
    }
}

/// Distribution kinds from `all` or a comma-separated list, in canonical
/// order without duplicates.
pub fn parse_kinds(s: &str) -> Result<Vec<DistributionKind>, CliError> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(DistributionKind::ALL.to_vec());
    }
    let mut chosen = Vec::new();
    for part in s.split(',') {
        let kind = DistributionKind::parse(part.trim())
            .ok_or_else(|| CliError::Invalid(format!("unknown distribution kind {part:?}")))?;
        chosen.push(kind);
    }
    Ok(DistributionKind::ALL
        .into_iter()
        .filter(|k| chosen.contains(k))
        .collect())
}

/// Couplings from `a,b,c` or `start:stop:steps` (inclusive, `steps ≥ 2`).
pub fn parse_lambdas(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |msg: String| CliError::Invalid(msg);
    let number = |t: &str| -> Result<f64, CliError> {
        let v: f64 = t
            .trim()
            .parse()
            .map_err(|_| bad(format!("cannot parse coupling {t:?}")))?;
        check_lambda(v)
    };
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, steps] = parts.as_slice() else {
            return Err(bad(format!("range must be start:stop:steps, got {s:?}")));
        };
        let (start, stop) = (number(start)?, number(stop)?);
        let steps: usize = steps
            .trim()
            .parse()
            .map_err(|_| bad(format!("cannot parse step count {steps:?}")))?;
        if start >= stop {
            return Err(bad(format!("range start {start} must be below stop {stop}")));
        }
        if steps < 2 {
            return Err(bad(format!("range needs at least 2 steps, got {steps}")));
        }
        let last = (steps - 1) as f64;
        Ok((0..steps)
            .map(|i| {
                let t = i as f64 / last;
                if i + 1 == steps {
                    stop
                } else {
                    start * (1.0 - t) + stop * t
                }
            })
            .collect())
    } else {
        let values = s.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() {
            return Err(bad("no couplings given".into()));
        }
        Ok(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_validation() {
        assert_eq!(degree_index(12).unwrap(), 6);
        assert_eq!(degree_index(2).unwrap(), 1);
        for bad in [0, 1, 7] {
            assert_eq!(degree_index(bad).unwrap_err().exit_code(), 2);
        }
    }

    #[test]
    fn lambda_lists_and_ranges() {
        assert_eq!(parse_lambdas("-0.75,4").unwrap(), vec![-0.75, 4.0]);
        let r = parse_lambdas("-0.75:4:20").unwrap();
        assert_eq!(r.len(), 20);
        assert_eq!(r[0], -0.75);
        assert_eq!(r[19], 4.0);
        assert!((r[1] - r[0] - 0.25).abs() < 1e-15);
        for bad in ["4:-1:5", "0:1:1", "0:1", "a,b", "nan", "0:inf:3"] {
            assert!(parse_lambdas(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn kind_selection() {
        assert_eq!(parse_kinds("all").unwrap().len(), 3);
        assert_eq!(
            parse_kinds("husimi,wigner,W").unwrap(),
            vec![DistributionKind::Wigner, DistributionKind::Husimi]
        );
        assert!(parse_kinds("phase").is_err());
    }

    #[test]
    fn grid_validation() {
        let mut g = GridArgs { nx: 241, np: 241, x_max: 6.0, p_max: 12.0 };
        assert!(g.spec().is_ok());
        g.nx = 40;
        assert_eq!(g.spec().unwrap_err().exit_code(), 2);
        g.nx = 41;
        g.p_max = -1.0;
        assert!(g.spec().is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
