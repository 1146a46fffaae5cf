//! Implementations of the subcommands.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use qes_core::export::{
    format_significant, grid_json, write_crj_csv, write_entropy_csv, write_grid_csv, write_marginals_csv,
    GridMetadata, TABLE_DIGITS,
};
use qes_core::infotheory::{crj_rows, entropy_reports, Hierarchy};
use qes_core::phasespace::{abs_wigner_grid, husimi_grid, negativity_volume, wigner_grid};
use qes_core::variational::{convergence_ladder, critical_coupling_with, parity_of, LadderRow, Reference};
use qes_core::{
    build_qes_matrix, solve_state, CrjRow, DistributionKind, EntropyReport, MarginalSet, PhaseGrid,
    PhaseSpaceSet, Projection, Wavefunction,
};

use crate::args::{
    check_lambda, check_n, degree_index, parse_kinds, parse_lambdas, Command, CriticalArgs, EntropyArgs,
    Format, GridCommandArgs, MarginalsArgs, QesExactArgs, ReproduceArgs, SolveArgs, StateArgs, SweepArgs,
};
use crate::reproduce;
use crate::CliError;

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Solve(a) => solve(a),
        Command::Phasespace(a) => phasespace(a),
        Command::Marginals(a) => marginals(a),
        Command::Entropy(a) => entropy(a),
        Command::Crj(a) => crj(a),
        Command::Critical(a) => critical(a),
        Command::QesExact(a) => qes_exact(a),
        Command::Reproduce(a) => run_reproduce(a),
    }
}

/// Buffered writer on `path`, or on stdout when absent or `-`.
fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) if p != Path::new("-") => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            Ok(Box::new(BufWriter::new(File::create(p)?)))
        }
        _ => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<(), CliError> {
    let mut out = open_output(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Validated state parameters: `(λ, n, k)`.
fn state_params(s: &StateArgs) -> Result<(f64, usize, usize), CliError> {
    Ok((check_lambda(s.lambda)?, check_n(s.n)?, degree_index(s.degree)?))
}

fn state_wavefunction(lambda: f64, n: usize, k: usize) -> Result<Wavefunction, CliError> {
    Ok(solve_state(n, lambda, k)?.wavefunction())
}

#[derive(Serialize)]
struct SolveRecord {
    lambda: f64,
    n: usize,
    degree: usize,
    energy: f64,
    coefficients: Vec<f64>,
    relative_coefficients: Vec<f64>,
    reference: Reference,
    convergence_ladder: Vec<LadderRow>,
}

fn solve(a: SolveArgs) -> Result<(), CliError> {
    let (lambda, n, k) = state_params(&a.state)?;
    let state = solve_state(n, lambda, k)?;
    let (ladder, reference) = convergence_ladder(lambda, n, k)?;
    let record = SolveRecord {
        lambda,
        n,
        degree: 2 * k,
        energy: state.energy,
        relative_coefficients: state.relative_coefficients(),
        coefficients: state.coefficients,
        reference,
        convergence_ladder: ladder,
    };
    write_json(&record, a.output.as_deref())
}

/// Grids of the requested kinds, computing the Wigner grid at most once.
fn requested_grids(
    psi: &Wavefunction,
    spec: &qes_core::GridSpec,
    kinds: &[DistributionKind],
) -> Result<Vec<PhaseGrid>, CliError> {
    let needs_wigner = kinds.iter().any(|k| *k != DistributionKind::Husimi);
    let wigner = if needs_wigner { Some(wigner_grid(psi, spec)?) } else { None };
    kinds
        .iter()
        .map(|kind| {
            Ok(match kind {
                DistributionKind::Wigner => wigner.clone().expect("computed above"),
                DistributionKind::AbsWigner => abs_wigner_grid(wigner.as_ref().expect("computed above"))?,
                DistributionKind::Husimi => husimi_grid(psi, spec)?,
            })
        })
        .collect()
}

/// Target of each kind's output: stdout for a single kind without
/// `--output`, the given file for a single kind, files in a directory otherwise.
fn grid_targets(
    output: Option<&Path>,
    kinds: &[DistributionKind],
    stem: &str,
    format: Format,
) -> Result<Vec<Option<PathBuf>>, CliError> {
    match (output, kinds.len()) {
        (None, 1) => Ok(vec![None]),
        (None, _) => Err(CliError::Invalid(
            "several kinds requested; pass --output DIR to write one file per kind".into(),
        )),
        (Some(p), 1) => Ok(vec![Some(p.to_path_buf())]),
        (Some(dir), _) => {
            fs::create_dir_all(dir)?;
            Ok(kinds
                .iter()
                .map(|k| Some(dir.join(format!("{}_{stem}.{}", k.name(), format.extension()))))
                .collect())
        }
    }
}

fn file_stem(lambda: f64, n: usize) -> String {
    format!("n{n}_lambda{}", format_significant(lambda, TABLE_DIGITS))
}

fn phasespace(a: GridCommandArgs) -> Result<(), CliError> {
    let (lambda, n, k) = state_params(&a.state)?;
    let spec = a.grid.spec()?;
    let kinds = parse_kinds(&a.kind)?;
    let targets = grid_targets(a.output.as_deref(), &kinds, &file_stem(lambda, n), a.format)?;
    let psi = state_wavefunction(lambda, n, k)?;
    let grids = requested_grids(&psi, &spec, &kinds)?;
    for (grid, target) in grids.iter().zip(&targets) {
        let meta = GridMetadata {
            lambda,
            n,
            integral: grid.integral(),
            min: grid.min(),
            max: grid.max(),
            negativity_volume: match grid.kind() {
                DistributionKind::Wigner => Some(negativity_volume(grid)?),
                _ => None,
            },
        };
        info!(
            "{} grid: integral {:.12}, min {:.6e}, max {:.6e}",
            grid.kind().name(),
            meta.integral,
            meta.min,
            meta.max
        );
        match a.format {
            Format::Json => write_json(&grid_json(grid, &meta), target.as_deref())?,
            Format::Csv => {
                let mut out = open_output(target.as_deref())?;
                write_grid_csv(grid, &mut out)?;
                out.flush()?;
            }
        }
    }
    Ok(())
}

fn marginals(a: MarginalsArgs) -> Result<(), CliError> {
    let c = &a.common;
    let (lambda, n, k) = state_params(&c.state)?;
    let spec = c.grid.spec()?;
    let kinds = parse_kinds(&c.kind)?;
    let psi = state_wavefunction(lambda, n, k)?;
    let set = PhaseSpaceSet::compute(&psi, &spec)?;
    let marginals = if a.exact_wigner {
        MarginalSet::with_exact_wigner(&set, &psi)?
    } else {
        MarginalSet::from_grids(&set)?
    };
    let chosen: Vec<_> = Projection::BOTH
        .into_iter()
        .flat_map(|space| kinds.iter().map(move |&kind| (space, kind)))
        .map(|(space, kind)| marginals.get(space, kind))
        .collect();
    match c.format {
        Format::Csv => {
            let mut out = open_output(c.output.as_deref())?;
            write_marginals_csv(chosen.iter().copied(), &mut out)?;
            out.flush()?;
            Ok(())
        }
        Format::Json => {
            let items: Vec<_> = chosen
                .iter()
                .map(|m| {
                    json!({
                        "space": m.projection().name(),
                        "kind": m.source_kind().map(|k| k.name()),
                        "coordinate": m.nodes(),
                        "density": m.values(),
                        "renormalization": m.renormalization(),
                    })
                })
                .collect();
            write_json(&json!({ "lambda": lambda, "n": n, "marginals": items }), c.output.as_deref())
        }
    }
}

/// Couplings and shared parameters of a sweep.
struct Sweep {
    lambdas: Vec<f64>,
    n: usize,
    k: usize,
    spec: qes_core::GridSpec,
}

impl Sweep {
    fn from_args(a: &SweepArgs) -> Result<Self, CliError> {
        Ok(Self {
            lambdas: parse_lambdas(&a.lambda)?,
            n: check_n(a.n)?,
            k: degree_index(a.degree)?,
            spec: a.grid.spec()?,
        })
    }

    /// Maps `f` over the couplings in parallel; results keep sweep order.
    fn map<T, F>(&self, f: F) -> Result<Vec<T>, CliError>
    where
        T: Send,
        F: Fn(f64, &Wavefunction, &PhaseSpaceSet) -> Result<T, CliError> + Sync,
    {
        parity_of(self.n)?;
        self.lambdas
            .par_iter()
            .map(|&lambda| {
                let psi = state_wavefunction(lambda, self.n, self.k)?;
                let set = PhaseSpaceSet::compute(&psi, &self.spec)?;
                f(lambda, &psi, &set)
            })
            .collect()
    }
}

fn hierarchy_violations(h: &Hierarchy) -> Vec<&'static str> {
    [
        (h.position, "position"),
        (h.momentum, "momentum"),
        (h.joint, "joint"),
        (h.mutual_information, "mutual information"),
    ]
    .into_iter()
    .filter_map(|(ok, name)| (!ok).then_some(name))
    .collect()
}

fn entropy(a: EntropyArgs) -> Result<(), CliError> {
    let sweep = Sweep::from_args(&a.sweep)?;
    let kinds = parse_kinds(&a.kind)?;
    let rows = sweep.map(|lambda, _, set| {
        let reports = entropy_reports(set, lambda, sweep.n)?;
        Ok((reports, Hierarchy::check(&reports)))
    })?;

    let mut violated = Vec::new();
    for ((_, h), lambda) in rows.iter().zip(&sweep.lambdas) {
        let broken = hierarchy_violations(h);
        if !broken.is_empty() {
            warn!("n = {}, λ = {lambda}: ordering W < |W| < H violated in {}", sweep.n, broken.join(", "));
            violated.push(*lambda);
        }
    }

    let selected = |reports: &[EntropyReport; 3]| -> Vec<EntropyReport> {
        reports.iter().filter(|r| kinds.contains(&r.kind)).copied().collect()
    };
    match a.sweep.format {
        Format::Csv => {
            let flat: Vec<EntropyReport> = rows.iter().flat_map(|(r, _)| selected(r)).collect();
            let mut out = open_output(a.sweep.output.as_deref())?;
            write_entropy_csv(&flat, &mut out)?;
            out.flush()?;
        }
        Format::Json => {
            let items: Vec<_> = rows
                .iter()
                .zip(&sweep.lambdas)
                .map(|((r, h), lambda)| json!({ "lambda": lambda, "n": sweep.n, "reports": selected(r), "hierarchy": h }))
                .collect();
            write_json(&items, a.sweep.output.as_deref())?;
        }
    }
    if a.strict && !violated.is_empty() {
        return Err(CliError::Numerical(format!(
            "entropy ordering violated at {} coupling(s)",
            violated.len()
        )));
    }
    Ok(())
}

fn crj(a: SweepArgs) -> Result<(), CliError> {
    let sweep = Sweep::from_args(&a)?;
    let rows: Vec<CrjRow> = sweep
        .map(|lambda, psi, set| {
            let marginals = MarginalSet::with_exact_wigner(set, psi)?;
            Ok(crj_rows(&marginals, lambda, sweep.n)?)
        })?
        .into_iter()
        .flatten()
        .collect();
    match a.format {
        Format::Csv => {
            let mut out = open_output(a.output.as_deref())?;
            write_crj_csv(&rows, &mut out)?;
            out.flush()?;
            Ok(())
        }
        Format::Json => {
            let items: Vec<_> = rows
                .iter()
                .map(|r| json!({ "lambda": r.lambda, "n": r.n, "space": r.space.name(), "pair": r.pair.label(), "value": r.value }))
                .collect();
            write_json(&items, a.output.as_deref())
        }
    }
}

fn critical(a: CriticalArgs) -> Result<(), CliError> {
    let k = degree_index(a.degree)?;
    if !(a.tolerance.is_finite() && a.tolerance > 0.0) {
        return Err(CliError::Invalid(format!("--tolerance must be positive, got {}", a.tolerance)));
    }
    let states = match a.n {
        Some(n) => vec![check_n(n)?],
        None => vec![0, 1],
    };
    let items = states
        .into_iter()
        .map(|n| {
            let lambda_c = critical_coupling_with(n, k, a.tolerance)?;
            Ok(json!({ "n": n, "degree": 2 * k, "tolerance": a.tolerance, "lambda_c": lambda_c }))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    write_json(&items, a.output.as_deref())
}

fn qes_exact(a: QesExactArgs) -> Result<(), CliError> {
    let sector = build_qes_matrix(a.sector)?;
    let m = sector.matrix();
    let matrix: Vec<Vec<f64>> = (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
    let energies = sector.spectrum()?;
    let states = (0..energies.len())
        .map(|i| {
            Ok(json!({
                "energy": energies[i],
                "coefficients": sector.eigen_polynomial(i)?.coeffs(),
            }))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let record = json!({
        "N": sector.n(),
        "lambda": sector.lambda(),
        "matrix": matrix,
        "energies": energies,
        "states": states,
    });
    write_json(&record, a.output.as_deref())
}

fn run_reproduce(a: ReproduceArgs) -> Result<(), CliError> {
    let report = reproduce::run_all();
    let mut out = io::stdout().lock();
    for check in &report.checks {
        writeln!(out, "{}", check.line())?;
    }
    writeln!(out, "{}", report.summary())?;
    out.flush()?;
    if let Some(path) = a.output.as_deref() {
        write_json(&report, Some(path))?;
    }
    let failed = report.failed().count();
    if failed > 0 {
        return Err(CliError::Numerical(format!("{failed} check(s) failed")));
    }
    Ok(())
}
