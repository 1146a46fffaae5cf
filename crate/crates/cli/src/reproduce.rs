//! The reproduction matrix: reference values and structural
//! properties, each evaluated to a PASS/FAIL line.
//!
//! Checks that fail for reasons analysed in the project notes are listed in
//! [`KNOWN_DEVIATIONS`]; they still print FAIL.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use qes_core::infotheory::{
    crj_divergence, crj_rows, entropy_reports, wavefunction_entropies, Hierarchy,
};
use qes_core::phasespace::{husimi_by_smoothing, husimi_grid, negativity_volume, SMOOTHING_MARGIN};
use qes_core::variational::{convergence_ladder, critical_coupling, reference_energy, solve_state};
use qes_core::{
    build_qes_matrix, CrjPair, CrjRow, DistributionKind, EntropyReport, GridSpec, MarginalDensity, MarginalSet,
    PhaseSpaceSet, Projection, Result as CoreResult, Wavefunction,
};

/// Checks expected to fail, with the reason.
pub const KNOWN_DEVIATIONS: &[(&str, &str)] = &[
    ("3b", "reference S_p at λ = 0 disagrees with the exact state by 1.7e-5"),
    ("3d", "reference S_p at λ = 1 disagrees with the exact state by 7.8e-5"),
    ("6a", "2.3% below the reference value; the divergence is dominated by far-tail survival ratios that the reference grid leaves unspecified"),
    ("7j", "position ordering S_x[W] < S_x[|W|] fails for n = 0 at λ = −0.75, as in the reference table itself"),
    ("7l", "Re I_W is below I_|W| wherever W has sizeable negative regions"),
];

pub fn known_deviation(id: &str) -> Option<&'static str> {
    KNOWN_DEVIATIONS.iter().find(|(k, _)| *k == id).map(|(_, why)| *why)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Informational comparison outside the criteria.
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: String,
    pub status: Status,
    pub title: String,
    pub detail: String,
}

impl Check {
    fn new(id: &str, passed: bool, title: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            id: id.to_string(),
            status: if passed { Status::Pass } else { Status::Fail },
            title: title.into(),
            detail: detail.into(),
        }
    }

    fn info(id: &str, title: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            status: Status::Info,
            ..Self::new(id, true, title, detail)
        }
    }

    fn error(id: &str, title: &str, e: qes_core::Error) -> Self {
        Self::new(id, false, title, format!("error: {e}"))
    }

    pub fn known_deviation(&self) -> Option<&'static str> {
        (self.status == Status::Fail).then(|| known_deviation(&self.id)).flatten()
    }

    pub fn line(&self) -> String {
        let mut s = format!("{} [{}] {}: {}", self.status, self.id, self.title, self.detail);
        if let Some(why) = self.known_deviation() {
            s.push_str(&format!(" (known deviation: {why})"));
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn summary(&self) -> String {
        let count = |s| self.checks.iter().filter(|c| c.status == s).count();
        let known = self.failed().filter(|c| c.known_deviation().is_some()).count();
        format!(
            "{} passed, {} failed ({} known deviations), {} informational",
            count(Status::Pass),
            count(Status::Fail),
            known,
            count(Status::Info)
        )
    }
}

/// One numbered criterion with its runtime budget.
pub struct Criterion {
    pub number: u8,
    pub title: &'static str,
    pub budget: Option<Duration>,
    pub run: fn(&Workbench) -> Vec<Check>,
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { number: 1, title: "exact sector energies", budget: Some(Duration::from_secs(1)), run: criterion_1 },
        Criterion { number: 2, title: "convergence ladder", budget: Some(Duration::from_secs(5)), run: criterion_2 },
        Criterion { number: 3, title: "exact marginal entropies", budget: Some(Duration::from_secs(10)), run: criterion_3 },
        Criterion { number: 4, title: "critical couplings", budget: Some(Duration::from_secs(30)), run: criterion_4 },
        Criterion { number: 5, title: "entropy tables", budget: Some(Duration::from_secs(300)), run: criterion_5 },
        Criterion { number: 6, title: "CRJ tables", budget: Some(Duration::from_secs(300)), run: criterion_6 },
        Criterion { number: 7, title: "property suite", budget: None, run: criterion_7 },
        Criterion { number: 8, title: "qualitative sign structure", budget: None, run: criterion_8 },
    ]
}

/// Runs one criterion and appends its runtime check.
pub fn run_criterion(c: &Criterion, bench: &Workbench) -> Vec<Check> {
    let start = Instant::now();
    let mut checks = (c.run)(bench);
    let elapsed = start.elapsed();
    let id = format!("{}t", c.number);
    let title = format!("{} runtime", c.title);
    checks.push(match c.budget {
        Some(b) => Check::new(
            &id,
            elapsed <= b,
            title,
            format!("{:.2} s (budget {} s)", elapsed.as_secs_f64(), b.as_secs()),
        ),
        None => Check::info(&id, title, format!("{:.2} s", elapsed.as_secs_f64())),
    });
    checks
}

pub fn run_all() -> Report {
    let bench = Workbench::new();
    let checks = criteria().iter().flat_map(|c| run_criterion(c, &bench)).collect();
    Report { checks }
}

/// Everything derived from one state on the default grid.
pub struct StateData {
    pub n: usize,
    pub lambda: f64,
    pub psi: Wavefunction,
    pub set: PhaseSpaceSet,
    pub reports: [EntropyReport; 3],
    /// Marginals with the Wigner entries sampled from the wavefunction.
    pub marginals: MarginalSet,
    pub crj: Vec<CrjRow>,
}

impl StateData {
    fn compute(n: usize, lambda: f64, spec: &GridSpec) -> CoreResult<Self> {
        let psi = solve_state(n, lambda, DEGREE_INDEX)?.wavefunction();
        let set = PhaseSpaceSet::compute(&psi, spec)?;
        let reports = entropy_reports(&set, lambda, n)?;
        let marginals = MarginalSet::with_exact_wigner(&set, &psi)?;
        let crj = crj_rows(&marginals, lambda, n)?;
        Ok(Self { n, lambda, psi, set, reports, marginals, crj })
    }

    pub fn report(&self, kind: DistributionKind) -> &EntropyReport {
        &self.reports[DistributionKind::ALL.iter().position(|k| *k == kind).expect("known kind")]
    }

    pub fn crj(&self, space: Projection, pair: CrjPair) -> f64 {
        self.crj
            .iter()
            .find(|r| r.space == space && r.pair == pair)
            .expect("all pairs computed")
            .value
    }
}

/// Degree index of every state in the matrix (degree 12).
pub const DEGREE_INDEX: usize = 6;

/// Memoized state computations on the default grid.
pub struct Workbench {
    spec: GridSpec,
    cache: Mutex<HashMap<(usize, u64), Arc<StateData>>>,
}

impl Default for Workbench {
    fn default() -> Self {
        Self::new()
    }
}

impl Workbench {
    pub fn new() -> Self {
        Self { spec: GridSpec::default(), cache: Mutex::new(HashMap::new()) }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// The requested states in order, computing missing ones in parallel.
    pub fn states(&self, wanted: &[(usize, f64)]) -> CoreResult<Vec<Arc<StateData>>> {
        let key = |n: usize, lambda: f64| (n, lambda.to_bits());
        let missing: Vec<(usize, f64)> = {
            let cache = self.cache.lock().expect("cache lock");
            wanted.iter().copied().filter(|&(n, l)| !cache.contains_key(&key(n, l))).collect()
        };
        let fresh = missing
            .par_iter()
            .map(|&(n, l)| StateData::compute(n, l, &self.spec).map(|d| (key(n, l), Arc::new(d))))
            .collect::<CoreResult<Vec<_>>>()?;
        let mut cache = self.cache.lock().expect("cache lock");
        cache.extend(fresh);
        Ok(wanted.iter().map(|&(n, l)| Arc::clone(&cache[&key(n, l)])).collect())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// `f64::EPSILON`-scaled bound used for "machine precision" comparisons.
const MACHINE_TOLERANCE: f64 = 16.0 * f64::EPSILON;

fn criterion_1(_: &Workbench) -> Vec<Check> {
    let exact_1 = 1.5 - 3f64.sqrt();
    let mut out = Vec::new();
    for (id, sector, expected) in [("1a", 0i64, 0.5), ("1b", 1, exact_1)] {
        let title = format!("algebraic ground energy, N = {sector}");
        match build_qes_matrix(sector).and_then(|s| s.spectrum()) {
            Ok(e) => {
                let d = (e[0] - expected).abs();
                out.push(Check::new(
                    id,
                    d <= MACHINE_TOLERANCE * expected.abs().max(1.0),
                    title,
                    format!("E = {:.17}, |ΔE| = {d:.2e}", e[0]),
                ));
            }
            Err(e) => out.push(Check::error(id, &title, e)),
        }
    }
    for (id, lambda, expected, tol) in [("1c", 0.0, 0.5, 1e-10), ("1d", 1.0, exact_1, 1e-8)] {
        let title = format!("degree-12 variational energy, λ = {lambda}");
        match solve_state(0, lambda, DEGREE_INDEX) {
            Ok(s) => {
                let r = rel(s.energy, expected);
                out.push(Check::new(id, r <= tol, title, format!("E = {:.12}, relative error {r:.4e} ≤ {tol:e}", s.energy)));
            }
            Err(e) => out.push(Check::error(id, &title, e)),
        }
    }
    out
}

/// Published relative errors at λ = 0 for degrees 2…12.
pub const LADDER_LAMBDA_0: [f64; 6] = [2.6727e-2, 9.7362e-4, 2.3945e-5, 4.4247e-7, 6.5691e-9, 8.1665e-11];

fn criterion_2(_: &Workbench) -> Vec<Check> {
    let title = "λ = 0 relative errors within a factor 2 per degree";
    match convergence_ladder(0.0, 0, LADDER_LAMBDA_0.len()) {
        Ok((rows, _)) => {
            let ratios: Vec<f64> = rows.iter().zip(LADDER_LAMBDA_0).map(|(r, p)| r.relative_error / p).collect();
            let ok = ratios.iter().all(|q| (0.5..=2.0).contains(q));
            let detail = rows
                .iter()
                .zip(&ratios)
                .map(|(r, q)| format!("{}: {:.4e} (×{q:.3})", r.degree, r.relative_error))
                .collect::<Vec<_>>()
                .join(", ");
            vec![Check::new("2", ok, title, detail)]
        }
        Err(e) => vec![Check::error("2", title, e)],
    }
}

/// Published position/momentum entropies of the exact states at λ = 0 and 1.
pub const EXACT_ENTROPIES: [(f64, f64, f64); 2] =
    [(0.0, 0.79109828152, 1.37919393077), (1.0, 0.993321580789, 1.262393264036)];

/// Momentum half-width of the marginal entropy quadrature.
const ENTROPY_P_MAX: f64 = 16.0;

fn criterion_3(_: &Workbench) -> Vec<Check> {
    let mut out = Vec::new();
    let ids = [("3a", "3b"), ("3c", "3d")];
    for ((lambda, sx, sp), (id_x, id_p)) in EXACT_ENTROPIES.into_iter().zip(ids) {
        let exact = build_qes_matrix(lambda as i64)
            .and_then(|s| s.wavefunction(0))
            .and_then(|psi| wavefunction_entropies(&psi, ENTROPY_P_MAX));
        let variational = solve_state(0, lambda, DEGREE_INDEX)
            .and_then(|s| wavefunction_entropies(&s.wavefunction(), ENTROPY_P_MAX));
        match (exact, variational) {
            (Ok(e), Ok(v)) => {
                for (id, label, ours, var, reference) in [(id_x, "S_x", e.sx, v.sx, sx), (id_p, "S_p", e.sp, v.sp, sp)] {
                    let d = (ours - reference).abs();
                    out.push(Check::new(
                        id,
                        d <= 1e-6,
                        format!("{label} of the exact state at λ = {lambda}"),
                        format!("{ours:.11} vs {reference} (|Δ| = {d:.2e}, degree 12 gives {var:.11})"),
                    ));
                }
            }
            (Err(e), _) | (_, Err(e)) => {
                out.push(Check::error(id_x, "exact marginal entropies", e.clone()));
                out.push(Check::error(id_p, "exact marginal entropies", e));
            }
        }
    }
    out
}

fn criterion_4(_: &Workbench) -> Vec<Check> {
    [("4a", 0usize, 0.7329), ("4b", 1, 1.4209)]
        .into_iter()
        .map(|(id, n, reference)| {
            let title = format!("critical coupling, n = {n}");
            match critical_coupling(n) {
                Ok(l) => Check::new(
                    id,
                    (l - reference).abs() <= 5e-4,
                    title,
                    format!("λ_c = {l:.5} vs {reference} ± 0.0005"),
                ),
                Err(e) => Check::error(id, &title, e),
            }
        })
        .collect()
}

/// One reference entropy: `(n, λ, kind, S_x, S_p)`.
pub type EntropyEntry = (usize, f64, DistributionKind, f64, f64);

/// Published marginal entropies of both states at four couplings each.
pub const ENTROPY_TABLE: [EntropyEntry; 24] = {
    use DistributionKind::{AbsWigner as A, Husimi as H, Wigner as W};
    [
        (0, -0.75, W, 0.669446, 1.48341),
        (0, -0.75, A, 0.668119, 1.50555),
        (0, -0.75, H, 1.25773, 1.66566),
        (0, 0.7329, W, 0.938019, 1.28365),
        (0, 0.7329, A, 0.917103, 1.4778),
        (0, 0.7329, H, 1.36759, 1.54541),
        (0, 1.0, W, 0.993322, 1.2624),
        (0, 1.0, A, 0.966693, 1.50888),
        (0, 1.0, H, 1.4004, 1.54159),
        (0, 4.0, W, 0.852065, 1.69748),
        (0, 4.0, A, 1.15412, 2.00614),
        (0, 4.0, H, 1.70738, 2.05315),
        (1, -0.75, W, 0.799305, 1.81374),
        (1, -0.75, A, 0.907124, 1.93029),
        (1, -0.75, H, 1.44131, 2.06706),
        (1, 0.75, W, 0.894196, 1.67882),
        (1, 0.75, A, 1.03248, 1.87034),
        (1, 0.75, H, 1.52491, 1.98019),
        (1, 1.4209, W, 0.919881, 1.63925),
        (1, 1.4209, A, 1.08487, 1.87503),
        (1, 1.4209, H, 1.56973, 1.96378),
        (1, 4.0, W, 0.828591, 1.71753),
        (1, 4.0, A, 1.1505, 2.01796),
        (1, 4.0, H, 1.70813, 2.07535),
    ]
};

fn distinct_states<T>(entries: &[T], key: impl Fn(&T) -> (usize, f64)) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::new();
    for e in entries {
        let k = key(e);
        if !out.contains(&k) {
            out.push(k);
        }
    }
    out
}

/// Worst relative deviation over the reference `(S_x, S_p)` entries of the selected rows.
fn entropy_deviations(bench: &Workbench, rows: &[EntropyEntry]) -> CoreResult<Vec<(String, f64)>> {
    let states = bench.states(&distinct_states(rows, |e| (e.0, e.1)))?;
    let mut out = Vec::new();
    for &(n, lambda, kind, sx, sp) in rows {
        let s = states.iter().find(|s| s.n == n && s.lambda == lambda).expect("state computed");
        let r = s.report(kind);
        out.push((format!("S_x[{}] n={n} λ={lambda}", kind.label()), rel(r.sx, sx)));
        out.push((format!("S_p[{}] n={n} λ={lambda}", kind.label()), rel(r.sp, sp)));
    }
    Ok(out)
}

fn worst(devs: &[(String, f64)]) -> (String, f64) {
    devs.iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(l, d)| (l.clone(), *d))
        .unwrap_or_default()
}

fn criterion_5(bench: &Workbench) -> Vec<Check> {
    let mut out = Vec::new();
    for (id, n) in [("5a", 0usize), ("5b", 1)] {
        let title = format!("six marginal entropies at n = {n}, λ = 4 within 0.5%");
        let rows: Vec<EntropyEntry> = ENTROPY_TABLE.iter().copied().filter(|e| e.0 == n && e.1 == 4.0).collect();
        match entropy_deviations(bench, &rows) {
            Ok(devs) => {
                let (label, d) = worst(&devs);
                out.push(Check::new(id, d <= 5e-3, title, format!("largest deviation {:.3}% ({label})", 100.0 * d)));
            }
            Err(e) => out.push(Check::error(id, &title, e)),
        }
    }
    let title = "all 48 reference marginal entropies";
    match entropy_deviations(bench, &ENTROPY_TABLE) {
        Ok(devs) => {
            let within = devs.iter().filter(|d| d.1 <= 5e-3).count();
            let (label, d) = worst(&devs);
            out.push(Check::info(
                "5c",
                title,
                format!("{within}/{} within 0.5%, largest deviation {:.3}% ({label})", devs.len(), 100.0 * d),
            ));
        }
        Err(e) => out.push(Check::error("5c", title, e)),
    }
    out
}

/// One reference divergence: `(n, λ, space, pair, value)`.
pub type CrjEntry = (usize, f64, Projection, CrjPair, f64);

/// Published divergences of both states at six couplings each.
pub const CRJ_TABLE: [CrjEntry; 72] = {
    use CrjPair::{AbsWignerWigner as AW, HusimiAbsWigner as HA, HusimiWigner as HW};
    use Projection::{Momentum as P, Position as X};
    [
        (0, -0.75, X, AW, 9.72868e-7), (0, 0.7329, X, AW, 0.000839818), (0, 1.0, X, AW, 0.00214324),
        (0, 2.5, X, AW, 0.0579798), (0, 4.0, X, AW, 0.131541), (0, 5.0, X, AW, 0.157213),
        (0, -0.75, X, HW, 0.350672), (0, 0.7329, X, HW, 0.287128), (0, 1.0, X, HW, 0.28866),
        (0, 2.5, X, HW, 0.431972), (0, 4.0, X, HW, 0.595489), (0, 5.0, X, HW, 0.638869),
        (0, -0.75, X, HA, 0.346475), (0, 0.7329, X, HA, 0.301167), (0, 1.0, X, HA, 0.308648),
        (0, 2.5, X, HA, 0.488934), (0, 4.0, X, HA, 0.672753), (0, 5.0, X, HA, 0.726098),
        (0, -0.75, P, AW, 0.00289026), (0, 0.7329, P, AW, 0.0434621), (0, 1.0, P, AW, 0.0589254),
        (0, 2.5, P, AW, 0.0757902), (0, 4.0, P, AW, 0.0431918), (0, 5.0, P, AW, 0.0337971),
        (0, -0.75, P, HW, 0.0476579), (0, 0.7329, P, HW, 0.0658988), (0, 1.0, P, HW, 0.0667597),
        (0, 2.5, P, HW, 0.0491116), (0, 4.0, P, HW, 0.0369542), (0, 5.0, P, HW, 0.0325187),
        (0, -0.75, P, HA, 0.0333811), (0, 0.7329, P, HA, 0.0880575), (0, 1.0, P, HA, 0.00589606),
        (0, 2.5, P, HA, 0.00879494), (0, 4.0, P, HA, 0.00853151), (0, 5.0, P, HA, 0.00753547),
        (1, -0.75, X, AW, 0.0390777), (1, 0.75, X, AW, 0.0518047), (1, 1.4209, X, AW, 0.063286),
        (1, 2.5, X, AW, 0.0910459), (1, 4.0, X, AW, 0.13334), (1, 5.0, X, AW, 0.157484),
        (1, -0.75, X, HW, 0.394839), (1, 0.75, X, HW, 0.40362), (1, 1.4209, X, HW, 0.425713),
        (1, 2.5, X, HW, 0.492836), (1, 4.0, X, HW, 0.579705), (1, 5.0, X, HW, 0.637086),
        (1, -0.75, X, HA, 0.432782), (1, 0.75, X, HA, 0.462339), (1, 1.4209, X, HA, 0.485834),
        (1, 2.5, X, HA, 0.558428), (1, 4.0, X, HA, 0.657533), (1, 5.0, X, HA, 0.724503),
        (1, -0.75, P, AW, 0.101457), (1, 0.75, P, AW, 0.0816687), (1, 1.4209, P, AW, 0.0735118),
        (1, 2.5, P, AW, 0.059317), (1, 4.0, P, AW, 0.0417442), (1, 5.0, P, AW, 0.0333961),
        (1, -0.75, P, HW, 0.0459038), (1, 0.75, P, HW, 0.0542097), (1, 1.4209, P, HW, 0.0541598),
        (1, 2.5, P, HW, 0.0471514), (1, 4.0, P, HW, 0.0372011), (1, 5.0, P, HW, 0.0319676),
        (1, -0.75, P, HA, 0.122977), (1, 0.75, P, HA, 0.078894), (1, 1.4209, P, HA, 0.0488316),
        (1, 2.5, P, HA, 0.0225922), (1, 4.0, P, HA, 0.00993492), (1, 5.0, P, HA, 0.00765889),
    ]
};

/// Entries below this are compared by order of magnitude only.
const CRJ_SMALL: f64 = 1e-5;

/// Agreement rule for one divergence: 2% relative, or within a factor of
/// ten for reference values below [`CRJ_SMALL`].
fn crj_agrees(ours: f64, reference: f64) -> bool {
    if reference < CRJ_SMALL {
        ours > 0.0 && (ours / reference).log10().abs() < 1.0
    } else {
        rel(ours, reference) <= 0.02
    }
}

fn crj_label(e: &CrjEntry) -> String {
    format!("({}) {} n={} λ={}", e.3.label(), e.2.name(), e.0, e.1)
}

/// The named spot checks: the two quoted entries and the smallest one.
pub const CRJ_SPOT_CHECKS: [(&str, CrjEntry); 3] = [
    ("6a", (0, 4.0, Projection::Position, CrjPair::HusimiWigner, 0.595489)),
    ("6b", (1, 4.0, Projection::Momentum, CrjPair::HusimiAbsWigner, 0.00993492)),
    ("6c", (0, -0.75, Projection::Position, CrjPair::AbsWignerWigner, 9.72868e-7)),
];

fn crj_value(bench: &Workbench, e: &CrjEntry) -> CoreResult<f64> {
    Ok(bench.states(&[(e.0, e.1)])?[0].crj(e.2, e.3))
}

fn criterion_6(bench: &Workbench) -> Vec<Check> {
    let mut out = Vec::new();
    if let Err(e) = bench.states(&distinct_states(&CRJ_TABLE, |e| (e.0, e.1))) {
        return vec![Check::error("6", "CRJ tables", e)];
    }
    for (id, entry) in CRJ_SPOT_CHECKS {
        let rule = if entry.4 < CRJ_SMALL { "order of magnitude" } else { "2%" };
        let title = format!("{} within {rule}", crj_label(&entry));
        match crj_value(bench, &entry) {
            Ok(v) => out.push(Check::new(
                id,
                crj_agrees(v, entry.4),
                title,
                format!("{v:.6e} vs {:e} ({:+.2}%)", entry.4, 100.0 * (v - entry.4) / entry.4),
            )),
            Err(e) => out.push(Check::error(id, &title, e)),
        }
    }
    let mut misses = Vec::new();
    for entry in &CRJ_TABLE {
        match crj_value(bench, entry) {
            Ok(v) if crj_agrees(v, entry.4) => {}
            Ok(v) => misses.push(format!("{} {v:.4e} vs {:e}", crj_label(entry), entry.4)),
            Err(e) => misses.push(format!("{}: {e}", crj_label(entry))),
        }
    }
    out.push(Check::info(
        "6d",
        "all 72 reference divergences",
        format!(
            "{}/{} agree; outside: {}",
            CRJ_TABLE.len() - misses.len(),
            CRJ_TABLE.len(),
            if misses.is_empty() { "none".to_string() } else { misses.join("; ") }
        ),
    ));
    out
}

/// States of the property suite.
pub const PROPERTY_STATES: [(usize, f64); 4] = [(0, -0.75), (0, 4.0), (1, -0.75), (1, 4.0)];

fn state_label(s: &StateData) -> String {
    format!("n={} λ={}", s.n, s.lambda)
}

/// A check over every property state: `f` returns `(ok, measured)` per state.
fn per_state<F>(states: &[Arc<StateData>], id: &str, title: &str, f: F) -> Check
where
    F: Fn(&StateData) -> CoreResult<(bool, String)>,
{
    let mut ok = true;
    let mut parts = Vec::new();
    for s in states {
        match f(s) {
            Ok((pass, measured)) => {
                ok &= pass;
                parts.push(format!("{}{}: {measured}", if pass { "" } else { "✗ " }, state_label(s)));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("✗ {}: {e}", state_label(s)));
            }
        }
    }
    Check::new(id, ok, title, parts.join("; "))
}

fn sup_difference(a: &MarginalDensity, b: &MarginalDensity) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs()))
}

fn criterion_7(bench: &Workbench) -> Vec<Check> {
    let states = match bench.states(&PROPERTY_STATES) {
        Ok(s) => s,
        Err(e) => return vec![Check::error("7", "property suite", e)],
    };
    let mut out = Vec::new();
    out.push(per_state(&states, "7a", "Wigner normalization within 1e-5", |s| {
        let d = (s.set.wigner.integral() - 1.0).abs();
        Ok((d <= 1e-5, format!("{d:.1e}")))
    }));
    out.push(per_state(&states, "7b", "Wigner marginals equal |ψ|² and |φ|² within 1e-5", |s| {
        let mut worst = 0.0f64;
        for space in Projection::BOTH {
            let grid = MarginalDensity::marginal(&s.set.wigner, space)?;
            worst = worst.max(sup_difference(&grid, s.marginals.get(space, DistributionKind::Wigner)));
        }
        Ok((worst <= 1e-5, format!("{worst:.1e}")))
    }));
    out.push(per_state(&states, "7c", "|W| ≤ 1/π", |s| {
        let m = s.set.abs_wigner.max();
        Ok((m <= 1.0 / PI, format!("max {m:.9} (1/π = {:.9})", 1.0 / PI)))
    }));
    out.push(per_state(&states, "7d", "Husimi positivity", |s| {
        let m = s.set.husimi.min();
        Ok((m >= 0.0, format!("min {m:.2e}")))
    }));
    let inner = bench.spec().shrink(SMOOTHING_MARGIN);
    out.push(per_state(&states, "7e", "direct and smoothed Husimi agree within 1e-4", |s| {
        let inner = inner.clone()?;
        let smooth = husimi_by_smoothing(&s.set.wigner, &inner)?;
        let direct = husimi_grid(&s.psi, &inner)?;
        let d = smooth.sup_distance(&direct)?;
        Ok((d <= 1e-4, format!("{d:.1e}")))
    }));
    out.push(per_state(&states, "7f", "Im S[W] equals π times the negativity volume", |s| {
        let im = s.report(DistributionKind::Wigner).s2d.im;
        let v = PI * negativity_volume(&s.set.wigner)?;
        let d = (im - v).abs();
        Ok((d <= MACHINE_TOLERANCE * v.max(f64::MIN_POSITIVE), format!("{im:.9}, |Δ| = {d:.1e}")))
    }));
    out.push(per_state(&states, "7g", "W(0,0) = ±1/π by parity within 1e-6", |s| {
        let w = s.set.wigner.nearest(0.0, 0.0);
        let expected = if s.n == 0 { 1.0 / PI } else { -1.0 / PI };
        let d = (w - expected).abs();
        Ok((d <= 1e-6, format!("{w:.9}")))
    }));
    out.push(gaussian_oracles(bench.spec()));
    let hierarchy = |s: &StateData| Hierarchy::check(&s.reports);
    out.push(per_state(&states, "7i", "joint ordering Re S[W] < |S[W]| < S[|W|] < S[H]", |s| {
        let [w, a, h] = &s.reports;
        Ok((
            hierarchy(s).joint,
            format!("{:.4} < {:.4} < {:.4} < {:.4}", w.s2d.re, w.s2d.norm(), a.s2d.re, h.s2d.re),
        ))
    }));
    out.push(per_state(&states, "7j", "position ordering S_x[W] < S_x[|W|] < S_x[H]", |s| {
        let [w, a, h] = &s.reports;
        Ok((hierarchy(s).position, format!("{:.6}, {:.6}, {:.6}", w.sx, a.sx, h.sx)))
    }));
    out.push(per_state(&states, "7k", "momentum ordering S_p[W] < S_p[|W|] < S_p[H]", |s| {
        let [w, a, h] = &s.reports;
        Ok((hierarchy(s).momentum, format!("{:.6}, {:.6}, {:.6}", w.sp, a.sp, h.sp)))
    }));
    out.push(per_state(&states, "7l", "mutual information Re I_W > I_|W| > I_H", |s| {
        let [w, a, h] = &s.reports;
        Ok((
            hierarchy(s).mutual_information,
            format!(
                "{:.4}, {:.4}, {:.4}",
                w.mutual_information.re, a.mutual_information.re, h.mutual_information.re
            ),
        ))
    }));
    let bound = 1.0 + PI.ln();
    out.push(per_state(&states, "7m", "S_t of the Wigner marginals ≥ 1 + ln π", |s| {
        let st = s.report(DistributionKind::Wigner).st;
        Ok((st >= bound, format!("{st:.6}")))
    }));
    out.push(per_state(&states, "7n", "CRJ symmetric within 1e-12 and zero on identical inputs", |s| {
        let mut asym = 0.0f64;
        let mut selfd = 0.0f64;
        for space in Projection::BOTH {
            for pair in CrjPair::ALL {
                let (p, q) = pair.kinds();
                let (a, b) = (s.marginals.get(space, p), s.marginals.get(space, q));
                asym = asym.max((crj_divergence(a, b)? - crj_divergence(b, a)?).abs());
                selfd = selfd.max(crj_divergence(a, a)?.abs());
            }
        }
        Ok((asym <= 1e-12 && selfd == 0.0, format!("asymmetry {asym:.1e}, self {selfd:.1e}")))
    }));
    out.push(upper_bound_check());
    out.push(monotonicity_check());
    out
}

fn gaussian_oracles(spec: &GridSpec) -> Check {
    let title = "Gaussian S[W] = 1 + ln π and S[H] = 1 + ln 2π within 1e-6";
    let psi = Wavefunction::gaussian();
    let run = || -> CoreResult<(f64, f64)> {
        let set = PhaseSpaceSet::compute(&psi, spec)?;
        let r = entropy_reports(&set, 0.0, 0)?;
        Ok((r[0].s2d.re, r[2].s2d.re))
    };
    match run() {
        Ok((sw, sh)) => {
            let (ew, eh) = (1.0 + PI.ln(), 1.0 + (2.0 * PI).ln());
            let (dw, dh) = ((sw - ew).abs(), (sh - eh).abs());
            Check::new("7h", dw <= 1e-6 && dh <= 1e-6, title, format!("|ΔS[W]| = {dw:.1e}, |ΔS[H]| = {dh:.1e}"))
        }
        Err(e) => Check::error("7h", title, e),
    }
}

/// Largest degree index of the variational checks.
const MAX_CHECK_INDEX: usize = 8;

fn upper_bound_check() -> Check {
    let title = "variational energies lie above the algebraic ones, λ = 0…4";
    let run = || -> CoreResult<(bool, f64)> {
        let mut ok = true;
        let mut closest = f64::INFINITY;
        for lambda in 0..=4 {
            let (exact, _) = reference_energy(lambda as f64, 0, 0)?;
            for k in 1..=MAX_CHECK_INDEX {
                let gap = solve_state(0, lambda as f64, k)?.energy - exact;
                ok &= gap >= -1e-12;
                closest = closest.min(gap);
            }
        }
        Ok((ok, closest))
    };
    match run() {
        Ok((ok, closest)) => Check::new("7o", ok, title, format!("smallest E_k − E = {closest:.2e} over degrees 2…16")),
        Err(e) => Check::error("7o", title, e),
    }
}

fn monotonicity_check() -> Check {
    let title = "energies never rise as the basis grows";
    let run = || -> CoreResult<(bool, f64)> {
        let mut ok = true;
        let mut largest = f64::NEG_INFINITY;
        for n in [0, 1] {
            for lambda in [-0.75, 0.0, 1.0, 4.0] {
                let e: Vec<f64> = (1..=MAX_CHECK_INDEX)
                    .map(|k| solve_state(n, lambda, k).map(|s| s.energy))
                    .collect::<CoreResult<_>>()?;
                for w in e.windows(2) {
                    let rise = w[1] - w[0];
                    ok &= rise <= 1e-12;
                    largest = largest.max(rise);
                }
            }
        }
        Ok((ok, largest))
    };
    match run() {
        Ok((ok, largest)) => Check::new(
            "7p",
            ok,
            title,
            format!("largest E_(k+1) − E_k = {largest:.2e} over n ∈ {{0,1}}, λ ∈ {{−0.75, 0, 1, 4}}"),
        ),
        Err(e) => Check::error("7p", title, e),
    }
}

fn criterion_8(bench: &Workbench) -> Vec<Check> {
    let mut out = Vec::new();
    match bench.states(&[(0, 4.0)]) {
        Ok(s) => {
            let w = &s[0].set.wigner;
            let negative = w.values().iter().filter(|v| **v < -1e-6).count();
            out.push(Check::new(
                "8a",
                negative > 0,
                "n = 0, λ = 4 Wigner function has negative regions",
                format!("min {:.4e}, {negative} cells below −1e-6", w.min()),
            ));
        }
        Err(e) => out.push(Check::error("8a", "negative regions", e)),
    }
    let title = "n = 1 Wigner function changes sign across x = 0 along p = 0";
    match bench.states(&[(1, -0.75), (1, 4.0)]) {
        Ok(states) => {
            let mut ok = true;
            let mut parts = Vec::new();
            for s in &states {
                let w = &s.set.wigner;
                let spec = w.spec();
                let j = spec.p.count / 2;
                let mid = spec.x.count / 2;
                let left = (0..mid).map(|i| w.get(i, j)).fold(f64::NEG_INFINITY, f64::max);
                let right = (mid + 1..spec.x.count).map(|i| w.get(i, j)).fold(f64::NEG_INFINITY, f64::max);
                let centre = w.get(mid, j);
                let pass = left > 0.0 && right > 0.0 && centre < 0.0;
                ok &= pass;
                parts.push(format!("{}: max left {left:.4}, W(0,0) {centre:.4}, max right {right:.4}", state_label(s)));
            }
            out.push(Check::new("8b", ok, title, parts.join("; ")));
        }
        Err(e) => out.push(Check::error("8b", title, e)),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_are_complete() {
        assert_eq!(distinct_states(&ENTROPY_TABLE, |e| (e.0, e.1)).len(), 8);
        assert_eq!(distinct_states(&CRJ_TABLE, |e| (e.0, e.1)).len(), 12);
        for (id, e) in CRJ_SPOT_CHECKS {
            assert!(CRJ_TABLE.contains(&e), "{id}");
        }
    }

    #[test]
    fn crj_agreement_rule() {
        assert!(crj_agrees(0.6, 0.595489));
        assert!(!crj_agrees(0.58, 0.595489));
        assert!(crj_agrees(8.4e-7, 9.72868e-7));
        assert!(!crj_agrees(8.4e-8, 9.72868e-7));
        assert!(!crj_agrees(0.0, 9.72868e-7));
    }

    #[test]
    fn failing_lines_name_known_deviations() {
        let c = Check::new("3b", false, "S_p", "x");
        assert!(c.line().contains("known deviation"));
        let c = Check::new("3b", true, "S_p", "x");
        assert!(!c.line().contains("known deviation"));
        assert!(Check::new("1a", false, "E", "x").known_deviation().is_none());
    }

    #[test]
    fn criteria_are_numbered_in_order() {
        let numbers: Vec<u8> = criteria().iter().map(|c| c.number).collect();
        assert_eq!(numbers, (1..=8).collect::<Vec<_>>());
    }
}
