//! Marginals, Shannon entropies (complex-valued for the Wigner function),
//! mutual information, survival curves and the cumulative residual Jeffreys
//! divergence. All entropies are in nats.

mod crj;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Wavefunction;
use crate::phasespace::{Axis, DistributionKind, PhaseGrid, PhaseSpaceSet};
use crate::quadrature::{trapezoid_weights, CompositeRule, GaussLegendre};
use crate::variational::momentum_wavefunction;

pub use crj::{
    crj_divergence, crj_divergence_audited, crj_rows, survival_curve, survival_curve_with, CrjAudit,
    CrjPair, CrjRow, SurvivalCurve, SurvivalRule, CRJ_SURVIVAL_FLOOR,
};

/// Densities at or below this value contribute nothing to `−ρ ln ρ`.
pub const ZERO_DENSITY: f64 = 1e-300;

/// Largest tolerated deviation of a projected marginal's integral from one.
pub const RENORMALIZATION_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Projection {
    Position,
    Momentum,
}

impl Projection {
    pub const BOTH: [Projection; 2] = [Self::Position, Self::Momentum];

    pub fn name(self) -> &'static str {
        match self {
            Self::Position => "position",
            Self::Momentum => "momentum",
        }
    }
}

/// A one-dimensional density on uniformly spaced nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalDensity {
    projection: Projection,
    axis: Axis,
    values: Vec<f64>,
    source_kind: Option<DistributionKind>,
    renormalization: f64,
}

impl MarginalDensity {
    /// Projects a grid onto one axis by trapezoid integration over the other,
    /// then rescales to unit integral.
    pub fn marginal(grid: &PhaseGrid, projection: Projection) -> Result<Self> {
        let spec = grid.spec();
        let (axis, raw) = match projection {
            Projection::Position => {
                let wp = spec.p.weights();
                let v = (0..spec.x.count)
                    .map(|i| grid.row(i).iter().zip(&wp).map(|(a, b)| a * b).sum())
                    .collect::<Vec<f64>>();
                (spec.x, v)
            }
            Projection::Momentum => {
                let wx = spec.x.weights();
                let mut v = vec![0.0; spec.p.count];
                for (i, &w) in wx.iter().enumerate() {
                    for (acc, &q) in v.iter_mut().zip(grid.row(i)) {
                        *acc += w * q;
                    }
                }
                (spec.p, v)
            }
        };
        let mut m = Self::from_samples(projection, axis, raw)?;
        m.source_kind = Some(grid.kind());
        if (m.renormalization - 1.0).abs() > RENORMALIZATION_TOLERANCE {
            log::warn!(
                "{} marginal of {} grid renormalized by {:.3e}",
                projection.name(),
                grid.kind().name(),
                m.renormalization
            );
        } else {
            log::debug!("{} marginal renormalized by {:.3e}", projection.name(), m.renormalization);
        }
        Ok(m)
    }

    /// Wraps samples of a density on `axis`, clamping rounding-level negatives
    /// and rescaling to unit trapezoid integral.
    pub fn from_samples(projection: Projection, axis: Axis, values: Vec<f64>) -> Result<Self> {
        axis.validate()?;
        if values.len() != axis.count {
            return Err(Error::MismatchedNodes);
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("density sample {v} is not finite")));
        }
        let mut clamped = 0usize;
        let mut values: Vec<f64> = values
            .into_iter()
            .map(|v| {
                if v < 0.0 {
                    clamped += 1;
                    0.0
                } else {
                    v
                }
            })
            .collect();
        if clamped > 0 {
            log::debug!("clamped {clamped} negative density samples to zero");
        }
        let total: f64 = trapezoid_weights(axis.count, axis.step())
            .iter()
            .zip(&values)
            .map(|(w, v)| w * v)
            .sum();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::DegenerateGrid);
        }
        values.iter_mut().for_each(|v| *v /= total);
        Ok(Self {
            projection,
            axis,
            values,
            source_kind: None,
            renormalization: 1.0 / total,
        })
    }

    /// Samples `f` on the nodes of `axis`.
    pub fn from_fn<F: Fn(f64) -> f64>(projection: Projection, axis: Axis, f: F) -> Result<Self> {
        let values = axis.nodes().into_iter().map(f).collect();
        Self::from_samples(projection, axis, values)
    }

    pub fn projection(&self) -> Projection {
        self.projection
    }

    pub fn axis(&self) -> &Axis {
        &self.axis
    }

    pub fn nodes(&self) -> Vec<f64> {
        self.axis.nodes()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source_kind(&self) -> Option<DistributionKind> {
        self.source_kind
    }

    /// Factor applied to reach unit integral.
    pub fn renormalization(&self) -> f64 {
        self.renormalization
    }

    pub fn integral(&self) -> f64 {
        self.weighted_sum(|v| v)
    }

    fn weighted_sum<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        trapezoid_weights(self.axis.count, self.axis.step())
            .iter()
            .zip(&self.values)
            .map(|(w, &v)| w * f(v))
            .sum()
    }
}

/// Position and momentum marginals of W, |W| and H on a shared grid.
#[derive(Debug, Clone)]
pub struct MarginalSet {
    position: [MarginalDensity; 3],
    momentum: [MarginalDensity; 3],
}

fn kind_index(kind: DistributionKind) -> usize {
    match kind {
        DistributionKind::Wigner => 0,
        DistributionKind::AbsWigner => 1,
        DistributionKind::Husimi => 2,
    }
}

impl MarginalSet {
    /// Every marginal by projection of its grid.
    pub fn from_grids(set: &PhaseSpaceSet) -> Result<Self> {
        let project = |space| -> Result<[MarginalDensity; 3]> {
            Ok([
                MarginalDensity::marginal(&set.wigner, space)?,
                MarginalDensity::marginal(&set.abs_wigner, space)?,
                MarginalDensity::marginal(&set.husimi, space)?,
            ])
        };
        Ok(Self {
            position: project(Projection::Position)?,
            momentum: project(Projection::Momentum)?,
        })
    }

    /// As [`MarginalSet::from_grids`], but the Wigner marginals are the
    /// quantum densities `|ψ(x)|²` and `|φ(p)|²` sampled on the grid nodes.
    ///
    /// They agree with the projections wherever the grid resolves them, and
    /// keep their far tails, which the projection loses once `ψ(x ± y)`
    /// leaves the support radius. Tail-dominated measures need those tails.
    pub fn with_exact_wigner(set: &PhaseSpaceSet, psi: &Wavefunction) -> Result<Self> {
        let mut m = Self::from_grids(set)?;
        let spec = set.wigner.spec();
        let phi = momentum_wavefunction(psi, spec.p.extent())?;
        let mut x = MarginalDensity::from_fn(Projection::Position, spec.x, |t| psi.density(t))?;
        x.source_kind = Some(DistributionKind::Wigner);
        let p_values = spec
            .p
            .nodes()
            .into_iter()
            .map(|t| phi.density(t))
            .collect::<Result<Vec<_>>>()?;
        let mut p = MarginalDensity::from_samples(Projection::Momentum, spec.p, p_values)?;
        p.source_kind = Some(DistributionKind::Wigner);
        m.position[0] = x;
        m.momentum[0] = p;
        Ok(m)
    }

    pub fn get(&self, space: Projection, kind: DistributionKind) -> &MarginalDensity {
        match space {
            Projection::Position => &self.position[kind_index(kind)],
            Projection::Momentum => &self.momentum[kind_index(kind)],
        }
    }
}

/// `−ρ ln ρ`, zero at and below [`ZERO_DENSITY`].
fn neg_entropy_density(v: f64) -> f64 {
    if v <= ZERO_DENSITY {
        0.0
    } else {
        -v * v.ln()
    }
}

/// `−∫ ρ ln ρ` by the trapezoid rule.
pub fn shannon_1d(m: &MarginalDensity) -> f64 {
    m.weighted_sum(neg_entropy_density)
}

/// `−∬ Q ln Q` with `ln Q = ln|Q| + iπ` where `Q < 0`.
///
/// The real part is `−∬ Q ln|Q|`, so negative cells lower it; the imaginary
/// part is `π` times the negativity volume of the grid.
pub fn shannon_2d(grid: &PhaseGrid) -> Complex64 {
    let re = grid.integrate_with(|v| v.signum() * neg_entropy_density(v.abs()));
    let im = PI * grid.integrate_with(|v| if v < 0.0 { -v } else { 0.0 });
    Complex64::new(re, im)
}

/// Entropic summary of one distribution of one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub lambda: f64,
    pub n: usize,
    pub kind: DistributionKind,
    pub s2d: Complex64,
    pub sx: f64,
    pub sp: f64,
    /// `S_x + S_p`.
    pub st: f64,
    /// `S_x + S_p − S[Q]`; its imaginary part is `−Im S[Q]`.
    pub mutual_information: Complex64,
}

impl EntropyReport {
    pub fn from_grid(grid: &PhaseGrid, lambda: f64, n: usize) -> Result<Self> {
        let sx = shannon_1d(&MarginalDensity::marginal(grid, Projection::Position)?);
        let sp = shannon_1d(&MarginalDensity::marginal(grid, Projection::Momentum)?);
        let s2d = shannon_2d(grid);
        let st = sx + sp;
        Ok(Self {
            lambda,
            n,
            kind: grid.kind(),
            s2d,
            sx,
            sp,
            st,
            mutual_information: Complex64::new(st, 0.0) - s2d,
        })
    }
}

/// Reports for W, |W| and H in that order.
pub fn entropy_reports(set: &PhaseSpaceSet, lambda: f64, n: usize) -> Result<[EntropyReport; 3]> {
    Ok([
        EntropyReport::from_grid(&set.wigner, lambda, n)?,
        EntropyReport::from_grid(&set.abs_wigner, lambda, n)?,
        EntropyReport::from_grid(&set.husimi, lambda, n)?,
    ])
}

/// Computes the grids of `psi` and the report for one kind.
pub fn entropy_report(
    psi: &Wavefunction,
    lambda: f64,
    n: usize,
    kind: DistributionKind,
    spec: &crate::phasespace::GridSpec,
) -> Result<EntropyReport> {
    let set = PhaseSpaceSet::compute(psi, spec)?;
    EntropyReport::from_grid(set.get(kind), lambda, n)
}

/// Ordering checks across the three kinds of one state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hierarchy {
    /// `S_x[W] < S_x[|W|] < S_x[H]`.
    pub position: bool,
    /// `S_p[W] < S_p[|W|] < S_p[H]`.
    pub momentum: bool,
    /// `Re S[W] < |S[W]| < S[|W|] < S[H]`.
    pub joint: bool,
    /// `Re I_W > I_|W| > I_H`.
    pub mutual_information: bool,
}

impl Hierarchy {
    pub fn check(reports: &[EntropyReport; 3]) -> Self {
        let [w, a, h] = reports;
        Self {
            position: w.sx < a.sx && a.sx < h.sx,
            momentum: w.sp < a.sp && a.sp < h.sp,
            joint: w.s2d.re < w.s2d.norm() && w.s2d.norm() < a.s2d.re && a.s2d.re < h.s2d.re,
            mutual_information: w.mutual_information.re > a.mutual_information.re
                && a.mutual_information.re > h.mutual_information.re,
        }
    }

    pub fn holds(&self) -> bool {
        self.position && self.momentum && self.joint && self.mutual_information
    }
}

/// Position and momentum entropies of `|ψ(x)|²` and `|φ(p)|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalEntropies {
    pub sx: f64,
    pub sp: f64,
}

/// Marginal entropies from the wavefunction itself, by Gauss–Legendre
/// quadrature; `p_max` bounds the momentum integral.
pub fn wavefunction_entropies(psi: &Wavefunction, p_max: f64) -> Result<MarginalEntropies> {
    let rule = GaussLegendre::new(20);
    let sx = psi
        .support_rule()
        .integrate(|x| neg_entropy_density(psi.density(x)));
    let phi = momentum_wavefunction(psi, p_max)?;
    let comp = CompositeRule::with_max_width(&rule, -p_max, p_max, 0.25, 8);
    let mut sp = 0.0;
    for (&p, &w) in comp.nodes.iter().zip(&comp.weights) {
        sp += w * neg_entropy_density(phi.density(p)?);
    }
    Ok(MarginalEntropies { sx, sp })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_qes_matrix;
    use crate::phasespace::{husimi_grid, wigner_grid, GridSpec};
    use crate::variational::solve_state;
    use proptest::prelude::*;

    fn gaussian_set() -> PhaseSpaceSet {
        let spec = GridSpec::symmetric(161, 8.0, 161, 8.0).unwrap();
        PhaseSpaceSet::compute(&Wavefunction::gaussian(), &spec).unwrap()
    }

    #[test]
    fn gaussian_marginals() {
        let set = gaussian_set();
        let mw = MarginalDensity::marginal(&set.wigner, Projection::Position).unwrap();
        let mh = MarginalDensity::marginal(&set.husimi, Projection::Position).unwrap();
        let mid = mw.values().len() / 2;
        assert!((mw.values()[mid] - PI.powf(-0.5)).abs() < 1e-10);
        assert!((mw.values()[mid] - 0.564190).abs() < 1e-6);
        assert!((mh.values()[mid] - (2.0 * PI).powf(-0.5)).abs() < 1e-10);
        assert!((mh.values()[mid] - 0.398942).abs() < 1e-6);
        assert!((mw.renormalization() - 1.0).abs() < 1e-10);
        assert_eq!(mw.source_kind(), Some(DistributionKind::Wigner));
    }

    #[test]
    fn gaussian_entropy_oracles() {
        let set = gaussian_set();
        let [w, a, h] = entropy_reports(&set, 0.0, 0).unwrap();
        let one_d = 0.5 * (1.0 + PI.ln());
        assert!((w.sx - one_d).abs() < 1e-8);
        assert!((w.sp - one_d).abs() < 1e-8);
        assert!((w.s2d.re - (1.0 + PI.ln())).abs() < 1e-6);
        assert!(w.s2d.im.abs() < 1e-15);
        assert!((h.s2d.re - (1.0 + (2.0 * PI).ln())).abs() < 1e-6);
        assert!(w.mutual_information.norm() < 1e-6);
        assert!(a.mutual_information.norm() < 1e-6);
        assert!(h.mutual_information.norm() < 1e-6);
        // analytic sampled entropy on a default-resolution axis
        let axis = Axis::new(241, -6.0, 6.0).unwrap();
        let m = MarginalDensity::from_fn(Projection::Position, axis, |x| (-x * x).exp() / PI.sqrt()).unwrap();
        assert!((shannon_1d(&m) - one_d).abs() < 1e-8);
        assert!((one_d - 1.072365).abs() < 1e-6);
    }

    #[test]
    fn exact_ground_state_entropies() {
        // algebraic λ = 0 and λ = 1 ground states
        for (n, sx) in [(0, 0.79109828152), (1, 0.993321580789)] {
            let psi = build_qes_matrix(n).unwrap().wavefunction(0).unwrap();
            let e = wavefunction_entropies(&psi, 16.0).unwrap();
            assert!((e.sx - sx).abs() < 1e-9, "N={n}: {}", e.sx);
        }
    }

    #[test]
    fn momentum_entropy_matches_grid_route() {
        let psi = solve_state(0, 1.0, 6).unwrap().wavefunction();
        let e = wavefunction_entropies(&psi, 16.0).unwrap();
        let axis = Axis::new(641, -16.0, 16.0).unwrap();
        let phi = momentum_wavefunction(&psi, 16.0).unwrap();
        let m = MarginalDensity::from_fn(Projection::Momentum, axis, |p| phi.density(p).unwrap()).unwrap();
        // the density has double zeros in p, where −ρ ln ρ is only C¹
        assert!((shannon_1d(&m) - e.sp).abs() < 1e-6);
    }

    #[test]
    fn variational_entropies_converge_to_algebraic() {
        let exact = wavefunction_entropies(&build_qes_matrix(1).unwrap().wavefunction(0).unwrap(), 16.0).unwrap();
        let var = wavefunction_entropies(&solve_state(0, 1.0, 6).unwrap().wavefunction(), 16.0).unwrap();
        assert!((exact.sx - var.sx).abs() < 1e-7);
        assert!((exact.sp - var.sp).abs() < 5e-7);
    }

    #[test]
    fn wigner_marginal_matches_density() {
        let psi = solve_state(1, 4.0, 6).unwrap().wavefunction();
        let spec = GridSpec::default();
        let w = wigner_grid(&psi, &spec).unwrap();
        let m = MarginalDensity::marginal(&w, Projection::Position).unwrap();
        for (x, v) in m.nodes().iter().zip(m.values()) {
            assert!((psi.density(*x) - v).abs() < 1e-5);
        }
    }

    #[test]
    fn branch_identity_and_hierarchy() {
        let spec = GridSpec::default();
        for n in [0, 1] {
            for lambda in [-0.75, 4.0] {
                let psi = solve_state(n, lambda, 6).unwrap().wavefunction();
                let set = PhaseSpaceSet::compute(&psi, &spec).unwrap();
                let reports = entropy_reports(&set, lambda, n).unwrap();
                let nv = crate::phasespace::negativity_volume(&set.wigner).unwrap();
                assert!((reports[0].s2d.im - PI * nv).abs() < 1e-12);
                assert_eq!(reports[1].s2d.im, 0.0);
                assert_eq!(reports[2].s2d.im, 0.0);
                assert!((reports[0].mutual_information.im + reports[0].s2d.im).abs() < 1e-15);
                let hier = Hierarchy::check(&reports);
                assert!(hier.joint && hier.momentum, "n={n} λ={lambda}: {hier:?}");
                // Single-well ground state: W is almost nonnegative and the
                // renormalized modulus is marginally narrower in x.
                assert_eq!(hier.position, !(n == 0 && lambda < 0.0), "n={n} λ={lambda}");
                // Strong negativity pushes Re S[W] above S_x + S_p.
                let [w, a, h] = &reports;
                assert!(a.mutual_information.re > h.mutual_information.re);
                assert_eq!(w.mutual_information.re > a.mutual_information.re, n == 0 && lambda < 0.0);
                assert!(reports[0].st >= 1.0 + PI.ln() - 1e-6);
                assert!(reports[1].mutual_information.re >= -1e-6);
                assert!(reports[2].mutual_information.re >= -1e-6);
                for r in &reports {
                    assert_eq!(r.st, r.sx + r.sp);
                }
            }
        }
    }

    #[test]
    fn exact_wigner_marginals_agree_with_projection() {
        let psi = solve_state(0, 4.0, 6).unwrap().wavefunction();
        let set = PhaseSpaceSet::compute(&psi, &GridSpec::default()).unwrap();
        let grid = MarginalSet::from_grids(&set).unwrap();
        let exact = MarginalSet::with_exact_wigner(&set, &psi).unwrap();
        for space in Projection::BOTH {
            let (a, b) = (grid.get(space, DistributionKind::Wigner), exact.get(space, DistributionKind::Wigner));
            let d = a.values().iter().zip(b.values()).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
            assert!(d < 1e-5, "{space:?}: {d:e}");
            assert_eq!(
                grid.get(space, DistributionKind::Husimi),
                exact.get(space, DistributionKind::Husimi)
            );
        }
        // the projection has no far tail; the exact density does
        let x0 = exact.get(Projection::Position, DistributionKind::Wigner).values()[0];
        assert!(x0 > 0.0 && x0 < 1e-250);
        let rows = crj_rows(&exact, 4.0, 0).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows.iter().all(|r| r.value > 0.0));
    }

    #[test]
    fn ground_state_wigner_position_entropy_at_four() {
        let psi = solve_state(0, 4.0, 6).unwrap().wavefunction();
        let w = wigner_grid(&psi, &GridSpec::default()).unwrap();
        let sx = shannon_1d(&MarginalDensity::marginal(&w, Projection::Position).unwrap());
        assert!((sx - 0.852065).abs() < 0.005, "{sx}");
        let h = husimi_grid(&psi, &GridSpec::default()).unwrap();
        let r = EntropyReport::from_grid(&h, 4.0, 0).unwrap();
        assert!((r.sx - 1.70738).abs() < 0.01 && (r.sp - 2.05315).abs() < 0.01);
    }

    #[test]
    fn sample_validation() {
        let axis = Axis::new(5, -1.0, 1.0).unwrap();
        assert!(MarginalDensity::from_samples(Projection::Position, axis, vec![1.0; 4]).is_err());
        assert!(MarginalDensity::from_samples(Projection::Position, axis, vec![0.0; 5]).is_err());
        assert!(MarginalDensity::from_samples(Projection::Position, axis, vec![f64::NAN; 5]).is_err());
        let m = MarginalDensity::from_samples(Projection::Position, axis, vec![-1e-14, 1.0, 2.0, 1.0, 0.0]).unwrap();
        assert_eq!(m.values()[0], 0.0);
        assert!((m.integral() - 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn entropy_of_uniform_density_is_log_width(width in 0.5..20.0f64) {
            let axis = Axis::new(101, 0.0, width).unwrap();
            let m = MarginalDensity::from_fn(Projection::Position, axis, |_| 1.0).unwrap();
            prop_assert!((shannon_1d(&m) - width.ln()).abs() < 1e-12);
        }

        #[test]
        fn gaussian_entropy_depends_only_on_width(sigma in 0.3..2.0f64, shift in -1.0..1.0f64) {
            let axis = Axis::new(801, -16.0, 16.0).unwrap();
            let m = MarginalDensity::from_fn(Projection::Position, axis, |x| {
                (-(x - shift).powi(2) / (2.0 * sigma * sigma)).exp()
            }).unwrap();
            let want = 0.5 * (2.0 * PI * std::f64::consts::E * sigma * sigma).ln();
            prop_assert!((shannon_1d(&m) - want).abs() < 1e-8);
        }
    }
}
