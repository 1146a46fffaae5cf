use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phasespace::DistributionKind;
use crate::quadrature::trapezoid_weights;

use super::{MarginalDensity, MarginalSet, Projection};

/// Survival values at or below this are treated as zero by the divergence.
pub const CRJ_SURVIVAL_FLOOR: f64 = 1e-300;

/// Excluded tail mass above which the divergence logs a warning.
const EXCLUDED_MASS_WARNING: f64 = 1e-8;

/// How a density is integrated between neighbouring nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurvivalRule {
    /// The density is interpolated as an exponential on each segment, so
    /// Gaussian-like tails keep their relative accuracy far from the bulk.
    #[default]
    LogLinear,
    /// Linear interpolation of the density.
    Trapezoid,
}

/// `S(x) = ∫_x^∞ ρ(t) dt` at the nodes of a density.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalCurve {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

fn segment(a: f64, b: f64, h: f64, rule: SurvivalRule) -> f64 {
    match rule {
        SurvivalRule::Trapezoid => 0.5 * h * (a + b),
        SurvivalRule::LogLinear => {
            if a <= 0.0 || b <= 0.0 {
                0.5 * h * (a + b)
            } else {
                let r = (b / a).ln();
                if r.abs() < 1e-8 {
                    // series of (e^r − 1)/r about r = 0
                    h * a * (1.0 + 0.5 * r + r * r / 6.0)
                } else {
                    h * (b - a) / r
                }
            }
        }
    }
}

pub fn survival_curve(m: &MarginalDensity) -> SurvivalCurve {
    survival_curve_with(m, SurvivalRule::default())
}

/// Cumulates segment integrals from the right and scales so that the first
/// node carries exactly one; values are clamped to `[0, 1]`.
pub fn survival_curve_with(m: &MarginalDensity, rule: SurvivalRule) -> SurvivalCurve {
    let rho = m.values();
    let h = m.axis().step();
    let n = rho.len();
    let mut values = vec![0.0; n];
    for k in (0..n - 1).rev() {
        values[k] = values[k + 1] + segment(rho[k], rho[k + 1], h, rule);
    }
    let total = values[0];
    if total > 0.0 {
        values.iter_mut().for_each(|v| *v = (*v / total).clamp(0.0, 1.0));
    }
    SurvivalCurve {
        nodes: m.nodes(),
        values,
    }
}

/// The divergence together with its tail bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrjAudit {
    pub value: f64,
    /// Nodes where exactly one survival was below the floor.
    pub excluded_nodes: usize,
    /// Largest survival value dropped at an excluded node.
    pub excluded_mass: f64,
}

/// `∫ (S_a − S_b) ln(S_a/S_b) dx`, the symmetrized cumulative residual
/// divergence of two densities on the same nodes.
pub fn crj_divergence(a: &MarginalDensity, b: &MarginalDensity) -> Result<f64> {
    crj_divergence_audited(a, b).map(|r| r.value)
}

pub fn crj_divergence_audited(a: &MarginalDensity, b: &MarginalDensity) -> Result<CrjAudit> {
    if a.axis() != b.axis() {
        return Err(Error::MismatchedNodes);
    }
    let sa = survival_curve(a).values;
    let sb = survival_curve(b).values;
    let weights = trapezoid_weights(sa.len(), a.axis().step());
    let mut value = 0.0;
    let mut excluded_nodes = 0;
    let mut excluded_mass: f64 = 0.0;
    for ((&x, &y), &w) in sa.iter().zip(&sb).zip(&weights) {
        match (x > CRJ_SURVIVAL_FLOOR, y > CRJ_SURVIVAL_FLOOR) {
            (true, true) => value += w * (x - y) * (x / y).ln(),
            (false, false) => {}
            _ => {
                excluded_nodes += 1;
                excluded_mass = excluded_mass.max(x.max(y));
            }
        }
    }
    if excluded_mass > EXCLUDED_MASS_WARNING {
        log::warn!("divergence excluded {excluded_nodes} nodes carrying tail mass up to {excluded_mass:.3e}");
    }
    Ok(CrjAudit {
        value,
        excluded_nodes,
        excluded_mass,
    })
}

/// The three compared pairs of distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CrjPair {
    AbsWignerWigner,
    HusimiWigner,
    HusimiAbsWigner,
}

impl CrjPair {
    pub const ALL: [CrjPair; 3] = [Self::AbsWignerWigner, Self::HusimiWigner, Self::HusimiAbsWigner];

    pub fn kinds(self) -> (DistributionKind, DistributionKind) {
        use DistributionKind::*;
        match self {
            Self::AbsWignerWigner => (AbsWigner, Wigner),
            Self::HusimiWigner => (Husimi, Wigner),
            Self::HusimiAbsWigner => (Husimi, AbsWigner),
        }
    }

    /// `AbsW-W`, `H-W` or `H-AbsW`.
    pub fn label(self) -> &'static str {
        match self {
            Self::AbsWignerWigner => "AbsW-W",
            Self::HusimiWigner => "H-W",
            Self::HusimiAbsWigner => "H-AbsW",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.label().eq_ignore_ascii_case(s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrjRow {
    pub lambda: f64,
    pub n: usize,
    pub space: Projection,
    pub pair: CrjPair,
    pub value: f64,
}

/// All three pairs in both spaces, position first.
pub fn crj_rows(marginals: &MarginalSet, lambda: f64, n: usize) -> Result<Vec<CrjRow>> {
    let mut rows = Vec::with_capacity(6);
    for space in Projection::BOTH {
        for pair in CrjPair::ALL {
            let (first, second) = pair.kinds();
            rows.push(CrjRow {
                lambda,
                n,
                space,
                pair,
                value: crj_divergence(marginals.get(space, first), marginals.get(space, second))?,
            });
        }
    }
    Ok(rows)
}
