//! Phase-space portraits of a real state: the Wigner function, its
//! renormalized modulus, and the Husimi distribution, sampled on uniform
//! rectangular grids.

mod husimi;
mod wigner;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::trapezoid_weights;

pub use husimi::{husimi_by_smoothing, husimi_grid, husimi_grid_with_phase, HusimiPhase, SMOOTHING_MARGIN};
pub use wigner::{wigner_grid, wigner_value};

/// Uniformly spaced nodes `min, …, max` (both ends included).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub count: usize,
    pub min: f64,
    pub max: f64,
}

impl Axis {
    pub fn new(count: usize, min: f64, max: f64) -> Result<Self> {
        let axis = Self { count, min, max };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 || self.max <= self.min || !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "axis needs at least 2 nodes and a positive finite extent, got {} nodes on [{}, {}]",
                self.count, self.min, self.max
            )));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    /// Node `i`, written so that a symmetric axis has exactly mirrored nodes.
    pub fn node(&self, i: usize) -> f64 {
        let m = (self.count - 1) as f64;
        let t = i as f64;
        (self.min * (m - t) + self.max * t) / m
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.node(i)).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        trapezoid_weights(self.count, self.step())
    }

    /// Largest absolute coordinate on the axis.
    pub fn extent(&self) -> f64 {
        self.min.abs().max(self.max.abs())
    }

    fn contains(&self, other: &Axis) -> bool {
        other.min >= self.min && other.max <= self.max
    }
}

/// Position and momentum axes of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x: Axis,
    pub p: Axis,
}

impl Default for GridSpec {
    /// 241 × 241 nodes on `[−6, 6] × [−12, 12]`.
    fn default() -> Self {
        Self {
            x: Axis { count: 241, min: -6.0, max: 6.0 },
            p: Axis { count: 241, min: -12.0, max: 12.0 },
        }
    }
}

impl GridSpec {
    pub fn new(x: Axis, p: Axis) -> Result<Self> {
        x.validate()?;
        p.validate()?;
        Ok(Self { x, p })
    }

    /// Square-symmetric grid `[−x_max, x_max] × [−p_max, p_max]`.
    pub fn symmetric(nx: usize, x_max: f64, np: usize, p_max: f64) -> Result<Self> {
        Self::new(Axis::new(nx, -x_max, x_max)?, Axis::new(np, -p_max, p_max)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.x.validate()?;
        self.p.validate()
    }

    pub fn cell_area(&self) -> f64 {
        self.x.step() * self.p.step()
    }

    pub fn len(&self) -> usize {
        self.x.count * self.p.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The same node counts on a domain shrunk by `margin` on every side.
    pub fn shrink(&self, margin: f64) -> Result<Self> {
        Self::new(
            Axis::new(self.x.count, self.x.min + margin, self.x.max - margin)?,
            Axis::new(self.p.count, self.p.min + margin, self.p.max - margin)?,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DistributionKind {
    Wigner,
    AbsWigner,
    Husimi,
}

impl DistributionKind {
    pub const ALL: [DistributionKind; 3] = [Self::Wigner, Self::AbsWigner, Self::Husimi];

    /// Short label used in tables: `W`, `AbsW`, `H`.
    pub fn label(self) -> &'static str {
        match self {
            Self::Wigner => "W",
            Self::AbsWigner => "AbsW",
            Self::Husimi => "H",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Wigner => "wigner",
            Self::AbsWigner => "abs-wigner",
            Self::Husimi => "husimi",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "w" | "wigner" => Some(Self::Wigner),
            "absw" | "abs-wigner" | "abswigner" | "|w|" => Some(Self::AbsWigner),
            "h" | "husimi" => Some(Self::Husimi),
            _ => None,
        }
    }
}

/// Samples of a distribution on a grid, stored row-major with `x` as the row
/// index: `values[i * p.count + j] = Q(x_i, p_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    spec: GridSpec,
    kind: DistributionKind,
    values: Vec<f64>,
}

impl PhaseGrid {
    pub fn from_values(spec: GridSpec, kind: DistributionKind, values: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if values.len() != spec.len() {
            return Err(Error::InvalidArgument(format!(
                "grid holds {} values but the spec has {} cells",
                values.len(),
                spec.len()
            )));
        }
        Ok(Self { spec, kind, values })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn x_nodes(&self) -> Vec<f64> {
        self.spec.x.nodes()
    }

    pub fn p_nodes(&self) -> Vec<f64> {
        self.spec.p.nodes()
    }

    pub fn cell_area(&self) -> f64 {
        self.spec.cell_area()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.spec.p.count + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let np = self.spec.p.count;
        &self.values[i * np..(i + 1) * np]
    }

    /// Value at the node nearest to `(x, p)`.
    pub fn nearest(&self, x: f64, p: f64) -> f64 {
        let idx = |a: &Axis, v: f64| {
            (((v - a.min) / a.step()).round().clamp(0.0, (a.count - 1) as f64)) as usize
        };
        self.get(idx(&self.spec.x, x), idx(&self.spec.p, p))
    }

    /// 2D trapezoid integral of `f(value)`, summed row by row.
    pub fn integrate_with<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let wx = self.spec.x.weights();
        let wp = self.spec.p.weights();
        wx.iter()
            .enumerate()
            .map(|(i, &a)| a * self.row(i).iter().zip(&wp).map(|(&v, &b)| b * f(v)).sum::<f64>())
            .sum()
    }

    pub fn integral(&self) -> f64 {
        self.integrate_with(|v| v)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest pointwise difference to a grid on the same nodes.
    pub fn sup_distance(&self, other: &PhaseGrid) -> Result<f64> {
        if self.spec != other.spec {
            return Err(Error::MismatchedNodes);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    fn require(&self, kind: DistributionKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::KindMismatch {
                expected: kind.name(),
                found: self.kind.name(),
            });
        }
        Ok(())
    }
}

/// `|W| / ∬|W|`.
pub fn abs_wigner_grid(w: &PhaseGrid) -> Result<PhaseGrid> {
    w.require(DistributionKind::Wigner)?;
    let total = w.integrate_with(f64::abs);
    if total.is_nan() || total <= 0.0 {
        return Err(Error::DegenerateGrid);
    }
    let values = w.values.iter().map(|v| v.abs() / total).collect();
    PhaseGrid::from_values(w.spec, DistributionKind::AbsWigner, values)
}

/// `∬_{W<0} |W| dx dp` with the grid's trapezoid weights.
pub fn negativity_volume(w: &PhaseGrid) -> Result<f64> {
    w.require(DistributionKind::Wigner)?;
    Ok(w.integrate_with(|v| if v < 0.0 { -v } else { 0.0 }))
}

/// The three portraits of one state on a shared grid.
#[derive(Debug, Clone)]
pub struct PhaseSpaceSet {
    pub wigner: PhaseGrid,
    pub abs_wigner: PhaseGrid,
    pub husimi: PhaseGrid,
}

impl PhaseSpaceSet {
    pub fn compute(psi: &crate::model::Wavefunction, spec: &GridSpec) -> Result<Self> {
        let wigner = wigner_grid(psi, spec)?;
        let abs_wigner = abs_wigner_grid(&wigner)?;
        let husimi = husimi_grid(psi, spec)?;
        Ok(Self {
            wigner,
            abs_wigner,
            husimi,
        })
    }

    pub fn get(&self, kind: DistributionKind) -> &PhaseGrid {
        match kind {
            DistributionKind::Wigner => &self.wigner,
            DistributionKind::AbsWigner => &self.abs_wigner,
            DistributionKind::Husimi => &self.husimi,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Wavefunction;
    use crate::variational::solve_state;
    use std::f64::consts::PI;

    fn small_spec() -> GridSpec {
        GridSpec::symmetric(81, 6.5, 81, 6.5).unwrap()
    }

    #[test]
    fn axis_nodes_mirror_exactly() {
        let a = Axis::new(241, -6.0, 6.0).unwrap();
        for i in 0..241 {
            assert_eq!(a.node(i), -a.node(240 - i));
        }
        assert_eq!(a.node(120), 0.0);
        assert!((a.step() - 0.05).abs() < 1e-15);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(Axis::new(1, 0.0, 1.0).is_err());
        assert!(Axis::new(10, 1.0, 1.0).is_err());
        assert!(Axis::new(10, 0.0, f64::NAN).is_err());
        assert!(GridSpec::symmetric(41, 1.0, 41, 0.5).unwrap().shrink(0.6).is_err());
    }

    #[test]
    fn kind_labels_round_trip() {
        for k in DistributionKind::ALL {
            assert_eq!(DistributionKind::parse(k.label()), Some(k));
            assert_eq!(DistributionKind::parse(k.name()), Some(k));
        }
        assert_eq!(DistributionKind::parse("x"), None);
    }

    #[test]
    fn gaussian_modulus_equals_wigner() {
        let w = wigner_grid(&Wavefunction::gaussian(), &small_spec()).unwrap();
        let a = abs_wigner_grid(&w).unwrap();
        assert!(w.sup_distance(&a).unwrap() < 1e-12);
        // only rounding-level negatives in the far tails
        assert!(negativity_volume(&w).unwrap() < 1e-15);
    }

    #[test]
    fn odd_state_modulus_is_positive_at_origin() {
        let psi = solve_state(1, 1.0, 6).unwrap().wavefunction();
        let w = wigner_grid(&psi, &GridSpec::default()).unwrap();
        let a = abs_wigner_grid(&w).unwrap();
        let total = w.integrate_with(f64::abs);
        assert!(total > 1.0);
        assert!(w.nearest(0.0, 0.0) < 0.0);
        assert!((a.nearest(0.0, 0.0) - (1.0 / PI) / total).abs() < 1e-9);
        assert!(negativity_volume(&w).unwrap() > 0.0);
        // ∬|W| = 1 + 2·negativity volume
        assert!((total - 1.0 - 2.0 * negativity_volume(&w).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn kind_is_enforced() {
        let h = husimi_grid(&Wavefunction::gaussian(), &small_spec()).unwrap();
        assert!(matches!(abs_wigner_grid(&h), Err(Error::KindMismatch { .. })));
        assert!(matches!(negativity_volume(&h), Err(Error::KindMismatch { .. })));
        let zero = PhaseGrid::from_values(small_spec(), DistributionKind::Wigner, vec![0.0; 81 * 81]).unwrap();
        assert!(matches!(abs_wigner_grid(&zero), Err(Error::DegenerateGrid)));
    }
}
