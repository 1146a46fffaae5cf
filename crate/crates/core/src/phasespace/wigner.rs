use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::Wavefunction;
use crate::quadrature::{CompositeRule, GaussLegendre};

use super::{DistributionKind, GridSpec, PhaseGrid};

const PANEL_NODES: usize = 32;

/// Relative size below which the integrand of a tail row is dropped.
const TAIL_RELATIVE_CUTOFF: f64 = 1e-16;
/// Scan step of the tail window search.
const TAIL_SCAN_STEP: f64 = 0.01;

/// Window of a row near or beyond the support radius: the distance at
/// which `|ψ(x+y)ψ(x−y)|` has fallen [`TAIL_RELATIVE_CUTOFF`] below its
/// running maximum. The integrand there is far below the absolute decay
/// threshold, but it carries the row's whole (tiny) value, which the
/// tail-sensitive divergences resolve.
fn tail_window(psi: &Wavefunction, x: f64) -> f64 {
    let limit = 2.0 * psi.decay_scale();
    let mut peak = 0.0f64;
    let mut y = 0.0;
    while y < limit {
        let v = (psi.value(x + y) * psi.value(x - y)).abs();
        peak = peak.max(v);
        if peak == 0.0 || (y > 0.0 && v < TAIL_RELATIVE_CUTOFF * peak) {
            break;
        }
        y += TAIL_SCAN_STEP;
    }
    if peak == 0.0 {
        0.0
    } else {
        y
    }
}

/// `y`-nodes and weights × `ψ(x+y)ψ(x−y)` on `[0, Y]`.
///
/// `Y = X − |x|` in the bulk: beyond it one of the two factors lies outside
/// the support radius `X`, so the integrand is below the decay threshold.
/// Rows near or beyond `X` use [`tail_window`] instead.
fn row_integrand(psi: &Wavefunction, rule: &GaussLegendre, x: f64, p_max: f64) -> (Vec<f64>, Vec<f64>) {
    let interior = psi.decay_scale() - x.abs();
    let y_max = if interior >= 1.0 { interior } else { interior.max(tail_window(psi, x)) };
    if y_max <= 0.0 {
        return (Vec::new(), Vec::new());
    }
    let width = PI / (2.0 * p_max + 1.0);
    let comp = CompositeRule::with_max_width(rule, 0.0, y_max, width, 1);
    let weighted = comp
        .nodes
        .iter()
        .zip(&comp.weights)
        .map(|(&y, &w)| w * psi.value(x + y) * psi.value(x - y))
        .collect();
    (comp.nodes, weighted)
}

fn require_normalized(psi: &Wavefunction) -> Result<()> {
    if !psi.is_normalized() {
        return Err(Error::InvalidArgument("state must be normalized".into()));
    }
    Ok(())
}

/// `W(x, p) = (2/π) ∫₀^Y ψ(x+y) ψ(x−y) cos(2py) dy` for a single point.
pub fn wigner_value(psi: &Wavefunction, x: f64, p: f64) -> Result<f64> {
    require_normalized(psi)?;
    let rule = GaussLegendre::new(PANEL_NODES);
    let (ys, fw) = row_integrand(psi, &rule, x, p.abs());
    Ok(2.0 / PI * ys.iter().zip(&fw).map(|(&y, &f)| f * (2.0 * p * y).cos()).sum::<f64>())
}

/// Wigner function of a normalized real state on every node of `spec`.
///
/// Rows are evaluated in parallel; every cell is a fixed-order sum, so the
/// result does not depend on the thread count.
pub fn wigner_grid(psi: &Wavefunction, spec: &GridSpec) -> Result<PhaseGrid> {
    spec.validate()?;
    require_normalized(psi)?;
    let rule = GaussLegendre::new(PANEL_NODES);
    let p_nodes = spec.p.nodes();
    let p_max = spec.p.extent();
    let np = spec.p.count;
    let mut values = vec![0.0; spec.len()];
    values
        .par_chunks_mut(np)
        .enumerate()
        .for_each(|(i, row)| {
            let (ys, fw) = row_integrand(psi, &rule, spec.x.node(i), p_max);
            for (cell, &p) in row.iter_mut().zip(&p_nodes) {
                let s: f64 = ys.iter().zip(&fw).map(|(&y, &f)| f * (2.0 * p * y).cos()).sum();
                *cell = 2.0 / PI * s;
            }
        });
    PhaseGrid::from_values(*spec, DistributionKind::Wigner, values)
}
