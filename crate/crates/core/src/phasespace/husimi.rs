use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::Wavefunction;
use crate::quadrature::{CompositeRule, GaussLegendre};

use super::{DistributionKind, GridSpec, PhaseGrid};

/// Domain margin required around a smoothing output: three standard
/// deviations of the `e^{−(x−x′)²}` kernel.
pub const SMOOTHING_MARGIN: f64 = 3.0 * std::f64::consts::FRAC_1_SQRT_2;

/// Beyond this distance the coherent-state envelope `e^{−u²/2}` is below 10⁻¹⁷.
const ENVELOPE_RADIUS: f64 = 9.0;

/// Phase carried by the coherent-state kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HusimiPhase {
    /// `e^{−ipx′}`.
    #[default]
    Plain,
    /// `e^{−ip(x′−x)}`; differs from `Plain` by a unit-modulus factor.
    Centered,
}

/// Husimi distribution `|⟨x,p|ψ⟩|² / (2π)` with the coherent-state kernel
/// `π^{−1/4} e^{−(x′−x)²/2} e^{−ipx′}`.
pub fn husimi_grid(psi: &Wavefunction, spec: &GridSpec) -> Result<PhaseGrid> {
    husimi_grid_with_phase(psi, spec, HusimiPhase::Plain)
}

pub fn husimi_grid_with_phase(psi: &Wavefunction, spec: &GridSpec, phase: HusimiPhase) -> Result<PhaseGrid> {
    spec.validate()?;
    if !psi.is_normalized() {
        return Err(Error::InvalidArgument("state must be normalized".into()));
    }
    let rule = GaussLegendre::new(20);
    let p_nodes = spec.p.nodes();
    let width = (PI / spec.p.extent()).min(0.25);
    let support = psi.decay_scale();
    let norm = (2.0 * PI).recip() * PI.powf(-0.5);
    let mut values = vec![0.0; spec.len()];
    values
        .par_chunks_mut(spec.p.count)
        .enumerate()
        .for_each(|(i, row)| {
            let x = spec.x.node(i);
            let (a, b) = ((x - ENVELOPE_RADIUS).max(-support), (x + ENVELOPE_RADIUS).min(support));
            if a >= b {
                return;
            }
            let comp = CompositeRule::with_max_width(&rule, a, b, width, 1);
            let shift = match phase {
                HusimiPhase::Plain => 0.0,
                HusimiPhase::Centered => x,
            };
            let terms: Vec<(f64, f64)> = comp
                .nodes
                .iter()
                .zip(&comp.weights)
                .map(|(&t, &w)| {
                    let u = t - x;
                    (t - shift, w * psi.value(t) * (-0.5 * u * u).exp())
                })
                .collect();
            for (cell, &p) in row.iter_mut().zip(&p_nodes) {
                let (mut c, mut s) = (0.0, 0.0);
                for &(t, g) in &terms {
                    let (sin, cos) = (p * t).sin_cos();
                    c += g * cos;
                    s += g * sin;
                }
                *cell = norm * (c * c + s * s);
            }
        });
    PhaseGrid::from_values(*spec, DistributionKind::Husimi, values)
}

/// Husimi distribution as the Gaussian smoothing
/// `(1/π) ∬ W(x′,p′) e^{−(x−x′)²−(p−p′)²} dx′ dp′` of a Wigner grid,
/// evaluated on the nodes of `out` by separable trapezoid sums.
///
/// `out` must sit at least [`SMOOTHING_MARGIN`] inside the Wigner domain.
pub fn husimi_by_smoothing(w: &PhaseGrid, out: &GridSpec) -> Result<PhaseGrid> {
    w.require(DistributionKind::Wigner)?;
    out.validate()?;
    let inner = w.spec.shrink(SMOOTHING_MARGIN).map_err(|_| Error::InsufficientMargin {
        required: SMOOTHING_MARGIN,
    })?;
    if !inner.x.contains(&out.x) || !inner.p.contains(&out.p) {
        return Err(Error::InsufficientMargin {
            required: SMOOTHING_MARGIN,
        });
    }
    let kernel = |axis_out: &super::Axis, axis_in: &super::Axis| -> Vec<Vec<f64>> {
        let nodes = axis_in.nodes();
        let weights = axis_in.weights();
        (0..axis_out.count)
            .map(|k| {
                let c = axis_out.node(k);
                nodes
                    .iter()
                    .zip(&weights)
                    .map(|(&t, &wt)| wt * (-(c - t) * (c - t)).exp())
                    .collect()
            })
            .collect()
    };
    let kp = kernel(&out.p, &w.spec.p);
    let kx = kernel(&out.x, &w.spec.x);
    // T[i][l] = Σ_j K_p[l][j] W[i][j]
    let partial: Vec<Vec<f64>> = (0..w.spec.x.count)
        .into_par_iter()
        .map(|i| {
            let row = w.row(i);
            kp.iter()
                .map(|k| k.iter().zip(row).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect();
    let mut values = vec![0.0; out.len()];
    values
        .par_chunks_mut(out.p.count)
        .enumerate()
        .for_each(|(m, row)| {
            for (l, cell) in row.iter_mut().enumerate() {
                let s: f64 = kx[m].iter().zip(&partial).map(|(a, t)| a * t[l]).sum();
                *cell = s / PI;
            }
        });
    PhaseGrid::from_values(*out, DistributionKind::Husimi, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasespace::wigner_grid;
    use crate::variational::solve_state;

    #[test]
    fn gaussian_closed_form() {
        let spec = GridSpec::symmetric(81, 5.0, 81, 5.0).unwrap();
        let h = husimi_grid(&Wavefunction::gaussian(), &spec).unwrap();
        for (i, x) in spec.x.nodes().into_iter().enumerate() {
            for (j, p) in spec.p.nodes().into_iter().enumerate() {
                let want = (-(x * x + p * p) / 2.0).exp() / (2.0 * PI);
                assert!((h.get(i, j) - want).abs() < 1e-13);
            }
        }
        assert!((h.nearest(0.0, 0.0) - 0.159155).abs() < 1e-6);
    }

    #[test]
    fn gaussian_routes_agree() {
        let g = Wavefunction::gaussian();
        let wide = GridSpec::symmetric(161, 8.0, 161, 8.0).unwrap();
        let out = GridSpec::symmetric(81, 5.0, 81, 5.0).unwrap();
        let smooth = husimi_by_smoothing(&wigner_grid(&g, &wide).unwrap(), &out).unwrap();
        let direct = husimi_grid(&g, &out).unwrap();
        assert!(smooth.sup_distance(&direct).unwrap() < 1e-6);
    }

    #[test]
    fn sextic_routes_agree_on_default_grid() {
        let spec = GridSpec::default();
        let out = spec.shrink(SMOOTHING_MARGIN).unwrap();
        for n in [0, 1] {
            let psi = solve_state(n, 4.0, 6).unwrap().wavefunction();
            let smooth = husimi_by_smoothing(&wigner_grid(&psi, &spec).unwrap(), &out).unwrap();
            let direct = husimi_grid(&psi, &out).unwrap();
            let d = smooth.sup_distance(&direct).unwrap();
            assert!(d < 1e-4, "n = {n}: {d:e}");
        }
    }

    #[test]
    fn margin_is_enforced() {
        let g = Wavefunction::gaussian();
        let spec = GridSpec::symmetric(81, 5.0, 81, 5.0).unwrap();
        let w = wigner_grid(&g, &spec).unwrap();
        assert!(matches!(
            husimi_by_smoothing(&w, &spec),
            Err(Error::InsufficientMargin { .. })
        ));
        let h = husimi_grid(&g, &spec).unwrap();
        assert!(matches!(
            husimi_by_smoothing(&h, &spec.shrink(3.0).unwrap()),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn phase_convention_does_not_matter() {
        let psi = solve_state(1, 4.0, 6).unwrap().wavefunction();
        let spec = GridSpec::symmetric(61, 4.0, 61, 8.0).unwrap();
        let a = husimi_grid_with_phase(&psi, &spec, HusimiPhase::Plain).unwrap();
        let b = husimi_grid_with_phase(&psi, &spec, HusimiPhase::Centered).unwrap();
        assert!(a.sup_distance(&b).unwrap() < 1e-12);
    }

    #[test]
    fn positivity_normalization_and_symmetry() {
        let spec = GridSpec::default();
        for n in [0, 1] {
            for lambda in [-0.75, 4.0] {
                let psi = solve_state(n, lambda, 6).unwrap().wavefunction();
                let h = husimi_grid(&psi, &spec).unwrap();
                assert!(h.min() >= 0.0);
                assert!((h.integral() - 1.0).abs() < 1e-6, "n={n} λ={lambda}");
                let (nx, np) = (spec.x.count, spec.p.count);
                for i in (0..nx).step_by(7) {
                    for j in (0..np).step_by(7) {
                        assert!((h.get(i, j) - h.get(nx - 1 - i, np - 1 - j)).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn smoothing_broadens_a_narrow_peak() {
        let spec = GridSpec::symmetric(161, 6.0, 161, 6.0).unwrap();
        let mut values = vec![0.0; spec.len()];
        values[80 * 161 + 80] = 1.0 / spec.cell_area();
        let w = PhaseGrid::from_values(spec, DistributionKind::Wigner, values).unwrap();
        let out = spec.shrink(SMOOTHING_MARGIN).unwrap();
        let h = husimi_by_smoothing(&w, &out).unwrap();
        // second moment along x of the output ≥ kernel variance ½
        let xs = out.x.nodes();
        let mut m0 = 0.0;
        let mut m2 = 0.0;
        for (i, x) in xs.iter().enumerate() {
            let r: f64 = h.row(i).iter().sum();
            m0 += r;
            m2 += r * x * x;
        }
        assert!(m2 / m0 >= 0.5 - 1e-6);
    }
}
