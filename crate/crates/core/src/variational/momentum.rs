use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Parity, Wavefunction};
use crate::quadrature::{CompositeRule, GaussLegendre};

/// Momentum-space amplitude `φ(p) = (2π)^{−1/2} ∫ ψ(x) e^{−ipx} dx`.
///
/// By parity this reduces to a half-line cosine transform (even states) or
/// `−i` times a sine transform (odd states). The quadrature is fixed at
/// construction for momenta up to `p_max`, with at least ten nodes per
/// oscillation period.
#[derive(Debug, Clone)]
pub struct MomentumWavefunction {
    parity: Parity,
    p_max: f64,
    nodes: Vec<f64>,
    // quadrature weight × √(2/π) × ψ(node)
    weighted: Vec<f64>,
}

pub fn momentum_wavefunction(psi: &Wavefunction, p_max: f64) -> Result<MomentumWavefunction> {
    MomentumWavefunction::new(psi, p_max)
}

impl MomentumWavefunction {
    pub fn new(psi: &Wavefunction, p_max: f64) -> Result<Self> {
        if p_max <= 0.0 || !p_max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "momentum bound must be positive and finite, got {p_max}"
            )));
        }
        let rule = GaussLegendre::new(20);
        // 20 nodes per panel spanning at most two periods of cos(p_max x).
        let width = (4.0 * PI / p_max).min(0.25);
        let x = psi.decay_scale();
        let comp = CompositeRule::with_max_width(&rule, 0.0, x, width, 8);
        let scale = (2.0 / PI).sqrt();
        let weighted = comp
            .nodes
            .iter()
            .zip(&comp.weights)
            .map(|(&t, &w)| scale * w * psi.value(t))
            .collect();
        Ok(Self {
            parity: psi.parity(),
            p_max,
            nodes: comp.nodes,
            weighted,
        })
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    /// The real transform: `φ(p)` for even states, `i φ(p)` for odd ones.
    pub fn real_amplitude(&self, p: f64) -> Result<f64> {
        if p.abs() > self.p_max * (1.0 + 1e-12) {
            return Err(Error::Bandwidth {
                requested: p.abs(),
                resolved: self.p_max,
            });
        }
        let kernel: fn(f64) -> f64 = match self.parity {
            Parity::Even => f64::cos,
            Parity::Odd => f64::sin,
        };
        Ok(self
            .nodes
            .iter()
            .zip(&self.weighted)
            .map(|(&x, &w)| w * kernel(p * x))
            .sum())
    }

    pub fn value(&self, p: f64) -> Result<Complex64> {
        let a = self.real_amplitude(p)?;
        Ok(match self.parity {
            Parity::Even => Complex64::new(a, 0.0),
            Parity::Odd => Complex64::new(0.0, -a),
        })
    }

    pub fn density(&self, p: f64) -> Result<f64> {
        let a = self.real_amplitude(p)?;
        Ok(a * a)
    }
}
