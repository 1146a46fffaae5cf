use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{CompositeRule, GaussLegendre};

use super::potential_value;

/// Amplitude below which a wavefunction is treated as vanished.
pub const DECAY_THRESHOLD: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// `+1` for even, `−1` for odd.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    /// Lowest power present in a polynomial of this parity.
    pub fn offset(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// A real amplitude of the form `ψ(x) = P(x) · exp(−a x⁴ − b x²)`.
///
/// Variational states use `a = ¼, b = 0`, algebraic states `a = ¼, b = ½`,
/// and the harmonic reference state `a = 0, b = ½`. `P` is stored densely in
/// powers of `x` and must respect the declared parity.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    poly: Vec<f64>,
    quartic: f64,
    quadratic: f64,
    parity: Parity,
    decay_scale: f64,
    normalized: bool,
}

impl Wavefunction {
    pub fn new(poly: Vec<f64>, quartic: f64, quadratic: f64, parity: Parity) -> Result<Self> {
        if quartic < 0.0 || quadratic < 0.0 || (quartic == 0.0 && quadratic == 0.0) {
            return Err(Error::InvalidArgument(
                "envelope exponents must be nonnegative and not both zero".into(),
            ));
        }
        if poly.iter().all(|&c| c == 0.0) {
            return Err(Error::InvalidArgument("polynomial prefactor is zero".into()));
        }
        let wrong = poly
            .iter()
            .enumerate()
            .any(|(i, &c)| (i % 2 != parity.offset()) && c != 0.0);
        if wrong {
            return Err(Error::InvalidArgument(
                "polynomial prefactor does not match the declared parity".into(),
            ));
        }
        let mut psi = Self {
            poly,
            quartic,
            quadratic,
            parity,
            decay_scale: 0.0,
            normalized: false,
        };
        psi.decay_scale = psi.find_decay_scale();
        Ok(psi)
    }

    /// `π^{−1/4} e^{−x²/2}`, the harmonic-oscillator ground state.
    pub fn gaussian() -> Self {
        let c = std::f64::consts::PI.powf(-0.25);
        let mut psi = Self::new(vec![c], 0.0, 0.5, Parity::Even).expect("valid gaussian");
        psi.normalized = true;
        psi
    }

    /// Rescales to unit L² norm.
    pub fn normalize(mut self) -> Result<Self> {
        let n2 = self.norm_squared();
        if n2 <= 0.0 || !n2.is_finite() {
            return Err(Error::DegenerateGrid);
        }
        let s = n2.sqrt().recip();
        self.poly.iter_mut().for_each(|c| *c *= s);
        self.normalized = true;
        Ok(self)
    }

    pub fn polynomial(&self) -> &[f64] {
        &self.poly
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Radius beyond which `|ψ(x)| < 10⁻¹⁶`.
    pub fn decay_scale(&self) -> f64 {
        self.decay_scale
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    fn envelope_exponent(&self, x: f64) -> f64 {
        let x2 = x * x;
        -(self.quartic * x2 * x2 + self.quadratic * x2)
    }

    fn poly_and_derivative(&self, x: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        for &c in self.poly.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    pub fn value(&self, x: f64) -> f64 {
        let (p, _) = self.poly_and_derivative(x);
        p * self.envelope_exponent(x).exp()
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let (p, dp) = self.poly_and_derivative(x);
        let dq = -(4.0 * self.quartic * x * x * x + 2.0 * self.quadratic * x);
        (dp + dq * p) * self.envelope_exponent(x).exp()
    }

    pub fn density(&self, x: f64) -> f64 {
        let v = self.value(x);
        v * v
    }

    fn find_decay_scale(&self) -> f64 {
        let mut x = 40.0;
        while x > 0.0 {
            if self.value(x).abs() >= DECAY_THRESHOLD || self.value(-x).abs() >= DECAY_THRESHOLD {
                return x + 0.01;
            }
            x -= 0.01;
        }
        0.01
    }

    /// Composite Gauss–Legendre rule covering `[−X, X]`, X the decay scale.
    pub fn support_rule(&self) -> CompositeRule {
        let x = self.decay_scale;
        CompositeRule::with_max_width(&GaussLegendre::new(20), -x, x, 0.25, 16)
    }

    pub fn norm_squared(&self) -> f64 {
        self.support_rule().integrate(|x| self.density(x))
    }

    /// `⟨ψ|x²|ψ⟩ / ⟨ψ|ψ⟩`.
    pub fn position_variance(&self) -> f64 {
        let rule = self.support_rule();
        rule.integrate(|x| x * x * self.density(x)) / rule.integrate(|x| self.density(x))
    }

    /// Rayleigh quotient `⟨ψ|H|ψ⟩ / ⟨ψ|ψ⟩` for the sextic Hamiltonian at `lambda`,
    /// with the kinetic term integrated by parts.
    pub fn rayleigh_quotient(&self, lambda: f64) -> f64 {
        let rule = self.support_rule();
        let num = rule.integrate(|x| {
            let d = self.derivative(x);
            0.5 * d * d + potential_value(x, lambda) * self.density(x)
        });
        num / rule.integrate(|x| self.density(x))
    }

    /// `⟨self|other⟩` by quadrature.
    pub fn overlap(&self, other: &Wavefunction) -> f64 {
        let x = self.decay_scale.max(other.decay_scale);
        CompositeRule::with_max_width(&GaussLegendre::new(20), -x, x, 0.25, 16)
            .integrate(|t| self.value(t) * other.value(t))
    }
}
