//! The sextic double-well potential, its exactly solvable even sector, and the
//! real wavefunction type shared by every downstream module.
//!
//! Units are fixed throughout: ħ = m = 1.

mod qes;
mod wavefunction;

pub use qes::{
    build_qes_matrix, gauge_operator, sl2_hamiltonian, Generator, Polynomial, QesSector,
};
pub use wavefunction::{Parity, Wavefunction, DECAY_THRESHOLD};

/// `V(x; λ) = ½ (x⁶ + 2x⁴ − 2(2λ+1) x²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SexticPotential {
    lambda: f64,
}

/// A stationary point of the potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub position: f64,
    pub energy: f64,
}

impl SexticPotential {
    pub fn new(lambda: f64) -> Self {
        Self { lambda }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn value(&self, x: f64) -> f64 {
        potential_value(x, self.lambda)
    }

    /// Coefficient of the quadratic term, `−(2λ+1)`.
    pub fn quadratic_coefficient(&self) -> f64 {
        -(2.0 * self.lambda + 1.0)
    }

    pub fn minima(&self) -> Vec<Extremum> {
        potential_minima(self.lambda)
    }
}

pub fn potential_value(x: f64, lambda: f64) -> f64 {
    let x2 = x * x;
    0.5 * x2 * (x2 * x2 + 2.0 * x2 - 2.0 * (2.0 * lambda + 1.0))
}

/// Global minima of the potential.
///
/// For `λ > −½` the origin is a local maximum and the two minima sit at
/// `±x*`, where `u = x*²` is the positive root of `3u² + 4u − 2(2λ+1) = 0`.
/// Otherwise the origin is the only stationary point.
pub fn potential_minima(lambda: f64) -> Vec<Extremum> {
    let c = 2.0 * (2.0 * lambda + 1.0);
    if c <= 0.0 {
        return vec![Extremum {
            position: 0.0,
            energy: 0.0,
        }];
    }
    // Stable form of (−4 + √(16 + 12c)) / 6 for small c.
    let u = 2.0 * c / (4.0 + (16.0 + 12.0 * c).sqrt());
    let x = u.sqrt();
    let energy = potential_value(x, lambda);
    vec![
        Extremum {
            position: -x,
            energy,
        },
        Extremum {
            position: x,
            energy,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn origin_is_zero_for_every_coupling() {
        for lambda in [-3.0, -0.5, 0.0, 0.7329, 4.0, 11.0] {
            assert_eq!(potential_value(0.0, lambda), 0.0);
        }
    }

    #[test]
    fn unit_position_at_zero_coupling() {
        assert!((potential_value(1.0, 0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_minimum_below_threshold() {
        assert_eq!(
            potential_minima(-1.0),
            vec![Extremum {
                position: 0.0,
                energy: 0.0
            }]
        );
        assert_eq!(potential_minima(-0.5).len(), 1);
    }

    fn scan_minimum(lambda: f64) -> (f64, f64) {
        // brute-force oracle on a 1e-6 grid over (0, 3]
        let mut best = (0.0, 0.0);
        let mut i = 1u64;
        while i <= 3_000_000 {
            let x = i as f64 * 1e-6;
            let v = potential_value(x, lambda);
            if v < best.1 {
                best = (x, v);
            }
            i += 1;
        }
        best
    }

    #[test]
    fn double_well_minima_match_scan() {
        let m = potential_minima(4.0);
        assert_eq!(m.len(), 2);
        let (xs, vs) = scan_minimum(4.0);
        assert!((m[1].position - xs).abs() < 2e-6);
        assert!((m[1].energy - vs).abs() < 1e-9);
        assert!((m[1].position - 1.36819).abs() < 1e-5);
        assert!((m[1].energy + 10.0635).abs() < 1e-4);
        assert_eq!(m[0].position, -m[1].position);
    }

    #[test]
    fn zero_coupling_minimum_is_closed_form() {
        let m = potential_minima(0.0);
        let u = (10f64.sqrt() - 2.0) / 3.0;
        assert!((m[1].position * m[1].position - u).abs() < 1e-15);
        assert!((m[1].position - 0.622435).abs() < 1e-6);
        let (xs, _) = scan_minimum(0.0);
        assert!((m[1].position - xs).abs() < 2e-6);
    }

    proptest! {
        #[test]
        fn potential_is_even(x in -5.0..5.0f64, lambda in -3.0..8.0f64) {
            prop_assert_eq!(potential_value(x, lambda), potential_value(-x, lambda));
        }

        #[test]
        fn critical_coupling_potential_is_nonnegative(x in -5.0..5.0f64) {
            prop_assert!(potential_value(x, -0.5) >= 0.0);
        }

        #[test]
        fn minima_are_stationary(lambda in -0.49..10.0f64) {
            let m = potential_minima(lambda);
            let x = m[1].position;
            let slope = x * (3.0 * x.powi(4) + 4.0 * x * x - 2.0 * (2.0 * lambda + 1.0));
            prop_assert!(slope.abs() < 1e-10 * (1.0 + lambda.abs()));
            prop_assert!(m[1].energy <= 0.0);
        }
    }
}
