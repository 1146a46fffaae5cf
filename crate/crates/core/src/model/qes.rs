//! Exactly solvable even sector at integer coupling `λ = N`.
//!
//! Writing `ψ = Φ(z) e^{−g(x)}` with `g = x⁴/4 + x²/2` and `z = x²`, the
//! rescaled operator `2H` becomes
//!
//! ```text
//! h = −4z ∂² + (4z² + 4z − 2) ∂ + (1 − 4λz)
//!   = 4J₊ − 4J₀J₋ − (2N+2)J₋ + 4J₀ + (2N+1)      (λ = N)
//! ```
//!
//! with `J₋ = ∂`, `J₀ = z∂ − N/2`, `J₊ = z²∂ − Nz`. The generators preserve
//! polynomials of degree ≤ N, so `h` reduces to an `(N+1)×(N+1)` matrix whose
//! eigenvalues are `2E`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

use super::wavefunction::{Parity, Wavefunction};

/// Imaginary parts above this reject an algebraic eigenvalue.
const IMAGINARY_TOLERANCE: f64 = 1e-10;

/// Dense polynomial in one variable, coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial(pub Vec<f64>);

impl Polynomial {
    pub fn monomial(power: usize) -> Self {
        let mut c = vec![0.0; power + 1];
        c[power] = 1.0;
        Self(c)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn coeff(&self, power: usize) -> f64 {
        self.0.get(power).copied().unwrap_or(0.0)
    }

    /// Highest power with a nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|&c| c != 0.0)
    }

    pub fn derivative(&self) -> Self {
        Self(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// Multiplies by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        let mut c = vec![0.0; k];
        c.extend_from_slice(&self.0);
        Self(c)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        Self((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// The three generators of the `sl(2)` realization on polynomials of degree ≤ N.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// `J₋ = d/dz`
    Lower,
    /// `J₀ = z d/dz − N/2`
    Cartan,
    /// `J₊ = z² d/dz − N z`
    Raise,
}

impl Generator {
    pub fn apply(self, n: usize, f: &Polynomial) -> Polynomial {
        let nf = n as f64;
        let d = f.derivative();
        match self {
            Generator::Lower => d,
            Generator::Cartan => d.shift(1).sub(&f.scale(0.5 * nf)),
            Generator::Raise => d.shift(2).sub(&f.shift(1).scale(nf)),
        }
    }
}

/// `h = 4J₊ − 4J₀J₋ − (2N+2)J₋ + 4J₀ + (2N+1)` applied to `f`.
pub fn sl2_hamiltonian(n: usize, f: &Polynomial) -> Polynomial {
    use Generator::*;
    let nf = n as f64;
    let jp = Raise.apply(n, f);
    let jm = Lower.apply(n, f);
    let j0jm = Cartan.apply(n, &jm);
    let j0 = Cartan.apply(n, f);
    jp.scale(4.0)
        .sub(&j0jm.scale(4.0))
        .sub(&jm.scale(2.0 * nf + 2.0))
        .add(&j0.scale(4.0))
        .add(&f.scale(2.0 * nf + 1.0))
}

/// The gauge-rotated operator in `z = x²` at an arbitrary coupling:
/// `h = −4z ∂² + (4z² + 4z − 2) ∂ + (1 − 4λz)`.
pub fn gauge_operator(lambda: f64, f: &Polynomial) -> Polynomial {
    let d1 = f.derivative();
    let d2 = d1.derivative();
    d2.shift(1)
        .scale(-4.0)
        .add(&d1.shift(2).scale(4.0))
        .add(&d1.shift(1).scale(4.0))
        .add(&d1.scale(-2.0))
        .add(f)
        .add(&f.shift(1).scale(-4.0 * lambda))
}

/// Matrix of the gauge-rotated operator on `{1, z, …, z^N}` at `λ = N`.
#[derive(Debug, Clone, PartialEq)]
pub struct QesSector {
    n: usize,
    matrix: DMatrix<f64>,
}

pub fn build_qes_matrix(n: i64) -> Result<QesSector> {
    if n < 0 {
        return Err(Error::InvalidArgument(format!(
            "algebraic sector needs N >= 0, got {n}"
        )));
    }
    let n = n as usize;
    let mut matrix = DMatrix::zeros(n + 1, n + 1);
    for j in 0..=n {
        let image = sl2_hamiltonian(n, &Polynomial::monomial(j));
        debug_assert!(image.degree().is_none_or(|d| d <= n));
        for i in 0..=n {
            matrix[(i, j)] = image.coeff(i);
        }
    }
    Ok(QesSector { n, matrix })
}

impl QesSector {
    pub fn n(&self) -> usize {
        self.n
    }

    /// The coupling at which the sector is exact.
    pub fn lambda(&self) -> f64 {
        self.n as f64
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Function `g(x) = x⁴/4 + x²/2` of the gauge factor `e^{−g}`.
    pub fn gauge_exponent(x: f64) -> f64 {
        let x2 = x * x;
        0.25 * x2 * x2 + 0.5 * x2
    }

    /// Eigenvalues of the matrix (a general real eigensolve), halved and sorted.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let eig = self.matrix.complex_eigenvalues();
        let mut out = Vec::with_capacity(eig.len());
        for z in eig.iter() {
            if z.im.abs() > IMAGINARY_TOLERANCE {
                return Err(Error::ComplexEigenvalue { re: z.re, im: z.im });
            }
            out.push(0.5 * z.re);
        }
        out.sort_by(f64::total_cmp);
        Ok(out)
    }

    /// Coefficients of `Φ` in powers of `z` for the `index`-th eigenvalue.
    ///
    /// The null vector of `M − 2E` is taken from its smallest singular
    /// direction and scaled to unit constant term (or unit max-norm when the
    /// constant term vanishes).
    pub fn eigen_polynomial(&self, index: usize) -> Result<Polynomial> {
        let spectrum = self.spectrum()?;
        let energy = *spectrum.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: spectrum.len(),
        })?;
        let dim = self.n + 1;
        let shifted = &self.matrix - DMatrix::identity(dim, dim) * (2.0 * energy);
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.expect("requested right singular vectors");
        let (k, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");
        let mut v: Vec<f64> = v_t.row(k).iter().copied().collect();
        let scale = if v[0].abs() > 1e-12 * v.iter().fold(0.0f64, |m, c| m.max(c.abs())) {
            v[0]
        } else {
            *v.iter().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap()
        };
        v.iter_mut().for_each(|c| *c /= scale);
        Ok(Polynomial(v))
    }

    /// `ψ(x) = Φ(x²) e^{−x⁴/4 − x²/2}`, L²-normalized.
    pub fn wavefunction(&self, index: usize) -> Result<Wavefunction> {
        let phi = self.eigen_polynomial(index)?;
        let mut poly = vec![0.0; 2 * self.n + 1];
        for (k, &c) in phi.coeffs().iter().enumerate() {
            poly[2 * k] = c;
        }
        Wavefunction::new(poly, 0.25, 0.5, Parity::Even)?.normalize()
    }
}
