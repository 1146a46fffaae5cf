//! Rayleigh–Ritz solution in the basis `x^{2i+σ} e^{−x⁴/4}`, `i = 0..=k`.
//!
//! Every matrix element reduces to the moments `M_n = ∫ x^n e^{−x⁴/2} dx`,
//! so assembly is exact up to rounding. The linear coefficients follow from
//! the generalized symmetric eigenproblem `H c = E S c`.

mod momentum;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{build_qes_matrix, Parity, Wavefunction};

pub use momentum::{momentum_wavefunction, MomentumWavefunction};

/// Default degree index; the polynomial prefactor then has degree 12 in x.
pub const DEFAULT_DEGREE_INDEX: usize = 6;

/// Search interval for the critical couplings.
pub const CRITICAL_INTERVAL: (f64, f64) = (-0.5, 5.0);

const GAMMA_QUARTER: f64 = 3.625_609_908_221_908;
const GAMMA_THREE_QUARTERS: f64 = 1.225_416_702_465_177_6;

/// `∫ x^n e^{−x⁴/2} dx` over the real line.
///
/// Closed form `½ · 2^{(n+1)/4} Γ((n+1)/4)` for even `n`, evaluated through
/// `M_{n+4} = (n+1)/2 · M_n` from the two base cases.
pub fn quartic_moment(n: usize) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    let (mut m, mut k) = if n.is_multiple_of(4) {
        (0.5 * 2f64.powf(0.25) * GAMMA_QUARTER, 0)
    } else {
        (0.5 * 2f64.powf(0.75) * GAMMA_THREE_QUARTERS, 2)
    };
    while k < n {
        m *= (k as f64 + 1.0) / 2.0;
        k += 4;
    }
    m
}

/// Parity sector and size of the basis, with its moment table.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    parity: Parity,
    k: usize,
    moments: Vec<f64>,
}

impl BasisSet {
    pub fn new(parity: Parity, k: usize) -> Self {
        Self::with_moment_order(parity, k, 4 * k + 10)
    }

    /// Basis whose table holds moments up to `max_order` inclusive.
    pub fn with_moment_order(parity: Parity, k: usize, max_order: usize) -> Self {
        let moments = (0..=max_order).map(quartic_moment).collect();
        Self { parity, k, moments }
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.k + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Power of `x` carried by basis function `i`.
    pub fn power(&self, i: usize) -> usize {
        2 * i + self.parity.offset()
    }

    pub fn moment(&self, n: usize) -> Result<f64> {
        self.moments.get(n).copied().ok_or(Error::MomentTable {
            required: n,
            available: self.moments.len().saturating_sub(1),
        })
    }
}

/// Overlap and Hamiltonian matrices of the basis at coupling `lambda`.
pub fn build_matrices(basis: &BasisSet, lambda: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let dim = basis.len();
    let mut s = DMatrix::zeros(dim, dim);
    let mut h = DMatrix::zeros(dim, dim);
    let c2 = 2.0 * lambda + 1.0;
    for i in 0..dim {
        for j in i..dim {
            let (mi, mj) = (basis.power(i), basis.power(j));
            let a = mi + mj;
            let overlap = basis.moment(a)?;
            // φ' = (m x^{m−1} − x^{m+3}) e^{−x⁴/4}
            let cross = if mi * mj > 0 {
                (mi * mj) as f64 * basis.moment(a - 2)?
            } else {
                0.0
            };
            let kinetic =
                0.5 * (cross - (mi + mj) as f64 * basis.moment(a + 2)? + basis.moment(a + 6)?);
            let potential = 0.5
                * (basis.moment(a + 6)? + 2.0 * basis.moment(a + 4)?
                    - 2.0 * c2 * basis.moment(a + 2)?);
            s[(i, j)] = overlap;
            s[(j, i)] = overlap;
            h[(i, j)] = kinetic + potential;
            h[(j, i)] = kinetic + potential;
        }
    }
    Ok((s, h))
}

/// All eigenpairs of `H c = E S c`, ascending, with `cᵀ S c = 1`.
///
/// The overlap is equilibrated to unit diagonal before the Cholesky
/// factorization; a non-positive pivot is reported as a conditioning failure.
pub fn solve_generalized(
    overlap: &DMatrix<f64>,
    hamiltonian: &DMatrix<f64>,
) -> Result<Vec<(f64, DVector<f64>)>> {
    let dim = overlap.nrows();
    let d = DVector::from_iterator(dim, (0..dim).map(|i| overlap[(i, i)].sqrt().recip()));
    let scaled_s = DMatrix::from_fn(dim, dim, |i, j| overlap[(i, j)] * d[i] * d[j]);
    let scaled_h = DMatrix::from_fn(dim, dim, |i, j| hamiltonian[(i, j)] * d[i] * d[j]);
    let chol = scaled_s
        .cholesky()
        .ok_or(Error::Conditioning { size: dim })?;
    let l = chol.l();
    // A = L⁻¹ H L⁻ᵀ
    let y = l
        .solve_lower_triangular(&scaled_h)
        .ok_or(Error::Conditioning { size: dim })?;
    let a = l
        .solve_lower_triangular(&y.transpose())
        .ok_or(Error::Conditioning { size: dim })?;
    let a = (&a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(a);
    let lt = l.transpose();
    let mut pairs = Vec::with_capacity(dim);
    for (idx, &e) in eig.eigenvalues.iter().enumerate() {
        let z = eig.eigenvectors.column(idx).into_owned();
        let c = lt
            .solve_upper_triangular(&z)
            .ok_or(Error::Conditioning { size: dim })?;
        let mut c = c.component_mul(&d);
        let norm = (c.transpose() * overlap * &c)[(0, 0)].sqrt();
        c /= norm;
        if c[0] < 0.0 {
            c = -c;
        }
        pairs.push((e, c));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs)
}

/// A variationally optimized state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzState {
    pub coefficients: Vec<f64>,
    pub parity: Parity,
    pub lambda: f64,
    pub energy: f64,
    pub quantum_number: usize,
}

impl AnsatzState {
    /// Degree index `k`; the prefactor has `k + 1` terms.
    pub fn k(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Coefficients divided by the leading one, `1, a₁, a₂, …`.
    pub fn relative_coefficients(&self) -> Vec<f64> {
        let c0 = self.coefficients[0];
        self.coefficients.iter().map(|c| c / c0).collect()
    }

    pub fn wavefunction(&self) -> Wavefunction {
        let off = self.parity.offset();
        let mut poly = vec![0.0; 2 * self.k() + off + 1];
        for (i, &c) in self.coefficients.iter().enumerate() {
            poly[2 * i + off] = c;
        }
        let mut psi =
            Wavefunction::new(poly, 0.25, 0.0, self.parity).expect("ansatz polynomial is valid");
        // cᵀSc = 1 already; renormalizing by quadrature keeps the flag honest.
        psi = psi.normalize().expect("nonzero state");
        psi
    }

    /// `⟨self|other⟩` from the moment table; exactly zero across parities.
    pub fn overlap(&self, other: &AnsatzState) -> f64 {
        if self.parity != other.parity {
            return 0.0;
        }
        let off = self.parity.offset();
        let mut acc = 0.0;
        for (i, a) in self.coefficients.iter().enumerate() {
            for (j, b) in other.coefficients.iter().enumerate() {
                acc += a * b * quartic_moment(2 * (i + j) + 2 * off);
            }
        }
        acc
    }
}

pub fn parity_of(n: usize) -> Result<Parity> {
    match n {
        0 => Ok(Parity::Even),
        1 => Ok(Parity::Odd),
        _ => Err(Error::InvalidArgument(format!(
            "only states n = 0 and n = 1 are supported, got {n}"
        ))),
    }
}

/// Every eigenpair of the sector at `lambda`, lowest first.
pub fn solve_sector(parity: Parity, lambda: f64, k: usize) -> Result<Vec<AnsatzState>> {
    if k < 1 {
        return Err(Error::InvalidArgument(format!(
            "degree index must be at least 1, got {k}"
        )));
    }
    let basis = BasisSet::new(parity, k);
    let (s, h) = build_matrices(&basis, lambda)?;
    let n = parity.offset();
    Ok(solve_generalized(&s, &h)?
        .into_iter()
        .enumerate()
        .map(|(level, (energy, c))| AnsatzState {
            coefficients: c.iter().copied().collect(),
            parity,
            lambda,
            energy,
            quantum_number: n + 2 * level,
        })
        .collect())
}

/// Lowest state of the parity sector belonging to `n` (0 even, 1 odd).
pub fn solve_state(n: usize, lambda: f64, k: usize) -> Result<AnsatzState> {
    let parity = parity_of(n)?;
    Ok(solve_sector(parity, lambda, k)?.swap_remove(0))
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderRow {
    /// Polynomial degree `2k` of the prefactor.
    pub degree: usize,
    pub energy: f64,
    pub relative_error: f64,
}

/// Where the reference energy of a ladder came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    Algebraic,
    SelfConvergence,
}

/// Largest integer coupling for which the algebraic sector is used as reference.
const MAX_ALGEBRAIC_REFERENCE: usize = 12;

/// Reference energy: algebraic when `n = 0` at a small nonnegative integer
/// coupling, otherwise the solution at degree index `k_max + 4`.
pub fn reference_energy(lambda: f64, n: usize, k_max: usize) -> Result<(f64, Reference)> {
    let integer = lambda >= 0.0 && lambda.fract() == 0.0 && lambda <= MAX_ALGEBRAIC_REFERENCE as f64;
    if n == 0 && integer {
        let e = build_qes_matrix(lambda as i64)?.spectrum()?[0];
        Ok((e, Reference::Algebraic))
    } else {
        Ok((solve_state(n, lambda, k_max + 4)?.energy, Reference::SelfConvergence))
    }
}

/// Relative energy error at each degree index `1..=k_max`.
pub fn convergence_ladder(lambda: f64, n: usize, k_max: usize) -> Result<(Vec<LadderRow>, Reference)> {
    parity_of(n)?;
    let (reference, source) = reference_energy(lambda, n, k_max)?;
    let rows = (1..=k_max)
        .map(|k| {
            let e = solve_state(n, lambda, k)?.energy;
            Ok(LadderRow {
                degree: 2 * k,
                energy: e,
                relative_error: ((e - reference) / reference).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((rows, source))
}

/// Coupling at which `E_n(λ) = V(0) = 0`, by bisection to width `tolerance`.
pub fn critical_coupling_with(n: usize, k: usize, tolerance: f64) -> Result<f64> {
    let energy = |lambda: f64| solve_state(n, lambda, k).map(|s| s.energy);
    let (mut lo, mut hi) = CRITICAL_INTERVAL;
    let (mut f_lo, f_hi) = (energy(lo)?, energy(hi)?);
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        let f_mid = energy(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Critical coupling at degree 12 and tolerance `10⁻⁴`.
pub fn critical_coupling(n: usize) -> Result<f64> {
    critical_coupling_with(n, DEFAULT_DEGREE_INDEX, 1e-4)
}
