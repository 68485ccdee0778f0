//! Single-mode states and operators on a truncated Fock basis.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::special::{binomial, laguerre, ln_factorial};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Largest allowed deviation of `‖ψ‖²` from one after normalisation.
pub const NORM_TOL: f64 = 1e-10;
/// Largest elementwise deviation from Hermiticity accepted for a state.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Largest deviation of the trace from one accepted for a state.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted for a physical state.
pub const POSITIVITY_TOL: f64 = 1e-10;
/// Tail weight above which a truncated state carries a warning.
pub const TRUNCATION_WARN: f64 = 1e-6;

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Normalised amplitudes `ψ_n`, n = 0..cutoff-1.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<C64>,
    tail_weight: f64,
}

impl PureState {
    /// Builds a state from raw amplitudes, normalising them.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        Self::with_tail(amplitudes, 0.0)
    }

    fn with_tail(amplitudes: Vec<C64>, tail_weight: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptySpace);
        }
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter("amplitudes have zero or non-finite norm".into()));
        }
        Ok(Self { amplitudes: v / c(norm), tail_weight })
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, n: usize) -> C64 {
        self.amplitudes.get(n).copied().unwrap_or_default()
    }

    /// Probability weight of the untruncated state that lies at or beyond the cutoff.
    pub fn tail_weight(&self) -> f64 {
        self.tail_weight
    }

    pub fn truncation_warning(&self) -> bool {
        self.tail_weight > TRUNCATION_WARN
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.amplitudes.iter().enumerate().map(|(n, a)| n as f64 * a.norm_sqr()).sum()
    }

    pub fn to_density(&self) -> DensityOperator {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityOperator::from_trusted(m)
    }

    /// Same state embedded in a larger truncated space.
    pub fn padded(&self, cutoff: usize) -> Self {
        let mut v = self.amplitudes.iter().copied().collect::<Vec<_>>();
        v.resize(cutoff.max(self.cutoff()), C64::default());
        Self { amplitudes: DVector::from_vec(v), tail_weight: self.tail_weight }
    }
}

/// Number state `|n⟩`.
pub fn make_fock(n: usize, cutoff: usize) -> Result<PureState> {
    if cutoff == 0 {
        return Err(Error::EmptySpace);
    }
    if n >= cutoff {
        return Err(Error::OutOfRange { n, cutoff });
    }
    let mut amps = vec![C64::default(); cutoff];
    amps[n] = c(1.0);
    PureState::new(amps)
}

/// Truncated coherent state `|α⟩`. The Poisson weight lost to truncation is
/// reported through [`PureState::tail_weight`].
pub fn make_coherent(alpha: C64, cutoff: usize) -> Result<PureState> {
    if cutoff == 0 {
        return Err(Error::EmptySpace);
    }
    let u = alpha.norm_sqr();
    let amps = (0..cutoff)
        .map(|n| {
            let mag = (-0.5 * u - 0.5 * ln_factorial(n)).exp();
            alpha.powu(n as u32) * mag
        })
        .collect();
    PureState::with_tail(amps, poisson_tail(u, cutoff))
}

/// `Σ_{n ≥ cutoff} e^{-u} u^n / n!`, summed directly to avoid cancellation.
fn poisson_tail(u: f64, cutoff: usize) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    let mut n = cutoff;
    loop {
        let term = (-u + n as f64 * u.ln() - ln_factorial(n)).exp();
        total += term;
        if (n as f64 > u && term < 1e-30 * total.max(1e-300)) || n > cutoff + 100_000 {
            break;
        }
        n += 1;
    }
    total.min(1.0)
}

/// Truncated squeezed vacuum with real squeezing parameter `r`.
pub fn make_squeezed_vacuum(r: f64, cutoff: usize) -> Result<PureState> {
    if cutoff == 0 {
        return Err(Error::EmptySpace);
    }
    if !r.is_finite() {
        return Err(Error::InvalidParameter(format!("squeezing {r} is not finite")));
    }
    let th = r.tanh();
    // |ψ_{2m}|² = sech r · tanh^{2m} r · (2m)! / (4^m m!²)
    let ln_weight = |m: usize| -> f64 {
        if m > 0 && th == 0.0 {
            return f64::NEG_INFINITY;
        }
        let lt = if m == 0 { 0.0 } else { 2.0 * m as f64 * th.abs().ln() };
        lt + ln_factorial(2 * m) - 2.0 * ln_factorial(m) - 2.0 * m as f64 * 2f64.ln() - r.cosh().ln()
    };
    let mut amps = vec![C64::default(); cutoff];
    for m in 0..cutoff.div_ceil(2) {
        // (-tanh r)^m
        let sign = if m % 2 == 1 && th > 0.0 { -1.0 } else { 1.0 };
        amps[2 * m] = c(sign * (0.5 * ln_weight(m)).exp());
    }
    let mut tail = 0.0;
    let mut m = cutoff.div_ceil(2);
    loop {
        let w = ln_weight(m).exp();
        tail += w;
        if w < 1e-30 || m > cutoff + 200_000 {
            break;
        }
        m += 1;
    }
    PureState::with_tail(amps, tail.min(1.0))
}

/// Haar-like random pure state from complex Gaussian amplitudes. Deterministic in `seed`.
pub fn random_pure(seed: u64, cutoff: usize) -> Result<PureState> {
    if cutoff == 0 {
        return Err(Error::EmptySpace);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PureState::new(gaussian_amplitudes(&mut rng, cutoff))
}

fn gaussian_amplitudes(rng: &mut impl Rng, cutoff: usize) -> Vec<C64> {
    (0..cutoff)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Convex mixture of `rank` random pure states with random weights.
pub fn random_mixed(seed: u64, cutoff: usize, rank: usize) -> Result<DensityOperator> {
    if cutoff == 0 {
        return Err(Error::EmptySpace);
    }
    if rank == 0 || rank > cutoff {
        return Err(Error::InvalidParameter(format!("rank {rank} must lie in 1..={cutoff}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights: Vec<f64> = (0..rank).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let mut m = CMatrix::zeros(cutoff, cutoff);
    for w in weights {
        let psi = PureState::new(gaussian_amplitudes(&mut rng, cutoff))?;
        m += (psi.amplitudes() * psi.amplitudes().adjoint()) * c(w);
    }
    Ok(DensityOperator::from_trusted(m))
}

/// Hermitian, unit-trace operator on a truncated Fock basis.
///
/// Operators built with [`DensityOperator::from_matrix_nonpositive`] skip the
/// positivity check; they exist for the counterexample operators that are
/// deliberately not states.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
    nonpositive_allowed: bool,
}

impl DensityOperator {
    /// Validated constructor: Hermitian, unit trace, positive semidefinite.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let rho = Self::from_matrix_nonpositive(matrix)?;
        let min = rho.min_eigenvalue();
        if min < -POSITIVITY_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { nonpositive_allowed: false, ..rho })
    }

    /// Hermitian and unit-trace checks only.
    pub fn from_matrix_nonpositive(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() == 0 {
            return Err(Error::EmptySpace);
        }
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), got: matrix.ncols() });
        }
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::BadTrace(tr.re));
        }
        Ok(Self { matrix: hermitize(matrix), nonpositive_allowed: true })
    }

    /// Internal constructor for operators produced by trusted maps.
    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        Self { matrix: hermitize(matrix), nonpositive_allowed: false }
    }

    pub(crate) fn with_flag_of(matrix: CMatrix, source: &DensityOperator) -> Self {
        Self { matrix: hermitize(matrix), nonpositive_allowed: source.nonpositive_allowed }
    }

    /// Diagonal state with the given photon-number populations.
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        let m = CMatrix::from_diagonal(&DVector::from_iterator(populations.len(), populations.iter().map(|&p| c(p))));
        Self::from_matrix(m)
    }

    /// Thermal state with mean photon number `mean`, truncated and renormalised.
    pub fn thermal(mean: f64, cutoff: usize) -> Result<Self> {
        if mean < 0.0 || !mean.is_finite() {
            return Err(Error::InvalidParameter(format!("thermal mean {mean} must be nonnegative")));
        }
        let ratio = mean / (1.0 + mean);
        let pops: Vec<f64> = (0..cutoff).map(|n| ratio.powi(n as i32) / (1.0 + mean)).collect();
        let total: f64 = pops.iter().sum();
        Self::diagonal(&pops.iter().map(|p| p / total).collect::<Vec<_>>())
    }

    /// Mixture `Σ w_i |α_i⟩⟨α_i|` of truncated coherent states, renormalised.
    pub fn coherent_mixture(components: &[(f64, C64)], cutoff: usize) -> Result<Self> {
        let mut m = CMatrix::zeros(cutoff, cutoff);
        for &(w, alpha) in components {
            if w < 0.0 {
                return Err(Error::InvalidParameter("mixture weights must be nonnegative".into()));
            }
            let psi = make_coherent(alpha, cutoff)?;
            m += psi.to_density().matrix * c(w);
        }
        let tr = m.trace().re;
        if tr <= 0.0 {
            return Err(Error::InvalidParameter("empty mixture".into()));
        }
        Ok(Self::from_trusted(m / c(tr)))
    }

    pub fn cutoff(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// True for operators admitted without the positivity check.
    pub fn nonpositive_allowed(&self) -> bool {
        self.nonpositive_allowed
    }

    pub fn get(&self, m: usize, n: usize) -> C64 {
        if m < self.cutoff() && n < self.cutoff() {
            self.matrix[(m, n)]
        } else {
            C64::default()
        }
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr[ρ A]`.
    pub fn expectation(&self, op: &CMatrix) -> C64 {
        let n = self.cutoff().min(op.nrows());
        let mut acc = C64::default();
        for i in 0..n {
            for j in 0..n {
                acc += self.matrix[(i, j)] * op[(j, i)];
            }
        }
        acc
    }

    pub fn mean_photon_number(&self) -> f64 {
        (0..self.cutoff()).map(|n| n as f64 * self.matrix[(n, n)].re).sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.cutoff()).map(|n| self.matrix[(n, n)].re).collect()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Embeds the operator in a larger truncated space (zero padding).
    pub fn padded(&self, cutoff: usize) -> Self {
        let c0 = self.cutoff();
        let cutoff = cutoff.max(c0);
        let mut m = CMatrix::zeros(cutoff, cutoff);
        m.view_mut((0, 0), (c0, c0)).copy_from(&self.matrix);
        Self { matrix: m, nonpositive_allowed: self.nonpositive_allowed }
    }

    /// Smallest cutoff that holds all of the operator's support (entries above `tol`).
    pub fn support_cutoff(&self, tol: f64) -> usize {
        let c0 = self.cutoff();
        for n in (0..c0).rev() {
            let row_max = (0..c0).map(|k| self.matrix[(n, k)].norm()).fold(0.0, f64::max);
            if row_max > tol {
                return n + 1;
            }
        }
        1
    }

    /// Phase rotation `e^{iθN} ρ e^{-iθN}`.
    pub fn rotated(&self, theta: f64) -> Self {
        let cutoff = self.cutoff();
        let m = CMatrix::from_fn(cutoff, cutoff, |i, j| self.matrix[(i, j)] * C64::from_polar(1.0, theta * (i as f64 - j as f64)));
        Self::with_flag_of(m, self)
    }
}

impl From<&PureState> for DensityOperator {
    fn from(psi: &PureState) -> Self {
        psi.to_density()
    }
}

pub(crate) fn hermitian_deviation(m: &CMatrix) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub(crate) fn hermitize(m: CMatrix) -> CMatrix {
    (&m + m.adjoint()) * c(0.5)
}

/// Ladder, number and quadrature operators at a fixed cutoff.
///
/// Truncation leaves `[a, a†] = 1` only on `n ≤ cutoff-2`; the last diagonal
/// entry of the commutator is `1 - cutoff`.
#[derive(Debug, Clone)]
pub struct ModeOperators {
    pub a: CMatrix,
    pub adag: CMatrix,
    pub number: CMatrix,
    pub x: CMatrix,
    pub p: CMatrix,
}

impl ModeOperators {
    pub fn new(cutoff: usize) -> Self {
        let a = annihilation(cutoff);
        let adag = a.adjoint();
        let number = CMatrix::from_diagonal(&DVector::from_iterator(cutoff, (0..cutoff).map(|n| c(n as f64))));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let x = (&adag + &a) * c(s);
        let p = (&adag - &a) * C64::new(0.0, s);
        Self { a, adag, number, x, p }
    }

    pub fn cutoff(&self) -> usize {
        self.a.nrows()
    }
}

/// Truncated annihilation operator, `⟨n-1|a|n⟩ = √n`.
pub fn annihilation(cutoff: usize) -> CMatrix {
    let mut a = CMatrix::zeros(cutoff, cutoff);
    for n in 1..cutoff {
        a[(n - 1, n)] = c((n as f64).sqrt());
    }
    a
}

/// Diagonal operator `x^{N}` (with `0^0 = 1`).
pub fn number_power(base: f64, cutoff: usize) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_iterator(cutoff, (0..cutoff).map(|n| c(base.powi(n as i32)))))
}

/// Exact matrix elements `⟨m|D(α)|n⟩`, m,n < cutoff, of the untruncated
/// displacement operator, via the associated-Laguerre closed form.
pub fn displacement_matrix(alpha: C64, cutoff: usize) -> CMatrix {
    let u = alpha.norm_sqr();
    let gauss = (-0.5 * u).exp();
    let mut d = CMatrix::zeros(cutoff, cutoff);
    for diff in 0..cutoff {
        let lag = laguerre(cutoff - 1 - diff, diff, u);
        let up = alpha.powu(diff as u32);
        let down = (-alpha.conj()).powu(diff as u32);
        for (n, l) in lag.iter().enumerate() {
            let m = n + diff;
            let ratio = (0.5 * (ln_factorial(n) - ln_factorial(m))).exp() * gauss * l;
            d[(m, n)] = up * ratio;
            if diff > 0 {
                d[(n, m)] = down * ratio;
            }
        }
    }
    d
}

/// `√C(n, k)`; shared by the loss-channel formulas.
pub(crate) fn sqrt_binomial(n: usize, k: usize) -> f64 {
    binomial(n, k).sqrt()
}
