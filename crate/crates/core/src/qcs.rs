//! Quadrature coherence scale `C²` by independent routes.
//!
//! `C² = (Tr|[X,ρ]|² + Tr|[P,ρ]|²) / (2 Tr ρ²)`; the vacuum has `C² = 1`.

use crate::error::{Error, Result};
use crate::fock::{c, CMatrix, DensityOperator, ModeOperators, PureState};
use crate::loss::apply_loss;
use crate::purity::{ladder_traces, purity, purity_polynomial};
use crate::special::{hermite_functions, KahanSum};

/// Purity below which `C²` is not evaluated.
pub const PURITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcsRoute {
    Commutator,
    PurityRate,
    TwoCopy,
    Lindblad,
    Kernel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QcsResult {
    pub c_squared: f64,
    pub route: QcsRoute,
    pub purity_used: f64,
    /// Set when `T = 0`: the output is vacuum and `C² = 1` by convention.
    pub degenerate: bool,
    /// Commutator route only: the value did not move when the padding was doubled.
    pub cutoff_stable: Option<bool>,
}

impl QcsResult {
    fn new(c_squared: f64, route: QcsRoute, purity_used: f64) -> Self {
        Self { c_squared, route, purity_used, degenerate: false, cutoff_stable: None }
    }

    fn degenerate(route: QcsRoute) -> Self {
        Self { c_squared: 1.0, route, purity_used: 1.0, degenerate: true, cutoff_stable: None }
    }
}

fn check_purity(p: f64) -> Result<()> {
    if p < PURITY_FLOOR {
        return Err(Error::PurityUnderflow(p));
    }
    Ok(())
}

fn frobenius_sq(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).collect::<KahanSum>().value()
}

fn commutator_value(rho: &DensityOperator, pad: usize) -> f64 {
    let r = rho.padded(rho.cutoff() + pad);
    let ops = ModeOperators::new(r.cutoff());
    let m = r.matrix();
    let cx = &ops.x * m - m * &ops.x;
    let cp = &ops.p * m - m * &ops.p;
    (frobenius_sq(&cx) + frobenius_sq(&cp)) / (2.0 * purity(rho))
}

/// Commutator definition on a cutoff padded by 2, re-checked with padding 4.
pub fn qcs_commutator(rho: &DensityOperator) -> Result<QcsResult> {
    let p = purity(rho);
    check_purity(p)?;
    let v = commutator_value(rho, 2);
    let v4 = commutator_value(rho, 4);
    let mut res = QcsResult::new(v, QcsRoute::Commutator, p);
    res.cutoff_stable = Some((v - v4).abs() < 1e-9);
    Ok(res)
}

/// `C²(ρ_T) = (T/P) ∂P/∂T + 1` from the exact purity polynomial.
pub fn qcs_purity_rate(rho1: &DensityOperator, t: f64) -> Result<QcsResult> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::NonPhysicalTransmission(t));
    }
    if t == 0.0 {
        return Ok(QcsResult::degenerate(QcsRoute::PurityRate));
    }
    let poly = purity_polynomial(rho1);
    let p = poly.evaluate(t);
    check_purity(p)?;
    Ok(QcsResult::new(t * poly.derivative(t, 1) / p + 1.0, QcsRoute::PurityRate, p))
}

/// Padded cutoffs up to this size build the two-copy operators densely.
const TWO_COPY_DENSE_MAX: usize = 16;

/// Two-copy observable: `Tr[ρ⊗ρ N̂] / Tr[ρ⊗ρ Ŝ]` with
/// `N̂ = ½((X₁-X₂)² + (P₁-P₂)²) Ŝ` and `Ŝ` the swap.
///
/// Large cutoffs use `Tr[(A⊗B) Ŝ] = Tr[AB]` term by term instead of
/// the `c² x c²` operators.
pub fn qcs_two_copy(rho: &DensityOperator) -> Result<QcsResult> {
    let r = rho.padded(rho.cutoff() + 2);
    let d = r.cutoff();
    let ops = ModeOperators::new(d);
    let m = r.matrix();
    let (num, den) = if d <= TWO_COPY_DENSE_MAX {
        let id = CMatrix::identity(d, d);
        let swap = CMatrix::from_fn(d * d, d * d, |i, j| if j == (i % d) * d + i / d { c(1.0) } else { c(0.0) });
        let dx = ops.x.kronecker(&id) - id.kronecker(&ops.x);
        let dp = ops.p.kronecker(&id) - id.kronecker(&ops.p);
        let n_hat = (&dx * &dx + &dp * &dp) * c(0.5) * &swap;
        let two = m.kronecker(m);
        ((&two * n_hat).trace().re, (&two * swap).trace().re)
    } else {
        let swap_tr = |a: &CMatrix, b: &CMatrix| (m * a * m * b).trace().re;
        let id = CMatrix::identity(d, d);
        let mut num = 0.0;
        for q in [&ops.x, &ops.p] {
            let q2 = q * q;
            num += 0.5 * (swap_tr(&q2, &id) + swap_tr(&id, &q2) - 2.0 * swap_tr(q, q));
        }
        (num, swap_tr(&id, &id))
    };
    check_purity(den)?;
    Ok(QcsResult::new(num / den, QcsRoute::TwoCopy, den))
}

/// `C²(ρ_T) = (2/P) Tr[N ρ_T² - a ρ_T a† ρ_T] + 1`.
pub fn qcs_lindblad(rho1: &DensityOperator, t: f64) -> Result<QcsResult> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::NonPhysicalTransmission(t));
    }
    if t == 0.0 {
        return Ok(QcsResult::degenerate(QcsRoute::Lindblad));
    }
    let rho_t = if t == 1.0 { rho1.clone() } else { apply_loss(rho1, t)? };
    let p = purity(&rho_t);
    check_purity(p)?;
    let (n_term, a_term) = ladder_traces(&rho_t);
    Ok(QcsResult::new(2.0 / p * (n_term - a_term) + 1.0, QcsRoute::Lindblad, p))
}

/// Pure-input variant replacing `Tr[a ρ_T a† ρ_T]` by `Tr[N ρ_{1-T}²] T/(1-T)`.
pub fn qcs_lindblad_transposed(psi: &PureState, t: f64) -> Result<QcsResult> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::NonPhysicalTransmission(t));
    }
    if t == 0.0 {
        return Ok(QcsResult::degenerate(QcsRoute::Lindblad));
    }
    let rho = psi.to_density();
    let rho_t = apply_loss(&rho, t)?;
    let p = purity(&rho_t);
    check_purity(p)?;
    let (n_t, _) = ladder_traces(&rho_t);
    let (n_mirror, _) = ladder_traces(&apply_loss(&rho, 1.0 - t)?);
    Ok(QcsResult::new(2.0 / p * (n_t - n_mirror * t / (1.0 - t)) + 1.0, QcsRoute::Lindblad, p))
}

/// Uniform quadrature grid on `[-x_max, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureGrid {
    pub x_max: f64,
    pub points: usize,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self { x_max: 6.0, points: 401 }
    }
}

impl QuadratureGrid {
    pub fn spacing(&self) -> f64 {
        2.0 * self.x_max / (self.points - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points).map(|i| -self.x_max + i as f64 * h).collect()
    }

    /// True when the grid cannot resolve Fock levels below `cutoff`.
    pub fn too_coarse_for(&self, cutoff: usize) -> bool {
        let turning = (2.0 * cutoff as f64 - 1.0).sqrt();
        self.points < 3 || self.x_max < turning + 4.0 || self.spacing() > 1.0 / (2.0 * cutoff as f64 + 1.0).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelQcs {
    pub result: QcsResult,
    pub accuracy_warning: bool,
}

/// `∫∫ (x-x')² |ρ_θ(x,x')|² dx dx'` for the quadrature `X cos θ + P sin θ`.
fn kernel_spread(rho: &DensityOperator, grid: &QuadratureGrid, theta: f64) -> f64 {
    let c0 = rho.cutoff();
    let xs = grid.nodes();
    let h = grid.spacing();
    let mut psi = CMatrix::zeros(c0, xs.len());
    for (i, &x) in xs.iter().enumerate() {
        for (m, v) in hermite_functions(c0 - 1, x).into_iter().enumerate() {
            psi[(m, i)] = num_complex::Complex64::from_polar(v, -(m as f64) * theta);
        }
    }
    let kernel = psi.transpose() * rho.matrix() * psi.conjugate();
    let mut acc = KahanSum::default();
    for i in 0..xs.len() {
        for j in 0..xs.len() {
            let d = xs[i] - xs[j];
            acc.add(d * d * kernel[(i, j)].norm_sqr());
        }
    }
    acc.value() * h * h
}

/// Position/momentum kernel form of `C²`, integrated on a uniform grid.
pub fn qcs_kernel_form(rho: &DensityOperator, grid: &QuadratureGrid) -> Result<KernelQcs> {
    qcs_kernel_form_rotated(rho, grid, 0.0)
}

/// Kernel form using the quadrature pair at angles `θ` and `θ + π/2`.
pub fn qcs_kernel_form_rotated(rho: &DensityOperator, grid: &QuadratureGrid, theta: f64) -> Result<KernelQcs> {
    let p = purity(rho);
    check_purity(p)?;
    let sx = kernel_spread(rho, grid, theta);
    let sp = kernel_spread(rho, grid, theta + std::f64::consts::FRAC_PI_2);
    Ok(KernelQcs {
        result: QcsResult::new((sx + sp) / (2.0 * p), QcsRoute::Kernel, p),
        accuracy_warning: grid.too_coarse_for(rho.support_cutoff(1e-14)),
    })
}
