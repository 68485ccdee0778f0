//! The pure-loss channel `E_T`.

use crate::error::{Error, Result};
use crate::fock::{annihilation, c, number_power, sqrt_binomial, CMatrix, DensityOperator, ModeOperators, C64};
use crate::report::{CheckReport, Regime};
use crate::special::ln_factorial;

/// Transmission probability. Values outside `[0, 1]` are only meaningful for
/// the analytic continuation of purity polynomials and are marked nonphysical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParameter {
    t: f64,
}

impl LossParameter {
    pub fn new(t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::NonPhysicalTransmission(t));
        }
        Ok(Self { t })
    }

    /// Any finite real `T`.
    pub fn extended(t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::InvalidParameter(format!("transmission {t} is not finite")));
        }
        Ok(Self { t })
    }

    /// `T = e^{-γ t}`.
    pub fn from_decay(gamma: f64, time: f64) -> Result<Self> {
        Self::new((-gamma * time).exp())
    }

    /// `T = cos²(θ/2)`.
    pub fn from_angle(theta: f64) -> Result<Self> {
        Self::new((0.5 * theta).cos().powi(2))
    }

    /// Detector efficiency `η` used directly as `T`.
    pub fn from_efficiency(eta: f64) -> Result<Self> {
        Self::new(eta)
    }

    pub fn value(self) -> f64 {
        self.t
    }

    pub fn is_physical(self) -> bool {
        (0.0..=1.0).contains(&self.t)
    }
}

fn check_physical(t: f64) -> Result<()> {
    LossParameter::new(t).map(|_| ())
}

/// Kraus operators `K_n`, n = 0..cutoff-1, of `E_T` at a fixed cutoff.
#[derive(Debug, Clone)]
pub struct KrausSet {
    pub t: f64,
    pub ops: Vec<CMatrix>,
}

/// `⟨k|K_n|k+n⟩ = √C(k+n, n) T^{k/2} (1-T)^{n/2}`.
pub fn kraus_set(t: f64, cutoff: usize) -> Result<KrausSet> {
    check_physical(t)?;
    if cutoff == 0 {
        return Err(Error::EmptySpace);
    }
    let ops = (0..cutoff)
        .map(|n| {
            let mut k = CMatrix::zeros(cutoff, cutoff);
            for row in 0..cutoff - n {
                k[(row, row + n)] = c(sqrt_binomial(row + n, n) * t.powf(0.5 * row as f64) * (1.0 - t).powf(0.5 * n as f64));
            }
            k
        })
        .collect();
    Ok(KrausSet { t, ops })
}

/// Factor order of the Kraus operators when built from operator products.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KrausOrdering {
    /// `√T^{N} (√(1-T) a)^n / √n!`
    PowerFirst,
    /// `(√((1-T)/T) a)^n √T^{N} / √n!`, defined for `T > 0`.
    LadderFirst,
}

/// Builds the Kraus operators literally from matrix products.
pub fn kraus_by_products(t: f64, cutoff: usize, ordering: KrausOrdering) -> Result<KrausSet> {
    check_physical(t)?;
    if ordering == KrausOrdering::LadderFirst && t == 0.0 {
        return Err(Error::SingularTransmission);
    }
    let a = annihilation(cutoff);
    let damp = number_power(t.sqrt(), cutoff);
    let mut ops = Vec::with_capacity(cutoff);
    let mut a_pow = CMatrix::identity(cutoff, cutoff);
    for n in 0..cutoff {
        let norm = (-0.5 * ln_factorial(n)).exp();
        let op = match ordering {
            KrausOrdering::PowerFirst => &damp * &a_pow * c((1.0 - t).powf(0.5 * n as f64) * norm),
            KrausOrdering::LadderFirst => &a_pow * &damp * c(((1.0 - t) / t).powf(0.5 * n as f64) * norm),
        };
        ops.push(op);
        a_pow = &a_pow * &a;
    }
    Ok(KrausSet { t, ops })
}

impl KrausSet {
    pub fn cutoff(&self) -> usize {
        self.ops.first().map_or(0, |k| k.nrows())
    }

    /// `max |Σ K†K - 1|`.
    pub fn completeness_defect(&self) -> f64 {
        let n = self.cutoff();
        let mut sum = CMatrix::zeros(n, n);
        for k in &self.ops {
            sum += k.adjoint() * k;
        }
        (sum - CMatrix::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `Σ K ρ K†`.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.cutoff() != self.cutoff() {
            return Err(Error::DimensionMismatch { expected: self.cutoff(), got: rho.cutoff() });
        }
        let mut out = CMatrix::zeros(rho.cutoff(), rho.cutoff());
        for k in &self.ops {
            out += k * rho.matrix() * k.adjoint();
        }
        Ok(DensityOperator::with_flag_of(out, rho))
    }
}

/// `E_T[ρ]` for `T ∈ [0, 1]`, via
/// `ρ_T[k,k'] = Σ_n √(C(k+n,n) C(k'+n,n)) T^{(k+k')/2} (1-T)^n ρ[k+n,k'+n]`.
pub fn apply_loss(rho: &DensityOperator, t: f64) -> Result<DensityOperator> {
    check_physical(t)?;
    Ok(DensityOperator::with_flag_of(loss_matrix(rho.matrix(), t), rho))
}

/// The same map on a plain matrix, `T ∈ [0, 1]`.
pub(crate) fn loss_matrix(m: &CMatrix, t: f64) -> CMatrix {
    let cutoff = m.nrows();
    let sqrt_t: Vec<f64> = (0..cutoff).map(|k| t.sqrt().powi(k as i32)).collect();
    let one_minus: Vec<f64> = (0..cutoff).map(|n| (1.0 - t).powi(n as i32)).collect();
    CMatrix::from_fn(cutoff, cutoff, |k, kp| {
        let mut acc = C64::default();
        for n in 0..cutoff - k.max(kp) {
            let w = (sqrt_binomial(k + n, n) * sqrt_binomial(kp + n, n)) * one_minus[n];
            acc += m[(k + n, kp + n)] * w;
        }
        acc * (sqrt_t[k] * sqrt_t[kp])
    })
}

/// `∂ρ_T/∂T = -(1/2T)(2 a ρ_T a† - N ρ_T - ρ_T N)`.
pub fn loss_generator(rho_t: &DensityOperator, t: f64) -> Result<CMatrix> {
    if t == 0.0 {
        return Err(Error::SingularTransmission);
    }
    let ops = ModeOperators::new(rho_t.cutoff());
    let r = rho_t.matrix();
    let inner = &ops.a * r * &ops.adag * c(2.0) - &ops.number * r - r * &ops.number;
    Ok(inner * c(-0.5 / t))
}

/// Compares `E_{T1}∘E_{T2}` with `E_{T1 T2}` in max-abs norm.
pub fn multiplicativity_check(rho: &DensityOperator, t1: f64, t2: f64) -> Result<CheckReport> {
    let composed = apply_loss(&apply_loss(rho, t2)?, t1)?;
    let direct = apply_loss(rho, t1 * t2)?;
    let dev = (composed.matrix() - direct.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(CheckReport::le("loss_multiplicativity", dev, 0.0, Regime::Exact)
        .with_params(format!("T1={t1};T2={t2}"))
        .with_claim("loss acts multiplicatively in T"))
}
