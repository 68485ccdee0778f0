//! Purity, entropies, overlaps and the dark-port polynomial form of purity under loss.

use crate::error::{Error, Result};
use crate::fock::{CMatrix, DensityOperator, PureState, C64};
use crate::loss::apply_loss;
use crate::special::{binomial, KahanSum};
use crate::two_mode::{beam_splitter_apply, block_unitary, pair_dark_port_distribution, partial_trace, tensor, Mode};

/// Eigenvalues in `[-CLIP_TOL, 0)` are treated as zero before taking logs.
pub const CLIP_TOL: f64 = 1e-10;
/// Eigenvalues below `-NONSTATE_TOL` make an entropy undefined.
pub const NONSTATE_TOL: f64 = 1e-8;

/// `Σ_m p_m λ^m` with `λ = 1 - 2T`.
#[derive(Debug, Clone, PartialEq)]
pub struct PurityPolynomial {
    pub coefficients: Vec<f64>,
}

impl PurityPolynomial {
    pub fn evaluate(&self, t: f64) -> f64 {
        self.evaluate_lambda(1.0 - 2.0 * t)
    }

    pub fn evaluate_lambda(&self, lambda: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, p| acc * lambda + p)
    }

    /// `d^k/dT^k`, exact.
    pub fn derivative(&self, t: f64, k: usize) -> f64 {
        self.lambda_derivative(1.0 - 2.0 * t, k) * (-2.0f64).powi(k as i32)
    }

    /// `d^k/dλ^k`, exact.
    pub fn lambda_derivative(&self, lambda: f64, k: usize) -> f64 {
        let mut acc = 0.0;
        for (m, p) in self.coefficients.iter().enumerate().skip(k).rev() {
            let falling: f64 = (0..k).map(|j| (m - j) as f64).product();
            acc = acc * lambda + p * falling;
        }
        acc
    }

    /// Value at `T = 0` (`λ = 1`).
    pub fn total(&self) -> f64 {
        self.coefficients.iter().sum()
    }

    pub fn min_coefficient(&self) -> f64 {
        self.coefficients.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_odd_abs(&self) -> f64 {
        self.coefficients.iter().skip(1).step_by(2).map(|p| p.abs()).fold(0.0, f64::max)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }
}

/// `Tr[ρ²]`.
pub fn purity(rho: &DensityOperator) -> f64 {
    rho.matrix().iter().map(|z| z.norm_sqr()).collect::<KahanSum>().value()
}

/// Spectrum with small negative eigenvalues clipped to zero.
pub fn clipped_spectrum(rho: &DensityOperator) -> Result<Vec<f64>> {
    let ev = rho.eigenvalues();
    if let Some(&min) = ev.first() {
        if min < -NONSTATE_TOL {
            return Err(Error::NotPositive(min));
        }
    }
    Ok(ev.into_iter().map(|x| x.max(0.0)).collect())
}

/// Rényi entropy of order `order > 0` in nats; order 1 is von Neumann.
/// Eigenvalues below 1e-14 are dropped, as for the von Neumann entropy.
pub fn renyi_entropy(rho: &DensityOperator, order: f64) -> Result<f64> {
    if !(order > 0.0) || !order.is_finite() {
        return Err(Error::InvalidParameter(format!("Renyi order {order} must be positive and finite")));
    }
    if order == 1.0 {
        return von_neumann(rho);
    }
    let spec = clipped_spectrum(rho)?;
    let s: f64 = spec.iter().filter(|&&x| x > 1e-14).map(|x| x.powf(order)).sum();
    Ok(s.ln() / (1.0 - order))
}

/// `-Tr[ρ ln ρ]`; eigenvalues below 1e-14 contribute nothing.
pub fn von_neumann(rho: &DensityOperator) -> Result<f64> {
    Ok(spectrum_entropy(&clipped_spectrum(rho)?))
}

pub(crate) fn spectrum_entropy(spec: &[f64]) -> f64 {
    spec.iter().filter(|&&x| x > 1e-14).map(|x| -x * x.ln()).sum()
}

/// Purity under loss as a polynomial in `λ = 1 - 2T`; the coefficients are
/// the dark-port photon-number distribution of `ρ ⊗ ρ`.
pub fn purity_polynomial(rho: &DensityOperator) -> PurityPolynomial {
    overlap_polynomial_unchecked(rho.matrix(), rho.matrix())
}

/// `Tr[ρ_T σ_T]` as a polynomial in `λ`.
pub fn overlap_polynomial(rho: &DensityOperator, sigma: &DensityOperator) -> PurityPolynomial {
    overlap_polynomial_unchecked(rho.matrix(), sigma.matrix())
}

fn overlap_polynomial_unchecked(rho: &CMatrix, sigma: &CMatrix) -> PurityPolynomial {
    let mut coefficients = pair_dark_port_distribution(rho, sigma);
    while coefficients.len() > 1 && coefficients.last() == Some(&0.0) {
        coefficients.pop();
    }
    PurityPolynomial { coefficients }
}

/// Purity polynomial of a pure input from two-mode amplitudes.
///
/// Row `k` of the balanced block satisfies `U[k, N-j] = (-1)^(N-k) U[k, j]`
/// and the amplitudes `ψ_j ψ_{N-j}` are mirror symmetric, so pairing `j`
/// with `N-j` makes every odd-`m` amplitude cancel exactly. The density
/// route leaves `~1e-17` noise there, which evaluation at `|λ| > 1` amplifies.
pub fn pure_purity_polynomial(psi: &PureState) -> PurityPolynomial {
    let c0 = psi.cutoff();
    let amp = |j: usize| if j < c0 { psi.amplitude(j) } else { C64::default() };
    let max_total = 2 * (c0 - 1);
    let mut coefficients = vec![0.0; max_total + 1];
    for total in 0..=max_total {
        let u = block_unitary(total, &(0..=total).collect::<Vec<_>>(), -std::f64::consts::FRAC_PI_4);
        for k in 0..=total {
            let m = total - k;
            let s = if m % 2 == 0 { 1.0 } else { -1.0 };
            let row = |j: usize| (u[(k, j)] + s * u[(k, total - j)]) / 2.0;
            let mut a = C64::default();
            for j in 0..=total / 2 {
                let cj = amp(j) * amp(total - j);
                if 2 * j == total {
                    a += cj * row(j);
                } else {
                    let cm = amp(total - j) * amp(j);
                    a += cj * row(j) + cm * row(total - j);
                }
            }
            coefficients[m] += a.norm_sqr();
        }
    }
    while coefficients.len() > 1 && coefficients.last() == Some(&0.0) {
        coefficients.pop();
    }
    PurityPolynomial { coefficients }
}

/// `min_T P(ρ_T)` for a pure input, attained at `T = 1/2`:
/// `Σ_n 2^{-n} |Σ_k √C(n,k) ψ_k ψ_{n-k}|²`.
pub fn min_purity_pure(psi: &PureState) -> f64 {
    let c0 = psi.cutoff();
    let mut total = KahanSum::default();
    for n in 0..(2 * c0 - 1) {
        let lo = n.saturating_sub(c0 - 1);
        let hi = n.min(c0 - 1);
        let inner: num_complex::Complex64 = (lo..=hi).map(|k| psi.amplitude(k) * psi.amplitude(n - k) * binomial(n, k).sqrt()).sum();
        total.add(inner.norm_sqr() * 0.5f64.powi(n as i32));
    }
    total.value()
}

/// `Re Tr[σ† ρ]`.
pub fn hs_overlap(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.cutoff() != sigma.cutoff() {
        return Err(Error::DimensionMismatch { expected: rho.cutoff(), got: sigma.cutoff() });
    }
    Ok(rho.matrix().iter().zip(sigma.matrix().iter()).map(|(r, s)| (s.conj() * r).re).collect::<KahanSum>().value())
}

/// `Tr[σ_T† ρ_T]`.
pub fn lossy_overlap(rho: &DensityOperator, sigma: &DensityOperator, t: f64) -> Result<f64> {
    hs_overlap(&apply_loss(rho, t)?, &apply_loss(sigma, t)?)
}

/// Mutual information between the two outputs of a splitter fed with `ρ` and vacuum.
pub fn mutual_information_bs(rho: &DensityOperator, t: f64) -> Result<f64> {
    // the reflected port carries E_{1-T}(rho) up to a phase rotation
    let h_t = von_neumann(&apply_loss(rho, t)?)?;
    let h_r = von_neumann(&apply_loss(rho, 1.0 - t)?)?;
    Ok(h_t + h_r - von_neumann(rho)?)
}

/// [`mutual_information_bs`] from the full two-mode output; `O(c^6)`.
pub fn mutual_information_bs_dense(rho: &DensityOperator, t: f64) -> Result<f64> {
    let cutoff = rho.cutoff();
    let vac = crate::fock::make_fock(0, cutoff)?.to_density();
    let omega = beam_splitter_apply(&tensor(rho, &vac), t)?;
    let h1 = von_neumann(&partial_trace(&omega, Mode::First))?;
    let h2 = von_neumann(&partial_trace(&omega, Mode::Second))?;
    Ok(h1 + h2 - von_neumann(rho)?)
}

/// Purity of `E_T[|n⟩⟨n|]`, `Σ_k (C(n,k) T^k (1-T)^{n-k})²`, for any real `T`.
pub fn fock_purity_closed_form(n: usize, t: f64) -> f64 {
    (0..=n)
        .map(|k| (binomial(n, k) * t.powi(k as i32) * (1.0 - t).powi((n - k) as i32)).powi(2))
        .collect::<KahanSum>()
        .value()
}

/// `Σ_{l,l'} T^{l+l'}/(l! l'!) |Tr[a†^l (1-T)^{N} a^{l'} ρ]|²`, valid for any real `T`.
pub fn appendix_a_purity(rho: &DensityOperator, t: f64) -> f64 {
    let c0 = rho.cutoff();
    let mut total = KahanSum::default();
    for l in 0..c0 {
        for lp in 0..c0 {
            // Tr[...] / √(l! l'!) = Σ_j √(C(j+l,l) C(j+l',l')) (1-T)^j ρ[j+l', j+l]
            let inner: num_complex::Complex64 = (0..c0 - l.max(lp))
                .map(|j| rho.get(j + lp, j + l) * ((binomial(j + l, l) * binomial(j + lp, lp)).sqrt() * (1.0 - t).powi(j as i32)))
                .sum();
            total.add(t.powi((l + lp) as i32) * inner.norm_sqr());
        }
    }
    total.value()
}

/// `d^k P(ρ_T)/dT^k` from the exact polynomial.
pub fn purity_derivative(rho: &DensityOperator, t: f64, k: usize) -> f64 {
    purity_polynomial(rho).derivative(t, k)
}

/// `(2/T) Tr[N ρ_T² - a ρ_T a† ρ_T]`, the first derivative from the loss generator.
pub fn purity_derivative_generator(rho1: &DensityOperator, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Err(Error::SingularTransmission);
    }
    let rho_t = apply_loss(rho1, t)?;
    let (n_rho_sq, a_rho_adag_rho) = ladder_traces(&rho_t);
    Ok(2.0 / t * (n_rho_sq - a_rho_adag_rho))
}

/// `(Tr[N ρ²], Tr[a ρ a† ρ])` for a state at its own cutoff (both exact there).
pub fn ladder_traces(rho: &DensityOperator) -> (f64, f64) {
    let m = rho.matrix();
    let c0 = rho.cutoff();
    let mut n_term = KahanSum::default();
    let mut a_term = KahanSum::default();
    for i in 0..c0 {
        for j in 0..c0 {
            // Tr[N ρ²] = Σ_ij i |ρ_ij|²
            n_term.add(i as f64 * m[(i, j)].norm_sqr());
            // Tr[a ρ a† ρ] = Σ_ij √(i j) ρ_{i,j} ρ_{j-1,i-1}
            if i > 0 && j > 0 {
                a_term.add(((i * j) as f64).sqrt() * (m[(i, j)] * m[(j - 1, i - 1)]).re);
            }
        }
    }
    (n_term.value(), a_term.value())
}

/// Purity after loss evaluated directly on the state (physical `T` only).
pub fn lossy_purity(rho: &DensityOperator, t: f64) -> Result<f64> {
    Ok(purity(&apply_loss(rho, t)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_block_mirror_symmetry() {
        for total in 0..12usize {
            let u = block_unitary(total, &(0..=total).collect::<Vec<_>>(), -std::f64::consts::FRAC_PI_4);
            for k in 0..=total {
                let s = if (total - k) % 2 == 0 { 1.0 } else { -1.0 };
                for j in 0..=total {
                    assert!((u[(k, total - j)] - s * u[(k, j)]).abs() < 1e-13, "N={total} k={k} j={j}");
                }
            }
        }
    }

    #[test]
    fn pure_route_matches_density_route() {
        for seed in 0..20 {
            let psi = random_pure(seed, 2 + seed as usize % 11).unwrap();
            let a = pure_purity_polynomial(&psi).coefficients;
            let b = purity_polynomial(&psi.to_density()).coefficients;
            assert_eq!(a.len(), b.len());
            assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-13));
            assert!(a.iter().skip(1).step_by(2).all(|&x| x == 0.0));
        }
    }
    use crate::fock::{make_coherent, make_fock, random_mixed, random_pure};
    use std::f64::consts::LN_2;

    fn fock(n: usize, cutoff: usize) -> DensityOperator {
        make_fock(n, cutoff).unwrap().to_density()
    }

    #[test]
    fn purity_examples() {
        assert!((purity(&fock(3, 5)) - 1.0).abs() < 1e-15);
        assert!((lossy_purity(&fock(1, 2), 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!((lossy_purity(&fock(2, 3), 0.5).unwrap() - 0.375).abs() < 1e-15);
    }

    #[test]
    fn entropies() {
        let half = apply_loss(&fock(1, 2), 0.5).unwrap();
        assert!((von_neumann(&half).unwrap() - LN_2).abs() < 1e-12);
        let two = apply_loss(&fock(2, 3), 0.5).unwrap();
        assert!((renyi_entropy(&two, 2.0).unwrap() + 0.375f64.ln()).abs() < 1e-12);
        let pure = random_pure(3, 6).unwrap().to_density();
        for order in [0.5, 1.0, 2.0, 3.0] {
            assert!(renyi_entropy(&pure, order).unwrap().abs() < 1e-9);
        }
        assert!(renyi_entropy(&pure, 0.0).is_err());
    }

    #[test]
    fn polynomial_examples() {
        let p = purity_polynomial(&fock(1, 2));
        assert_eq!(p.coefficients.len(), 3);
        for (a, b) in p.coefficients.iter().zip([0.5, 0.0, 0.5]) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(purity_polynomial(&fock(0, 3)).coefficients, vec![1.0]);
        let q = overlap_polynomial(&fock(0, 2), &fock(1, 2));
        assert!((q.coefficients[0] - 0.5).abs() < 1e-14 && (q.coefficients[1] - 0.5).abs() < 1e-14);
        assert!((p.derivative(0.3, 1) - (4.0 * 0.3 - 2.0)).abs() < 1e-13);
        assert!((p.derivative(-0.7, 2) - 4.0).abs() < 1e-13);
        assert_eq!(p.derivative(0.2, 3), 0.0);
    }

    #[test]
    fn polynomial_matches_direct_purity() {
        for seed in 0..5 {
            let rho = random_mixed(seed, 6, 3).unwrap();
            let poly = purity_polynomial(&rho);
            assert!(poly.min_coefficient() >= -1e-10);
            for i in 0..=10 {
                let t = i as f64 / 10.0;
                assert!((poly.evaluate(t) - lossy_purity(&rho, t).unwrap()).abs() < 1e-10);
                assert!((appendix_a_purity(&rho, t) - poly.evaluate(t)).abs() < 1e-9);
            }
            for t in [-1.0, 1.7] {
                assert!((appendix_a_purity(&rho, t) - poly.evaluate(t)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn min_purity() {
        assert!((min_purity_pure(&make_fock(1, 3).unwrap()) - 0.5).abs() < 1e-15);
        assert!((min_purity_pure(&make_fock(0, 3).unwrap()) - 1.0).abs() < 1e-15);
        assert!((min_purity_pure(&make_fock(2, 3).unwrap()) - 0.375).abs() < 1e-15);
        let psi = random_pure(9, 7).unwrap();
        let poly = purity_polynomial(&psi.to_density());
        assert!((min_purity_pure(&psi) - poly.coefficients[0]).abs() < 1e-10);
        assert!((min_purity_pure(&psi) - poly.evaluate(0.5)).abs() < 1e-10);
    }

    #[test]
    fn overlaps() {
        let (v, one) = (fock(0, 2), fock(1, 2));
        assert!((lossy_overlap(&v, &v, 0.4).unwrap() - 1.0).abs() < 1e-15);
        assert!((lossy_overlap(&v, &one, 0.4).unwrap() - 0.6).abs() < 1e-15);
        assert!(hs_overlap(&v, &fock(0, 3)).is_err());
        let (r, s) = (random_mixed(1, 5, 2).unwrap(), random_mixed(2, 5, 3).unwrap());
        let poly = overlap_polynomial(&r, &s);
        for t in [0.0, 0.25, 0.6, 1.0] {
            assert!((poly.evaluate(t) - lossy_overlap(&r, &s, t).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn mutual_information() {
        let rho = random_mixed(4, 4, 2).unwrap();
        assert!(mutual_information_bs(&rho, 1.0).unwrap().abs() < 1e-10);
        assert!((mutual_information_bs(&fock(1, 2), 0.5).unwrap() - 2.0 * LN_2).abs() < 1e-10);
        let psi = random_pure(5, 5).unwrap().to_density();
        let t = 0.35;
        let i = mutual_information_bs(&psi, t).unwrap();
        for seed in 0..6 {
            let r = random_mixed(seed, 5, 1 + seed as usize % 5).unwrap();
            for x in [0.1, 0.5, 0.8] {
                assert!((mutual_information_bs(&r, x).unwrap() - mutual_information_bs_dense(&r, x).unwrap()).abs() < 1e-9);
            }
        }
        assert!((i - 2.0 * von_neumann(&apply_loss(&psi, t).unwrap()).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn fock_closed_form() {
        assert!((fock_purity_closed_form(2, 0.5) - 0.375).abs() < 1e-15);
        assert_eq!(fock_purity_closed_form(0, 3.0), 1.0);
        for t in [-0.5, 0.2, 1.4] {
            assert!((fock_purity_closed_form(1, t) - (t * t + (1.0 - t).powi(2))).abs() < 1e-14);
        }
        for n in 0..8 {
            let rho = fock(n, n + 1);
            assert!((fock_purity_closed_form(n, 0.3) - lossy_purity(&rho, 0.3).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_routes() {
        let one = fock(1, 2);
        assert!((appendix_a_purity(&one, 0.3) - 0.58).abs() < 1e-14);
        let psi = random_pure(12, 6).unwrap().to_density();
        assert!(purity_derivative(&psi, 0.5, 1).abs() < 1e-10);
        let rho = random_mixed(13, 6, 3).unwrap();
        for t in [0.1, 0.5, 0.9] {
            let a = purity_derivative(&rho, t, 1);
            let b = purity_derivative_generator(&rho, t).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
        let coh = make_coherent(C64::new(0.7, 0.2), 30).unwrap().to_density();
        assert!(purity_derivative(&coh, 0.4, 1).abs() < 1e-9);
    }
}
