//! s-ordered quasiprobabilities and characteristic functions.
//!
//! Conventions: `χ(α,s) = Tr[ρ D(α)] e^{s|α|²/2}` and
//! `P(α,s) = π⁻² ∫ d²β χ(β,s) e^{αβ̄ - ᾱβ}`, so that `P(·,-1)` is the Husimi
//! function `⟨α|ρ|α⟩/π` and `P(·,0)` the Wigner function. Pointwise values
//! use `P(α,s) = Tr[ρ Δ(α,s)]` with
//! `Δ(α,s) = (2/(π(1-s))) D(α) ((s+1)/(s-1))^{N} D(α)†`, whose Fock matrix
//! elements have a closed Laguerre form.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fock::{displacement_matrix, CMatrix, DensityOperator, C64};
use crate::loss::apply_loss;
use crate::report::{fmt_f64, CheckReport, Regime};
use crate::special::{ln_factorial, scaled_laguerre, GaussLaguerre, KahanSum};

/// Quadrature coordinates `(x, p) = √2 (Re α, Im α)`.
pub fn quadratures(alpha: C64) -> (f64, f64) {
    (std::f64::consts::SQRT_2 * alpha.re, std::f64::consts::SQRT_2 * alpha.im)
}

/// `Tr[ρ D(α)]`.
pub fn displacement_expectation(rho: &DensityOperator, alpha: C64) -> C64 {
    let d = displacement_matrix(alpha, rho.cutoff());
    rho.expectation(&d)
}

/// `χ(α, s) = Tr[ρ D(α)] e^{s|α|²/2}`.
pub fn char_fn(rho: &DensityOperator, alpha: C64, s: f64) -> C64 {
    displacement_expectation(rho, alpha) * (0.5 * s * alpha.norm_sqr()).exp()
}

fn check_order(s: f64) -> Result<()> {
    if !(s < 1.0) {
        return Err(Error::UnsupportedOrder(s));
    }
    Ok(())
}

/// Matrix elements `⟨m|Δ(α,s)|n⟩`, `s < 1`, exact for every `m, n < cutoff`.
pub fn quasi_kernel_matrix(alpha: C64, s: f64, cutoff: usize) -> Result<CMatrix> {
    check_order(s)?;
    let u = alpha.norm_sqr();
    let x = alpha * (2.0 / (1.0 - s));
    let y = (s + 1.0) / (s - 1.0);
    let w = x.norm_sqr();
    let pref = 2.0 / (PI * (1.0 - s)) * (-2.0 * u / (1.0 - s)).exp();
    let mut k = CMatrix::zeros(cutoff, cutoff);
    for diff in 0..cutoff {
        let lag = scaled_laguerre(cutoff - 1 - diff, diff, y, w);
        let xp = x.powu(diff as u32);
        for (n, l) in lag.iter().enumerate() {
            let m = n + diff;
            let v = xp * (pref * (0.5 * (ln_factorial(n) - ln_factorial(m))).exp() * l);
            k[(m, n)] = v;
            if diff > 0 {
                k[(n, m)] = v.conj();
            }
        }
    }
    Ok(k)
}

/// `P(α, s) = Tr[ρ Δ(α,s)]` for `s < 1`.
pub fn quasi_prob(rho: &DensityOperator, alpha: C64, s: f64) -> Result<f64> {
    let k = quasi_kernel_matrix(alpha, s, rho.cutoff())?;
    let v = rho.expectation(&k);
    if v.im.abs() > 1e-9 * (1.0 + v.re.abs()) {
        return Err(Error::Accuracy(format!("quasiprobability has imaginary part {}", v.im)));
    }
    Ok(v.re)
}

/// Wigner function from the displaced-parity form `(2/π) Tr[ρ D Π D†]`,
/// with the intermediate sum truncated at `cutoff + pad`.
pub fn wigner_parity(rho: &DensityOperator, alpha: C64, pad: usize) -> f64 {
    let c0 = rho.cutoff();
    let big = c0 + pad;
    let d = displacement_matrix(alpha, big);
    let mut op = CMatrix::zeros(c0, c0);
    for m in 0..c0 {
        for n in 0..c0 {
            op[(m, n)] = (0..big).map(|k| d[(m, k)] * d[(n, k)].conj() * if k % 2 == 0 { 1.0 } else { -1.0 }).sum();
        }
    }
    2.0 / PI * rho.expectation(&op).re
}

/// Husimi function `⟨α|ρ|α⟩/π` from coherent-state amplitudes.
pub fn husimi_direct(rho: &DensityOperator, alpha: C64) -> f64 {
    let c0 = rho.cutoff();
    let u = alpha.norm_sqr();
    let amp: Vec<C64> = (0..c0).map(|n| alpha.powu(n as u32) * (-0.5 * u - 0.5 * ln_factorial(n)).exp()).collect();
    let mut acc = C64::default();
    for m in 0..c0 {
        for n in 0..c0 {
            acc += amp[m].conj() * rho.get(m, n) * amp[n];
        }
    }
    acc.re / PI
}

/// Radial Gauss–Laguerre times angular trapezoid rule for `∫ d²α`.
#[derive(Debug, Clone)]
pub struct Quadrature2D {
    radial: GaussLaguerre,
    n_theta: usize,
}

impl Default for Quadrature2D {
    fn default() -> Self {
        Self::new(80, 128)
    }
}

impl Quadrature2D {
    pub fn new(n_r: usize, n_theta: usize) -> Self {
        Self { radial: GaussLaguerre::new(n_r.max(1)), n_theta: n_theta.max(1) }
    }

    pub fn n_r(&self) -> usize {
        self.radial.len()
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    /// Exact for `e^{-rate |α|²}` times a polynomial in `α, ᾱ` whose `|α|²`
    /// degree is below `2 n_r` and angular frequency below `n_θ`.
    pub fn supports_cutoff(&self, cutoff: usize) -> bool {
        self.n_r() >= cutoff && self.n_theta > 2 * cutoff.saturating_sub(1)
    }

    /// `∫ d²α f(α)` for `f` decaying like `e^{-rate |α|²}`. Errors when the
    /// outermost radial ring still carries a visible share of the integral.
    pub fn integrate(&self, rate: f64, mut f: impl FnMut(C64) -> f64) -> Result<f64> {
        let dtheta = 2.0 * PI / self.n_theta as f64;
        let mut total = KahanSum::default();
        let mut abs_total = 0.0;
        let mut outer = 0.0;
        let n_r = self.n_r();
        for (i, (x, sw)) in self.radial.nodes.iter().zip(&self.radial.scaled_weights).enumerate() {
            let u = x / rate;
            let r = u.sqrt();
            let mut ring = KahanSum::default();
            for j in 0..self.n_theta {
                let th = j as f64 * dtheta;
                ring.add(f(C64::from_polar(r, th)));
            }
            let contrib = ring.value() * sw / rate * 0.5 * dtheta;
            if !contrib.is_finite() {
                return Err(Error::Accuracy("non-finite integrand".into()));
            }
            total.add(contrib);
            abs_total += contrib.abs();
            if i + 3 >= n_r {
                outer += contrib.abs();
            }
        }
        if abs_total > 0.0 && outer > 1e-8 * abs_total {
            return Err(Error::Accuracy(format!("integrand not decayed at outer nodes ({outer:e} of {abs_total:e})")));
        }
        Ok(total.value())
    }
}

fn check_quadrature(q: &Quadrature2D, cutoff: usize) -> Result<()> {
    if !q.supports_cutoff(cutoff) {
        return Err(Error::Accuracy(format!(
            "quadrature {}x{} too small for cutoff {cutoff}",
            q.n_r(),
            q.n_theta()
        )));
    }
    Ok(())
}

/// `Tr[ρ²] = ∫ (d²α/π) e^{-s|α|²} |χ(α,s)|²`.
pub fn purity_from_chi(rho: &DensityOperator, s: f64, quad: &Quadrature2D) -> Result<f64> {
    check_quadrature(quad, rho.cutoff())?;
    quad.integrate(1.0, |a| (-s * a.norm_sqr()).exp() * char_fn(rho, a, s).norm_sqr() / PI)
}

/// Purity of `ρ_T` from the characteristic function of `ρ₁`:
/// `∫ (d²α/π) (e^{-|α|²/T}/T) |e^{(1-s)|α|²/2} χ_{ρ₁}(α,s)|²`.
pub fn purity_lossy_from_chi(rho1: &DensityOperator, t: f64, s: f64, quad: &Quadrature2D) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::NonPhysicalTransmission(t));
    }
    check_quadrature(quad, rho1.cutoff())?;
    let mut min_integrand = f64::INFINITY;
    let v = quad.integrate(1.0 / t, |a| {
        let u = a.norm_sqr();
        let g = (-u / t).exp() / t * ((0.5 * (1.0 - s) * u).exp() * char_fn(rho1, a, s)).norm_sqr() / PI;
        min_integrand = min_integrand.min(g);
        g
    })?;
    if min_integrand < 0.0 {
        return Err(Error::Accuracy(format!("negative integrand {min_integrand}")));
    }
    Ok(v)
}

/// `|χ̄(τ)|² = (1/2π) ∫ dθ |χ(√τ e^{iθ}, 1)|²`, trapezoid in θ.
pub fn phase_averaged_chi_sq(rho: &DensityOperator, tau: f64, n_theta: usize) -> f64 {
    let r = tau.max(0.0).sqrt();
    let n = n_theta.max(1);
    (0..n)
        .map(|j| char_fn(rho, C64::from_polar(r, 2.0 * PI * j as f64 / n as f64), 1.0).norm_sqr())
        .collect::<KahanSum>()
        .value()
        / n as f64
}

/// `P(ρ_T) = (1/T) ∫_0^∞ dτ e^{-τ/T} |χ̄_{ρ₁}(τ)|²`.
pub fn laplace_purity(rho1: &DensityOperator, t: f64, quad: &Quadrature2D) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::NonPhysicalTransmission(t));
    }
    check_quadrature(quad, rho1.cutoff())?;
    let rate = 1.0 / t;
    let v = quad.radial.integrate_decaying(rate, |tau| (-tau / t).exp() * phase_averaged_chi_sq(rho1, tau, quad.n_theta()));
    Ok(v / t)
}

/// `Tr[ρσ] = π ∫ d²α P_ρ(α,s) P_σ(α,-s)`, `|s| < 1`.
pub fn overlap_from_quasi(rho: &DensityOperator, sigma: &DensityOperator, s: f64, quad: &Quadrature2D) -> Result<f64> {
    if !(s.abs() < 1.0) {
        return Err(Error::UnsupportedOrder(s));
    }
    check_quadrature(quad, rho.cutoff().max(sigma.cutoff()))?;
    let rate = 4.0 / (1.0 - s * s);
    let mut err = None;
    let v = quad.integrate(rate, |a| match (quasi_prob(rho, a, s), quasi_prob(sigma, a, -s)) {
        (Ok(p), Ok(q)) => PI * p * q,
        (Err(e), _) | (_, Err(e)) => {
            err = Some(e);
            0.0
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// Compares `P_{ρ_T}(α,s)` with `(1/T) P_{ρ₁}(α/√T, (s+T-1)/T)`.
pub fn loss_identity_quasi(rho1: &DensityOperator, t: f64, alpha: C64, s: f64) -> Result<CheckReport> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::NonPhysicalTransmission(t));
    }
    let lhs = quasi_prob(&apply_loss(rho1, t)?, alpha, s)?;
    let rhs = quasi_prob(rho1, alpha / t.sqrt(), (s + t - 1.0) / t)? / t;
    Ok(CheckReport::eq("loss_identity_quasi", lhs, rhs, Regime::Exact)
        .with_tolerance(1e-8)
        .with_params(format!("T={t};alpha={}{:+}i;s={s}", alpha.re, alpha.im))
        .with_claim("loss rescales the s-ordered distribution"))
}

/// Compares `χ_{ρ_T}(α,s)` with `χ_{ρ₁}(√T α, (s+T-1)/T)`; the margin is the
/// negated modulus of the complex difference.
pub fn loss_identity_chi(rho1: &DensityOperator, t: f64, alpha: C64, s: f64) -> Result<CheckReport> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::NonPhysicalTransmission(t));
    }
    let lhs = char_fn(&apply_loss(rho1, t)?, alpha, s);
    let rhs = char_fn(rho1, alpha * t.sqrt(), (s + t - 1.0) / t);
    let dev = (lhs - rhs).norm();
    let mut r = CheckReport::le("loss_identity_chi", dev, 0.0, Regime::Exact).with_tolerance(1e-9);
    r.lhs = lhs.re;
    r.rhs = rhs.re;
    Ok(r.with_params(format!("T={t};alpha={}{:+}i;s={s}", alpha.re, alpha.im))
        .with_claim("loss rescales the characteristic function"))
}

/// Fourier-integral evaluation of `P(α,s)` by 2-D quadrature; independent of
/// the closed-form kernel.
pub fn quasi_prob_fourier(rho: &DensityOperator, alpha: C64, s: f64, quad: &Quadrature2D) -> Result<f64> {
    check_order(s)?;
    let rate = 0.5 * (1.0 - s);
    quad.integrate(rate, |b| {
        let phase = alpha * b.conj() - alpha.conj() * b;
        (char_fn(rho, b, s) * phase.exp()).re / (PI * PI)
    })
}

/// Closed-form kernel against Fourier quadrature at three seeded random points.
pub fn kernel_self_test(rho: &DensityOperator, s: f64, seed: u64) -> Result<CheckReport> {
    check_order(s)?;
    let quad = Quadrature2D::new(120.max(rho.cutoff() + 40), 256.max(4 * rho.cutoff()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut at = (0.0, 0.0);
    for _ in 0..3 {
        let alpha = C64::new(rng.random_range(-1.2..1.2), rng.random_range(-1.2..1.2));
        let closed = quasi_prob(rho, alpha, s)?;
        let direct = quasi_prob_fourier(rho, alpha, s, &quad)?;
        if (closed - direct).abs() >= worst {
            worst = (closed - direct).abs();
            at = (closed, direct);
        }
    }
    let mut r = CheckReport::le("kernel_self_test", worst, 0.0, Regime::Quadrature).with_tolerance(1e-7);
    r.lhs = at.0;
    r.rhs = at.1;
    r.margin = -worst;
    r.pass = worst <= 1e-7;
    Ok(r.with_params(format!("s={s};seed={seed}")).with_claim("closed-form kernel matches the Fourier definition"))
}

/// Values of a quasiprobability on a square grid, stored row-major with the
/// real-part index outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiProbGrid {
    pub s: f64,
    pub center: C64,
    pub half_width: f64,
    pub points: usize,
    pub values: Vec<f64>,
}

/// Default half width `6 + √n_max`.
pub fn default_half_width(max_photons: usize) -> f64 {
    6.0 + (max_photons as f64).sqrt()
}

impl QuasiProbGrid {
    pub fn from_fn(s: f64, center: C64, half_width: f64, points: usize, mut f: impl FnMut(C64) -> Result<f64>) -> Result<Self> {
        if points < 2 || !(half_width > 0.0) {
            return Err(Error::InvalidParameter("grid needs at least 2 points and positive width".into()));
        }
        let mut g = Self { s, center, half_width, points, values: Vec::with_capacity(points * points) };
        for i in 0..points {
            for j in 0..points {
                let a = g.alpha(i, j);
                g.values.push(f(a)?);
            }
        }
        Ok(g)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    pub fn alpha(&self, i: usize, j: usize) -> C64 {
        self.center + C64::new(self.coordinate(i), self.coordinate(j))
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.points + j]
    }

    /// Riemann estimate of `∫ P dA`.
    pub fn normalization(&self) -> f64 {
        self.values.iter().copied().collect::<KahanSum>().value() * self.spacing().powi(2)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// CSV export: a `# s=…,T=…,state=…` line, the header, then one row per point.
    pub fn write_csv<W: Write>(&self, mut out: W, t: Option<f64>, state: &str) -> Result<()> {
        let io = |e: std::io::Error| Error::InvalidParameter(format!("write failed: {e}"));
        let t_text = t.map_or("none".to_string(), fmt_f64);
        writeln!(out, "# s={} T={} state={}", fmt_f64(self.s), t_text, state).map_err(io)?;
        writeln!(out, "re_alpha,im_alpha,value").map_err(io)?;
        for i in 0..self.points {
            for j in 0..self.points {
                let a = self.alpha(i, j);
                writeln!(out, "{},{},{}", fmt_f64(a.re), fmt_f64(a.im), fmt_f64(self.value(i, j))).map_err(io)?;
            }
        }
        Ok(())
    }
}

/// Evaluates `P(·, s)` of `ρ` on a grid.
pub fn quasi_grid(rho: &DensityOperator, s: f64, center: C64, half_width: f64, points: usize) -> Result<QuasiProbGrid> {
    check_order(s)?;
    QuasiProbGrid::from_fn(s, center, half_width, points, |a| quasi_prob(rho, a, s))
}

/// Discrete separable convolution of grid data with the 1-D kernel `g`,
/// applied along both axes. Points outside the grid count as zero.
pub(crate) fn separable_convolve(values: &[f64], n: usize, h: f64, g: impl Fn(f64) -> f64) -> Vec<f64> {
    let taps: Vec<f64> = (0..n).map(|d| g(d as f64 * h) * h).collect();
    convolve_taps(values, n, &taps, &taps)
}

/// Same as [`separable_convolve`] with different kernels along the real
/// (`gx`) and imaginary (`gy`) axes. Both must be even functions.
pub(crate) fn separable_convolve_xy(values: &[f64], n: usize, h: f64, gx: impl Fn(f64) -> f64, gy: impl Fn(f64) -> f64) -> Vec<f64> {
    let tx: Vec<f64> = (0..n).map(|d| gx(d as f64 * h) * h).collect();
    let ty: Vec<f64> = (0..n).map(|d| gy(d as f64 * h) * h).collect();
    convolve_taps(values, n, &tx, &ty)
}

fn convolve_taps(values: &[f64], n: usize, tx: &[f64], ty: &[f64]) -> Vec<f64> {
    let mut tmp = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let w = tx[i.abs_diff(k)];
            if w == 0.0 {
                continue;
            }
            for j in 0..n {
                tmp[i * n + j] += w * values[k * n + j];
            }
        }
    }
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += ty[j.abs_diff(k)] * tmp[i * n + k];
            }
            out[i * n + j] = acc;
        }
    }
    out
}

/// Moves a grid from order `s` to `s + Δs`, `Δs < 0`, by convolving with
/// `(2/(π|Δs|)) e^{2|α-β|²/Δs}`.
pub fn convolve_quasi(grid: &QuasiProbGrid, delta_s: f64) -> Result<QuasiProbGrid> {
    if !(delta_s < 0.0) {
        return Err(Error::UnsupportedOrder(grid.s + delta_s));
    }
    let width = -delta_s;
    let norm = (2.0 / (PI * width)).sqrt();
    let values = separable_convolve(&grid.values, grid.points, grid.spacing(), |d| norm * (-2.0 * d * d / width).exp());
    Ok(QuasiProbGrid { s: grid.s + delta_s, values, ..grid.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{make_coherent, make_fock, random_mixed};
    use crate::purity::purity;

    fn fock(n: usize, cutoff: usize) -> DensityOperator {
        make_fock(n, cutoff).unwrap().to_density()
    }

    #[test]
    fn quadrature_self_test() {
        let q = Quadrature2D::default();
        let v = q.integrate(1.0, |a| (-a.norm_sqr()).exp() / PI).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
        assert!(q.integrate(0.1, |_| 1.0).is_err());
    }

    #[test]
    fn char_fn_examples() {
        let vac = fock(0, 3);
        let one = fock(1, 3);
        for a in [C64::new(0.3, 0.4), C64::new(-1.1, 0.2)] {
            assert!((char_fn(&vac, a, 1.0) - C64::new(1.0, 0.0)).norm() < 1e-14);
            let u = a.norm_sqr();
            assert!((char_fn(&one, a, 0.0).re - (1.0 - u) * (-0.5 * u).exp()).abs() < 1e-14);
        }
        let rho = random_mixed(2, 5, 3).unwrap();
        assert!((char_fn(&rho, C64::default(), 0.3) - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn kernel_closed_form_matches_truncated_product() {
        let alpha = C64::new(0.4, -0.7);
        let cutoff = 6;
        let big = 80;
        let d = displacement_matrix(alpha, big);
        for s in [-1.0, -0.6, 0.0, 0.4] {
            let y: f64 = (s + 1.0) / (s - 1.0);
            let k = quasi_kernel_matrix(alpha, s, cutoff).unwrap();
            for m in 0..cutoff {
                for n in 0..cutoff {
                    let sum: C64 = (0..big).map(|j| d[(m, j)] * d[(n, j)].conj() * y.powi(j as i32)).sum();
                    let expect = sum * (2.0 / (PI * (1.0 - s)));
                    assert!((k[(m, n)] - expect).norm() < 1e-12, "s={s} m={m} n={n}");
                }
            }
        }
        assert!(quasi_kernel_matrix(alpha, 1.0, 3).is_err());
    }

    #[test]
    fn pointwise_examples() {
        for t in [0.2, 0.5, 0.75] {
            let w = quasi_prob(&apply_loss(&fock(1, 2), t).unwrap(), C64::default(), 0.0).unwrap();
            assert!((w - 2.0 / PI * (1.0 - 2.0 * t)).abs() < 1e-14);
        }
        assert!((quasi_prob(&fock(0, 1), C64::default(), -1.0).unwrap() - 1.0 / PI).abs() < 1e-15);
        let rho = random_mixed(5, 5, 2).unwrap();
        let a = C64::new(0.5, -0.3);
        assert!((quasi_prob(&rho, a, 0.0).unwrap() - wigner_parity(&rho, a, 40)).abs() < 1e-12);
        assert!((quasi_prob(&rho, a, -1.0).unwrap() - husimi_direct(&rho, a)).abs() < 1e-12);
    }

    #[test]
    fn fourier_self_test() {
        let rho = random_mixed(8, 4, 2).unwrap();
        for s in [-1.0, -0.5, 0.0, 0.5] {
            let r = kernel_self_test(&rho, s, 3).unwrap();
            assert!(r.pass, "s={s}: {r:?}");
        }
    }

    #[test]
    fn grid_normalization_and_positivity() {
        let rho = fock(3, 4);
        for s in [-1.0, 0.0] {
            let g = quasi_grid(&rho, s, C64::default(), 6.0, 121).unwrap();
            assert!((g.normalization() - 1.0).abs() < 1e-6, "s={s}");
        }
        let h = quasi_grid(&random_mixed(1, 5, 3).unwrap(), -1.0, C64::default(), 5.0, 41).unwrap();
        assert!(h.min() >= -1e-9);
    }

    #[test]
    fn loss_identities() {
        let one = fock(1, 2);
        assert!(loss_identity_quasi(&one, 0.5, C64::new(0.3, 0.0), 0.0).unwrap().pass);
        let rho = random_mixed(3, 6, 3).unwrap();
        for a in [C64::new(0.2, 0.5), C64::new(-0.7, 0.1)] {
            assert!(loss_identity_quasi(&rho, 0.7, a, -1.0).unwrap().pass);
            assert!(loss_identity_chi(&rho, 0.7, a, 0.2).unwrap().pass);
        }
        assert!(loss_identity_chi(&one, 0.5, C64::new(0.4, 0.0), 0.0).unwrap().lhs.is_finite());
        let coh = make_coherent(C64::new(1.0, 0.0), 30).unwrap().to_density();
        assert!(loss_identity_chi(&coh, 0.36, C64::new(0.2, 0.0), 1.0).unwrap().pass);
    }

    #[test]
    fn convolution_examples() {
        let (hw, n) = (6.0, 201);
        let w = quasi_grid(&fock(0, 1), 0.0, C64::default(), hw, n).unwrap();
        let q = convolve_quasi(&w, -1.0).unwrap();
        assert_eq!(q.s, -1.0);
        let direct = quasi_grid(&fock(0, 1), -1.0, C64::default(), hw, n).unwrap();
        let err = q.values.iter().zip(&direct.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-6, "err {err}");
        let w1 = quasi_grid(&fock(1, 2), 0.0, C64::default(), hw, n).unwrap();
        let q1 = convolve_quasi(&w1, -1.0).unwrap();
        for i in (40..160).step_by(7) {
            for j in (40..160).step_by(11) {
                let a = q1.alpha(i, j);
                let u = a.norm_sqr();
                assert!((q1.value(i, j) - u * (-u).exp() / PI).abs() < 1e-5);
            }
        }
        assert!(convolve_quasi(&w, 0.5).is_err());
    }

    #[test]
    fn purity_routes() {
        let q = Quadrature2D::default();
        assert!((purity_from_chi(&fock(0, 1), 1.0, &q).unwrap() - 1.0).abs() < 1e-10);
        let half = apply_loss(&fock(1, 2), 0.5).unwrap();
        assert!((purity_from_chi(&half, 1.0, &q).unwrap() - 0.5).abs() < 1e-6);
        assert!((purity_from_chi(&fock(2, 3), 0.0, &q).unwrap() - 1.0).abs() < 1e-6);
        assert!((purity_lossy_from_chi(&fock(1, 2), 0.3, 1.0, &q).unwrap() - 0.58).abs() < 1e-6);
        assert!((purity_lossy_from_chi(&fock(2, 3), 0.5, 1.0, &q).unwrap() - 0.375).abs() < 1e-6);
        assert!((laplace_purity(&fock(0, 1), 0.4, &q).unwrap() - 1.0).abs() < 1e-10);
        assert!((laplace_purity(&fock(1, 2), 1.0, &q).unwrap() - 1.0).abs() < 1e-6);
        assert!((laplace_purity(&fock(1, 2), 0.25, &q).unwrap() - 0.625).abs() < 1e-6);
        let rho = random_mixed(6, 5, 2).unwrap();
        let p = purity(&rho);
        assert!((overlap_from_quasi(&rho, &rho, 0.0, &q).unwrap() - p).abs() < 1e-5);
        assert!(overlap_from_quasi(&fock(0, 2), &fock(1, 2), 0.0, &q).unwrap().abs() < 1e-6);
        assert!(overlap_from_quasi(&rho, &rho, 1.0, &q).is_err());
    }

    #[test]
    fn csv_export() {
        let g = quasi_grid(&fock(0, 1), 0.0, C64::default(), 1.0, 3).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf, Some(0.5), "fock:0").unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# s=0e0 T=5e-1 state=fock:0");
        assert_eq!(lines[1], "re_alpha,im_alpha,value");
        assert_eq!(lines.len(), 11);
        assert!(lines[2].starts_with("-1e0,-1e0,"));
    }
}
