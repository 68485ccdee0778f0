//! Numerical verifiers for the ladder-operator, quasiprobability, Bernstein and
//! monotonicity inequalities satisfied by purity under loss.
//!
//! Every check returns [`CheckReport`]s; none of them panics on a failed
//! claim. Exact checks work on the purity polynomial or on traces at the
//! state's own cutoff, where the ladder-operator products used here are not
//! affected by truncation. Phase-space checks integrate on grids.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fock::{DensityOperator, ModeOperators, PureState, C64};
use crate::loss::apply_loss;
use crate::phase_space::{husimi_direct, quasi_prob, separable_convolve_xy, QuasiProbGrid, Quadrature2D};
use crate::purity::{ladder_traces, lossy_purity, overlap_polynomial, purity, purity_derivative_generator, purity_polynomial, PurityPolynomial};
use crate::report::{CheckReport, Regime};
use crate::special::KahanSum;

/// Tolerance for the second-derivative forms.
pub const SECOND_DERIVATIVE_TOL: f64 = 1e-9;
/// Agreement required between a direct phase-space integral and its exact value.
pub const INTEGRAL_TOL: f64 = 1e-4;
/// Sign tolerance for the general-order double integral.
pub const GENERAL_ORDER_TOL: f64 = 1e-5;
/// Half width of the excluded window around `T = 1/2` for the Husimi-pair check.
pub const HUSIMI_EXCLUSION: f64 = 0.02;

fn t_param(t: f64) -> String {
    format!("T={t}")
}

fn is_pure(rho: &DensityOperator) -> bool {
    (purity(rho) - 1.0).abs() < 1e-10
}

/// `|Tr[ρa]|² ≤ Tr[ρ a†a]`.
pub fn cauchy_schwarz_ladder(rho: &DensityOperator) -> CheckReport {
    let ops = ModeOperators::new(rho.cutoff());
    let mean_a = rho.expectation(&ops.a);
    CheckReport::le("cauchy_schwarz_ladder", mean_a.norm_sqr(), rho.mean_photon_number(), Regime::Exact)
        .with_claim("|<a>|^2 <= <N>")
}

/// `Tr[N ρ_T²] ≤ Tr[a ρ_T a† ρ_T]` for `T ≤ 1/2`.
pub fn corollary_loss_ladder(rho1: &DensityOperator, t: f64) -> Result<CheckReport> {
    if !(0.0..=0.5).contains(&t) {
        return Err(Error::InvalidParameter(format!("loss-ladder inequality needs 0 <= T <= 1/2, got {t}")));
    }
    let (n_term, a_term) = ladder_traces(&apply_loss(rho1, t)?);
    Ok(CheckReport::le("corollary_loss_ladder", n_term, a_term, Regime::Exact)
        .with_params(t_param(t))
        .with_claim("Tr[N rho_T^2] <= Tr[a rho_T a^dag rho_T] for T <= 1/2"))
}

fn pure_unit_interval(t: f64, lo_open: bool) -> Result<()> {
    let ok = if lo_open { t > 0.0 && t < 1.0 } else { (0.0..=1.0).contains(&t) };
    if ok {
        Ok(())
    } else {
        Err(Error::NonPhysicalTransmission(t))
    }
}

/// `Tr[N ρ_T²]/T ≤ Tr[N ρ_{1-T}²]/(1-T)` for pure inputs, `0 < T ≤ 1/2`.
pub fn corollary_pure_ratio(psi: &PureState, t: f64) -> Result<CheckReport> {
    if !(t > 0.0 && t <= 0.5) {
        return Err(Error::InvalidParameter(format!("pure-ratio inequality needs 0 < T <= 1/2, got {t}")));
    }
    let rho = psi.to_density();
    let (n_t, _) = ladder_traces(&apply_loss(&rho, t)?);
    let (n_c, _) = ladder_traces(&apply_loss(&rho, 1.0 - t)?);
    Ok(CheckReport::le("corollary_pure_ratio", n_t / t, n_c / (1.0 - t), Regime::Exact)
        .with_params(t_param(t))
        .with_claim("Tr[N rho_T^2]/T <= Tr[N rho_{1-T}^2]/(1-T), pure input"))
}

/// `Tr[a ρ_T a† ρ_T] = Tr[N ρ_{1-T}²] T/(1-T)` for pure inputs.
pub fn transpose_trick_identity(psi: &PureState, t: f64) -> Result<CheckReport> {
    pure_unit_interval(t, true)?;
    let rho = psi.to_density();
    let (_, a_t) = ladder_traces(&apply_loss(&rho, t)?);
    let (n_c, _) = ladder_traces(&apply_loss(&rho, 1.0 - t)?);
    Ok(CheckReport::eq("transpose_trick_identity", a_t, n_c * t / (1.0 - t), Regime::Exact)
        .with_params(t_param(t))
        .with_claim("Tr[a rho_T a^dag rho_T] = Tr[N rho_{1-T}^2] T/(1-T), pure input"))
}

/// `4 Re(⟨a†a²⟩⟨a†⟩) - |⟨a²⟩|² ≤ 2⟨N⟩² - ⟨N⟩ + ⟨N²⟩` for pure states.
pub fn pure_second_order_inequality(psi: &PureState) -> CheckReport {
    let rho = psi.to_density();
    let ops = ModeOperators::new(rho.cutoff());
    let a2 = &ops.a * &ops.a;
    let adag_a2 = &ops.adag * &a2;
    let n = rho.mean_photon_number();
    let n2 = rho.expectation(&(&ops.number * &ops.number)).re;
    let lhs = 4.0 * (rho.expectation(&adag_a2) * rho.expectation(&ops.adag)).re - rho.expectation(&a2).norm_sqr();
    let rhs = 2.0 * n * n - n + n2;
    CheckReport::le("pure_second_order_inequality", lhs, rhs, Regime::Exact)
        .with_claim("4Re<a^dag a^2><a^dag> - |<a^2>|^2 <= 2<N>^2 - <N> + <N^2>, pure input")
}

/// Pieces of the second derivative of purity, all evaluated on one state `ρ`.
struct SecondOrderTraces {
    n_rho_sq: f64,
    a_rho_adag_sq: f64,
    n_rho_abs_sq: f64,
    re_rho_n_a_rho_adag: f64,
    cross: f64,
}

fn second_order_traces(rho: &DensityOperator) -> SecondOrderTraces {
    let ops = ModeOperators::new(rho.cutoff());
    let m = rho.matrix();
    let a_rho_adag = &ops.a * m * &ops.adag;
    let adag_rho_a = &ops.adag * m * &ops.a;
    let n_rho = &ops.number * m;
    let tr = |x: nalgebra::DMatrix<C64>| x.trace().re;
    SecondOrderTraces {
        n_rho_sq: tr(&n_rho * m),
        a_rho_adag_sq: tr(&a_rho_adag * &a_rho_adag),
        n_rho_abs_sq: tr(n_rho.adjoint() * &n_rho),
        re_rho_n_a_rho_adag: tr(m * &ops.number * &a_rho_adag),
        cross: tr(&a_rho_adag * &adag_rho_a),
    }
}

/// The three displayed forms of `d²P/dT²` next to the polynomial value.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondDerivativeForms {
    pub t: f64,
    /// Valid for every input.
    pub general: f64,
    /// Forms relying on the transpose trick; `None` for mixed inputs.
    pub split_cross: Option<f64>,
    pub split_number: Option<f64>,
    pub polynomial: f64,
    pub pure_input: bool,
}

/// Evaluates the second-derivative forms at `T ∈ (0,1)`.
pub fn second_derivative_forms(rho1: &DensityOperator, t: f64) -> Result<SecondDerivativeForms> {
    pure_unit_interval(t, true)?;
    let pure_input = is_pure(rho1);
    let x = second_order_traces(&apply_loss(rho1, t)?);
    let w = 2.0 / (t * t);
    let general = w
        * (-x.n_rho_sq + 2.0 * x.a_rho_adag_sq + x.n_rho_abs_sq - 4.0 * x.re_rho_n_a_rho_adag + x.cross);
    let (split_cross, split_number) = if pure_input {
        let y = second_order_traces(&apply_loss(rho1, 1.0 - t)?);
        let wc = 2.0 / ((1.0 - t) * (1.0 - t));
        let cross = |z: &SecondOrderTraces| z.a_rho_adag_sq + z.cross - 2.0 * z.re_rho_n_a_rho_adag;
        let number = |z: &SecondOrderTraces| -z.n_rho_sq + z.a_rho_adag_sq + z.n_rho_abs_sq - 2.0 * z.re_rho_n_a_rho_adag;
        (Some(w * cross(&x) + wc * cross(&y)), Some(w * number(&x) + wc * number(&y)))
    } else {
        (None, None)
    };
    Ok(SecondDerivativeForms {
        t,
        general,
        split_cross,
        split_number,
        polynomial: purity_polynomial(rho1).derivative(t, 2),
        pure_input,
    })
}

/// Agreement of every applicable form with the polynomial, plus the sign
/// claim where it is proven (pure inputs at any `T`, mixed at `T ≤ 1/2`).
pub fn appendix_c_second_derivative(rho1: &DensityOperator, t: f64) -> Result<Vec<CheckReport>> {
    let f = second_derivative_forms(rho1, t)?;
    let p = t_param(t);
    let agree = |name: &str, v: f64| {
        CheckReport::eq(name, v, f.polynomial, Regime::Exact)
            .with_tolerance(SECOND_DERIVATIVE_TOL)
            .with_params(p.clone())
            .with_claim("form equals exact second derivative of purity")
    };
    let mut out = vec![agree("second_derivative_general_form", f.general)];
    if let Some(v) = f.split_cross {
        out.push(agree("second_derivative_cross_form", v));
    }
    if let Some(v) = f.split_number {
        out.push(agree("second_derivative_number_form", v));
    }
    if f.pure_input || t <= 0.5 {
        out.push(
            CheckReport::ge("second_derivative_sign", f.general, 0.0, Regime::Exact)
                .with_tolerance(SECOND_DERIVATIVE_TOL)
                .with_params(p)
                .with_claim("d^2P/dT^2 >= 0"),
        );
    }
    Ok(out)
}

/// `dP/dT` by the loss generator, the exact polynomial and a central
/// difference of step `h = 1e-4`; reports the largest pairwise gap.
pub fn derivative_route_consistency(rho1: &DensityOperator, t: f64) -> Result<CheckReport> {
    let h = 1e-4;
    if !(t - h >= 0.0 && t + h <= 1.0) {
        return Err(Error::InvalidParameter(format!("T={t} too close to the ends for a central difference")));
    }
    let generator = purity_derivative_generator(rho1, t)?;
    let poly = purity_polynomial(rho1).derivative(t, 1);
    let fd = (lossy_purity(rho1, t + h)? - lossy_purity(rho1, t - h)?) / (2.0 * h);
    let gap = (generator - poly).abs().max((fd - poly).abs()).max((fd - generator).abs());
    Ok(CheckReport::le("derivative_route_consistency", gap, 0.0, Regime::FiniteDifference)
        .with_tolerance(1e-6)
        .with_params(t_param(t))
        .with_claim("generator, polynomial and finite-difference dP/dT agree"))
}

/// A Glauber–Sudarshan function that is an honest density.
#[derive(Debug, Clone, PartialEq)]
pub enum RegularP {
    /// `Σ w_i δ²(α - α_i)`: a mixture of coherent states.
    Points(Vec<(f64, C64)>),
    /// `e^{-|α|²/n̄}/(π n̄)`.
    Thermal { mean: f64 },
}

impl RegularP {
    /// Truncated density operator with this P function.
    pub fn density(&self, cutoff: usize) -> Result<DensityOperator> {
        match self {
            RegularP::Points(c) => DensityOperator::coherent_mixture(c, cutoff),
            RegularP::Thermal { mean } => DensityOperator::thermal(*mean, cutoff),
        }
    }

    /// `(-1)^k ∬ P(α)P(β)|α-β|^{2k} e^{-T|α-β|²}`, the `k`-th derivative of purity.
    pub fn purity_derivative_integral(&self, t: f64, k: usize, quad: &Quadrature2D) -> Result<f64> {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let kernel = |u: f64| u.powi(k as i32) * (-t * u).exp();
        let v = match self {
            RegularP::Points(c) => {
                let total: f64 = c.iter().map(|p| p.0).sum();
                let mut acc = KahanSum::default();
                for (wi, ai) in c {
                    for (wj, aj) in c {
                        acc.add(wi * wj * kernel((ai - aj).norm_sqr()));
                    }
                }
                acc.value() / (total * total)
            }
            RegularP::Thermal { mean } => {
                // α - β is Gaussian with variance 2n̄.
                let var = 2.0 * mean;
                let rate = 1.0 / var + t;
                if !(rate > 0.0) {
                    return Err(Error::InvalidParameter(format!("integral diverges at T={t}")));
                }
                quad.integrate(rate, |g| {
                    let u = g.norm_sqr();
                    (-u / var).exp() / (PI * var) * kernel(u)
                })?
            }
        };
        Ok(sign * v)
    }
}

/// Operator-side `d^k P/dT^k` against the direct double integral over a regular P.
pub fn quasi_derivative_identity(p: &RegularP, cutoff: usize, t: f64, k: usize, quad: &Quadrature2D) -> Result<CheckReport> {
    let rho = p.density(cutoff)?;
    let operator = purity_polynomial(&rho).derivative(t, k);
    let direct = p.purity_derivative_integral(t, k, quad)?;
    Ok(CheckReport::eq("quasi_derivative_identity", operator, direct, Regime::Quadrature)
        .with_tolerance(INTEGRAL_TOL)
        .with_params(format!("T={t},k={k}"))
        .with_claim("d^kP/dT^k = (-1)^k int P P |a-b|^2k e^{-T|a-b|^2}"))
}

/// Sign claims on `(-1)^k d^kP/dT^k` from the operator side.
///
/// Pure inputs: nonnegative for all real `T` when `k` is even; for odd `k`
/// nonnegative below `1/2`, zero at `1/2`, nonpositive above. Mixed inputs:
/// nonnegative for `T ≤ 1/2`; no claim above (error).
pub fn quasi_derivative_sign(rho1: &DensityOperator, t: f64, k: usize) -> Result<CheckReport> {
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let v = sign * purity_polynomial(rho1).derivative(t, k);
    let pure = is_pure(rho1);
    let name = "quasi_derivative_sign";
    let report = if pure && k % 2 == 0 || t < 0.5 {
        CheckReport::ge(name, v, 0.0, Regime::Exact)
    } else if pure && t == 0.5 {
        CheckReport::eq(name, v, 0.0, Regime::Exact)
    } else if pure {
        CheckReport::le(name, v, 0.0, Regime::Exact)
    } else if t == 0.5 {
        CheckReport::ge(name, v, 0.0, Regime::Exact)
    } else {
        return Err(Error::InvalidParameter(format!("no sign claim for mixed input at T={t}")));
    };
    Ok(report
        .with_tolerance(SECOND_DERIVATIVE_TOL)
        .with_params(format!("T={t},k={k}"))
        .with_claim("sign of (-1)^k d^kP/dT^k"))
}

/// `P^{(k)}(T) = (-1)^k P^{(k)}(1-T)` for pure inputs.
pub fn quasi_derivative_symmetry(psi: &PureState, t: f64, k: usize) -> CheckReport {
    let poly = purity_polynomial(&psi.to_density());
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    CheckReport::eq("quasi_derivative_symmetry", poly.derivative(t, k), sign * poly.derivative(1.0 - t, k), Regime::Exact)
        .with_tolerance(SECOND_DERIVATIVE_TOL)
        .with_params(format!("T={t},k={k}"))
        .with_claim("P^(k)(T) = (-1)^k P^(k)(1-T), pure input")
}

fn same_geometry(p: &QuasiProbGrid, q: &QuasiProbGrid) -> Result<()> {
    if p.points != q.points || p.half_width != q.half_width || p.center != q.center {
        return Err(Error::InvalidParameter("grids must share center, width and size".into()));
    }
    Ok(())
}

/// `∬ p(α) q(β) (a + b|α-β|²) e^{-c|α-β|²}` on two grids of equal geometry,
/// by separable convolution of `q` followed by a Riemann sum against `p`.
/// `c = 0` is allowed: the grid is finite, so the polynomial kernel is too.
pub fn pair_kernel_integral(p: &QuasiProbGrid, q: &QuasiProbGrid, a: f64, b: f64, c: f64) -> Result<f64> {
    same_geometry(p, q)?;
    if !(c >= 0.0) {
        return Err(Error::InvalidParameter(format!("kernel rate {c} must be nonnegative")));
    }
    let n = p.points;
    let h = p.spacing();
    let gauss = |d: f64| (-c * d * d).exp();
    let quad = |d: f64| d * d * (-c * d * d).exp();
    let base = separable_convolve_xy(&q.values, n, h, gauss, gauss);
    let (qx, qy) = if b != 0.0 {
        (separable_convolve_xy(&q.values, n, h, quad, gauss), separable_convolve_xy(&q.values, n, h, gauss, quad))
    } else {
        (vec![0.0; n * n], vec![0.0; n * n])
    };
    let mut acc = KahanSum::default();
    for i in 0..n * n {
        acc.add(p.values[i] * (a * base[i] + b * (qx[i] + qy[i])));
    }
    Ok(acc.value() * h * h)
}

fn husimi_window(t: f64) -> Result<()> {
    if !(t >= 0.0 && t < 0.5 - HUSIMI_EXCLUSION) {
        return Err(Error::InvalidParameter(format!(
            "Husimi-pair check needs 0 <= T < {} (window around 1/2 excluded), got {t}",
            0.5 - HUSIMI_EXCLUSION
        )));
    }
    Ok(())
}

/// The Husimi-pair double integral, which equals `dTr[ρ_T σ_T]/dT` when the
/// inputs are Husimi functions of states.
pub fn husimi_pair_integral(q_rho: &QuasiProbGrid, q_sigma: &QuasiProbGrid, t: f64) -> Result<f64> {
    husimi_window(t)?;
    let l = 1.0 - 2.0 * t;
    pair_kernel_integral(q_rho, q_sigma, 2.0 / (l * l), -1.0 / (l * l * l), t / l)
}

/// Claim: the Husimi-pair integral is `≤ 0` for `T < 1/2`.
pub fn husimi_pair_check(q_rho: &QuasiProbGrid, q_sigma: &QuasiProbGrid, t: f64) -> Result<CheckReport> {
    let v = husimi_pair_integral(q_rho, q_sigma, t)?;
    Ok(CheckReport::le("husimi_pair_check", v, 0.0, Regime::Quadrature)
        .with_params(t_param(t))
        .with_claim("Husimi-pair integral <= 0 for T < 1/2"))
}

/// Samples two candidate functions on a common grid and runs the check.
pub fn husimi_pair_check_fn(
    f: impl Fn(C64) -> f64,
    g: impl Fn(C64) -> f64,
    t: f64,
    half_width: f64,
    points: usize,
) -> Result<CheckReport> {
    let (p, q) = sample_pair(f, g, half_width, points)?;
    husimi_pair_check(&p, &q, t)
}

fn sample_pair(f: impl Fn(C64) -> f64, g: impl Fn(C64) -> f64, half_width: f64, points: usize) -> Result<(QuasiProbGrid, QuasiProbGrid)> {
    let z = C64::default();
    let p = QuasiProbGrid::from_fn(-1.0, z, half_width, points, |a| Ok(f(a)))?;
    let q = QuasiProbGrid::from_fn(-1.0, z, half_width, points, |a| Ok(g(a)))?;
    Ok((p, q))
}

/// Runs the check at every `T` in `ts` on pre-sampled grids.
pub fn husimi_pair_scan(q_rho: &QuasiProbGrid, q_sigma: &QuasiProbGrid, ts: &[f64]) -> Result<Vec<CheckReport>> {
    ts.iter().map(|&t| husimi_pair_check(q_rho, q_sigma, t)).collect()
}

/// Husimi functions of two states: the sign claim plus a cross-check of the
/// integral against the exact overlap-polynomial derivative.
pub fn husimi_pair_check_states(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    t: f64,
    half_width: f64,
    points: usize,
) -> Result<Vec<CheckReport>> {
    let (p, q) = sample_pair(|a| husimi_direct(rho, a), |a| husimi_direct(sigma, a), half_width, points)?;
    let sign = husimi_pair_check(&p, &q, t)?;
    let exact = overlap_polynomial(rho, sigma).derivative(t, 1);
    let cross = CheckReport::eq("husimi_pair_cross_check", sign.lhs, exact, Regime::Quadrature)
        .with_tolerance(INTEGRAL_TOL)
        .with_params(t_param(t))
        .with_claim("Husimi-pair integral equals dTr[rho_T sigma_T]/dT");
    Ok(vec![sign, cross])
}

/// Normalised isotropic Gaussian `e^{-|α|²/v}/(π v)`; `v = 1` is the vacuum Husimi function.
pub fn gaussian_husimi(variance: f64) -> impl Fn(C64) -> f64 {
    move |a| (-a.norm_sqr() / variance).exp() / (PI * variance)
}

/// Exact Husimi-pair integral for two centred Gaussians of variances `v1`, `v2`:
/// the derivative of `1/(1 + T(v1 + v2 - 2))`.
pub fn gaussian_pair_derivative(v1: f64, v2: f64, t: f64) -> f64 {
    let g = v1 + v2 - 2.0;
    -g / (1.0 + t * g).powi(2)
}

/// Parameters of the general-order kernel.
fn general_order_setup(r: f64, r_prime: f64, t: f64) -> Result<(f64, f64)> {
    let rt = r + r_prime - 2.0;
    if !(t > 0.0 && t <= 0.5) {
        return Err(Error::InvalidParameter(format!("general-order check needs 0 < T <= 1/2, got {t}")));
    }
    if !(r < 1.0 && r_prime < 1.0) {
        return Err(Error::UnsupportedOrder(r.max(r_prime)));
    }
    let den = 2.0 + rt * t;
    if !(den > 0.0) {
        return Err(Error::InvalidParameter(format!("no admissible order: r+r'-2 = {rt} <= -2/T")));
    }
    Ok((rt, den))
}

/// Double integral of s-ordered functions at orders `r`, `r'` against the
/// loss-derivative kernel, which must be nonnegative for `T ≤ 1/2`; also the
/// overlap form, compared with `Tr[ρ_T σ_T]` when both orders are `≤ -1`.
pub fn general_r_check(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    r: f64,
    r_prime: f64,
    t: f64,
    half_width: f64,
    points: usize,
) -> Result<Vec<CheckReport>> {
    let (rt, den) = general_order_setup(r, r_prime, t)?;
    let z = C64::default();
    let p = QuasiProbGrid::from_fn(r, z, half_width, points, |a| quasi_prob(rho, a, r))?;
    let q = QuasiProbGrid::from_fn(r_prime, z, half_width, points, |a| quasi_prob(sigma, a, r_prime))?;
    let c = 2.0 * t / den;
    let d3 = den.powi(3);
    let deriv = pair_kernel_integral(&p, &q, (4.0 * rt + 2.0 * t * rt * rt) / d3, 8.0 / d3, c)?;
    let params = format!("T={t},r={r},r'={r_prime}");
    let mut out = vec![CheckReport::ge("general_r_check", deriv, 0.0, Regime::Quadrature)
        .with_tolerance(GENERAL_ORDER_TOL)
        .with_params(params.clone())
        .with_claim("general-order derivative integral >= 0 for T <= 1/2")];
    if r <= -1.0 && r_prime <= -1.0 {
        let overlap = pair_kernel_integral(&p, &q, 2.0 / den, 0.0, c)?;
        let exact = overlap_polynomial(rho, sigma).evaluate(t);
        out.push(
            CheckReport::eq("general_r_overlap", overlap, exact, Regime::Quadrature)
                .with_tolerance(INTEGRAL_TOL)
                .with_params(params)
                .with_claim("general-order overlap integral equals Tr[rho_T sigma_T]"),
        );
    }
    Ok(out)
}

/// Coefficients (ascending powers of `T`) of a small polynomial.
#[derive(Debug, Clone, PartialEq, Default)]
struct TPoly(Vec<f64>);

impl TPoly {
    fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    /// `T² p'(T)`.
    fn t2_derivative(&self) -> TPoly {
        let mut out = vec![0.0; self.0.len() + 1];
        for (j, c) in self.0.iter().enumerate().skip(1) {
            out[j + 1] += j as f64 * c;
        }
        TPoly(out)
    }

    /// `T² p(T)`.
    fn t2_times(&self) -> TPoly {
        let mut out = vec![0.0; 2];
        out.extend_from_slice(&self.0);
        TPoly(out)
    }

    fn add_assign(&mut self, other: &TPoly) {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), 0.0);
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }
}

/// `(T² d/dT)^k f = Σ_j c_j(T) f^{(j)}(T)`, returned as the list `c_0..c_k`.
fn bernstein_operator(k: usize) -> Vec<TPoly> {
    let mut coeffs = vec![TPoly(vec![1.0])];
    for _ in 0..k {
        let mut next = vec![TPoly::default(); coeffs.len() + 1];
        for (j, c) in coeffs.iter().enumerate() {
            next[j].add_assign(&c.t2_derivative());
            next[j + 1].add_assign(&c.t2_times());
        }
        coeffs = next;
    }
    coeffs
}

/// `(T² d/dT)^k (T P(T))` evaluated exactly from the purity polynomial.
pub fn bernstein_value(poly: &PurityPolynomial, t: f64, k: usize) -> f64 {
    let ops = bernstein_operator(k);
    // (T P)^{(j)} = T P^{(j)} + j P^{(j-1)}
    let f_j = |j: usize| t * poly.derivative(t, j) + if j > 0 { j as f64 * poly.derivative(t, j - 1) } else { 0.0 };
    ops.iter().enumerate().map(|(j, c)| c.eval(t) * f_j(j)).sum()
}

/// Complete monotonicity of `T P(T)` in `1/T`: for each `k ≤ k_max`, the
/// minimum of `(T² d/dT)^k (T P)` over `T ∈ {0.01, …, 1}` must be `≥ 0`.
pub fn bernstein_check(rho1: &DensityOperator, k_max: usize) -> Result<Vec<CheckReport>> {
    if k_max > 4 {
        return Err(Error::InvalidParameter(format!("Bernstein check supports k <= 4, got {k_max}")));
    }
    let poly = purity_polynomial(rho1);
    Ok((0..=k_max)
        .map(|k| {
            let (t_min, v_min) = (1..=100)
                .map(|i| {
                    let t = i as f64 / 100.0;
                    (t, bernstein_value(&poly, t, k))
                })
                .fold((f64::NAN, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
            CheckReport::ge("bernstein_check", v_min, 0.0, Regime::Exact)
                .with_tolerance(SECOND_DERIVATIVE_TOL)
                .with_params(format!("k={k},argmin_T={t_min}"))
                .with_claim("(T^2 d/dT)^k (T P) >= 0")
        })
        .collect())
}

/// `Tr[N ρ_T²]` nondecreasing and `Tr[a ρ_T a† ρ_T](1-T)/T` nonincreasing
/// along an ascending grid in `(0, 1]`. Two reports: smallest step of the
/// first quantity, largest step of the second.
pub fn number_purity_monotonicity(rho1: &DensityOperator, grid: &[f64]) -> Result<Vec<CheckReport>> {
    if grid.len() < 2 || grid.windows(2).any(|w| w[1] <= w[0]) || grid[0] <= 0.0 || grid[grid.len() - 1] > 1.0 {
        return Err(Error::InvalidParameter("monotonicity grid must ascend within (0, 1]".into()));
    }
    let mut first = Vec::with_capacity(grid.len());
    let mut second = Vec::with_capacity(grid.len());
    for &t in grid {
        let (n, a) = ladder_traces(&apply_loss(rho1, t)?);
        first.push(n);
        second.push(a * (1.0 - t) / t);
    }
    let min_step = first.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let max_step = second.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let params = format!("T={}..{},n={}", grid[0], grid[grid.len() - 1], grid.len());
    Ok(vec![
        CheckReport::ge("number_purity_nondecreasing", min_step, 0.0, Regime::Exact)
            .with_params(params.clone())
            .with_claim("Tr[N rho_T^2] nondecreasing in T"),
        CheckReport::le("ladder_ratio_nonincreasing", max_step, 0.0, Regime::Exact)
            .with_params(params)
            .with_claim("Tr[a rho_T a^dag rho_T](1-T)/T nonincreasing in T"),
    ])
}
