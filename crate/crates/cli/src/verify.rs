//! Check batteries behind `fockloss verify`.

use std::str::FromStr;

use fockloss::corpus::NamedState;
use fockloss::fock::C64;
use fockloss::inequalities::*;
use fockloss::loss::apply_loss;
use fockloss::phase_space::{
    default_half_width, laplace_purity, loss_identity_chi, loss_identity_quasi, overlap_from_quasi, purity_from_chi, purity_lossy_from_chi,
    quasi_grid, Quadrature2D,
};
use fockloss::purity::{
    lossy_purity, min_purity_pure, mutual_information_bs, pure_purity_polynomial, purity, purity_polynomial, renyi_entropy, von_neumann,
};
use fockloss::qcs::{qcs_commutator, qcs_kernel_form, qcs_lindblad, qcs_purity_rate, qcs_two_copy, QuadratureGrid};
use fockloss::report::{CheckReport, Regime};
use fockloss::Result;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Purity,
    Entropy,
    Qcs,
    PhaseSpace,
    Inequalities,
    All,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "purity" => Suite::Purity,
            "entropy" => Suite::Entropy,
            "qcs" => Suite::Qcs,
            "phasespace" | "phase-space" => Suite::PhaseSpace,
            "inequalities" => Suite::Inequalities,
            "all" => Suite::All,
            _ => return Err(format!("unknown suite '{s}' (purity, entropy, qcs, phasespace, inequalities, all)")),
        })
    }
}

pub struct VerifyInput<'a> {
    pub states: &'a [NamedState],
    pub grid: &'a [f64],
    pub orders: &'a [f64],
    pub quad: &'a Quadrature2D,
}

/// Every report of the chosen suite, in state order, then check order.
pub fn run(suite: Suite, input: &VerifyInput) -> Result<Vec<CheckReport>> {
    let per_state: Vec<Vec<CheckReport>> = input
        .states
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let mut out = Vec::new();
            let want = |x: Suite| suite == x || suite == Suite::All;
            if want(Suite::Purity) {
                out.extend(purity_suite(s, input.grid)?);
            }
            let physical = is_physical(s);
            if want(Suite::Entropy) && physical {
                out.extend(entropy_suite(s, input.grid)?);
            }
            if want(Suite::Qcs) && physical {
                out.extend(qcs_suite(s, input.grid)?);
            }
            if want(Suite::PhaseSpace) && physical {
                out.extend(phase_space_suite(s, input)?);
            }
            if want(Suite::Inequalities) && physical {
                let partner = &input.states[(i + 1) % input.states.len()];
                out.extend(inequality_suite(s, partner, i, input)?);
            }
            Ok(out.into_iter().map(|r| r.with_state(s.id.clone())).collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_state.into_iter().flatten().collect())
}

/// Statements about states only apply to positive operators.
pub fn is_physical(s: &NamedState) -> bool {
    !s.rho.nonpositive_allowed() || s.rho.min_eigenvalue() >= -1e-10
}

fn unit(t: f64) -> bool {
    (0.0..=1.0).contains(&t)
}

fn tp(t: f64) -> String {
    format!("T={t}")
}

fn purity_suite(s: &NamedState, grid: &[f64]) -> Result<Vec<CheckReport>> {
    let poly = match &s.pure {
        Some(psi) => pure_purity_polynomial(psi),
        None => purity_polynomial(&s.rho),
    };
    let mut out = vec![
        CheckReport::eq("purity_polynomial_total", poly.total(), 1.0, Regime::Exact).with_claim("sum of coefficients is 1"),
        CheckReport::eq("purity_polynomial_at_one", poly.evaluate(1.0), purity(&s.rho), Regime::Exact).with_claim("P(1) = Tr[rho^2]"),
        CheckReport::ge("purity_coefficients_nonnegative", poly.min_coefficient(), 0.0, Regime::Exact)
            .with_claim("dark-port coefficients are nonnegative"),
    ];
    if let Some(psi) = &s.pure {
        let dense = purity_polynomial(&s.rho);
        out.push(CheckReport::le("pure_odd_coefficients", dense.max_odd_abs(), 0.0, Regime::Exact).with_claim("odd coefficients vanish, pure input"));
        out.push(
            CheckReport::eq("pure_minimum_at_half", poly.evaluate(0.5), min_purity_pure(psi), Regime::Exact)
                .with_claim("P(1/2) equals the closed-form minimum"),
        );
    }
    for &t in grid {
        if unit(t) {
            out.push(
                CheckReport::eq("purity_polynomial_vs_channel", poly.evaluate(t), lossy_purity(&s.rho, t)?, Regime::Exact)
                    .with_params(tp(t))
                    .with_claim("polynomial equals Tr[E_T(rho)^2]"),
            );
        }
        if s.pure.is_some() {
            out.push(
                CheckReport::eq("purity_symmetry", poly.evaluate(t), poly.evaluate(1.0 - t), Regime::Exact)
                    .with_params(tp(t))
                    .with_claim("P(T) = P(1-T), pure input"),
            );
        }
        if s.pure.is_some() || t <= 0.5 {
            out.push(
                CheckReport::ge("purity_convexity", poly.derivative(t, 2), 0.0, Regime::Exact)
                    .with_tolerance(SECOND_DERIVATIVE_TOL)
                    .with_params(tp(t))
                    .with_claim("d^2P/dT^2 >= 0"),
            );
        }
    }
    Ok(out)
}

const FD_STEP: f64 = 1e-2;
const FD_TOL: f64 = 1e-7;

fn entropy_suite(s: &NamedState, grid: &[f64]) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let h1 = |t: f64| apply_loss(&s.rho, t).and_then(|r| von_neumann(&r));
    for &t in grid.iter().filter(|&&t| unit(t)) {
        let rho_t = apply_loss(&s.rho, t)?;
        out.push(
            CheckReport::eq("renyi2_is_log_purity", renyi_entropy(&rho_t, 2.0)?, -lossy_purity(&s.rho, t)?.ln(), Regime::Exact)
                .with_params(tp(t))
                .with_claim("H2 = -log P"),
        );
        if t - FD_STEP >= 0.0 && t + FD_STEP <= 1.0 {
            let d2 = h1(t + FD_STEP)? - 2.0 * h1(t)? + h1(t - FD_STEP)?;
            out.push(
                CheckReport::le("entropy_concavity", d2, 0.0, Regime::FiniteDifference)
                    .with_tolerance(FD_TOL)
                    .with_params(tp(t))
                    .with_claim("second difference of H1(rho_T) <= 0"),
            );
            let i = |x: f64| mutual_information_bs(&s.rho, x);
            let d2 = i(t + FD_STEP)? - 2.0 * i(t)? + i(t - FD_STEP)?;
            out.push(
                CheckReport::le("mutual_information_concavity", d2, 0.0, Regime::FiniteDifference)
                    .with_tolerance(FD_TOL)
                    .with_params(tp(t))
                    .with_claim("second difference of I(T) <= 0"),
            );
        }
    }
    Ok(out)
}

const QCS_TOL: f64 = 1e-8;
const KERNEL_TOL: f64 = 1e-4;

fn qcs_suite(s: &NamedState, grid: &[f64]) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let pure = s.pure.is_some();
    for &t in grid.iter().filter(|&&t| t > 0.0 && t <= 1.0) {
        let rate = qcs_purity_rate(&s.rho, t)?.c_squared;
        let rho_t = apply_loss(&s.rho, t)?;
        for (name, v) in [
            ("qcs_commutator_route", qcs_commutator(&rho_t)?.c_squared),
            ("qcs_lindblad_route", qcs_lindblad(&s.rho, t)?.c_squared),
            ("qcs_two_copy_route", qcs_two_copy(&rho_t)?.c_squared),
        ] {
            out.push(
                CheckReport::eq(name, v, rate, Regime::Exact)
                    .with_tolerance(QCS_TOL)
                    .with_params(tp(t))
                    .with_claim("route agrees with 1 + T dlogP/dT"),
            );
        }
        let claim = if pure && t == 0.5 {
            Some(CheckReport::eq("qcs_pure_half_loss", rate, 1.0, Regime::Exact).with_claim("C^2 = 1 for pure states at T = 1/2"))
        } else if pure && t > 0.5 {
            Some(CheckReport::ge("qcs_pure_above_half", rate, 1.0, Regime::Exact).with_claim("C^2 >= 1 for pure states, T > 1/2"))
        } else if t <= 0.5 {
            Some(CheckReport::le("qcs_classical_below_half", rate, 1.0, Regime::Exact).with_claim("C^2 <= 1 for T <= 1/2"))
        } else {
            None
        };
        out.extend(claim.map(|r| r.with_tolerance(QCS_TOL).with_params(tp(t))));
    }
    if s.rho.cutoff() <= 12 {
        let kernel = qcs_kernel_form(&s.rho, &QuadratureGrid::default())?;
        out.push(
            CheckReport::eq("qcs_kernel_route", kernel.result.c_squared, qcs_commutator(&s.rho)?.c_squared, Regime::Quadrature)
                .with_tolerance(KERNEL_TOL)
                .with_params("T=1")
                .with_claim("quadrature-kernel form agrees with commutator form"),
        );
    }
    Ok(out)
}

const GRID_POINTS: usize = 81;
const NORM_TOL: f64 = 1e-6;
const ROUTE_TOL: f64 = 1e-5;

fn phase_space_suite(s: &NamedState, input: &VerifyInput) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let hw = default_half_width(s.rho.cutoff().saturating_sub(1));
    let z = C64::default();
    for &order in input.orders {
        let g = quasi_grid(&s.rho, order, z, hw, GRID_POINTS)?;
        let p = format!("s={order}");
        out.push(
            CheckReport::eq("quasi_normalization", g.normalization(), 1.0, Regime::Quadrature)
                .with_tolerance(NORM_TOL)
                .with_params(p.clone())
                .with_claim("integral of P(alpha,s) is 1"),
        );
        if order <= -1.0 {
            out.push(CheckReport::ge("quasi_nonnegative", g.min(), 0.0, Regime::Exact).with_params(p).with_claim("P(alpha,s) >= 0 for s <= -1"));
        }
    }
    let probe = C64::new(0.3, -0.2);
    for &t in input.grid.iter().filter(|&&t| t > 0.0 && t <= 1.0) {
        let rho_t = apply_loss(&s.rho, t)?;
        if t <= 0.5 {
            let w = quasi_grid(&rho_t, 0.0, z, hw, GRID_POINTS)?;
            out.push(
                CheckReport::ge("wigner_nonnegative_after_half_loss", w.min(), 0.0, Regime::Exact)
                    .with_params(tp(t))
                    .with_claim("Wigner function of rho_T is nonnegative for T <= 1/2"),
            );
        }
        let exact = purity(&rho_t);
        for (name, v) in [
            ("purity_chi_route", purity_from_chi(&rho_t, 0.0, input.quad)?),
            ("purity_lossy_chi_route", purity_lossy_from_chi(&s.rho, t, 0.0, input.quad)?),
            ("purity_laplace_route", laplace_purity(&s.rho, t, input.quad)?),
            ("purity_wigner_overlap_route", overlap_from_quasi(&rho_t, &rho_t, 0.0, input.quad)?),
        ] {
            out.push(
                CheckReport::eq(name, v, exact, Regime::Quadrature)
                    .with_tolerance(ROUTE_TOL)
                    .with_params(tp(t))
                    .with_claim("phase-space purity equals Tr[rho_T^2]"),
            );
        }
        for &order in input.orders {
            out.push(loss_identity_quasi(&s.rho, t, probe, order)?);
            out.push(loss_identity_chi(&s.rho, t, probe, order)?);
        }
    }
    Ok(out)
}

/// States with index below this also get the two-state phase-space integrals.
const PAIR_LIMIT: usize = 10;

fn inequality_suite(s: &NamedState, partner: &NamedState, index: usize, input: &VerifyInput) -> Result<Vec<CheckReport>> {
    let rho = &s.rho;
    let mut out = vec![cauchy_schwarz_ladder(rho)];
    if let Some(psi) = &s.pure {
        out.push(pure_second_order_inequality(psi));
    }
    for &t in input.grid {
        if unit(t) && t <= 0.5 {
            out.push(corollary_loss_ladder(rho, t)?);
        }
        if t > 0.0 && t < 1.0 {
            out.extend(appendix_c_second_derivative(rho, t)?);
        }
        if t >= 1e-4 && t <= 1.0 - 1e-4 {
            out.push(derivative_route_consistency(rho, t)?);
        }
        if s.pure.is_some() || t <= 0.5 {
            for k in 0..=4 {
                out.push(quasi_derivative_sign(rho, t, k)?);
            }
        }
        if let Some(psi) = &s.pure {
            if t > 0.0 && t <= 0.5 {
                out.push(corollary_pure_ratio(psi, t)?);
            }
            if t > 0.0 && t < 1.0 {
                out.push(transpose_trick_identity(psi, t)?);
            }
            out.push(quasi_derivative_symmetry(psi, t, 2));
        }
    }
    out.extend(bernstein_check(rho, 4)?);
    let mono: Vec<f64> = input.grid.iter().copied().filter(|&t| t > 0.0 && t <= 1.0).collect();
    if mono.len() >= 2 && mono.windows(2).all(|w| w[1] > w[0]) {
        out.extend(number_purity_monotonicity(rho, &mono)?);
    }
    if index < PAIR_LIMIT && is_physical(partner) {
        let hw = default_half_width(rho.cutoff().max(partner.rho.cutoff()) - 1);
        for &t in input.grid.iter().filter(|&&t| t >= 0.0 && t < 0.5 - HUSIMI_EXCLUSION) {
            out.extend(husimi_pair_check_states(rho, &partner.rho, t, hw, 101)?.into_iter().map(|r| r.with_params(format!("T={t},partner={}", partner.id))));
            if t > 0.0 {
                out.extend(general_r_check(rho, &partner.rho, -1.0, -1.0, t, hw, 101)?);
            }
        }
    }
    Ok(out)
}
