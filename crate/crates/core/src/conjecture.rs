//! Open conjectures about purity under loss, as scans that gather evidence,
//! plus the known counterexamples to stronger statements.
//!
//! Nothing here asserts a conjecture. A scan reports the worst margin it saw
//! and a disposition; raw violations are only kept after re-evaluation on a
//! 10x finer local grid with a 10x tighter tolerance.
//!
//! Dark-port moments come from the photon-number distribution `p_m` of the
//! difference mode. With `λ = 1 - 2T` the three moments of the witness are
//! `A = Σ p_m λ^m`, `C = Σ m p_m λ^{m-1}`, `B = Σ m(m-1) p_m λ^{m-2}`, each
//! term multiplied out before the power so `λ = 0` never meets a negative
//! exponent.

use std::io::Write;

use rayon::prelude::*;

use crate::corpus::NamedState;
use crate::error::{Error, Result};
use crate::fock::{CMatrix, DensityOperator, C64};
use crate::purity::{purity_polynomial, PurityPolynomial};
use crate::report::{fmt_f64, CheckReport, Regime};
use crate::two_mode::{dark_port_populations, pair_dark_port_state, Mode, TwoModeOperator};

/// Default tolerance of exact conjecture margins.
pub const SCAN_TOL: f64 = 1e-10;
/// Mean photon number below which `g²` is undefined.
pub const G2_MEAN_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Disposition {
    NoViolationFound,
    Violation,
    ProvenCaseVerified,
}

impl Disposition {
    pub fn as_str(self) -> &'static str {
        match self {
            Disposition::NoViolationFound => "no-violation-found",
            Disposition::Violation => "violation",
            Disposition::ProvenCaseVerified => "proven-case-verified",
        }
    }
}

/// One evaluated point of a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub conjecture: String,
    pub state_id: String,
    /// `T` or `λ`, depending on the conjecture.
    pub param: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub name: String,
    pub corpus: String,
    pub grid: String,
    pub min_margin: f64,
    pub argmin: Option<(String, f64)>,
    /// Confirmed violations only.
    pub violations: Vec<ScanRow>,
    pub disposition: Disposition,
    pub tolerance: f64,
    pub rows: Vec<ScanRow>,
}

impl ScanResult {
    /// One-line log entry with corpus size, grid and worst margin.
    pub fn summary(&self) -> String {
        let arg = self.argmin.as_ref().map_or("none".to_string(), |(s, p)| format!("{s}@{p}"));
        format!(
            "{}: {} over {} on {}; min margin {} at {}; {} confirmed violation(s)",
            self.name,
            self.disposition.as_str(),
            self.corpus,
            self.grid,
            fmt_f64(self.min_margin),
            arg,
            self.violations.len()
        )
    }
}

pub const SCAN_HEADER: [&str; 4] = ["conjecture", "state_id", "T_or_lambda", "margin"];

/// CSV with one row per (state, grid point).
pub fn write_scan_rows<W: Write>(out: W, rows: &[ScanRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let io = |e: csv::Error| Error::InvalidParameter(format!("write failed: {e}"));
    w.write_record(SCAN_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([r.conjecture.as_str(), r.state_id.as_str(), &fmt_f64(r.param), &fmt_f64(r.margin)]).map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidParameter(format!("write failed: {e}")))?;
    Ok(())
}

/// Re-evaluates a raw violation at `x` on a 10x finer grid over `[x-h, x+h]`
/// with tolerance `tol/10`; confirmed when `x` itself and the refined
/// minimum both stay below `-tol/10`.
pub fn confirm_violation(f: impl Fn(f64) -> f64, x: f64, h: f64, tol: f64) -> bool {
    let tight = tol / 10.0;
    if !(f(x) < -tight) {
        return false;
    }
    let refined = (0..=20).map(|i| f(x - h + i as f64 * h / 10.0)).fold(f64::INFINITY, f64::min);
    refined < -tight
}

fn grid_label(grid: &[f64]) -> String {
    match grid {
        [] => "empty grid".into(),
        [x] => format!("{x}"),
        _ => format!("{}..{} ({} points)", grid[0], grid[grid.len() - 1], grid.len()),
    }
}

fn grid_step(grid: &[f64], i: usize) -> f64 {
    let left = if i > 0 { grid[i] - grid[i - 1] } else { f64::INFINITY };
    let right = if i + 1 < grid.len() { grid[i + 1] - grid[i] } else { f64::INFINITY };
    let h = left.min(right);
    if h.is_finite() { h } else { 1e-3 }
}

/// Generic scan of `margin(state, x)` over states and a grid.
fn scan<S: Sync>(
    name: &str,
    corpus: &str,
    items: &[(String, S)],
    grid: &[f64],
    tol: f64,
    proven: bool,
    margin: impl Fn(&S, f64) -> f64 + Sync,
) -> ScanResult {
    let per_state: Vec<(Vec<ScanRow>, Vec<ScanRow>)> = items
        .par_iter()
        .map(|(id, s)| {
            let mut rows = Vec::with_capacity(grid.len());
            let mut viol = Vec::new();
            for (i, &x) in grid.iter().enumerate() {
                let m = margin(s, x);
                let row = ScanRow { conjecture: name.to_string(), state_id: id.clone(), param: x, margin: m };
                if !(m >= -tol) && confirm_violation(|y| margin(s, y), x, grid_step(grid, i), tol) {
                    viol.push(row.clone());
                }
                rows.push(row);
            }
            (rows, viol)
        })
        .collect();
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for (r, v) in per_state {
        rows.extend(r);
        violations.extend(v);
    }
    let (min_margin, argmin) = rows
        .iter()
        .fold((f64::INFINITY, None), |acc, r| if r.margin < acc.0 { (r.margin, Some((r.state_id.clone(), r.param))) } else { acc });
    let disposition = if !violations.is_empty() {
        Disposition::Violation
    } else if proven {
        Disposition::ProvenCaseVerified
    } else {
        Disposition::NoViolationFound
    };
    ScanResult {
        name: name.to_string(),
        corpus: corpus.to_string(),
        grid: grid_label(grid),
        min_margin,
        argmin,
        violations,
        disposition,
        tolerance: tol,
        rows,
    }
}

fn corpus_label(states: &[NamedState]) -> String {
    match states {
        [one] => one.id.clone(),
        _ => format!("{} states", states.len()),
    }
}

/// `P P'' - (P')²` in `T`, exact, for any real `T`.
pub fn log_convexity_margin(poly: &PurityPolynomial, t: f64) -> f64 {
    let p = poly.evaluate(t);
    let d1 = poly.derivative(t, 1);
    let d2 = poly.derivative(t, 2);
    p * d2 - d1 * d1
}

/// Log-convexity of purity in `T` over a corpus and a `T` grid. The grid
/// may leave `[0, 1]` on purpose, to reproduce the failure outside it.
pub fn log_convexity_scan(states: &[NamedState], grid: &[f64]) -> ScanResult {
    let items: Vec<(String, PurityPolynomial)> = states.iter().map(|s| (s.id.clone(), purity_polynomial(&s.rho))).collect();
    scan("log-convexity", &corpus_label(states), &items, grid, SCAN_TOL, false, log_convexity_margin)
}

/// Convexity of purity in `T` (`P'' ≥ 0`), the weaker, proven property.
pub fn convexity_scan(states: &[NamedState], grid: &[f64]) -> ScanResult {
    let items: Vec<(String, PurityPolynomial)> = states.iter().map(|s| (s.id.clone(), purity_polynomial(&s.rho))).collect();
    scan("convexity", &corpus_label(states), &items, grid, SCAN_TOL, false, |p, t| p.derivative(t, 2))
}

/// `(A, C, B)` moments of a dark-port distribution at `λ`.
pub fn witness_moments(p: &[f64], lambda: f64) -> (f64, f64, f64) {
    let (mut a, mut c, mut b) = (0.0, 0.0, 0.0);
    for (m, &pm) in p.iter().enumerate() {
        a += pm * lambda.powi(m as i32);
        if m >= 1 {
            c += pm * m as f64 * lambda.powi(m as i32 - 1);
        }
        if m >= 2 {
            b += pm * (m * (m - 1)) as f64 * lambda.powi(m as i32 - 2);
        }
    }
    (a, c, b)
}

/// `A B - C²` for a dark-port distribution.
pub fn witness_margin(p: &[f64], lambda: f64) -> f64 {
    let (a, c, b) = witness_moments(p, lambda);
    a * b - c * c
}

/// Log-convexity in `ℓ = log(1 - 2T)`, `T < 1/2`: with `e^{ℓ N₋} = λ^{N₋}`,
/// `Tr[Φ λ^{N₋} N₋]² ≤ Tr[Φ λ^{N₋}] Tr[Φ λ^{N₋} N₋²]` for `Φ = ρ⊗ρ`.
/// A Cauchy–Schwarz consequence, so it must always pass.
pub fn ell_log_convexity_check(rho1: &DensityOperator, t: f64) -> Result<CheckReport> {
    if !(t < 0.5) {
        return Err(Error::InvalidParameter(format!("ell-log-convexity needs T < 1/2, got {t}")));
    }
    let lambda = 1.0 - 2.0 * t;
    let p = purity_polynomial(rho1).coefficients;
    let mut m = [0.0; 3];
    for (k, &pk) in p.iter().enumerate() {
        let w = pk * lambda.powi(k as i32);
        m[0] += w;
        m[1] += w * k as f64;
        m[2] += w * (k * k) as f64;
    }
    Ok(CheckReport::le("ell_log_convexity", m[1] * m[1], m[0] * m[2], Regime::Exact)
        .with_params(format!("T={t}"))
        .with_claim("purity log-convex in log(1-2T)"))
}

/// Scan of the proven ℓ-log-convexity over a corpus; any failure is a bug.
pub fn ell_log_convexity_scan(states: &[NamedState], grid: &[f64]) -> Result<ScanResult> {
    if grid.iter().any(|&t| !(t < 0.5)) {
        return Err(Error::InvalidParameter("ell-log-convexity grid must lie below T = 1/2".into()));
    }
    let items: Vec<(String, DensityOperator)> = states.iter().map(|s| (s.id.clone(), s.rho.clone())).collect();
    Ok(scan("ell-log-convexity", &corpus_label(states), &items, grid, SCAN_TOL, true, |rho, t| {
        ell_log_convexity_check(rho, t.min(0.5 - 1e-12)).map_or(f64::NAN, |r| r.margin)
    }))
}

/// How the two modes of a witness input are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortBasis {
    /// Modes are the two beam-splitter inputs; `N₋` counts photons in
    /// `(a1 - a2)/√2`, found by undoing a balanced splitter.
    Input,
    /// Modes are already (light, dark): the second mode is the dark port.
    DarkLight,
}

/// Dark-port photon-number distribution of `Φ` in the chosen reading.
/// In the input reading `Φ` is zero-padded first so every block is complete.
pub fn witness_distribution(phi: &TwoModeOperator, basis: PortBasis) -> Result<Vec<f64>> {
    match basis {
        PortBasis::DarkLight => Ok(phi.marginal_populations(Mode::Second)),
        PortBasis::Input => {
            let (c1, c2) = phi.cutoffs();
            let c = c1 + c2 - 1;
            Ok(dark_port_populations(&phi.padded(c, c)?))
        }
    }
}

/// `Tr[Φ λ^{N₋}] Tr[Φ λ^{N₋-2} N₋(N₋-1)] ≥ Tr[Φ λ^{N₋-1} N₋]²`, `|λ| ≤ 1`.
pub fn unfairness_witness(phi: &TwoModeOperator, lambda: f64, basis: PortBasis) -> Result<CheckReport> {
    if !(lambda.abs() <= 1.0) {
        return Err(Error::InvalidParameter(format!("witness needs |lambda| <= 1, got {lambda}")));
    }
    let p = witness_distribution(phi, basis)?;
    let (a, c, b) = witness_moments(&p, lambda);
    Ok(CheckReport::ge("unfairness_witness", a * b, c * c, Regime::Exact)
        .with_params(format!("lambda={lambda},basis={basis:?}"))
        .with_claim("Tr[Phi l^N] Tr[Phi l^(N-2) N(N-1)] >= Tr[Phi l^(N-1) N]^2"))
}

/// `λ = 0` form: `2 q₂ q₀ - q₁² ≥ 0` with `q` the dark-port populations.
pub fn lambda_zero_witness(phi: &TwoModeOperator, basis: PortBasis) -> Result<CheckReport> {
    let q = witness_distribution(phi, basis)?;
    let at = |m: usize| q.get(m).copied().unwrap_or(0.0);
    Ok(CheckReport::ge("lambda_zero_witness", 2.0 * at(2) * at(0), at(1) * at(1), Regime::Exact)
        .with_params(format!("basis={basis:?}"))
        .with_claim("2<2|Phi-|2><0|Phi-|0> - <1|Phi-|1>^2 >= 0"))
}

/// `λ = 1` form: `Tr[Φ₋ N(N-1)] - Tr[Φ₋ N]² ≥ 0`.
pub fn lambda_one_witness(phi: &TwoModeOperator, basis: PortBasis) -> Result<CheckReport> {
    let q = witness_distribution(phi, basis)?;
    let (_, c, b) = witness_moments(&q, 1.0);
    Ok(CheckReport::ge("lambda_one_witness", b, c * c, Regime::Exact)
        .with_params(format!("basis={basis:?}"))
        .with_claim("Tr[Phi- N(N-1)] >= Tr[Phi- N]^2"))
}

/// Witness over a set of two-mode operators and a `λ` grid.
pub fn unfairness_scan(phis: &[(String, TwoModeOperator)], lambdas: &[f64], basis: PortBasis) -> Result<ScanResult> {
    if lambdas.iter().any(|l| !(l.abs() <= 1.0)) {
        return Err(Error::InvalidParameter("lambda grid must lie in [-1, 1]".into()));
    }
    let dists: Vec<(String, Vec<f64>)> = phis
        .iter()
        .map(|(id, phi)| Ok((id.clone(), witness_distribution(phi, basis)?)))
        .collect::<Result<_>>()?;
    let corpus = if phis.len() == 1 { phis[0].0.clone() } else { format!("{} two-mode operators", phis.len()) };
    Ok(scan("unfairness", &corpus, &dists, lambdas, SCAN_TOL, false, |p, l| witness_margin(p, l.clamp(-1.0, 1.0))))
}

/// `(|00⟩ - |11⟩)/√2`.
pub fn bell_like() -> TwoModeOperator {
    let mut amps = nalgebra::DMatrix::<C64>::zeros(2, 2);
    amps[(0, 0)] = C64::new(1.0, 0.0);
    amps[(1, 1)] = C64::new(-1.0, 0.0);
    TwoModeOperator::from_amplitudes(&amps).expect("fixed nonzero vector")
}

/// `|n1, n2⟩⟨n1, n2|`.
pub fn fock_pair(n1: usize, n2: usize) -> TwoModeOperator {
    let mut amps = nalgebra::DMatrix::<C64>::zeros(n1 + 1, n2 + 1);
    amps[(n1, n2)] = C64::new(1.0, 0.0);
    TwoModeOperator::from_amplitudes(&amps).expect("fixed nonzero vector")
}

/// Fair operator `Σ_i P_i ρ_i ⊗ ρ_i`, all `ρ_i` padded to a common cutoff.
pub fn fair_mixture(parts: &[(f64, &DensityOperator)]) -> Result<TwoModeOperator> {
    let c = parts.iter().map(|(_, r)| r.cutoff()).max().ok_or(Error::EmptySpace)?;
    let total: f64 = parts.iter().map(|(w, _)| w).sum();
    if parts.iter().any(|(w, _)| *w < 0.0) || !(total > 0.0) {
        return Err(Error::InvalidParameter("fair mixture weights must be nonnegative with positive sum".into()));
    }
    let mut m = CMatrix::zeros(c * c, c * c);
    for (w, r) in parts {
        let rp = r.padded(c);
        m += rp.matrix().kronecker(rp.matrix()) * C64::new(w / total, 0.0);
    }
    TwoModeOperator::new(m, c, c)
}

/// Normalised dark-port state `ρ₋` of `ρ ⊗ ρ` after the weighting
/// `√(1-2T)^{N₋}` on both sides, `T ≤ 1/2`.
pub fn dark_port_state(rho1: &DensityOperator, t: f64) -> Result<DensityOperator> {
    if !(t <= 0.5) {
        return Err(Error::InvalidParameter(format!("dark-port state needs T <= 1/2, got {t}")));
    }
    let lambda = 1.0 - 2.0 * t;
    let raw = pair_dark_port_state(rho1.matrix(), rho1.matrix());
    let n = raw.nrows();
    let w: Vec<f64> = (0..n).map(|m| if m == 0 { 1.0 } else { lambda.sqrt().powi(m as i32) }).collect();
    let weighted = CMatrix::from_fn(n, n, |i, j| raw[(i, j)] * (w[i] * w[j]));
    let tr = weighted.trace().re;
    if !(tr > 0.0) {
        return Err(Error::PurityUnderflow(tr));
    }
    Ok(DensityOperator::with_flag_of(weighted / C64::new(tr, 0.0), rho1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum G2 {
    Defined(f64),
    /// `⟨N⟩` below [`G2_MEAN_FLOOR`].
    Undefined,
}

impl G2 {
    pub fn value(self) -> Option<f64> {
        match self {
            G2::Defined(v) => Some(v),
            G2::Undefined => None,
        }
    }
}

/// `g^{(n)} = Tr[ρ a†ⁿ aⁿ]/Tr[ρN]ⁿ` from populations.
pub fn gn(rho: &DensityOperator, order: usize) -> G2 {
    let p = rho.populations();
    let mean: f64 = p.iter().enumerate().map(|(m, x)| m as f64 * x).sum();
    if mean <= G2_MEAN_FLOOR {
        return G2::Undefined;
    }
    let falling: f64 = p.iter().enumerate().map(|(m, x)| x * (0..order).map(|j| m as f64 - j as f64).product::<f64>()).sum();
    G2::Defined(falling / mean.powi(order as i32))
}

/// `g² = Tr[ρ N(N-1)]/Tr[ρN]²`.
pub fn g2(rho: &DensityOperator) -> G2 {
    gn(rho, 2)
}

/// Dark-port `g²(ρ₋) ≥ 1` over a corpus and `T ≤ 1/2`; undefined points are skipped.
pub fn dark_port_g2_scan(states: &[NamedState], grid: &[f64]) -> Result<ScanResult> {
    if grid.iter().any(|&t| !(t <= 0.5)) {
        return Err(Error::InvalidParameter("dark-port grid must lie at or below T = 1/2".into()));
    }
    let items: Vec<(String, DensityOperator)> = states.iter().map(|s| (s.id.clone(), s.rho.clone())).collect();
    let mut res = scan("dark-port-g2", &corpus_label(states), &items, grid, 1e-8, false, |rho, t| {
        match dark_port_state(rho, t.min(0.5)).map(|d| g2(&d)) {
            Ok(G2::Defined(v)) => v - 1.0,
            _ => f64::INFINITY,
        }
    });
    res.rows.retain(|r| r.margin.is_finite());
    if res.argmin.is_some() && !res.min_margin.is_finite() {
        res.argmin = None;
    }
    Ok(res)
}
