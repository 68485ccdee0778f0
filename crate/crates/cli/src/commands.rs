//! `sweep`, `phasespace` and `conjecture`.

use std::io::Write;

use fockloss::conjecture::{
    bell_like, convexity_scan, dark_port_g2_scan, ell_log_convexity_scan, fair_mixture, fock_pair, lambda_zero_witness, log_convexity_scan,
    unfairness_scan, PortBasis, ScanResult,
};
use fockloss::corpus::NamedState;
use fockloss::fock::C64;
use fockloss::loss::apply_loss;
use fockloss::phase_space::{default_half_width, quasi_grid, QuasiProbGrid};
use fockloss::purity::{purity, renyi_entropy, von_neumann};
use fockloss::qcs::qcs_purity_rate;
use fockloss::report::{fmt_f64, CheckReport};
use fockloss::two_mode::TwoModeOperator;
use fockloss::Result;
use rayon::prelude::*;

use crate::settings::{usage, Usage, UsageError};

pub const SWEEP_HEADER: [&str; 7] = ["state_id", "T", "purity", "H1", "H2", "C2", "mean_N"];

/// Per-`T` purity, entropies, `C²` and `⟨N⟩`; undefined entries are `NaN`.
pub fn sweep_rows(states: &[NamedState], grid: &[f64]) -> Result<Vec<[String; 7]>> {
    if let Some(t) = grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(fockloss::Error::NonPhysicalTransmission(*t));
    }
    let rows: Vec<Vec<[String; 7]>> = states
        .par_iter()
        .map(|s| {
            grid.iter()
                .map(|&t| {
                    let rho_t = apply_loss(&s.rho, t)?;
                    let purity = purity(&rho_t);
                    let h1 = von_neumann(&rho_t).unwrap_or(f64::NAN);
                    let h2 = renyi_entropy(&rho_t, 2.0).unwrap_or(f64::NAN);
                    let c2 = qcs_purity_rate(&s.rho, t).map_or(f64::NAN, |q| q.c_squared);
                    Ok([
                        s.id.clone(),
                        fmt_f64(t),
                        fmt_f64(purity),
                        fmt_f64(h1),
                        fmt_f64(h2),
                        fmt_f64(c2),
                        fmt_f64(rho_t.mean_photon_number()),
                    ])
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

pub struct PhaseSpaceJob {
    pub orders: Vec<f64>,
    pub t: f64,
    pub center: C64,
    pub half_width: Option<f64>,
    pub points: usize,
}

/// One grid per (state, order); the checks are normalisation and, for
/// `s ≤ -1`, nonnegativity.
pub fn phase_space_grids(states: &[NamedState], job: &PhaseSpaceJob) -> Result<Vec<(String, QuasiProbGrid, Vec<CheckReport>)>> {
    let tasks: Vec<(&NamedState, f64)> = states.iter().flat_map(|s| job.orders.iter().map(move |&o| (s, o))).collect();
    tasks
        .par_iter()
        .map(|(s, order)| {
            let rho_t = apply_loss(&s.rho, job.t)?;
            let hw = job.half_width.unwrap_or_else(|| default_half_width(s.rho.cutoff().saturating_sub(1)));
            let g = quasi_grid(&rho_t, *order, job.center, hw, job.points)?;
            let p = format!("s={order},T={}", job.t);
            let mut checks = vec![CheckReport::eq("grid_normalization", g.normalization(), 1.0, fockloss::report::Regime::Quadrature)
                .with_tolerance(1e-4)
                .with_state(s.id.clone())
                .with_params(p.clone())
                .with_claim("Riemann sum of the grid is 1")];
            if *order <= -1.0 {
                checks.push(
                    CheckReport::ge("grid_nonnegative", g.min(), 0.0, fockloss::report::Regime::Exact)
                        .with_state(s.id.clone())
                        .with_params(p)
                        .with_claim("P(alpha,s) >= 0 for s <= -1"),
                );
            }
            Ok((s.id.clone(), g, checks))
        })
        .collect()
}

pub fn write_sweep(out: impl Write, rows: &[[String; 7]]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let io = |e: csv::Error| fockloss::Error::InvalidParameter(format!("write failed: {e}"));
    w.write_record(SWEEP_HEADER).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush().map_err(|e| fockloss::Error::InvalidParameter(format!("write failed: {e}")))?;
    Ok(())
}

pub fn write_grids(mut out: impl Write, t: f64, grids: &[(String, QuasiProbGrid, Vec<CheckReport>)]) -> Result<()> {
    for (id, g, _) in grids {
        g.write_csv(&mut out, Some(t), id)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConjectureName {
    LogConvexity,
    Convexity,
    Unfairness,
    DarkPortG2,
    EllLogConvexity,
}

impl std::str::FromStr for ConjectureName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "log-convexity" => ConjectureName::LogConvexity,
            "convexity" => ConjectureName::Convexity,
            "unfairness" => ConjectureName::Unfairness,
            "dark-port-g2" => ConjectureName::DarkPortG2,
            "ell-log-convexity" => ConjectureName::EllLogConvexity,
            _ => return Err(format!("unknown conjecture '{s}' (log-convexity, convexity, unfairness, dark-port-g2, ell-log-convexity)")),
        })
    }
}

impl ConjectureName {
    pub fn default_grid(self) -> &'static str {
        match self {
            ConjectureName::LogConvexity | ConjectureName::Convexity => "0:1:101",
            ConjectureName::Unfairness => "-1:1:81",
            ConjectureName::DarkPortG2 => "0:0.5:51",
            ConjectureName::EllLogConvexity => "0:0.49:50",
        }
    }
}

/// Named two-mode inputs: `bell-like`, `fock-pair:N1,N2`, or `fair` (each
/// state `ρ` as `ρ⊗ρ`). Returns the operators and the default reading.
pub fn witness_inputs(phi: &str, states: impl FnOnce() -> Usage<Vec<NamedState>>) -> Usage<(Vec<(String, TwoModeOperator)>, PortBasis)> {
    let (kind, rest) = phi.split_once(':').unwrap_or((phi, ""));
    match (kind, rest) {
        ("bell-like", "") => Ok((vec![("bell-like".into(), bell_like())], PortBasis::DarkLight)),
        ("fock-pair", args) => {
            let (a, b) = args.split_once(',').ok_or_else(|| UsageError(format!("--phi fock-pair expects N1,N2, got '{args}'")))?;
            let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| UsageError(format!("bad photon number '{x}'")));
            let (n1, n2) = (parse(a)?, parse(b)?);
            Ok((vec![(format!("fock-pair:{n1},{n2}"), fock_pair(n1, n2))], PortBasis::DarkLight))
        }
        ("fair", "") => {
            let phis = states()?
                .iter()
                .map(|s| Ok((format!("{}x{}", s.id, s.id), fair_mixture(&[(1.0, &s.rho)])?)))
                .collect::<Result<Vec<_>>>()?;
            Ok((phis, PortBasis::Input))
        }
        _ => usage(format!("unknown --phi '{phi}' (bell-like, fock-pair:N1,N2, fair)")),
    }
}

pub fn parse_basis(text: &str) -> Usage<PortBasis> {
    match text {
        "input" => Ok(PortBasis::Input),
        "dark-light" => Ok(PortBasis::DarkLight),
        _ => usage(format!("unknown --basis '{text}' (input, dark-light)")),
    }
}

pub struct ConjectureOutcome {
    pub scan: ScanResult,
    /// Extra exact checks, reported in the summary only.
    pub notes: Vec<CheckReport>,
}

pub fn run_scan(name: ConjectureName, states: &[NamedState], grid: &[f64]) -> Result<ScanResult> {
    match name {
        ConjectureName::LogConvexity => Ok(log_convexity_scan(states, grid)),
        ConjectureName::Convexity => Ok(convexity_scan(states, grid)),
        ConjectureName::DarkPortG2 => dark_port_g2_scan(states, grid),
        ConjectureName::EllLogConvexity => ell_log_convexity_scan(states, grid),
        ConjectureName::Unfairness => unreachable!("witness scans take two-mode inputs"),
    }
}

pub fn run_witness(phis: &[(String, TwoModeOperator)], grid: &[f64], basis: PortBasis) -> Result<ConjectureOutcome> {
    let scan = unfairness_scan(phis, grid, basis)?;
    let notes = phis
        .iter()
        .take(3)
        .map(|(id, phi)| Ok(lambda_zero_witness(phi, basis)?.with_state(id.clone())))
        .collect::<Result<_>>()?;
    Ok(ConjectureOutcome { scan, notes })
}
