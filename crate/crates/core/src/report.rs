//! Structured pass/fail records shared by every check and their CSV form.

use std::io::Write;

use crate::error::{Error, Result};

/// How a checked value was obtained; decides the default tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Exact,
    Quadrature,
    FiniteDifference,
}

impl Regime {
    pub fn default_tolerance(self) -> f64 {
        match self {
            Regime::Exact => 1e-10,
            Regime::Quadrature => 1e-6,
            Regime::FiniteDifference => 1e-5,
        }
    }
}

/// Outcome of one check at one parameter point.
///
/// `margin` is signed so that nonnegative means the claim holds; a check
/// passes when `margin >= -tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub check: String,
    pub state_id: String,
    pub params: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub regime: Regime,
    /// Short statement of the claim being checked.
    pub claim: String,
}

impl CheckReport {
    fn build(check: &str, lhs: f64, rhs: f64, margin: f64, regime: Regime) -> Self {
        let tolerance = regime.default_tolerance();
        Self {
            check: check.to_string(),
            state_id: String::new(),
            params: String::new(),
            lhs,
            rhs,
            margin,
            tolerance,
            pass: margin >= -tolerance,
            regime,
            claim: String::new(),
        }
    }

    /// Claim `lhs ≤ rhs`.
    pub fn le(check: &str, lhs: f64, rhs: f64, regime: Regime) -> Self {
        Self::build(check, lhs, rhs, rhs - lhs, regime)
    }

    /// Claim `lhs ≥ rhs`.
    pub fn ge(check: &str, lhs: f64, rhs: f64, regime: Regime) -> Self {
        Self::build(check, lhs, rhs, lhs - rhs, regime)
    }

    /// Claim `lhs = rhs`.
    pub fn eq(check: &str, lhs: f64, rhs: f64, regime: Regime) -> Self {
        Self::build(check, lhs, rhs, -(lhs - rhs).abs(), regime)
    }

    /// Replaces the tolerance; `NaN` margins always fail.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self.pass = self.margin >= -tol;
        self
    }

    pub fn scale_tolerance(self, factor: f64) -> Self {
        let tol = self.tolerance * factor;
        self.with_tolerance(tol)
    }

    pub fn with_state(mut self, id: impl Into<String>) -> Self {
        self.state_id = id.into();
        self
    }

    pub fn with_params(mut self, params: impl Into<String>) -> Self {
        self.params = params.into();
        self
    }

    pub fn with_claim(mut self, claim: impl Into<String>) -> Self {
        self.claim = claim.into();
        self
    }
}

pub const REPORT_HEADER: [&str; 8] = ["check_name", "state_id", "params", "lhs", "rhs", "margin", "tolerance", "pass"];

/// Writes reports as CSV with the fixed header, one row per report.
pub fn write_reports<W: Write>(out: W, reports: &[CheckReport]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let io = |e: csv::Error| Error::InvalidParameter(format!("csv write failed: {e}"));
    w.write_record(REPORT_HEADER).map_err(io)?;
    for r in reports {
        w.write_record([
            r.check.clone(),
            r.state_id.clone(),
            r.params.clone(),
            fmt_f64(r.lhs),
            fmt_f64(r.rhs),
            fmt_f64(r.margin),
            fmt_f64(r.tolerance),
            r.pass.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidParameter(format!("csv flush failed: {e}")))?;
    Ok(())
}

/// Shortest round-trip decimal form; stable across runs.
pub fn fmt_f64(x: f64) -> String {
    // no "-0e0"
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margins_and_pass() {
        let r = CheckReport::le("x", 1.0, 2.0, Regime::Exact);
        assert_eq!(r.margin, 1.0);
        assert!(r.pass);
        let r = CheckReport::ge("x", 1.0, 1.0 + 1e-11, Regime::Exact);
        assert!(r.pass);
        let r = CheckReport::eq("x", 1.0, 1.001, Regime::Quadrature);
        assert!(!r.pass);
        assert!(!CheckReport::eq("x", f64::NAN, 0.0, Regime::Exact).pass);
    }

    #[test]
    fn csv_round_trip() {
        let r = CheckReport::le("purity_bound", 0.25, 0.5, Regime::Exact).with_state("fock:1").with_params("T=0.5;k=1");
        let mut buf = Vec::new();
        write_reports(&mut buf, &[r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "check_name,state_id,params,lhs,rhs,margin,tolerance,pass");
        assert_eq!(lines.next().unwrap(), "purity_bound,fock:1,T=0.5;k=1,2.5e-1,5e-1,2.5e-1,1e-10,true");
    }
}
