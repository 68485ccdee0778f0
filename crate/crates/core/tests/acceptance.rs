//! The twelve acceptance criteria, each at its stated tolerance and runtime
//! budget. Prints one PASS/FAIL line per criterion and exits nonzero if any
//! fails.

use std::f64::consts::{LN_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fockloss::conjecture::{
    bell_like, convexity_scan, dark_port_g2_scan, ell_log_convexity_scan, fair_mixture, fock_pair, lambda_zero_witness,
    log_convexity_scan, unfairness_scan, unfairness_witness, witness_moments, Disposition, PortBasis, ScanResult,
};
use fockloss::corpus::{random_corpus, sigma_nonpositive, NamedState, StateClass};
use fockloss::fock::{make_fock, DensityOperator, C64};
use fockloss::inequalities::*;
use fockloss::loss::apply_loss;
use fockloss::phase_space::{laplace_purity, overlap_from_quasi, purity_from_chi, purity_lossy_from_chi, quasi_grid, quasi_prob, Quadrature2D};
use fockloss::purity::{mutual_information_bs, pure_purity_polynomial, overlap_polynomial, purity, purity_polynomial, von_neumann};
use fockloss::qcs::{qcs_commutator, qcs_kernel_form, qcs_lindblad, qcs_purity_rate, qcs_two_copy, QuadratureGrid};
use fockloss::two_mode::dark_port_populations;
use fockloss::Result;

const SEED: u64 = 20_241_016;

type Outcome = Result<(bool, String)>;

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn(&Corpus) -> Outcome,
}

struct Corpus {
    pure: Vec<NamedState>,
    mixed: Vec<NamedState>,
}

impl Corpus {
    fn all(&self) -> impl Iterator<Item = &NamedState> {
        self.pure.iter().chain(self.mixed.iter())
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn fock(n: usize) -> DensityOperator {
    make_fock(n, n + 1).unwrap().to_density()
}

/// Tracks the worst value of a quantity that must stay below a bound.
#[derive(Default)]
struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn new() -> Self {
        Self { value: f64::NEG_INFINITY, at: String::new() }
    }

    fn see(&mut self, v: f64, at: impl FnOnce() -> String) {
        if !(v <= self.value) {
            self.value = v;
            self.at = at();
        }
    }
}

fn fock_loss_instance(_: &Corpus) -> Outcome {
    let one = fock(1);
    let half = apply_loss(&one, 0.5)?;
    let diag_ok = (0..2).all(|i| (0..2).all(|j| (half.get(i, j).re - if i == j { 0.5 } else { 0.0 }).abs() < 1e-10 && half.get(i, j).im.abs() < 1e-10));
    let p = purity(&half);
    let h = von_neumann(&half)?;
    let ts = grid(0.0, 1.0, 101);
    let mut p_min = (f64::INFINITY, 0.0);
    let mut h_max = (f64::NEG_INFINITY, 0.0);
    for &t in &ts {
        let r = apply_loss(&one, t)?;
        let (pv, hv) = (purity(&r), von_neumann(&r)?);
        if pv < p_min.0 {
            p_min = (pv, t);
        }
        if hv > h_max.0 {
            h_max = (hv, t);
        }
    }
    let ok = diag_ok && (p - 0.5).abs() < 1e-10 && (h - LN_2).abs() < 1e-10 && p_min.1 == 0.5 && h_max.1 == 0.5;
    Ok((ok, format!("purity {p}, H1 {h}, purity min at T={}, entropy max at T={}", p_min.1, h_max.1)))
}

fn purity_symmetry_convexity(c: &Corpus) -> Outcome {
    let ts = grid(-1.0, 2.0, 61);
    let mut sym = Worst::new();
    let mut conv = Worst::new();
    let mut dense_sym = Worst::new();
    for s in &c.pure {
        let poly = pure_purity_polynomial(s.pure.as_ref().expect("pure corpus"));
        let dense = purity_polynomial(&s.rho);
        for &t in &ts {
            sym.see((poly.evaluate(t) - poly.evaluate(1.0 - t)).abs(), || format!("{}@{t}", s.id));
            conv.see(-poly.derivative(t, 2), || format!("{}@{t}", s.id));
            dense_sym.see((dense.evaluate(t) - dense.evaluate(1.0 - t)).abs(), String::new);
        }
    }
    let ok = c.pure.len() >= 200 && sym.value <= 1e-10 && conv.value <= 1e-9;
    Ok((
        ok,
        format!(
            "{} pure states; max |P(T)-P(1-T)| {:e} ({}); min P'' {:e} ({}); density-route asymmetry {:e}",
            c.pure.len(),
            sym.value,
            sym.at,
            -conv.value,
            conv.at,
            dense_sym.value
        ),
    ))
}

fn nonnegative_coefficients(c: &Corpus) -> Outcome {
    let mut neg = Worst::new();
    for pair in c.mixed.chunks(2).chain(c.mixed[1..].chunks(2)).filter(|p| p.len() == 2).take(200) {
        for p in overlap_polynomial(&pair[0].rho, &pair[1].rho).coefficients {
            neg.see(-p, || format!("{}|{}", pair[0].id, pair[1].id));
        }
    }
    let mut odd = Worst::new();
    for s in &c.pure {
        odd.see(purity_polynomial(&s.rho).max_odd_abs(), || s.id.clone());
    }
    let ok = neg.value <= 1e-10 && odd.value <= 1e-10;
    Ok((ok, format!("200 mixed pairs: min p_m {:e}; pure inputs: max |odd p_m| {:e}", -neg.value, odd.value)))
}

fn entropy_concavity(c: &Corpus) -> Outcome {
    let h = 1e-2;
    let ts = grid(0.05, 0.95, 91);
    let states: Vec<&NamedState> = c.pure.iter().take(50).chain(c.mixed.iter().take(50)).collect();
    let mut h1 = Worst::new();
    let mut mi = Worst::new();
    for s in &states {
        let ent = |t: f64| apply_loss(&s.rho, t).and_then(|r| von_neumann(&r));
        let hv: Vec<f64> = (0..=92).map(|i| ent(0.04 + i as f64 * h)).collect::<Result<_>>()?;
        let iv: Vec<f64> = (0..=92).map(|i| mutual_information_bs(&s.rho, 0.04 + i as f64 * h)).collect::<Result<_>>()?;
        for (k, &t) in ts.iter().enumerate() {
            let j = k + 1;
            h1.see(hv[j + 1] - 2.0 * hv[j] + hv[j - 1], || format!("{}@{t}", s.id));
            mi.see(iv[j + 1] - 2.0 * iv[j] + iv[j - 1], || format!("{}@{t}", s.id));
        }
    }
    let ok = states.len() >= 100 && h1.value <= 1e-7 && mi.value <= 1e-7;
    Ok((ok, format!("{} states; max second difference H1 {:e} ({}), I {:e} ({})", states.len(), h1.value, h1.at, mi.value, mi.at)))
}

fn qcs_routes(c: &Corpus) -> Outcome {
    let ts = [0.1, 0.3, 0.5, 0.7, 1.0];
    let mut routes = Worst::new();
    for s in c.all().step_by(4) {
        for &t in &ts {
            let rho_t = apply_loss(&s.rho, t)?;
            let rate = qcs_purity_rate(&s.rho, t)?.c_squared;
            for (name, v) in [
                ("commutator", qcs_commutator(&rho_t)?.c_squared),
                ("lindblad", qcs_lindblad(&s.rho, t)?.c_squared),
                ("two-copy", qcs_two_copy(&rho_t)?.c_squared),
            ] {
                routes.see((v - rate).abs(), || format!("{name} {}@{t}", s.id));
            }
        }
    }
    let mut kernel = Worst::new();
    for s in c.all().step_by(40) {
        let k = qcs_kernel_form(&s.rho, &QuadratureGrid::default())?.result.c_squared;
        kernel.see((k - qcs_commutator(&s.rho)?.c_squared).abs(), || s.id.clone());
    }
    let mut pure_half = Worst::new();
    for s in &c.pure {
        pure_half.see((qcs_purity_rate(&s.rho, 0.5)?.c_squared - 1.0).abs(), || s.id.clone());
    }
    let mut mixed = Worst::new();
    for s in &c.mixed {
        for t in grid(0.05, 0.5, 10) {
            mixed.see(qcs_purity_rate(&s.rho, t)?.c_squared - 1.0, || format!("{}@{t}", s.id));
        }
    }
    let ok = routes.value <= 1e-8 && kernel.value <= 1e-4 && pure_half.value <= 1e-8 && mixed.value <= 1e-8;
    Ok((
        ok,
        format!(
            "route spread {:e} ({}); kernel {:e}; |C^2-1| pure at 1/2 {:e}; max C^2-1 mixed T<=1/2 {:e} ({})",
            routes.value, routes.at, kernel.value, pure_half.value, mixed.value, mixed.at
        ),
    ))
}

fn wigner_half_loss(_: &Corpus) -> Outcome {
    let one = fock(1);
    let mut mins = Vec::new();
    for t in [0.1, 0.2, 0.3, 0.4, 0.5] {
        mins.push(quasi_grid(&apply_loss(&one, t)?, 0.0, C64::default(), 6.0, 201)?.min());
    }
    let w = quasi_prob(&apply_loss(&one, 0.75)?, C64::default(), 0.0)?;
    let expected = 2.0 / PI * (1.0 - 2.0 * 0.75);
    let worst = mins.iter().copied().fold(f64::INFINITY, f64::min);
    let ok = worst >= -1e-9 && w <= -1e-3 && (w - expected).abs() < 1e-10;
    Ok((ok, format!("min Wigner over T=0.1..0.5: {worst:e}; W(0) at T=0.75: {w} (expected {expected})")))
}

fn phase_space_routes(c: &Corpus) -> Outcome {
    let quad = Quadrature2D::default();
    let states: Vec<&NamedState> = c.pure.iter().filter(|s| s.rho.cutoff() <= 8).take(10).chain(c.mixed.iter().filter(|s| s.rho.cutoff() <= 8).take(10)).collect();
    let mut dev = Worst::new();
    for s in &states {
        for t in [0.3, 0.8] {
            let rho_t = apply_loss(&s.rho, t)?;
            let exact = purity(&rho_t);
            for (name, v) in [
                ("chi", purity_from_chi(&rho_t, 0.0, &quad)?),
                ("lossy-chi", purity_lossy_from_chi(&s.rho, t, 0.0, &quad)?),
                ("laplace", laplace_purity(&s.rho, t, &quad)?),
                ("pi-int-W^2", overlap_from_quasi(&rho_t, &rho_t, 0.0, &quad)?),
            ] {
                dev.see((v - exact).abs(), || format!("{name} {}@{t}", s.id));
            }
        }
    }
    Ok((states.len() >= 20 && dev.value <= 1e-5, format!("{} states; max deviation {:e} ({})", states.len(), dev.value, dev.at)))
}

fn section_inequalities(c: &Corpus) -> Outcome {
    let mut failures = Vec::new();
    let mut note = |r: &fockloss::report::CheckReport, id: &str| {
        if !r.pass {
            failures.push(format!("{} {} {}", r.check, id, r.params));
        }
    };
    let mut transpose = Worst::new();
    for s in c.all() {
        note(&cauchy_schwarz_ladder(&s.rho), &s.id);
        for t in grid(0.0, 1.0, 11) {
            for r in appendix_c_second_derivative(&s.rho, t.clamp(0.01, 0.99))? {
                note(&r, &s.id);
            }
            if t <= 0.5 {
                note(&corollary_loss_ladder(&s.rho, t)?, &s.id);
            }
        }
        if let Some(psi) = &s.pure {
            note(&pure_second_order_inequality(psi), &s.id);
            for t in grid(0.05, 0.5, 10) {
                note(&corollary_pure_ratio(psi, t)?, &s.id);
            }
            for t in grid(0.05, 0.95, 19) {
                let r = transpose_trick_identity(psi, t)?;
                transpose.see(r.margin.abs(), || format!("{}@{t}", s.id));
            }
        }
    }
    let coh = fockloss::fock::make_coherent(C64::new(0.9, 0.3), 40)?;
    let sat = pure_second_order_inequality(&coh).margin.abs();
    let ok = failures.is_empty() && transpose.value <= 1e-10 && sat <= 1e-10;
    Ok((
        ok,
        format!("{} violations; transpose-trick deviation {:e}; coherent saturation {:e}{}", failures.len(), transpose.value, sat, first(&failures)),
    ))
}

fn first(v: &[String]) -> String {
    v.first().map_or(String::new(), |f| format!("; first: {f}"))
}

fn bernstein_monotonicity(c: &Corpus) -> Outcome {
    let mut failures = Vec::new();
    let ts = grid(0.01, 1.0, 100);
    for s in c.all() {
        for r in bernstein_check(&s.rho, 4)?.into_iter().chain(number_purity_monotonicity(&s.rho, &ts)?) {
            if !r.pass {
                failures.push(format!("{} {} {} margin {:e}", r.check, s.id, r.params, r.margin));
            }
        }
    }
    Ok((failures.is_empty(), format!("{} states, k<=4; {} violations{}", c.pure.len() + c.mixed.len(), failures.len(), first(&failures))))
}

fn husimi_fig2(_: &Corpus) -> Outcome {
    let vac = gaussian_husimi(1.0);
    let dilated = husimi_pair_check_fn(&vac, gaussian_husimi(2.0), 0.3, 9.0, 181)?;
    let scan: Vec<_> =
        grid(0.05, 0.45, 9).into_iter().map(|t| husimi_pair_check_fn(&vac, gaussian_husimi(0.5), t, 9.0, 181)).collect::<Result<_>>()?;
    let violation = scan.iter().find(|r| !r.pass && r.lhs > 0.0);
    let ok = dilated.pass && violation.is_some();
    Ok((
        ok,
        format!(
            "dilated at T=0.3: integral {:e} ({}); compressed: {}",
            dilated.lhs,
            if dilated.pass { "pass" } else { "fail" },
            violation.map_or("no violation found".into(), |r| format!("violation at {} with integral {:e}", r.params, r.lhs))
        ),
    ))
}

fn counterexamples_once() -> Result<Vec<u64>> {
    let bell = unfairness_witness(&bell_like(), 0.0, PortBasis::DarkLight)?;
    let bell0 = lambda_zero_witness(&bell_like(), PortBasis::DarkLight)?;
    let pair = lambda_zero_witness(&fock_pair(0, 1), PortBasis::Input)?;
    let pair_dl = lambda_zero_witness(&fock_pair(0, 1), PortBasis::DarkLight)?;
    let one = [NamedState::from_mixed("fock:1", fock(1))];
    let inside = log_convexity_scan(&one, &grid(0.0, 1.0, 101));
    let outside = log_convexity_scan(&one, &grid(-1.0, 2.0, 61));
    let sigma = [NamedState::from_mixed("sigma-nonpositive", sigma_nonpositive())];
    let sig = convexity_scan(&sigma, &grid(-1.0, 2.0, 61));
    let ok = !bell.pass
        && !bell0.pass
        && bell0.lhs == 0.0
        && (4.0 * bell0.rhs - 1.0).abs() < 1e-12
        && !pair.pass
        && pair_dl.lhs == 0.0
        && pair_dl.rhs == 1.0
        && inside.violations.is_empty()
        && outside.disposition == Disposition::Violation
        && outside.violations.iter().all(|v| !(0.0..=1.0).contains(&v.param))
        && sig.violations.is_empty();
    let mut bits = vec![ok as u64, bell.margin.to_bits(), bell0.margin.to_bits(), pair.margin.to_bits(), pair_dl.margin.to_bits()];
    bits.extend([inside.min_margin, outside.min_margin, sig.min_margin].map(f64::to_bits));
    bits.extend(outside.violations.iter().map(|v| v.margin.to_bits()));
    Ok(bits)
}

fn counterexamples(_: &Corpus) -> Outcome {
    let a = counterexamples_once()?;
    let b = counterexamples_once()?;
    let ok = a[0] == 1 && a == b;
    Ok((
        ok,
        format!(
            "Bell-like witness margin {}; |01> lambda=0 form 0 >= 1 fails; |1> log-convexity min margin outside [0,1] {}; repeat bit-identical: {}",
            f64::from_bits(a[1]),
            f64::from_bits(a[6]),
            a == b
        ),
    ))
}

fn conjecture_scans(c: &Corpus) -> Outcome {
    let states: Vec<NamedState> = c.pure.iter().take(60).chain(c.mixed.iter().take(60)).cloned().collect();
    let t_grid = grid(0.0, 1.0, 101);
    let half_grid = grid(0.0, 0.5, 51);
    let ell_grid = grid(0.0, 0.49, 50);
    let conj1 = log_convexity_scan(&states, &t_grid);

    let small: Vec<&NamedState> = c.all().filter(|s| s.rho.cutoff() <= 5).collect();
    let mut phis = Vec::new();
    for (i, s) in small.iter().enumerate().take(60) {
        phis.push((format!("{}x{}", s.id, s.id), fair_mixture(&[(1.0, &s.rho)])?));
        let o = small[(i + 1) % small.len()];
        phis.push((format!("fair({}|{})", s.id, o.id), fair_mixture(&[(0.3, &s.rho), (0.7, &o.rho)])?));
    }
    let witness = unfairness_scan(&phis, &grid(-1.0, 1.0, 81), PortBasis::Input)?;
    // The input-basis distribution of a product pair is the purity-polynomial coefficient list.
    let sanity = dark_port_populations(&phis[0].1.padded(9, 9)?);
    let direct = witness_moments(&purity_polynomial(&small[0].rho).coefficients, 0.3).0;
    let routed = witness_moments(&sanity, 0.3).0;

    let g2 = dark_port_g2_scan(&states, &half_grid)?;
    let ell = ell_log_convexity_scan(&states, &ell_grid)?;
    let scans: [&ScanResult; 3] = [&conj1, &witness, &g2];
    let ok = states.len() >= 100
        && phis.len() >= 100
        && scans.iter().all(|s| s.disposition == Disposition::NoViolationFound)
        && ell.disposition == Disposition::ProvenCaseVerified
        && (direct - routed).abs() < 1e-10;
    let lines: Vec<String> = scans.iter().map(|s| s.summary()).chain([ell.summary()]).collect();
    Ok((ok, lines.join(" | ")))
}

fn main() -> ExitCode {
    let t0 = Instant::now();
    let corpus = Corpus {
        pure: random_corpus(SEED, 200, StateClass::Pure).expect("pure corpus"),
        mixed: random_corpus(SEED + 1, 200, StateClass::Mixed).expect("mixed corpus"),
    };
    println!("corpus: 200 pure + 200 mixed states, seed {SEED}, built in {:.2}s", t0.elapsed().as_secs_f64());
    let s = Duration::from_secs;
    let criteria = [
        Criterion { name: "fock-loss instance", budget: s(1), run: fock_loss_instance },
        Criterion { name: "purity symmetry and convexity", budget: s(60), run: purity_symmetry_convexity },
        Criterion { name: "nonnegative dark-port coefficients", budget: s(120), run: nonnegative_coefficients },
        Criterion { name: "entropy and mutual-information concavity", budget: s(120), run: entropy_concavity },
        Criterion { name: "quadrature coherence scale", budget: s(120), run: qcs_routes },
        Criterion { name: "Wigner negativity threshold", budget: s(30), run: wigner_half_loss },
        Criterion { name: "phase-space purity routes", budget: s(60), run: phase_space_routes },
        Criterion { name: "ladder and second-order inequalities", budget: s(120), run: section_inequalities },
        Criterion { name: "complete monotonicity and number-purity monotonicity", budget: s(60), run: bernstein_monotonicity },
        Criterion { name: "Husimi pair test", budget: s(60), run: husimi_fig2 },
        Criterion { name: "witness and log-convexity counterexamples", budget: s(10), run: counterexamples },
        Criterion { name: "conjecture scans", budget: s(300), run: conjecture_scans },
    ];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = (c.run)(&corpus);
        let dt = start.elapsed();
        let (pass, detail) = match outcome {
            Ok((ok, d)) => (ok && dt <= c.budget, d),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {} ({:.2}s of {}s): {}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            c.name,
            dt.as_secs_f64(),
            c.budget.as_secs(),
            detail
        );
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
