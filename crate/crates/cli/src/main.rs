//! `fockloss`: verification suites, sweeps, phase-space grids and conjecture scans.
//!
//! Exit status: 0 when every check passes (or a scan finds no violation),
//! 1 when any check fails, 2 on usage or configuration errors.

mod commands;
mod settings;
mod verify;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fockloss::conjecture::{write_scan_rows, Disposition, PortBasis};
use fockloss::fock::C64;
use fockloss::report::{write_reports, CheckReport};

use commands::{ConjectureName, PhaseSpaceJob};
use settings::{fill, usage, Common, Usage, UsageError};
use verify::{Suite, VerifyInput};

#[derive(Parser, Debug)]
#[command(name = "fockloss", version, about = "Photon-loss purity, entropy and phase-space checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a battery of checks and write one CSV row per check
    Verify {
        /// purity, entropy, qcs, phasespace, inequalities or all
        #[arg(long)]
        suite: Option<Suite>,
        #[command(flatten)]
        common: Common,
    },
    /// Purity, entropies, C² and mean photon number along a loss grid
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Export s-ordered quasiprobability grids of the lossy state
    Phasespace {
        /// Transmissivity applied before sampling
        #[arg(long = "T")]
        t: Option<f64>,
        /// Half width of the square grid (default from the cutoff)
        #[arg(long)]
        half_width: Option<f64>,
        /// Points per axis
        #[arg(long)]
        points: Option<usize>,
        /// Grid centre `RE,IM`
        #[arg(long, allow_hyphen_values = true)]
        center: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Scan a conjectured inequality over a corpus and log its margins
    Conjecture {
        /// log-convexity, convexity, unfairness, dark-port-g2 or ell-log-convexity
        #[arg(long)]
        name: Option<ConjectureName>,
        /// Two-mode input for the unfairness witness: bell-like, fock-pair:N1,N2 or fair
        #[arg(long)]
        phi: Option<String>,
        /// How the two modes are read: input or dark-light
        #[arg(long)]
        basis: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn output(common: &Common) -> Usage<Box<dyn Write>> {
    Ok(match &common.out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| UsageError(format!("cannot create {}: {e}", path.display())))?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn io_err(e: impl std::fmt::Display) -> UsageError {
    UsageError(format!("write failed: {e}"))
}

/// Prints the run/passed/failed line and maps the counts to an exit status.
fn finish(reports: &[CheckReport]) -> ExitCode {
    let failed: Vec<&CheckReport> = reports.iter().filter(|r| !r.pass).collect();
    eprintln!("checks run: {}, passed: {}, failed: {}", reports.len(), reports.len() - failed.len(), failed.len());
    for r in failed.iter().take(5) {
        eprintln!("  failed {} [{}] {} margin {:e} (tolerance {:e})", r.check, r.state_id, r.params, r.margin, r.tolerance);
    }
    if failed.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) }
}

fn run(command: Command) -> Usage<ExitCode> {
    match command {
        Command::Verify { mut suite, mut common } => {
            let map = common.merge_config(&["suite"])?;
            if suite.is_none() {
                if let Some(v) = map.get("suite") {
                    suite = Some(v.parse().map_err(UsageError)?);
                }
            }
            let scale = common.tol_factor()?;
            let states = common.states_or("random:20")?;
            let grid = common.grid_or("0:1:11")?;
            let orders = common.orders_or(&[-1.0, 0.0])?;
            let quad = common.quadrature()?;
            let input = VerifyInput { states: &states, grid: &grid, orders: &orders, quad: &quad };
            let reports: Vec<CheckReport> =
                verify::run(suite.unwrap_or(Suite::All), &input)?.into_iter().map(|r| r.scale_tolerance(scale)).collect();
            let skipped = states.iter().filter(|s| !verify::is_physical(s)).count();
            if skipped > 0 {
                eprintln!("note: {skipped} non-positive operator(s) only enter the purity suite");
            }
            write_reports(output(&common)?, &reports)?;
            Ok(finish(&reports))
        }
        Command::Sweep { mut common } => {
            common.merge_config(&[])?;
            let states = common.states_or("fock:1")?;
            let grid = common.grid_or("0:1:101")?;
            let rows = commands::sweep_rows(&states, &grid)?;
            commands::write_sweep(output(&common)?, &rows)?;
            eprintln!("sweep: {} state(s) x {} grid point(s), {} rows", states.len(), grid.len(), rows.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Phasespace { mut t, mut half_width, mut points, mut center, mut common } => {
            let map = common.merge_config(&["T", "half-width", "points", "center"])?;
            fill(&mut t, &map, "T")?;
            fill(&mut half_width, &map, "half-width")?;
            fill(&mut points, &map, "points")?;
            fill(&mut center, &map, "center")?;
            let t = t.unwrap_or(1.0);
            if !(0.0..=1.0).contains(&t) {
                return usage(format!("--T must lie in [0, 1], got {t}"));
            }
            let points = points.unwrap_or(101);
            if points < 2 {
                return usage("--points must be at least 2");
            }
            if half_width.is_some_and(|h| !(h > 0.0)) {
                return usage("--half-width must be positive");
            }
            let center = match center {
                None => C64::default(),
                Some(text) => {
                    let (re, im) = text.split_once(',').unwrap_or((&text, "0"));
                    let p = |x: &str| x.trim().parse::<f64>().map_err(|_| UsageError(format!("bad --center '{text}'")));
                    C64::new(p(re)?, p(im)?)
                }
            };
            let scale = common.tol_factor()?;
            let job = PhaseSpaceJob { orders: common.orders_or(&[0.0])?, t, center, half_width, points };
            let states = common.states_or("fock:1")?;
            let grids = commands::phase_space_grids(&states, &job)?;
            let mut out = output(&common)?;
            commands::write_grids(&mut out, t, &grids)?;
            out.flush().map_err(io_err)?;
            for (id, g, _) in &grids {
                eprintln!("{id} s={} T={t}: min {:e}, max {:e}, normalization {:e}", g.s, g.min(), g.max(), g.normalization());
            }
            let reports: Vec<CheckReport> = grids.into_iter().flat_map(|(_, _, c)| c).map(|r| r.scale_tolerance(scale)).collect();
            Ok(finish(&reports))
        }
        Command::Conjecture { mut name, mut phi, mut basis, mut common } => {
            let map = common.merge_config(&["name", "phi", "basis"])?;
            if name.is_none() {
                if let Some(v) = map.get("name") {
                    name = Some(v.parse().map_err(UsageError)?);
                }
            }
            fill(&mut phi, &map, "phi")?;
            fill(&mut basis, &map, "basis")?;
            let Some(name) = name else {
                return usage("--name is required");
            };
            let grid = common.grid_or(name.default_grid())?;
            let (scan, notes) = if name == ConjectureName::Unfairness {
                let (phis, default_basis) = commands::witness_inputs(phi.as_deref().unwrap_or("fair"), || common.states_or("random:100"))?;
                let basis: PortBasis = basis.as_deref().map(commands::parse_basis).transpose()?.unwrap_or(default_basis);
                let o = commands::run_witness(&phis, &grid, basis)?;
                (o.scan, o.notes)
            } else {
                if phi.is_some() || basis.is_some() {
                    return usage("--phi and --basis only apply to --name unfairness");
                }
                let states = common.states_or("random:100")?;
                (commands::run_scan(name, &states, &grid)?, Vec::new())
            };
            write_scan_rows(output(&common)?, &scan.rows)?;
            eprintln!("{}", scan.summary());
            for n in &notes {
                eprintln!("  {} [{}] {}: {:e} >= {:e} {}", n.check, n.state_id, n.params, n.lhs, n.rhs, if n.pass { "holds" } else { "fails" });
            }
            for v in scan.violations.iter().take(5) {
                eprintln!("  violation {} at {} margin {:e}", v.state_id, v.param, v.margin);
            }
            Ok(if scan.disposition == Disposition::Violation { ExitCode::from(1) } else { ExitCode::SUCCESS })
        }
    }
}
