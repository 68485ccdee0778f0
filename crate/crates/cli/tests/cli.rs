use std::path::Path;
use std::process::{Command, Output};

fn fockloss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fockloss")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(line: &str, i: usize) -> f64 {
    line.split(',').nth(i).unwrap().parse().unwrap()
}

#[test]
fn purity_suite_passes_on_random_corpus() {
    let o = fockloss(&["verify", "--suite", "purity", "--states", "random:200"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("failed: 0"), "{err}");
}

#[test]
fn qcs_suite_reports_unit_value_at_half_loss() {
    let o = fockloss(&["verify", "--suite", "qcs", "--states", "fock:1", "--grid", "0:1:101"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("check_name,state_id,params,lhs,rhs,margin,tolerance,pass\n"));
    let row = out.lines().find(|l| l.starts_with("qcs_pure_half_loss,fock:1,T=0.5,")).expect("row at T=0.5");
    assert!((field(row, 3) - 1.0).abs() <= 1e-8);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify", "--grid", "0:1"][..],
        &["verify", "--grid", "1:0:5"],
        &["verify", "--suite", "nonsense"],
        &["sweep", "--states", "fock:-1"],
        &["conjecture"],
        &["phasespace", "--T", "1.5"],
        &["verify", "--quadrature", "80"],
    ] {
        assert_eq!(fockloss(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn sweep_reproduces_single_photon_loss() {
    let o = fockloss(&["sweep", "--states", "fock:1", "--grid", "0:1:21"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("state_id,T,purity,H1,H2,C2,mean_N"));
    let mut n = 0;
    for l in lines {
        let t = field(l, 1);
        assert!((field(l, 2) - (t * t + (1.0 - t) * (1.0 - t))).abs() < 1e-15, "{l}");
        let h = if t == 0.0 || t == 1.0 { 0.0 } else { -t * t.ln() - (1.0 - t) * (1.0 - t).ln() };
        assert!((field(l, 3) - h).abs() < 1e-12, "{l}");
        n += 1;
    }
    assert_eq!(n, 21);
    assert!(!out.contains('\r'));
}

#[test]
fn sweep_of_coherent_state_stays_pure() {
    let o = fockloss(&["sweep", "--states", "coherent:1", "--grid", "0:1:11"]);
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 11);
    for l in rows {
        // the id contains a comma and is quoted
        let tail = l.rsplitn(6, ',').collect::<Vec<_>>();
        assert!((tail[4].parse::<f64>().unwrap() - 1.0).abs() < 1e-12, "{l}");
    }
}

#[test]
fn sweep_of_squeezed_state_certifies_nonclassicality() {
    let o = fockloss(&["sweep", "--states", "squeezed:0.5", "--grid", "0.5:1:2"]);
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert!((field(rows[0], 5) - 1.0).abs() < 1e-8);
    assert!(field(rows[1], 5) > 1.0);
}

#[test]
fn wigner_is_nonnegative_after_half_loss() {
    let o = fockloss(&["phasespace", "--state", "fock:1", "--s", "0", "--T", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("# s=0e0 T=5e-1 state=fock:1"));
    assert_eq!(lines.next(), Some("re_alpha,im_alpha,value"));
    let min = lines.map(|l| field(l, 2)).fold(f64::INFINITY, f64::min);
    assert!(min >= -1e-9, "{min}");
}

#[test]
fn wigner_is_negative_with_little_loss() {
    let o = fockloss(&["phasespace", "--state", "fock:1", "--s", "0", "--T", "0.75", "--points", "21"]);
    let min = stdout(&o).lines().skip(2).map(|l| field(l, 2)).fold(f64::INFINITY, f64::min);
    assert!(min <= -1e-3);
}

#[test]
fn bell_like_unfairness_counterexample_exits_one() {
    let o = fockloss(&["conjecture", "--name", "unfairness", "--phi", "bell-like"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("conjecture,state_id,T_or_lambda,margin\n"));
    let row = out.lines().find(|l| l.starts_with("unfairness,bell-like,0e0,")).expect("lambda = 0 row");
    assert!(field(row, 3) < 0.0);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("violation"), "{err}");
}

#[test]
fn fock_pair_counterexample_is_one_le_zero() {
    let o = fockloss(&["conjecture", "--name", "unfairness", "--phi", "fock-pair:0,1", "--grid", "0:0:1"]);
    assert_eq!(o.status.code(), Some(1));
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    assert!(row.starts_with("unfairness,\"fock-pair:0,1\",0e0,"), "{row}");
    assert_eq!(row.rsplit(',').next().unwrap().parse::<f64>().unwrap(), -1.0);
}

#[test]
fn log_convexity_scan_finds_no_violation() {
    let o = fockloss(&["conjecture", "--name", "log-convexity", "--states", "random:100"]);
    assert_eq!(o.status.code(), Some(0));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("no-violation-found over 100 states"), "{err}");
    assert_eq!(stdout(&o).lines().count(), 1 + 100 * 101);
}

#[test]
fn log_convexity_of_single_photon_fails_outside_unit_interval() {
    let o = fockloss(&["conjecture", "--name", "log-convexity", "--states", "fock:1", "--grid", "1.1:1.5:5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn nonpositive_operator_needs_flag_and_passes_convexity() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sigma.txt");
    std::fs::write(&path, "# diag(2/3, -1/3, 2/3)\n0.6666666666666666 0 0\n0 -0.3333333333333333 0\n0 0 0.6666666666666667\n").unwrap();
    let spec = format!("file:{}", path.display());
    assert_eq!(fockloss(&["conjecture", "--name", "convexity", "--states", &spec, "--grid", "-1:2:31"]).status.code(), Some(2));
    let o = fockloss(&["conjecture", "--name", "convexity", "--states", &spec, "--grid", "-1:2:31", "--allow-nonpositive"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fockloss(&["conjecture", "--name", "convexity", "--states", "sigma-nonpositive"]).status.code(), Some(0));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = fockloss(&["verify", "--suite", "inequalities", "--states", "random:6", "--seed", "7", "--grid", "0:1:6", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(p).unwrap()
    };
    let a = run("a.csv");
    assert!(!a.is_empty());
    assert_eq!(a, run("b.csv"));
    let scan = || stdout(&fockloss(&["conjecture", "--name", "dark-port-g2", "--states", "random:10", "--seed", "3"]));
    assert_eq!(scan(), scan());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# sweep settings\nstates = fock:2\ngrid = 0:1:3\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let out = stdout(&fockloss(&["sweep", "--config", cfg]));
    assert_eq!(out.lines().count(), 4);
    assert!(out.lines().nth(1).unwrap().starts_with("fock:2,"));
    let out = stdout(&fockloss(&["sweep", "--config", cfg, "--grid", "0:1:5"]));
    assert_eq!(out.lines().count(), 6);
    let bad = Path::new(cfg).with_file_name("bad.cfg");
    std::fs::write(&bad, "colour = blue\n").unwrap();
    assert_eq!(fockloss(&["sweep", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn tolerance_multiplier_scales_reported_tolerances() {
    let out = stdout(&fockloss(&["verify", "--suite", "purity", "--states", "fock:2", "--grid", "0:1:3", "--tol", "10"]));
    let row = out.lines().find(|l| l.starts_with("purity_polynomial_total,")).unwrap();
    assert_eq!(field(row, 6), 1e-9);
}
