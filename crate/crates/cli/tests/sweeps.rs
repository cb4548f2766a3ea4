//! Sweep output checks: determinism, schema, and the figure-level column
//! relations on the cheap presets.

use lmo_bounds_cli::csv::{render, ResultRow, HEADER};
use lmo_bounds_cli::eval::{evaluate, EvalParams};
use lmo_bounds_cli::sweeps::{run_sweep, SweepSpec};
use lmo_bounds::McConfig;

fn spec(figure: &str, seed: u64) -> SweepSpec {
    SweepSpec { figure: figure.to_string(), seed, mc_outer: None, mc_inner: None }
}

fn column(rows: &[ResultRow], bound: &str) -> Vec<(u32, f64)> {
    rows.iter()
        .filter(|r| r.bound == bound)
        .map(|r| (r.m, r.value))
        .collect()
}

#[test]
fn fig4_is_deterministic_and_converges() {
    let a = run_sweep(&spec("fig4", 7)).unwrap();
    let b = run_sweep(&spec("fig4", 7)).unwrap();
    assert_eq!(render(&a), render(&b));
    assert!(render(&a).starts_with(HEADER));

    let lmo = column(&a, "lmo-cmi");
    let mi = column(&a, "mi");
    let imi = column(&a, "imi");
    let mn = column(&a, "mn-ipcimi");
    // columns at m in {100, 1000, 10000} are non-increasing
    let tail: Vec<f64> =
        lmo.iter().filter(|(m, _)| *m >= 100).map(|&(_, v)| v).collect();
    assert!(tail.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    let tail_mn: Vec<f64> =
        mn.iter().filter(|(m, _)| *m >= 100).map(|&(_, v)| v).collect();
    assert!(tail_mn.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    // and land within 0.02 of their MI-family limits at m = 1e4
    let lmo_last = lmo.last().unwrap().1;
    assert!((lmo_last - mi[0].1).abs() <= 0.02);
    let mn_last = mn.last().unwrap().1;
    assert!((mn_last - imi[0].1).abs() <= 0.02);
    // the true generalization error column is present
    assert!(!column(&a, "true-gen").is_empty());
}

#[test]
fn fig7_disintegrated_column_relations() {
    let rows = run_sweep(&spec("fig7", 0)).unwrap();
    let lmo = column(&rows, "lmo-scmi-dis");
    let sic = column(&rows, "sicimi-dis");
    let tail: Vec<f64> =
        lmo.iter().filter(|(m, _)| *m >= 100).map(|&(_, v)| v).collect();
    assert!(tail.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    let at_m_max = lmo.last().unwrap().1;
    assert!(at_m_max < sic.last().unwrap().1);
    // the paired-setting column is constant across the grid
    assert!(sic.windows(2).all(|w| (w[1].1 - w[0].1).abs() < 1e-15));
}

#[test]
fn fig5_small_budget_runs_and_is_deterministic() {
    let small = SweepSpec {
        figure: "fig5".to_string(),
        seed: 3,
        mc_outer: Some(40),
        mc_inner: Some(400),
    };
    let a = run_sweep(&small).unwrap();
    let b = run_sweep(&small).unwrap();
    assert_eq!(render(&a), render(&b));
    for r in &a {
        assert!(r.value >= 0.0);
        if r.bound.ends_with("general") {
            assert!(r.stderr > 0.0);
            assert_eq!(r.provenance, "monte-carlo");
        }
    }
}

#[test]
fn fig6_small_budget_runs() {
    let small = SweepSpec {
        figure: "fig6".to_string(),
        seed: 3,
        mc_outer: Some(200),
        mc_inner: None,
    };
    let rows = run_sweep(&small).unwrap();
    // all four bounds at all four grid sizes
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| r.value.is_finite() && r.value >= 0.0));
}

#[test]
fn empty_row_set_renders_header_only() {
    assert_eq!(render(&[]), format!("{HEADER}\n"));
}

#[test]
fn unknown_figure_and_bound_are_usage_errors() {
    assert!(run_sweep(&spec("fig9", 0)).is_err());
    let ep = EvalParams {
        n: 4,
        m: 2,
        k: 1,
        p: 0.4,
        mu: 0.0,
        sigma: 1.0,
        delta: 1.0,
        seed: 0,
        mc: McConfig::default(),
    };
    assert!(evaluate("not-a-bound", &ep).is_err());
}

#[test]
fn single_bound_rows_round_values() {
    let ep = EvalParams {
        n: 10,
        m: 1,
        k: 1,
        p: 0.4,
        mu: 0.0,
        sigma: 1.0,
        delta: 1.0,
        seed: 0,
        mc: McConfig::default(),
    };
    let row = evaluate("true-gen", &ep).unwrap();
    assert_eq!(row.value, 0.048);
    let row = evaluate("loo-cmi", &ep).unwrap();
    assert!(row.value > 0.0);
    // the 0-1-loss prediction bound on a tiny instance recovers the exact
    // population risk through the JS inversion
    let ep = EvalParams { n: 3, p: 0.3, ..ep };
    let single = evaluate("js-pred-single", &ep).unwrap();
    assert!((single.value - 0.3864).abs() < 1e-3, "value {}", single.value);
    assert_eq!(single.provenance, "oracle");
}
