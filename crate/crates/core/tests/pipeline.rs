//! End-to-end runs through the config layer, exercising model assembly,
//! checks, report emission and CSV output on derived scenarios.

mod common;

use wricci::comparison::Verdict;
use wricci::config::{run, write_margin_csvs, RunConfig};

fn run_json(text: &str) -> wricci::config::Report {
    let cfg: RunConfig = serde_json::from_str(text).unwrap();
    run(&cfg).unwrap()
}

#[test]
fn gaussian_shrinker_touches_the_bound_at_the_origin() {
    let report = run_json(
        r#"{
            "params": {"n": 3, "N": "inf", "eps": 0.0},
            "model": {"family": "euclidean", "t_max": 3.0},
            "weight": {"type": "gradient", "f": {"type": "quadratic", "coeff": 0.5}},
            "kappa": {"type": "constant", "value": 0.5},
            "checks": ["hypothesis", "riccati", "laplacian"]
        }"#,
    );
    assert_eq!(report.canonical.exit_code, 0);
    let hyp = &report.canonical.checks[0];
    assert_eq!(hyp.verdict, Verdict::Holds);
    // curvature equals the required bound at the origin and exceeds it after
    let min = hyp.min_slack();
    assert!(min >= 0.0 && min < 1e-3, "min slack {min}");
    let far = hyp.margin.last().unwrap().1;
    assert!(far > 0.5, "slack far out {far}");
}

#[test]
fn custom_sampled_profile_runs_with_loosened_tolerance() {
    let nodes = 201;
    let grid: Vec<f64> = (0..nodes)
        .map(|i| std::f64::consts::PI * i as f64 / (nodes - 1) as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|t| t.sin()).collect();
    let cfg = serde_json::json!({
        "params": {"n": 3, "N": 3, "eps": 0.0},
        "model": {
            "family": "custom",
            "grid": grid,
            "values": values,
            "end_slope": -1.0,
            "two_pole": true
        },
        "kappa": {"type": "constant", "value": 1.0},
        "checks": ["hypothesis", "laplacian", "diameter"],
        "tolerances": {"check_tol": 5e-3}
    });
    let cfg: RunConfig = serde_json::from_value(cfg).unwrap();
    let report = run(&cfg).unwrap();
    assert_eq!(report.canonical.exit_code, 0, "{:?}", report.canonical.summary);
}

#[test]
fn margin_csvs_are_emitted_per_check() {
    let report = run_json(
        r#"{
            "params": {"n": 3, "N": 3, "eps": 0.0},
            "model": {"family": "sphere"},
            "kappa": {"type": "constant", "value": 1.0},
            "checks": ["hypothesis", "laplacian"]
        }"#,
    );
    let dir = std::env::temp_dir().join(format!("wricci-csv-{}", std::process::id()));
    write_margin_csvs(&report, &dir).unwrap();
    for name in ["hypothesis_full", "laplacian"] {
        let text = std::fs::read_to_string(dir.join(format!("{name}.csv"))).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("probe,slack"));
        let rows: Vec<_> = lines.collect();
        assert!(rows.len() > 10, "{name}: only {} rows", rows.len());
        for row in rows {
            let (a, b) = row.split_once(',').unwrap();
            a.parse::<f64>().unwrap();
            b.parse::<f64>().unwrap();
        }
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bundled_corpus_runs_clean_through_the_api() {
    for path in common::corpus_paths() {
        let text = std::fs::read_to_string(&path).unwrap();
        let cfg: RunConfig = serde_json::from_str(&text).unwrap();
        let report = run(&cfg).unwrap();
        assert_eq!(
            report.canonical.exit_code,
            0,
            "{}: {:?}",
            path.display(),
            report.canonical.summary
        );
        for c in &report.canonical.checks {
            assert_ne!(c.verdict, Verdict::Violated, "{} in {}", c.name, path.display());
        }
    }
}

#[test]
fn delta_rescaled_sphere_attains_the_doubled_diameter() {
    let delta = 0.5f64 * (2.0f64).ln();
    let cfg = serde_json::json!({
        "params": {"n": 3, "N": 1, "eps": 0.0},
        "model": {"family": "sphere", "radius": 2.0},
        "weight": {"type": "gradient", "f": {"type": "constant", "value": 2.0 * delta}},
        "kappa": {"type": "constant", "value": 1.0},
        "checks": ["hypothesis", "laplacian", "bounded_density"],
        "delta": delta,
        "rigidity": {"max_diameter": true}
    });
    let cfg: RunConfig = serde_json::from_value(cfg).unwrap();
    let report = run(&cfg).unwrap();
    assert_eq!(report.canonical.exit_code, 0, "{:?}", report.canonical.summary);
    let md = report.canonical.max_diameter.as_ref().unwrap();
    assert_eq!(
        md.bounded_density_rigid,
        Some(true),
        "rescaled sphere should classify as rigid"
    );
}
