//! Configuration parsing, reports and small experiment runs.

use hlgt::harness::checks::run_property_suite;
use hlgt::harness::{run_experiment, ConfigFile, Overrides, Report, ReportRow};

const SMALL: &str = r#"
[tiny_upper]
kind = "upper_bound"
half_width = 3
beta = 0.1
kappa = 0.3
path = { kind = "rectangle", l1 = 2, l2 = 2, open = false }
mc = { sweeps = 256, burnin_frac = 0.2, chains = 1, batches = 16, thinning = 1, seed = 5 }

[tiny_line]
kind = "short_line"
n = 2
half_width = 3
beta = "inf"
kappa = 1.7
path = { kind = "straight", len = 2 }
"#;

#[test]
fn builtin_experiments_parse() {
    let file = ConfigFile::builtin();
    let ids: Vec<_> = file.experiments.keys().cloned().collect();
    assert_eq!(ids, ["cluster_events", "main_theorem", "ratio_gliozzi", "short_line", "upper_bound"]);
    for cfg in file.experiments.values() {
        cfg.mc.validate().unwrap();
        cfg.params().unwrap();
    }
}

#[test]
fn infinite_beta_and_defaults_parse() {
    let file = ConfigFile::parse(SMALL).unwrap();
    let line = &file.experiments["tiny_line"];
    assert_eq!(line.beta, f64::INFINITY);
    assert_eq!(line.mc, Default::default());
    assert!(ConfigFile::parse("[x]\nkind = \"nonsense\"").is_err());
}

#[test]
fn hash_tracks_overrides() {
    let file = ConfigFile::parse(SMALL).unwrap();
    let mut cfg = file.experiments["tiny_upper"].clone();
    let h = cfg.hash().unwrap();
    assert_eq!(h.len(), 64);
    assert_eq!(h, cfg.clone().hash().unwrap());
    Overrides { seed: Some(99), ..Default::default() }.apply(&mut cfg);
    assert_eq!(cfg.mc.seed, 99);
    assert_ne!(cfg.hash().unwrap(), h);
}

#[test]
fn small_experiment_reports_round_trip() {
    let file = ConfigFile::parse(SMALL).unwrap();
    let cfg = &file.experiments["tiny_upper"];
    let report = run_experiment("tiny_upper", cfg).unwrap();
    assert!(!report.rows.is_empty());
    assert_eq!(report.metadata["experiment"], "tiny_upper");
    assert_eq!(report.metadata["config_hash"], cfg.hash().unwrap());

    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    report.save(&json).unwrap();
    let back: Report = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(back.rows.len(), report.rows.len());

    let csv = dir.path().join("r.csv");
    report.save(&csv).unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("experiment,quantity"));
    assert_eq!(text.lines().count(), report.rows.len() + 1);
}

#[test]
fn report_verdicts() {
    let row = |pass| ReportRow::new("x", "q", 1, "h").verdict(pass, "check");
    assert!(Report::new(vec![row(true), ReportRow::new("x", "n", 1, "h").note("info")]).passed());
    assert!(!Report::new(vec![row(true), row(false)]).passed());
}

#[test]
fn property_suite_passes() {
    for r in run_property_suite(3, 8).unwrap() {
        assert_eq!(r.failures, 0, "{}", r.name);
        assert_eq!(r.cases, 8);
    }
}
