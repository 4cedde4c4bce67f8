use std::path::{Path, PathBuf};

use ergowalk_cli::{parse_config, parse_value, ConfigError, Scenario, Subcommand};
use serde_json::json;

fn data() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn issues(value: serde_json::Value, base: &Path) -> Vec<String> {
    match parse_value(&value, base) {
        Err(ConfigError::Invalid(list)) => list.iter().map(|i| i.path.clone()).collect(),
        Err(e) => panic!("unexpected error kind: {e}"),
        Ok(_) => panic!("config should be rejected"),
    }
}

#[test]
fn minimal_lattice_config() {
    let cfg = parse_value(&json!({"scenario": "slow-mode", "N": [5, 7, 9]}), Path::new(".")).unwrap();
    assert_eq!(cfg.subcommand, Subcommand::Lattice);
    match cfg.scenario {
        Scenario::SlowMode(p) => {
            assert_eq!(p.sizes, vec![5, 7, 9]);
            assert_eq!(p.dim, 1);
            assert_eq!(p.site, 0);
        }
        other => panic!("wrong scenario {other:?}"),
    }
    assert!(cfg.out.is_none() && cfg.tolerance.is_none());
}

#[test]
fn unknown_scenario_names_the_field() {
    assert_eq!(issues(json!({"scenario": "nope", "N": [5]}), Path::new(".")), vec!["scenario"]);
    assert_eq!(issues(json!({"N": [5]}), Path::new(".")), vec!["scenario"]);
}

#[test]
fn crystal_config_loads_the_graph() {
    let base = data().join("scenarios");
    let cfg = parse_value(
        &json!({
            "scenario": "cell-uniform",
            "cases": [{"graph": "../graphs/strip3.json", "averages": [1, 2, 3], "expected": 2.0}]
        }),
        &base,
    )
    .unwrap();
    let Scenario::CellUniform(c) = cfg.scenario else { panic!("wrong scenario") };
    assert_eq!(c.cases[0].graph.vertices(), 3);
    assert_eq!(c.side, 8);
}

#[test]
fn sweeps_must_be_nonempty_and_increasing() {
    assert_eq!(issues(json!({"scenario": "slow-mode", "N": []}), Path::new(".")), vec!["N"]);
    assert_eq!(issues(json!({"scenario": "slow-mode", "N": [5, 7, 7]}), Path::new(".")), vec!["N[2]"]);
    assert_eq!(issues(json!({"scenario": "torus-rate", "E": [1e3, 1e2]}), Path::new(".")), vec!["E[1]"]);
    assert_eq!(issues(json!({"scenario": "slow-mode", "N": [5, "x"]}), Path::new(".")), vec!["N[1]"]);
}

#[test]
fn every_problem_is_reported() {
    let found = issues(
        json!({
            "schema": 2,
            "subcommand": "torus",
            "scenario": "slow-mode",
            "N": [2, 1],
            "site": -1,
            "extra": true
        }),
        Path::new("."),
    );
    for path in ["schema", "N[1]", "site"] {
        assert!(found.iter().any(|p| p == path), "{path} missing from {found:?}");
    }
}

#[test]
fn subcommand_mismatch_and_unknown_fields() {
    let found = issues(json!({"subcommand": "torus", "scenario": "slow-mode", "N": [5]}), Path::new("."));
    assert_eq!(found, vec!["subcommand"]);
    let found = issues(json!({"scenario": "slow-mode", "N": [5], "horizon": 3}), Path::new("."));
    assert_eq!(found, vec!["horizon"]);
}

#[test]
fn missing_graph_file_is_reported_with_its_path() {
    let found = issues(
        json!({
            "scenario": "crystal-weights",
            "cases": [
                {"graph": "../graphs/strip3.json", "vertex": 5, "expected": [1, 0, 0]},
                {"graph": "no-such.json", "vertex": 0, "expected": [1]}
            ]
        }),
        &data().join("scenarios"),
    );
    assert_eq!(found, vec!["cases[0].vertex", "cases[1].graph"]);
}

#[test]
fn read_and_json_errors() {
    assert!(matches!(parse_config("/no/such/config.json"), Err(ConfigError::Read { .. })));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ not json").unwrap();
    assert!(matches!(parse_config(&path), Err(ConfigError::Json { .. })));
}

#[test]
fn shipped_scenarios_cover_every_scenario_once() {
    let mut names = Vec::new();
    for entry in std::fs::read_dir(data().join("scenarios")).unwrap() {
        let path = entry.unwrap().path();
        let cfg = parse_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(path.file_stem().unwrap().to_str().unwrap(), cfg.scenario.name());
        names.push(cfg.scenario.name());
    }
    names.sort();
    let mut all: Vec<&str> = ergowalk_cli::config::SCENARIOS.iter().map(|(n, _)| *n).collect();
    all.sort();
    assert_eq!(names, all);
}
