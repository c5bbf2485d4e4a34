//! End-to-end tests of the `nzsym` binary: output shapes, exit codes,
//! determinism, and flag plumbing.

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nzsym"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn info_summarizes_the_census_manifold() {
    let out = run(&["info", "fig8"]);
    assert_eq!(exit_code(&out), 0);
    let doc = json_of(&out);
    assert_eq!(doc["tetrahedra"], 2);
    assert_eq!(doc["closed"], true);
    let edges = doc["edge_classes"].as_array().unwrap();
    assert_eq!(edges.len(), 2);
    assert!(edges.iter().all(|e| e["size"] == 6 && e["interior"] == true));
    let links = doc["links"].as_array().unwrap();
    assert_eq!(links.len(), 1);
    assert_eq!(links[0]["kind"], "torus");
    assert_eq!(doc["sigma_triangles"], 0);
    assert_eq!(doc["spine_h1"]["rank"], 1);
}

#[test]
fn info_reports_disc_links_on_a_lone_tetrahedron() {
    let out = run(&["info", "single"]);
    assert_eq!(exit_code(&out), 0);
    let doc = json_of(&out);
    assert_eq!(doc["closed"], false);
    let links = doc["links"].as_array().unwrap();
    assert_eq!(links.len(), 4);
    assert!(links.iter().all(|l| l["kind"] == "disc"));
    assert_eq!(doc["sigma_triangles"], 4);
}

#[test]
fn bad_input_is_a_usage_error() {
    let out = run(&["info", "/nonexistent/manifold.json"]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "{{\"format\":\"wrong\",\"tetrahedra\":1,\"gluings\":[]}}").unwrap();
    let out = run(&["info", file.path().to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
}

#[test]
fn equations_export_has_the_expected_shape() {
    let out = run(&["equations", "fig8", "--n", "2"]);
    assert_eq!(exit_code(&out), 0);
    let doc = json_of(&out);
    let systems = doc["systems"].as_array().unwrap();
    assert_eq!(systems.len(), 1);
    let sys = &systems[0];
    assert_eq!(sys["n"], 2);
    assert_eq!(sys["variables"].as_array().unwrap().len(), 12);
    let rows = sys["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert_eq!(row["rhs"], 1);
        assert!(row["label"].as_str().unwrap().starts_with("edge:"));
        // The multiplicities of one edge class sum to the class size 6.
        let total: i64 = row["exponents"]
            .as_object()
            .unwrap()
            .values()
            .map(|v| v.as_i64().unwrap())
            .sum();
        assert_eq!(total, 6);
    }
}

#[test]
fn equations_write_to_a_file_with_o() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eqs.json");
    let out = run(&["equations", "fig8", "--n", "2..3", "-o", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["systems"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_range_aggregates_and_selects_the_convention() {
    let out = run(&["verify", "fig8", "--n", "2..3"]);
    assert_eq!(exit_code(&out), 0);
    let doc = json_of(&out);
    assert_eq!(doc["all_pass"], true);
    assert_eq!(doc["convention"], "signed-symmetric");
    assert_eq!(doc["degrees"], serde_json::json!([2, 3]));
    let checks = doc["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 11, "five checks per degree plus the convention record");
    assert!(checks.iter().all(|c| c["status"] != "fail"));
    let sel = checks.iter().find(|c| c["check"] == "h-convention").unwrap();
    assert_eq!(sel["status"], "pass");
    assert_eq!(sel["details"]["selected"], "signed-symmetric");
}

#[test]
fn verify_skips_closed_case_checks_without_torus_links() {
    let out = run(&["verify", "single", "--n", "3"]);
    assert_eq!(exit_code(&out), 0);
    let doc = json_of(&out);
    assert_eq!(doc["all_pass"], true);
    let status_of = |name: &str| {
        doc["checks"]
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["check"] == name)
            .unwrap_or_else(|| panic!("check {name} present"))["status"]
            .clone()
    };
    assert_eq!(status_of("complex-identities"), "pass");
    assert_eq!(status_of("dimension-formula"), "pass");
    assert_eq!(status_of("chain-pairing"), "skipped");
    assert_eq!(status_of("holonomy-lemma"), "skipped");
    assert_eq!(status_of("times-four"), "skipped");
    assert_eq!(status_of("h-convention"), "skipped");
}

#[test]
fn solver_output_is_deterministic_and_finds_the_geometric_point() {
    let first = run(&["solve2", "fig8", "--seed", "41"]);
    let second = run(&["solve2", "fig8", "--seed", "41"]);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(first.stdout, second.stdout, "same seed, same bytes");

    let doc = json_of(&first);
    let solutions = doc["solutions"].as_array().unwrap();
    let geometric: Vec<&Value> = solutions
        .iter()
        .filter(|s| {
            s["unipotent"] == true
                && s["shapes"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .all(|z| z[1].as_f64().unwrap() > 0.0)
        })
        .collect();
    assert_eq!(geometric.len(), 1, "unique complete positively oriented solution");
    let sol = geometric[0];
    for shape in sol["shapes"].as_array().unwrap() {
        assert!((shape[0].as_f64().unwrap() - 0.5).abs() < 1e-8);
        assert!((shape[1].as_f64().unwrap() - 3.0f64.sqrt() / 2.0).abs() < 1e-8);
    }
    let z = sol["z"].as_object().unwrap();
    assert_eq!(z.len(), 12);
    assert!(z.contains_key("T0:0,0,1,1"));
}

#[test]
fn rigidity_reports_expected_ranks() {
    let out = run(&["rigidity", "fig8", "--n", "2..3", "--seed", "7"]);
    assert_eq!(exit_code(&out), 0);
    let doc = json_of(&out);
    let reports = doc["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0]["peripheral_rank"], 1);
    assert_eq!(reports[1]["peripheral_rank"], 2);
    assert!(reports.iter().all(|r| r["conclusive"] == true));
}

#[test]
fn unsupported_degrees_are_usage_errors() {
    assert_eq!(exit_code(&run(&["rigidity", "fig8", "--n", "4"])), 2);
    assert_eq!(exit_code(&run(&["solve2", "fig8", "--n", "3"])), 2);
    assert_eq!(exit_code(&run(&["equations", "fig8", "--n", "1"])), 2);
    assert_eq!(exit_code(&run(&["equations", "fig8", "--n", "4..2"])), 2);
}

#[test]
fn tolerance_flags_reach_the_solver() {
    let out = run(&["solve2", "fig8", "--seed", "41", "--tol-newton-starts", "8"]);
    let doc = json_of(&out);
    assert_eq!(doc["starts"], 8);
    assert_eq!(doc["tolerances"]["newton_starts"], 8);
}

#[test]
fn file_input_round_trips() {
    let fixture = run(&["info", "fig8"]);
    let via_flag = run(&["info", "--fixture", "fig8"]);
    assert_eq!(fixture.stdout, via_flag.stdout);

    let tri = nzsym::triangulation::Triangulation::fixture("fig8").unwrap();
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(tri.to_json().as_bytes()).unwrap();
    let from_file = run(&["info", file.path().to_str().unwrap()]);
    assert_eq!(exit_code(&from_file), 0);
    let mut a = json_of(&fixture);
    let mut b = json_of(&from_file);
    a["input"] = Value::Null;
    b["input"] = Value::Null;
    assert_eq!(a, b);
}

#[test]
fn nz_data_exports_the_standard_symplectic_gram() {
    let out = run(&["nz-data", "fig8", "--n", "2"]);
    assert_eq!(exit_code(&out), 0);
    let doc = json_of(&out);
    let data = &doc["data"].as_array().unwrap()[0];
    assert_eq!(data["free_rank"], 2);
    assert_eq!(data["gram"], serde_json::json!([[0, -1], [1, 0]]));
    assert_eq!(data["generators"].as_array().unwrap().len(), 2);
}
