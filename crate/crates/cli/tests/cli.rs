use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fillings_core::complex::AbstractTriangulation;
use fillings_core::metrics::lipschitz_constant;
use fillings_core::plmesh::BalancedMesh;
use fillings_core::search::SearchResult;
use fillings_core::separators::{make_cut_instance, verify_certificate, MengerCertificate, SpernerWalk};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fillings")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

const W4: &str = r#"{"num_vertices":5,"boundary_n":4,"triangles":[[0,1,4],[1,2,4],[2,3,4],[0,3,4]]}"#;
const W5: &str = r#"{"num_vertices":6,"boundary_n":5,"triangles":[[0,1,5],[1,2,5],[2,3,5],[3,4,5],[0,4,5]]}"#;
const QUAD: &str = r#"{"num_vertices":4,"boundary_n":4,"triangles":[[0,1,2],[0,2,3]]}"#;

#[test]
fn verify_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let w4 = write(tmp.path(), "w4.json", W4);
    let o = run(&["verify", "-i", &w4, "--delta", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["lipschitz"]["isometric"], true);

    let quad = write(tmp.path(), "quad.json", QUAD);
    let o = run(&["verify", "-i", &quad, "--delta", "1"]);
    assert_eq!(code(&o), 1);
    let v = stdout_json(&o);
    assert_eq!(v["lipschitz"]["witness"], serde_json::json!([0, 2]));
    assert_eq!(v["lipschitz"]["delta"], serde_json::json!([1, 2]));
    assert_eq!(code(&run(&["verify", "-i", &quad, "--delta", "1/2"])), 0);

    let bad = write(tmp.path(), "bad.json", "{not json");
    assert_eq!(code(&run(&["verify", "-i", &bad])), 2);
    assert_eq!(code(&run(&["verify", "-i", "/nonexistent/file.json"])), 2);

    let broken = write(tmp.path(), "broken.json", r#"{"num_vertices":4,"triangles":[[0,1,2],[0,1,3],[0,1,2]]}"#);
    let o = run(&["verify", "-i", &broken]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout_json(&o)["valid"], false);
}

#[test]
fn bounds_table() {
    let o = run(&["bounds", "--n", "9"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["vertex_lower_bound_ceil"], 12);
    assert_eq!(v["triangle_lower_bound_ceil"], 13);
    assert_eq!(v["chi"], 2);
    let rows = v["path_sum"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[1]["bound"], serde_json::json!([4, 1]));
    let area = v["continuous_area_bound"].as_f64().unwrap();
    assert!((area - 4.2729).abs() < 1e-3);
    assert_eq!(code(&run(&["bounds", "--n", "9", "--delta", "0"])), 2);
    assert_eq!(code(&run(&["bounds", "--n", "2"])), 2);
}

#[test]
fn search_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("s");
    let o = run(&["search", "--n", "4", "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["d_value"], 5);
    let r: SearchResult = serde_json::from_str(&fs::read_to_string(out.join("search_result.json")).unwrap()).unwrap();
    assert!(r.proof_of_minimality);
    let w: AbstractTriangulation = serde_json::from_str(&fs::read_to_string(out.join("witness.json")).unwrap()).unwrap();
    assert!(w.is_valid());
    assert_eq!(Some(w), r.witness);

    let o = run(&["search", "--n", "3"]);
    assert_eq!(stdout_json(&o)["d_value"], 3);

    let o = run(&["search", "--n", "6", "--budget-nodes", "2"]);
    assert_eq!(code(&o), 3);
    let v = stdout_json(&o);
    assert_eq!(v["budget_exhausted"], true);
    assert_eq!(v["proof_of_minimality"], false);

    assert_eq!(code(&run(&["search", "--n", "2"])), 2);
    assert_eq!(code(&run(&["search", "--n", "4", "--epsilon", "1"])), 2);
}

#[test]
fn certificates_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let w5 = write(tmp.path(), "w5.json", W5);
    let out = tmp.path().join("c");
    let o = run(&["certificates", "-i", &w5, "--x", "0", "--y", "2", "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["num_paths"], 1);
    assert_eq!(v["path_floor"], 1);
    let cert: MengerCertificate = serde_json::from_str(&fs::read_to_string(out.join("menger.json")).unwrap()).unwrap();
    assert_eq!(cert.separator, vec![5]);
    let k: AbstractTriangulation = serde_json::from_str(W5).unwrap();
    verify_certificate(&make_cut_instance(&k, 0, 2).unwrap(), &cert).unwrap();
    let walk: SpernerWalk = serde_json::from_str(&fs::read_to_string(out.join("sperner.json")).unwrap()).unwrap();
    assert_eq!(walk.walk, vec![0, 5, 2]);
    walk.check(&k, 0, 2, &cert.separator).unwrap();

    assert_eq!(code(&run(&["certificates", "-i", &w5, "--x", "0", "--y", "1"])), 2);
    assert_eq!(code(&run(&["certificates", "-i", &w5, "--x", "0", "--y", "9"])), 2);
}

#[test]
fn mesh_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let tri = write(tmp.path(), "tri.json", r#"{"triangles":[[1,1,1]],"gluings":[]}"#);
    let out = tmp.path().join("m");
    let o = run(&["mesh", "-i", &tri, "--k", "10", "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    let area = v["report"]["area"].as_f64().unwrap();
    assert!((area - 3f64.sqrt() / 4.0).abs() < 1e-6);

    let mesh = BalancedMesh::from_json(&fs::read_to_string(out.join("mesh.json")).unwrap()).unwrap();
    assert!(mesh.complex.is_valid());
    let lip = lipschitz_constant(&mesh.complex).unwrap();
    assert_eq!(serde_json::to_value(&lip.delta_achieved.numer()).unwrap(), v["report"]["delta_exact"][0]);
    let off = fs::read_to_string(out.join("mesh.off")).unwrap();
    assert!(off.starts_with("OFF\n"));
    assert_eq!(off.lines().count(), 2 + mesh.complex.num_vertices() + mesh.complex.num_triangles());
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report, v["report"]);

    let bad = write(
        tmp.path(),
        "bad.json",
        r#"{"triangles":[[1,1,1],[2,2,2]],"gluings":[[[0,0],[1,0]]]}"#,
    );
    let o = run(&["mesh", "-i", &bad]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("validate_surface"));

    let garbage = write(tmp.path(), "garbage.json", "[1,2");
    assert_eq!(code(&run(&["mesh", "-i", &garbage])), 2);
}

#[test]
fn mesh_presets() {
    let o = run(&["mesh", "--preset", "hemisphere", "--n", "60"]);
    assert_eq!(code(&o), 0);
    let r = &stdout_json(&o)["report"];
    assert_eq!(r["n"], 60);
    assert!(r["delta_achieved"].as_f64().unwrap() >= 0.8);
    let ratio = r["vertex_ratio"].as_f64().unwrap();
    assert!((0.125..=0.30).contains(&ratio), "{ratio}");

    let o = run(&["mesh", "--preset", "wheel", "--n", "6"]);
    assert_eq!(stdout_json(&o)["report"]["num_vertices"], 7);
    assert_eq!(code(&run(&["mesh", "--preset", "disk", "--n", "7"])), 1);
    assert_eq!(code(&run(&["mesh", "--preset", "disk"])), 2);
}

#[test]
fn text_format_is_flat() {
    let o = run(&["bounds", "--n", "9", "--format", "text"]);
    assert_eq!(code(&o), 0);
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.lines().any(|l| l == "vertex_lower_bound_ceil = 12"));
    assert!(s.lines().all(|l| l.contains(" = ")));
}
