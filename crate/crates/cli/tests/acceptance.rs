//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines are always printed; exits non-zero if any
//! criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use fillings_core::bounds::{continuous_area_bound, path_sum_bound, vertex_lower_bound};
use fillings_core::plmesh::{
    balanced_with_plan, dirichlet_plan, disk_preset, discretized_hemisphere, heron_area, unit_square,
};
use fillings_core::rational::to_f64;
use fillings_core::search::{compute_d, enumerate_fillings, Budget, SearchOptions};
use fillings_core::Rational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn one() -> Rational {
    Rational::from_integer(1)
}

fn formulas() -> Outcome {
    let n = 10_000u64;
    let v = vertex_lower_bound(n, &one()).map_err(|e| e.to_string())?.to_f64();
    let ratio = v / (n * n) as f64;
    if (ratio - 0.125).abs() > 1e-3 {
        return Err(format!("vertex bound / n² = {ratio}"));
    }
    let area = continuous_area_bound(1.0, 2.0 * PI).map_err(|e| e.to_string())?;
    let expected = 3f64.sqrt() / 4.0 * PI * PI;
    if (area - expected).abs() > 1e-9 {
        return Err(format!("area bound {area} vs {expected}"));
    }
    Ok(format!("vertex bound / n² = {ratio:.6}, area bound = {area:.10}"))
}

fn path_sum() -> Outcome {
    let mut checked = 0u64;
    for n in 4..=12 {
        for x in 0..n {
            for y in x + 2..n {
                if x == 0 && y == n - 1 {
                    continue;
                }
                for k in 1..=4u64 {
                    if let Some(s) = common::min_path_sum(n, x, y, k as usize) {
                        checked += 1;
                        if Rational::from_integer(s as i64) < path_sum_bound(k) {
                            return Err(format!("n={n} x={x} y={y} k={k}: minimum sum {s}"));
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{checked} (n, x, y, k) cases, zero violations"))
}

fn discrete_search() -> Outcome {
    let expected = [(3usize, 3usize), (4, 5), (5, 6)];
    let mut found = Vec::new();
    let zero = Rational::from_integer(0);
    for (n, d) in expected {
        let r = compute_d(n, &zero, &SearchOptions::default()).map_err(|e| e.to_string())?;
        let bound = vertex_lower_bound(n as u64, &one()).map_err(|e| e.to_string())?.ceil_i64();
        if r.d_value != Some(d) || !r.proof_of_minimality {
            return Err(format!("D({n};0) = {:?}, proven = {}", r.d_value, r.proof_of_minimality));
        }
        if (d as i64) < bound {
            return Err(format!("D({n};0) = {d} below bound {bound}"));
        }
        found.push(format!("D({n};0)={d}"));
    }
    let opts = SearchOptions {
        budget: Budget {
            max_nodes: Some(10_000_000),
            max_seconds: None,
        },
        threads: 1,
    };
    let r = compute_d(6, &zero, &opts).map_err(|e| e.to_string())?;
    let bound = vertex_lower_bound(6, &one()).map_err(|e| e.to_string())?.ceil_i64();
    match r.d_value {
        Some(d) if r.proof_of_minimality && (d as i64) < bound => {
            return Err(format!("D(6;0) = {d} below bound {bound}"));
        }
        Some(d) => found.push(format!(
            "D(6;0)={d} ({}, {} nodes)",
            if r.proof_of_minimality { "proven" } else { "unproven" },
            r.nodes_explored
        )),
        None => return Err(format!("D(6;0) not found within budget ({} nodes)", r.nodes_explored)),
    }
    Ok(found.join(", "))
}

/// Fillings with `n ≤ 7` from the enumerator, then 1000 random disks on at
/// most 12 vertices.
fn corpus() -> Result<Vec<fillings_core::AbstractTriangulation>, String> {
    let mut all = Vec::new();
    for (n, max_v) in [(4, 6), (5, 7), (6, 8), (7, 8)] {
        let e = enumerate_fillings(n, max_v, None).map_err(|e| e.to_string())?;
        all.extend(e.fillings);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut random = 0;
    while random < 1000 {
        let k = common::random_disk(&mut rng, 12);
        if k.boundary_tag().unwrap_or(0) >= 4 {
            all.push(k);
            random += 1;
        }
    }
    Ok(all)
}

fn over_corpus(
    corpus: &[fillings_core::AbstractTriangulation],
    check: fn(&fillings_core::AbstractTriangulation) -> Result<usize, String>,
) -> Outcome {
    let mut pairs = 0;
    for k in corpus {
        pairs += check(k)?;
    }
    Ok(format!("{} complexes, {pairs} cuts, zero violations", corpus.len()))
}

fn mesh_quality() -> Outcome {
    let square = unit_square();
    let mut first: Option<f64> = None;
    let mut lines = Vec::new();
    for k in [10u64, 20, 50] {
        let plan = dirichlet_plan(&square, k).map_err(|e| e.to_string())?;
        let mesh = balanced_with_plan(&square, &plan).map_err(|e| e.to_string())?;
        let s = &mesh.stats;
        let eps = plan.epsilon;
        if (s.total_area - 1.0).abs() > 1e-6 {
            return Err(format!("k={k}: area {}", s.total_area));
        }
        let mut equilateral = 0;
        for t in mesh.complex.triangles() {
            let l = [
                mesh.length(t[0], t[1]).ok_or("missing length")?,
                mesh.length(t[1], t[2]).ok_or("missing length")?,
                mesh.length(t[0], t[2]).ok_or("missing length")?,
            ];
            if l.iter().all(|&x| x == eps) {
                equilateral += 1;
                let a = heron_area(l[0], l[1], l[2]).map_err(|e| e.to_string())?;
                if (a - 3f64.sqrt() / 4.0 * eps * eps).abs() > 1e-15 {
                    return Err(format!("k={k}: equilateral triangle of area {a}"));
                }
            }
        }
        if equilateral != s.equilateral_count {
            return Err(format!(
                "k={k}: {} flagged equilateral, {equilateral} have all sides ε",
                s.equilateral_count
            ));
        }
        let n = mesh.complex.boundary_tag().ok_or("square mesh has no single boundary")?;
        for i in 0..n {
            let l = mesh.length(i as u32, ((i + 1) % n) as u32).ok_or("missing boundary length")?;
            if (l - eps).abs() > plan.deviation + 1e-12 {
                return Err(format!("k={k}: boundary edge {l} vs ε = {eps}, deviation {}", plan.deviation));
            }
        }
        let c = s.non_equilateral_count as f64 * eps;
        let base = *first.get_or_insert(c);
        if c > 4.0 * base {
            return Err(format!("k={k}: non-equilateral·ε = {c} exceeds 4 × {base}"));
        }
        lines.push(format!("k={k}: ε={eps:.5}, non-eq·ε={c:.2}"));
    }
    Ok(lines.join("; "))
}

fn bracketing() -> Outcome {
    let n = 96;
    let (k, lip) = discretized_hemisphere(n).map_err(|e| e.to_string())?;
    let delta = to_f64(&lip.delta_achieved);
    let ratio = k.num_vertices() as f64 / (n * n) as f64;
    if delta < 0.8 {
        return Err(format!("hemisphere n={n}: δ = {delta}"));
    }
    if !(0.125..=0.30).contains(&ratio) {
        return Err(format!("hemisphere n={n}: |V|/n² = {ratio}"));
    }
    let disk = disk_preset(64).map_err(|e| e.to_string())?;
    let dl = fillings_core::lipschitz_constant(&disk.complex).map_err(|e| e.to_string())?;
    let dd = to_f64(&dl.delta_achieved);
    if (dd - 2.0 / PI).abs() > 0.1 {
        return Err(format!("disk δ = {dd}, 2/π = {}", 2.0 / PI));
    }
    Ok(format!("hemisphere n={n}: δ={delta:.4}, |V|/n²={ratio:.4}; disk n=64: δ={dd:.4}"))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_fillings"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map(|rd| {
            rd.filter_map(|e| e.ok())
                .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap()))
                .collect()
        })
        .unwrap_or_default();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = tmp.path();
    let w4 = root.join("w4.json");
    std::fs::write(&w4, r#"{"num_vertices":5,"boundary_n":4,"triangles":[[0,1,4],[1,2,4],[2,3,4],[0,3,4]]}"#)
        .map_err(|e| e.to_string())?;
    let w5 = root.join("w5.json");
    std::fs::write(
        &w5,
        r#"{"num_vertices":6,"boundary_n":5,"triangles":[[0,1,5],[1,2,5],[2,3,5],[3,4,5],[0,4,5]]}"#,
    )
    .map_err(|e| e.to_string())?;
    let tri = root.join("tri.json");
    std::fs::write(&tri, r#"{"triangles":[[1,1,1]],"gluings":[]}"#).map_err(|e| e.to_string())?;
    let p = |x: &Path| x.to_string_lossy().into_owned();

    let cases: Vec<(&str, Vec<Vec<String>>)> = vec![
        ("verify", vec![vec!["verify".into(), "-i".into(), p(&w4), "--delta".into(), "1".into()]]),
        ("bounds", vec![vec!["bounds".into(), "--n".into(), "9".into(), "--format".into(), "text".into()]]),
        (
            "search",
            [1, 4, 4]
                .iter()
                .map(|t| {
                    vec![
                        "search".into(),
                        "--n".into(),
                        "6".into(),
                        "--threads".into(),
                        t.to_string(),
                        "-o".into(),
                        "{out}".into(),
                    ]
                })
                .collect(),
        ),
        (
            "certificates",
            vec![vec![
                "certificates".into(),
                "-i".into(),
                p(&w5),
                "--x".into(),
                "0".into(),
                "--y".into(),
                "2".into(),
                "-o".into(),
                "{out}".into(),
            ]],
        ),
        (
            "mesh",
            vec![vec!["mesh".into(), "-i".into(), p(&tri), "--k".into(), "10".into(), "-o".into(), "{out}".into()]],
        ),
        (
            "mesh preset",
            vec![vec![
                "mesh".into(),
                "--preset".into(),
                "hemisphere".into(),
                "--n".into(),
                "48".into(),
                "-o".into(),
                "{out}".into(),
            ]],
        ),
    ];
    let mut run_id = 0;
    for (name, variants) in &cases {
        let mut reference: Option<(i32, Vec<u8>, Vec<(String, Vec<u8>)>)> = None;
        for args in variants {
            // every variant twice
            for _ in 0..2 {
                run_id += 1;
                let out = root.join(format!("out{run_id}"));
                let args: Vec<String> = args.iter().map(|a| a.replace("{out}", &p(&out))).collect();
                let refs: Vec<&str> = args.iter().map(String::as_str).collect();
                let (code, stdout) = run_cli(&refs);
                let files = dir_bytes(&out);
                let got = (code, stdout, files);
                match &reference {
                    None => {
                        if code != 0 {
                            return Err(format!("{name}: exit {code}"));
                        }
                        reference = Some(got);
                    }
                    Some(r) if *r != got => return Err(format!("{name}: output differs for {args:?}")),
                    Some(_) => {}
                }
            }
        }
    }
    Ok(format!("{} subcommand setups, {run_id} runs, byte-identical", cases.len()))
}

fn main() {
    let mut failed = 0;
    let mut report = |id: u32, title: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let res = f();
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(msg) => println!("PASS [{id}] {title}: {msg} ({secs:.1}s)"),
            Err(msg) => {
                failed += 1;
                println!("FAIL [{id}] {title}: {msg} ({secs:.1}s)");
            }
        }
    };
    report(1, "formula reproduction", &mut formulas);
    report(2, "path-sum oracle", &mut path_sum);
    report(3, "discrete bound vs exhaustive search", &mut discrete_search);
    let corpus = corpus();
    report(4, "Menger duality", &mut || match &corpus {
        Ok(c) => over_corpus(c, common::check_menger),
        Err(e) => Err(e.clone()),
    });
    report(5, "Sperner constructiveness", &mut || match &corpus {
        Ok(c) => over_corpus(c, common::check_sperner),
        Err(e) => Err(e.clone()),
    });
    report(6, "mesh pipeline quality", &mut mesh_quality);
    report(7, "D* bracketing at desk scale", &mut bracketing);
    report(8, "CLI determinism", &mut determinism);
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
