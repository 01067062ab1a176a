//! `fillings`: verify fillings, print bounds, search for minimal fillings,
//! extract separator certificates and mesh PL surfaces.
//!
//! Exit codes: 0 success, 1 domain failure, 2 input error, 3 budget
//! exhausted.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fillings_core::bounds::{
    continuous_area_bound, menger_path_floor, path_sum_bound, triangle_lower_bound, vertex_lower_bound,
};
use fillings_core::complex::{AbstractTriangulation, ValidationReport, VertexId};
use fillings_core::metrics::{is_delta_filling, lipschitz_constant, LipschitzReport};
use fillings_core::plmesh::{
    balanced_triangulation, disk_preset, hemisphere_preset, report_for_mesh, to_off, validate_surface,
    wheel_preset, BalancedMesh, PLSurface,
};
use fillings_core::rational::{self, parse_rational, Rational};
use fillings_core::search::{compute_d, Budget, SearchOptions, SearchResult};
use fillings_core::separators::{make_cut_instance, max_disjoint_paths, sperner_walk, MengerCertificate, SpernerWalk};
use serde::Serialize;
use thiserror::Error;

use render::Format;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Domain(String),
    #[error("budget exhausted")]
    Budget,
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Input(_) => 2,
            CliError::Budget => 3,
        }
    }
}

type CliResult = Result<(), CliError>;

#[derive(Parser, Debug)]
#[command(name = "fillings", version, about = "Lipschitz fillings of cycles")]
struct Cli {
    /// Output rendering on stdout.
    #[arg(long, value_enum, global = true, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Preset {
    Hemisphere,
    Disk,
    Wheel,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a triangulation is a valid δ-Lipschitz filling.
    Verify {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value = "1", value_parser = parse_ratio)]
        delta: Rational,
    },
    /// Print the lower bounds for a δ-Lipschitz filling of C_n.
    Bounds {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "1", value_parser = parse_ratio)]
        delta: Rational,
        /// Euler characteristic of the closed-up surface (2 for a disk).
        #[arg(long, default_value_t = 2)]
        chi: i64,
        /// Circumference for the continuous area bound.
        #[arg(long, default_value_t = 2.0 * std::f64::consts::PI)]
        ell: f64,
    },
    /// Find the fewest vertices of a (1-ε)-Lipschitz filling of C_n.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "0", value_parser = parse_ratio)]
        epsilon: Rational,
        #[arg(long)]
        budget_nodes: Option<u64>,
        #[arg(long)]
        budget_seconds: Option<f64>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Directory for search_result.json and witness.json.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Disjoint paths, minimum separator and Sperner walk for a cut at x, y.
    Certificates {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        x: VertexId,
        #[arg(long)]
        y: VertexId,
        /// Directory for menger.json and sperner.json.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Triangulate a PL surface with near-equilateral triangles.
    Mesh {
        /// PL surface JSON; exclusive with --preset.
        #[arg(short, long, conflicts_with = "preset", required_unless_present = "preset")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        k: u64,
        #[arg(long, value_enum, requires = "n")]
        preset: Option<Preset>,
        /// Boundary length of the preset.
        #[arg(long)]
        n: Option<usize>,
        /// Directory for mesh.json, mesh.off and report.json.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn parse_ratio(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn prepare_dir(dir: &Option<PathBuf>) -> CliResult {
    if let Some(d) = dir {
        fs::create_dir_all(d).map_err(|e| CliError::Input(format!("{}: {e}", d.display())))?;
    }
    Ok(())
}

fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn parse_triangulation(text: &str) -> Result<AbstractTriangulation, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("triangulation JSON: {e}")))
}

#[derive(Serialize)]
struct VerifyOutput {
    valid: bool,
    validation: ValidationReport,
    #[serde(with = "rational::pair")]
    delta: Rational,
    lipschitz: Option<LipschitzReport>,
    is_delta_filling: bool,
    error: Option<String>,
}

fn cmd_verify(fmt: Format, input: &Path, delta: Rational) -> CliResult {
    fillings_core::metrics::check_delta(&delta).map_err(|e| CliError::Input(e.to_string()))?;
    let k = parse_triangulation(&read_input(input)?)?;
    let validation = k.validate();
    let valid = validation.is_valid();
    let mut out = VerifyOutput {
        valid,
        validation,
        delta,
        lipschitz: None,
        is_delta_filling: false,
        error: None,
    };
    if valid {
        match lipschitz_constant(&k) {
            Ok(rep) => {
                out.is_delta_filling = is_delta_filling(&k, &delta).unwrap_or(false);
                out.lipschitz = Some(rep);
            }
            Err(e) => out.error = Some(e.to_string()),
        }
    }
    render::emit(fmt, &out);
    if out.valid && out.is_delta_filling {
        Ok(())
    } else {
        Err(CliError::Domain(match (&out.error, out.valid) {
            (Some(e), _) => e.clone(),
            (None, false) => "not a valid triangulation".into(),
            (None, true) => format!("not a {}-Lipschitz filling", rational::Display(&delta)),
        }))
    }
}

#[derive(Serialize)]
struct PathSumRow {
    k: u64,
    #[serde(with = "rational::pair")]
    bound: Rational,
}

#[derive(Serialize)]
struct BoundsOutput {
    n: u64,
    #[serde(with = "rational::pair")]
    delta: Rational,
    chi: i64,
    ell: f64,
    /// `δ³(n−1)²/8 + (n−1)/2`
    vertex_lower_bound: f64,
    vertex_lower_bound_ceil: i64,
    /// `δ³(n−1)²/4 + 1 − 2χ`
    triangle_lower_bound: f64,
    triangle_lower_bound_ceil: i64,
    /// `k(k+2)/2`
    path_sum: Vec<PathSumRow>,
    /// `(√3/16)·δ³·ℓ²`
    continuous_area_bound: f64,
}

fn cmd_bounds(fmt: Format, n: u64, delta: Rational, chi: i64, ell: f64) -> CliResult {
    let input = |e: fillings_core::bounds::BoundsError| CliError::Input(e.to_string());
    let v = vertex_lower_bound(n, &delta).map_err(input)?;
    let t = triangle_lower_bound(n, &delta, chi).map_err(input)?;
    let area = continuous_area_bound(rational::to_f64(&delta), ell).map_err(input)?;
    let out = BoundsOutput {
        n,
        delta,
        chi,
        ell,
        vertex_lower_bound: v.to_f64(),
        vertex_lower_bound_ceil: v.ceil_i64(),
        triangle_lower_bound: t.to_f64(),
        triangle_lower_bound_ceil: t.ceil_i64(),
        path_sum: (1..=(n / 2).max(1))
            .map(|k| PathSumRow {
                k,
                bound: path_sum_bound(k),
            })
            .collect(),
        continuous_area_bound: area,
    };
    render::emit(fmt, &out);
    Ok(())
}

fn cmd_search(fmt: Format, n: usize, epsilon: Rational, budget: Budget, threads: usize, output: &Option<PathBuf>) -> CliResult {
    prepare_dir(output)?;
    if threads == 0 {
        return Err(CliError::Input("--threads must be at least 1".into()));
    }
    let opts = SearchOptions { budget, threads };
    let result: SearchResult = compute_d(n, &epsilon, &opts).map_err(|e| CliError::Input(e.to_string()))?;
    if let Some(dir) = output {
        write_file(dir, "search_result.json", &json(&result))?;
        if let Some(w) = &result.witness {
            write_file(dir, "witness.json", &json(w))?;
        }
    }
    render::emit(fmt, &result);
    if result.budget_exhausted {
        return Err(CliError::Budget);
    }
    Ok(())
}

#[derive(Serialize)]
struct CertificatesOutput {
    n: usize,
    x: VertexId,
    y: VertexId,
    #[serde(with = "rational::pair")]
    delta: Rational,
    /// `⌈δ·⌊n/2⌋⌉ − 1`
    path_floor: i64,
    num_paths: usize,
    menger: MengerCertificate,
    sperner: SpernerWalk,
}

fn cmd_certificates(fmt: Format, input: &Path, x: VertexId, y: VertexId, output: &Option<PathBuf>) -> CliResult {
    prepare_dir(output)?;
    let k = parse_triangulation(&read_input(input)?)?;
    let report = k.validate();
    if let Some(v) = report.violations.first() {
        return Err(CliError::Input(format!("invalid triangulation: {v}")));
    }
    let inst = make_cut_instance(&k, x, y).map_err(|e| CliError::Input(e.to_string()))?;
    let lip = lipschitz_constant(&k).map_err(|e| CliError::Input(e.to_string()))?;
    let menger = max_disjoint_paths(&inst);
    let sperner = sperner_walk(&k, x, y, &menger.separator).map_err(|e| CliError::Domain(e.to_string()))?;
    let n = inst.cycle().len();
    if let Some(dir) = output {
        write_file(dir, "menger.json", &json(&menger))?;
        write_file(dir, "sperner.json", &json(&sperner))?;
    }
    let out = CertificatesOutput {
        n,
        x,
        y,
        path_floor: menger_path_floor(n as u64, &lip.delta_achieved),
        delta: lip.delta_achieved,
        num_paths: menger.paths.len(),
        menger,
        sperner,
    };
    render::emit(fmt, &out);
    Ok(())
}

#[derive(Serialize)]
struct MeshOutput<'a> {
    stats: &'a fillings_core::plmesh::MeshStats,
    report: Option<fillings_core::plmesh::FillingReport>,
}

fn cmd_mesh(
    fmt: Format,
    input: &Option<PathBuf>,
    k: u64,
    preset: Option<Preset>,
    n: Option<usize>,
    output: &Option<PathBuf>,
) -> CliResult {
    prepare_dir(output)?;
    let domain = |e: fillings_core::plmesh::PlMeshError| CliError::Domain(e.to_string());
    let mesh: BalancedMesh = match (input, preset) {
        (Some(path), _) => {
            let surface: PLSurface = serde_json::from_str(&read_input(path)?)
                .map_err(|e| CliError::Input(format!("surface JSON: {e}")))?;
            let check = validate_surface(&surface);
            if let Some(v) = check.violations.first() {
                return Err(CliError::Domain(format!("validate_surface: {v}")));
            }
            balanced_triangulation(&surface, k).map_err(domain)?
        }
        (None, Some(p)) => {
            let n = n.ok_or_else(|| CliError::Input("--preset needs --n".into()))?;
            match p {
                Preset::Hemisphere => hemisphere_preset(n),
                Preset::Disk => disk_preset(n),
                Preset::Wheel => wheel_preset(n),
            }
            .map_err(domain)?
        }
        (None, None) => return Err(CliError::Input("one of --input or --preset is required".into())),
    };
    let report = match mesh.complex.boundary_tag() {
        Some(_) => Some(report_for_mesh(&mesh).map_err(domain)?),
        None => None,
    };
    if let Some(dir) = output {
        let mut mesh_json = mesh.to_json();
        mesh_json.push('\n');
        write_file(dir, "mesh.json", &mesh_json)?;
        write_file(dir, "mesh.off", &to_off(&mesh))?;
        write_file(dir, "report.json", &json(&report))?;
    }
    render::emit(
        fmt,
        &MeshOutput {
            stats: &mesh.stats,
            report,
        },
    );
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    let fmt = cli.format;
    match cli.command {
        Command::Verify { input, delta } => cmd_verify(fmt, &input, delta),
        Command::Bounds { n, delta, chi, ell } => cmd_bounds(fmt, n, delta, chi, ell),
        Command::Search {
            n,
            epsilon,
            budget_nodes,
            budget_seconds,
            threads,
            output,
        } => {
            let budget = Budget {
                max_nodes: budget_nodes,
                max_seconds: budget_seconds,
            };
            cmd_search(fmt, n, epsilon, budget, threads, &output)
        }
        Command::Certificates { input, x, y, output } => cmd_certificates(fmt, &input, x, y, &output),
        Command::Mesh {
            input,
            k,
            preset,
            n,
            output,
        } => cmd_mesh(fmt, &input, k, preset, n, &output),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FILLINGS_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Budget) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.code())
        }
    }
}
