use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::annulus::annulus_triangulate;
use super::barycentric::{key, subdivide, GeoMesh};
use super::geom::P2;
use super::grid::{boundary_cycle, grid_fill_shifted, realize_triangle, trim_patch};
use super::plan::{dirichlet_plan, SubdivisionPlan};
use super::surface::{heron_area, validate_surface, PLSurface, SurfaceTopology};
use super::PlMeshError;
use crate::bounds::continuous_area_bound;
use crate::complex::{AbstractTriangulation, VertexId};
use crate::metrics::lipschitz_constant;
use crate::rational::{self, Rational};

const MAX_ROUNDS: usize = 64;
const GLUE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MeshStats {
    pub epsilon: f64,
    pub max_edge: f64,
    pub min_boundary_edge: f64,
    pub equilateral_count: usize,
    pub non_equilateral_count: usize,
    pub total_area: f64,
    pub source_area: f64,
    pub plan_deviation: f64,
    /// Longest annulus edge before refinement, in units of `ε`.
    pub annulus_constant: f64,
    /// Most refinement rounds used by any source triangle.
    pub refinement_rounds: usize,
    pub quads_split: usize,
    pub num_vertices: usize,
    pub num_triangles: usize,
    pub boundary_vertices: usize,
}

/// A triangulation of a PL surface with the length of every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct BalancedMesh {
    pub complex: AbstractTriangulation,
    pub lengths: BTreeMap<(VertexId, VertexId), f64>,
    pub stats: MeshStats,
}

#[derive(Serialize)]
struct MeshOut<'a> {
    #[serde(flatten)]
    complex: &'a AbstractTriangulation,
    lengths: LengthMap<'a>,
    stats: &'a MeshStats,
}

struct LengthMap<'a>(&'a BTreeMap<(VertexId, VertexId), f64>);

impl Serialize for LengthMap<'_> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for ((a, b), len) in self.0 {
            map.serialize_entry(&format!("{a}-{b}"), len)?;
        }
        map.end()
    }
}

#[derive(Deserialize)]
struct MeshIn {
    #[serde(flatten)]
    complex: AbstractTriangulation,
    lengths: BTreeMap<String, f64>,
    stats: MeshStats,
}

impl BalancedMesh {
    pub fn length(&self, a: VertexId, b: VertexId) -> Option<f64> {
        self.lengths.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MeshOut {
            complex: &self.complex,
            lengths: LengthMap(&self.lengths),
            stats: &self.stats,
        })
        .expect("mesh serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, PlMeshError> {
        let raw: MeshIn = serde_json::from_str(s).map_err(|e| PlMeshError::Glue(format!("mesh JSON: {e}")))?;
        let mut lengths = BTreeMap::new();
        for (k, v) in raw.lengths {
            let parsed = k
                .split_once('-')
                .and_then(|(a, b)| Some((a.parse::<VertexId>().ok()?, b.parse::<VertexId>().ok()?)));
            let (a, b) = parsed.ok_or_else(|| PlMeshError::Glue(format!("bad edge key {k:?}")))?;
            lengths.insert((a.min(b), a.max(b)), v);
        }
        Ok(BalancedMesh {
            complex: raw.complex,
            lengths,
            stats: raw.stats,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Vertex(usize),
    /// Subdivision point `i` of an original edge, counted from its `from` end.
    EdgePoint(usize, usize),
    Local(usize, usize),
}

struct LocalMesh {
    mesh: GeoMesh,
    keys: Vec<Key>,
    annulus_constant: f64,
    rounds: usize,
    quads: usize,
}

/// Points of the subdivided boundary of source triangle `t`, counter-clockwise
/// from corner 0, with their gluing keys and the interval following each.
fn outer_boundary(
    t: usize,
    corners: &[P2; 3],
    sides: [f64; 3],
    topo: &SurfaceTopology,
    plan: &SubdivisionPlan,
) -> (Vec<P2>, Vec<Key>, Vec<f64>) {
    let mut pts = Vec::new();
    let mut keys = Vec::new();
    let mut gaps = Vec::new();
    for s in 0..3 {
        let (e, forward) = topo.side_edge[t][s];
        let mut iv = plan.intervals(e);
        if !forward {
            iv.reverse();
        }
        let count = iv.len();
        let (a, b) = (corners[s], corners[(s + 1) % 3]);
        pts.push(a);
        keys.push(Key::Vertex(topo.corner_vertex[t][s]));
        let mut along = 0.0;
        for i in 1..count {
            along += iv[i - 1];
            let f = along / sides[s];
            pts.push([a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])]);
            keys.push(Key::EdgePoint(e, if forward { i } else { count - i }));
        }
        gaps.extend(iv);
    }
    (pts, keys, gaps)
}

fn fill_triangle(
    t: usize,
    m: &PLSurface,
    topo: &SurfaceTopology,
    plan: &SubdivisionPlan,
) -> Result<LocalMesh, PlMeshError> {
    let eps = plan.epsilon;
    let sides = m.triangles[t];
    let corners = realize_triangle(sides);
    let (outer, mut keys, gaps) = outer_boundary(t, &corners, sides, topo, plan);
    let no = outer.len();

    // Lattice shifts first, then margins that keep the patch off the sides,
    // and finally no patch at all.
    let attempts = [(0, 0.0), (1, 0.0), (2, 0.0), (3, 0.0), (0, eps / 4.0), (0, eps / 2.0)];
    let mut chosen = None;
    let mut last_err = None;
    for (attempt, margin) in attempts {
        let patch = trim_patch(&grid_fill_shifted(sides, eps, attempt)?, &corners, margin);
        let cycle = boundary_cycle(&patch)?;
        if cycle.is_empty() {
            break;
        }
        let inner: Vec<P2> = cycle.iter().map(|&v| patch.points[v]).collect();
        match annulus_triangulate(&outer, &inner) {
            Ok(ann) => {
                chosen = Some((patch, cycle, ann));
                break;
            }
            Err(e) => last_err = Some(e),
        }
    }
    if chosen.is_none() {
        if let Some(e) = last_err {
            log::warn!("triangle {t}: dropping lattice patch after {e}");
        }
    }

    let mut mesh = GeoMesh {
        points: outer.clone(),
        triangles: Vec::new(),
        fixed: BTreeMap::new(),
    };
    let mut protected = BTreeSet::new();
    for i in 0..no {
        let e = key(i, (i + 1) % no);
        mesh.fixed.insert(e, gaps[i]);
        protected.insert(e);
    }
    let (annulus_constant, quads) = match chosen {
        Some((patch, cycle, ann)) => {
            let mut local = vec![usize::MAX; patch.points.len()];
            for (i, &v) in cycle.iter().enumerate() {
                local[v] = no + i;
                mesh.points.push(patch.points[v]);
            }
            for (v, &p) in patch.points.iter().enumerate() {
                if local[v] == usize::MAX {
                    local[v] = mesh.points.len();
                    mesh.points.push(p);
                }
            }
            mesh.triangles.extend(ann.triangles.iter().copied());
            for tri in &patch.triangles {
                let g = tri.map(|v| local[v]);
                for k in 0..3 {
                    mesh.fixed.insert(key(g[k], g[(k + 1) % 3]), eps);
                }
                mesh.triangles.push(g);
            }
            let ni = cycle.len();
            for i in 0..ni {
                protected.insert(key(no + i, no + (i + 1) % ni));
            }
            (ann.max_edge / eps, ann.quads)
        }
        None => {
            let ann = annulus_triangulate(&outer, &[])?;
            mesh.triangles = ann.triangles;
            (ann.max_edge / eps, 0)
        }
    };

    let threshold = eps + plan.deviation + 1e-12 * eps;
    let mut rounds = 0;
    loop {
        let selected: Vec<bool> = mesh
            .triangles
            .iter()
            .map(|tri| {
                (0..3).any(|k| {
                    let (a, b) = (tri[k], tri[(k + 1) % 3]);
                    !protected.contains(&key(a, b)) && mesh.length(a, b) > threshold
                })
            })
            .collect();
        if !selected.iter().any(|&s| s) {
            break;
        }
        if rounds == MAX_ROUNDS {
            return Err(PlMeshError::Barycentric(format!(
                "triangle {t}: edges still longer than {threshold} after {MAX_ROUNDS} rounds"
            )));
        }
        let mut owner: BTreeMap<(usize, usize), [bool; 2]> = BTreeMap::new();
        for (tri, &sel) in mesh.triangles.iter().zip(&selected) {
            for k in 0..3 {
                owner.entry(key(tri[k], tri[(k + 1) % 3])).or_default()[sel as usize] = true;
            }
        }
        protected.extend(owner.into_iter().filter(|(_, o)| o[0] && o[1]).map(|(e, _)| e));
        mesh = subdivide(&mesh, &protected, &selected);
        rounds += 1;
    }
    keys.extend((no..mesh.points.len()).map(|i| Key::Local(t, i)));
    Ok(LocalMesh {
        mesh,
        keys,
        annulus_constant,
        rounds,
        quads,
    })
}

/// Triangulation with edges close to `ε`, most triangles equilateral,
/// using the Dirichlet plan for `k`.
pub fn balanced_triangulation(m: &PLSurface, k: u64) -> Result<BalancedMesh, PlMeshError> {
    let plan = dirichlet_plan(m, k)?;
    balanced_with_plan(m, &plan)
}

pub fn balanced_with_plan(m: &PLSurface, plan: &SubdivisionPlan) -> Result<BalancedMesh, PlMeshError> {
    let topo = SurfaceTopology::build(m)?;
    if plan.per_edge.len() != topo.edges.len() {
        return Err(PlMeshError::Plan(format!(
            "plan covers {} edges, surface has {}",
            plan.per_edge.len(),
            topo.edges.len()
        )));
    }
    let locals: Vec<LocalMesh> = (0..m.triangles.len())
        .into_par_iter()
        .map(|t| fill_triangle(t, m, &topo, plan))
        .collect::<Result<_, _>>()?;

    // Glue in order of first appearance.
    let mut ids: BTreeMap<Key, VertexId> = BTreeMap::new();
    let mut tris: Vec<[VertexId; 3]> = Vec::new();
    let mut lengths: BTreeMap<(VertexId, VertexId), f64> = BTreeMap::new();
    for local in &locals {
        for tri in &local.mesh.triangles {
            let mut g = [0; 3];
            for k in 0..3 {
                let next = ids.len() as VertexId;
                g[k] = *ids.entry(local.keys[tri[k]]).or_insert(next);
            }
            for k in 0..3 {
                let (a, b) = (g[k], g[(k + 1) % 3]);
                let len = local.mesh.length(tri[k], tri[(k + 1) % 3]);
                let e = (a.min(b), a.max(b));
                if let Some(&old) = lengths.get(&e) {
                    if (old - len).abs() > GLUE_TOL * old.max(len) {
                        return Err(PlMeshError::Glue(format!("edge {a}-{b} has lengths {old} and {len}")));
                    }
                } else {
                    lengths.insert(e, len);
                }
            }
            tris.push(g);
        }
    }
    let nv = ids.len();
    let mut complex = AbstractTriangulation::new(nv, tris, None);
    let cycles = complex.boundary().map_err(|e| PlMeshError::Glue(e.to_string()))?;
    if cycles.len() == 1 {
        let cycle = &cycles[0];
        let mut map = vec![VertexId::MAX; nv];
        for (i, &v) in cycle.iter().enumerate() {
            map[v as usize] = i as VertexId;
        }
        let mut next = cycle.len() as VertexId;
        for slot in map.iter_mut() {
            if *slot == VertexId::MAX {
                *slot = next;
                next += 1;
            }
        }
        complex = complex.relabel(&map).with_boundary_tag(Some(cycle.len()));
        lengths = lengths
            .into_iter()
            .map(|((a, b), l)| {
                let (x, y) = (map[a as usize], map[b as usize]);
                ((x.min(y), x.max(y)), l)
            })
            .collect();
        let report = complex.validate();
        if let Some(v) = report.violations.first() {
            return Err(PlMeshError::Glue(format!("glued complex is invalid: {v:?}")));
        }
    }

    let eps = plan.epsilon;
    let mut stats = MeshStats {
        epsilon: eps,
        plan_deviation: plan.deviation,
        source_area: validate_surface(m).area,
        num_vertices: nv,
        num_triangles: complex.num_triangles(),
        min_boundary_edge: f64::INFINITY,
        ..MeshStats::default()
    };
    for local in &locals {
        stats.annulus_constant = stats.annulus_constant.max(local.annulus_constant);
        stats.refinement_rounds = stats.refinement_rounds.max(local.rounds);
        stats.quads_split += local.quads;
    }
    stats.max_edge = lengths.values().copied().fold(0.0, f64::max);
    for t in complex.triangles() {
        let l = [lengths[&(t[0], t[1])], lengths[&(t[1], t[2])], lengths[&(t[0], t[2])]];
        if l.iter().all(|&x| x == eps) {
            stats.equilateral_count += 1;
        } else {
            stats.non_equilateral_count += 1;
        }
        stats.total_area += heron_area(l[0], l[1], l[2])?;
    }
    let boundary = complex.boundary_edges();
    stats.boundary_vertices = boundary.len();
    for e in &boundary {
        stats.min_boundary_edge = stats.min_boundary_edge.min(lengths[&(e[0], e[1])]);
    }
    if boundary.is_empty() {
        stats.min_boundary_edge = 0.0;
    }
    Ok(BalancedMesh {
        complex,
        lengths,
        stats,
    })
}

/// Size, stretch and area of a meshed disk, next to the continuous bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FillingReport {
    pub n: usize,
    pub num_vertices: usize,
    pub num_triangles: usize,
    pub delta_achieved: f64,
    #[serde(with = "rational::pair")]
    pub delta_exact: Rational,
    pub witness: (VertexId, VertexId),
    pub epsilon: f64,
    pub area: f64,
    pub boundary_length: f64,
    pub continuous_bound: f64,
    /// `area / continuous_bound`.
    pub area_ratio: f64,
    /// `|V| / n²`.
    pub vertex_ratio: f64,
}

pub fn report_for_mesh(mesh: &BalancedMesh) -> Result<FillingReport, PlMeshError> {
    let n = mesh
        .complex
        .boundary_tag()
        .ok_or_else(|| PlMeshError::Report("mesh boundary is not a single closed curve".into()))?;
    let lip = lipschitz_constant(&mesh.complex).map_err(|e| PlMeshError::Report(e.to_string()))?;
    let delta = rational::to_f64(&lip.delta_achieved);
    let boundary_length: f64 = (0..n)
        .map(|i| {
            let (a, b) = (i as VertexId, ((i + 1) % n) as VertexId);
            mesh.length(a, b).unwrap_or(0.0)
        })
        .sum();
    let bound = continuous_area_bound(delta, boundary_length).map_err(|e| PlMeshError::Report(e.to_string()))?;
    let nv = mesh.complex.num_vertices();
    Ok(FillingReport {
        n,
        num_vertices: nv,
        num_triangles: mesh.complex.num_triangles(),
        delta_achieved: delta,
        delta_exact: lip.delta_achieved,
        witness: lip.witness_pair,
        epsilon: mesh.stats.epsilon,
        area: mesh.stats.total_area,
        boundary_length,
        continuous_bound: bound,
        area_ratio: mesh.stats.total_area / bound,
        vertex_ratio: nv as f64 / (n * n) as f64,
    })
}

pub fn mesh_filling_report(m: &PLSurface, k: u64) -> Result<(BalancedMesh, FillingReport), PlMeshError> {
    let mesh = balanced_triangulation(m, k)?;
    let report = report_for_mesh(&mesh)?;
    Ok((mesh, report))
}
