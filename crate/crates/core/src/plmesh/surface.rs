use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::PlMeshError;

const LENGTH_TOL: f64 = 1e-9;

/// Euclidean triangles given by side lengths, glued along sides.
///
/// Side `i` of a triangle runs from corner `i` to corner `(i+1) % 3`. A
/// gluing `[[t1, s1], [t2, s2]]` identifies the two sides with opposite
/// orientations, so corner `s1` of `t1` meets corner `s2 + 1` of `t2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PLSurface {
    pub triangles: Vec<[f64; 3]>,
    #[serde(default)]
    pub gluings: Vec<[[usize; 2]; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceViolation {
    NonPositiveSide { triangle: usize, side: usize, length: f64 },
    TriangleInequality { triangle: usize, sides: [f64; 3] },
    BadSide { side: [usize; 2] },
    SelfGluing { side: [usize; 2] },
    SideGluedTwice { side: [usize; 2] },
    LengthMismatch { first: [usize; 2], second: [usize; 2], lengths: [f64; 2] },
    OpenBoundary { vertex: usize, degree: usize },
}

impl std::fmt::Display for SurfaceViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SurfaceViolation::NonPositiveSide { triangle, side, length } => {
                write!(f, "side {side} of triangle {triangle} has length {length}")
            }
            SurfaceViolation::TriangleInequality { triangle, sides } => {
                write!(f, "triangle inequality fails for triangle {triangle} {sides:?}")
            }
            SurfaceViolation::BadSide { side } => write!(f, "gluing names missing side {side:?}"),
            SurfaceViolation::SelfGluing { side } => write!(f, "side {side:?} glued to itself"),
            SurfaceViolation::SideGluedTwice { side } => write!(f, "side {side:?} glued more than once"),
            SurfaceViolation::LengthMismatch { first, second, lengths } => write!(
                f,
                "length mismatch between {first:?} and {second:?}: {} vs {}",
                lengths[0], lengths[1]
            ),
            SurfaceViolation::OpenBoundary { vertex, degree } => {
                write!(f, "boundary does not close up at vertex {vertex} (degree {degree})")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SurfaceReport {
    pub violations: Vec<SurfaceViolation>,
    pub num_vertices: usize,
    pub boundary_sides: usize,
    pub boundary_length: f64,
    pub area: f64,
}

impl SurfaceReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Area from side lengths, using the sorted-operand form that stays
/// accurate for needle-shaped triangles.
pub fn heron_area(a: f64, b: f64, c: f64) -> Result<f64, PlMeshError> {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    let f = [a + (b + c), c - (a - b), c + (a - b), a + (b - c)];
    if !(c > 0.0) || f.iter().any(|&x| !(x > 0.0)) {
        return Err(PlMeshError::Degenerate(a, b, c));
    }
    Ok(0.25 * (f[0] * f[1] * f[2] * f[3]).sqrt())
}

fn triangle_ok(t: &[f64; 3]) -> bool {
    t.iter().all(|&x| x > 0.0 && x.is_finite()) && t[0] < t[1] + t[2] && t[1] < t[0] + t[2] && t[2] < t[0] + t[1]
}

/// One original edge of the surface after gluing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceEdge {
    /// Endpoint where subdivision starts: the smaller vertex id, or the
    /// start of the first side for loops.
    pub from: usize,
    pub to: usize,
    pub length: f64,
    pub sides: Vec<[usize; 2]>,
}

/// Vertices, edges and boundary of a valid surface.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceTopology {
    pub num_vertices: usize,
    pub corner_vertex: Vec<[usize; 3]>,
    pub edges: Vec<SurfaceEdge>,
    /// Edge of each side, and whether the side runs `from -> to`.
    pub side_edge: Vec<[(usize, bool); 3]>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Partner of every side that takes part in exactly one well-formed gluing.
fn partners(m: &PLSurface, violations: &mut Vec<SurfaceViolation>) -> Vec<[Option<[usize; 2]>; 3]> {
    let nt = m.triangles.len();
    let mut partner = vec![[None; 3]; nt];
    let mut uses: BTreeMap<[usize; 2], usize> = BTreeMap::new();
    for g in &m.gluings {
        let mut ok = true;
        for side in g {
            if side[0] >= nt || side[1] >= 3 {
                violations.push(SurfaceViolation::BadSide { side: *side });
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        if g[0] == g[1] {
            violations.push(SurfaceViolation::SelfGluing { side: g[0] });
            continue;
        }
        for side in g {
            *uses.entry(*side).or_insert(0) += 1;
        }
        partner[g[0][0]][g[0][1]] = Some(g[1]);
        partner[g[1][0]][g[1][1]] = Some(g[0]);
    }
    for (side, &count) in &uses {
        if count > 1 {
            violations.push(SurfaceViolation::SideGluedTwice { side: *side });
        }
    }
    partner
}

fn corner_vertices(m: &PLSurface, partner: &[[Option<[usize; 2]>; 3]]) -> (usize, Vec<[usize; 3]>) {
    let nt = m.triangles.len();
    let mut uf = UnionFind((0..3 * nt).collect());
    for (t, sides) in partner.iter().enumerate() {
        for (s, p) in sides.iter().enumerate() {
            if let Some([t2, s2]) = *p {
                uf.union(3 * t + s, 3 * t2 + (s2 + 1) % 3);
                uf.union(3 * t + (s + 1) % 3, 3 * t2 + s2);
            }
        }
    }
    let mut ids = BTreeMap::new();
    let mut corner = vec![[0; 3]; nt];
    for t in 0..nt {
        for c in 0..3 {
            let root = uf.find(3 * t + c);
            let next = ids.len();
            corner[t][c] = *ids.entry(root).or_insert(next);
        }
    }
    (ids.len(), corner)
}

/// Checks gluing consistency, triangle inequalities and that the unglued
/// sides close up into curves.
pub fn validate_surface(m: &PLSurface) -> SurfaceReport {
    let mut violations = Vec::new();
    for (t, sides) in m.triangles.iter().enumerate() {
        for (s, &len) in sides.iter().enumerate() {
            if !(len > 0.0 && len.is_finite()) {
                violations.push(SurfaceViolation::NonPositiveSide {
                    triangle: t,
                    side: s,
                    length: len,
                });
            }
        }
        if sides.iter().all(|&x| x > 0.0 && x.is_finite()) && !triangle_ok(sides) {
            violations.push(SurfaceViolation::TriangleInequality {
                triangle: t,
                sides: *sides,
            });
        }
    }
    let partner = partners(m, &mut violations);
    for g in &m.gluings {
        let ([t1, s1], [t2, s2]) = (g[0], g[1]);
        if t1 >= m.triangles.len() || t2 >= m.triangles.len() || s1 >= 3 || s2 >= 3 || g[0] == g[1] {
            continue;
        }
        let (a, b) = (m.triangles[t1][s1], m.triangles[t2][s2]);
        if (a - b).abs() > LENGTH_TOL * a.abs().max(b.abs()) {
            violations.push(SurfaceViolation::LengthMismatch {
                first: g[0],
                second: g[1],
                lengths: [a, b],
            });
        }
    }
    let (num_vertices, corner) = corner_vertices(m, &partner);
    let mut degree = vec![0usize; num_vertices];
    let mut boundary_sides = 0;
    let mut boundary_length = 0.0;
    for (t, sides) in partner.iter().enumerate() {
        for (s, p) in sides.iter().enumerate() {
            if p.is_none() {
                boundary_sides += 1;
                boundary_length += m.triangles[t][s];
                degree[corner[t][s]] += 1;
                degree[corner[t][(s + 1) % 3]] += 1;
            }
        }
    }
    for (v, &d) in degree.iter().enumerate() {
        if d % 2 == 1 {
            violations.push(SurfaceViolation::OpenBoundary { vertex: v, degree: d });
        }
    }
    let area = m
        .triangles
        .iter()
        .filter(|t| triangle_ok(t))
        .map(|t| heron_area(t[0], t[1], t[2]).unwrap_or(0.0))
        .sum();
    SurfaceReport {
        violations,
        num_vertices,
        boundary_sides,
        boundary_length,
        area,
    }
}

impl SurfaceTopology {
    pub fn build(m: &PLSurface) -> Result<Self, PlMeshError> {
        let report = validate_surface(m);
        if let Some(v) = report.violations.first() {
            return Err(PlMeshError::InvalidSurface(v.to_string()));
        }
        let mut scratch = Vec::new();
        let partner = partners(m, &mut scratch);
        let (num_vertices, corner_vertex) = corner_vertices(m, &partner);
        let nt = m.triangles.len();
        let mut side_edge = vec![[(usize::MAX, true); 3]; nt];
        let mut edges = Vec::new();
        for t in 0..nt {
            for s in 0..3 {
                if side_edge[t][s].0 != usize::MAX {
                    continue;
                }
                let a = corner_vertex[t][s];
                let b = corner_vertex[t][(s + 1) % 3];
                let forward = a <= b;
                let id = edges.len();
                let mut sides = vec![[t, s]];
                side_edge[t][s] = (id, forward);
                if let Some([t2, s2]) = partner[t][s] {
                    side_edge[t2][s2] = (id, !forward);
                    sides.push([t2, s2]);
                }
                edges.push(SurfaceEdge {
                    from: a.min(b),
                    to: a.max(b),
                    length: m.triangles[t][s],
                    sides,
                });
            }
        }
        Ok(SurfaceTopology {
            num_vertices,
            corner_vertex,
            edges,
            side_edge,
        })
    }

    pub fn boundary_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(|&e| self.edges[e].sides.len() == 1)
    }
}

impl PLSurface {
    pub fn area(&self) -> f64 {
        validate_surface(self).area
    }

    pub fn boundary_length(&self) -> f64 {
        validate_surface(self).boundary_length
    }

    /// Surface of a consistently oriented triangle mesh in space; shared
    /// edges become gluings and lengths are chord lengths.
    pub fn from_vertex_mesh(points: &[[f64; 3]], tris: &[[usize; 3]]) -> Result<PLSurface, PlMeshError> {
        let d = |a: usize, b: usize| {
            let (p, q) = (points[a], points[b]);
            ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
        };
        let mut directed: BTreeMap<(usize, usize), [usize; 2]> = BTreeMap::new();
        let mut triangles = Vec::with_capacity(tris.len());
        for (t, tri) in tris.iter().enumerate() {
            if tri.iter().any(|&v| v >= points.len()) {
                return Err(PlMeshError::InvalidSurface(format!("triangle {t} names a missing point")));
            }
            triangles.push([d(tri[0], tri[1]), d(tri[1], tri[2]), d(tri[2], tri[0])]);
            for s in 0..3 {
                let key = (tri[s], tri[(s + 1) % 3]);
                if directed.insert(key, [t, s]).is_some() {
                    return Err(PlMeshError::InvalidSurface(format!(
                        "edge {key:?} used twice in the same direction"
                    )));
                }
            }
        }
        let mut gluings = Vec::new();
        for (&(a, b), &side) in &directed {
            if a < b {
                if let Some(&other) = directed.get(&(b, a)) {
                    gluings.push([side, other]);
                }
            }
        }
        gluings.sort();
        Ok(PLSurface { triangles, gluings })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kite() -> PLSurface {
        PLSurface {
            triangles: vec![[1.0, 1.0, 1.0], [1.0, 1.0, 1.0]],
            gluings: vec![[[0, 0], [1, 0]]],
        }
    }

    #[test]
    fn heron_examples() {
        assert!((heron_area(3.0, 4.0, 5.0).unwrap() - 6.0).abs() < 1e-12);
        assert!((heron_area(1.0, 1.0, 1.0).unwrap() - 3f64.sqrt() / 4.0).abs() < 1e-15);
        let e = 1e-3;
        assert!((heron_area(e, e, e).unwrap() - 3f64.sqrt() / 4.0 * e * e).abs() < 1e-20);
        assert!(heron_area(1.0, 2.0, 3.0).is_err());
        // needle: 1e-8 wide
        let a = heron_area(1.0, 1.0, 1e-8).unwrap();
        assert!((a - 0.5e-8).abs() < 1e-20);
    }

    #[test]
    fn two_glued_triangles() {
        let r = validate_surface(&kite());
        assert!(r.is_valid(), "{:?}", r.violations);
        assert!((r.boundary_length - 4.0).abs() < 1e-12);
        assert_eq!(r.num_vertices, 4);
        assert_eq!(r.boundary_sides, 4);
    }

    #[test]
    fn mismatched_gluing() {
        let m = PLSurface {
            triangles: vec![[1.0, 1.0, 1.0], [2.0, 2.0, 2.0]],
            gluings: vec![[[0, 0], [1, 0]]],
        };
        let r = validate_surface(&m);
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, SurfaceViolation::LengthMismatch { .. })));
    }

    #[test]
    fn inequality_and_bad_sides() {
        let m = PLSurface {
            triangles: vec![[1.0, 2.0, 3.5]],
            gluings: vec![],
        };
        assert!(matches!(
            validate_surface(&m).violations[0],
            SurfaceViolation::TriangleInequality { .. }
        ));
        let m = PLSurface {
            triangles: vec![[1.0, 1.0, 1.0], [1.0, 1.0, 1.0], [1.0, 1.0, 1.0]],
            gluings: vec![[[0, 0], [1, 0]], [[0, 0], [2, 0]], [[0, 1], [0, 1]], [[0, 2], [5, 0]]],
        };
        let kinds: Vec<String> = validate_surface(&m)
            .violations
            .iter()
            .map(|v| serde_json::to_value(v).unwrap()["kind"].as_str().unwrap().to_string())
            .collect();
        assert!(kinds.contains(&"side_glued_twice".to_string()));
        assert!(kinds.contains(&"self_gluing".to_string()));
        assert!(kinds.contains(&"bad_side".to_string()));
    }

    #[test]
    fn topology_of_kite() {
        let topo = SurfaceTopology::build(&kite()).unwrap();
        assert_eq!(topo.num_vertices, 4);
        assert_eq!(topo.edges.len(), 5);
        assert_eq!(topo.boundary_edges().count(), 4);
        let (e0, f0) = topo.side_edge[0][0];
        let (e1, f1) = topo.side_edge[1][0];
        assert_eq!(e0, e1);
        assert_ne!(f0, f1);
    }

    #[test]
    fn closed_tetrahedron() {
        let m = PLSurface::from_vertex_mesh(
            &[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            &[[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]],
        )
        .unwrap();
        assert_eq!(m.gluings.len(), 6);
        let r = validate_surface(&m);
        assert!(r.is_valid());
        assert_eq!(r.boundary_sides, 0);
        assert_eq!(r.num_vertices, 4);
    }

    #[test]
    fn inconsistent_orientation_is_rejected() {
        let pts = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]];
        assert!(PLSurface::from_vertex_mesh(&pts, &[[0, 1, 2], [0, 1, 3]]).is_err());
    }

    #[test]
    fn json_shape() {
        let m: PLSurface = serde_json::from_str(r#"{"triangles":[[1,1,1]],"gluings":[]}"#).unwrap();
        assert_eq!(m.triangles, vec![[1.0, 1.0, 1.0]]);
        let m: PLSurface = serde_json::from_str(r#"{"triangles":[[1,1,1]]}"#).unwrap();
        assert!(m.gluings.is_empty());
    }
}
