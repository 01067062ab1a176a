use std::collections::{BTreeMap, BTreeSet};

use super::geom::{self, P2};
use super::PlMeshError;

/// Planar triangle mesh whose edge lengths may be pinned to exact values
/// (lattice edges, planned boundary intervals); other edges are Euclidean.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GeoMesh {
    pub points: Vec<P2>,
    pub triangles: Vec<[usize; 3]>,
    pub fixed: BTreeMap<(usize, usize), f64>,
}

pub(crate) fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl GeoMesh {
    pub fn length(&self, a: usize, b: usize) -> f64 {
        self.fixed
            .get(&key(a, b))
            .copied()
            .unwrap_or_else(|| geom::dist(self.points[a], self.points[b]))
    }

    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        self.triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| key(t[k], t[(k + 1) % 3])))
            .collect()
    }

    pub fn max_edge(&self) -> f64 {
        self.edges().iter().map(|&(a, b)| self.length(a, b)).fold(0.0, f64::max)
    }
}

/// Barycentric subdivision that leaves `protected` edges whole: each
/// triangle is coned from its centroid over its sides, with unprotected
/// sides split at their midpoints, giving `6 - p` triangles for `p`
/// protected sides.
pub fn partial_barycentric(mesh: &GeoMesh, protected: &BTreeSet<(usize, usize)>) -> Result<GeoMesh, PlMeshError> {
    let edges = mesh.edges();
    if let Some(e) = protected.iter().find(|e| !edges.contains(e)) {
        return Err(PlMeshError::Barycentric(format!("protected edge {e:?} is not an edge of the mesh")));
    }
    Ok(subdivide(mesh, protected, &vec![true; mesh.triangles.len()]))
}

/// Subdivides only the `selected` triangles. Edges shared between a
/// selected and an unselected triangle must be in `protected`.
pub(crate) fn subdivide(mesh: &GeoMesh, protected: &BTreeSet<(usize, usize)>, selected: &[bool]) -> GeoMesh {
    let mut out = GeoMesh {
        points: mesh.points.clone(),
        triangles: Vec::with_capacity(mesh.triangles.len() * 3),
        fixed: BTreeMap::new(),
    };
    let mut mids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (ti, t) in mesh.triangles.iter().enumerate() {
        if !selected[ti] {
            out.triangles.push(*t);
            continue;
        }
        let [a, b, c] = t.map(|v| mesh.points[v]);
        out.points.push([(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]);
        let g = out.points.len() - 1;
        for k in 0..3 {
            let (u, v) = (t[k], t[(k + 1) % 3]);
            if protected.contains(&key(u, v)) {
                out.triangles.push([u, v, g]);
            } else {
                let m = *mids.entry(key(u, v)).or_insert_with(|| {
                    let (p, q) = (mesh.points[u], mesh.points[v]);
                    out.points.push([(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0]);
                    out.points.len() - 1
                });
                out.triangles.push([u, m, g]);
                out.triangles.push([m, v, g]);
            }
        }
    }
    let edges = out.edges();
    for (e, &len) in &mesh.fixed {
        if edges.contains(e) {
            out.fixed.insert(*e, len);
        }
    }
    out
}
