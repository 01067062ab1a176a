use std::collections::BTreeSet;

use super::geom::{self, P2, TOL};
use super::PlMeshError;

/// Triangulation of the region between an outer and an inner cycle.
/// Indices `0..outer.len()` are outer points, the rest inner points.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnulusOutput {
    pub triangles: Vec<[usize; 3]>,
    pub quads: usize,
    pub max_edge: f64,
}

fn nearest(p: P2, pts: &[P2]) -> Result<usize, (usize, usize)> {
    let mut best = (f64::INFINITY, usize::MAX);
    let mut second = (f64::INFINITY, usize::MAX);
    for (j, &q) in pts.iter().enumerate() {
        let d = geom::dist(p, q);
        if d < best.0 {
            second = best;
            best = (d, j);
        } else if d < second.0 {
            second = (d, j);
        }
    }
    if second.1 != usize::MAX && second.0 - best.0 <= TOL {
        return Err((best.1, second.1));
    }
    Ok(best.1)
}

/// Matches every inner point to its nearest outer point and every outer
/// point to its nearest inner point, then reads off the triangles and
/// quadrilaterals between consecutive matching segments. Quadrilaterals are
/// split along the shorter diagonal. With no inner cycle the outer polygon
/// is ear-clipped instead.
pub fn annulus_triangulate(outer: &[P2], inner: &[P2]) -> Result<AnnulusOutput, PlMeshError> {
    let no = outer.len();
    let ni = inner.len();
    if no < 3 {
        return Err(PlMeshError::Annulus(format!("outer cycle has {no} points")));
    }
    let triangles = if ni == 0 {
        ear_clip(outer)?
    } else {
        if ni < 3 {
            return Err(PlMeshError::Annulus(format!("inner cycle has {ni} points")));
        }
        return match_and_walk(outer, inner);
    };
    let all: Vec<P2> = outer.to_vec();
    Ok(AnnulusOutput {
        max_edge: max_edge(&triangles, &all),
        triangles,
        quads: 0,
    })
}

fn max_edge(tris: &[[usize; 3]], pts: &[P2]) -> f64 {
    tris.iter()
        .flat_map(|t| (0..3).map(move |k| geom::dist(pts[t[k]], pts[t[(k + 1) % 3]])))
        .fold(0.0, f64::max)
}

fn match_and_walk(outer: &[P2], inner: &[P2]) -> Result<AnnulusOutput, PlMeshError> {
    let (no, ni) = (outer.len(), inner.len());
    let mut matching: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut first = usize::MAX;
    for (i, &p) in inner.iter().enumerate() {
        let j = nearest(p, outer).map_err(|(a, b)| {
            PlMeshError::Annulus(format!("tie: inner point {i} equidistant from outer points {a} and {b}"))
        })?;
        if i == 0 {
            first = j;
        }
        matching.insert((i, j));
    }
    for (j, &q) in outer.iter().enumerate() {
        let i = nearest(q, inner).map_err(|(a, b)| {
            PlMeshError::Annulus(format!("tie: outer point {j} equidistant from inner points {a} and {b}"))
        })?;
        matching.insert((i, j));
    }

    // No matching segment may cross another or either boundary.
    let segs: Vec<(usize, usize)> = matching.iter().copied().collect();
    for (x, &(i1, j1)) in segs.iter().enumerate() {
        let (a, b) = (inner[i1], outer[j1]);
        for &(i2, j2) in &segs[x + 1..] {
            if i1 == i2 || j1 == j2 {
                continue;
            }
            if geom::segments_meet(a, b, inner[i2], outer[j2]) {
                return Err(PlMeshError::Annulus(format!(
                    "matching segments ({i1},{j1}) and ({i2},{j2}) cross"
                )));
            }
        }
        for k in 0..no {
            let k2 = (k + 1) % no;
            if k == j1 || k2 == j1 {
                continue;
            }
            if geom::segments_meet(a, b, outer[k], outer[k2]) {
                return Err(PlMeshError::Annulus(format!(
                    "matching segment ({i1},{j1}) crosses outer side {k}"
                )));
            }
        }
        for k in 0..ni {
            let k2 = (k + 1) % ni;
            if k == i1 || k2 == i1 {
                continue;
            }
            if geom::segments_meet(a, b, inner[k], inner[k2]) {
                return Err(PlMeshError::Annulus(format!(
                    "matching segment ({i1},{j1}) crosses inner side {k}"
                )));
            }
        }
    }

    let pts: Vec<P2> = outer.iter().chain(inner.iter()).copied().collect();
    let q = |j: usize| j % no;
    let r = |i: usize| no + i % ni;
    let mut tris = Vec::new();
    let mut quads = 0;
    let (mut i, mut j) = (0usize, first);
    let (mut di, mut dj) = (0usize, 0usize);
    let mut visited = 1;
    while di < ni || dj < no {
        let outer_step = dj < no && matching.contains(&(i, (j + 1) % no));
        let inner_step = di < ni && matching.contains(&((i + 1) % ni, j));
        if outer_step && inner_step {
            return Err(PlMeshError::Annulus(format!(
                "matching segments ({i},{}) and ({},{j}) cross",
                (j + 1) % no,
                (i + 1) % ni
            )));
        }
        if outer_step {
            tris.push([q(j), q(j + 1), r(i)]);
            j = (j + 1) % no;
            dj += 1;
        } else if inner_step {
            tris.push([r(i + 1), r(i), q(j)]);
            i = (i + 1) % ni;
            di += 1;
        } else if di < ni && dj < no && matching.contains(&((i + 1) % ni, (j + 1) % no)) {
            let (a, b, c, d) = (q(j), q(j + 1), r(i + 1), r(i));
            tris.extend(split_quad(&pts, a, b, c, d)?);
            quads += 1;
            i = (i + 1) % ni;
            j = (j + 1) % no;
            di += 1;
            dj += 1;
        } else {
            return Err(PlMeshError::Annulus(format!(
                "no matching segment follows ({i},{j})"
            )));
        }
        visited += 1;
    }
    // The walk ends where it started, which is counted twice.
    if visited - 1 != matching.len() || (i, j) != (0, first) {
        return Err(PlMeshError::Annulus(format!(
            "walk visited {} of {} matching segments",
            visited - 1,
            matching.len()
        )));
    }
    for t in &tris {
        if geom::orient(pts[t[0]], pts[t[1]], pts[t[2]]) <= TOL {
            return Err(PlMeshError::Annulus(format!("inverted or flat triangle {t:?}")));
        }
    }
    Ok(AnnulusOutput {
        max_edge: max_edge(&tris, &pts),
        triangles: tris,
        quads,
    })
}

/// Splits the counter-clockwise quadrilateral `abcd` along its shorter valid
/// diagonal; ties go to the diagonal with the lower vertex index.
fn split_quad(pts: &[P2], a: usize, b: usize, c: usize, d: usize) -> Result<[[usize; 3]; 2], PlMeshError> {
    let ok = |t: &[usize; 3]| geom::orient(pts[t[0]], pts[t[1]], pts[t[2]]) > TOL;
    let via_ac = [[a, b, c], [a, c, d]];
    let via_bd = [[a, b, d], [b, c, d]];
    let lac = geom::dist(pts[a], pts[c]);
    let lbd = geom::dist(pts[b], pts[d]);
    let ac_first = if (lac - lbd).abs() <= TOL {
        (a.min(c), a.max(c)) <= (b.min(d), b.max(d))
    } else {
        lac < lbd
    };
    let order = if ac_first { [via_ac, via_bd] } else { [via_bd, via_ac] };
    for split in order {
        if split.iter().all(ok) {
            return Ok(split);
        }
    }
    Err(PlMeshError::Annulus(format!("quadrilateral {a},{b},{c},{d} has no valid diagonal")))
}

/// Ear clipping of a counter-clockwise polygon that may have collinear
/// runs; among valid ears the one with the shortest new diagonal is cut.
fn ear_clip(poly: &[P2]) -> Result<Vec<[usize; 3]>, PlMeshError> {
    let mut rest: Vec<usize> = (0..poly.len()).collect();
    let mut tris = Vec::new();
    while rest.len() > 3 {
        let m = rest.len();
        let mut best: Option<(f64, usize)> = None;
        for k in 0..m {
            let (p, c, n) = (rest[(k + m - 1) % m], rest[k], rest[(k + 1) % m]);
            let (a, b, d) = (poly[p], poly[c], poly[n]);
            if geom::orient(a, b, d) <= TOL {
                continue;
            }
            let blocked = rest.iter().any(|&v| {
                v != p
                    && v != c
                    && v != n
                    && geom::orient(a, b, poly[v]) >= -TOL
                    && geom::orient(b, d, poly[v]) >= -TOL
                    && geom::orient(d, a, poly[v]) >= -TOL
            });
            if blocked {
                continue;
            }
            let len = geom::dist(a, d);
            if best.is_none_or(|(l, _)| len < l - TOL) {
                best = Some((len, k));
            }
        }
        let (_, k) = best.ok_or_else(|| PlMeshError::Annulus("polygon has no ear".into()))?;
        let m = rest.len();
        tris.push([rest[(k + m - 1) % m], rest[k], rest[(k + 1) % m]]);
        rest.remove(k);
    }
    if geom::orient(poly[rest[0]], poly[rest[1]], poly[rest[2]]) <= TOL {
        return Err(PlMeshError::Annulus("last ear is flat".into()));
    }
    tris.push([rest[0], rest[1], rest[2]]);
    Ok(tris)
}
