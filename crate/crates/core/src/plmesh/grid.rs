use std::collections::{BTreeMap, BTreeSet};

use super::geom::{self, P2};
use super::PlMeshError;

/// Planar patch of lattice triangles, counter-clockwise.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Patch {
    pub points: Vec<P2>,
    pub triangles: Vec<[usize; 3]>,
}

/// Corner 0 at the origin, side 0 along the positive x-axis, corner 2 above.
pub fn realize_triangle(sides: [f64; 3]) -> [P2; 3] {
    let [a, b, c] = sides;
    let x = (a * a + c * c - b * b) / (2.0 * a);
    let y = (c * c - x * x).max(0.0).sqrt();
    [[0.0, 0.0], [a, 0.0], [x, y]]
}

/// Lattice translation, in units of `ε`, used on the given attempt.
pub(crate) fn lattice_offset(attempt: u32) -> P2 {
    let alpha = (2f64.sqrt() / 100.0).fract();
    let beta = (3f64.sqrt() / 100.0).fract();
    let scale = (1u64 << attempt) as f64;
    [(alpha * scale).fract(), (beta * scale).fract()]
}

/// All triangles of the `ε`-equilateral lattice that lie strictly inside
/// the triangle with the given sides.
pub fn grid_fill(sides: [f64; 3], epsilon: f64) -> Result<Patch, PlMeshError> {
    grid_fill_shifted(sides, epsilon, 0)
}

pub(crate) fn grid_fill_shifted(sides: [f64; 3], epsilon: f64, attempt: u32) -> Result<Patch, PlMeshError> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(PlMeshError::Grid(format!("epsilon {epsilon} is not positive")));
    }
    let [a, b, c] = sides;
    if !(a > 0.0 && b > 0.0 && c > 0.0 && a < b + c && b < a + c && c < a + b) {
        return Err(PlMeshError::Grid(format!("invalid triangle {sides:?}")));
    }
    let t = realize_triangle(sides);
    let off = lattice_offset(attempt);
    let origin = [off[0] * epsilon, off[1] * epsilon];
    let h = epsilon * 3f64.sqrt() / 2.0;
    let point = |i: i64, j: i64| -> P2 { [origin[0] + i as f64 * epsilon + j as f64 * epsilon / 2.0, origin[1] + j as f64 * h] };
    let xmin = t.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
    let xmax = t.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
    let ymax = t[2][1];
    let j_lo = ((0.0 - origin[1]) / h).floor() as i64 - 1;
    let j_hi = ((ymax - origin[1]) / h).ceil() as i64 + 1;

    let mut inside: BTreeMap<(i64, i64), bool> = BTreeMap::new();
    let mut is_in = |i: i64, j: i64| *inside.entry((i, j)).or_insert_with(|| geom::strictly_inside(&t, point(i, j), 0.0));
    let mut index: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let mut patch = Patch::default();
    let mut id = |patch: &mut Patch, key: (i64, i64)| -> usize {
        *index.entry(key).or_insert_with(|| {
            patch.points.push(point(key.0, key.1));
            patch.points.len() - 1
        })
    };
    for j in j_lo..=j_hi {
        let shift = origin[0] + j as f64 * epsilon / 2.0;
        let i_lo = ((xmin - shift) / epsilon).floor() as i64 - 1;
        let i_hi = ((xmax - shift) / epsilon).ceil() as i64 + 1;
        for i in i_lo..=i_hi {
            let up = [(i, j), (i + 1, j), (i, j + 1)];
            let down = [(i + 1, j), (i + 1, j + 1), (i, j + 1)];
            for tri in [up, down] {
                if tri.iter().all(|&(p, q)| is_in(p, q)) {
                    let v = [id(&mut patch, tri[0]), id(&mut patch, tri[1]), id(&mut patch, tri[2])];
                    patch.triangles.push(v);
                }
            }
        }
    }
    Ok(patch)
}

fn sorted(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Keeps the largest edge-connected piece of `patch`, optionally dropping
/// triangles with a corner within `margin` of the sides of `t`, and removes
/// pinch vertices so that the boundary is a single simple cycle.
pub fn trim_patch(patch: &Patch, t: &[P2; 3], margin: f64) -> Patch {
    let mut keep: Vec<bool> = patch
        .triangles
        .iter()
        .map(|tri| margin <= 0.0 || tri.iter().all(|&v| geom::strictly_inside(t, patch.points[v], margin)))
        .collect();
    loop {
        let mut changed = false;
        // largest edge-connected component
        let mut on_edge: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, tri) in patch.triangles.iter().enumerate() {
            if keep[i] {
                for k in 0..3 {
                    on_edge.entry(sorted(tri[k], tri[(k + 1) % 3])).or_default().push(i);
                }
            }
        }
        let mut comp = vec![usize::MAX; patch.triangles.len()];
        let mut sizes = Vec::new();
        for s in 0..patch.triangles.len() {
            if !keep[s] || comp[s] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut stack = vec![s];
            comp[s] = id;
            let mut size = 0;
            while let Some(i) = stack.pop() {
                size += 1;
                let tri = patch.triangles[i];
                for k in 0..3 {
                    for &j in &on_edge[&sorted(tri[k], tri[(k + 1) % 3])] {
                        if comp[j] == usize::MAX {
                            comp[j] = id;
                            stack.push(j);
                        }
                    }
                }
            }
            sizes.push(size);
        }
        let best = (0..sizes.len()).max_by(|&x, &y| sizes[x].cmp(&sizes[y]).then(y.cmp(&x)));
        for i in 0..keep.len() {
            if keep[i] && Some(comp[i]) != best {
                keep[i] = false;
                changed = true;
            }
        }
        // pinch vertices: incident triangles must form one fan
        let mut incident: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, tri) in patch.triangles.iter().enumerate() {
            if keep[i] {
                for &v in tri {
                    incident.entry(v).or_default().push(i);
                }
            }
        }
        for (&v, tris) in &incident {
            let fans = fans_at(patch, v, tris);
            if fans.len() > 1 {
                let largest = (0..fans.len())
                    .max_by(|&x, &y| fans[x].len().cmp(&fans[y].len()).then(y.cmp(&x)))
                    .unwrap();
                for (f, fan) in fans.iter().enumerate() {
                    if f != largest {
                        for &i in fan {
                            keep[i] = false;
                        }
                    }
                }
                changed = true;
                break;
            }
        }
        if !changed {
            break;
        }
    }
    let mut map = BTreeMap::new();
    let mut out = Patch::default();
    for (i, tri) in patch.triangles.iter().enumerate() {
        if !keep[i] {
            continue;
        }
        let mut nt = [0; 3];
        for k in 0..3 {
            nt[k] = *map.entry(tri[k]).or_insert_with(|| {
                out.points.push(patch.points[tri[k]]);
                out.points.len() - 1
            });
        }
        out.triangles.push(nt);
    }
    out
}

/// Groups the triangles around `v` into edge-connected fans.
fn fans_at(patch: &Patch, v: usize, tris: &[usize]) -> Vec<Vec<usize>> {
    let mut group: Vec<usize> = (0..tris.len()).collect();
    fn root(g: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while g[r] != r {
            r = g[r];
        }
        g[x] = r;
        r
    }
    for a in 0..tris.len() {
        for b in a + 1..tris.len() {
            let ta = patch.triangles[tris[a]];
            let tb = patch.triangles[tris[b]];
            let shared = ta.iter().filter(|&&x| x != v && tb.contains(&x)).count();
            if shared > 0 {
                let (ra, rb) = (root(&mut group, a), root(&mut group, b));
                group[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut fans: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..tris.len() {
        let r = root(&mut group, i);
        fans.entry(r).or_default().push(tris[i]);
    }
    fans.into_values().collect()
}

/// Boundary of a trimmed patch as a counter-clockwise cycle of point
/// indices, starting at the smallest index.
pub(crate) fn boundary_cycle(patch: &Patch) -> Result<Vec<usize>, PlMeshError> {
    if patch.triangles.is_empty() {
        return Ok(Vec::new());
    }
    let mut directed = BTreeSet::new();
    for tri in &patch.triangles {
        for k in 0..3 {
            directed.insert((tri[k], tri[(k + 1) % 3]));
        }
    }
    let mut next: BTreeMap<usize, usize> = BTreeMap::new();
    for &(a, b) in &directed {
        if !directed.contains(&(b, a)) && next.insert(a, b).is_some() {
            return Err(PlMeshError::Grid(format!("patch boundary branches at {a}")));
        }
    }
    let start = *next.keys().next().expect("non-empty patch has a boundary");
    let mut cycle = vec![start];
    let mut cur = next[&start];
    while cur != start {
        cycle.push(cur);
        cur = *next
            .get(&cur)
            .ok_or_else(|| PlMeshError::Grid(format!("patch boundary is open at {cur}")))?;
        if cycle.len() > next.len() {
            return Err(PlMeshError::Grid("patch boundary does not close".into()));
        }
    }
    if cycle.len() != next.len() {
        return Err(PlMeshError::Grid("patch boundary is not a single cycle".into()));
    }
    Ok(cycle)
}
