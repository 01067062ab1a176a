use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write;

use super::pipeline::BalancedMesh;
use crate::complex::VertexId;

/// Planar OFF export. Triangles are unfolded breadth-first across shared
/// edges from the first triangle, so distant parts of a curved surface may
/// overlap; the result is meant for looking at, not for measuring.
pub fn to_off(mesh: &BalancedMesh) -> String {
    let k = &mesh.complex;
    let tris = k.triangles();
    let nv = k.num_vertices();
    let len = |a: VertexId, b: VertexId| mesh.length(a, b).unwrap_or(1.0);
    let mut pos: Vec<Option<[f64; 2]>> = vec![None; nv];
    let mut on_edge: BTreeMap<(VertexId, VertexId), Vec<usize>> = BTreeMap::new();
    for (i, t) in tris.iter().enumerate() {
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
            on_edge.entry((a, b)).or_default().push(i);
        }
    }
    let mut placed = vec![false; tris.len()];
    for start in 0..tris.len() {
        if placed[start] {
            continue;
        }
        let t = tris[start];
        if pos[t[0] as usize].is_none() && pos[t[1] as usize].is_none() {
            let (c, b, a) = (len(t[0], t[1]), len(t[1], t[2]), len(t[0], t[2]));
            let x = (c * c + a * a - b * b) / (2.0 * c);
            let y = (a * a - x * x).max(0.0).sqrt();
            pos[t[0] as usize] = Some([0.0, 0.0]);
            pos[t[1] as usize] = Some([c, 0.0]);
            pos[t[2] as usize].get_or_insert([x, y]);
        }
        placed[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let t = tris[i];
            for (a, b, c) in [(t[0], t[1], t[2]), (t[1], t[2], t[0]), (t[0], t[2], t[1])] {
                for &j in &on_edge[&(a, b)] {
                    if placed[j] {
                        continue;
                    }
                    placed[j] = true;
                    let d = tris[j].into_iter().find(|&v| v != a && v != b).expect("triangle has a third vertex");
                    if pos[d as usize].is_none() {
                        if let (Some(pa), Some(pb), Some(pc)) = (pos[a as usize], pos[b as usize], pos[c as usize]) {
                            pos[d as usize] = Some(apex(pa, pb, pc, len(a, d), len(b, d)));
                        }
                    }
                    queue.push_back(j);
                }
            }
        }
    }
    let mut out = String::new();
    writeln!(out, "OFF\n{} {} 0", nv, tris.len()).unwrap();
    for p in &pos {
        let [x, y] = p.unwrap_or([0.0, 0.0]);
        writeln!(out, "{x} {y} 0").unwrap();
    }
    for t in tris {
        writeln!(out, "3 {} {} {}", t[0], t[1], t[2]).unwrap();
    }
    out
}

/// Point at distances `da`, `db` from `pa`, `pb`, on the side of line `ab`
/// away from `pc`.
fn apex(pa: [f64; 2], pb: [f64; 2], pc: [f64; 2], da: f64, db: f64) -> [f64; 2] {
    let (ux, uy) = (pb[0] - pa[0], pb[1] - pa[1]);
    let c = ux.hypot(uy);
    let x = (c * c + da * da - db * db) / (2.0 * c);
    let y = (da * da - x * x).max(0.0).sqrt();
    let (ex, ey) = (ux / c, uy / c);
    let (nx, ny) = (-ey, ex);
    let side = (pc[0] - pa[0]) * nx + (pc[1] - pa[1]) * ny;
    let y = if side > 0.0 { -y } else { y };
    [pa[0] + x * ex + y * nx, pa[1] + x * ey + y * ny]
}
