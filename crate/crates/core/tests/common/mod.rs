//! Test-only generators and brute-force oracles shared by the property and
//! acceptance suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use fillings_core::complex::{AbstractTriangulation, VertexId};
use fillings_core::metrics::{bfs, cycle_distance};
use fillings_core::separators::{
    check_separates, make_cut_instance, max_disjoint_paths, sperner_walk, verify_certificate,
};
use rand::Rng;

/// Random triangulated disk on at most `max_v` vertices, grown from a
/// triangle by gluing new vertices onto boundary edges and filling in
/// boundary corners. The boundary is labelled `0..n` in cycle order.
pub fn random_disk(rng: &mut impl Rng, max_v: usize) -> AbstractTriangulation {
    let target = rng.gen_range(4..=max_v.max(4));
    let mut cycle: Vec<u32> = vec![0, 1, 2];
    let mut tris = vec![[0u32, 1, 2]];
    let mut edges: BTreeSet<(u32, u32)> = [(0, 1), (1, 2), (0, 2)].into_iter().collect();
    let mut nv = 3u32;
    let mut closes = rng.gen_range(0..4);
    loop {
        let grow = (nv as usize) < target && (cycle.len() <= 3 || rng.gen_bool(0.6));
        if grow {
            let i = rng.gen_range(0..cycle.len());
            let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            tris.push([a, b, nv]);
            edges.insert((a.min(nv), a.max(nv)));
            edges.insert((b.min(nv), b.max(nv)));
            cycle.insert(i + 1, nv);
            nv += 1;
        } else if cycle.len() > 3 && ((nv as usize) < target || closes > 0) {
            let m = cycle.len();
            let i = rng.gen_range(0..m);
            let (u, v, w) = (cycle[(i + m - 1) % m], cycle[i], cycle[(i + 1) % m]);
            if edges.insert((u.min(w), u.max(w))) {
                tris.push([u, v, w]);
                cycle.remove(i);
                if nv as usize >= target {
                    closes -= 1;
                }
            } else if nv as usize >= target {
                closes -= 1;
            }
        } else {
            break;
        }
    }
    let n = cycle.len();
    let mut map = vec![u32::MAX; nv as usize];
    for (i, &v) in cycle.iter().enumerate() {
        map[v as usize] = i as u32;
    }
    let mut next = n as u32;
    for slot in map.iter_mut().filter(|s| **s == u32::MAX) {
        *slot = next;
        next += 1;
    }
    let tris = tris.iter().map(|t| t.map(|v| map[v as usize])).collect();
    AbstractTriangulation::new(nv as usize, tris, Some(n))
}

/// Whether some set of exactly `size` non-endpoint vertices separates the
/// two arcs. Supersets of a separator separate too, so this also answers
/// the question for every smaller size.
pub fn separator_of_size_exists(k: &AbstractTriangulation, x: VertexId, y: VertexId, size: usize) -> bool {
    let inst = make_cut_instance(k, x, y).unwrap();
    let pool: Vec<VertexId> = (0..k.num_vertices() as VertexId).filter(|&v| v != x && v != y).collect();
    let mut pick = Vec::new();
    fn rec(pool: &[VertexId], size: usize, pick: &mut Vec<VertexId>, ok: &mut dyn FnMut(&[VertexId]) -> bool) -> bool {
        if pick.len() == size {
            return ok(pick);
        }
        for i in 0..pool.len() {
            pick.push(pool[i]);
            if rec(&pool[i + 1..], size, pick, ok) {
                return true;
            }
            pick.pop();
        }
        false
    }
    rec(&pool, size, &mut pick, &mut |s| check_separates(&inst, s).is_ok())
}

/// Every cut of a tagged filling at two non-adjacent boundary vertices.
fn cuts(k: &AbstractTriangulation) -> Result<Vec<(VertexId, VertexId)>, String> {
    let n = k.boundary_tag().ok_or("untagged complex")?;
    let mut out = Vec::new();
    for x in 0..n as VertexId {
        for y in x + 2..n as VertexId {
            if cycle_distance(n, x, y).unwrap() >= 2 {
                out.push((x, y));
            }
        }
    }
    Ok(out)
}

/// Menger duality on every cut: certificate consistency and exhaustive
/// minimality of the separator. Returns the number of cuts checked.
pub fn check_menger(k: &AbstractTriangulation) -> Result<usize, String> {
    let all = cuts(k)?;
    for &(x, y) in &all {
        let inst = make_cut_instance(k, x, y).map_err(|e| e.to_string())?;
        let cert = max_disjoint_paths(&inst);
        verify_certificate(&inst, &cert).map_err(|e| format!("({x},{y}): {e}"))?;
        let s = cert.separator.len();
        if s > 0 && separator_of_size_exists(k, x, y, s - 1) {
            return Err(format!("({x},{y}): separator of size {s} is not minimum"));
        }
    }
    Ok(all.len())
}

/// Sperner walk through the minimum separator of every cut, and the
/// resulting `|S| ≥ d_K(x,y) − 1`.
pub fn check_sperner(k: &AbstractTriangulation) -> Result<usize, String> {
    let all = cuts(k)?;
    let graph = k.skeleton();
    for &(x, y) in &all {
        let inst = make_cut_instance(k, x, y).map_err(|e| e.to_string())?;
        let sep = max_disjoint_paths(&inst).separator;
        let walk = sperner_walk(k, x, y, &sep).map_err(|e| format!("({x},{y}): sperner: {e}"))?;
        walk.check(k, x, y, &sep).map_err(|e| format!("({x},{y}): {e}"))?;
        let d = bfs(&graph, x)[y as usize];
        if (sep.len() as u32) + 1 < d {
            return Err(format!("({x},{y}): |S| = {} < d_K - 1 = {}", sep.len(), d - 1));
        }
    }
    Ok(all.len())
}

pub fn check_duality(k: &AbstractTriangulation) -> Result<usize, String> {
    check_menger(k)?;
    check_sperner(k)
}

/// Smallest `Σ d_C(l_i, r_i)` over all choices of `k` distinct left and `k`
/// distinct right vertices, matched in every order.
pub fn min_path_sum(n: usize, x: usize, y: usize, k: usize) -> Option<u32> {
    let left: Vec<usize> = (x + 1..y).collect();
    let right: Vec<usize> = (y + 1..n).chain(0..x).collect();
    if left.len() < k || right.len() < k {
        return None;
    }
    let mut best = u32::MAX;
    let mut ls = Vec::new();
    fn choose(pool: &[usize], k: usize, cur: &mut Vec<usize>, out: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            out(cur);
            return;
        }
        for i in 0..pool.len() {
            cur.push(pool[i]);
            choose(&pool[i + 1..], k, cur, out);
            cur.pop();
        }
    }
    fn perms(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut dyn FnMut(&[usize])) {
        if rest.is_empty() {
            out(cur);
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            cur.push(v);
            perms(rest, cur, out);
            cur.pop();
            rest.insert(i, v);
        }
    }
    choose(&left, k, &mut ls, &mut |l| {
        let mut rs = Vec::new();
        choose(&right, k, &mut rs, &mut |r| {
            perms(&mut r.to_vec(), &mut Vec::new(), &mut |order| {
                let s: u32 = l
                    .iter()
                    .zip(order)
                    .map(|(&a, &b)| cycle_distance(n, a as VertexId, b as VertexId).unwrap())
                    .sum();
                best = best.min(s);
            });
        });
    });
    Some(best)
}
