//! Vertex-disjoint path families, minimum vertex separators, and the
//! constructive walk through a separator between two boundary vertices.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{edge, AbstractTriangulation, ComplexError, Edge, SkeletonGraph, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeparatorError {
    #[error("vertex {0} is not on the boundary cycle")]
    NotOnBoundary(VertexId),
    #[error("boundary vertices {0} and {1} are equal or adjacent")]
    Adjacent(VertexId, VertexId),
    #[error("separator contains endpoint {0}")]
    ContainsEndpoint(VertexId),
    #[error("separator vertex {0} out of range")]
    OutOfRange(VertexId),
    #[error("set does not separate the two arcs; witness path {witness:?}")]
    NotSeparating { witness: Vec<VertexId> },
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A filling cut at two non-adjacent boundary vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutInstance {
    pub complex: AbstractTriangulation,
    pub x: VertexId,
    pub y: VertexId,
    /// Arc strictly between `x` and `y`, walking the cycle forward from `x`.
    pub left: Vec<VertexId>,
    /// The other arc, walking forward from `y`.
    pub right: Vec<VertexId>,
    cycle: Vec<VertexId>,
}

impl CutInstance {
    pub fn cycle(&self) -> &[VertexId] {
        &self.cycle
    }
}

pub fn make_cut_instance(
    k: &AbstractTriangulation,
    x: VertexId,
    y: VertexId,
) -> Result<CutInstance, SeparatorError> {
    let cycle = k.boundary_cycle()?;
    let n = cycle.len();
    let ix = cycle.iter().position(|&v| v == x).ok_or(SeparatorError::NotOnBoundary(x))?;
    let iy = cycle.iter().position(|&v| v == y).ok_or(SeparatorError::NotOnBoundary(y))?;
    let gap = (iy + n - ix) % n;
    if gap <= 1 || gap >= n - 1 {
        return Err(SeparatorError::Adjacent(x, y));
    }
    let left = (1..gap).map(|s| cycle[(ix + s) % n]).collect();
    let right = (1..n - gap).map(|s| cycle[(iy + s) % n]).collect();
    Ok(CutInstance {
        complex: k.clone(),
        x,
        y,
        left,
        right,
        cycle,
    })
}

/// Disjoint left–right paths in the skeleton minus `x, y`, with a separator
/// of the same size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MengerCertificate {
    pub paths: Vec<Vec<VertexId>>,
    pub separator: Vec<VertexId>,
}

/// Unit vertex-capacity max flow with adjacency-list arcs.
struct FlowNetwork {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        FlowNetwork {
            head: vec![Vec::new(); nodes],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn add_arc(&mut self, u: usize, v: usize, c: i64) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    /// Residual BFS; returns parent arcs.
    fn bfs(&self, s: usize) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.head.len()];
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.head[u] {
                let v = self.to[a];
                if self.cap[a] > 0 && !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(a);
                    queue.push_back(v);
                }
            }
        }
        parent
    }

    /// Nodes with a residual path to `t`.
    fn reaches(&self, t: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[t] = true;
        let mut queue = VecDeque::from([t]);
        while let Some(v) = queue.pop_front() {
            for &a in &self.head[v] {
                let u = self.to[a];
                if self.cap[a ^ 1] > 0 && !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        seen
    }

    /// Edmonds–Karp; every augmenting path carries one unit here.
    fn max_flow(&mut self, s: usize, t: usize) -> usize {
        let mut flow = 0;
        loop {
            let parent = self.bfs(s);
            if parent[t].is_none() {
                return flow;
            }
            let mut v = t;
            while v != s {
                let a = parent[v].unwrap();
                self.cap[a] -= 1;
                self.cap[a ^ 1] += 1;
                v = self.to[a ^ 1];
            }
            flow += 1;
        }
    }
}

/// Maximum family of vertex-disjoint left–right paths avoiding `x, y`, and a
/// minimum separator read off the final residual graph. The separator is
/// the minimum cut nearest the right arc.
pub fn max_disjoint_paths(inst: &CutInstance) -> MengerCertificate {
    let k = &inst.complex;
    let nv = k.num_vertices();
    let graph = k.skeleton();
    let blocked = |v: VertexId| v == inst.x || v == inst.y;
    let inf = nv as i64 + 1;
    let (src, sink) = (2 * nv, 2 * nv + 1);
    let vin = |v: VertexId| 2 * v as usize;
    let vout = |v: VertexId| 2 * v as usize + 1;

    let mut net = FlowNetwork::new(2 * nv + 2);
    for &l in &inst.left {
        net.add_arc(src, vin(l), inf);
    }
    for v in 0..nv as VertexId {
        if blocked(v) {
            continue;
        }
        net.add_arc(vin(v), vout(v), 1);
        for &w in graph.neighbors(v) {
            if !blocked(w) {
                net.add_arc(vout(v), vin(w), inf);
            }
        }
    }
    for &r in &inst.right {
        net.add_arc(vout(r), sink, inf);
    }
    net.max_flow(src, sink);

    let reach = net.reaches(sink);
    let separator: Vec<VertexId> = (0..nv as VertexId)
        .filter(|&v| !blocked(v) && reach[vout(v)] && !reach[vin(v)])
        .collect();

    // Flow on a forward arc = capacity used = reverse residual.
    let mut used: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    for u in 0..net.head.len() {
        for &a in &net.head[u] {
            if a % 2 == 0 && net.cap[a ^ 1] > 0 {
                *used.entry((u, net.to[a])).or_insert(0) += net.cap[a ^ 1];
            }
        }
    }
    let mut paths = Vec::new();
    loop {
        let Some((&(_, first), _)) = used.range((src, 0)..(src + 1, 0)).next() else { break };
        take(&mut used, src, first);
        let mut path = Vec::new();
        let mut node = first;
        while node != sink {
            if node % 2 == 0 {
                path.push((node / 2) as VertexId);
            }
            let (&(_, next), _) = used
                .range((node, 0)..(node + 1, 0))
                .next()
                .expect("flow is conserved");
            take(&mut used, node, next);
            node = next;
        }
        paths.push(path);
    }
    MengerCertificate { paths, separator }
}

fn take(used: &mut BTreeMap<(usize, usize), i64>, u: usize, v: usize) {
    let slot = used.get_mut(&(u, v)).expect("arc carries flow");
    *slot -= 1;
    if *slot == 0 {
        used.remove(&(u, v));
    }
}

/// Checks that `set` separates the two arcs in the skeleton minus `x, y`.
/// On failure returns a left–right path avoiding `set`.
pub fn check_separates(inst: &CutInstance, set: &[VertexId]) -> Result<(), Vec<VertexId>> {
    let graph = inst.complex.skeleton();
    let mut blocked = vec![false; graph.num_vertices()];
    for &v in set.iter().chain([&inst.x, &inst.y]) {
        if let Some(b) = blocked.get_mut(v as usize) {
            *b = true;
        }
    }
    let mut parent: Vec<Option<VertexId>> = vec![None; graph.num_vertices()];
    let mut seen = vec![false; graph.num_vertices()];
    let mut queue = VecDeque::new();
    for &l in &inst.left {
        if !blocked[l as usize] {
            seen[l as usize] = true;
            queue.push_back(l);
        }
    }
    let right: BTreeSet<VertexId> = inst.right.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        if right.contains(&v) {
            let mut path = vec![v];
            let mut cur = v;
            while let Some(p) = parent[cur as usize] {
                path.push(p);
                cur = p;
            }
            path.reverse();
            return Err(path);
        }
        for &w in graph.neighbors(v) {
            if !blocked[w as usize] && !seen[w as usize] {
                seen[w as usize] = true;
                parent[w as usize] = Some(v);
                queue.push_back(w);
            }
        }
    }
    Ok(())
}

/// Full consistency check of a certificate; the message names the first
/// failed invariant.
pub fn verify_certificate(inst: &CutInstance, cert: &MengerCertificate) -> Result<(), String> {
    let graph = inst.complex.skeleton();
    let left: BTreeSet<_> = inst.left.iter().copied().collect();
    let right: BTreeSet<_> = inst.right.iter().copied().collect();
    let mut used = BTreeSet::new();
    for p in &cert.paths {
        let (Some(first), Some(last)) = (p.first(), p.last()) else {
            return Err("empty path".into());
        };
        if !left.contains(first) || !right.contains(last) {
            return Err(format!("path {p:?} does not run from left to right"));
        }
        for w in p.windows(2) {
            if !graph.has_edge(w[0], w[1]) {
                return Err(format!("path {p:?} uses non-edge {{{},{}}}", w[0], w[1]));
            }
        }
        for &v in p {
            if v == inst.x || v == inst.y {
                return Err(format!("path {p:?} passes through an endpoint"));
            }
            if !used.insert(v) {
                return Err(format!("vertex {v} shared between paths"));
            }
        }
    }
    for &s in &cert.separator {
        if s == inst.x || s == inst.y {
            return Err(format!("separator contains endpoint {s}"));
        }
    }
    if let Err(w) = check_separates(inst, &cert.separator) {
        return Err(format!("separator misses path {w:?}"));
    }
    if cert.paths.len() != cert.separator.len() {
        return Err(format!(
            "{} paths but separator of size {}",
            cert.paths.len(),
            cert.separator.len()
        ));
    }
    Ok(())
}

/// A filling whose boundary vertices in a separator were pushed inward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddedComplex {
    pub complex: AbstractTriangulation,
    /// Boundary cycle after padding, position-aligned with the original.
    pub cycle: Vec<VertexId>,
    /// Vertices `>= original_vertices` are padding.
    pub original_vertices: usize,
}

/// For each boundary vertex `l` in `set`, adds a vertex `l'` joined to `l`
/// and its two cycle neighbours by two triangles, so `l'` replaces `l` on
/// the boundary. The set itself is unchanged.
pub fn pad_boundary(
    k: &AbstractTriangulation,
    x: VertexId,
    y: VertexId,
    set: &[VertexId],
) -> Result<PaddedComplex, SeparatorError> {
    let members: BTreeSet<VertexId> = set.iter().copied().collect();
    for &v in [x, y].iter() {
        if members.contains(&v) {
            return Err(SeparatorError::ContainsEndpoint(v));
        }
    }
    let mut cycle = k.boundary_cycle()?;
    let n = cycle.len();
    let mut triangles = k.triangles().to_vec();
    let mut next = k.num_vertices() as VertexId;
    for i in 0..n {
        let l = cycle[i];
        if !members.contains(&l) {
            continue;
        }
        let p = cycle[(i + n - 1) % n];
        let q = cycle[(i + 1) % n];
        let fresh = next;
        next += 1;
        triangles.push([p, l, fresh]);
        triangles.push([l, q, fresh]);
        cycle[i] = fresh;
    }
    Ok(PaddedComplex {
        complex: AbstractTriangulation::new(next as usize, triangles, None),
        cycle,
        original_vertices: k.num_vertices(),
    })
}

/// Walk from `x` to `y` whose interior vertices all lie in the separator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpernerWalk {
    pub walk: Vec<VertexId>,
    /// Blue endpoints of every crossed edge along the auxiliary cycle,
    /// consecutive repeats removed. `walk` is the segment of this sequence
    /// from the last `x` before the first `y`.
    #[serde(skip)]
    pub traversed: Vec<VertexId>,
}

impl SpernerWalk {
    /// The walk with loops erased.
    pub fn to_path(&self) -> Vec<VertexId> {
        let mut path: Vec<VertexId> = Vec::new();
        let mut pos: BTreeMap<VertexId, usize> = BTreeMap::new();
        for &v in &self.walk {
            if let Some(&i) = pos.get(&v) {
                for u in path.drain(i + 1..) {
                    pos.remove(&u);
                }
            } else {
                pos.insert(v, path.len());
                path.push(v);
            }
        }
        path
    }

    /// Checks endpoints, adjacency, and interior membership in `set`.
    pub fn check(
        &self,
        k: &AbstractTriangulation,
        x: VertexId,
        y: VertexId,
        set: &[VertexId],
    ) -> Result<(), String> {
        let graph = k.skeleton();
        if self.walk.first() != Some(&x) || self.walk.last() != Some(&y) {
            return Err(format!("walk {:?} does not run from {x} to {y}", self.walk));
        }
        for w in self.walk.windows(2) {
            if !graph.has_edge(w[0], w[1]) {
                return Err(format!("walk step {{{},{}}} is not an edge", w[0], w[1]));
            }
        }
        let members: BTreeSet<_> = set.iter().collect();
        for v in &self.walk[1..self.walk.len() - 1] {
            if !members.contains(v) {
                return Err(format!("interior vertex {v} not in separator"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Colour {
    Red,
    Blue,
    Green,
}

/// Extracts a walk from `x` to `y` through `set`, which must separate the
/// two boundary arcs. Boundary vertices of `set` are first padded inward;
/// then every vertex is coloured blue (in `set` or an endpoint), red
/// (reaches the right arc avoiding blue) or green. Triangles sharing a
/// red–blue edge, plus the exterior face for red–blue boundary edges, form
/// a graph of maximum degree 2; the walk is read off the cycle through the
/// exterior face.
pub fn sperner_walk(
    k: &AbstractTriangulation,
    x: VertexId,
    y: VertexId,
    set: &[VertexId],
) -> Result<SpernerWalk, SeparatorError> {
    let inst = make_cut_instance(k, x, y)?;
    for &v in set {
        if v as usize >= k.num_vertices() {
            return Err(SeparatorError::OutOfRange(v));
        }
        if v == x || v == y {
            return Err(SeparatorError::ContainsEndpoint(v));
        }
    }
    check_separates(&inst, set).map_err(|witness| SeparatorError::NotSeparating { witness })?;

    let padded = pad_boundary(k, x, y, set)?;
    let pk = &padded.complex;
    let graph: SkeletonGraph = pk.skeleton();
    let nv = pk.num_vertices();

    let mut colour = vec![Colour::Green; nv];
    for &v in set.iter().chain([&x, &y]) {
        colour[v as usize] = Colour::Blue;
    }
    let n = padded.cycle.len();
    let iy = inst.cycle().iter().position(|&v| v == y).expect("y on cycle");
    let mut queue = VecDeque::new();
    for s in 1..n - (iy + n - inst.cycle().iter().position(|&v| v == x).unwrap()) % n {
        let r = padded.cycle[(iy + s) % n];
        if colour[r as usize] == Colour::Green {
            colour[r as usize] = Colour::Red;
            queue.push_back(r);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &w in graph.neighbors(v) {
            if colour[w as usize] == Colour::Green {
                colour[w as usize] = Colour::Red;
                queue.push_back(w);
            }
        }
    }

    // Auxiliary graph. Node `tris.len()` is the exterior face.
    let tris = pk.triangles();
    let exterior = tris.len();
    let mut on_edge: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    for (i, t) in tris.iter().enumerate() {
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
            on_edge.entry(edge(a, b)).or_default().push(i);
        }
    }
    let mut aux: Vec<Vec<(usize, Edge)>> = vec![Vec::new(); tris.len() + 1];
    for (e, on) in &on_edge {
        let (ca, cb) = (colour[e[0] as usize], colour[e[1] as usize]);
        let red_blue = matches!((ca, cb), (Colour::Red, Colour::Blue) | (Colour::Blue, Colour::Red));
        if !red_blue {
            continue;
        }
        match on.as_slice() {
            [t] => {
                aux[*t].push((exterior, *e));
                aux[exterior].push((*t, *e));
            }
            [t, u] => {
                aux[*t].push((*u, *e));
                aux[*u].push((*t, *e));
            }
            _ => return Err(SeparatorError::Internal(format!("edge {e:?} in {} triangles", on.len()))),
        }
    }
    for (i, nbrs) in aux.iter().enumerate().take(exterior) {
        if nbrs.len() != 0 && nbrs.len() != 2 {
            return Err(SeparatorError::Internal(format!(
                "triangle {:?} has auxiliary degree {}",
                tris[i],
                nbrs.len()
            )));
        }
    }
    if aux[exterior].len() != 2 {
        return Err(SeparatorError::Internal(format!(
            "exterior face has auxiliary degree {}",
            aux[exterior].len()
        )));
    }

    let blue_end = |e: &Edge| if colour[e[0] as usize] == Colour::Blue { e[0] } else { e[1] };
    let start = aux[exterior]
        .iter()
        .position(|(_, e)| blue_end(e) == x)
        .ok_or_else(|| SeparatorError::Internal("no red-blue boundary edge at x".into()))?;
    let (mut node, mut via) = aux[exterior][start];
    let mut traversed = vec![x];
    let mut steps = 0;
    while node != exterior {
        let (next, e) = *aux[node]
            .iter()
            .find(|(_, e)| *e != via)
            .ok_or_else(|| SeparatorError::Internal("auxiliary cycle broken".into()))?;
        let b = blue_end(&e);
        if traversed.last() != Some(&b) {
            traversed.push(b);
        }
        node = next;
        via = e;
        steps += 1;
        if steps > tris.len() + 1 {
            return Err(SeparatorError::Internal("auxiliary walk does not close".into()));
        }
    }

    let first_y = traversed
        .iter()
        .position(|&v| v == y)
        .ok_or_else(|| SeparatorError::Internal("walk never reaches y".into()))?;
    let last_x = traversed[..first_y]
        .iter()
        .rposition(|&v| v == x)
        .ok_or_else(|| SeparatorError::Internal("walk does not start at x".into()))?;
    let walk = traversed[last_x..=first_y].to_vec();
    if walk.iter().any(|&v| v as usize >= padded.original_vertices) {
        return Err(SeparatorError::Internal("padding vertex on walk".into()));
    }
    Ok(SpernerWalk { walk, traversed })
}
