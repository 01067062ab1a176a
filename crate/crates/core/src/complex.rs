//! Abstract triangulations: validation, boundary extraction, fan closure,
//! Euler characteristic and canonical forms.
//!
//! A complex is a vertex count plus a list of vertex triples. Edges, the
//! boundary and the 1-skeleton are all derived from the triples. When a
//! complex is tagged as a filling of `C_n`, vertices `0..n` are the boundary
//! cycle in cyclic order and every other vertex is interior.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense vertex index in `[0, num_vertices)`.
pub type VertexId = u32;

/// Unordered vertex pair, stored with the smaller endpoint first.
pub type Edge = [VertexId; 2];

#[inline]
pub fn edge(a: VertexId, b: VertexId) -> Edge {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("boundary is not a disjoint union of cycles (vertex {vertex} has boundary degree {degree})")]
    BoundaryNotCycles { vertex: VertexId, degree: usize },
    #[error("expected a single boundary cycle, found {0}")]
    NotSingleBoundaryCycle(usize),
    #[error("complex has no boundary tag")]
    MissingBoundaryTag,
    #[error("complex is not a valid abstract triangulation: {0}")]
    Invalid(String),
}

/// One violated invariant, with the offending simplex as witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// A triple repeats a vertex.
    DegenerateTriple { triangle: [VertexId; 3] },
    /// A triple names a vertex outside `0..num_vertices`.
    VertexOutOfRange { triangle: [VertexId; 3], vertex: VertexId },
    DuplicateTriple { triangle: [VertexId; 3] },
    /// An edge lies in more than two triangles.
    EdgeOverloaded { edge: Edge, count: usize },
    UnusedVertex { vertex: VertexId },
    /// A vertex meets a number of boundary edges other than 0 or 2.
    BoundaryNotCycles { vertex: VertexId, degree: usize },
    BoundaryTagTooSmall { n: usize },
    BoundaryTagTooLarge { n: usize, num_vertices: usize },
    /// A cycle edge `{i, i+1 mod n}` of the tagged boundary is not a boundary edge.
    BoundaryEdgeMissing { edge: Edge },
    /// A boundary edge that is not on the tagged cycle.
    UnexpectedBoundaryEdge { edge: Edge },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::DegenerateTriple { triangle } => write!(f, "degenerate triple {triangle:?}"),
            Violation::VertexOutOfRange { triangle, vertex } => {
                write!(f, "vertex {vertex} of triple {triangle:?} out of range")
            }
            Violation::DuplicateTriple { triangle } => write!(f, "duplicate triple {triangle:?}"),
            Violation::EdgeOverloaded { edge, count } => {
                write!(f, "edge {{{},{}}} in {count} triangles", edge[0], edge[1])
            }
            Violation::UnusedVertex { vertex } => write!(f, "vertex {vertex} in no triangle"),
            Violation::BoundaryNotCycles { vertex, degree } => {
                write!(f, "vertex {vertex} has boundary degree {degree}")
            }
            Violation::BoundaryTagTooSmall { n } => write!(f, "boundary tag {n} < 3"),
            Violation::BoundaryTagTooLarge { n, num_vertices } => {
                write!(f, "boundary tag {n} exceeds vertex count {num_vertices}")
            }
            Violation::BoundaryEdgeMissing { edge } => {
                write!(f, "cycle edge {{{},{}}} is not a boundary edge", edge[0], edge[1])
            }
            Violation::UnexpectedBoundaryEdge { edge } => {
                write!(f, "boundary edge {{{},{}}} is not on the tagged cycle", edge[0], edge[1])
            }
        }
    }
}

/// Non-fatal observations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// The 1-skeleton splits into this many connected components.
    Disconnected { components: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Deserialize)]
struct RawTriangulation {
    num_vertices: usize,
    #[serde(default)]
    boundary_n: Option<usize>,
    triangles: Vec<[VertexId; 3]>,
}

impl From<RawTriangulation> for AbstractTriangulation {
    fn from(raw: RawTriangulation) -> Self {
        AbstractTriangulation::new(raw.num_vertices, raw.triangles, raw.boundary_n)
    }
}

/// Pure combinatorial 2-complex. Immutable once built.
///
/// Triples are stored sorted, and the triple list is sorted, so two complexes
/// with the same triangle set compare equal and serialize identically.
/// Construction never fails; [`AbstractTriangulation::validate`] reports what
/// is wrong with arbitrary input.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "RawTriangulation")]
pub struct AbstractTriangulation {
    num_vertices: usize,
    boundary_n: Option<usize>,
    triangles: Vec<[VertexId; 3]>,
}

impl AbstractTriangulation {
    pub fn new(num_vertices: usize, triangles: Vec<[VertexId; 3]>, boundary_n: Option<usize>) -> Self {
        let mut triangles: Vec<[VertexId; 3]> = triangles
            .into_iter()
            .map(|mut t| {
                t.sort_unstable();
                t
            })
            .collect();
        triangles.sort_unstable();
        AbstractTriangulation {
            num_vertices,
            boundary_n,
            triangles,
        }
    }

    /// Same triangles, tagged as a filling of `C_n`.
    pub fn with_boundary_tag(mut self, n: Option<usize>) -> Self {
        self.boundary_n = n;
        self
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn boundary_tag(&self) -> Option<usize> {
        self.boundary_n
    }

    pub fn triangles(&self) -> &[[VertexId; 3]] {
        &self.triangles
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Every unordered pair appearing in some triangle, with its multiplicity.
    pub fn edge_counts(&self) -> BTreeMap<Edge, usize> {
        let mut counts = BTreeMap::new();
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
                if a != b {
                    *counts.entry(edge(a, b)).or_insert(0) += 1;
                }
            }
        }
        counts
    }

    pub fn edges(&self) -> Vec<Edge> {
        self.edge_counts().into_keys().collect()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_counts().len()
    }

    /// Edges lying in exactly one triangle.
    pub fn boundary_edges(&self) -> Vec<Edge> {
        self.edge_counts()
            .into_iter()
            .filter(|&(_, c)| c == 1)
            .map(|(e, _)| e)
            .collect()
    }

    pub fn skeleton(&self) -> SkeletonGraph {
        SkeletonGraph::from_edges(self.num_vertices, self.edges())
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let nv = self.num_vertices;

        let mut seen = BTreeSet::new();
        let mut used = vec![false; nv];
        for t in &self.triangles {
            if t[0] == t[1] || t[1] == t[2] {
                report.violations.push(Violation::DegenerateTriple { triangle: *t });
            }
            for &v in t {
                if (v as usize) < nv {
                    used[v as usize] = true;
                } else {
                    report
                        .violations
                        .push(Violation::VertexOutOfRange { triangle: *t, vertex: v });
                }
            }
            if !seen.insert(*t) {
                report.violations.push(Violation::DuplicateTriple { triangle: *t });
            }
        }
        for (v, &u) in used.iter().enumerate() {
            if !u {
                report.violations.push(Violation::UnusedVertex { vertex: v as VertexId });
            }
        }

        let counts = self.edge_counts();
        for (e, &c) in &counts {
            if c > 2 {
                report.violations.push(Violation::EdgeOverloaded { edge: *e, count: c });
            }
        }

        let boundary: BTreeSet<Edge> = counts
            .iter()
            .filter(|&(_, &c)| c == 1)
            .map(|(e, _)| *e)
            .collect();
        let mut degree: BTreeMap<VertexId, usize> = BTreeMap::new();
        for e in &boundary {
            *degree.entry(e[0]).or_insert(0) += 1;
            *degree.entry(e[1]).or_insert(0) += 1;
        }
        for (&v, &d) in &degree {
            if d != 2 {
                report
                    .violations
                    .push(Violation::BoundaryNotCycles { vertex: v, degree: d });
            }
        }

        if let Some(n) = self.boundary_n {
            if n < 3 {
                report.violations.push(Violation::BoundaryTagTooSmall { n });
            } else if n > nv {
                report.violations.push(Violation::BoundaryTagTooLarge { n, num_vertices: nv });
            } else {
                let cycle: BTreeSet<Edge> = (0..n)
                    .map(|i| edge(i as VertexId, ((i + 1) % n) as VertexId))
                    .collect();
                for e in cycle.difference(&boundary) {
                    report.violations.push(Violation::BoundaryEdgeMissing { edge: *e });
                }
                for e in boundary.difference(&cycle) {
                    report.violations.push(Violation::UnexpectedBoundaryEdge { edge: *e });
                }
            }
        }

        let components = self.skeleton().num_components_touched(&used);
        if components > 1 {
            report.warnings.push(Warning::Disconnected { components });
        }
        report
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }

    /// Boundary cycles, each rotated to start at its smallest vertex and
    /// oriented toward the smaller of that vertex's two boundary neighbours.
    /// Cycles are listed by their first vertex.
    pub fn boundary(&self) -> Result<Vec<Vec<VertexId>>, ComplexError> {
        let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for e in self.boundary_edges() {
            adj.entry(e[0]).or_default().push(e[1]);
            adj.entry(e[1]).or_default().push(e[0]);
        }
        for (&v, nbrs) in adj.iter_mut() {
            if nbrs.len() != 2 {
                return Err(ComplexError::BoundaryNotCycles {
                    vertex: v,
                    degree: nbrs.len(),
                });
            }
            nbrs.sort_unstable();
        }
        let mut visited = BTreeSet::new();
        let mut cycles = Vec::new();
        for (&start, nbrs) in &adj {
            if visited.contains(&start) {
                continue;
            }
            let mut cycle = vec![start];
            visited.insert(start);
            let mut prev = start;
            let mut cur = nbrs[0];
            while cur != start {
                cycle.push(cur);
                visited.insert(cur);
                let pair = &adj[&cur];
                let next = if pair[0] == prev { pair[1] } else { pair[0] };
                prev = cur;
                cur = next;
            }
            cycles.push(cycle);
        }
        Ok(cycles)
    }

    /// The single boundary cycle in filling order: `0..n` when tagged,
    /// otherwise the canonical cycle from [`Self::boundary`].
    pub fn boundary_cycle(&self) -> Result<Vec<VertexId>, ComplexError> {
        if let Some(n) = self.boundary_n {
            return Ok((0..n as VertexId).collect());
        }
        let mut cycles = self.boundary()?;
        if cycles.len() != 1 {
            return Err(ComplexError::NotSingleBoundaryCycle(cycles.len()));
        }
        Ok(cycles.pop().unwrap())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices as i64 - self.num_edges() as i64 + self.triangles.len() as i64
    }

    /// Caps the boundary cycle with the fan of `n - 2` triangles apexed at
    /// the first boundary vertex.
    pub fn close_boundary(&self) -> Result<ClosedSurface, ComplexError> {
        let cycles = self.boundary()?;
        if cycles.len() != 1 {
            return Err(ComplexError::NotSingleBoundaryCycle(cycles.len()));
        }
        let cycle = match self.boundary_n {
            Some(n) => (0..n as VertexId).collect(),
            None => cycles.into_iter().next().unwrap(),
        };
        let apex = cycle[0];
        let cap = cycle
            .windows(2)
            .skip(1)
            .map(|w| [apex, w[0], w[1]])
            .collect();
        Ok(ClosedSurface {
            base: self.clone(),
            cycle,
            cap,
        })
    }

    /// Applies `map[old] = new` to every vertex. `map` must be a permutation.
    pub fn relabel(&self, map: &[VertexId]) -> AbstractTriangulation {
        let triangles = self
            .triangles
            .iter()
            .map(|t| [map[t[0] as usize], map[t[1] as usize], map[t[2] as usize]])
            .collect();
        AbstractTriangulation::new(self.num_vertices, triangles, self.boundary_n)
    }

    pub fn canonical_form(&self) -> Result<Vec<u8>, ComplexError> {
        canonical_form(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("triangulation serializes")
    }
}

/// A closed complex obtained by capping a boundary cycle with a fan.
///
/// The cap is kept apart from the base complex: a cap diagonal `{apex, v}`
/// is a new edge even when the base already has a chord with the same
/// endpoints, exactly as when a disk is glued along the cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedSurface {
    base: AbstractTriangulation,
    cycle: Vec<VertexId>,
    cap: Vec<[VertexId; 3]>,
}

impl ClosedSurface {
    pub fn base(&self) -> &AbstractTriangulation {
        &self.base
    }

    pub fn cap(&self) -> &[[VertexId; 3]] {
        &self.cap
    }

    pub fn apex(&self) -> VertexId {
        self.cycle[0]
    }

    pub fn num_vertices(&self) -> usize {
        self.base.num_vertices()
    }

    pub fn num_triangles(&self) -> usize {
        self.base.num_triangles() + self.cap.len()
    }

    pub fn num_edges(&self) -> usize {
        self.base.num_edges() + self.cycle.len().saturating_sub(3)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_triangles() as i64
    }

    /// Every edge, base and cap, lies in exactly two triangles.
    pub fn is_closed(&self) -> bool {
        // (edge, layer): layer 1 marks cap diagonals, which are distinct edges.
        let n = self.cycle.len();
        let on_cycle: BTreeSet<Edge> = (0..n)
            .map(|i| edge(self.cycle[i], self.cycle[(i + 1) % n]))
            .collect();
        let mut counts: BTreeMap<(Edge, u8), usize> = BTreeMap::new();
        for (e, c) in self.base.edge_counts() {
            counts.insert((e, 0), c);
        }
        for t in &self.cap {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
                let e = edge(a, b);
                let layer = u8::from(!on_cycle.contains(&e));
                *counts.entry((e, layer)).or_insert(0) += 1;
            }
        }
        counts.values().all(|&c| c == 2)
    }
}

/// Adjacency lists of the 1-skeleton, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonGraph {
    adjacency: Vec<Vec<VertexId>>,
}

impl SkeletonGraph {
    pub fn from_edges(num_vertices: usize, edges: impl IntoIterator<Item = Edge>) -> Self {
        let mut adjacency = vec![Vec::new(); num_vertices];
        for [a, b] in edges {
            if (a as usize) < num_vertices && (b as usize) < num_vertices {
                adjacency[a as usize].push(b);
                adjacency[b as usize].push(a);
            }
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
            nbrs.dedup();
        }
        SkeletonGraph { adjacency }
    }

    pub fn num_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v as usize]
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.adjacency[a as usize].binary_search(&b).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(a, nbrs)| {
            nbrs.iter()
                .filter(move |&&b| (a as VertexId) < b)
                .map(move |&b| [a as VertexId, b])
        })
    }

    /// Connected components among the vertices flagged in `mask`.
    fn num_components_touched(&self, mask: &[bool]) -> usize {
        let mut seen = vec![false; self.adjacency.len()];
        let mut components = 0;
        for s in 0..self.adjacency.len() {
            if seen[s] || !mask.get(s).copied().unwrap_or(false) {
                continue;
            }
            components += 1;
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adjacency[v] {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        queue.push_back(w as usize);
                    }
                }
            }
        }
        components
    }
}

/// Canonical byte string of a tagged filling of `C_n`.
///
/// For each of the `2n` dihedral relabelings of the boundary, interior
/// vertices are numbered in the order a breadth-first walk over the dual
/// graph first meets them, starting from the triangle on boundary edge
/// `{0,1}`. The lexicographically smallest resulting triangle list wins.
pub fn canonical_form(k: &AbstractTriangulation) -> Result<Vec<u8>, ComplexError> {
    let n = k.boundary_tag().ok_or(ComplexError::MissingBoundaryTag)?;
    if n < 3 || n > k.num_vertices() {
        return Err(ComplexError::Invalid(format!("boundary tag {n}")));
    }
    let dual = DualGraph::new(k);
    let mut best: Option<Vec<[VertexId; 3]>> = None;
    for reflect in [false, true] {
        for rot in 0..n {
            let mut labels: Vec<Option<VertexId>> = vec![None; k.num_vertices()];
            for (i, slot) in labels.iter_mut().enumerate().take(n) {
                let new = if reflect { (rot + n - i) % n } else { (i + n - rot) % n };
                *slot = Some(new as VertexId);
            }
            let code = dual.relabeled_code(k, labels, n);
            if best.as_ref().is_none_or(|b| code < *b) {
                best = Some(code);
            }
        }
    }
    let best = best.unwrap_or_default();
    let mut bytes = Vec::with_capacity(8 + best.len() * 12);
    bytes.extend_from_slice(&(n as u32).to_le_bytes());
    bytes.extend_from_slice(&(k.num_vertices() as u32).to_le_bytes());
    for t in best {
        for v in t {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(bytes)
}

struct DualGraph {
    /// Triangles on each edge.
    on_edge: BTreeMap<Edge, Vec<usize>>,
}

impl DualGraph {
    fn new(k: &AbstractTriangulation) -> Self {
        let mut on_edge: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
        for (i, t) in k.triangles().iter().enumerate() {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
                on_edge.entry(edge(a, b)).or_default().push(i);
            }
        }
        DualGraph { on_edge }
    }

    /// Breadth-first over triangles from `start`, assigning fresh labels to
    /// newly met vertices. Each processed triangle is fully labelled, so the
    /// visiting order depends only on the labels.
    fn flood(
        &self,
        k: &AbstractTriangulation,
        start: usize,
        labels: &mut [Option<VertexId>],
        next: &mut VertexId,
        visited: &mut [bool],
    ) -> Vec<usize> {
        let tris = k.triangles();
        let mut order = vec![start];
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(t) = queue.pop_front() {
            let tri = tris[t];
            let mut sides: Vec<(Edge, Edge)> = [(tri[0], tri[1]), (tri[1], tri[2]), (tri[0], tri[2])]
                .into_iter()
                .map(|(a, b)| {
                    let la = labels[a as usize].expect("labelled");
                    let lb = labels[b as usize].expect("labelled");
                    (edge(la, lb), edge(a, b))
                })
                .collect();
            sides.sort_unstable();
            for (_, old) in sides {
                for &u in &self.on_edge[&old] {
                    if visited[u] {
                        continue;
                    }
                    visited[u] = true;
                    for &v in &tris[u] {
                        if labels[v as usize].is_none() {
                            labels[v as usize] = Some(*next);
                            *next += 1;
                        }
                    }
                    order.push(u);
                    queue.push_back(u);
                }
            }
        }
        order
    }

    fn relabeled_code(
        &self,
        k: &AbstractTriangulation,
        mut labels: Vec<Option<VertexId>>,
        n: usize,
    ) -> Vec<[VertexId; 3]> {
        let tris = k.triangles();
        let mut visited = vec![false; tris.len()];
        let mut next = n as VertexId;
        let mut inverse = vec![0 as VertexId; n];
        for (old, l) in labels.iter().enumerate().take(n) {
            inverse[l.unwrap() as usize] = old as VertexId;
        }

        for j in 0..n {
            let old = edge(inverse[j], inverse[(j + 1) % n]);
            let Some(on) = self.on_edge.get(&old) else { continue };
            for &t in on {
                if !visited[t] {
                    let mut fresh = tris[t];
                    fresh.sort_unstable_by_key(|&v| labels[v as usize].map_or(u32::MAX, |l| l));
                    for v in fresh {
                        if labels[v as usize].is_none() {
                            labels[v as usize] = Some(next);
                            next += 1;
                        }
                    }
                    self.flood(k, t, &mut labels, &mut next, &mut visited);
                }
            }
        }

        // Components attached to the rest through vertices only: commit the
        // start that yields the smallest component code, one at a time.
        while visited.iter().any(|v| !v) {
            let mut best: Option<(Vec<[VertexId; 3]>, Vec<Option<VertexId>>, VertexId, Vec<bool>)> = None;
            for t in (0..tris.len()).filter(|&t| !visited[t]) {
                for perm in PERMUTATIONS {
                    let mut l = labels.clone();
                    let mut nx = next;
                    let mut vis = visited.clone();
                    for p in perm {
                        let v = tris[t][p] as usize;
                        if l[v].is_none() {
                            l[v] = Some(nx);
                            nx += 1;
                        }
                    }
                    let order = self.flood(k, t, &mut l, &mut nx, &mut vis);
                    let mut code: Vec<[VertexId; 3]> = order
                        .iter()
                        .map(|&u| relabel_sorted(&tris[u], &l))
                        .collect();
                    code.sort_unstable();
                    if best.as_ref().is_none_or(|b| code < b.0) {
                        best = Some((code, l, nx, vis));
                    }
                }
            }
            let (_, l, nx, vis) = best.expect("an unvisited triangle exists");
            labels = l;
            next = nx;
            visited = vis;
        }

        let mut code: Vec<[VertexId; 3]> = tris.iter().map(|t| relabel_sorted(t, &labels)).collect();
        code.sort_unstable();
        code
    }
}

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn relabel_sorted(t: &[VertexId; 3], labels: &[Option<VertexId>]) -> [VertexId; 3] {
    let mut r = t.map(|v| labels[v as usize].expect("all vertices labelled"));
    r.sort_unstable();
    r
}
