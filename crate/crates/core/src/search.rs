//! Exhaustive search for minimum-vertex Lipschitz fillings of small cycles.
//!
//! Fillings are grown from the bare cycle `0..n` by repeatedly covering an
//! open edge (a cycle edge with no triangle, or an interior edge with one)
//! with a triangle whose third vertex is either an existing vertex or a
//! fresh one. Every filling whose triangles are edge-connected is reached
//! this way. Skeleton distances only shrink as edges are added, so a
//! partial complex can be discarded as soon as some boundary pair is
//! already too close.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use log::{debug, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::vertex_lower_bound;
use crate::complex::{AbstractTriangulation, VertexId};
use crate::metrics::{is_delta_filling, lipschitz_constant};
use crate::rational::{self, Rational};
pub use crate::plmesh::discretized_hemisphere;

/// Hard cap from the bitmask representation.
pub const MAX_VERTICES: usize = 64;

const FAR: u8 = u8::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("cycle length {0} < 3")]
    CycleTooShort(usize),
    #[error("epsilon {0} outside [0, 1)")]
    EpsilonOutOfRange(String),
    #[error("vertex limit {0} outside [n, {MAX_VERTICES}]")]
    VertexLimit(usize),
    #[error("failed to build thread pool: {0}")]
    ThreadPool(String),
    #[error("witness failed re-verification: {0}")]
    BadWitness(String),
}

/// Node and wall-clock limits. `None` means unlimited.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_seconds: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub budget: Budget,
    /// Worker threads. Results do not depend on this.
    pub threads: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: Budget::default(),
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelOutcome {
    Infeasible,
    Feasible,
    Exhausted,
}

/// One iterative-deepening round at a fixed vertex limit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub vertices: usize,
    pub nodes: u64,
    pub outcome: LevelOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub n: usize,
    #[serde(with = "rational::pair")]
    pub epsilon: Rational,
    pub d_value: Option<usize>,
    pub witness: Option<AbstractTriangulation>,
    pub nodes_explored: u64,
    pub proof_of_minimality: bool,
    pub budget_exhausted: bool,
    pub levels: Vec<LevelReport>,
}

/// All fillings found, one per isomorphism class, in discovery order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub fillings: Vec<AbstractTriangulation>,
    pub nodes_explored: u64,
    /// False when the budget ran out and the list is partial.
    pub complete: bool,
}

/// Growth state. Matrices have stride `m`; only `0..used` is meaningful.
#[derive(Clone, Debug)]
struct State {
    used: usize,
    /// `tri[a*m+b]`: bitmask of third vertices over the edge `{a,b}`.
    tri: Vec<u64>,
    dist: Vec<u8>,
    triangles: Vec<[u8; 3]>,
}

struct Undo {
    dist: Option<Vec<u8>>,
    fresh: bool,
}

struct Engine {
    n: usize,
    m: usize,
    /// Least admissible distance for boundary pair `(p, q)`, or `None`
    /// when no Lipschitz constraint applies.
    need: Option<Vec<u8>>,
}

impl Engine {
    fn new(n: usize, m: usize, delta: Option<Rational>) -> Self {
        let need = delta.map(|d| {
            let mut need = vec![0u8; n * n];
            for p in 0..n {
                for q in 0..n {
                    let dc = p.abs_diff(q).min(n - p.abs_diff(q)) as i64;
                    if dc >= 2 {
                        let v = d * Rational::from_integer(dc);
                        need[p * n + q] = v.ceil().to_integer() as u8;
                    }
                }
            }
            need
        });
        Engine { n, m, need }
    }

    fn is_cycle_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && b < self.n && (a + 1) % self.n == b || b < self.n && a < self.n && (b + 1) % self.n == a
    }

    fn cap(&self, a: usize, b: usize) -> u32 {
        if self.is_cycle_edge(a, b) {
            1
        } else {
            2
        }
    }

    fn count(&self, st: &State, a: usize, b: usize) -> u32 {
        st.tri[a * self.m + b].count_ones()
    }

    fn present(&self, st: &State, a: usize, b: usize) -> bool {
        self.count(st, a, b) > 0 || self.is_cycle_edge(a, b)
    }

    fn initial(&self) -> State {
        let m = self.m;
        let mut dist = vec![FAR; m * m];
        for i in 0..self.n {
            for j in 0..self.n {
                let d = i.abs_diff(j);
                dist[i * m + j] = d.min(self.n - d) as u8;
            }
        }
        State {
            used: self.n,
            tri: vec![0; m * m],
            dist,
            triangles: Vec::new(),
        }
    }

    /// Whether adding the edge `{u,v}` keeps every boundary pair far enough.
    fn edge_ok(&self, st: &State, u: usize, v: usize) -> bool {
        let Some(need) = &self.need else { return true };
        let (n, m) = (self.n, self.m);
        for p in 0..n {
            let (pu, pv) = (st.dist[p * m + u] as u16, st.dist[p * m + v] as u16);
            for q in p + 2..n {
                let req = need[p * n + q] as u16;
                if req == 0 {
                    continue;
                }
                let via = (pu + 1 + st.dist[v * m + q] as u16).min(pv + 1 + st.dist[u * m + q] as u16);
                if via < req {
                    return false;
                }
            }
        }
        true
    }

    /// Third vertices that may close the open edge `{a,b}`; the fresh vertex,
    /// if allowed, is listed last as `used`.
    fn candidates(&self, st: &State, a: usize, b: usize, out: &mut Vec<u8>) {
        out.clear();
        let over = st.tri[a * self.m + b];
        for w in 0..st.used {
            if w == a || w == b || over >> w & 1 == 1 {
                continue;
            }
            if self.count(st, a, w) >= self.cap(a, w) || self.count(st, b, w) >= self.cap(b, w) {
                continue;
            }
            if !self.present(st, a, w) && !self.edge_ok(st, a, w) {
                continue;
            }
            if !self.present(st, b, w) && !self.edge_ok(st, b, w) {
                continue;
            }
            out.push(w as u8);
        }
        if st.used < self.m {
            out.push(st.used as u8);
        }
    }

    /// The open edge with fewest candidates, lexicographically first on
    /// ties; `None` when the complex is complete.
    fn pick(&self, st: &State, scratch: &mut Vec<u8>) -> Option<((usize, usize), Vec<u8>)> {
        let mut best: Option<((usize, usize), Vec<u8>)> = None;
        for a in 0..st.used {
            for b in a + 1..st.used {
                let c = self.count(st, a, b);
                let open = if self.is_cycle_edge(a, b) { c == 0 } else { c == 1 };
                if !open {
                    continue;
                }
                self.candidates(st, a, b, scratch);
                if best.as_ref().is_none_or(|(_, c)| scratch.len() < c.len()) {
                    best = Some(((a, b), scratch.clone()));
                    if scratch.is_empty() {
                        return best;
                    }
                }
            }
        }
        best
    }

    fn relax(&self, st: &mut State, u: usize, v: usize) {
        let m = self.m;
        for i in 0..st.used {
            let (iu, iv) = (st.dist[i * m + u] as u16, st.dist[i * m + v] as u16);
            for j in 0..st.used {
                let via = (iu + 1 + st.dist[v * m + j] as u16).min(iv + 1 + st.dist[u * m + j] as u16);
                if via < st.dist[i * m + j] as u16 {
                    st.dist[i * m + j] = via as u8;
                }
            }
        }
    }

    fn apply(&self, st: &mut State, a: usize, b: usize, w: usize) -> Undo {
        let m = self.m;
        let fresh = w == st.used;
        let mut saved = None;
        if fresh {
            st.used += 1;
            for x in 0..w {
                let d = st.dist[a * m + x].min(st.dist[b * m + x]).saturating_add(1);
                st.dist[w * m + x] = d;
                st.dist[x * m + w] = d;
            }
            st.dist[w * m + w] = 0;
        } else {
            let new_a = !self.present(st, a, w);
            let new_b = !self.present(st, b, w);
            if new_a || new_b {
                saved = Some(st.dist.clone());
                if new_a {
                    self.relax(st, a, w);
                }
                if new_b {
                    self.relax(st, b, w);
                }
            }
        }
        for (p, q, r) in [(a, b, w), (a, w, b), (b, w, a)] {
            st.tri[p * m + q] |= 1 << r;
            st.tri[q * m + p] |= 1 << r;
        }
        st.triangles.push([a as u8, b as u8, w as u8]);
        Undo { dist: saved, fresh }
    }

    fn undo(&self, st: &mut State, a: usize, b: usize, w: usize, u: Undo) {
        let m = self.m;
        st.triangles.pop();
        for (p, q, r) in [(a, b, w), (a, w, b), (b, w, a)] {
            st.tri[p * m + q] &= !(1 << r);
            st.tri[q * m + p] &= !(1 << r);
        }
        if u.fresh {
            st.used -= 1;
            for x in 0..m {
                st.dist[w * m + x] = FAR;
                st.dist[x * m + w] = FAR;
            }
        }
        if let Some(d) = u.dist {
            st.dist = d;
        }
    }

    fn complex(&self, st: &State) -> AbstractTriangulation {
        let tris = st
            .triangles
            .iter()
            .map(|t| [t[0] as VertexId, t[1] as VertexId, t[2] as VertexId])
            .collect();
        AbstractTriangulation::new(st.used, tris, Some(self.n))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    First,
    All,
}

/// Result of exploring one subtree.
#[derive(Debug)]
struct Walk {
    nodes: u64,
    /// Completed complexes with the node index (1-based) they were found at.
    hits: Vec<(u64, AbstractTriangulation)>,
    /// Stopped because the node cap or deadline was reached.
    truncated: bool,
    timed_out: bool,
}

struct Dfs<'a> {
    engine: &'a Engine,
    mode: Mode,
    cap: u64,
    deadline: Option<Instant>,
    walk: Walk,
}

impl Dfs<'_> {
    /// Returns true to stop the whole walk.
    fn visit(&mut self, st: &mut State) -> bool {
        if self.walk.nodes >= self.cap {
            self.walk.truncated = true;
            return true;
        }
        self.walk.nodes += 1;
        if self.walk.nodes % 4096 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.walk.truncated = true;
                    self.walk.timed_out = true;
                    return true;
                }
            }
        }
        let mut scratch = Vec::new();
        let Some(((a, b), cands)) = self.engine.pick(st, &mut scratch) else {
            self.walk.hits.push((self.walk.nodes, self.engine.complex(st)));
            return self.mode == Mode::First;
        };
        for w in cands {
            let w = w as usize;
            let undo = self.engine.apply(st, a, b, w);
            let stop = self.visit(st);
            self.engine.undo(st, a, b, w, undo);
            if stop {
                return true;
            }
        }
        false
    }
}

fn explore(engine: &Engine, mut st: State, mode: Mode, cap: u64, deadline: Option<Instant>) -> Walk {
    let mut dfs = Dfs {
        engine,
        mode,
        cap,
        deadline,
        walk: Walk {
            nodes: 0,
            hits: Vec::new(),
            truncated: false,
            timed_out: false,
        },
    };
    dfs.visit(&mut st);
    dfs.walk
}

/// Preorder of the top of the search tree: nodes above the split depth, and
/// the subtrees hanging below it.
enum Event {
    Prefix,
    Task(State),
}

fn split(engine: &Engine, depth: usize) -> Vec<Event> {
    fn go(engine: &Engine, st: &mut State, depth: usize, out: &mut Vec<Event>) {
        let mut scratch = Vec::new();
        let picked = engine.pick(st, &mut scratch);
        if depth == 0 || picked.is_none() {
            out.push(Event::Task(st.clone()));
            return;
        }
        out.push(Event::Prefix);
        let ((a, b), cands) = picked.unwrap();
        for w in cands {
            let w = w as usize;
            let undo = engine.apply(st, a, b, w);
            go(engine, st, depth - 1, out);
            engine.undo(st, a, b, w, undo);
        }
    }
    let mut out = Vec::new();
    go(engine, &mut engine.initial(), depth, &mut out);
    out
}

const SPLIT_TARGET: usize = 256;
const SPLIT_MAX_DEPTH: usize = 12;

/// Splits until there are enough tasks to share out. Depends only on the
/// problem, never on the thread count.
fn split_adaptive(engine: &Engine) -> Vec<Event> {
    let mut events = split(engine, 0);
    for depth in 1..=SPLIT_MAX_DEPTH {
        let tasks = events.iter().filter(|e| matches!(e, Event::Task(_))).count();
        if tasks >= SPLIT_TARGET {
            break;
        }
        let next = split(engine, depth);
        let grew = next.iter().filter(|e| matches!(e, Event::Task(_))).count() > tasks;
        events = next;
        if !grew && depth > 1 {
            break;
        }
    }
    events
}

enum LevelRun {
    Found { nodes: u64, witness: AbstractTriangulation },
    Infeasible { nodes: u64 },
    Exhausted { nodes: u64 },
}

/// Runs one level to the first witness, producing exactly what a
/// single-threaded depth-first walk would.
fn run_level(
    engine: &Engine,
    node_budget: u64,
    deadline: Option<Instant>,
    pool: &rayon::ThreadPool,
    threads: usize,
) -> LevelRun {
    let events = split_adaptive(engine);
    let batch = threads.max(1) * 8;
    let mut cum: u64 = 0;
    let mut i = 0;
    while i < events.len() {
        // Collect the next batch: leading prefix events and up to `batch` tasks.
        let mut j = i;
        let mut jobs: Vec<(usize, u64)> = Vec::new();
        let mut prefix_seen = 0u64;
        while j < events.len() && jobs.len() < batch {
            match &events[j] {
                Event::Prefix => prefix_seen += 1,
                Event::Task(_) => {
                    let cap = node_budget.saturating_sub(cum + prefix_seen);
                    jobs.push((j, cap));
                }
            }
            j += 1;
        }
        let walks: Vec<Walk> = pool.install(|| {
            jobs.par_iter()
                .map(|&(idx, cap)| match &events[idx] {
                    Event::Task(st) => explore(engine, st.clone(), Mode::First, cap, deadline),
                    Event::Prefix => unreachable!(),
                })
                .collect()
        });
        let mut walks = walks.into_iter();
        for event in &events[i..j] {
            let remaining = node_budget - cum;
            match event {
                Event::Prefix => {
                    if remaining == 0 {
                        return LevelRun::Exhausted { nodes: cum };
                    }
                    cum += 1;
                }
                Event::Task(_) => {
                    let w = walks.next().expect("one walk per task");
                    if let Some((at, witness)) = w.hits.into_iter().next() {
                        if at <= remaining {
                            return LevelRun::Found {
                                nodes: cum + at,
                                witness,
                            };
                        }
                    }
                    if w.truncated || w.nodes > remaining {
                        let nodes = if w.timed_out { cum + w.nodes } else { node_budget };
                        return LevelRun::Exhausted { nodes: nodes.min(node_budget) };
                    }
                    cum += w.nodes;
                }
            }
        }
        i = j;
    }
    LevelRun::Infeasible { nodes: cum }
}

fn check_n(n: usize) -> Result<(), SearchError> {
    if n < 3 {
        return Err(SearchError::CycleTooShort(n));
    }
    Ok(())
}

/// Least vertex count of a `(1-ε)`-Lipschitz filling of `C_n`, searched
/// level by level from `max(n, ⌈vertex bound⌉)` upward.
pub fn compute_d(n: usize, epsilon: &Rational, opts: &SearchOptions) -> Result<SearchResult, SearchError> {
    check_n(n)?;
    let zero = Rational::from_integer(0);
    let one = Rational::from_integer(1);
    if *epsilon < zero || *epsilon >= one {
        return Err(SearchError::EpsilonOutOfRange(rational::Display(epsilon).to_string()));
    }
    let delta = one - epsilon;
    let floor = vertex_lower_bound(n as u64, &delta)
        .expect("n and delta already checked")
        .ceil_i64()
        .max(n as i64) as usize;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.max(1))
        .build()
        .map_err(|e| SearchError::ThreadPool(e.to_string()))?;
    let deadline = opts
        .budget
        .max_seconds
        .map(|s| Instant::now() + Duration::from_secs_f64(s.max(0.0)));
    let node_budget = opts.budget.max_nodes.unwrap_or(u64::MAX);

    let mut result = SearchResult {
        n,
        epsilon: *epsilon,
        d_value: None,
        witness: None,
        nodes_explored: 0,
        proof_of_minimality: false,
        budget_exhausted: false,
        levels: Vec::new(),
    };
    for level in floor..=MAX_VERTICES {
        let engine = Engine::new(n, level, Some(delta));
        let left = node_budget - result.nodes_explored;
        info!("n={n} level {level}: searching ({left} nodes left)");
        let run = run_level(&engine, left, deadline, &pool, opts.threads);
        match run {
            LevelRun::Found { nodes, witness } => {
                result.nodes_explored += nodes;
                result.levels.push(LevelReport {
                    vertices: level,
                    nodes,
                    outcome: LevelOutcome::Feasible,
                });
                verify_witness(&witness, n, &delta)?;
                result.d_value = Some(witness.num_vertices());
                result.witness = Some(witness);
                result.proof_of_minimality = true;
                return Ok(result);
            }
            LevelRun::Infeasible { nodes } => {
                debug!("level {level} infeasible after {nodes} nodes");
                result.nodes_explored += nodes;
                result.levels.push(LevelReport {
                    vertices: level,
                    nodes,
                    outcome: LevelOutcome::Infeasible,
                });
            }
            LevelRun::Exhausted { nodes } => {
                result.nodes_explored += nodes;
                result.levels.push(LevelReport {
                    vertices: level,
                    nodes,
                    outcome: LevelOutcome::Exhausted,
                });
                result.budget_exhausted = true;
                return Ok(result);
            }
        }
    }
    Err(SearchError::VertexLimit(MAX_VERTICES + 1))
}

fn verify_witness(k: &AbstractTriangulation, n: usize, delta: &Rational) -> Result<(), SearchError> {
    let report = k.validate();
    if !report.is_valid() {
        return Err(SearchError::BadWitness(format!("{:?}", report.violations)));
    }
    let cycle = k.boundary().map_err(|e| SearchError::BadWitness(e.to_string()))?;
    if cycle.len() != 1 || cycle[0] != (0..n as VertexId).collect::<Vec<_>>() {
        return Err(SearchError::BadWitness(format!("boundary {cycle:?}")));
    }
    match is_delta_filling(k, delta) {
        Ok(true) => Ok(()),
        Ok(false) => Err(SearchError::BadWitness(format!(
            "Lipschitz constant {}",
            lipschitz_constant(k).map(|r| rational::Display(&r.delta_achieved).to_string()).unwrap_or_default()
        ))),
        Err(e) => Err(SearchError::BadWitness(e.to_string())),
    }
}

/// Every valid filling of `C_n` with at most `max_vertices` vertices and
/// edge-connected triangles, one per isomorphism class.
pub fn enumerate_fillings(n: usize, max_vertices: usize, max_nodes: Option<u64>) -> Result<Enumeration, SearchError> {
    check_n(n)?;
    if max_vertices < n || max_vertices > MAX_VERTICES {
        return Err(SearchError::VertexLimit(max_vertices));
    }
    let engine = Engine::new(n, max_vertices, None);
    let walk = explore(&engine, engine.initial(), Mode::All, max_nodes.unwrap_or(u64::MAX), None);
    let mut seen = BTreeSet::new();
    let mut fillings = Vec::new();
    for (_, k) in walk.hits {
        let form = k.canonical_form().expect("grown complexes carry their boundary");
        if seen.insert(form) {
            fillings.push(k);
        }
    }
    Ok(Enumeration {
        fillings,
        nodes_explored: walk.nodes,
        complete: !walk.truncated,
    })
}

/// `C_n` coned off to a single apex `n`.
pub fn wheel(n: usize) -> AbstractTriangulation {
    let n32 = n as VertexId;
    let tris = (0..n32).map(|i| [i, (i + 1) % n32, n32]).collect();
    AbstractTriangulation::new(n + 1, tris, Some(n))
}
