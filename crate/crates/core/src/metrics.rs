//! Skeleton distances and the δ-Lipschitz filling decision.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{AbstractTriangulation, ComplexError, SkeletonGraph, VertexId};
use crate::rational::{self, Rational};

/// Sentinel distance for vertices not reachable from the source.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("vertex {vertex} outside cycle of length {n}")]
    OutOfRange { n: usize, vertex: VertexId },
    #[error("cycle length must be positive")]
    EmptyCycle,
    #[error("delta {0} outside (0, 1]")]
    DeltaOutOfRange(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// `min(|x - y|, n - |x - y|)`.
pub fn cycle_distance(n: usize, x: VertexId, y: VertexId) -> Result<u32, MetricsError> {
    if n == 0 {
        return Err(MetricsError::EmptyCycle);
    }
    for v in [x, y] {
        if v as usize >= n {
            return Err(MetricsError::OutOfRange { n, vertex: v });
        }
    }
    let d = x.abs_diff(y) as usize;
    Ok(d.min(n - d) as u32)
}

/// Breadth-first distances from each source to every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTable {
    sources: Vec<VertexId>,
    rows: Vec<Vec<u32>>,
}

impl DistanceTable {
    pub fn sources(&self) -> &[VertexId] {
        &self.sources
    }

    /// Row for the `i`-th source.
    pub fn row(&self, i: usize) -> &[u32] {
        &self.rows[i]
    }

    /// Distance from `source` to `v`, if `source` was one of the sources.
    pub fn get(&self, source: VertexId, v: VertexId) -> Option<u32> {
        let i = self.sources.iter().position(|&s| s == source)?;
        Some(self.rows[i][v as usize])
    }
}

pub fn bfs(graph: &SkeletonGraph, source: VertexId) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; graph.num_vertices()];
    dist[source as usize] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v as usize] + 1;
        for &w in graph.neighbors(v) {
            if dist[w as usize] == UNREACHABLE {
                dist[w as usize] = d;
                queue.push_back(w);
            }
        }
    }
    dist
}

pub fn skeleton_distances(k: &AbstractTriangulation, sources: &[VertexId]) -> DistanceTable {
    let graph = k.skeleton();
    DistanceTable {
        sources: sources.to_vec(),
        rows: sources.iter().map(|&s| bfs(&graph, s)).collect(),
    }
}

/// Worst boundary-pair stretch of a filling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LipschitzReport {
    /// Minimum of `d_K(x,y) / d_C(x,y)` over non-adjacent boundary pairs.
    #[serde(rename = "delta", with = "rational::pair")]
    pub delta_achieved: Rational,
    #[serde(rename = "witness")]
    pub witness_pair: (VertexId, VertexId),
    #[serde(rename = "isometric")]
    pub is_isometric: bool,
}

/// Exact Lipschitz constant of `k` as a filling of its boundary cycle.
///
/// Pairs adjacent on the cycle always have ratio 1 and are skipped; for
/// `n = 3` there are no other pairs and the constant is 1. Ties keep the
/// first pair in cycle-position order.
pub fn lipschitz_constant(k: &AbstractTriangulation) -> Result<LipschitzReport, MetricsError> {
    let cycle = k.boundary_cycle()?;
    if k.boundary_tag().is_some() {
        let found = k.boundary()?;
        if found.len() != 1 || found[0].len() != cycle.len() {
            return Err(ComplexError::NotSingleBoundaryCycle(found.len()).into());
        }
    }
    let n = cycle.len();
    let graph = k.skeleton();
    let mut best: Option<(u32, u32, VertexId, VertexId)> = None;
    for i in 0..n {
        let dist = bfs(&graph, cycle[i]);
        for j in (i + 2)..n {
            let dc = cycle_distance(n, i as VertexId, j as VertexId)?;
            if dc < 2 {
                continue;
            }
            let dk = dist[cycle[j] as usize];
            let better = match best {
                None => true,
                // dk / dc < bk / bc
                Some((bk, bc, _, _)) => (dk as u64) * (bc as u64) < (bk as u64) * (dc as u64),
            };
            if better {
                best = Some((dk, dc, cycle[i], cycle[j]));
            }
        }
    }
    let report = match best {
        None => LipschitzReport {
            delta_achieved: Rational::from_integer(1),
            witness_pair: (cycle[0], cycle[1 % n]),
            is_isometric: true,
        },
        Some((dk, dc, x, y)) => {
            let delta = Rational::new(dk as i64, dc as i64);
            LipschitzReport {
                is_isometric: delta >= Rational::from_integer(1),
                delta_achieved: delta,
                witness_pair: (x, y),
            }
        }
    };
    Ok(report)
}

pub fn check_delta(delta: &Rational) -> Result<(), MetricsError> {
    if *delta <= Rational::from_integer(0) || *delta > Rational::from_integer(1) {
        return Err(MetricsError::DeltaOutOfRange(rational::Display(delta).to_string()));
    }
    Ok(())
}

/// Whether `k` is a δ-Lipschitz filling of its boundary cycle.
pub fn is_delta_filling(k: &AbstractTriangulation, delta: &Rational) -> Result<bool, MetricsError> {
    check_delta(delta)?;
    Ok(lipschitz_constant(k)?.delta_achieved >= *delta)
}
