use serde::{Deserialize, Serialize};

use super::surface::{PLSurface, SurfaceTopology};
use super::PlMeshError;

/// Subdivision of one original edge into `count` intervals. All intervals
/// are `ε` except the first one from the edge's `from` end, which is `last`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgePlan {
    pub length: f64,
    pub count: usize,
    pub last: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubdivisionPlan {
    pub epsilon: f64,
    pub k: Option<u64>,
    pub q: Option<u64>,
    #[serde(rename = "L")]
    pub big_l: Option<u64>,
    /// Number of distinct original edge lengths.
    pub distinct_lengths: usize,
    pub per_edge: Vec<EdgePlan>,
    /// `max |ℓ(e) - s(e)·ε|`.
    pub deviation: f64,
    /// `1 / (q·k^{1/m})`, the a priori bound on `deviation`.
    pub dirichlet_bound: Option<f64>,
}

impl SubdivisionPlan {
    /// Interval lengths along the edge starting from its `from` end.
    pub fn intervals(&self, edge: usize) -> Vec<f64> {
        let p = &self.per_edge[edge];
        let mut v = vec![self.epsilon; p.count];
        v[0] = p.last;
        v
    }

    fn from_counts(topo: &SurfaceTopology, epsilon: f64, counts: &[usize]) -> (Vec<EdgePlan>, f64) {
        let mut deviation: f64 = 0.0;
        let per_edge = topo
            .edges
            .iter()
            .zip(counts)
            .map(|(e, &count)| {
                let last = e.length - (count - 1) as f64 * epsilon;
                deviation = deviation.max((e.length - count as f64 * epsilon).abs());
                EdgePlan {
                    length: e.length,
                    count,
                    last,
                }
            })
            .collect();
        (per_edge, deviation)
    }

    /// Every edge cut into `max(1, round(ℓ/ε))` intervals.
    pub fn uniform(m: &PLSurface, epsilon: f64) -> Result<Self, PlMeshError> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(PlMeshError::Plan(format!("epsilon {epsilon} is not positive")));
        }
        let topo = SurfaceTopology::build(m)?;
        let counts: Vec<usize> = topo
            .edges
            .iter()
            .map(|e| ((e.length / epsilon).round() as usize).max(1))
            .collect();
        let (per_edge, deviation) = Self::from_counts(&topo, epsilon, &counts);
        Ok(SubdivisionPlan {
            epsilon,
            k: None,
            q: None,
            big_l: None,
            distinct_lengths: distinct_lengths(&topo),
            per_edge,
            deviation,
            dirichlet_bound: None,
        })
    }
}

fn distinct_lengths(topo: &SurfaceTopology) -> usize {
    let mut lens: Vec<f64> = topo.edges.iter().map(|e| e.length).collect();
    lens.sort_by(f64::total_cmp);
    let mut m = 0;
    let mut prev: Option<f64> = None;
    for l in lens {
        if prev.is_none_or(|p| (l - p).abs() > 1e-9 * l) {
            m += 1;
            prev = Some(l);
        }
    }
    m
}

fn frac_dist(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Simultaneous rational approximation of all edge lengths with a common
/// denominator `q ≤ k`, then `ε = 1/(q·L)` with `L = ⌈k^{1/m} / ln k⌉` and
/// `s(e) = L·round(q·ℓ(e))`.
pub fn dirichlet_plan(m: &PLSurface, k: u64) -> Result<SubdivisionPlan, PlMeshError> {
    if k < 2 {
        return Err(PlMeshError::Plan(format!("k = {k} < 2")));
    }
    let topo = SurfaceTopology::build(m)?;
    let lengths: Vec<f64> = topo.edges.iter().map(|e| e.length).collect();
    let mdist = distinct_lengths(&topo);
    let mut best_q = 1u64;
    let mut best = f64::INFINITY;
    for q in 1..=k {
        let score = lengths.iter().map(|&l| frac_dist(q as f64 * l)).fold(0.0, f64::max);
        if score < best - 1e-12 {
            best = score;
            best_q = q;
        }
    }
    let root = (k as f64).powf(1.0 / mdist as f64);
    let big_l = ((root / (k as f64).ln()).ceil() as u64).max(1);
    let epsilon = 1.0 / (best_q * big_l) as f64;
    let mut counts = Vec::with_capacity(lengths.len());
    for (e, &l) in lengths.iter().enumerate() {
        let p = (best_q as f64 * l).round() as u64;
        if p == 0 {
            return Err(PlMeshError::Plan(format!(
                "k = {k} too small: edge {e} of length {l} rounds to zero intervals at q = {best_q}"
            )));
        }
        counts.push((big_l * p) as usize);
    }
    let (per_edge, deviation) = SubdivisionPlan::from_counts(&topo, epsilon, &counts);
    Ok(SubdivisionPlan {
        epsilon,
        k: Some(k),
        q: Some(best_q),
        big_l: Some(big_l),
        distinct_lengths: mdist,
        per_edge,
        deviation,
        dirichlet_bound: Some(1.0 / (best_q as f64 * root)),
    })
}
