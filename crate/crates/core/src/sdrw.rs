//! Noise-tolerant value outlierness from dense subgraphs of the undirected
//! value graph.
//!
//! Greedy peeling repeatedly deletes the node of minimal weighted degree,
//! yielding one nested dense subgraph per size. The subgraph-density factor
//! of a value aggregates the densities of the peeled subgraphs that still
//! contain it, which rewards values embedded in dense clusters of mutually
//! coupled rare values over values that are merely infrequent.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use ordered_float::OrderedFloat;
use serde::{Deserialize, Serialize};

use crate::cbrw::OutliernessVector;
use crate::error::{Error, Result};
use crate::value_graph::{Directedness, ValueGraph};

/// Outcome of greedy minimum-weighted-degree peeling on `n` nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeelingResult {
    /// Removed nodes in removal order (`n - 1` entries; one node survives).
    pub removal_order: Vec<usize>,
    /// `subgraph_densities[t]` is the density of the subgraph left after
    /// removal step `t`, i.e. of size `n - 1 - t`; sizes `n - 1` down to 2.
    pub subgraph_densities: Vec<f64>,
    /// Density of the whole graph.
    pub full_density: f64,
    /// Removal step of each node; `None` for the survivor.
    pub removal_step: Vec<Option<usize>>,
}

impl PeelingResult {
    pub fn n_nodes(&self) -> usize {
        self.removal_step.len()
    }

    /// Number of retained subgraphs (sizes `2..n`) that contain `v`.
    fn retained_count(&self, v: usize) -> usize {
        let retained = self.subgraph_densities.len();
        match self.removal_step[v] {
            Some(step) => step.min(retained),
            None => retained,
        }
    }

    /// Sizes of the retained subgraphs containing `v`, largest first.
    pub fn membership(&self, v: usize) -> Vec<usize> {
        let n = self.n_nodes();
        (0..self.retained_count(v)).map(|t| n - 1 - t).collect()
    }

    /// Node set of the retained subgraph of the given size.
    pub fn subgraph(&self, size: usize) -> BTreeSet<usize> {
        let n = self.n_nodes();
        assert!((1..n).contains(&size), "no peeled subgraph of size {size}");
        let removed = n - size;
        let gone: BTreeSet<usize> = self.removal_order[..removed].iter().copied().collect();
        (0..n).filter(|v| !gone.contains(v)).collect()
    }
}

fn require_undirected(graph: &ValueGraph) -> Result<()> {
    if graph.directedness != Directedness::Undirected {
        return Err(Error::InvalidParameter("dense-subgraph peeling needs an undirected graph".into()));
    }
    Ok(())
}

/// Greedy peeling; ties on weighted degree go to the lowest node id. Degrees
/// are updated incrementally, so the whole pass is `O(|E| log |V|)`.
pub fn peel_subgraphs(graph: &ValueGraph) -> Result<PeelingResult> {
    require_undirected(graph)?;
    let n = graph.n_nodes();
    if n < 2 {
        return Err(Error::DegenerateGraph(format!("peeling needs at least 2 nodes, got {n}")));
    }
    let adj = &graph.adjacency;
    let mut degree: Vec<f64> = (0..n).map(|u| adj.row_sum(u)).collect();
    let mut edge_sum: f64 = degree.iter().sum::<f64>() / 2.0;
    let full_density = edge_sum / n as f64;

    let mut alive = vec![true; n];
    let mut heap: BinaryHeap<Reverse<(OrderedFloat<f64>, usize)>> =
        (0..n).map(|u| Reverse((OrderedFloat(degree[u]), u))).collect();
    let mut removal_order = Vec::with_capacity(n - 1);
    let mut removal_step = vec![None; n];
    let mut subgraph_densities = Vec::with_capacity(n.saturating_sub(2));

    while removal_order.len() < n - 1 {
        let Reverse((OrderedFloat(d), v)) = heap.pop().expect("heap holds every live node");
        if !alive[v] || d != degree[v] {
            continue;
        }
        alive[v] = false;
        removal_step[v] = Some(removal_order.len());
        removal_order.push(v);
        edge_sum -= degree[v];
        for (u, w) in adj.row(v) {
            if alive[u] {
                degree[u] -= w;
                heap.push(Reverse((OrderedFloat(degree[u]), u)));
            }
        }
        let size = n - removal_order.len();
        if size >= 2 {
            subgraph_densities.push(edge_sum.max(0.0) / size as f64);
        }
    }
    Ok(PeelingResult {
        removal_order,
        subgraph_densities,
        full_density,
        removal_step,
    })
}

/// `den(H) = sum_{u in H} sum_{v in H} C(u, v) / (2 |H|)`.
pub fn subgraph_density(graph: &ValueGraph, nodes: &BTreeSet<usize>) -> Result<f64> {
    if nodes.is_empty() {
        return Err(Error::InvalidParameter("subgraph must contain at least one node".into()));
    }
    let mut total = 0.0;
    for &u in nodes {
        if u >= graph.n_nodes() {
            return Err(Error::InvalidParameter(format!("node {u} out of range")));
        }
        total += graph.adjacency.row(u).filter(|(v, _)| nodes.contains(v)).map(|(_, w)| w).sum::<f64>();
    }
    Ok(total / (2.0 * nodes.len() as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaFactor {
    pub gamma: Vec<f64>,
}

/// Mean density of the retained peeled subgraphs (sizes `2..|V|`, i.e. the
/// whole graph and single nodes excluded) that contain each value; 0 for
/// values contained in none.
pub fn gamma_factor(peel: &PeelingResult) -> GammaFactor {
    let gamma = (0..peel.n_nodes())
        .map(|v| {
            let k = peel.retained_count(v);
            if k == 0 {
                0.0
            } else {
                peel.subgraph_densities[..k].iter().sum::<f64>() / k as f64
            }
        })
        .collect();
    GammaFactor { gamma }
}

/// Closed-form stationary distribution of the walk on
/// `B'(u, v) = gamma(u) A'(u, v) gamma(v)`: each value's weighted degree over
/// the graph volume.
pub fn sdrw_outlierness(lift_graph: &ValueGraph, gamma: &GammaFactor) -> Result<OutliernessVector> {
    require_undirected(lift_graph)?;
    let n = lift_graph.n_nodes();
    let g = &gamma.gamma;
    if g.len() != n {
        return Err(Error::DimensionMismatch(format!("{} gamma entries for {n} nodes", g.len())));
    }
    let degree: Vec<f64> = (0..n)
        .map(|v| g[v] * lift_graph.adjacency.row(v).map(|(u, a)| a * g[u]).sum::<f64>())
        .collect();
    let volume: f64 = degree.iter().sum();
    if !(volume > 0.0) {
        return Err(Error::DegenerateGraph("graph volume is zero".into()));
    }
    Ok(OutliernessVector::from_closed_form(degree.into_iter().map(|d| d / volume).collect()))
}

/// Normalized cumulative density profile: each value scores the summed
/// density of every peeled subgraph containing it, the whole graph included,
/// and scores are normalized to sum to 1.
pub fn density_profile_outlierness(peel: &PeelingResult) -> Result<OutliernessVector> {
    let mut prefix = Vec::with_capacity(peel.subgraph_densities.len() + 1);
    let mut acc = peel.full_density;
    prefix.push(acc);
    for d in &peel.subgraph_densities {
        acc += d;
        prefix.push(acc);
    }
    let raw: Vec<f64> = (0..peel.n_nodes()).map(|v| prefix[peel.retained_count(v)]).collect();
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateGraph("graph has no edge weight".into()));
    }
    Ok(OutliernessVector::from_closed_form(raw.into_iter().map(|r| r / total).collect()))
}

/// How peeled subgraphs turn into value outlierness.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdrwScoring {
    /// Normalized cumulative subgraph density ([`density_profile_outlierness`]).
    #[default]
    DensityProfile,
    /// Weighted degree over volume of the gamma-biased lift graph
    /// ([`gamma_factor`] + [`sdrw_outlierness`]).
    ClosedForm,
}
