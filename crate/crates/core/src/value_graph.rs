//! Attributed value-value graphs and their structural statistics.

use std::collections::VecDeque;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factors::{InfluenceKind, InfluenceMatrix, IntraFactor};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Directedness {
    Directed,
    Undirected,
}

/// Nodes are values; edges only join values of different features.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueGraph {
    pub directedness: Directedness,
    pub adjacency: SparseMatrix,
    pub node_delta: Option<Vec<f64>>,
    pub node_feature: Vec<usize>,
}

impl ValueGraph {
    /// Validates the graph invariants: nonnegative weights, no self loops, no
    /// same-feature edges, and exact symmetry when undirected.
    pub fn new(
        adjacency: SparseMatrix,
        directedness: Directedness,
        node_feature: Vec<usize>,
        node_delta: Option<Vec<f64>>,
    ) -> Result<Self> {
        let n = adjacency.dim();
        if node_feature.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} node features for {n} nodes",
                node_feature.len()
            )));
        }
        if let Some(d) = &node_delta {
            if d.len() != n {
                return Err(Error::DimensionMismatch(format!("{} node deltas for {n} nodes", d.len())));
            }
        }
        for (u, v, w) in adjacency.iter() {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidParameter(format!("edge ({u},{v}) has weight {w}")));
            }
            if node_feature[u] == node_feature[v] {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u},{v}) joins values of the same feature"
                )));
            }
            if directedness == Directedness::Undirected && adjacency.get(v, u) != w {
                return Err(Error::InvalidParameter(format!("undirected edge ({u},{v}) is not symmetric")));
            }
        }
        Ok(Self {
            directedness,
            adjacency,
            node_delta,
            node_feature,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.adjacency.dim()
    }

    pub fn n_edges(&self) -> usize {
        match self.directedness {
            Directedness::Directed => self.adjacency.nnz(),
            Directedness::Undirected => self.adjacency.nnz() / 2,
        }
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.adjacency.get(u, v)
    }

    /// Writes `u v weight` lines. Undirected edges are written once (`u < v`).
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (u, v, w) in self.adjacency.iter() {
            if self.directedness == Directedness::Undirected && u > v {
                continue;
            }
            writeln!(out, "{u}\t{v}\t{w}")?;
        }
        Ok(())
    }
}

fn check_universe(delta: &IntraFactor, infl: &InfluenceMatrix, node_feature: &[usize]) -> Result<()> {
    let n = infl.dim();
    if delta.delta_hat.len() != n || node_feature.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "influence matrix has {n} values, delta has {}, feature map has {}",
            delta.delta_hat.len(),
            node_feature.len()
        )));
    }
    Ok(())
}

/// Directed graph with `A(u, v) = eta(u, v)` and node attribute `delta_hat`.
pub fn build_cbrw_graph(delta: &IntraFactor, infl: &InfluenceMatrix, node_feature: &[usize]) -> Result<ValueGraph> {
    check_universe(delta, infl, node_feature)?;
    if infl.kind != InfluenceKind::Conditional {
        return Err(Error::InvalidParameter("CBRW graph needs conditional influence".into()));
    }
    ValueGraph::new(
        infl.entries.clone(),
        Directedness::Directed,
        node_feature.to_vec(),
        Some(delta.delta_hat.clone()),
    )
}

/// Plain undirected graph `C(u, v) = delta_hat(u) lift(u, v) delta_hat(v)`.
pub fn build_sdrw_graph(delta: &IntraFactor, infl: &InfluenceMatrix, node_feature: &[usize]) -> Result<ValueGraph> {
    check_universe(delta, infl, node_feature)?;
    if infl.kind != InfluenceKind::Lift {
        return Err(Error::InvalidParameter("SDRW graph needs lift influence".into()));
    }
    let d = &delta.delta_hat;
    // (d[u] * d[v]) is commutative bit-for-bit, keeping C exactly symmetric
    let c = infl.entries.map_entries(|u, v, w| w * (d[u] * d[v]));
    ValueGraph::new(c, Directedness::Undirected, node_feature.to_vec(), Some(d.clone()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Diameter {
    Finite(usize),
    #[serde(serialize_with = "ser_disconnected")]
    Disconnected,
}

fn ser_disconnected<S: serde::Serializer>(s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str("disconnected")
}

impl std::fmt::Display for Diameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Diameter::Finite(d) => write!(f, "{d}"),
            Diameter::Disconnected => f.write_str("disconnected"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphStats {
    pub diameter: Diameter,
    pub clustering_coefficient: f64,
}

pub const DEFAULT_STATS_NODE_CAP: usize = 20_000;

/// Undirected, unweighted skeleton: `u ~ v` iff either direction has an edge.
fn skeleton(graph: &ValueGraph) -> Vec<Vec<usize>> {
    let n = graph.n_nodes();
    let mut adj = vec![Vec::new(); n];
    for (u, v, _) in graph.adjacency.iter() {
        adj[u].push(v);
        adj[v].push(u);
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    adj
}

/// Diameter of the edge-existence skeleton (BFS from every node) and the mean
/// local clustering coefficient (nodes of degree < 2 contribute 0).
pub fn graph_stats(graph: &ValueGraph, node_cap: usize) -> Result<GraphStats> {
    let n = graph.n_nodes();
    if n == 0 {
        return Err(Error::DegenerateGraph("empty graph".into()));
    }
    if n > node_cap {
        return Err(Error::GraphTooLarge { nodes: n, cap: node_cap });
    }
    let adj = skeleton(graph);

    let eccentricities: Vec<Option<usize>> = (0..n)
        .into_par_iter()
        .map(|s| {
            let mut dist = vec![usize::MAX; n];
            dist[s] = 0;
            let mut q = VecDeque::from([s]);
            let mut far = 0;
            let mut reached = 1;
            while let Some(u) = q.pop_front() {
                for &v in &adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        far = far.max(dist[v]);
                        reached += 1;
                        q.push_back(v);
                    }
                }
            }
            (reached == n).then_some(far)
        })
        .collect();
    let diameter = if eccentricities.iter().any(Option::is_none) {
        Diameter::Disconnected
    } else {
        Diameter::Finite(eccentricities.into_iter().flatten().max().unwrap_or(0))
    };

    let local: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|u| {
            let k = adj[u].len();
            if k < 2 {
                return 0.0;
            }
            let mut links = 0usize;
            for (i, &a) in adj[u].iter().enumerate() {
                for &b in &adj[u][i + 1..] {
                    if adj[a].binary_search(&b).is_ok() {
                        links += 1;
                    }
                }
            }
            2.0 * links as f64 / (k * (k - 1)) as f64
        })
        .collect();
    let clustering_coefficient = local.iter().sum::<f64>() / n as f64;
    Ok(GraphStats {
        diameter,
        clustering_coefficient,
    })
}
