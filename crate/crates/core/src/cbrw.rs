//! Biased random walks on the directed value graph.
//!
//! The walk moves from `u` to `v` with probability proportional to
//! `bias(v) * A(u, v)`. Rows without outgoing weight are treated as uniform
//! rows, and teleportation with probability `1 - alpha` is applied inside the
//! iteration rather than materialized, so memory stays `O(|E|)`.
//!
//! Probability mass flows along edges: `pi'(v) = (1 - alpha) / |V| +
//! alpha * sum_u pi(u) W(u, v)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use crate::value_graph::ValueGraph;

/// Row-stochastic biased transition matrix (dangling rows implicit-uniform).
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    rows: SparseMatrix,
    transpose: SparseMatrix,
    dangling: Vec<usize>,
}

impl TransitionMatrix {
    pub fn dim(&self) -> usize {
        self.rows.dim()
    }

    /// `W(u, v)` including the uniform repair of dangling rows.
    pub fn entry(&self, u: usize, v: usize) -> f64 {
        if self.rows.row_len(u) == 0 {
            1.0 / self.dim() as f64
        } else {
            self.rows.get(u, v)
        }
    }

    /// Rows with no outgoing weight.
    pub fn dangling(&self) -> &[usize] {
        &self.dangling
    }

    pub fn sparse(&self) -> &SparseMatrix {
        &self.rows
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|u| (0..self.dim()).map(|v| self.entry(u, v)).collect())
            .collect()
    }
}

/// `W(u, v) = bias(v) A(u, v) / sum_w bias(w) A(u, w)`.
pub fn transition_matrix(graph: &ValueGraph, bias: &[f64]) -> Result<TransitionMatrix> {
    let n = graph.n_nodes();
    if bias.len() != n {
        return Err(Error::DimensionMismatch(format!("{} bias entries for {n} nodes", bias.len())));
    }
    if bias.iter().any(|b| !(*b >= 0.0) || !b.is_finite()) {
        return Err(Error::InvalidParameter("bias must be finite and nonnegative".into()));
    }
    let mut dangling = Vec::new();
    let rows = (0..n)
        .map(|u| {
            let weighted: Vec<(u32, f64)> = graph
                .adjacency
                .row(u)
                .map(|(v, a)| (v as u32, bias[v] * a))
                .collect();
            let total: f64 = weighted.iter().map(|e| e.1).sum();
            if total > 0.0 {
                weighted.into_iter().map(|(v, w)| (v, w / total)).collect()
            } else {
                dangling.push(u);
                Vec::new()
            }
        })
        .collect();
    let rows = SparseMatrix::from_rows(n, rows);
    let transpose = rows.transpose();
    Ok(TransitionMatrix {
        rows,
        transpose,
        dangling,
    })
}

/// Transition matrix of the plain random walk (`bias = 1`).
pub fn unbiased_transition(graph: &ValueGraph) -> Result<TransitionMatrix> {
    transition_matrix(graph, &vec![1.0; graph.n_nodes()])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    pub alpha: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for WalkParams {
    fn default() -> Self {
        Self {
            alpha: 0.95,
            tol: 1e-3,
            max_iter: 100,
        }
    }
}

impl WalkParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!("alpha must lie in [0, 1), got {}", self.alpha)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// Value outlierness: a probability distribution over values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutliernessVector {
    pub phi: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
}

impl OutliernessVector {
    pub fn from_closed_form(phi: Vec<f64>) -> Self {
        Self {
            phi,
            iterations_used: 0,
            converged: true,
        }
    }
}

/// One damped step; returns the L1 change.
fn step(w: &TransitionMatrix, alpha: f64, cur: &[f64], next: &mut [f64]) -> f64 {
    let n = cur.len() as f64;
    SparseMatrix::left_multiply_with_transpose(&w.transpose, cur, next);
    let dangling_mass: f64 = w.dangling.iter().map(|&u| cur[u]).sum();
    let shift = (1.0 - alpha) / n + alpha * dangling_mass / n;
    let mut delta = 0.0;
    for (x, old) in next.iter_mut().zip(cur) {
        *x = shift + alpha * *x;
        delta += (*x - old).abs();
    }
    delta
}

fn iterate(
    w: &TransitionMatrix,
    alpha: f64,
    tol: f64,
    max_iter: usize,
    initial: &[f64],
    mut on_step: impl FnMut(f64),
) -> OutliernessVector {
    let mut cur = initial.to_vec();
    let mut next = vec![0.0; cur.len()];
    let mut iterations_used = 0;
    let mut converged = false;
    while iterations_used < max_iter {
        let delta = step(w, alpha, &cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
        iterations_used += 1;
        on_step(delta);
        if delta <= tol {
            converged = true;
            break;
        }
    }
    OutliernessVector {
        phi: cur,
        iterations_used,
        converged,
    }
}

fn check_initial(w: &TransitionMatrix, initial: &[f64]) -> Result<()> {
    if initial.len() != w.dim() {
        return Err(Error::DimensionMismatch(format!(
            "initial distribution has {} entries for {} nodes",
            initial.len(),
            w.dim()
        )));
    }
    let total: f64 = initial.iter().sum();
    if initial.iter().any(|p| !(*p >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter("initial distribution must be a probability vector".into()));
    }
    Ok(())
}

/// Damped power iteration from the uniform distribution.
pub fn stationary_distribution(w: &TransitionMatrix, params: &WalkParams) -> Result<OutliernessVector> {
    let n = w.dim();
    if n == 0 {
        return Err(Error::DegenerateGraph("no nodes".into()));
    }
    stationary_distribution_from(w, params, &vec![1.0 / n as f64; n])
}

/// Damped power iteration from a caller-supplied distribution.
pub fn stationary_distribution_from(
    w: &TransitionMatrix,
    params: &WalkParams,
    initial: &[f64],
) -> Result<OutliernessVector> {
    params.validate()?;
    check_initial(w, initial)?;
    Ok(iterate(w, params.alpha, params.tol, params.max_iter, initial, |_| {}))
}

/// Undamped iteration `pi <- pi W`. Converges to the unique stationary
/// distribution only when the chain is irreducible and aperiodic.
pub fn undamped_stationary(
    w: &TransitionMatrix,
    tol: f64,
    max_iter: usize,
    initial: &[f64],
) -> Result<OutliernessVector> {
    check_initial(w, initial)?;
    Ok(iterate(w, 1.0, tol, max_iter, initial, |_| {}))
}

/// L1 change per iteration of the damped walk, until the stop rule fires.
pub fn convergence_trace(w: &TransitionMatrix, params: &WalkParams) -> Result<Vec<f64>> {
    params.validate()?;
    let n = w.dim();
    if n == 0 {
        return Err(Error::DegenerateGraph("no nodes".into()));
    }
    let mut trace = Vec::new();
    iterate(w, params.alpha, params.tol, params.max_iter, &vec![1.0 / n as f64; n], |d| {
        trace.push(d)
    });
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value_graph::Directedness;

    fn cycle_graph(n: usize) -> ValueGraph {
        let mut d = vec![vec![0.0; n]; n];
        for u in 0..n {
            d[u][(u + 1) % n] = 1.0;
            d[(u + 1) % n][u] = 1.0;
        }
        ValueGraph::new(SparseMatrix::from_dense(&d), Directedness::Undirected, (0..n).collect(), None).unwrap()
    }

    #[test]
    fn uniform_bias_on_uniform_row_is_uniform() {
        let g = cycle_graph(5);
        let w = transition_matrix(&g, &[0.3; 5]).unwrap();
        assert_eq!(w.entry(0, 1), 0.5);
        assert_eq!(w.entry(0, 4), 0.5);
    }

    #[test]
    fn doubly_stochastic_gives_uniform() {
        let w = unbiased_transition(&cycle_graph(7)).unwrap();
        for alpha in [0.0, 0.5, 0.95] {
            let p = WalkParams { alpha, tol: 1e-12, max_iter: 100 };
            let phi = stationary_distribution(&w, &p).unwrap().phi;
            for x in phi {
                assert!((x - 1.0 / 7.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn alpha_zero_is_pure_teleport() {
        let d = vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]];
        let g = ValueGraph::new(SparseMatrix::from_dense(&d), Directedness::Directed, vec![0, 1, 2], None).unwrap();
        let w = transition_matrix(&g, &[0.9, 0.1, 0.5]).unwrap();
        let params = WalkParams { alpha: 0.0, ..WalkParams::default() };
        let out = stationary_distribution(&w, &params).unwrap();
        assert_eq!(out.iterations_used, 1);
        assert!(out.phi.iter().all(|&x| x == 1.0 / 3.0));
        let trace = convergence_trace(&w, &params).unwrap();
        assert!(trace.len() <= 2);
        assert_eq!(*trace.last().unwrap(), 0.0);
    }

    #[test]
    fn dangling_rows_are_uniform() {
        let d = vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 0.0]];
        let g = ValueGraph::new(SparseMatrix::from_dense(&d), Directedness::Directed, vec![0, 1, 2], None).unwrap();
        let w = transition_matrix(&g, &[1.0; 3]).unwrap();
        assert_eq!(w.dangling(), &[1]);
        assert_eq!(w.entry(1, 2), 1.0 / 3.0);
        let out = stationary_distribution(&w, &WalkParams { tol: 1e-14, max_iter: 1000, ..WalkParams::default() }).unwrap();
        assert!((out.phi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(out.phi.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn rejects_bad_alpha() {
        let w = unbiased_transition(&cycle_graph(3)).unwrap();
        for alpha in [1.0, -0.1, 1.5] {
            let p = WalkParams { alpha, ..WalkParams::default() };
            assert!(matches!(stationary_distribution(&w, &p), Err(Error::InvalidParameter(_))));
            assert!(convergence_trace(&w, &p).is_err());
        }
    }

    #[test]
    fn rejects_bias_mismatch() {
        assert!(matches!(
            transition_matrix(&cycle_graph(3), &[1.0, 1.0]),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
