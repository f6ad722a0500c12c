//! Worked outputs for the 12-object toy table, rows and columns in value id
//! order (male, female, bachelor, master, PhD, married, single, divorced,
//! low, medium, high).

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use catout::{compute_stats, factors, sparse::SparseMatrix, toy, value_graph, CategoricalDataset, ValueGraph};

pub const TRANSITION: [[f64; 11]; 11] = [
    [0.0000, 0.0000, 0.2124, 0.0607, 0.0759, 0.0637, 0.0850, 0.1077, 0.1821, 0.0303, 0.1821],
    [0.0000, 0.0000, 0.0000, 0.0897, 0.2242, 0.1256, 0.0628, 0.3184, 0.0000, 0.1794, 0.0000],
    [0.1136, 0.0000, 0.0000, 0.0000, 0.0000, 0.1591, 0.1591, 0.0000, 0.4545, 0.1136, 0.0000],
    [0.0446, 0.1116, 0.0000, 0.0000, 0.0000, 0.0313, 0.0937, 0.3170, 0.1786, 0.0446, 0.1786],
    [0.0538, 0.2688, 0.0000, 0.0000, 0.0000, 0.2258, 0.0753, 0.0000, 0.0000, 0.1613, 0.2151],
    [0.0500, 0.1667, 0.2333, 0.0333, 0.2500, 0.0000, 0.0000, 0.0000, 0.0000, 0.1333, 0.1333],
    [0.0588, 0.0735, 0.2059, 0.0882, 0.0735, 0.0000, 0.0000, 0.0000, 0.2353, 0.0294, 0.2353],
    [0.0500, 0.2500, 0.0000, 0.2000, 0.0000, 0.0000, 0.0000, 0.0000, 0.4000, 0.1000, 0.0000],
    [0.0735, 0.0000, 0.3431, 0.0980, 0.0000, 0.0000, 0.1373, 0.3480, 0.0000, 0.0000, 0.0000],
    [0.0240, 0.2404, 0.1683, 0.0481, 0.1803, 0.1346, 0.0337, 0.1707, 0.0000, 0.0000, 0.0000],
    [0.1471, 0.0000, 0.0000, 0.1961, 0.2451, 0.1373, 0.2745, 0.0000, 0.0000, 0.0000, 0.0000],
];

pub const CBRW_VALUES: [f64; 11] =
    [0.0598, 0.0983, 0.1075, 0.0794, 0.0836, 0.0756, 0.0845, 0.1228, 0.1403, 0.0744, 0.0739];

pub const CBRW_OBJECTS: [f64; 12] =
    [0.0982, 0.0739, 0.0702, 0.0751, 0.0863, 0.0689, 0.0702, 0.0772, 0.0690, 0.0951, 0.0749, 0.0882];

pub const SDRW_ADJACENCY: [[f64; 11]; 11] = [
    [0.0000, 0.0000, 0.0122, 0.0035, 0.0043, 0.0036, 0.0049, 0.0062, 0.0104, 0.0017, 0.0104],
    [0.0000, 0.0000, 0.0000, 0.0087, 0.0217, 0.0122, 0.0061, 0.0308, 0.0000, 0.0174, 0.0000],
    [0.0122, 0.0000, 0.0000, 0.0000, 0.0000, 0.0170, 0.0170, 0.0000, 0.0486, 0.0122, 0.0000],
    [0.0035, 0.0087, 0.0000, 0.0000, 0.0000, 0.0024, 0.0073, 0.0247, 0.0139, 0.0035, 0.0139],
    [0.0043, 0.0217, 0.0000, 0.0000, 0.0000, 0.0182, 0.0061, 0.0000, 0.0000, 0.0130, 0.0174],
    [0.0036, 0.0122, 0.0170, 0.0024, 0.0182, 0.0000, 0.0000, 0.0000, 0.0000, 0.0097, 0.0097],
    [0.0049, 0.0061, 0.0170, 0.0073, 0.0061, 0.0000, 0.0000, 0.0000, 0.0194, 0.0024, 0.0194],
    [0.0062, 0.0308, 0.0000, 0.0247, 0.0000, 0.0000, 0.0000, 0.0000, 0.0493, 0.0123, 0.0000],
    [0.0104, 0.0000, 0.0486, 0.0139, 0.0000, 0.0000, 0.0194, 0.0493, 0.0000, 0.0000, 0.0000],
    [0.0017, 0.0174, 0.0122, 0.0035, 0.0130, 0.0097, 0.0024, 0.0123, 0.0000, 0.0000, 0.0000],
    [0.0104, 0.0000, 0.0000, 0.0139, 0.0174, 0.0097, 0.0194, 0.0000, 0.0000, 0.0000, 0.0000],
];

pub const SDRW_VALUES: [f64; 11] =
    [0.0175, 0.1089, 0.1350, 0.1222, 0.0661, 0.0807, 0.0507, 0.1446, 0.1446, 0.0952, 0.0344];

pub const SDRW_OBJECTS: [f64; 12] =
    [0.1124, 0.0942, 0.0603, 0.0870, 0.1106, 0.0509, 0.0603, 0.0701, 0.0664, 0.0925, 0.0777, 0.0886];

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_abs_diff_matrix<const N: usize>(a: &[Vec<f64>], b: &[[f64; N]; N]) -> f64 {
    a.iter().zip(b).map(|(r, s)| max_abs_diff(r, s)).fold(0.0, f64::max)
}

pub fn toy_cbrw_graph() -> (CategoricalDataset, ValueGraph, Vec<f64>) {
    let ds = toy::dataset();
    let st = compute_stats(&ds);
    let delta = factors::intra_outlierness(&st).unwrap();
    let eta = factors::conditional_influence(&st);
    let g = value_graph::build_cbrw_graph(&delta, &eta, st.value_features()).unwrap();
    (ds, g, delta.delta_hat)
}

pub fn toy_sdrw_graph() -> (CategoricalDataset, ValueGraph) {
    let ds = toy::dataset();
    let st = compute_stats(&ds);
    let delta = factors::intra_outlierness(&st).unwrap();
    let lift = factors::lift_influence(&st, catout::LiftScaling::Support);
    let g = value_graph::build_sdrw_graph(&delta, &lift, st.value_features()).unwrap();
    (ds, g)
}

/// Undirected graph from a dense symmetric matrix; every node gets its own
/// feature so any edge is allowed.
pub fn undirected(dense: &[Vec<f64>]) -> ValueGraph {
    let n = dense.len();
    ValueGraph::new(
        SparseMatrix::from_dense(dense),
        catout::Directedness::Undirected,
        (0..n).collect(),
        None,
    )
    .unwrap()
}

pub fn directed(dense: &[Vec<f64>]) -> ValueGraph {
    let n = dense.len();
    ValueGraph::new(SparseMatrix::from_dense(dense), catout::Directedness::Directed, (0..n).collect(), None).unwrap()
}

/// Random symmetric weights on a connected graph that contains the triangle
/// 0-1-2 (so the plain walk is aperiodic).
pub fn connected_weights(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = vec![vec![0.0; n]; n];
    let set = |d: &mut Vec<Vec<f64>>, u: usize, v: usize, w: f64| {
        d[u][v] = w;
        d[v][u] = w;
    };
    for v in 1..n {
        let u = rng.gen_range(0..v);
        set(&mut d, u, v, rng.gen_range(0.05..2.0));
    }
    for (u, v) in [(0, 1), (1, 2), (0, 2)] {
        set(&mut d, u, v, rng.gen_range(0.05..2.0));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(0.3) {
                set(&mut d, u, v, rng.gen_range(0.05..2.0));
            }
        }
    }
    d
}

pub fn random_directed(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|u| (0..n).map(|v| if u != v && rng.gen_bool(0.4) { rng.gen_range(0.0..1.0) } else { 0.0 }).collect())
        .collect()
}

pub fn positive_vec(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    (0..n).map(|_| rng.gen_range(0.01..1.0)).collect()
}
