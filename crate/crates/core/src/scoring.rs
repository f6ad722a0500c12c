//! Feature relevance, outlying-feature selection and object scoring, plus the
//! ablation variants and the marginal-probability baseline.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cbrw::{self, OutliernessVector, TransitionMatrix, WalkParams};
use crate::dataset::{compute_stats, CategoricalDataset, FrequencyStats};
use crate::error::{Error, Result};
use crate::factors::{self, IntraFactor, LiftScaling};
use crate::sdrw::{self, PeelingResult, SdrwScoring};
use crate::value_graph::{self, Directedness, ValueGraph};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureRelevance {
    pub rel: Vec<f64>,
    pub tau: Vec<f64>,
}

fn check_phi(phi: &[f64], ds: &CategoricalDataset) -> Result<()> {
    if phi.len() != ds.n_values() {
        return Err(Error::DimensionMismatch(format!(
            "{} outlierness entries for {} values",
            phi.len(),
            ds.n_values()
        )));
    }
    if let Some((v, p)) = phi.iter().enumerate().find(|(_, p)| !(**p >= 0.0 && **p < 1.0)) {
        return Err(Error::InvalidParameter(format!("outlierness of value {v} is {p}, outside [0, 1)")));
    }
    Ok(())
}

/// `rel(F) = 1 - prod_{v in dom(F)} (1 - phi(v))`, `tau = rel / sum rel`.
///
/// Zero outlierness is accepted: closed-form subgraph scoring assigns it to
/// values outside every retained subgraph.
pub fn feature_relevance(phi: &[f64], ds: &CategoricalDataset) -> Result<FeatureRelevance> {
    check_phi(phi, ds)?;
    let rel: Vec<f64> = (0..ds.n_features())
        .map(|f| -ds.feature_domain(f).map(|v| (-phi[v]).ln_1p()).sum::<f64>().exp_m1())
        .collect();
    let total: f64 = rel.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidParameter("every feature has zero relevance".into()));
    }
    let tau = rel.iter().map(|r| r / total).collect();
    Ok(FeatureRelevance { rel, tau })
}

/// Feature-selection threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    TopRatio(f64),
    MinRel(f64),
}

impl Default for Selection {
    fn default() -> Self {
        Selection::TopRatio(0.5)
    }
}

impl Selection {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Selection::TopRatio(r) if !(r > 0.0 && r <= 1.0) => {
                Err(Error::InvalidParameter(format!("top ratio must lie in (0, 1], got {r}")))
            }
            Selection::MinRel(m) if !m.is_finite() => {
                Err(Error::InvalidParameter(format!("min relevance must be finite, got {m}")))
            }
            _ => Ok(()),
        }
    }
}

/// Kept feature ids in ascending order.
pub fn select_features(rel: &FeatureRelevance, selection: Selection) -> Result<Vec<usize>> {
    selection.validate()?;
    let d = rel.rel.len();
    if d == 0 {
        return Err(Error::InvalidParameter("no features to select from".into()));
    }
    let mut kept: Vec<usize> = match selection {
        Selection::TopRatio(ratio) => {
            // the epsilon keeps 0.3 * 10 from rounding up to 4
            let k = ((ratio * d as f64 - 1e-9).ceil() as usize).clamp(1, d);
            let mut order: Vec<usize> = (0..d).collect();
            order.sort_by(|&a, &b| rel.rel[b].total_cmp(&rel.rel[a]).then(a.cmp(&b)));
            order.truncate(k);
            order
        }
        Selection::MinRel(min) => (0..d).filter(|&f| rel.rel[f] >= min).collect(),
    };
    if kept.is_empty() {
        return Err(Error::NoFeaturesSelected);
    }
    kept.sort_unstable();
    Ok(kept)
}

/// Exponent applied to `1 - phi` per feature when scoring objects.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExponentWeighting {
    /// Raw feature relevance `rel(F)`.
    #[default]
    Relevance,
    /// Normalized weight `tau(F) = rel(F) / sum rel`.
    Normalized,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectScores {
    pub score: Vec<f64>,
    /// Object indices by descending score; ties keep index order.
    pub ranking: Vec<usize>,
}

impl ObjectScores {
    pub fn from_scores(score: Vec<f64>) -> Self {
        let mut ranking: Vec<usize> = (0..score.len()).collect();
        ranking.sort_by(|&a, &b| score[b].total_cmp(&score[a]));
        Self { score, ranking }
    }

    /// 1-based rank of every object.
    pub fn ranks(&self) -> Vec<usize> {
        let mut r = vec![0; self.score.len()];
        for (pos, &i) in self.ranking.iter().enumerate() {
            r[i] = pos + 1;
        }
        r
    }
}

/// `score(x) = 1 - prod_j (1 - phi(x_j))^{w(F_j)}`.
pub fn object_scores(
    phi: &[f64],
    relevance: &FeatureRelevance,
    ds: &CategoricalDataset,
    weighting: ExponentWeighting,
) -> Result<ObjectScores> {
    check_phi(phi, ds)?;
    let weights = match weighting {
        ExponentWeighting::Relevance => &relevance.rel,
        ExponentWeighting::Normalized => &relevance.tau,
    };
    if weights.len() != ds.n_features() {
        return Err(Error::DimensionMismatch(format!(
            "{} feature weights for {} features",
            weights.len(),
            ds.n_features()
        )));
    }
    let log_keep: Vec<f64> = phi.iter().map(|p| (-p).ln_1p()).collect();
    let score = (0..ds.n_objects())
        .into_par_iter()
        .map(|i| {
            let s: f64 = ds.row(i).iter().enumerate().map(|(f, &v)| weights[f] * log_keep[v as usize]).sum();
            -s.exp_m1()
        })
        .collect();
    Ok(ObjectScores::from_scores(score))
}

/// `score(x) = sum_j -ln freq(x_j)`.
pub fn marp_scores(ds: &CategoricalDataset, stats: &FrequencyStats) -> ObjectScores {
    let neg_log: Vec<f64> = (0..stats.n_values()).map(|v| -stats.freq(v).ln()).collect();
    let score = (0..ds.n_objects())
        .into_par_iter()
        .map(|i| ds.row(i).iter().map(|&v| neg_log[v as usize]).sum())
        .collect();
    ObjectScores::from_scores(score)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Cbrw,
    Sdrw,
}

/// Ablation variants: `Base` uses the normalized intra-feature factor alone,
/// `Ia` binarizes the influence matrix, `Ie` sets the intra-feature factor to 1.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[default]
    Full,
    Base,
    Ia,
    Ie,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EngineParams {
    pub walk: WalkParams,
    pub lift_scaling: LiftScaling,
    pub sdrw_scoring: SdrwScoring,
    pub weighting: ExponentWeighting,
}

/// Value outlierness plus the intermediate artifacts that produced it.
#[derive(Debug, Clone)]
pub struct ValueOutlierness {
    pub phi: OutliernessVector,
    pub transition: Option<TransitionMatrix>,
    pub peeling: Option<PeelingResult>,
    pub graph: Option<ValueGraph>,
}

fn base_outlierness(delta: &IntraFactor) -> ValueOutlierness {
    let total: f64 = delta.delta_hat.iter().sum();
    ValueOutlierness {
        phi: OutliernessVector::from_closed_form(delta.delta_hat.iter().map(|d| d / total).collect()),
        transition: None,
        peeling: None,
        graph: None,
    }
}

fn neutral_delta(n: usize) -> IntraFactor {
    IntraFactor {
        delta_raw: vec![2.0; n],
        delta_hat: vec![1.0; n],
    }
}

/// Runs one engine variant on precomputed statistics.
pub fn value_outlierness_with_stats(
    stats: &FrequencyStats,
    engine: Engine,
    variant: Variant,
    params: &EngineParams,
) -> Result<ValueOutlierness> {
    let delta = factors::intra_outlierness(stats)?;
    if variant == Variant::Base {
        return Ok(base_outlierness(&delta));
    }
    let delta = if variant == Variant::Ie { neutral_delta(stats.n_values()) } else { delta };
    let node_feature = stats.value_features();
    match engine {
        Engine::Cbrw => {
            let mut infl = factors::conditional_influence(stats);
            if variant == Variant::Ia {
                infl = infl.binarized();
            }
            let graph = value_graph::build_cbrw_graph(&delta, &infl, node_feature)?;
            let w = cbrw::transition_matrix(&graph, &delta.delta_hat)?;
            let phi = cbrw::stationary_distribution(&w, &params.walk)?;
            Ok(ValueOutlierness {
                phi,
                transition: Some(w),
                peeling: None,
                graph: Some(graph),
            })
        }
        Engine::Sdrw => {
            let mut lift = factors::lift_influence(stats, params.lift_scaling);
            if variant == Variant::Ia {
                lift = lift.binarized();
            }
            let graph = value_graph::build_sdrw_graph(&delta, &lift, node_feature)?;
            let peel = sdrw::peel_subgraphs(&graph)?;
            let phi = match params.sdrw_scoring {
                SdrwScoring::DensityProfile => sdrw::density_profile_outlierness(&peel)?,
                SdrwScoring::ClosedForm => {
                    let gamma = sdrw::gamma_factor(&peel);
                    let lift_graph =
                        ValueGraph::new(lift.entries, Directedness::Undirected, node_feature.to_vec(), None)?;
                    sdrw::sdrw_outlierness(&lift_graph, &gamma)?
                }
            };
            Ok(ValueOutlierness {
                phi,
                transition: None,
                peeling: Some(peel),
                graph: Some(graph),
            })
        }
    }
}

pub fn value_outlierness(
    ds: &CategoricalDataset,
    engine: Engine,
    variant: Variant,
    params: &EngineParams,
) -> Result<ValueOutlierness> {
    value_outlierness_with_stats(&compute_stats(ds), engine, variant, params)
}

/// Object scores of one engine variant.
pub fn variant_scores(
    ds: &CategoricalDataset,
    engine: Engine,
    variant: Variant,
    params: &EngineParams,
) -> Result<ObjectScores> {
    let out = value_outlierness(ds, engine, variant, params)?;
    let rel = feature_relevance(&out.phi.phi, ds)?;
    object_scores(&out.phi.phi, &rel, ds, params.weighting)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toy;
    use proptest::prelude::*;

    fn two_feature_ds() -> CategoricalDataset {
        let rows = vec![vec!["a", "x"], vec!["b", "y"], vec!["a", "x"], vec!["a", "y"]];
        CategoricalDataset::from_rows(vec!["F".into(), "G".into()], &rows, None).unwrap()
    }

    #[test]
    fn relevance_product_formula() {
        let ds = two_feature_ds();
        let rel = feature_relevance(&[0.1, 0.2, 0.3, 0.4], &ds).unwrap();
        assert!((rel.rel[0] - 0.28).abs() < 1e-15);
        assert!((rel.rel[1] - (1.0 - 0.7 * 0.6)).abs() < 1e-15);
        assert!((rel.tau.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let tiny = feature_relevance(&[1e-12, 1e-12, 0.3, 0.4], &ds).unwrap();
        assert!(tiny.rel[0] < 1e-11);
    }

    #[test]
    fn relevance_rejects_bad_phi() {
        let ds = two_feature_ds();
        for bad in [[1.0, 0.1, 0.1, 0.1], [-0.1, 0.1, 0.1, 0.1], [f64::NAN, 0.1, 0.1, 0.1]] {
            assert!(matches!(feature_relevance(&bad, &ds), Err(Error::InvalidParameter(_))));
        }
        assert!(matches!(feature_relevance(&[0.1; 3], &ds), Err(Error::DimensionMismatch(_))));
    }

    fn rel_of(r: Vec<f64>) -> FeatureRelevance {
        let t: f64 = r.iter().sum();
        FeatureRelevance { tau: r.iter().map(|x| x / t).collect(), rel: r }
    }

    #[test]
    fn selection_rules() {
        let r = rel_of((0..10).map(|i| 0.01 * (i as f64 + 1.0)).collect());
        assert_eq!(select_features(&r, Selection::TopRatio(0.5)).unwrap(), vec![5, 6, 7, 8, 9]);
        assert_eq!(select_features(&r, Selection::TopRatio(1.0)).unwrap().len(), 10);
        assert_eq!(select_features(&r, Selection::TopRatio(0.3)).unwrap().len(), 3);
        let flat = rel_of(vec![0.2; 6]);
        assert_eq!(select_features(&flat, Selection::TopRatio(0.5)).unwrap(), vec![0, 1, 2]);
        assert_eq!(select_features(&r, Selection::MinRel(0.085)).unwrap(), vec![8, 9]);
        assert!(matches!(select_features(&r, Selection::MinRel(0.5)), Err(Error::NoFeaturesSelected)));
        for bad in [0.0, 1.5, -0.2] {
            assert!(matches!(select_features(&r, Selection::TopRatio(bad)), Err(Error::InvalidParameter(_))));
        }
    }

    #[test]
    fn equal_phi_uniform_tau_ties_everyone() {
        let ds = two_feature_ds();
        let phi = [0.25; 4];
        let rel = feature_relevance(&phi, &ds).unwrap();
        let s = object_scores(&phi, &rel, &ds, ExponentWeighting::Normalized).unwrap();
        assert!(s.score.iter().all(|&x| x == s.score[0]));
        assert_eq!(s.ranking, vec![0, 1, 2, 3]);
    }

    #[test]
    fn marp_orders_by_rarity() {
        let ds = two_feature_ds();
        let st = compute_stats(&ds);
        let s = marp_scores(&ds, &st);
        assert_eq!(s.ranking[0], 1);
        assert_eq!(s.score[0], s.score[2]);
        // objects 1 and 3 differ only in the first cell, b being rarer
        assert!(s.score[1] > s.score[3]);
        let uniform = CategoricalDataset::from_rows(
            vec!["F".into()],
            &[vec!["a"], vec!["b"], vec!["c"]],
            None,
        )
        .unwrap();
        let s = marp_scores(&uniform, &compute_stats(&uniform));
        assert!(s.score.iter().all(|&x| x == s.score[0]));
    }

    #[test]
    fn base_ranks_values_by_delta() {
        let ds = toy::dataset();
        let st = compute_stats(&ds);
        let delta = factors::intra_outlierness(&st).unwrap();
        for engine in [Engine::Cbrw, Engine::Sdrw] {
            let out = value_outlierness(&ds, engine, Variant::Base, &EngineParams::default()).unwrap();
            for u in 0..ds.n_values() {
                for v in 0..ds.n_values() {
                    if delta.delta_hat[u] > delta.delta_hat[v] {
                        assert!(out.phi.phi[u] >= out.phi.phi[v]);
                    }
                }
            }
        }
    }

    #[test]
    fn ia_cbrw_rows_follow_delta_on_cooccurrence() {
        let ds = toy::dataset();
        let st = compute_stats(&ds);
        let delta = factors::intra_outlierness(&st).unwrap();
        let out = value_outlierness(&ds, Engine::Cbrw, Variant::Ia, &EngineParams::default()).unwrap();
        let w = out.transition.unwrap();
        for u in 0..ds.n_values() {
            let neigh: Vec<usize> = st.cooccurrences(u).map(|(v, _)| v).collect();
            let total: f64 = neigh.iter().map(|&v| delta.delta_hat[v]).sum();
            for &v in &neigh {
                assert!((w.entry(u, v) - delta.delta_hat[v] / total).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn both_engines_rank_toy_outlier_first() {
        let ds = toy::dataset();
        for engine in [Engine::Cbrw, Engine::Sdrw] {
            let s = variant_scores(&ds, engine, Variant::Full, &EngineParams::default()).unwrap();
            assert_eq!(s.ranking[0], 0, "{engine:?}");
        }
    }

    proptest! {
        #[test]
        fn raising_a_cell_phi_never_lowers_score(
            phi in prop::collection::vec(0.01f64..0.6, 4),
            bump in 0.0f64..0.3,
            which in 0usize..4,
        ) {
            let ds = two_feature_ds();
            let rel = feature_relevance(&phi, &ds).unwrap();
            let base = object_scores(&phi, &rel, &ds, ExponentWeighting::Relevance).unwrap();
            let mut higher = phi.clone();
            higher[which] = (higher[which] + bump).min(0.99);
            // weights held fixed: the object score is monotone in each cell
            let s = object_scores(&higher, &rel, &ds, ExponentWeighting::Relevance).unwrap();
            for i in 0..ds.n_objects() {
                prop_assert!(s.score[i] >= base.score[i]);
                prop_assert!(s.score[i] > 0.0 && s.score[i] < 1.0);
            }
        }

        #[test]
        fn tau_scaling_leaves_ranking(phi in prop::collection::vec(0.01f64..0.6, 4), c in 0.1f64..10.0) {
            let ds = two_feature_ds();
            let rel = feature_relevance(&phi, &ds).unwrap();
            let scaled = rel_of(rel.rel.iter().map(|r| r * c).collect());
            let a = object_scores(&phi, &rel, &ds, ExponentWeighting::Normalized).unwrap();
            let b = object_scores(&phi, &scaled, &ds, ExponentWeighting::Normalized).unwrap();
            for i in 0..ds.n_objects() {
                prop_assert!((a.score[i] - b.score[i]).abs() < 1e-12);
            }
        }
    }
}
