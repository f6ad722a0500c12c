//! Ranking AUC and data-complexity indicators.

use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{compute_stats, CategoricalDataset, FrequencyStats};
use crate::error::{Error, Result};

pub const DEFAULT_THETA: f64 = 0.05;
pub const DEFAULT_EPSILON: f64 = 0.001;

/// Mann-Whitney AUC; tied scores share their average rank.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if let Some(s) = scores.iter().find(|s| s.is_nan()) {
        return Err(Error::InvalidParameter(format!("score {s} is not comparable")));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClassLabels);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut pos_rank_sum = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // ranks start..end (0-based) become the average 1-based rank
        let avg = (start + end + 1) as f64 / 2.0;
        pos_rank_sum += avg * order[start..end].iter().filter(|&&i| labels[i]).count() as f64;
        start = end;
    }
    let (p, q) = (n_pos as f64, n_neg as f64);
    Ok((pos_rank_sum - p * (p + 1.0) / 2.0) / (p * q))
}

/// Mean pairwise ratio of mode frequencies sorted in descending order.
pub fn kappa_het(stats: &FrequencyStats) -> Result<f64> {
    let d = stats.n_features();
    if d < 2 {
        return Err(Error::InvalidParameter(format!("heterogeneity needs at least 2 features, got {d}")));
    }
    let mut modes: Vec<f64> = (0..d).map(|f| stats.mode_freq(f)).collect();
    modes.sort_by(|a, b| b.total_cmp(a));
    let mut total = 0.0;
    for i in 0..d {
        for j in i + 1..d {
            total += modes[i] / modes[j];
        }
    }
    Ok(2.0 * total / (d * (d - 1)) as f64)
}

fn require_labels(ds: &CategoricalDataset) -> Result<&[bool]> {
    let labels = ds.labels().ok_or(Error::MissingLabels)?;
    if !labels.iter().any(|&l| l) || labels.iter().all(|&l| l) {
        return Err(Error::SingleClassLabels);
    }
    Ok(labels)
}

/// `nvv / (pvv + nvv + epsilon)`, where `nvv` (`pvv`) is the fraction of
/// normal objects (outliers) holding at least two values of frequency at
/// most `theta`.
pub fn kappa_vcc(ds: &CategoricalDataset, stats: &FrequencyStats, theta: f64, epsilon: f64) -> Result<f64> {
    let labels = require_labels(ds)?;
    let rare: Vec<bool> = (0..stats.n_values()).map(|v| stats.freq(v) <= theta).collect();
    let (mut hits, mut counts) = ([0usize; 2], [0usize; 2]);
    for (i, &label) in labels.iter().enumerate() {
        let c = label as usize;
        counts[c] += 1;
        if ds.row(i).iter().filter(|&&v| rare[v as usize]).count() >= 2 {
            hits[c] += 1;
        }
    }
    let nvv = hits[0] as f64 / counts[0] as f64;
    let pvv = hits[1] as f64 / counts[1] as f64;
    Ok(nvv / (pvv + nvv + epsilon))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureEfficiency {
    /// AUC of ranking objects by `1 / freq` of their value in each feature.
    pub per_feature: Vec<f64>,
    pub kappa_sep: f64,
    pub kappa_ins: f64,
    pub kappa_fnl: f64,
}

pub fn feature_efficiency(ds: &CategoricalDataset, stats: &FrequencyStats) -> Result<FeatureEfficiency> {
    let labels = require_labels(ds)?;
    let per_feature = (0..ds.n_features())
        .into_par_iter()
        .map(|f| {
            let s: Vec<f64> = (0..ds.n_objects()).map(|i| 1.0 / stats.freq(ds.cell(i, f))).collect();
            auc(&s, labels)
        })
        .collect::<Result<Vec<f64>>>()?;
    let kappa_sep = per_feature.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let noisy = per_feature.iter().filter(|&&a| a < 0.5).count();
    Ok(FeatureEfficiency {
        kappa_fnl: noisy as f64 / per_feature.len() as f64,
        kappa_ins: 1.0 - kappa_sep,
        kappa_sep,
        per_feature,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndicatorParams {
    pub theta: f64,
    pub epsilon: f64,
}

impl Default for IndicatorParams {
    fn default() -> Self {
        Self {
            theta: DEFAULT_THETA,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityReport {
    pub kappa_vcc: f64,
    pub kappa_het: f64,
    pub kappa_ins: f64,
    pub kappa_fnl: f64,
    pub per_feature_efficiency: Vec<f64>,
    pub params: IndicatorParams,
}

pub fn complexity_report(ds: &CategoricalDataset, params: IndicatorParams) -> Result<ComplexityReport> {
    let stats = compute_stats(ds);
    let eff = feature_efficiency(ds, &stats)?;
    Ok(ComplexityReport {
        kappa_vcc: kappa_vcc(ds, &stats, params.theta, params.epsilon)?,
        kappa_het: kappa_het(&stats)?,
        kappa_ins: eff.kappa_ins,
        kappa_fnl: eff.kappa_fnl,
        per_feature_efficiency: eff.per_feature,
        params,
    })
}
