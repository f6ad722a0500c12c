//! Intra-feature outlier factor and the inter-feature outlierness influence
//! matrices.

use serde::{Deserialize, Serialize};

use crate::dataset::FrequencyStats;
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Mode-anchored intra-feature outlierness of every value.
#[derive(Debug, Clone, PartialEq)]
pub struct IntraFactor {
    /// `base(m) + dev(v)`, in `(0, 2)`.
    pub delta_raw: Vec<f64>,
    /// `delta_raw / 2`, in `(0, 1)`; the form used by the graphs.
    pub delta_hat: Vec<f64>,
}

/// `delta(v) = (1 - freq(m)) + (freq(m) - freq(v)) / freq(m)` where `m` is the
/// mode of `v`'s feature.
pub fn intra_outlierness(stats: &FrequencyStats) -> Result<IntraFactor> {
    let n = stats.n_objects() as f64;
    let mut delta_raw = vec![0.0; stats.n_values()];
    for f in 0..stats.n_features() {
        let sm = stats.mode_supp(f);
        if sm == stats.n_objects() {
            return Err(Error::Internal(format!(
                "feature {f} is single-valued; preprocess must drop it"
            )));
        }
        let sm = sm as f64;
        for v in stats.feature_domain(f) {
            let sv = stats.supp(v) as f64;
            delta_raw[v] = (1.0 - sm / n) + (sm - sv) / sm;
        }
    }
    let delta_hat = delta_raw.iter().map(|d| d / 2.0).collect();
    Ok(IntraFactor { delta_raw, delta_hat })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfluenceKind {
    /// `eta(u, v) = freq(u, v) / freq(v)`.
    Conditional,
    /// `eta'(u, v) = freq(u, v) / (freq(u) freq(v))`, up to the lift scaling.
    Lift,
}

/// Global constant applied to lift entries. Support scaling equals frequency
/// lift divided by `N`; the constant cancels in every downstream ranking.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LiftScaling {
    #[default]
    Support,
    Frequency,
}

/// Sparse `|V| x |V|` influence matrix; only co-occurring cross-feature pairs
/// are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceMatrix {
    pub kind: InfluenceKind,
    pub entries: SparseMatrix,
}

impl InfluenceMatrix {
    pub fn entry(&self, u: usize, v: usize) -> f64 {
        self.entries.get(u, v)
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    /// Replaces every stored entry with 1 (co-occurrence indicator).
    pub fn binarized(&self) -> Self {
        Self {
            kind: self.kind,
            entries: self.entries.map_entries(|_, _, _| 1.0),
        }
    }
}

pub fn conditional_influence(stats: &FrequencyStats) -> InfluenceMatrix {
    let rows = (0..stats.n_values())
        .map(|u| {
            stats
                .cooccurrences(u)
                .map(|(v, c)| (v as u32, c as f64 / stats.supp(v) as f64))
                .collect()
        })
        .collect();
    InfluenceMatrix {
        kind: InfluenceKind::Conditional,
        entries: SparseMatrix::from_rows(stats.n_values(), rows),
    }
}

pub fn lift_influence(stats: &FrequencyStats, scaling: LiftScaling) -> InfluenceMatrix {
    let scale = match scaling {
        LiftScaling::Support => 1.0,
        LiftScaling::Frequency => stats.n_objects() as f64,
    };
    let rows = (0..stats.n_values())
        .map(|u| {
            let su = stats.supp(u) as f64;
            stats
                .cooccurrences(u)
                .map(|(v, c)| (v as u32, scale * c as f64 / (su * stats.supp(v) as f64)))
                .collect()
        })
        .collect();
    InfluenceMatrix {
        kind: InfluenceKind::Lift,
        entries: SparseMatrix::from_rows(stats.n_values(), rows),
    }
}
