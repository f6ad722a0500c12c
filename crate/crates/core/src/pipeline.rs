//! End-to-end flows: statistics, factors, graph, engine, scores and selection.

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cbrw::{self, OutliernessVector};
use crate::dataset::{compute_stats, CategoricalDataset, FrequencyStats};
use crate::error::{Error, Result};
use crate::scoring::{self, Engine, EngineParams, FeatureRelevance, ObjectScores, Selection, Variant};
use crate::sdrw::PeelingResult;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Cbrw,
    #[default]
    Sdrw,
    Marp,
    Base,
    CbrwIa,
    CbrwIe,
    SdrwIa,
    SdrwIe,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Cbrw,
        Method::Sdrw,
        Method::Marp,
        Method::Base,
        Method::CbrwIa,
        Method::CbrwIe,
        Method::SdrwIa,
        Method::SdrwIe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Cbrw => "cbrw",
            Method::Sdrw => "sdrw",
            Method::Marp => "marp",
            Method::Base => "base",
            Method::CbrwIa => "cbrw-ia",
            Method::CbrwIe => "cbrw-ie",
            Method::SdrwIa => "sdrw-ia",
            Method::SdrwIe => "sdrw-ie",
        }
    }

    /// Engine and variant, or `None` for the marginal-probability baseline.
    pub fn engine_variant(self) -> Option<(Engine, Variant)> {
        Some(match self {
            Method::Cbrw => (Engine::Cbrw, Variant::Full),
            Method::Sdrw => (Engine::Sdrw, Variant::Full),
            Method::Marp => return None,
            Method::Base => (Engine::Cbrw, Variant::Base),
            Method::CbrwIa => (Engine::Cbrw, Variant::Ia),
            Method::CbrwIe => (Engine::Cbrw, Variant::Ie),
            Method::SdrwIa => (Engine::Sdrw, Variant::Ia),
            Method::SdrwIe => (Engine::Sdrw, Variant::Ie),
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub method: Method,
    pub params: EngineParams,
    /// Restrict detection to the selected features first.
    pub selection: Option<Selection>,
    /// Record the per-iteration L1 change of the walk (walk methods only).
    pub trace: bool,
}

impl DetectorConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.walk.validate()?;
        if let Some(s) = self.selection {
            s.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Detection {
    pub scores: ObjectScores,
    /// Value outlierness, relevance and peeling on the scored dataset.
    pub phi: Option<OutliernessVector>,
    pub relevance: Option<FeatureRelevance>,
    pub peeling: Option<PeelingResult>,
    pub trace: Option<Vec<f64>>,
    /// Feature ids (into the input dataset) the scores were computed on.
    pub features: Vec<usize>,
}

/// Features that are not single-valued.
pub fn informative_features(ds: &CategoricalDataset) -> Result<Vec<usize>> {
    informative(&compute_stats(ds))
}

fn informative(stats: &FrequencyStats) -> Result<Vec<usize>> {
    let keep: Vec<usize> =
        (0..stats.n_features()).filter(|&f| stats.mode_supp(f) < stats.n_objects()).collect();
    if keep.is_empty() {
        return Err(Error::NoInformativeFeatures);
    }
    Ok(keep)
}

/// The dataset restricted to `features`, with its statistics; `stats` of the
/// full dataset are reused when nothing is dropped.
fn restrict<'a>(
    ds: &'a CategoricalDataset,
    stats: FrequencyStats,
    features: &[usize],
) -> Result<(Cow<'a, CategoricalDataset>, FrequencyStats)> {
    if features.len() == ds.n_features() {
        Ok((Cow::Borrowed(ds), stats))
    } else {
        let sub = ds.select_features(features)?;
        let sub_stats = compute_stats(&sub);
        Ok((Cow::Owned(sub), sub_stats))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionOutcome {
    /// Kept feature ids into the input dataset, ascending.
    pub kept: Vec<usize>,
    /// Relevance of the informative features.
    pub relevance: FeatureRelevance,
    /// Feature ids the relevance entries refer to.
    pub scored_features: Vec<usize>,
}

/// Ranks features by relevance under an engine method and applies `selection`.
pub fn select(ds: &CategoricalDataset, method: Method, params: &EngineParams, selection: Selection) -> Result<SelectionOutcome> {
    params.walk.validate()?;
    selection.validate()?;
    let (engine, variant) = method
        .engine_variant()
        .ok_or_else(|| Error::InvalidParameter(format!("method {method} does not score values")))?;
    let stats = compute_stats(ds);
    let features = informative(&stats)?;
    let (work, stats) = restrict(ds, stats, &features)?;
    let out = scoring::value_outlierness_with_stats(&stats, engine, variant, params)?;
    let relevance = scoring::feature_relevance(&out.phi.phi, &work)?;
    let kept = scoring::select_features(&relevance, selection)?
        .into_iter()
        .map(|f| features[f])
        .collect();
    Ok(SelectionOutcome {
        kept,
        relevance,
        scored_features: features,
    })
}

pub fn detect(ds: &CategoricalDataset, config: &DetectorConfig) -> Result<Detection> {
    config.validate()?;
    let stats = compute_stats(ds);
    let features = match config.selection {
        Some(sel) => select(ds, config.method, &config.params, sel)?.kept,
        None => informative(&stats)?,
    };
    let (work, stats) = restrict(ds, stats, &features)?;
    let Some((engine, variant)) = config.method.engine_variant() else {
        return Ok(Detection {
            scores: scoring::marp_scores(&work, &stats),
            phi: None,
            relevance: None,
            peeling: None,
            trace: None,
            features,
        });
    };
    let out = scoring::value_outlierness_with_stats(&stats, engine, variant, &config.params)?;
    let relevance = scoring::feature_relevance(&out.phi.phi, &work)?;
    let scores = scoring::object_scores(&out.phi.phi, &relevance, &work, config.params.weighting)?;
    let trace = match (&out.transition, config.trace) {
        (Some(w), true) => Some(cbrw::convergence_trace(w, &config.params.walk)?),
        _ => None,
    };
    Ok(Detection {
        scores,
        phi: Some(out.phi),
        relevance: Some(relevance),
        peeling: out.peeling,
        trace,
        features,
    })
}
