//! Seeded generator of labeled categorical data with planted outliers.
//!
//! Relevant features: normal objects draw from a skewed set of frequent
//! values; each outlier takes the feature's outlying value with probability
//! `coupling_strength` (so outlying values co-occur across features) and a
//! normal draw otherwise. With two or more relevant features, every outlier
//! keeps a normal value in one relevant feature (assigned round-robin), so
//! outlying values never form a component cut off from the rest of the graph.
//!
//! Noisy features: the feature's rare noisy value goes to randomly chosen
//! normal objects, independently per feature, as often as an outlying value
//! is expected to occur; outliers hold the mode.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::CategoricalDataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n_objects: usize,
    pub n_relevant: usize,
    pub n_noisy: usize,
    pub n_outliers: usize,
    pub coupling_strength: f64,
    /// Frequent values per feature.
    pub n_normal_values: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            n_objects: 1000,
            n_relevant: 5,
            n_noisy: 5,
            n_outliers: 50,
            coupling_strength: 0.9,
            n_normal_values: 4,
            seed: 7,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_outliers == 0 || self.n_outliers >= self.n_objects {
            return Err(Error::InvalidParameter(format!(
                "n_outliers must lie in [1, n_objects), got {} of {}",
                self.n_outliers, self.n_objects
            )));
        }
        if self.n_relevant + self.n_noisy == 0 {
            return Err(Error::InvalidParameter("at least one feature is required".into()));
        }
        if !(0.0..=1.0).contains(&self.coupling_strength) {
            return Err(Error::InvalidParameter(format!(
                "coupling_strength must lie in [0, 1], got {}",
                self.coupling_strength
            )));
        }
        if self.n_normal_values < 2 {
            return Err(Error::InvalidParameter("n_normal_values must be at least 2".into()));
        }
        if self.n_outliers * 2 > self.n_objects {
            return Err(Error::InvalidParameter("outliers must be a minority".into()));
        }
        Ok(())
    }
}

/// Generates the dataset; feature names are `R{j}` (relevant) then `N{j}`
/// (noisy), so relevant features have the lower ids.
pub fn generate_synthetic(config: &SyntheticConfig) -> Result<CategoricalDataset> {
    config.validate()?;
    let n = config.n_objects;
    let d = config.n_relevant + config.n_noisy;
    let k = config.n_normal_values;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut labels = vec![false; n];
    for i in index::sample(&mut rng, n, config.n_outliers) {
        labels[i] = true;
    }
    let normal_ids: Vec<usize> = (0..n).filter(|&i| !labels[i]).collect();
    let mut anchor = vec![usize::MAX; n];
    if config.n_relevant >= 2 {
        for (r, i) in (0..n).filter(|&i| labels[i]).enumerate() {
            anchor[i] = r % config.n_relevant;
        }
    }
    let outlying_share = if config.n_relevant >= 2 {
        (config.n_relevant - 1) as f64 / config.n_relevant as f64
    } else {
        1.0
    };
    let n_noise = ((config.n_outliers as f64 * config.coupling_strength * outlying_share).round() as usize)
        .clamp(1, normal_ids.len());

    // value weights k, k-1, ..., 1: local code 0 is the mode
    let normal_draw = WeightedIndex::new((0..k).map(|c| (k - c) as f64)).expect("positive weights");
    let rare = k as u32;

    let mut codes = vec![0u32; n * d];
    let mut names = Vec::with_capacity(d);
    let mut domains = Vec::with_capacity(d);
    for f in 0..d {
        let relevant = f < config.n_relevant;
        let (prefix, j) = if relevant { ("R", f) } else { ("N", f - config.n_relevant) };
        names.push(format!("{prefix}{j}"));
        let mut domain: Vec<String> = (0..k).map(|c| format!("{prefix}{j}_v{c}")).collect();
        domain.push(format!("{prefix}{j}_{}", if relevant { "out" } else { "noise" }));
        domains.push(domain);

        for i in 0..n {
            codes[i * d + f] = normal_draw.sample(&mut rng) as u32;
        }
        if relevant {
            for i in (0..n).filter(|&i| labels[i]) {
                if rng.gen_bool(config.coupling_strength) && anchor[i] != f {
                    codes[i * d + f] = rare;
                }
            }
        } else {
            for i in (0..n).filter(|&i| labels[i]) {
                codes[i * d + f] = 0;
            }
            for pick in index::sample(&mut rng, normal_ids.len(), n_noise) {
                codes[normal_ids[pick] * d + f] = rare;
            }
        }
    }
    CategoricalDataset::from_local_codes(names, domains, n, codes, Some(labels))
}
