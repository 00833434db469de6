//! Cluster bootstrap confidence intervals.
//!
//! A cluster is every patch one APR tool produced for one bug. Replicates
//! resample clusters with replacement and recompute the metric on the pooled
//! patches; bounds are linear-interpolation percentiles of the defined
//! replicate values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

use crate::corpus::Corpus;
use crate::metrics::{metric_value, ConfusionCounts, Metric, SmoothingConfig};
use crate::scalar::{quantile_sorted, sort_reals, Real};

/// Recorded in report headers so runs can be reproduced elsewhere.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.3): seed_from_u64(seed), set_stream(replicate index)";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResampleError {
    #[error("no classified patches to resample")]
    EmptyCorpus,
    #[error("`{0}` is undefined on every bootstrap replicate")]
    AllReplicatesUndefined(Metric),
    #[error("invalid bootstrap configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub lower_pct: f64,
    pub upper_pct: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig { replicates: 1000, lower_pct: 2.5, upper_pct: 97.5, seed: 0 }
    }
}

impl BootstrapConfig {
    pub fn with_seed(seed: u64) -> Self {
        BootstrapConfig { seed, ..Default::default() }
    }

    fn validate(&self) -> Result<(), ResampleError> {
        if self.replicates == 0 {
            return Err(ResampleError::InvalidConfig("replicates must be positive".into()));
        }
        if !(0.0 < self.lower_pct && self.lower_pct < self.upper_pct && self.upper_pct < 100.0) {
            return Err(ResampleError::InvalidConfig(format!(
                "need 0 < lower_pct < upper_pct < 100, got {} and {}",
                self.lower_pct, self.upper_pct
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfidenceInterval<T> {
    pub metric: Metric,
    /// Metric on the full, unresampled slice.
    pub point: T,
    pub lower: T,
    pub upper: T,
    pub n_defined_replicates: usize,
}

/// Per-cluster confusion counts of one tool, ordered by `(apr_tool, bug_id)`.
/// Patches the tool did not classify are left out; clusters left empty are dropped.
pub fn cluster_counts(corpus: &Corpus, pod_tool: &str) -> Vec<ConfusionCounts> {
    let mut map: BTreeMap<(&str, &str), ConfusionCounts> = BTreeMap::new();
    for (p, v) in corpus.labeled_verdicts(pod_tool) {
        map.entry((p.apr_tool.as_str(), p.bug_id.as_str())).or_default().record(p.label, v);
    }
    map.into_values().collect()
}

/// Metric values of every replicate, in replicate order; `None` where undefined.
pub fn bootstrap_replicates<T: Real>(
    clusters: &[ConfusionCounts],
    metric: Metric,
    cfg: &BootstrapConfig,
    smoothing: SmoothingConfig<T>,
) -> Result<Vec<Option<T>>, ResampleError> {
    cfg.validate()?;
    if clusters.is_empty() {
        return Err(ResampleError::EmptyCorpus);
    }
    let k = clusters.len();
    Ok((0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(r as u64);
            let pooled: ConfusionCounts = (0..k).map(|_| clusters[rng.gen_range(0..k)]).sum();
            metric_value(metric, &pooled, smoothing).ok().flatten()
        })
        .collect())
}

/// Percentile interval from precomputed cluster counts.
pub fn bootstrap_counts<T: Real>(
    clusters: &[ConfusionCounts],
    metric: Metric,
    cfg: &BootstrapConfig,
    smoothing: SmoothingConfig<T>,
) -> Result<ConfidenceInterval<T>, ResampleError> {
    let replicates = bootstrap_replicates(clusters, metric, cfg, smoothing)?;
    let mut defined: Vec<T> = replicates.into_iter().flatten().collect();
    if defined.is_empty() {
        return Err(ResampleError::AllReplicatesUndefined(metric));
    }
    sort_reals(&mut defined);
    let total: ConfusionCounts = clusters.iter().copied().sum();
    let point =
        metric_value(metric, &total, smoothing).ok().flatten().ok_or(ResampleError::AllReplicatesUndefined(metric))?;
    let pct = |x: f64| quantile_sorted(&defined, T::lit(x / 100.0)).expect("non-empty");
    Ok(ConfidenceInterval {
        metric,
        point,
        lower: pct(cfg.lower_pct),
        upper: pct(cfg.upper_pct),
        n_defined_replicates: defined.len(),
    })
}

/// Cluster bootstrap interval of `metric` for one tool over the patches it classified.
pub fn cluster_bootstrap<T: Real>(
    corpus: &Corpus,
    pod_tool: &str,
    metric: Metric,
    cfg: &BootstrapConfig,
    smoothing: SmoothingConfig<T>,
) -> Result<ConfidenceInterval<T>, ResampleError> {
    bootstrap_counts(&cluster_counts(corpus, pod_tool), metric, cfg, smoothing)
}
