//! Finer-grained views: per-bug metrics, grouped distributions, detector by
//! APR-tool matrices, exclusive-intersection tallies and runtimes.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Corpus, GroundTruth, PredictionRecord};
use crate::metrics::{metric_value, tool_confusion, ConfusionCounts, Metric, SmoothingConfig};
use crate::scalar::{mean, quantile_sorted, sort_reals, Real};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("no values to summarise")]
    EmptyGroup,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BugMetric<T> {
    pub pod_tool: String,
    pub project: String,
    pub bug_id: String,
    pub value: T,
}

/// Metric per (tool, bug), sorted by tool then bug.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BugMetricMap<T> {
    pub metric: Metric,
    pub epsilon: T,
    pub entries: Vec<BugMetric<T>>,
    /// (tool, bug) pairs where the metric was undefined.
    pub undefined: Vec<(String, String)>,
}

impl<T: Real> BugMetricMap<T> {
    pub fn get(&self, pod_tool: &str, bug_id: &str) -> Option<T> {
        self.entries.iter().find(|e| e.pod_tool == pod_tool && e.bug_id == bug_id).map(|e| e.value)
    }

    pub fn merge(mut self, other: BugMetricMap<T>) -> Self {
        self.entries.extend(other.entries);
        self.undefined.extend(other.undefined);
        self.entries.sort_by(|a, b| (&a.pod_tool, &a.bug_id).cmp(&(&b.pod_tool, &b.bug_id)));
        self.undefined.sort();
        self
    }
}

fn bug_counts(corpus: &Corpus, pod_tool: &str) -> BTreeMap<(String, String), ConfusionCounts> {
    let mut by_bug: BTreeMap<(String, String), ConfusionCounts> = BTreeMap::new();
    for (p, v) in corpus.labeled_verdicts(pod_tool) {
        by_bug.entry((p.bug_id.clone(), p.project.clone())).or_default().record(p.label, v);
    }
    by_bug
}

/// Metric of one tool restricted to each bug's classified patches.
pub fn per_bug_metric<T: Real>(
    corpus: &Corpus,
    pod_tool: &str,
    metric: Metric,
    smoothing: SmoothingConfig<T>,
) -> BugMetricMap<T> {
    let mut entries = Vec::new();
    let mut undefined = Vec::new();
    for ((bug_id, project), c) in bug_counts(corpus, pod_tool) {
        match metric_value(metric, &c, smoothing).ok().flatten() {
            Some(value) => entries.push(BugMetric { pod_tool: pod_tool.to_string(), project, bug_id, value }),
            None => undefined.push((pod_tool.to_string(), bug_id)),
        }
    }
    BugMetricMap { metric, epsilon: smoothing.epsilon, entries, undefined }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GroupBy {
    Project,
    PodTool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary<T> {
    pub group: String,
    pub min: T,
    pub q1: T,
    pub median: T,
    pub q3: T,
    pub max: T,
    /// Raw values in ascending order.
    pub points: Vec<T>,
}

/// Five-number summary per group (linear-interpolation quartiles).
pub fn group_quantiles<T: Real>(map: &BugMetricMap<T>, by: GroupBy) -> Result<Vec<GroupSummary<T>>, AnalysisError> {
    if map.entries.is_empty() {
        return Err(AnalysisError::EmptyGroup);
    }
    let mut groups: BTreeMap<&str, Vec<T>> = BTreeMap::new();
    for e in &map.entries {
        let key = match by {
            GroupBy::Project => e.project.as_str(),
            GroupBy::PodTool => e.pod_tool.as_str(),
        };
        groups.entry(key).or_default().push(e.value);
    }
    Ok(groups
        .into_iter()
        .map(|(g, mut points)| {
            sort_reals(&mut points);
            let q = |x: f64| quantile_sorted(&points, T::lit(x)).expect("non-empty group");
            GroupSummary {
                group: g.to_string(),
                min: points[0],
                q1: q(0.25),
                median: q(0.5),
                q3: q(0.75),
                max: points[points.len() - 1],
                points,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixCell<T> {
    pub pod_tool: String,
    pub apr_tool: String,
    /// Class balance of the APR tool's patches.
    pub k_correct: usize,
    pub k_overfit: usize,
    /// Mean of the bug-level metric; `None` when no bug had a defined value.
    pub value: Option<T>,
    pub n_bugs: usize,
}

/// Detector by APR-tool matrix of averaged bug-level metric values.
pub fn apr_matrix<T: Real>(
    corpus: &Corpus,
    tools: &[String],
    metric: Metric,
    smoothing: SmoothingConfig<T>,
) -> Vec<MatrixCell<T>> {
    let mut cells = Vec::new();
    for apr in corpus.apr_tools() {
        let slice = corpus.retain(|p| p.apr_tool == apr);
        let (k_correct, k_overfit) = slice.class_counts();
        for tool in tools {
            let values: Vec<T> =
                per_bug_metric(&slice, tool, metric, smoothing).entries.into_iter().map(|e| e.value).collect();
            cells.push(MatrixCell {
                pod_tool: tool.clone(),
                apr_tool: apr.to_string(),
                k_correct,
                k_overfit,
                value: mean(&values),
                n_bugs: values.len(),
            });
        }
    }
    cells.sort_by(|a, b| (&a.pod_tool, &a.apr_tool).cmp(&(&b.pod_tool, &b.apr_tool)));
    cells
}

/// Tallies of the exact tool subsets that classified each patch of one class correctly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntersectionReport {
    pub class: GroundTruth,
    pub total: usize,
    pub per_tool_recall: BTreeMap<String, Option<f64>>,
    /// Keyed by the sorted tool subset; the empty subset counts patches no tool got right.
    pub exclusive_sets: BTreeMap<Vec<String>, usize>,
}

pub fn upset(corpus: &Corpus, tools: &[String], class: GroundTruth) -> IntersectionReport {
    let mut exclusive_sets: BTreeMap<Vec<String>, usize> = BTreeMap::new();
    let mut total = 0;
    for p in corpus.patches().iter().filter(|p| p.label == class) {
        total += 1;
        let subset: BTreeSet<&String> =
            tools.iter().filter(|t| corpus.verdict(t, &p.patch_id).is_some_and(|v| v.matches(class))).collect();
        *exclusive_sets.entry(subset.into_iter().cloned().collect()).or_default() += 1;
    }
    let per_tool_recall = tools
        .iter()
        .map(|t| {
            let hits: usize = exclusive_sets.iter().filter(|(set, _)| set.contains(t)).map(|(_, &n)| n).sum();
            (t.clone(), (total > 0).then(|| hits as f64 / total as f64))
        })
        .collect();
    IntersectionReport { class, total, per_tool_recall, exclusive_sets }
}

/// Recall of one class straight from the confusion counts, for cross-checks.
pub fn class_recall(corpus: &Corpus, pod_tool: &str, class: GroundTruth) -> Option<f64> {
    let c = tool_confusion(corpus, pod_tool, |_| true);
    let (hit, total) = match class {
        GroundTruth::Correct => (c.tp, c.positives()),
        GroundTruth::Overfitting => (c.tn, c.negatives()),
    };
    (total > 0).then(|| hit as f64 / total as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuntimeRow {
    pub pod_tool: String,
    /// Includes time spent on patches the tool failed to classify.
    pub total_seconds: f64,
    pub n_classified: usize,
    pub seconds_per_classified: Option<f64>,
}

/// Per-tool runtime totals, sorted by tool name.
pub fn runtime_summary(predictions: &[PredictionRecord]) -> Vec<RuntimeRow> {
    let mut acc: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    for r in predictions {
        let e = acc.entry(r.pod_tool.as_str()).or_default();
        e.0 += r.runtime_s;
        e.1 += usize::from(r.verdict.is_classified());
    }
    acc.into_iter()
        .map(|(tool, (total_seconds, n_classified))| RuntimeRow {
            pod_tool: tool.to_string(),
            total_seconds,
            n_classified,
            seconds_per_classified: (n_classified > 0).then(|| total_seconds / n_classified as f64),
        })
        .collect()
}
