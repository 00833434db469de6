//! Developer inspection effort per bug.
//!
//! With a detector, a developer reviews the patches it kept until the first
//! correct one: all false positives plus one. Without it, random selection
//! needs `rs_min_draws` picks to reach a given confidence.

use serde::Serialize;
use thiserror::Error;

use crate::baselines::{rs_min_draws, BaselineError};
use crate::corpus::{Corpus, CorpusError, GroundTruth, PatchRecord, Verdict};
use crate::scalar::{mean, median_sorted, sort_reals};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EffortError {
    #[error("bug `{0}` has no correct patch")]
    NoCorrectPatchForBug(String),
    #[error("effort table has no rows")]
    EmptyTable,
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
}

/// Patches to inspect before meeting a correct one the tool kept (FP + 1),
/// or `None` (N/A) when the tool discarded every correct patch.
pub fn inspection_count(
    bug_patches: &[&PatchRecord],
    corpus: &Corpus,
    pod_tool: &str,
) -> Result<Option<u64>, EffortError> {
    let mut correct = 0;
    let mut tp = 0;
    let mut fp = 0;
    for p in bug_patches {
        let kept = corpus.verdict(pod_tool, &p.patch_id) == Some(Verdict::Correct);
        match p.label {
            GroundTruth::Correct => {
                correct += 1;
                tp += u64::from(kept);
            }
            GroundTruth::Overfitting => fp += u64::from(kept),
        }
    }
    if correct == 0 {
        let bug = bug_patches.first().map(|p| p.bug_id.clone()).unwrap_or_default();
        return Err(EffortError::NoCorrectPatchForBug(bug));
    }
    Ok((tp >= 1).then_some(fp + 1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffortRow {
    pub bug_id: String,
    pub k_correct: u64,
    pub k_overfit: u64,
    /// Inspection count per tool, in table tool order; `None` is N/A.
    pub per_tool: Vec<Option<u64>>,
    /// Random-selection draws per confidence, in table confidence order.
    pub rs: Vec<u64>,
}

impl EffortRow {
    pub fn total(&self) -> u64 {
        self.k_correct + self.k_overfit
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffortTable {
    pub tools: Vec<String>,
    pub confidences: Vec<f64>,
    /// Bugs with at least one correct and one overfitting patch.
    pub rows: Vec<EffortRow>,
    /// Bugs whose patches are all correct; left out of `rows` but part of
    /// summaries and dominance counts.
    pub all_correct: Vec<EffortRow>,
}

/// Column name for a random-selection confidence, e.g. `rs85`.
pub fn rs_column_name(confidence: f64) -> String {
    let pct = confidence * 100.0;
    if (pct - pct.round()).abs() < 1e-9 {
        format!("rs{}", pct.round() as u64)
    } else {
        format!("rs{pct}")
    }
}

impl EffortTable {
    /// Every bug with at least one correct patch.
    pub fn eligible(&self) -> impl Iterator<Item = &EffortRow> {
        self.rows.iter().chain(self.all_correct.iter())
    }

    pub fn column_names(&self) -> Vec<String> {
        self.tools.iter().cloned().chain(self.confidences.iter().map(|&c| rs_column_name(c))).collect()
    }
}

pub fn effort_table(corpus: &Corpus, tools: &[String], confidences: &[f64]) -> Result<EffortTable, EffortError> {
    if let Some(t) = tools.iter().find(|t| !corpus.has_tool(t)) {
        return Err(CorpusError::UnknownTool(t.to_string()).into());
    }
    let mut rows = Vec::new();
    let mut all_correct = Vec::new();
    for (bug, patches) in corpus.by_bug() {
        let k_correct = patches.iter().filter(|p| p.label == GroundTruth::Correct).count() as u64;
        if k_correct == 0 {
            continue;
        }
        let k_overfit = patches.len() as u64 - k_correct;
        let per_tool = tools.iter().map(|t| inspection_count(&patches, corpus, t)).collect::<Result<Vec<_>, _>>()?;
        let rs = confidences
            .iter()
            .map(|&c| rs_min_draws(k_correct + k_overfit, k_correct, c))
            .collect::<Result<Vec<_>, _>>()?;
        let row = EffortRow { bug_id: bug.to_string(), k_correct, k_overfit, per_tool, rs };
        if k_overfit == 0 {
            all_correct.push(row);
        } else {
            rows.push(row);
        }
    }
    Ok(EffortTable { tools: tools.to_vec(), confidences: confidences.to_vec(), rows, all_correct })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryColumn {
    pub name: String,
    pub median: f64,
    pub mean: f64,
    pub n_bugs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffortSummary {
    pub columns: Vec<SummaryColumn>,
}

impl EffortSummary {
    pub fn column(&self, name: &str) -> Option<&SummaryColumn> {
        self.columns.iter().find(|c| c.name == name)
    }
}

fn summarize(name: String, mut values: Vec<f64>) -> SummaryColumn {
    sort_reals(&mut values);
    SummaryColumn {
        name,
        median: median_sorted(&values).unwrap_or(f64::NAN),
        mean: mean(&values).unwrap_or(f64::NAN),
        n_bugs: values.len(),
    }
}

/// Median (even counts average the middle pair) and mean per column over all
/// eligible bugs; N/A counts are replaced by the bug's total patch count.
pub fn effort_summary(table: &EffortTable) -> Result<EffortSummary, EffortError> {
    if table.eligible().next().is_none() {
        return Err(EffortError::EmptyTable);
    }
    let mut columns = Vec::new();
    for (i, tool) in table.tools.iter().enumerate() {
        let values = table.eligible().map(|r| r.per_tool[i].unwrap_or(r.total()) as f64).collect();
        columns.push(summarize(tool.clone(), values));
    }
    for (i, &c) in table.confidences.iter().enumerate() {
        let values = table.eligible().map(|r| r.rs[i] as f64).collect();
        columns.push(summarize(rs_column_name(c), values));
    }
    Ok(EffortSummary { columns })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceRow {
    pub pod_tool: String,
    pub confidence: f64,
    /// Bugs where random selection needs no more inspections than the tool.
    pub rs_wins: usize,
    pub n_bugs: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dominance {
    pub rows: Vec<DominanceRow>,
    /// Per confidence: bugs where random selection matches or beats every tool.
    pub rs_beats_all: Vec<(f64, usize)>,
}

fn rs_at_least_as_good(rs: u64, tool: Option<u64>) -> bool {
    tool.is_none_or(|t| rs <= t)
}

/// Ties go to random selection; N/A always counts as a random-selection win.
pub fn dominance(table: &EffortTable) -> Dominance {
    let n_bugs = table.eligible().count();
    let pct = |k: usize| if n_bugs == 0 { 0.0 } else { 100.0 * k as f64 / n_bugs as f64 };
    let mut rows = Vec::new();
    for (ti, tool) in table.tools.iter().enumerate() {
        for (ci, &c) in table.confidences.iter().enumerate() {
            let rs_wins = table.eligible().filter(|r| rs_at_least_as_good(r.rs[ci], r.per_tool[ti])).count();
            rows.push(DominanceRow { pod_tool: tool.clone(), confidence: c, rs_wins, n_bugs, percent: pct(rs_wins) });
        }
    }
    let rs_beats_all = table
        .confidences
        .iter()
        .enumerate()
        .map(|(ci, &c)| {
            let k = table.eligible().filter(|r| r.per_tool.iter().all(|&t| rs_at_least_as_good(r.rs[ci], t))).count();
            (c, k)
        })
        .collect();
    Dominance { rows, rs_beats_all }
}
