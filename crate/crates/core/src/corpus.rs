//! Labeled patch corpora and detector predictions.
//!
//! A [`Corpus`] is validated once on construction and never mutated; every
//! filter returns a new corpus.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{mean, median_sorted, sort_reals};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorpusError {
    #[error("{file}:{line}: malformed row: {reason}")]
    MalformedRow { file: String, line: u64, reason: String },
    #[error("duplicate patch id `{0}`")]
    DuplicatePatchId(String),
    #[error("line {line}: duplicate prediction for patch `{patch_id}` by tool `{pod_tool}`")]
    DuplicatePrediction { line: u64, patch_id: String, pod_tool: String },
    #[error("line {line}: unknown label `{value}`")]
    UnknownLabel { line: u64, value: String },
    #[error("line {line}: unknown verdict `{value}`")]
    UnknownVerdict { line: u64, value: String },
    #[error("prediction references unknown patch `{0}`")]
    DanglingPrediction(String),
    #[error("patch `{patch_id}`: bug id `{bug_id}` is not prefixed by project `{project}`")]
    BugProjectMismatch { patch_id: String, bug_id: String, project: String },
    #[error("patch `{0}`: invalid timestamp")]
    InvalidTimestamp(String),
    #[error("prediction for `{0}`: runtime must be finite and non-negative")]
    InvalidRuntime(String),
    #[error("no patch carries a timestamp")]
    NoTimestamps,
    #[error("time budget must be positive, got {0}")]
    InvalidBudget(f64),
    #[error("unknown POD tool `{0}`")]
    UnknownTool(String),
    #[error("i/o error on {path}: {reason}")]
    Io { path: String, reason: String },
}

/// Ground-truth label of a plausible patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroundTruth {
    Correct,
    Overfitting,
}

impl GroundTruth {
    pub fn as_str(self) -> &'static str {
        match self {
            GroundTruth::Correct => "correct",
            GroundTruth::Overfitting => "overfitting",
        }
    }
}

impl fmt::Display for GroundTruth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GroundTruth {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "correct" => Ok(GroundTruth::Correct),
            "overfitting" => Ok(GroundTruth::Overfitting),
            _ => Err(s.to_string()),
        }
    }
}

/// A detector's verdict on one patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Correct,
    Overfitting,
    /// The tool crashed or timed out on this patch.
    Unprocessed,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Correct => "correct",
            Verdict::Overfitting => "overfitting",
            Verdict::Unprocessed => "unprocessed",
        }
    }

    pub fn is_classified(self) -> bool {
        self != Verdict::Unprocessed
    }

    /// Whether the verdict agrees with the given ground truth.
    pub fn matches(self, truth: GroundTruth) -> bool {
        matches!(
            (self, truth),
            (Verdict::Correct, GroundTruth::Correct) | (Verdict::Overfitting, GroundTruth::Overfitting)
        )
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "correct" => Ok(Verdict::Correct),
            "overfitting" => Ok(Verdict::Overfitting),
            "unprocessed" => Ok(Verdict::Unprocessed),
            _ => Err(s.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchRecord {
    pub patch_id: String,
    pub project: String,
    pub bug_id: String,
    pub apr_tool: String,
    pub label: GroundTruth,
    /// Seconds since the start of the APR run that produced the patch.
    pub timestamp_s: Option<f64>,
    pub patch_text: Option<String>,
}

impl PatchRecord {
    pub fn new(
        patch_id: impl Into<String>,
        project: impl Into<String>,
        bug_id: impl Into<String>,
        apr_tool: impl Into<String>,
        label: GroundTruth,
    ) -> Self {
        PatchRecord {
            patch_id: patch_id.into(),
            project: project.into(),
            bug_id: bug_id.into(),
            apr_tool: apr_tool.into(),
            label,
            timestamp_s: None,
            patch_text: None,
        }
    }

    pub fn with_timestamp(mut self, t: f64) -> Self {
        self.timestamp_s = Some(t);
        self
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.patch_text = Some(text.into());
        self
    }

    fn validate(&self) -> Result<(), CorpusError> {
        if self.bug_id.is_empty() || !self.bug_id.starts_with(&self.project) {
            return Err(CorpusError::BugProjectMismatch {
                patch_id: self.patch_id.clone(),
                bug_id: self.bug_id.clone(),
                project: self.project.clone(),
            });
        }
        if let Some(t) = self.timestamp_s {
            if !t.is_finite() || t < 0.0 {
                return Err(CorpusError::InvalidTimestamp(self.patch_id.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub patch_id: String,
    pub pod_tool: String,
    pub verdict: Verdict,
    pub runtime_s: f64,
}

impl PredictionRecord {
    pub fn new(patch_id: impl Into<String>, pod_tool: impl Into<String>, verdict: Verdict, runtime_s: f64) -> Self {
        PredictionRecord { patch_id: patch_id.into(), pod_tool: pod_tool.into(), verdict, runtime_s }
    }
}

/// Immutable, validated set of patches and predictions.
#[derive(Debug, Clone)]
pub struct Corpus {
    patches: Vec<PatchRecord>,
    predictions: Vec<PredictionRecord>,
    pod_tools: Vec<String>,
    patch_index: HashMap<String, usize>,
    prediction_index: HashMap<(String, String), usize>,
}

impl Corpus {
    /// Validates and indexes. Tool order follows first appearance in `predictions`.
    pub fn new(patches: Vec<PatchRecord>, predictions: Vec<PredictionRecord>) -> Result<Self, CorpusError> {
        let mut patch_index = HashMap::with_capacity(patches.len());
        for (i, p) in patches.iter().enumerate() {
            p.validate()?;
            if patch_index.insert(p.patch_id.clone(), i).is_some() {
                return Err(CorpusError::DuplicatePatchId(p.patch_id.clone()));
            }
        }
        let mut pod_tools: Vec<String> = Vec::new();
        let mut prediction_index = HashMap::with_capacity(predictions.len());
        for (i, r) in predictions.iter().enumerate() {
            if !patch_index.contains_key(&r.patch_id) {
                return Err(CorpusError::DanglingPrediction(r.patch_id.clone()));
            }
            if !r.runtime_s.is_finite() || r.runtime_s < 0.0 {
                return Err(CorpusError::InvalidRuntime(r.patch_id.clone()));
            }
            let key = (r.pod_tool.clone(), r.patch_id.clone());
            if prediction_index.insert(key, i).is_some() {
                return Err(CorpusError::DuplicatePrediction {
                    line: i as u64 + 2,
                    patch_id: r.patch_id.clone(),
                    pod_tool: r.pod_tool.clone(),
                });
            }
            if !pod_tools.contains(&r.pod_tool) {
                pod_tools.push(r.pod_tool.clone());
            }
        }
        Ok(Corpus { patches, predictions, pod_tools, patch_index, prediction_index })
    }

    pub fn patches(&self) -> &[PatchRecord] {
        &self.patches
    }

    pub fn predictions(&self) -> &[PredictionRecord] {
        &self.predictions
    }

    pub fn pod_tools(&self) -> &[String] {
        &self.pod_tools
    }

    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    pub fn patch(&self, patch_id: &str) -> Option<&PatchRecord> {
        self.patch_index.get(patch_id).map(|&i| &self.patches[i])
    }

    pub fn prediction(&self, pod_tool: &str, patch_id: &str) -> Option<&PredictionRecord> {
        self.prediction_index.get(&(pod_tool.to_string(), patch_id.to_string())).map(|&i| &self.predictions[i])
    }

    pub fn verdict(&self, pod_tool: &str, patch_id: &str) -> Option<Verdict> {
        self.prediction(pod_tool, patch_id).map(|r| r.verdict)
    }

    pub fn has_tool(&self, pod_tool: &str) -> bool {
        self.pod_tools.iter().any(|t| t == pod_tool)
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let correct = self.patches.iter().filter(|p| p.label == GroundTruth::Correct).count();
        (correct, self.patches.len() - correct)
    }

    /// Fraction of correct patches, or `None` for an empty corpus.
    pub fn correct_fraction(&self) -> Option<f64> {
        let (c, _) = self.class_counts();
        (!self.is_empty()).then(|| c as f64 / self.len() as f64)
    }

    pub fn bug_ids(&self) -> BTreeSet<&str> {
        self.patches.iter().map(|p| p.bug_id.as_str()).collect()
    }

    pub fn apr_tools(&self) -> BTreeSet<&str> {
        self.patches.iter().map(|p| p.apr_tool.as_str()).collect()
    }

    /// Patches grouped by bug, keyed and ordered by bug id.
    pub fn by_bug(&self) -> BTreeMap<&str, Vec<&PatchRecord>> {
        let mut out: BTreeMap<&str, Vec<&PatchRecord>> = BTreeMap::new();
        for p in &self.patches {
            out.entry(p.bug_id.as_str()).or_default().push(p);
        }
        out
    }

    /// Keeps the patches selected by `keep` together with their predictions.
    pub fn retain(&self, mut keep: impl FnMut(&PatchRecord) -> bool) -> Corpus {
        let patches: Vec<PatchRecord> = self.patches.iter().filter(|p| keep(p)).cloned().collect();
        let ids: HashSet<&str> = patches.iter().map(|p| p.patch_id.as_str()).collect();
        let predictions = self.predictions.iter().filter(|r| ids.contains(r.patch_id.as_str())).cloned().collect();
        let mut out = Corpus::new(patches, predictions).expect("subset of a valid corpus is valid");
        // Keep the parent's tool order even when a tool lost all its rows.
        out.pod_tools = self.pod_tools.clone();
        out
    }

    /// Restricts predictions to the listed tools, in that order.
    pub fn with_tools(&self, tools: &[String]) -> Result<Corpus, CorpusError> {
        for t in tools {
            if !self.has_tool(t) {
                return Err(CorpusError::UnknownTool(t.clone()));
            }
        }
        let predictions = self.predictions.iter().filter(|r| tools.contains(&r.pod_tool)).cloned().collect();
        let mut out = Corpus::new(self.patches.clone(), predictions)?;
        out.pod_tools = tools.to_vec();
        Ok(out)
    }

    /// Labels paired with the tool's classified verdicts, in patch order.
    pub fn labeled_verdicts<'a>(&'a self, pod_tool: &'a str) -> impl Iterator<Item = (&'a PatchRecord, Verdict)> + 'a {
        self.patches
            .iter()
            .filter_map(move |p| self.verdict(pod_tool, &p.patch_id).filter(|v| v.is_classified()).map(|v| (p, v)))
    }
}

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

const PATCH_COLUMNS: [&str; 7] = ["patch_id", "project", "bug_id", "apr_tool", "label", "timestamp_s", "patch_path"];
const PREDICTION_COLUMNS: [&str; 4] = ["patch_id", "pod_tool", "verdict", "runtime_s"];

struct Columns {
    positions: HashMap<&'static str, usize>,
}

impl Columns {
    fn resolve(
        file: &str,
        headers: &csv::StringRecord,
        expected: &[&'static str],
        optional: &[&'static str],
    ) -> Result<Self, CorpusError> {
        let mut positions = HashMap::new();
        for (i, h) in headers.iter().enumerate() {
            let h = h.trim();
            match expected.iter().find(|&&e| e == h) {
                Some(&e) => {
                    positions.insert(e, i);
                }
                None => log::warn!("{file}: ignoring unknown column `{h}`"),
            }
        }
        for e in expected {
            if !positions.contains_key(e) && !optional.contains(e) {
                return Err(CorpusError::MalformedRow {
                    file: file.to_string(),
                    line: 1,
                    reason: format!("missing required column `{e}`"),
                });
            }
        }
        Ok(Columns { positions })
    }

    fn get<'r>(&self, rec: &'r csv::StringRecord, name: &str) -> &'r str {
        self.positions.get(name).and_then(|&i| rec.get(i)).map(str::trim).unwrap_or("")
    }
}

fn open_csv(path: &Path) -> Result<csv::Reader<fs::File>, CorpusError> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::None)
        .from_path(path)
        .map_err(|e| CorpusError::Io { path: path.display().to_string(), reason: e.to_string() })
}

fn row_error(file: &str, line: u64, reason: impl Into<String>) -> CorpusError {
    CorpusError::MalformedRow { file: file.to_string(), line, reason: reason.into() }
}

fn read_rows(
    path: &Path,
    expected: &[&'static str],
    optional: &[&'static str],
) -> Result<(Columns, Vec<(u64, csv::StringRecord)>), CorpusError> {
    let file = path.display().to_string();
    let mut rdr = open_csv(path)?;
    let headers = rdr.headers().map_err(|e| row_error(&file, 1, e.to_string()))?.clone();
    let columns = Columns::resolve(&file, &headers, expected, optional)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            row_error(&file, line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        rows.push((line, rec));
    }
    Ok((columns, rows))
}

/// Reads a patches CSV. `patch_path` entries resolve relative to the CSV's directory.
pub fn load_patches(path: impl AsRef<Path>) -> Result<Vec<PatchRecord>, CorpusError> {
    let path = path.as_ref();
    let file = path.display().to_string();
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let (cols, rows) = read_rows(path, &PATCH_COLUMNS, &["timestamp_s", "patch_path"])?;
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(rows.len());
    for (line, rec) in rows {
        let patch_id = cols.get(&rec, "patch_id");
        if patch_id.is_empty() {
            return Err(row_error(&file, line, "empty patch_id"));
        }
        if !seen.insert(patch_id.to_string()) {
            return Err(CorpusError::DuplicatePatchId(patch_id.to_string()));
        }
        let label_raw = cols.get(&rec, "label");
        let label = label_raw.parse::<GroundTruth>().map_err(|value| CorpusError::UnknownLabel { line, value })?;
        let timestamp_s = match cols.get(&rec, "timestamp_s") {
            "" => None,
            t => {
                let v: f64 = t.parse().map_err(|_| row_error(&file, line, format!("bad timestamp `{t}`")))?;
                if !v.is_finite() || v < 0.0 {
                    return Err(row_error(&file, line, format!("timestamp must be finite and >= 0, got `{t}`")));
                }
                Some(v)
            }
        };
        let patch_text = match cols.get(&rec, "patch_path") {
            "" => None,
            rel => {
                let p = base.join(rel);
                Some(
                    fs::read_to_string(&p)
                        .map_err(|e| CorpusError::Io { path: p.display().to_string(), reason: e.to_string() })?,
                )
            }
        };
        let record = PatchRecord {
            patch_id: patch_id.to_string(),
            project: cols.get(&rec, "project").to_string(),
            bug_id: cols.get(&rec, "bug_id").to_string(),
            apr_tool: cols.get(&rec, "apr_tool").to_string(),
            label,
            timestamp_s,
            patch_text,
        };
        record.validate().map_err(|e| row_error(&file, line, e.to_string()))?;
        out.push(record);
    }
    Ok(out)
}

/// Reads a predictions CSV.
pub fn load_predictions(path: impl AsRef<Path>) -> Result<Vec<PredictionRecord>, CorpusError> {
    let path = path.as_ref();
    let file = path.display().to_string();
    let (cols, rows) = read_rows(path, &PREDICTION_COLUMNS, &[])?;
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(rows.len());
    for (line, rec) in rows {
        let patch_id = cols.get(&rec, "patch_id").to_string();
        let pod_tool = cols.get(&rec, "pod_tool").to_string();
        if patch_id.is_empty() || pod_tool.is_empty() {
            return Err(row_error(&file, line, "empty patch_id or pod_tool"));
        }
        let verdict = cols
            .get(&rec, "verdict")
            .parse::<Verdict>()
            .map_err(|value| CorpusError::UnknownVerdict { line, value })?;
        let rt = cols.get(&rec, "runtime_s");
        let runtime_s: f64 = rt.parse().map_err(|_| row_error(&file, line, format!("bad runtime `{rt}`")))?;
        if !runtime_s.is_finite() || runtime_s < 0.0 {
            return Err(row_error(&file, line, format!("runtime must be finite and >= 0, got `{rt}`")));
        }
        if !seen.insert((patch_id.clone(), pod_tool.clone())) {
            return Err(CorpusError::DuplicatePrediction { line, patch_id, pod_tool });
        }
        out.push(PredictionRecord { patch_id, pod_tool, verdict, runtime_s });
    }
    Ok(out)
}

/// Loads and validates both files into a corpus.
pub fn load_corpus(patches: impl AsRef<Path>, predictions: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    Corpus::new(load_patches(patches)?, load_predictions(predictions)?)
}

// ---------------------------------------------------------------------------
// Deduplication
// ---------------------------------------------------------------------------

/// Canonical form used for syntactic duplicate detection: trailing whitespace
/// stripped per line, runs of spaces/tabs collapsed to one space, blank lines
/// dropped.
pub fn normalize_patch_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for line in text.lines() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let mut in_run = false;
        for ch in line.chars() {
            if ch == ' ' || ch == '\t' {
                if !in_run {
                    out.push(' ');
                }
                in_run = true;
            } else {
                out.push(ch);
                in_run = false;
            }
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Default)]
pub struct DedupOutcome {
    pub kept: Vec<PatchRecord>,
    /// `(removed, survivor)` patch id pairs.
    pub removed: Vec<(String, String)>,
    /// Records that had no text and passed through unchecked.
    pub without_text: Vec<String>,
}

/// Per-bug syntactic deduplication. Among duplicates the earliest timestamp
/// survives (missing timestamps sort last), ties broken by patch id.
pub fn deduplicate(patches: Vec<PatchRecord>) -> DedupOutcome {
    fn rank(p: &PatchRecord) -> (bool, f64, &str) {
        (p.timestamp_s.is_none(), p.timestamp_s.unwrap_or(0.0), p.patch_id.as_str())
    }

    let mut best: HashMap<(String, String), usize> = HashMap::new();
    for (i, p) in patches.iter().enumerate() {
        let Some(text) = &p.patch_text else { continue };
        let key = (p.bug_id.clone(), normalize_patch_text(text));
        match best.get(&key) {
            Some(&j) if rank(&patches[j]).partial_cmp(&rank(p)) != Some(std::cmp::Ordering::Greater) => {}
            _ => {
                best.insert(key, i);
            }
        }
    }

    let mut outcome = DedupOutcome::default();
    for p in &patches {
        match &p.patch_text {
            None => {
                outcome.without_text.push(p.patch_id.clone());
                outcome.kept.push(p.clone());
            }
            Some(text) => {
                let key = (p.bug_id.clone(), normalize_patch_text(text));
                let survivor = &patches[best[&key]];
                if survivor.patch_id == p.patch_id {
                    outcome.kept.push(p.clone());
                } else {
                    outcome.removed.push((p.patch_id.clone(), survivor.patch_id.clone()));
                }
            }
        }
    }
    outcome
}

// ---------------------------------------------------------------------------
// Filters
// ---------------------------------------------------------------------------

/// Keeps patches generated within `budget_s` seconds of the APR run start.
/// Patches without a timestamp are dropped.
pub fn filter_time_budget(corpus: &Corpus, budget_s: f64) -> Result<Corpus, CorpusError> {
    if budget_s.is_nan() || budget_s <= 0.0 {
        return Err(CorpusError::InvalidBudget(budget_s));
    }
    let untimed = corpus.patches().iter().filter(|p| p.timestamp_s.is_none()).count();
    if untimed == corpus.len() && !corpus.is_empty() {
        return Err(CorpusError::NoTimestamps);
    }
    if untimed > 0 {
        log::warn!("dropping {untimed} patches without timestamps under a time budget");
    }
    Ok(corpus.retain(|p| p.timestamp_s.is_some_and(|t| t <= budget_s)))
}

/// Per-tool reasons a patch fell out of the common set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Coverage {
    pub missing: BTreeMap<String, usize>,
    pub unprocessed: BTreeMap<String, usize>,
}

pub fn coverage(corpus: &Corpus, tools: &[String]) -> Result<Coverage, CorpusError> {
    let mut cov = Coverage::default();
    for t in tools {
        if !corpus.has_tool(t) {
            return Err(CorpusError::UnknownTool(t.clone()));
        }
        let mut missing = 0;
        let mut unprocessed = 0;
        for p in corpus.patches() {
            match corpus.verdict(t, &p.patch_id) {
                None => missing += 1,
                Some(Verdict::Unprocessed) => unprocessed += 1,
                Some(_) => {}
            }
        }
        cov.missing.insert(t.clone(), missing);
        cov.unprocessed.insert(t.clone(), unprocessed);
    }
    Ok(cov)
}

/// Patches every listed tool classified (neither missing nor unprocessed).
pub fn common_set(corpus: &Corpus, tools: &[String]) -> Result<Corpus, CorpusError> {
    if let Some(t) = tools.iter().find(|t| !corpus.has_tool(t)) {
        return Err(CorpusError::UnknownTool(t.clone()));
    }
    Ok(corpus.retain(|p| tools.iter().all(|t| corpus.verdict(t, &p.patch_id).is_some_and(Verdict::is_classified))))
}

// ---------------------------------------------------------------------------
// Clusters
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClusterStats {
    pub count: usize,
    pub size_min: usize,
    pub size_max: usize,
    pub size_median: f64,
    pub size_mean: f64,
}

/// Patches grouped by `(apr_tool, bug_id)`.
#[derive(Debug, Clone)]
pub struct ClusterIndex {
    pub clusters: BTreeMap<(String, String), Vec<String>>,
    pub stats: ClusterStats,
}

pub fn clusters(corpus: &Corpus) -> ClusterIndex {
    let mut map: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
    for p in corpus.patches() {
        map.entry((p.apr_tool.clone(), p.bug_id.clone())).or_default().push(p.patch_id.clone());
    }
    let mut sizes: Vec<f64> = map.values().map(|v| v.len() as f64).collect();
    sort_reals(&mut sizes);
    let stats = ClusterStats {
        count: map.len(),
        size_min: sizes.first().copied().unwrap_or(0.0) as usize,
        size_max: sizes.last().copied().unwrap_or(0.0) as usize,
        size_median: median_sorted(&sizes).unwrap_or(0.0),
        size_mean: mean(&sizes).unwrap_or(0.0),
    };
    ClusterIndex { clusters: map, stats }
}
