//! Confusion counts and the seven classification metrics.
//!
//! "Correct" is the positive class throughout: a true positive is a correct
//! patch the detector kept.

use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::corpus::{Corpus, GroundTruth, Verdict};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("slice contains an unprocessed verdict ({0})")]
    UnprocessedInSlice(String),
    #[error("metric evaluated on an empty slice")]
    EmptySlice,
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Accuracy,
    BalancedAccuracy,
    Precision,
    PosRecall,
    NegRecall,
    F1,
    Mcc,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::Accuracy,
        Metric::BalancedAccuracy,
        Metric::Precision,
        Metric::PosRecall,
        Metric::NegRecall,
        Metric::F1,
        Metric::Mcc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::BalancedAccuracy => "balanced_accuracy",
            Metric::Precision => "precision",
            Metric::PosRecall => "pos_recall",
            Metric::NegRecall => "neg_recall",
            Metric::F1 => "f1",
            Metric::Mcc => "mcc",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL.into_iter().find(|m| m.name() == s.trim()).ok_or_else(|| MetricsError::UnknownMetric(s.to_string()))
    }
}

impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        ConfusionCounts { tp, fp, fn_, tn }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn positives(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> u64 {
        self.tn + self.fp
    }

    /// Records one (truth, verdict) outcome. Unprocessed verdicts are ignored.
    pub fn record(&mut self, truth: GroundTruth, verdict: Verdict) {
        match (truth, verdict) {
            (GroundTruth::Correct, Verdict::Correct) => self.tp += 1,
            (GroundTruth::Correct, Verdict::Overfitting) => self.fn_ += 1,
            (GroundTruth::Overfitting, Verdict::Correct) => self.fp += 1,
            (GroundTruth::Overfitting, Verdict::Overfitting) => self.tn += 1,
            (_, Verdict::Unprocessed) => {}
        }
    }

    pub fn scaled(&self, k: u64) -> Self {
        ConfusionCounts::new(self.tp * k, self.fp * k, self.fn_ * k, self.tn * k)
    }
}

impl Add for ConfusionCounts {
    type Output = ConfusionCounts;

    fn add(self, o: ConfusionCounts) -> ConfusionCounts {
        ConfusionCounts::new(self.tp + o.tp, self.fp + o.fp, self.fn_ + o.fn_, self.tn + o.tn)
    }
}

impl AddAssign for ConfusionCounts {
    fn add_assign(&mut self, o: ConfusionCounts) {
        *self = *self + o;
    }
}

impl std::iter::Sum for ConfusionCounts {
    fn sum<I: Iterator<Item = ConfusionCounts>>(iter: I) -> Self {
        iter.fold(ConfusionCounts::default(), Add::add)
    }
}

/// Tallies a slice of outcomes. Every verdict must be classified.
pub fn confusion<I>(slice: I) -> Result<ConfusionCounts, MetricsError>
where
    I: IntoIterator<Item = (GroundTruth, Verdict)>,
{
    let mut c = ConfusionCounts::default();
    for (i, (truth, verdict)) in slice.into_iter().enumerate() {
        if !verdict.is_classified() {
            return Err(MetricsError::UnprocessedInSlice(format!("position {i}")));
        }
        c.record(truth, verdict);
    }
    Ok(c)
}

/// Confusion counts of one tool over the patches of `corpus` accepted by
/// `keep`. Patches the tool did not classify are skipped.
pub fn tool_confusion(
    corpus: &Corpus,
    pod_tool: &str,
    mut keep: impl FnMut(&crate::corpus::PatchRecord) -> bool,
) -> ConfusionCounts {
    let mut c = ConfusionCounts::default();
    for (p, v) in corpus.labeled_verdicts(pod_tool) {
        if keep(p) {
            c.record(p.label, v);
        }
    }
    c
}

/// Replacement value for zero cells in the MCC denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingConfig<T> {
    pub epsilon: T,
}

impl<T: Real> Default for SmoothingConfig<T> {
    fn default() -> Self {
        SmoothingConfig { epsilon: T::lit(1e-12) }
    }
}

/// Metric values; `None` marks an undefined value (zero denominator).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricVector<T> {
    pub accuracy: T,
    pub balanced_accuracy: Option<T>,
    pub precision: Option<T>,
    pub pos_recall: Option<T>,
    pub neg_recall: Option<T>,
    pub f1: Option<T>,
    pub mcc: T,
}

impl<T: Real> MetricVector<T> {
    pub fn get(&self, m: Metric) -> Option<T> {
        match m {
            Metric::Accuracy => Some(self.accuracy),
            Metric::BalancedAccuracy => self.balanced_accuracy,
            Metric::Precision => self.precision,
            Metric::PosRecall => self.pos_recall,
            Metric::NegRecall => self.neg_recall,
            Metric::F1 => self.f1,
            Metric::Mcc => Some(self.mcc),
        }
    }
}

fn ratio<T: Real>(num: T, den: T) -> Option<T> {
    (den != T::zero()).then(|| num / den)
}

/// Smoothed Matthews correlation over real-valued cells.
///
/// Zero cells are replaced by `epsilon` when forming the four marginals of the
/// denominator; the numerator uses the observed cells. A degenerate slice
/// (a whole row or column empty) therefore scores 0, and any slice with all
/// four cells non-zero gets the unsmoothed value.
pub fn smoothed_mcc<T: Real>(tp: T, fp: T, fn_: T, tn: T, epsilon: T) -> T {
    let s = |x: T| if x == T::zero() { epsilon } else { x };
    let (stp, sfp, sfn, stn) = (s(tp), s(fp), s(fn_), s(tn));
    let num = tp * tn - fp * fn_;
    let den = ((stp + sfp) * (stp + sfn)).sqrt() * ((stn + sfp) * (stn + sfn)).sqrt();
    (num / den).max(-T::one()).min(T::one())
}

/// All seven metrics from real-valued cells (counts or expected rates).
pub fn metrics_from_cells<T: Real>(
    tp: T,
    fp: T,
    fn_: T,
    tn: T,
    s: SmoothingConfig<T>,
) -> Result<MetricVector<T>, MetricsError> {
    let total = tp + fp + fn_ + tn;
    if total <= T::zero() {
        return Err(MetricsError::EmptySlice);
    }
    let precision = ratio(tp, tp + fp);
    let pos_recall = ratio(tp, tp + fn_);
    let neg_recall = ratio(tn, tn + fp);
    let balanced_accuracy = match (pos_recall, neg_recall) {
        (Some(a), Some(b)) => Some((a + b) / T::lit(2.0)),
        _ => None,
    };
    let f1 = match (precision, pos_recall) {
        (Some(p), Some(r)) if p + r > T::zero() => Some(T::lit(2.0) * p * r / (p + r)),
        _ => None,
    };
    Ok(MetricVector {
        accuracy: (tp + tn) / total,
        balanced_accuracy,
        precision,
        pos_recall,
        neg_recall,
        f1,
        mcc: smoothed_mcc(tp, fp, fn_, tn, s.epsilon),
    })
}

pub fn metric_vector<T: Real>(c: &ConfusionCounts, s: SmoothingConfig<T>) -> Result<MetricVector<T>, MetricsError> {
    metrics_from_cells(T::count(c.tp), T::count(c.fp), T::count(c.fn_), T::count(c.tn), s)
}

/// Single metric on counts; `Ok(None)` when undefined.
pub fn metric_value<T: Real>(m: Metric, c: &ConfusionCounts, s: SmoothingConfig<T>) -> Result<Option<T>, MetricsError> {
    Ok(metric_vector(c, s)?.get(m))
}
