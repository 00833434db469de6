//! Benchmark harness for patch overfitting detectors.
//!
//! Given a labeled corpus of plausible patches and per-detector verdicts, the
//! crate computes classification metrics with cluster bootstrap intervals,
//! compares them against two naive baselines (random selection without
//! replacement and a prior-weighted coin), and models developer inspection
//! effort per bug.
//!
//! Numeric code is generic over [`scalar::Real`]; the aliases below fix the
//! scalar to `f64`, which is what the CLI uses.

pub mod analysis;
pub mod baselines;
pub mod cli;
pub mod corpus;
pub mod effort;
pub mod metrics;
pub mod report;
pub mod resampling;
pub mod scalar;

use thiserror::Error;

pub use corpus::{Corpus, GroundTruth, PatchRecord, PredictionRecord, Verdict};
pub use metrics::{ConfusionCounts, Metric};

pub type MetricVector = metrics::MetricVector<f64>;
pub type SmoothingConfig = metrics::SmoothingConfig<f64>;
pub type WpcParams = baselines::WpcParams<f64>;
pub type ExpectedRates = baselines::ExpectedRates<f64>;
pub type EnvelopeCurve = baselines::EnvelopeCurve<f64>;
pub type SuperiorityVerdict = baselines::SuperiorityVerdict<f64>;
pub type ConfidenceInterval = resampling::ConfidenceInterval<f64>;
pub type BugMetricMap = analysis::BugMetricMap<f64>;
pub type MatrixCell = analysis::MatrixCell<f64>;
pub type GroupSummary = analysis::GroupSummary<f64>;
/// Exact random-selection probabilities.
pub type ExactProbability = num_rational::BigRational;

/// Any error the harness can raise, with its process exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error(transparent)]
    Metrics(#[from] metrics::MetricsError),
    #[error(transparent)]
    Baseline(#[from] baselines::BaselineError),
    #[error(transparent)]
    Resample(#[from] resampling::ResampleError),
    #[error(transparent)]
    Effort(#[from] effort::EffortError),
    #[error(transparent)]
    Analysis(#[from] analysis::AnalysisError),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// 2 for input and schema problems, 1 for analysis failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Corpus(_) | Error::Usage(_) => 2,
            Error::Effort(effort::EffortError::Corpus(_)) => 2,
            _ => 1,
        }
    }
}
