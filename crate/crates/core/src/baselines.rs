//! Naive baselines: random selection without replacement (RS) and the
//! weighted-probability classifier (WPC) swept over its prior.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::metrics::{metrics_from_cells, Metric, MetricVector, SmoothingConfig};
use crate::resampling::ConfidenceInterval;
use crate::scalar::{ProbScalar, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BaselineError {
    #[error("invalid random-selection query: {0}")]
    InvalidQuery(String),
    #[error("no correct patch to find (k_correct = 0)")]
    NoCorrectPatch,
    #[error("invalid WPC parameters: {0}")]
    InvalidParams(String),
    #[error("grid step must lie in (0, 0.1], got {0}")]
    InvalidGridStep(f64),
    #[error("value {0} is never attained by the baseline curve")]
    NoCrossing(f64),
    #[error("interval is for `{ci}` but the envelope is for `{curve}`")]
    MetricMismatch { ci: Metric, curve: Metric },
}

// ---------------------------------------------------------------------------
// Random selection
// ---------------------------------------------------------------------------

/// Draw `draws` of `n_total` patches without replacement; `k_correct` are correct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RsQuery {
    pub n_total: u64,
    pub k_correct: u64,
    pub draws: u64,
}

impl RsQuery {
    pub fn new(n_total: u64, k_correct: u64, draws: u64) -> Result<Self, BaselineError> {
        let q = RsQuery { n_total, k_correct, draws };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<(), BaselineError> {
        if self.n_total == 0 {
            return Err(BaselineError::InvalidQuery("N must be positive".into()));
        }
        if self.k_correct > self.n_total {
            return Err(BaselineError::InvalidQuery(format!("K = {} exceeds N = {}", self.k_correct, self.n_total)));
        }
        if self.draws == 0 || self.draws > self.n_total {
            return Err(BaselineError::InvalidQuery(format!("n = {} outside 1..={}", self.draws, self.n_total)));
        }
        Ok(())
    }
}

/// Probability that `draws` random picks contain at least one correct patch:
/// `1 - prod_{i<n} (N-K-i)/(N-i)`.
pub fn rs_probability<T: ProbScalar>(q: RsQuery) -> Result<T, BaselineError> {
    q.validate()?;
    let overfit = q.n_total - q.k_correct;
    if q.k_correct == 0 {
        return Ok(T::zero());
    }
    if q.draws > overfit {
        return Ok(T::one());
    }
    let mut miss = T::one();
    for i in 0..q.draws {
        miss = miss * T::ratio(overfit - i, q.n_total - i);
    }
    Ok(T::one() - miss)
}

fn exact_confidence(confidence: f64) -> BigRational {
    BigRational::from_float(confidence).expect("finite confidence")
}

/// Smallest number of random draws whose hit probability reaches `confidence`.
///
/// The comparison is made against the exact binary value of `confidence`;
/// values within 1e-9 of the threshold are re-checked in rational arithmetic.
pub fn rs_min_draws(n_total: u64, k_correct: u64, confidence: f64) -> Result<u64, BaselineError> {
    if k_correct == 0 {
        return Err(BaselineError::NoCorrectPatch);
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(BaselineError::InvalidQuery(format!("confidence {confidence} outside (0, 1)")));
    }
    RsQuery::new(n_total, k_correct, 1)?;
    let overfit = n_total - k_correct;
    let mut miss = 1.0_f64;
    for n in 1..=overfit {
        let i = n - 1;
        miss *= (overfit - i) as f64 / (n_total - i) as f64;
        let hit = 1.0 - miss;
        if (hit - confidence).abs() < 1e-9 {
            let exact: BigRational = rs_probability(RsQuery { n_total, k_correct, draws: n })?;
            if exact >= exact_confidence(confidence) {
                return Ok(n);
            }
        } else if hit > confidence {
            return Ok(n);
        }
    }
    Ok(overfit + 1)
}

// ---------------------------------------------------------------------------
// Weighted probability classifier
// ---------------------------------------------------------------------------

/// B(p): predicts "overfitting" with probability `prior_p`; `pi` is the
/// fraction of correct patches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WpcParams<T> {
    pub prior_p: T,
    pub pi: T,
}

impl<T: Real> WpcParams<T> {
    pub fn new(prior_p: T, pi: T) -> Result<Self, BaselineError> {
        let w = WpcParams { prior_p, pi };
        w.validate()?;
        Ok(w)
    }

    fn validate(&self) -> Result<(), BaselineError> {
        validate_pi(self.pi)?;
        if !(self.prior_p >= T::lit(0.5) && self.prior_p <= T::one()) {
            return Err(BaselineError::InvalidParams(format!("p = {} outside [0.5, 1]", self.prior_p)));
        }
        Ok(())
    }
}

fn validate_pi<T: Real>(pi: T) -> Result<(), BaselineError> {
    if pi > T::zero() && pi < T::one() {
        Ok(())
    } else {
        Err(BaselineError::InvalidParams(format!("pi = {pi} outside (0, 1)")))
    }
}

/// Expected confusion rates of B(p); they sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpectedRates<T> {
    pub tp: T,
    pub fp: T,
    pub fn_: T,
    pub tn: T,
}

pub fn wpc_rates<T: Real>(w: WpcParams<T>) -> ExpectedRates<T> {
    let (p, pi) = (w.prior_p, w.pi);
    let one = T::one();
    ExpectedRates { tp: (one - p) * pi, fp: (one - p) * (one - pi), fn_: p * pi, tn: p * (one - pi) }
}

/// Expected metric value of B(p), closed form. `Ok(None)` where undefined
/// (precision and F1 at p = 1).
pub fn wpc_metric<T: Real>(metric: Metric, w: WpcParams<T>) -> Result<Option<T>, BaselineError> {
    w.validate()?;
    let (p, pi) = (w.prior_p, w.pi);
    let one = T::one();
    let degenerate = p == one;
    Ok(match metric {
        Metric::Accuracy => Some((one - p) * pi + p * (one - pi)),
        Metric::BalancedAccuracy => Some(T::lit(0.5)),
        Metric::Precision => (!degenerate).then_some(pi),
        Metric::PosRecall => Some(one - p),
        Metric::NegRecall => Some(p),
        Metric::F1 => (!degenerate).then(|| T::lit(2.0) * pi * (one - p) / (pi + one - p)),
        Metric::Mcc => Some(T::zero()),
    })
}

/// Expected metric value obtained by substituting the expected rates into
/// the general metric formulas.
pub fn wpc_metric_by_substitution<T: Real>(metric: Metric, w: WpcParams<T>) -> Result<Option<T>, BaselineError> {
    w.validate()?;
    let r = wpc_rates(w);
    let v = metrics_from_cells(r.tp, r.fp, r.fn_, r.tn, SmoothingConfig::default()).expect("rates sum to one");
    Ok(v.get(metric))
}

/// Metrics of random selection used as a classifier: the coin flip B(0.5).
pub fn rs_classifier_metrics<T: Real>(pi: T) -> Result<MetricVector<T>, BaselineError> {
    let w = WpcParams::new(T::lit(0.5), pi)?;
    let get = |m| wpc_metric(m, w).map(|v| v.expect("defined at p = 0.5"));
    Ok(MetricVector {
        accuracy: get(Metric::Accuracy)?,
        balanced_accuracy: Some(get(Metric::BalancedAccuracy)?),
        precision: Some(get(Metric::Precision)?),
        pos_recall: Some(get(Metric::PosRecall)?),
        neg_recall: Some(get(Metric::NegRecall)?),
        f1: Some(get(Metric::F1)?),
        mcc: get(Metric::Mcc)?,
    })
}

/// Limit as p -> 1 of metrics that are undefined at p = 1.
fn limit_at_degenerate_prior<T: Real>(metric: Metric, pi: T) -> Option<T> {
    match metric {
        Metric::Precision => Some(pi),
        Metric::F1 => Some(T::zero()),
        _ => None,
    }
}

/// Expected metric of B(p) sampled on a uniform grid over `[0.5, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeCurve<T> {
    pub metric: Metric,
    pub pi: T,
    pub samples: Vec<(T, Option<T>)>,
    /// Supremum and infimum over the sweep. For metrics undefined at p = 1
    /// the limit p -> 1 is included, so the bounds do not depend on the grid.
    pub env_max: T,
    pub env_min: T,
}

impl<T: Real> EnvelopeCurve<T> {
    pub fn defined(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.samples.iter().filter_map(|&(p, v)| v.map(|v| (p, v)))
    }
}

/// Uniform grid on `[0.5, 1]` with spacing at most `step`, both ends included.
pub fn prior_grid<T: Real>(step: T) -> Result<Vec<T>, BaselineError> {
    if !(step > T::zero() && step <= T::lit(0.1 + 1e-12)) {
        return Err(BaselineError::InvalidGridStep(step.to_f64_lossy()));
    }
    let intervals = (T::lit(0.5) / step - T::lit(1e-9)).ceil().to_u64().unwrap_or(1).max(1);
    let width = T::lit(0.5);
    Ok((0..=intervals).map(|i| T::lit(0.5) + width * T::count(i) / T::count(intervals)).collect())
}

pub fn wpc_envelope<T: Real>(metric: Metric, pi: T, grid_step: T) -> Result<EnvelopeCurve<T>, BaselineError> {
    validate_pi(pi)?;
    let grid = prior_grid(grid_step)?;
    let samples: Vec<(T, Option<T>)> = grid
        .into_iter()
        .map(|p| wpc_metric(metric, WpcParams { prior_p: p, pi }).map(|v| (p, v)))
        .collect::<Result<_, _>>()?;
    let mut env_max = T::neg_infinity();
    let mut env_min = T::infinity();
    let limit = limit_at_degenerate_prior(metric, pi);
    for v in samples.iter().filter_map(|s| s.1).chain(limit) {
        env_max = env_max.max(v);
        env_min = env_min.min(v);
    }
    Ok(EnvelopeCurve { metric, pi, samples, env_max, env_min })
}

/// Priors at which the expected metric equals a target value.
#[derive(Debug, Clone, PartialEq)]
pub enum Crossing<T> {
    /// Isolated crossing points, ascending.
    Points(Vec<T>),
    /// The curve equals the target wherever it is defined.
    Everywhere,
}

fn in_prior_range<T: Real>(p: T) -> Option<T> {
    let tol = T::lit(1e-12);
    (p >= T::lit(0.5) - tol && p <= T::one() + tol).then(|| p.max(T::lit(0.5)).min(T::one()))
}

fn constant_crossing<T: Real>(level: T, v: T) -> Result<Crossing<T>, BaselineError> {
    if (level - v).abs() <= T::lit(1e-12) {
        Ok(Crossing::Everywhere)
    } else {
        Err(BaselineError::NoCrossing(v.to_f64_lossy()))
    }
}

fn single_crossing<T: Real>(p: T, v: T) -> Result<Crossing<T>, BaselineError> {
    in_prior_range(p).map(|p| Crossing::Points(vec![p])).ok_or_else(|| BaselineError::NoCrossing(v.to_f64_lossy()))
}

/// Inverts the expected-metric curve. Linear metrics use their closed-form
/// inverse; the rest use a grid scan refined by bisection.
pub fn crossing_prior<T: Real>(metric: Metric, pi: T, v: T) -> Result<Crossing<T>, BaselineError> {
    validate_pi(pi)?;
    let one = T::one();
    let half = T::lit(0.5);
    match metric {
        Metric::Accuracy => {
            let slope = one - T::lit(2.0) * pi;
            if slope.abs() <= T::lit(1e-12) {
                constant_crossing(half, v)
            } else {
                single_crossing((v - pi) / slope, v)
            }
        }
        Metric::PosRecall => single_crossing(one - v, v),
        Metric::NegRecall => single_crossing(v, v),
        Metric::BalancedAccuracy => constant_crossing(half, v),
        Metric::Mcc => constant_crossing(T::zero(), v),
        Metric::Precision => constant_crossing(pi, v),
        Metric::F1 => crossing_numeric(metric, pi, v, T::lit(1e-3)),
    }
}

/// Grid scan for sign changes of `curve(p) - v`, each bracket bisected to
/// `|dp| <= 1e-10`.
pub fn crossing_numeric<T: Real>(metric: Metric, pi: T, v: T, step: T) -> Result<Crossing<T>, BaselineError> {
    let curve = |p: T| wpc_metric(metric, WpcParams { prior_p: p, pi }).ok().flatten();
    let grid = prior_grid(step)?;
    let mut points: Vec<T> = Vec::new();
    let mut push = |p: T| {
        if points.last().is_none_or(|&q| (p - q).abs() > T::lit(1e-9)) {
            points.push(p);
        }
    };
    let mut prev: Option<(T, T)> = None;
    for p in grid {
        let Some(y) = curve(p) else {
            prev = None;
            continue;
        };
        let d = y - v;
        if d.abs() <= T::lit(1e-12) {
            push(p);
        } else if let Some((pp, pd)) = prev {
            if pd.abs() > T::lit(1e-12) && (pd < T::zero()) != (d < T::zero()) {
                push(bisect(|x| curve(x).map(|y| y - v), pp, p));
            }
        }
        prev = Some((p, d));
    }
    if points.is_empty() {
        Err(BaselineError::NoCrossing(v.to_f64_lossy()))
    } else {
        Ok(Crossing::Points(points))
    }
}

/// Root of `f` in `[a, b]`, assuming a sign change and definedness on the bracket.
fn bisect<T: Real>(f: impl Fn(T) -> Option<T>, mut a: T, mut b: T) -> T {
    let fa0 = f(a).unwrap_or(T::zero());
    let neg_at_a = fa0 < T::zero();
    for _ in 0..200 {
        if (b - a).abs() <= T::lit(1e-10) {
            break;
        }
        let m = (a + b) / T::lit(2.0);
        match f(m) {
            Some(fm) if fm == T::zero() => return m,
            Some(fm) if (fm < T::zero()) == neg_at_a => a = m,
            _ => b = m,
        }
    }
    (a + b) / T::lit(2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SuperiorityKind {
    Fully,
    Partially,
    Not,
}

impl SuperiorityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SuperiorityKind::Fully => "fully",
            SuperiorityKind::Partially => "partially",
            SuperiorityKind::Not => "not",
        }
    }
}

/// Verdict plus the set of priors (as half-open-ish intervals `[start, end]`)
/// where the lower confidence bound beats the expected baseline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperiorityVerdict<T> {
    pub kind: SuperiorityKind,
    pub exceed_set: Vec<(T, T)>,
}

/// Fully when the lower bound clears the envelope maximum, Not when the upper
/// bound is below the envelope minimum, Partially otherwise.
pub fn classify_superiority<T: Real>(
    ci: &ConfidenceInterval<T>,
    curve: &EnvelopeCurve<T>,
) -> Result<SuperiorityVerdict<T>, BaselineError> {
    if ci.metric != curve.metric {
        return Err(BaselineError::MetricMismatch { ci: ci.metric, curve: curve.metric });
    }
    let half = T::lit(0.5);
    if ci.lower > curve.env_max {
        return Ok(SuperiorityVerdict { kind: SuperiorityKind::Fully, exceed_set: vec![(half, T::one())] });
    }
    if ci.upper < curve.env_min {
        return Ok(SuperiorityVerdict { kind: SuperiorityKind::Not, exceed_set: Vec::new() });
    }
    let lower = ci.lower;
    let f = |p: T| wpc_metric(curve.metric, WpcParams { prior_p: p, pi: curve.pi }).ok().flatten().map(|y| lower - y);
    let flags: Vec<bool> = curve.samples.iter().map(|&(_, v)| v.is_some_and(|y| lower > y)).collect();
    let n = flags.len();
    let mut exceed_set = Vec::new();
    let mut i = 0;
    while i < n {
        if !flags[i] {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < n && flags[j + 1] {
            j += 1;
        }
        let start = if i == 0 {
            curve.samples[0].0
        } else if curve.samples[i - 1].1.is_some() {
            bisect(f, curve.samples[i - 1].0, curve.samples[i].0)
        } else {
            curve.samples[i].0
        };
        let end = if j + 1 == n {
            curve.samples[j].0
        } else if curve.samples[j + 1].1.is_some() {
            bisect(f, curve.samples[j].0, curve.samples[j + 1].0)
        } else {
            curve.samples[j].0
        };
        exceed_set.push((start, end));
        i = j + 1;
    }
    Ok(SuperiorityVerdict { kind: SuperiorityKind::Partially, exceed_set })
}

/// Exact hit probability via binomial coefficients, `1 - C(N-K, n) / C(N, n)`.
pub fn rs_probability_binomial(q: RsQuery) -> Result<BigRational, BaselineError> {
    q.validate()?;
    let choose = |n: u64, k: u64| -> BigInt {
        if k > n {
            return BigInt::zero();
        }
        let mut acc = BigInt::one();
        for i in 0..k {
            acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
        }
        acc
    };
    let miss = BigRational::new(choose(q.n_total - q.k_correct, q.draws), choose(q.n_total, q.draws));
    Ok(BigRational::one() - miss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resampling::ConfidenceInterval;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn ci(metric: Metric, lower: f64, upper: f64) -> ConfidenceInterval<f64> {
        ConfidenceInterval { metric, point: (lower + upper) / 2.0, lower, upper, n_defined_replicates: 1000 }
    }

    #[test]
    fn rs_probability_examples() {
        let p: f64 = rs_probability(RsQuery::new(3, 1, 1).unwrap()).unwrap();
        assert_abs_diff_eq!(p, 1.0 / 3.0, epsilon = 1e-15);
        let p: f64 = rs_probability(RsQuery::new(54, 1, 46).unwrap()).unwrap();
        assert_abs_diff_eq!(p, 46.0 / 54.0, epsilon = 1e-12);
        let p: f64 = rs_probability(RsQuery::new(29, 8, 6).unwrap()).unwrap();
        assert_abs_diff_eq!(p, 0.8858, epsilon = 5e-5);
        assert_eq!(rs_probability::<f64>(RsQuery::new(10, 0, 4).unwrap()).unwrap(), 0.0);
        assert_eq!(rs_probability::<f64>(RsQuery::new(10, 3, 8).unwrap()).unwrap(), 1.0);
        assert!(RsQuery::new(5, 6, 1).is_err());
        assert!(RsQuery::new(5, 2, 0).is_err());
        assert!(RsQuery::new(5, 2, 6).is_err());
    }

    #[test]
    fn exact_matches_binomial() {
        for n_total in 1..=25u64 {
            for k in 0..=n_total {
                for draws in 1..=n_total {
                    let q = RsQuery::new(n_total, k, draws).unwrap();
                    let exact: BigRational = rs_probability(q).unwrap();
                    assert_eq!(exact, rs_probability_binomial(q).unwrap(), "{q:?}");
                }
            }
        }
    }

    #[test]
    fn min_draws_examples() {
        assert_eq!(rs_min_draws(29, 8, 0.85).unwrap(), 6);
        assert_eq!(rs_min_draws(29, 8, 0.95).unwrap(), 8);
        assert_eq!(rs_min_draws(35, 1, 0.85).unwrap(), 30);
        assert_eq!(rs_min_draws(35, 1, 0.95).unwrap(), 34);
        assert_eq!(rs_min_draws(7, 7, 0.99).unwrap(), 1);
        assert_eq!(rs_min_draws(2, 1, 0.85).unwrap(), 2);
        assert_eq!(rs_min_draws(2, 1, 0.95).unwrap(), 2);
        assert_eq!(rs_min_draws(20, 17, 0.85).unwrap(), 1);
        assert_eq!(rs_min_draws(9, 0, 0.85), Err(BaselineError::NoCorrectPatch));
        assert!(rs_min_draws(9, 2, 1.0).is_err());
    }

    #[test]
    fn min_draws_is_minimal_exhaustive() {
        for n_total in 1..=200u64 {
            for k in 1..=n_total {
                for conf in [0.85, 0.95] {
                    let n = rs_min_draws(n_total, k, conf).unwrap();
                    assert!(n <= n_total - k + 1);
                    let at: f64 = rs_probability(RsQuery { n_total, k_correct: k, draws: n }).unwrap();
                    assert!(at >= conf - 1e-12);
                    if n > 1 {
                        let before: f64 = rs_probability(RsQuery { n_total, k_correct: k, draws: n - 1 }).unwrap();
                        assert!(before < conf);
                    }
                }
                assert!(rs_min_draws(n_total, k, 0.95).unwrap() >= rs_min_draws(n_total, k, 0.85).unwrap());
            }
        }
    }

    #[test]
    fn large_n_does_not_overflow() {
        let p: f64 = rs_probability(RsQuery::new(1_000_000, 3, 500_000).unwrap()).unwrap();
        assert_abs_diff_eq!(p, 0.875, epsilon = 1e-5);
        assert!(rs_min_draws(1_000_000, 1, 0.95).unwrap() == 950_000);
    }

    #[test]
    fn rates_examples() {
        let r = wpc_rates(WpcParams::new(1.0, 0.2).unwrap());
        assert_eq!((r.tp, r.fp), (0.0, 0.0));
        assert_abs_diff_eq!(r.fn_, 0.2);
        assert_abs_diff_eq!(r.tn, 0.8);
        let r = wpc_rates(WpcParams::new(0.5, 0.5).unwrap());
        assert_eq!([r.tp, r.fp, r.fn_, r.tn], [0.25; 4]);
        let r = wpc_rates(WpcParams::new(0.8, 129.0 / 819.0).unwrap());
        assert_abs_diff_eq!(r.tp, 0.0315, epsilon = 5e-5);
        assert_abs_diff_eq!(r.fp, 0.1685, epsilon = 5e-5);
        assert_abs_diff_eq!(r.fn_, 0.1260, epsilon = 5e-5);
        assert_abs_diff_eq!(r.tn, 0.6740, epsilon = 5e-5);
        assert!(WpcParams::new(0.4, 0.2).is_err());
        assert!(WpcParams::new(0.6, 1.0).is_err());
    }

    #[test]
    fn wpc_metric_examples() {
        let pi = 127.0 / 798.0;
        assert_eq!(wpc_metric(Metric::NegRecall, WpcParams::new(1.0, 0.3).unwrap()).unwrap(), Some(1.0));
        assert_eq!(wpc_metric(Metric::Mcc, WpcParams::new(0.73, 0.3).unwrap()).unwrap(), Some(0.0));
        let acc = wpc_metric(Metric::Accuracy, WpcParams::new(1.0, pi).unwrap()).unwrap().unwrap();
        assert_abs_diff_eq!(acc, 0.8409, epsilon = 5e-5);
        assert_eq!(wpc_metric(Metric::Precision, WpcParams::new(1.0, pi).unwrap()).unwrap(), None);
        assert_eq!(wpc_metric(Metric::F1, WpcParams::new(1.0, pi).unwrap()).unwrap(), None);
    }

    #[test]
    fn closed_form_agrees_with_substitution() {
        for &pi in &[0.05, 0.16, 0.37, 0.5, 0.9] {
            for p in prior_grid(0.01).unwrap() {
                let w = WpcParams::new(p, pi).unwrap();
                for m in Metric::ALL {
                    let a = wpc_metric(m, w).unwrap();
                    let b = wpc_metric_by_substitution(m, w).unwrap();
                    match (a, b) {
                        (Some(a), Some(b)) => assert_abs_diff_eq!(a, b, epsilon = 1e-9),
                        (None, None) => {}
                        other => panic!("{m} at p={p}, pi={pi}: {other:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn envelope_examples() {
        let c = wpc_envelope(Metric::BalancedAccuracy, 0.3, 0.001).unwrap();
        assert_eq!((c.env_max, c.env_min), (0.5, 0.5));
        assert_eq!(c.samples.len(), 501);
        assert_eq!(c.samples.first().unwrap().0, 0.5);
        assert_eq!(c.samples.last().unwrap().0, 1.0);

        let c = wpc_envelope(Metric::Accuracy, 127.0 / 798.0, 0.001).unwrap();
        assert_abs_diff_eq!(c.env_max, 0.8409, epsilon = 5e-5);
        assert_abs_diff_eq!(c.env_min, 0.5, epsilon = 1e-12);

        let c = wpc_envelope(Metric::PosRecall, 0.3, 0.01).unwrap();
        let vals: Vec<f64> = c.defined().map(|s| s.1).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
        assert_abs_diff_eq!(vals[0], 0.5);
        assert_abs_diff_eq!(*vals.last().unwrap(), 0.0);

        assert!(wpc_envelope(Metric::Mcc, 0.3, 0.0).is_err());
        assert!(wpc_envelope(Metric::Mcc, 0.3, 0.2).is_err());
        assert_eq!(wpc_envelope(Metric::Mcc, 0.3, 0.1).unwrap().samples.len(), 6);
    }

    #[test]
    fn crossing_examples() {
        let pi = 127.0 / 798.0;
        match crossing_prior(Metric::Accuracy, pi, 0.75).unwrap() {
            Crossing::Points(p) => assert_abs_diff_eq!(p[0], 0.8667, epsilon = 5e-5),
            c => panic!("{c:?}"),
        }
        assert!(matches!(crossing_prior(Metric::Accuracy, pi, pi), Err(BaselineError::NoCrossing(_))));
        assert_eq!(crossing_prior(Metric::PosRecall, 0.4, 0.25).unwrap(), Crossing::Points(vec![0.75]));
        assert_eq!(crossing_prior(Metric::Mcc, 0.4, 0.0).unwrap(), Crossing::Everywhere);
        assert!(crossing_prior(Metric::Mcc, 0.4, 0.1).is_err());
    }

    #[test]
    fn numeric_crossing_agrees_with_closed_forms() {
        for &pi in &[0.1_f64, 0.3, 0.7] {
            for &v in &[0.1_f64, 0.3, 0.55, 0.6, 0.8] {
                for m in [Metric::Accuracy, Metric::PosRecall, Metric::NegRecall] {
                    let closed = crossing_prior(m, pi, v);
                    let numeric = crossing_numeric(m, pi, v, 0.001);
                    match (closed, numeric) {
                        (Ok(Crossing::Points(a)), Ok(Crossing::Points(b))) => {
                            assert_eq!(a.len(), b.len());
                            assert!((a[0] - b[0]).abs() <= 1e-4, "{m} pi={pi} v={v}: {a:?} vs {b:?}");
                        }
                        (Err(_), Err(_)) => {}
                        other => panic!("{m} pi={pi} v={v}: {other:?}"),
                    }
                }
                // f1: invert 2 pi q / (pi + q) = v with q = 1 - p
                if let Ok(Crossing::Points(b)) = crossing_prior(Metric::F1, pi, v) {
                    let q = v * pi / (2.0 * pi - v);
                    assert!((b[0] - (1.0 - q)).abs() <= 1e-4);
                }
            }
        }
    }

    #[test]
    fn superiority_examples() {
        let flat = wpc_envelope(Metric::BalancedAccuracy, 0.2, 0.001).unwrap();
        let v = classify_superiority(&ci(Metric::BalancedAccuracy, 0.9, 0.95), &flat).unwrap();
        assert_eq!(v.kind, SuperiorityKind::Fully);
        assert_eq!(v.exceed_set, vec![(0.5, 1.0)]);
        let v = classify_superiority(&ci(Metric::BalancedAccuracy, 0.1, 0.2), &flat).unwrap();
        assert_eq!(v.kind, SuperiorityKind::Not);
        assert!(v.exceed_set.is_empty());

        let acc = wpc_envelope(Metric::Accuracy, 127.0 / 798.0, 0.001).unwrap();
        let v = classify_superiority(&ci(Metric::Accuracy, 0.75, 0.85), &acc).unwrap();
        assert_eq!(v.kind, SuperiorityKind::Partially);
        assert_eq!(v.exceed_set.len(), 1);
        assert_eq!(v.exceed_set[0].0, 0.5);
        assert_abs_diff_eq!(v.exceed_set[0].1, 0.8667, epsilon = 5e-5);

        assert!(matches!(
            classify_superiority(&ci(Metric::Mcc, 0.1, 0.2), &acc),
            Err(BaselineError::MetricMismatch { .. })
        ));
    }

    #[test]
    fn rs_classifier_is_coin_flip() {
        let m = rs_classifier_metrics(0.5).unwrap();
        assert_eq!(m.accuracy, 0.5);
        assert_eq!(m.precision, Some(0.5));
        assert_abs_diff_eq!(m.f1.unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(m.mcc, 0.0);
        let m = rs_classifier_metrics(127.0 / 798.0).unwrap();
        assert_abs_diff_eq!(m.precision.unwrap(), 0.159, epsilon = 5e-4);
        assert_eq!(m.mcc, 0.0);
    }

    proptest! {
        #[test]
        fn rates_sum_to_one(p in 0.5f64..=1.0, pi in 0.0001f64..0.9999) {
            let r = wpc_rates(WpcParams::new(p, pi).unwrap());
            prop_assert!((r.tp + r.fp + r.fn_ + r.tn - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn rs_monotone(n_total in 1u64..80, k in 0u64..80, draws in 1u64..80) {
            prop_assume!(k <= n_total && draws < n_total);
            let at = |k, d| rs_probability::<BigRational>(RsQuery { n_total, k_correct: k, draws: d }).unwrap();
            prop_assert!(at(k, draws + 1) >= at(k, draws));
            if k < n_total {
                prop_assert!(at(k + 1, draws) >= at(k, draws));
            }
            if k >= 1 {
                prop_assert_eq!(at(k, n_total - k + 1), BigRational::one());
            }
        }

        #[test]
        fn superiority_kind_stable_under_grid_refinement(lower in -0.2f64..1.0, width in 0.0f64..0.3, pi in 0.02f64..0.98, mi in 0usize..7) {
            let m = Metric::ALL[mi];
            let interval = ci(m, lower, lower + width);
            let coarse = classify_superiority(&interval, &wpc_envelope(m, pi, 0.01).unwrap()).unwrap();
            let fine = classify_superiority(&interval, &wpc_envelope(m, pi, 0.001).unwrap()).unwrap();
            prop_assert_eq!(coarse.kind, fine.kind);
            prop_assert_eq!(coarse.kind == SuperiorityKind::Fully, coarse.exceed_set == vec![(0.5, 1.0)]);
            if coarse.kind == SuperiorityKind::Not {
                prop_assert!(coarse.exceed_set.is_empty());
            }
        }
    }
}
