//! Command-line front end: `validate`, `report` and `baseline`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::analysis::{apr_matrix, group_quantiles, per_bug_metric, runtime_summary, upset, GroupBy};
use crate::baselines::{
    classify_superiority, rs_classifier_metrics, rs_min_draws, rs_probability, wpc_envelope, wpc_metric, RsQuery,
    WpcParams,
};
use crate::corpus::{self, clusters, common_set, coverage, filter_time_budget, Corpus, GroundTruth};
use crate::effort::{dominance, effort_summary, effort_table};
use crate::metrics::{Metric, SmoothingConfig};
use crate::report::{self, fmt_opt, Format, InputDigest, RunManifest, Table, NA};
use crate::resampling::{cluster_bootstrap, BootstrapConfig, RNG_ALGORITHM};
use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "podbench", version, about = "Evaluate patch overfitting detectors against naive baselines")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check patch and prediction files without running any analysis.
    Validate(InputArgs),
    /// Run the full evaluation and write a report bundle.
    Report(ReportArgs),
    /// Evaluate a naive baseline directly.
    #[command(subcommand)]
    Baseline(BaselineCommand),
}

#[derive(Debug, Args, Clone)]
pub struct InputArgs {
    #[arg(long)]
    pub patches: PathBuf,
    #[arg(long)]
    pub predictions: PathBuf,
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct ReportArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub input: InputArgs,
    /// Restrict to patches every selected tool classified (default when >= 2 tools).
    #[arg(long, conflicts_with = "no_common_set")]
    pub common_set: bool,
    #[arg(long)]
    pub no_common_set: bool,
    /// Comma-separated detector names to evaluate (default: all in the predictions file).
    #[arg(long, value_delimiter = ',')]
    pub tools: Option<Vec<String>>,
    /// Keep only patches generated within this many seconds.
    #[arg(long)]
    pub time_budget: Option<f64>,
    /// Random-selection confidence levels.
    #[arg(long = "confidence", num_args = 1.., default_values_t = vec![0.85, 0.95])]
    pub confidences: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, env = "POD_BENCH_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.001)]
    pub grid_step: f64,
    #[arg(long, default_value = "csv")]
    pub format: Format,
    /// Label for the `scope` column.
    #[arg(long, default_value = "all")]
    pub scope: String,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum BaselineCommand {
    /// Random selection without replacement.
    Rs {
        #[arg(long = "n")]
        n_total: u64,
        #[arg(long = "k")]
        k_correct: u64,
        /// Print the probability of at least one correct patch in this many draws.
        #[arg(long, conflicts_with = "confidence", required_unless_present = "confidence")]
        draws: Option<u64>,
        /// Print the minimal number of draws reaching this confidence.
        #[arg(long)]
        confidence: Option<f64>,
    },
    /// Weighted-probability classifier.
    Wpc {
        #[arg(long)]
        metric: Metric,
        #[arg(long)]
        pi: f64,
        #[arg(long, conflicts_with = "sweep", required_unless_present = "sweep")]
        p: Option<f64>,
        /// Print the whole envelope as CSV.
        #[arg(long)]
        sweep: bool,
        #[arg(long, default_value_t = 0.001)]
        grid_step: f64,
    },
}

/// Runs a parsed command, writing user-facing output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), Error> {
    match cli.command {
        Command::Validate(args) => validate(&args, out),
        Command::Report(args) => {
            let files = report(&args)?;
            writeln!(out, "wrote {} files to {}", files.len(), args.out.display())?;
            Ok(())
        }
        Command::Baseline(b) => baseline(b, out),
    }
}

fn validate(args: &InputArgs, out: &mut dyn Write) -> Result<(), Error> {
    let corpus = corpus::load_corpus(&args.patches, &args.predictions)?;
    let (c, o) = corpus.class_counts();
    writeln!(
        out,
        "ok: {} patches ({c} correct : {o} overfitting) over {} bugs; {} predictions from {} tools",
        corpus.len(),
        corpus.bug_ids().len(),
        corpus.predictions().len(),
        corpus.pod_tools().len()
    )?;
    let untimed = corpus.patches().iter().filter(|p| p.timestamp_s.is_none()).count();
    if untimed > 0 {
        writeln!(out, "warning: {untimed} patches have no timestamp")?;
    }
    let cov = coverage(&corpus, corpus.pod_tools())?;
    for tool in corpus.pod_tools() {
        let (m, u) = (cov.missing[tool], cov.unprocessed[tool]);
        if m > 0 {
            writeln!(out, "warning: tool `{tool}` has no prediction for {m} patches")?;
        }
        if u > 0 {
            writeln!(out, "warning: tool `{tool}` left {u} patches unprocessed")?;
        }
    }
    Ok(())
}

fn baseline(cmd: BaselineCommand, out: &mut dyn Write) -> Result<(), Error> {
    match cmd {
        BaselineCommand::Rs { n_total, k_correct, draws, confidence } => {
            if let Some(c) = confidence {
                writeln!(out, "{}", rs_min_draws(n_total, k_correct, c)?)?;
            } else if let Some(d) = draws {
                let p: f64 = rs_probability(RsQuery::new(n_total, k_correct, d)?)?;
                writeln!(out, "{p}")?;
            }
        }
        BaselineCommand::Wpc { metric, pi, p, sweep, grid_step } => {
            if sweep {
                let curve = wpc_envelope(metric, pi, grid_step)?;
                write!(out, "{}", envelope_table(&[curve]).to_csv())?;
            } else if let Some(p) = p {
                match wpc_metric(metric, WpcParams::new(p, pi)?)? {
                    Some(v) => writeln!(out, "{v}")?,
                    None => writeln!(out, "undefined")?,
                }
            }
        }
    }
    Ok(())
}

fn envelope_table(curves: &[crate::EnvelopeCurve]) -> Table {
    let mut t = Table::new("envelopes", ["metric", "pi", "p", "value"]);
    for c in curves {
        for &(p, v) in &c.samples {
            t.push([c.metric.name().to_string(), c.pi.to_string(), p.to_string(), fmt_opt(v)]);
        }
    }
    t
}

/// The corpus a report runs on, after the time-budget, tool and common-set filters.
pub fn prepare_corpus(args: &ReportArgs) -> Result<(Corpus, Vec<String>), Error> {
    let mut corpus = corpus::load_corpus(&args.input.patches, &args.input.predictions)?;
    let tools = match &args.tools {
        Some(t) => t.clone(),
        None => corpus.pod_tools().to_vec(),
    };
    corpus = corpus.with_tools(&tools)?;
    if let Some(b) = args.time_budget {
        corpus = filter_time_budget(&corpus, b)?;
    }
    let use_common = args.common_set || (!args.no_common_set && tools.len() >= 2);
    if use_common && !tools.is_empty() {
        corpus = common_set(&corpus, &tools)?;
    }
    Ok((corpus, tools))
}

/// Every report table, in output order.
pub fn build_tables(corpus: &Corpus, tools: &[String], args: &ReportArgs) -> Result<Vec<Table>, Error> {
    let smoothing = SmoothingConfig::<f64>::default();
    if corpus.is_empty() {
        return Err(Error::Usage("no patches left after filtering".into()));
    }
    for &c in &args.confidences {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::Usage(format!("confidence {c} outside (0, 1)")));
        }
    }
    let cfg = BootstrapConfig { replicates: args.reps, seed: args.seed, ..Default::default() };
    let mut tables = Vec::new();

    let (k_correct, k_overfit) = corpus.class_counts();
    let idx = clusters(corpus);
    let mut dataset = Table::new(
        "dataset",
        [
            "patches",
            "k_correct",
            "k_overfit",
            "bugs",
            "clusters",
            "cluster_size_min",
            "cluster_size_max",
            "cluster_size_median",
            "cluster_size_mean",
        ],
    );
    dataset.push([
        corpus.len().to_string(),
        k_correct.to_string(),
        k_overfit.to_string(),
        corpus.bug_ids().len().to_string(),
        idx.stats.count.to_string(),
        idx.stats.size_min.to_string(),
        idx.stats.size_max.to_string(),
        idx.stats.size_median.to_string(),
        idx.stats.size_mean.to_string(),
    ]);
    tables.push(dataset);

    // metrics with bootstrap intervals, and envelope comparison
    let pi = corpus.correct_fraction().unwrap_or(0.0);
    let envelopes: Vec<crate::EnvelopeCurve> = if pi > 0.0 && pi < 1.0 {
        Metric::ALL.iter().map(|&m| wpc_envelope(m, pi, args.grid_step)).collect::<Result<_, _>>()?
    } else {
        log::warn!("corpus has a single class; baseline envelopes skipped");
        Vec::new()
    };
    let mut metrics_ci = Table::new(
        "metrics_ci",
        ["scope", "pod_tool", "metric", "point", "lower", "upper", "replicates", "defined_replicates", "seed"],
    );
    let mut superiority = Table::new("superiority", ["pod_tool", "metric", "kind", "exceed_set"]);
    for tool in tools {
        for (mi, &m) in Metric::ALL.iter().enumerate() {
            match cluster_bootstrap(corpus, tool, m, &cfg, smoothing) {
                Ok(ci) => {
                    metrics_ci.push([
                        args.scope.clone(),
                        tool.clone(),
                        m.name().to_string(),
                        ci.point.to_string(),
                        ci.lower.to_string(),
                        ci.upper.to_string(),
                        cfg.replicates.to_string(),
                        ci.n_defined_replicates.to_string(),
                        cfg.seed.to_string(),
                    ]);
                    if let Some(curve) = envelopes.get(mi) {
                        let v = classify_superiority(&ci, curve)?;
                        let set: Vec<String> = v.exceed_set.iter().map(|(a, b)| format!("[{a},{b}]")).collect();
                        superiority.push([
                            tool.clone(),
                            m.name().to_string(),
                            v.kind.as_str().to_string(),
                            set.join(";"),
                        ]);
                    }
                }
                Err(crate::resampling::ResampleError::AllReplicatesUndefined(_)) => {
                    metrics_ci.push([
                        args.scope.clone(),
                        tool.clone(),
                        m.name().to_string(),
                        String::new(),
                        String::new(),
                        String::new(),
                        cfg.replicates.to_string(),
                        "0".to_string(),
                        cfg.seed.to_string(),
                    ]);
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    tables.push(metrics_ci);
    tables.push(superiority);
    tables.push(envelope_table(&envelopes));

    let mut rs_table = Table::new("rs_classifier", ["metric", "pi", "value"]);
    if pi > 0.0 && pi < 1.0 {
        let rs = rs_classifier_metrics(pi)?;
        for m in Metric::ALL {
            rs_table.push([m.name().to_string(), pi.to_string(), fmt_opt(rs.get(m))]);
        }
    }
    tables.push(rs_table);

    // inspection effort
    let effort = effort_table(corpus, tools, &args.confidences)?;
    let columns = effort.column_names();
    let mut header = vec!["bug_id".to_string(), "k_correct".to_string(), "k_overfit".to_string()];
    header.extend(columns.iter().cloned());
    let mut et = Table::new("effort_table", header);
    for r in &effort.rows {
        let mut row = vec![r.bug_id.clone(), r.k_correct.to_string(), r.k_overfit.to_string()];
        row.extend(r.per_tool.iter().map(|c| c.map_or_else(|| NA.to_string(), |c| c.to_string())));
        row.extend(r.rs.iter().map(u64::to_string));
        et.push(row);
    }
    tables.push(et);
    let mut header = vec!["statistic".to_string()];
    header.extend(columns.iter().cloned());
    let mut es = Table::new("effort_summary", header);
    match effort_summary(&effort) {
        Ok(s) => {
            es.push(std::iter::once("median".to_string()).chain(s.columns.iter().map(|c| c.median.to_string())));
            es.push(std::iter::once("mean".to_string()).chain(s.columns.iter().map(|c| c.mean.to_string())));
        }
        Err(e) => log::warn!("effort summary skipped: {e}"),
    }
    tables.push(es);
    let dom = dominance(&effort);
    let mut dt = Table::new("dominance", ["pod_tool", "confidence", "rs_wins", "n_bugs", "percent"]);
    for r in &dom.rows {
        dt.push([
            r.pod_tool.clone(),
            r.confidence.to_string(),
            r.rs_wins.to_string(),
            r.n_bugs.to_string(),
            r.percent.to_string(),
        ]);
    }
    let n_bugs = effort.eligible().count();
    for &(c, k) in &dom.rs_beats_all {
        let pct = if n_bugs == 0 { 0.0 } else { 100.0 * k as f64 / n_bugs as f64 };
        dt.push(["*".to_string(), c.to_string(), k.to_string(), n_bugs.to_string(), pct.to_string()]);
    }
    tables.push(dt);

    // intersections
    let mut ut = Table::new("upset", ["class", "tools", "count"]);
    for class in [GroundTruth::Correct, GroundTruth::Overfitting] {
        let r = upset(corpus, tools, class);
        for (set, n) in &r.exclusive_sets {
            ut.push([class.as_str().to_string(), set.join("|"), n.to_string()]);
        }
    }
    tables.push(ut);

    // bug-level MCC and its groupings
    let per_bug = tools.iter().map(|t| per_bug_metric(corpus, t, Metric::Mcc, smoothing)).reduce(|a, b| a.merge(b));
    let mut pb = Table::new("per_bug_mcc", ["pod_tool", "project", "bug_id", "value"]);
    let mut quantile_tables = Vec::new();
    if let Some(map) = per_bug {
        for e in &map.entries {
            pb.push([e.pod_tool.clone(), e.project.clone(), e.bug_id.clone(), e.value.to_string()]);
        }
        for (name, by) in [("project", GroupBy::Project), ("tool", GroupBy::PodTool)] {
            let mut q = Table::new(format!("mcc_quantiles_by_{name}"), ["group", "min", "q1", "median", "q3", "max"]);
            let mut pts = Table::new(format!("mcc_points_by_{name}"), ["group", "value"]);
            if let Ok(groups) = group_quantiles(&map, by) {
                for g in groups {
                    q.push([
                        g.group.clone(),
                        g.min.to_string(),
                        g.q1.to_string(),
                        g.median.to_string(),
                        g.q3.to_string(),
                        g.max.to_string(),
                    ]);
                    for v in &g.points {
                        pts.push([g.group.clone(), v.to_string()]);
                    }
                }
            }
            quantile_tables.push(q);
            quantile_tables.push(pts);
        }
    }
    tables.push(pb);
    tables.extend(quantile_tables);

    let mut mt = Table::new("apr_matrix", ["pod_tool", "apr_tool", "k_correct", "k_overfit", "value"]);
    for c in apr_matrix(corpus, tools, Metric::Mcc, smoothing) {
        mt.push([c.pod_tool, c.apr_tool, c.k_correct.to_string(), c.k_overfit.to_string(), fmt_opt(c.value)]);
    }
    tables.push(mt);

    Ok(tables)
}

fn runtime_table(corpus: &Corpus, tools: &[String]) -> Table {
    let preds: Vec<_> = corpus.predictions().iter().filter(|r| tools.contains(&r.pod_tool)).cloned().collect();
    let mut t = Table::new("runtime", ["pod_tool", "total_seconds", "n_classified", "seconds_per_classified"]);
    for r in runtime_summary(&preds) {
        t.push([
            r.pod_tool,
            r.total_seconds.to_string(),
            r.n_classified.to_string(),
            fmt_opt(r.seconds_per_classified),
        ]);
    }
    t
}

fn digest(path: &Path) -> Result<InputDigest, Error> {
    Ok(InputDigest { path: path.display().to_string(), sha256: report::file_digest(path)? })
}

/// Runs the whole pipeline and writes the bundle; returns the written paths.
pub fn report(args: &ReportArgs) -> Result<Vec<PathBuf>, Error> {
    let (corpus, tools) = prepare_corpus(args)?;
    let mut tables = build_tables(&corpus, &tools, args)?;
    // runtimes cover every attempt, including patches outside the common set
    let full = corpus::load_corpus(&args.input.patches, &args.input.predictions)?;
    tables.push(runtime_table(&full, &tools));

    let manifest = RunManifest {
        harness_version: env!("CARGO_PKG_VERSION").to_string(),
        inputs: vec![digest(&args.input.patches)?, digest(&args.input.predictions)?],
        seed: args.seed,
        rng_algorithm: RNG_ALGORITHM.to_string(),
        median_convention: "linear interpolation; even counts average the two middle values".to_string(),
        config: json!({ "args": args, "tools": tools, "epsilon": 1e-12 }),
        timestamp: chrono::Utc::now().to_rfc3339(),
        outputs: Vec::new(),
    };
    Ok(report::write_bundle(&args.out, &tables, args.format, manifest)?)
}
