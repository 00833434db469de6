//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use podbench::{Corpus, GroundTruth, PatchRecord, PredictionRecord, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Detector column order of the published effort table.
pub const TOOLS: [&str; 5] = ["Yang", "Invalidator", "FIXCHECK", "LLM4PatchCorrect", "Tian"];

pub struct EffortFixtureRow {
    pub bug: &'static str,
    pub correct: usize,
    pub overfit: usize,
    /// Inspection counts per detector in `TOOLS` order; `None` is N/A.
    pub tools: [Option<u64>; 5],
    pub rs85: u64,
    pub rs95: u64,
}

const NA: Option<u64> = None;

macro_rules! row {
    ($bug:literal, $c:literal : $o:literal, [$($t:expr),*], $r85:literal, $r95:literal) => {
        EffortFixtureRow { bug: $bug, correct: $c, overfit: $o, tools: [$($t),*], rs85: $r85, rs95: $r95 }
    };
}

/// Bugs of the classical dataset with at least one correct and one
/// overfitting patch: class ratio, detector inspection counts and the
/// published RS-85 / RS-95 draw counts.
pub const EFFORT_ROWS: [EffortFixtureRow; 29] = [
    row!("Chart-1", 8:21, [Some(2), Some(22), NA, Some(8), NA], 6, 8),
    row!("Chart-4", 5:1, [Some(1), Some(1), Some(2), NA, NA], 2, 2),
    row!("Chart-7", 1:34, [Some(3), Some(1), NA, NA, NA], 30, 34),
    row!("Chart-9", 1:10, [NA, Some(11), Some(11), NA, Some(4)], 10, 11),
    row!("Closure-2", 1:2, [NA, Some(3), Some(3), Some(3), NA], 3, 3),
    row!("Closure-46", 4:6, [Some(5), Some(7), Some(7), Some(1), NA], 4, 5),
    row!("Closure-57", 2:2, [Some(3), Some(3), Some(3), NA, NA], 3, 3),
    row!("Closure-62", 4:14, [Some(10), Some(15), Some(15), NA, Some(10)], 7, 9),
    row!("Closure-126", 5:14, [Some(10), Some(15), NA, Some(5), NA], 6, 8),
    row!("Lang-10", 3:7, [Some(3), Some(8), Some(8), NA, NA], 5, 6),
    row!("Lang-33", 3:2, [Some(2), Some(3), Some(3), Some(3), Some(3)], 2, 3),
    row!("Lang-43", 2:2, [Some(2), Some(3), Some(3), Some(1), Some(2)], 3, 3),
    row!("Lang-55", 5:8, [Some(7), Some(1), Some(9), NA, Some(9)], 4, 5),
    row!("Lang-57", 5:5, [NA, Some(6), NA, Some(2), NA], 3, 4),
    row!("Lang-58", 1:53, [Some(27), Some(36), Some(54), NA, NA], 46, 52),
    row!("Lang-59", 4:25, [Some(1), Some(1), NA, Some(1), NA], 11, 15),
    row!("Math-30", 4:6, [Some(5), Some(6), Some(7), Some(3), NA], 4, 5),
    row!("Math-33", 3:97, [Some(96), Some(68), Some(27), NA, NA], 47, 63),
    row!("Math-50", 9:73, [NA, Some(74), Some(48), Some(34), Some(20)], 15, 23),
    row!("Math-53", 1:2, [Some(1), Some(3), Some(3), NA, Some(1)], 3, 3),
    row!("Math-57", 2:2, [Some(2), Some(3), Some(2), Some(2), NA], 3, 3),
    row!("Math-58", 1:18, [NA, Some(18), NA, Some(1), NA], 17, 19),
    row!("Math-70", 3:2, [Some(1), Some(3), Some(3), Some(1), Some(2)], 2, 3),
    row!("Math-79", 1:3, [Some(4), Some(4), NA, NA, NA], 4, 4),
    row!("Math-80", 1:47, [Some(8), Some(1), Some(48), NA, NA], 41, 46),
    row!("Math-82", 3:17, [Some(7), Some(17), NA, Some(6), NA], 9, 12),
    row!("Math-85", 4:51, [Some(29), Some(28), NA, NA, Some(4)], 21, 29),
    row!("Mockito-29", 2:5, [Some(5), Some(6), Some(6), NA, NA], 4, 5),
    row!("Time-7", 4:4, [Some(4), Some(5), NA, Some(1), Some(3)], 3, 4),
];

/// Number of classical bugs whose patches were all correct.
pub const ALL_CORRECT_BUGS: usize = 16;

pub fn tool_names() -> Vec<String> {
    TOOLS.iter().map(|s| s.to_string()).collect()
}

fn project_of(bug: &str) -> &str {
    bug.rsplit_once('-').map(|(p, _)| p).unwrap_or(bug)
}

/// Synthetic corpus realising the effort table: for a count `c` the detector
/// keeps one correct patch and `c - 1` overfitting ones; for N/A it keeps
/// nothing. Adds `ALL_CORRECT_BUGS` single-patch all-correct bugs, 13 of which
/// one detector rejects. Patch timestamps are spread over eight hours.
pub fn effort_fixture() -> Corpus {
    let mut patches = Vec::new();
    let mut preds = Vec::new();
    let mut clock = 0u64;
    for row in &EFFORT_ROWS {
        let project = project_of(row.bug);
        for i in 0..row.correct + row.overfit {
            let is_correct = i < row.correct;
            let label = if is_correct { GroundTruth::Correct } else { GroundTruth::Overfitting };
            let id = format!("{}#{i}", row.bug);
            clock = (clock + 977) % 28_800;
            patches.push(
                PatchRecord::new(&id, project, row.bug, format!("apr{}", i % 3), label).with_timestamp(clock as f64),
            );
            for (t, tool) in TOOLS.iter().enumerate() {
                let keep = match row.tools[t] {
                    Some(_) if is_correct => i == 0,
                    Some(c) => ((i - row.correct) as u64) < c - 1,
                    None => false,
                };
                let v = if keep { Verdict::Correct } else { Verdict::Overfitting };
                preds.push(PredictionRecord::new(&id, *tool, v, 1.0));
            }
        }
    }
    for b in 0..ALL_CORRECT_BUGS {
        let bug = format!("Cli-{}", 100 + b);
        let id = format!("{bug}#0");
        patches.push(PatchRecord::new(&id, "Cli", &bug, "apr0", GroundTruth::Correct).with_timestamp(60.0));
        for (t, tool) in TOOLS.iter().enumerate() {
            let keep = !(b < 13 && t == b % 5);
            let v = if keep { Verdict::Correct } else { Verdict::Overfitting };
            preds.push(PredictionRecord::new(&id, *tool, v, 1.0));
        }
    }
    Corpus::new(patches, preds).expect("valid fixture")
}

/// Writes a corpus as the two input CSV files.
pub fn write_corpus_csv(corpus: &Corpus, dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
    let mut p = String::from("patch_id,project,bug_id,apr_tool,label,timestamp_s,patch_path\n");
    for r in corpus.patches() {
        let ts = r.timestamp_s.map(|t| t.to_string()).unwrap_or_default();
        let _ = writeln!(p, "{},{},{},{},{},{},", r.patch_id, r.project, r.bug_id, r.apr_tool, r.label, ts);
    }
    let mut q = String::from("patch_id,pod_tool,verdict,runtime_s\n");
    for r in corpus.predictions() {
        let _ = writeln!(q, "{},{},{},{}", r.patch_id, r.pod_tool, r.verdict, r.runtime_s);
    }
    let pp = dir.join("patches.csv");
    let qp = dir.join("predictions.csv");
    fs::write(&pp, p).unwrap();
    fs::write(&qp, q).unwrap();
    (pp, qp)
}

/// Cluster sizes with the classical common-set shape: 242 clusters,
/// sizes 1..=61, median 1, 798 patches in total.
pub fn classical_cluster_sizes() -> Vec<usize> {
    let mut sizes = vec![1; 140];
    sizes.push(61);
    sizes.extend(std::iter::repeat_n(6, 92));
    sizes.extend(std::iter::repeat_n(5, 9));
    sizes
}

/// Random corpus over the given cluster sizes with `tools` random detectors.
pub fn random_corpus(seed: u64, sizes: &[usize], tools: &[&str], pi: f64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut patches = Vec::new();
    let mut preds = Vec::new();
    for (c, &size) in sizes.iter().enumerate() {
        let bug = format!("P{}-{}", c % 4, c / 3);
        let project = format!("P{}", c % 4);
        let apr = format!("apr{}", c % 3);
        for i in 0..size {
            let id = format!("c{c}p{i}");
            let label = if rng.gen_bool(pi) { GroundTruth::Correct } else { GroundTruth::Overfitting };
            patches.push(PatchRecord::new(&id, &project, &bug, &apr, label));
            for tool in tools {
                let r: f64 = rng.gen();
                let v = if r < 0.05 {
                    Verdict::Unprocessed
                } else if r < 0.5 {
                    Verdict::Correct
                } else {
                    Verdict::Overfitting
                };
                preds.push(PredictionRecord::new(&id, *tool, v, rng.gen_range(0.0..3.0)));
            }
        }
    }
    Corpus::new(patches, preds).expect("valid random corpus")
}
