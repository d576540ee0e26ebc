use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::metrics::Metric;

use super::record::{condition_label, RunRecord};

pub const BOOTSTRAP_RESAMPLES: usize = 10_000;

/// Default length buckets, inclusive.
pub const DEFAULT_BUCKETS: [(usize, usize); 5] = [(3, 8), (9, 12), (13, 18), (19, 22), (23, 50)];

/// Mean with a 95% percentile-bootstrap interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub n: usize,
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Resamples `values` with replacement and takes the 2.5th and 97.5th
/// percentiles of the resampled means. `None` for an empty sample.
pub fn bootstrap_mean(values: &[f64], resamples: usize, seed: u64) -> Option<Estimate> {
    if values.is_empty() {
        return None;
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means: Vec<f64> = (0..resamples.max(1))
        .map(|_| (0..n).map(|_| values[rng.gen_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let pick = |q: f64| means[((q * (means.len() - 1) as f64).round() as usize).min(means.len() - 1)];
    Some(Estimate {
        n,
        mean,
        lo: pick(0.025),
        hi: pick(0.975),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupBy {
    Size,
    LengthBucket(Vec<(usize, usize)>),
}

impl GroupBy {
    pub fn length_buckets() -> GroupBy {
        GroupBy::LengthBucket(DEFAULT_BUCKETS.to_vec())
    }

    fn title(&self) -> &'static str {
        match self {
            GroupBy::Size => "Mean results by grammar size",
            GroupBy::LengthBucket(_) => "Mean results by input string length",
        }
    }

    /// Column key of a record, as a sortable number and a display label.
    fn key(&self, r: &RunRecord) -> Option<(f64, String)> {
        match self {
            GroupBy::Size => Some((r.spec.size as f64, r.spec.size.to_string())),
            GroupBy::LengthBucket(buckets) => buckets
                .iter()
                .find(|(lo, hi)| (*lo..=*hi).contains(&r.len))
                .map(|&(lo, hi)| bucket_key(lo, hi)),
        }
    }
}

/// Buckets are labeled by their midpoint.
fn bucket_key(lo: usize, hi: usize) -> (f64, String) {
    let mid = (lo + hi) as f64 / 2.0;
    (mid, format!("{mid:.1}"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub label: String,
    /// One row per metric, one cell per column; `None` for empty groups.
    pub rows: Vec<(Metric, Vec<Option<Estimate>>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportTable {
    pub title: String,
    pub group_label: String,
    pub columns: Vec<String>,
    pub blocks: Vec<Block>,
}

/// Means of every metric, one block per (model, condition), one column per
/// group value.
///
/// Columns are the union of groups seen in any block, plus every configured
/// bucket; a block without records in a column shows it as missing.
pub fn aggregate_report(records: &[RunRecord], by: &GroupBy, seed: u64) -> ReportTable {
    let mut columns: BTreeMap<OrdF64, String> = BTreeMap::new();
    if let GroupBy::LengthBucket(buckets) = by {
        for &(lo, hi) in buckets {
            let (k, l) = bucket_key(lo, hi);
            columns.insert(OrdF64(k), l);
        }
    }
    let mut blocks: BTreeMap<(String, usize, String), BTreeMap<OrdF64, Vec<&RunRecord>>> = BTreeMap::new();
    for r in records {
        let Some((k, l)) = by.key(r) else { continue };
        columns.insert(OrdF64(k), l);
        let block = (r.endpoint.model.clone(), r.condition, condition_label(&r.spec));
        blocks.entry(block).or_default().entry(OrdF64(k)).or_default().push(r);
    }
    let keys: Vec<OrdF64> = columns.keys().copied().collect();
    let out_blocks = blocks
        .into_iter()
        .enumerate()
        .map(|(bi, ((model, _, cond), groups))| Block {
            label: format!("{model} {cond}"),
            rows: Metric::ALL
                .iter()
                .enumerate()
                .map(|(mi, &m)| {
                    let cells = keys
                        .iter()
                        .enumerate()
                        .map(|(ci, k)| {
                            let values: Vec<f64> = groups
                                .get(k)
                                .map(|rs| rs.iter().map(|r| r.scores.get(m)).collect())
                                .unwrap_or_default();
                            let cell_seed = crate::seed::derive(seed, &[bi as u64, mi as u64, ci as u64]);
                            bootstrap_mean(&values, BOOTSTRAP_RESAMPLES, cell_seed)
                        })
                        .collect();
                    (m, cells)
                })
                .collect(),
        })
        .collect();
    ReportTable {
        title: by.title().to_string(),
        group_label: match by {
            GroupBy::Size => "size".into(),
            GroupBy::LengthBucket(_) => "length".into(),
        },
        columns: columns.into_values().collect(),
        blocks: out_blocks,
    }
}

#[derive(Debug, Clone, Copy)]
struct OrdF64(f64);

impl PartialEq for OrdF64 {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn metric_name(m: Metric) -> &'static str {
    match m {
        Metric::Exact => "Exact Match",
        Metric::BagOfWords => "Bag of Words",
        Metric::Bleu => "BLEU",
        Metric::Chrfpp => "chrF++",
    }
}

pub const MISSING: &str = "—";

impl ReportTable {
    /// Long-format CSV: one line per block, metric and column.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["block", "metric", &self.group_label, "n", "mean", "ci_low", "ci_high"])
            .unwrap();
        for b in &self.blocks {
            for (m, cells) in &b.rows {
                for (col, cell) in self.columns.iter().zip(cells) {
                    let fields: [String; 4] = match cell {
                        Some(e) => [e.n.to_string(), fmt3(e.mean), fmt3(e.lo), fmt3(e.hi)],
                        None => ["0".into(), String::new(), String::new(), String::new()],
                    };
                    let mut row = vec![b.label.clone(), m.as_str().to_string(), col.clone()];
                    row.extend(fields);
                    w.write_record(&row).unwrap();
                }
            }
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    /// Aligned text table: means, with the interval underneath each block.
    pub fn to_text(&self) -> String {
        let mut header = vec!["".to_string(), "Metric".to_string()];
        header.extend(self.columns.iter().cloned());
        let mut rows: Vec<Vec<String>> = Vec::new();
        for b in &self.blocks {
            for (i, (m, cells)) in b.rows.iter().enumerate() {
                let mut row = vec![
                    if i == 0 { b.label.clone() } else { String::new() },
                    metric_name(*m).to_string(),
                ];
                row.extend(cells.iter().map(|c| match c {
                    Some(e) => format!("{} [{}, {}]", fmt3(e.mean), fmt3(e.lo), fmt3(e.hi)),
                    None => MISSING.to_string(),
                }));
                rows.push(row);
            }
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|c| {
                std::iter::once(&header)
                    .chain(&rows)
                    .map(|r| r[c].chars().count())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.title);
        let line = |r: &Vec<String>| {
            r.iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s}{}", " ".repeat(w - s.chars().count())))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let _ = writeln!(out, "{}", line(&header));
        let _ = writeln!(
            out,
            "{}",
            "-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1))
        );
        for r in &rows {
            let _ = writeln!(out, "{}", line(r));
        }
        out
    }
}

fn fmt3(x: f64) -> String {
    format!("{x:.3}")
}
