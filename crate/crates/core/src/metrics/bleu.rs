use std::collections::HashMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothing {
    /// Zero precisions make the score zero.
    None,
    /// Each zero precision at order n becomes `1 / (2^k * total_n)`, where k
    /// counts the zero orders so far.
    #[default]
    Exp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BleuConfig {
    pub max_order: usize,
    /// Per-order weights; `None` means uniform.
    pub weights: Option<Vec<f64>>,
    pub smoothing: Smoothing,
    /// Drop orders longer than the candidate instead of scoring them zero.
    pub effective_order: bool,
}

impl Default for BleuConfig {
    fn default() -> Self {
        BleuConfig {
            max_order: 4,
            weights: None,
            smoothing: Smoothing::Exp,
            effective_order: true,
        }
    }
}

/// Sufficient statistics: clipped matches and candidate n-gram totals per
/// order, and the two lengths.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BleuStats {
    pub correct: Vec<u64>,
    pub total: Vec<u64>,
    pub sys_len: u64,
    pub ref_len: u64,
}

impl BleuStats {
    pub fn new<S: AsRef<str>, T: AsRef<str>>(cand: &[S], gold: &[T], max_order: usize) -> BleuStats {
        let cand = tokens(cand);
        let gold = tokens(gold);
        let mut stats = BleuStats {
            correct: vec![0; max_order],
            total: vec![0; max_order],
            sys_len: cand.len() as u64,
            ref_len: gold.len() as u64,
        };
        for n in 1..=max_order {
            let refs = ngrams(&gold, n);
            for (g, c) in ngrams(&cand, n) {
                stats.total[n - 1] += c;
                stats.correct[n - 1] += c.min(refs.get(&g).copied().unwrap_or(0));
            }
        }
        stats
    }

    fn add(&mut self, other: &BleuStats) {
        if self.correct.len() < other.correct.len() {
            self.correct.resize(other.correct.len(), 0);
            self.total.resize(other.total.len(), 0);
        }
        for (i, c) in other.correct.iter().enumerate() {
            self.correct[i] += c;
            self.total[i] += other.total[i];
        }
        self.sys_len += other.sys_len;
        self.ref_len += other.ref_len;
    }

    pub fn score(&self, cfg: &BleuConfig) -> f64 {
        let bp = if self.sys_len < self.ref_len {
            if self.sys_len > 0 {
                (1.0 - self.ref_len as f64 / self.sys_len as f64).exp()
            } else {
                0.0
            }
        } else {
            1.0
        };
        if self.correct.iter().all(|&c| c == 0) {
            return 0.0;
        }
        let mut precisions = vec![0.0; cfg.max_order];
        let mut smooth = 1.0;
        let mut eff_order = cfg.max_order;
        for n in 1..=cfg.max_order {
            let (correct, total) = (self.correct[n - 1], self.total[n - 1]);
            if total == 0 {
                break;
            }
            if cfg.effective_order {
                eff_order = n;
            }
            precisions[n - 1] = if correct > 0 {
                correct as f64 / total as f64
            } else {
                match cfg.smoothing {
                    Smoothing::Exp => {
                        smooth *= 2.0;
                        1.0 / (smooth * total as f64)
                    }
                    Smoothing::None => 0.0,
                }
            };
        }
        if precisions[..eff_order].contains(&0.0) {
            return 0.0;
        }
        let weights: Vec<f64> = match &cfg.weights {
            Some(w) => w[..eff_order].to_vec(),
            None => vec![1.0; eff_order],
        };
        let wsum: f64 = weights.iter().sum();
        let log_sum: f64 = precisions[..eff_order]
            .iter()
            .zip(&weights)
            .map(|(p, w)| w * p.ln())
            .sum();
        (bp * (log_sum / wsum).exp()).clamp(0.0, 1.0)
    }
}

fn tokens<S: AsRef<str>>(words: &[S]) -> Vec<&str> {
    words.iter().flat_map(|w| w.as_ref().split_whitespace()).collect()
}

fn ngrams<'a>(toks: &[&'a str], n: usize) -> HashMap<Vec<&'a str>, u64> {
    let mut m = HashMap::new();
    if toks.len() >= n {
        for win in toks.windows(n) {
            *m.entry(win.to_vec()).or_insert(0) += 1;
        }
    }
    m
}

/// Sentence-level BLEU of a candidate against one gold translation.
pub fn bleu<S: AsRef<str>, T: AsRef<str>>(cand: &[S], gold: &[T], cfg: &BleuConfig) -> f64 {
    BleuStats::new(cand, gold, cfg.max_order).score(cfg)
}

/// Corpus-level BLEU: statistics are summed before scoring, and orders are
/// never dropped.
pub fn corpus_bleu<S: AsRef<str>, T: AsRef<str>>(pairs: &[(Vec<S>, Vec<T>)], cfg: &BleuConfig) -> f64 {
    let mut total = BleuStats {
        correct: vec![0; cfg.max_order],
        total: vec![0; cfg.max_order],
        ..BleuStats::default()
    };
    for (c, g) in pairs {
        total.add(&BleuStats::new(c, g, cfg.max_order));
    }
    let cfg = BleuConfig {
        effective_order: false,
        ..cfg.clone()
    };
    total.score(&cfg)
}
