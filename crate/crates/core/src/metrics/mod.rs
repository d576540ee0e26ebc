//! Scoring a candidate translation against one or more gold translations.
//!
//! All scores lie in `[0, 1]`. BLEU and chrF++ follow SacreBLEU's sentence
//! level definitions with whitespace tokenization, so values match
//! `sacrebleu.sentence_bleu(..., tokenize="none")` and
//! `sacrebleu.sentence_chrf(..., word_order=2)` divided by 100.
//!
//! ```
//! use scfgmt::metrics::{bleu, chrfpp, BleuConfig, ChrfConfig};
//!
//! let gold = ["vacfaq", "tuvrol", "zatpuj"];
//! assert_eq!(bleu(&gold, &gold, &BleuConfig::default()), 1.0);
//! assert_eq!(chrfpp(&gold, &gold, &ChrfConfig::default()), 1.0);
//! assert_eq!(bleu(&["x", "y"], &gold, &BleuConfig::default()), 0.0);
//! ```

mod bleu;
mod chrf;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use bleu::{bleu, corpus_bleu, BleuConfig, BleuStats, Smoothing};
pub use chrf::{chrfpp, ChrfConfig};

/// 1 iff the candidate equals some gold translation word for word.
pub fn exact_match<S: AsRef<str>, T: AsRef<str>>(cand: &[S], golds: &[Vec<T>]) -> u8 {
    golds.iter().any(|g| same_words(cand, g)) as u8
}

/// 1 iff the candidate uses the same multiset of words as the gold.
pub fn bag_of_words<S: AsRef<str>, T: AsRef<str>>(cand: &[S], gold: &[T]) -> u8 {
    (counts(cand) == counts(gold)) as u8
}

pub(crate) fn same_words<S: AsRef<str>, T: AsRef<str>>(a: &[S], b: &[T]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.as_ref() == y.as_ref())
}

fn counts<S: AsRef<str>>(words: &[S]) -> HashMap<&str, usize> {
    let mut m = HashMap::new();
    for w in words {
        *m.entry(w.as_ref()).or_insert(0) += 1;
    }
    m
}

/// The four measures for one candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub exact: u8,
    pub bag_of_words: u8,
    pub bleu: f64,
    pub chrfpp: f64,
}

impl ScoreRecord {
    /// Score of a failed trial, e.g. when no answer could be extracted.
    pub const ZERO: ScoreRecord = ScoreRecord {
        exact: 0,
        bag_of_words: 0,
        bleu: 0.0,
        chrfpp: 0.0,
    };

    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Exact => self.exact as f64,
            Metric::BagOfWords => self.bag_of_words as f64,
            Metric::Bleu => self.bleu,
            Metric::Chrfpp => self.chrfpp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Exact,
    BagOfWords,
    Bleu,
    Chrfpp,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Exact, Metric::BagOfWords, Metric::Bleu, Metric::Chrfpp];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Exact => "exact",
            Metric::BagOfWords => "bag_of_words",
            Metric::Bleu => "bleu",
            Metric::Chrfpp => "chrfpp",
        }
    }
}

/// Scores a candidate against every acceptable gold translation.
///
/// Exact match is 1 if any gold matches. Bag-of-words, BLEU and chrF++
/// take the best value over the golds.
pub fn score<S: AsRef<str>, T: AsRef<str>>(cand: &[S], golds: &[Vec<T>]) -> ScoreRecord {
    let exact = exact_match(cand, golds);
    if exact == 1 {
        return ScoreRecord {
            exact: 1,
            bag_of_words: 1,
            bleu: 1.0,
            chrfpp: 1.0,
        };
    }
    let bc = BleuConfig::default();
    let cc = ChrfConfig::default();
    let mut rec = ScoreRecord::ZERO;
    for g in golds {
        rec.bag_of_words = rec.bag_of_words.max(bag_of_words(cand, g));
        rec.bleu = rec.bleu.max(bleu(cand, g, &bc));
        rec.chrfpp = rec.chrfpp.max(chrfpp(cand, g, &cc));
    }
    rec
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn exact_and_bag() {
        let gold = w("a b c d");
        assert_eq!(exact_match(&gold, std::slice::from_ref(&gold)), 1);
        assert_eq!(exact_match(&w("b a c d"), std::slice::from_ref(&gold)), 0);
        assert_eq!(exact_match(&w("b a c d"), &[gold.clone(), w("b a c d")]), 1);
        assert_eq!(bag_of_words(&w("d c b a"), &gold), 1);
        assert_eq!(bag_of_words(&w("a b c d d"), &gold), 0);
        assert_eq!(bag_of_words(&w("a b c e"), &gold), 0);
    }

    #[test]
    fn exact_implies_all_ones() {
        let gold = w("vacfaq tuvrol zatpuj");
        let r = score(&gold, std::slice::from_ref(&gold));
        assert_eq!(
            r,
            ScoreRecord {
                exact: 1,
                bag_of_words: 1,
                bleu: 1.0,
                chrfpp: 1.0
            }
        );
        assert_eq!(bleu(&gold, &gold, &BleuConfig::default()), 1.0);
        assert_eq!(chrfpp(&gold, &gold, &ChrfConfig::default()), 1.0);
    }

    #[test]
    fn multi_reference_takes_best() {
        let golds = vec![w("x y z"), w("a b c d")];
        let cand = w("a b c e");
        let r = score(&cand, &golds);
        assert_eq!(r.bleu, bleu(&cand, &golds[1], &BleuConfig::default()));
        assert!(r.bleu > 0.0 && r.bleu < 1.0);
    }

    #[test]
    fn empty_candidate_scores_zero() {
        let r = score(&Vec::<String>::new(), &[w("a b")]);
        assert_eq!(r, ScoreRecord::ZERO);
    }
}
