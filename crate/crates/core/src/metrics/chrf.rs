use std::collections::HashMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChrfConfig {
    pub beta: f64,
    pub char_order: usize,
    pub word_order: usize,
}

impl Default for ChrfConfig {
    fn default() -> Self {
        ChrfConfig {
            beta: 2.0,
            char_order: 6,
            word_order: 2,
        }
    }
}

const PUNCTUATION: &str = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";

/// Splits off one leading or trailing punctuation mark, as chrF++ does
/// before counting word n-grams.
fn word_tokens(sentence: &str) -> Vec<String> {
    let mut out = Vec::new();
    for w in sentence.split_whitespace() {
        let chars: Vec<char> = w.chars().collect();
        if chars.len() == 1 {
            out.push(w.to_string());
        } else if PUNCTUATION.contains(chars[chars.len() - 1]) {
            out.push(chars[..chars.len() - 1].iter().collect());
            out.push(chars[chars.len() - 1].to_string());
        } else if PUNCTUATION.contains(chars[0]) {
            out.push(chars[0].to_string());
            out.push(chars[1..].iter().collect());
        } else {
            out.push(w.to_string());
        }
    }
    out
}

fn char_ngrams(chars: &[char], n: usize) -> HashMap<&[char], u64> {
    let mut m = HashMap::new();
    if chars.len() >= n {
        for win in chars.windows(n) {
            *m.entry(win).or_insert(0) += 1;
        }
    }
    m
}

fn word_ngrams(words: &[String], n: usize) -> HashMap<&[String], u64> {
    let mut m = HashMap::new();
    if words.len() >= n {
        for win in words.windows(n) {
            *m.entry(win).or_insert(0) += 1;
        }
    }
    m
}

/// `[hyp, ref, match]` for one order.
fn match_stats<K: std::hash::Hash + Eq>(hyp: &HashMap<K, u64>, reference: &HashMap<K, u64>) -> [u64; 3] {
    let mut hyp_count = 0;
    let mut matches = 0;
    for (g, c) in hyp {
        hyp_count += c;
        if let Some(r) = reference.get(g) {
            matches += c.min(r);
        }
    }
    let ref_count = reference.values().sum();
    [if reference.is_empty() { 0 } else { hyp_count }, ref_count, matches]
}

fn f_score(stats: &[[u64; 3]], beta: f64) -> f64 {
    let factor = beta * beta;
    let (mut avg_prec, mut avg_rec, mut effective) = (0.0, 0.0, 0usize);
    for &[hyp, reference, matches] in stats {
        if hyp > 0 && reference > 0 {
            avg_prec += matches as f64 / hyp as f64;
            avg_rec += matches as f64 / reference as f64;
            effective += 1;
        }
    }
    if effective == 0 {
        return 0.0;
    }
    avg_prec /= effective as f64;
    avg_rec /= effective as f64;
    if avg_prec + avg_rec == 0.0 {
        return 0.0;
    }
    (1.0 + factor) * avg_prec * avg_rec / (factor * avg_prec + avg_rec)
}

/// Sentence-level chrF++ (chrF when `word_order` is 0).
///
/// Precision and recall are averaged over the character n-gram orders
/// (whitespace removed) and word n-gram orders that occur in both strings,
/// then combined into an F-beta score.
pub fn chrfpp<S: AsRef<str>, T: AsRef<str>>(cand: &[S], gold: &[T], cfg: &ChrfConfig) -> f64 {
    let hyp = join(cand);
    let reference = join(gold);
    let hyp_chars: Vec<char> = hyp.chars().filter(|c| !c.is_whitespace()).collect();
    let ref_chars: Vec<char> = reference.chars().filter(|c| !c.is_whitespace()).collect();
    let mut stats = Vec::with_capacity(cfg.char_order + cfg.word_order);
    for n in 1..=cfg.char_order {
        stats.push(match_stats(&char_ngrams(&hyp_chars, n), &char_ngrams(&ref_chars, n)));
    }
    let hyp_words = word_tokens(&hyp);
    let ref_words = word_tokens(&reference);
    for n in 1..=cfg.word_order {
        stats.push(match_stats(&word_ngrams(&hyp_words, n), &word_ngrams(&ref_words, n)));
    }
    f_score(&stats, cfg.beta).clamp(0.0, 1.0)
}

fn join<S: AsRef<str>>(words: &[S]) -> String {
    words.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" ")
}
