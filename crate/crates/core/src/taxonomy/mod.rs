//! Error labels for incorrect translations.
//!
//! Labels are not exclusive: one candidate can both omit a gold word and use
//! a source-language word in its place.
//!
//! ```
//! use scfgmt::demo;
//! use scfgmt::lexicon::ScriptId;
//! use scfgmt::taxonomy::{Classifier, ErrorLabel};
//!
//! let g = demo::reference_grammar();
//! let c = Classifier::for_grammar(&g, ScriptId::Latin);
//! let gold = vec!["vacfaq", "tuvrol", "zatpuj"];
//! let labels = c.classify(&["tuvrol", "vacfaq", "zatpuj"], &[gold]);
//! assert_eq!(labels.iter().collect::<Vec<_>>(), vec![ErrorLabel::WordOrder]);
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::grammar::{Side, SyncGrammar};
use crate::lexicon::{english_words, ScriptId, ScriptSpec};

/// Largest character edit distance at which an unknown word counts as a
/// misspelling of a target word.
pub const MISSPELLING_DISTANCE: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorLabel {
    /// Same set of words as the gold, in the wrong order.
    WordOrder,
    /// A target-language word that does not belong in this sentence.
    Recall,
    /// A word from neither language.
    Hallucination,
    /// A hallucinated word within a couple of edits of a target word.
    Misspelling,
    /// A source-language word left untranslated.
    SourceVocab,
    /// Codepoints outside the target script, or a diacritic script written
    /// without any diacritics.
    Orthography,
    /// An English word.
    EnglishVocab,
    /// Some gold word is missing.
    Omission,
    /// No answer could be extracted from the response.
    Unparseable,
}

impl ErrorLabel {
    pub const ALL: [ErrorLabel; 9] = [
        ErrorLabel::WordOrder,
        ErrorLabel::Recall,
        ErrorLabel::Hallucination,
        ErrorLabel::Misspelling,
        ErrorLabel::SourceVocab,
        ErrorLabel::Orthography,
        ErrorLabel::EnglishVocab,
        ErrorLabel::Omission,
        ErrorLabel::Unparseable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorLabel::WordOrder => "word_order",
            ErrorLabel::Recall => "recall",
            ErrorLabel::Hallucination => "hallucination",
            ErrorLabel::Misspelling => "misspelling",
            ErrorLabel::SourceVocab => "source_vocab",
            ErrorLabel::Orthography => "orthography",
            ErrorLabel::EnglishVocab => "english_vocab",
            ErrorLabel::Omission => "omission",
            ErrorLabel::Unparseable => "unparseable",
        }
    }
}

impl fmt::Display for ErrorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ErrorLabelSet(BTreeSet<ErrorLabel>);

impl ErrorLabelSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unparseable() -> Self {
        ErrorLabelSet(BTreeSet::from([ErrorLabel::Unparseable]))
    }

    pub fn insert(&mut self, label: ErrorLabel) {
        self.0.insert(label);
    }

    pub fn contains(&self, label: ErrorLabel) -> bool {
        self.0.contains(&label)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = ErrorLabel> + '_ {
        self.0.iter().copied()
    }
}

impl FromIterator<ErrorLabel> for ErrorLabelSet {
    fn from_iter<I: IntoIterator<Item = ErrorLabel>>(iter: I) -> Self {
        ErrorLabelSet(iter.into_iter().collect())
    }
}

/// Strips punctuation from both ends of a word.
pub fn trim_punctuation(word: &str) -> &str {
    word.trim_matches(|c: char| {
        c.is_ascii_punctuation() || matches!(c, '“' | '”' | '‘' | '’' | '«' | '»' | '…' | '–' | '—')
    })
}

fn normalize<S: AsRef<str>>(words: &[S]) -> Vec<&str> {
    words
        .iter()
        .map(|w| trim_punctuation(w.as_ref()))
        .filter(|w| !w.is_empty())
        .collect()
}

/// Everything the labels are defined against, apart from the golds.
#[derive(Debug, Clone)]
pub struct Classifier {
    pub src_vocab: HashSet<String>,
    pub tgt_vocab: HashSet<String>,
    pub script: &'static ScriptSpec,
    pub english: HashSet<String>,
}

impl Classifier {
    pub fn new(
        src_vocab: impl IntoIterator<Item = String>,
        tgt_vocab: impl IntoIterator<Item = String>,
        script: ScriptId,
    ) -> Classifier {
        Classifier {
            src_vocab: src_vocab.into_iter().collect(),
            tgt_vocab: tgt_vocab.into_iter().collect(),
            script: script.spec(),
            english: english_words().clone(),
        }
    }

    /// Uses the grammar's vocabularies and the embedded English list.
    pub fn for_grammar(g: &SyncGrammar, target_script: ScriptId) -> Classifier {
        Classifier::new(g.words(Side::Source), g.words(Side::Target), target_script)
    }

    fn is_english(&self, w: &str) -> bool {
        self.english.contains(&w.to_lowercase())
    }

    /// The gold with the smallest word edit distance to the candidate.
    /// Ties go to the earliest gold.
    pub fn anchor<'g, S: AsRef<str>, T: AsRef<str>>(&self, cand: &[S], golds: &'g [Vec<T>]) -> Option<&'g [T]> {
        let c = normalize(cand);
        golds
            .iter()
            .min_by_key(|g| strsim::generic_levenshtein(&c, &normalize(g)))
            .map(Vec::as_slice)
    }

    /// Labels a candidate. Candidates equal to a gold get the empty set.
    pub fn classify<S: AsRef<str>, T: AsRef<str>>(&self, cand: &[S], golds: &[Vec<T>]) -> ErrorLabelSet {
        let c = normalize(cand);
        let mut labels = ErrorLabelSet::new();
        let Some(anchor) = self.anchor(cand, golds) else {
            return labels;
        };
        if golds.iter().any(|g| normalize(g) == c) {
            return labels;
        }
        let gold = normalize(anchor);

        let cand_set: BTreeSet<&str> = c.iter().copied().collect();
        let gold_set: BTreeSet<&str> = gold.iter().copied().collect();
        if cand_set == gold_set {
            labels.insert(ErrorLabel::WordOrder);
        }

        for &w in &c {
            let in_src = self.src_vocab.contains(w);
            let in_tgt = self.tgt_vocab.contains(w);
            if in_tgt && !gold_set.contains(w) {
                labels.insert(ErrorLabel::Recall);
            }
            if !in_src && !in_tgt {
                labels.insert(ErrorLabel::Hallucination);
                if self
                    .tgt_vocab
                    .iter()
                    .any(|t| strsim::levenshtein(w, t) <= MISSPELLING_DISTANCE)
                {
                    labels.insert(ErrorLabel::Misspelling);
                }
            }
            if in_src && !in_tgt {
                labels.insert(ErrorLabel::SourceVocab);
            }
            if !self.script.covers(w) {
                labels.insert(ErrorLabel::Orthography);
            }
            if !in_tgt && self.is_english(w) {
                labels.insert(ErrorLabel::EnglishVocab);
            }
        }
        if self.script.has_diacritics()
            && !c.is_empty()
            && !c.iter().flat_map(|w| w.chars()).any(|ch| self.script.is_diacritic(ch))
        {
            labels.insert(ErrorLabel::Orthography);
        }

        let mut remaining: HashMap<&str, isize> = HashMap::new();
        for &w in &gold {
            *remaining.entry(w).or_insert(0) += 1;
        }
        for &w in &c {
            *remaining.entry(w).or_insert(0) -= 1;
        }
        if remaining.values().any(|&n| n > 0) {
            labels.insert(ErrorLabel::Omission);
        }
        labels
    }
}

/// Label counts for one group of incorrect candidates.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub n: usize,
    pub counts: BTreeMap<ErrorLabel, usize>,
    /// Incorrect candidates that got no label at all.
    pub unlabeled: usize,
}

impl LabelCounts {
    pub fn add(&mut self, labels: &ErrorLabelSet) {
        self.n += 1;
        if labels.is_empty() {
            self.unlabeled += 1;
        }
        for l in labels.iter() {
            *self.counts.entry(l).or_insert(0) += 1;
        }
    }

    /// Share of candidates carrying `label`. Rates over labels can sum to
    /// more than 1.
    pub fn rate(&self, label: ErrorLabel) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.counts.get(&label).copied().unwrap_or(0) as f64 / self.n as f64
    }

    pub fn unlabeled_rate(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.unlabeled as f64 / self.n as f64
        }
    }
}

/// Per-group label distributions, keyed by whatever the caller groups on.
pub fn aggregate<K: Ord, I: IntoIterator<Item = (K, ErrorLabelSet)>>(items: I) -> BTreeMap<K, LabelCounts> {
    let mut out: BTreeMap<K, LabelCounts> = BTreeMap::new();
    for (k, labels) in items {
        out.entry(k).or_default().add(&labels);
    }
    out
}
