//! Pseudo-word vocabularies and their renderings in several scripts.

mod script;

use std::collections::HashSet;
use std::sync::OnceLock;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use script::{script_of, transliterate, ScriptId, ScriptSpec, ScriptTable};

pub const CONSONANTS: &[char] = &[
    'b', 'c', 'd', 'f', 'g', 'h', 'j', 'k', 'l', 'm', 'n', 'p', 'q', 'r', 's', 't', 'v', 'w', 'x', 'y', 'z',
];
pub const VOWELS: &[char] = &['a', 'e', 'i', 'o', 'u'];

pub const MIN_SYLLABLES: usize = 2;
pub const MAX_SYLLABLES: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LexiconError {
    #[error("could not find {wanted} novel words (found {found})")]
    Exhausted { wanted: usize, found: usize },
    #[error("character {0:?} is outside the letter inventory")]
    OutsideInventory(char),
    #[error("unknown script {0:?}")]
    UnknownScript(String),
    #[error("bad script table: {0}")]
    BadTable(String),
}

/// A vocabulary word: its Latin CVC skeleton and how it is written.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WordForm {
    pub latin_skeleton: String,
    pub rendered: String,
}

pub(crate) fn is_inventory_letter(c: char) -> bool {
    CONSONANTS.contains(&c) || VOWELS.contains(&c)
}

/// True iff `s` is two to five CVC syllables from the default inventories.
pub fn is_skeleton(s: &str) -> bool {
    let b = s.as_bytes();
    if !b.len().is_multiple_of(3) || !(MIN_SYLLABLES..=MAX_SYLLABLES).contains(&(b.len() / 3)) {
        return false;
    }
    b.chunks(3).all(|syl| {
        let c = |x: u8| CONSONANTS.contains(&(x as char));
        c(syl[0]) && VOWELS.contains(&(syl[1] as char)) && c(syl[2])
    })
}

/// The embedded English wordlist, used to keep generated words novel and to
/// spot English leaking into translations.
pub fn english_words() -> &'static HashSet<String> {
    static WORDS: OnceLock<HashSet<String>> = OnceLock::new();
    WORDS.get_or_init(|| {
        include_str!("../../data/english_words.txt")
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect()
    })
}

pub fn is_english(word: &str) -> bool {
    english_words().contains(&word.to_lowercase())
}

fn random_skeleton(rng: &mut ChaCha8Rng) -> String {
    let syllables = rng.gen_range(MIN_SYLLABLES..=MAX_SYLLABLES);
    let mut s = String::with_capacity(syllables * 3);
    for _ in 0..syllables {
        s.push(CONSONANTS[rng.gen_range(0..CONSONANTS.len())]);
        s.push(VOWELS[rng.gen_range(0..VOWELS.len())]);
        s.push(CONSONANTS[rng.gen_range(0..CONSONANTS.len())]);
    }
    s
}

/// Draws novel Latin-script words.
///
/// Returns `count` distinct skeletons, none in `forbidden` and none in the
/// English wordlist. The same arguments always give the same list.
pub fn generate_vocab(count: usize, seed: u64, forbidden: &HashSet<String>) -> Result<Vec<WordForm>, LexiconError> {
    VocabBuilder::new(seed).forbid(forbidden).build(count)
}

/// Vocabulary generation with a target script. Candidates whose rendering
/// collides with an earlier word (unpointed Hebrew drops vowels) are skipped,
/// so the rendered words are distinct too.
pub struct VocabBuilder<'a> {
    seed: u64,
    script: ScriptId,
    table: &'a ScriptTable,
    forbidden: HashSet<String>,
    max_attempts_per_word: usize,
}

impl<'a> VocabBuilder<'a> {
    pub fn new(seed: u64) -> VocabBuilder<'static> {
        VocabBuilder {
            seed,
            script: ScriptId::Latin,
            table: ScriptTable::builtin(),
            forbidden: HashSet::new(),
            max_attempts_per_word: 1000,
        }
    }

    pub fn script(mut self, script: ScriptId) -> Self {
        self.script = script;
        self
    }

    pub fn table<'b>(self, table: &'b ScriptTable) -> VocabBuilder<'b> {
        VocabBuilder {
            seed: self.seed,
            script: self.script,
            table,
            forbidden: self.forbidden,
            max_attempts_per_word: self.max_attempts_per_word,
        }
    }

    pub fn forbid<'s>(mut self, words: impl IntoIterator<Item = &'s String>) -> Self {
        self.forbidden.extend(words.into_iter().cloned());
        self
    }

    pub fn build(self, count: usize) -> Result<Vec<WordForm>, LexiconError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let english = english_words();
        let mut skeletons = HashSet::new();
        let mut renderings = HashSet::new();
        let mut out = Vec::with_capacity(count);
        let mut misses = 0;
        while out.len() < count {
            let s = random_skeleton(&mut rng);
            let fresh = !self.forbidden.contains(&s) && !english.contains(&s) && !skeletons.contains(&s);
            let form = if fresh {
                Some(self.table.transliterate(&s, self.script)?)
            } else {
                None
            };
            match form {
                Some(f) if renderings.insert(f.rendered.clone()) => {
                    skeletons.insert(s);
                    out.push(f);
                    misses = 0;
                }
                _ => {
                    misses += 1;
                    if misses > self.max_attempts_per_word {
                        return Err(LexiconError::Exhausted {
                            wanted: count,
                            found: out.len(),
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_have_cvc_shape() {
        let words = generate_vocab(50, 7, &HashSet::new()).unwrap();
        assert_eq!(words.len(), 50);
        for w in &words {
            assert!(is_skeleton(&w.latin_skeleton), "{}", w.latin_skeleton);
            assert_eq!(w.rendered, w.latin_skeleton);
        }
        let distinct: HashSet<_> = words.iter().map(|w| &w.latin_skeleton).collect();
        assert_eq!(distinct.len(), 50);
    }

    #[test]
    fn same_seed_same_list() {
        let a = generate_vocab(20, 99, &HashSet::new()).unwrap();
        let b = generate_vocab(20, 99, &HashSet::new()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_vocab(20, 100, &HashSet::new()).unwrap());
    }

    #[test]
    fn forbidden_words_are_skipped() {
        let first = generate_vocab(1, 5, &HashSet::new()).unwrap();
        let forbidden = HashSet::from([first[0].latin_skeleton.clone()]);
        let again = generate_vocab(1, 5, &forbidden).unwrap();
        assert_ne!(again[0], first[0]);
    }

    #[test]
    fn never_english() {
        let words = generate_vocab(2000, 1, &HashSet::new()).unwrap();
        assert!(words.iter().all(|w| !is_english(&w.latin_skeleton)));
        assert!(is_english("better"));
        assert!(is_english("The"));
    }

    #[test]
    fn hebrew_renderings_are_distinct() {
        let words = VocabBuilder::new(3).script(ScriptId::Hebrew).build(500).unwrap();
        let rendered: HashSet<_> = words.iter().map(|w| &w.rendered).collect();
        assert_eq!(rendered.len(), 500);
    }

    #[test]
    fn skeleton_check() {
        assert!(is_skeleton("rofxew"));
        assert!(is_skeleton("vejdetwukwesfef"));
        assert!(!is_skeleton("rof"));
        assert!(!is_skeleton("roafew"));
        assert!(!is_skeleton("rofxewrofxewrofxew"));
    }
}
