use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::grammar::SyncRule;
use crate::lexicon::{CONSONANTS, VOWELS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Person {
    #[serde(rename = "1")]
    First,
    #[serde(rename = "3")]
    Third,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Number {
    Sg,
    Pl,
}

/// One person/number cell of the agreement paradigm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AgreementFeatures {
    pub person: Person,
    pub number: Number,
}

impl AgreementFeatures {
    pub const ALL: [AgreementFeatures; 4] = [
        AgreementFeatures {
            person: Person::First,
            number: Number::Sg,
        },
        AgreementFeatures {
            person: Person::First,
            number: Number::Pl,
        },
        AgreementFeatures {
            person: Person::Third,
            number: Number::Sg,
        },
        AgreementFeatures {
            person: Person::Third,
            number: Number::Pl,
        },
    ];

    /// Common-noun and proper-name subjects.
    pub const THIRD_SG: AgreementFeatures = AgreementFeatures {
        person: Person::Third,
        number: Number::Sg,
    };

    pub fn index(self) -> usize {
        match (self.person, self.number) {
            (Person::First, Number::Sg) => 0,
            (Person::First, Number::Pl) => 1,
            (Person::Third, Number::Sg) => 2,
            (Person::Third, Number::Pl) => 3,
        }
    }

    /// Short tag such as `3sg`, used to index nonterminal names.
    pub fn tag(self) -> &'static str {
        ["1sg", "1pl", "3sg", "3pl"][self.index()]
    }

    /// `TP` becomes `TP_3sg`.
    pub fn index_name(self, base: &str) -> String {
        format!("{base}_{}", self.tag())
    }

    pub fn from_tag(tag: &str) -> Option<AgreementFeatures> {
        AgreementFeatures::ALL.into_iter().find(|f| f.tag() == tag)
    }
}

impl fmt::Display for AgreementFeatures {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Splits a feature-indexed name like `V_3pl` into `("V", 3pl)`.
pub fn split_feature(name: &str) -> Option<(&str, AgreementFeatures)> {
    let (base, tag) = name.rsplit_once('_')?;
    Some((base, AgreementFeatures::from_tag(tag)?))
}

/// Verb suffixes for the four cells of one language, in Latin letters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuffixTable {
    /// Indexed by [`AgreementFeatures::index`].
    pub suffixes: [String; 4],
}

impl SuffixTable {
    pub fn new(suffixes: [&str; 4]) -> SuffixTable {
        SuffixTable {
            suffixes: suffixes.map(str::to_string),
        }
    }

    /// Four vowel-consonant suffixes whose consonants are all different, so
    /// inflected forms stay distinct even in scripts that drop vowels.
    pub fn generate<R: Rng>(rng: &mut R) -> SuffixTable {
        let consonants: Vec<char> = CONSONANTS.choose_multiple(rng, 4).copied().collect();
        let suffixes = [0, 1, 2, 3].map(|i| {
            let v = VOWELS[rng.gen_range(0..VOWELS.len())];
            format!("{v}{}", consonants[i])
        });
        SuffixTable { suffixes }
    }

    pub fn get(&self, cell: AgreementFeatures) -> &str {
        &self.suffixes[cell.index()]
    }

    pub fn inflect(&self, stem: &str, cell: AgreementFeatures) -> String {
        format!("{stem}{}", self.get(cell))
    }
}

/// Feature-split verb rules for one lexeme: one `V_<cell>` rule per cell.
///
/// An agreeing side appends the cell's suffix to its stem; a side without a
/// suffix table uses the bare stem in every cell.
pub fn apply_agreement(
    src_stem: &str,
    tgt_stem: &str,
    src: Option<&SuffixTable>,
    tgt: Option<&SuffixTable>,
) -> Vec<(AgreementFeatures, String, String)> {
    AgreementFeatures::ALL
        .into_iter()
        .map(|cell| {
            let s = src.map_or_else(|| src_stem.to_string(), |t| t.inflect(src_stem, cell));
            let t = tgt.map_or_else(|| tgt_stem.to_string(), |t| t.inflect(tgt_stem, cell));
            (cell, s, t)
        })
        .collect()
}

/// A pronoun-verb clause fragment: `S -> TP_f`, `TP_f -> PRON_f V_f`.
pub fn agreement_fragment_rules(
    pronouns: [(&str, &str); 4],
    stem: (&str, &str),
    src: Option<&SuffixTable>,
    tgt: Option<&SuffixTable>,
) -> Vec<SyncRule> {
    let cells = AgreementFeatures::ALL;
    let mut rules = Vec::new();
    for f in cells {
        let tp = f.index_name("TP");
        rules.push(SyncRule::nonlexical("S", &[&tp], &[&tp]).unwrap());
    }
    for f in cells {
        let (tp, pron, v) = (f.index_name("TP"), f.index_name("PRON"), f.index_name("V"));
        rules.push(SyncRule::nonlexical(tp, &[&pron, &v], &[&pron, &v]).unwrap());
    }
    for f in cells {
        let (s, t) = pronouns[f.index()];
        rules.push(SyncRule::lexical(f.index_name("PRON"), s, t).unwrap());
    }
    for (f, s, t) in apply_agreement(stem.0, stem.1, src, tgt) {
        rules.push(SyncRule::lexical(f.index_name("V"), s, t).unwrap());
    }
    rules
}
