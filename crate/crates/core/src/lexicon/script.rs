use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{LexiconError, WordForm};

/// The orthographies a language can be written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScriptId {
    Latin,
    LatinDiacritics,
    Cyrillic,
    Hebrew,
    HebrewPointed,
}

impl ScriptId {
    pub const ALL: [ScriptId; 5] = [
        ScriptId::Latin,
        ScriptId::LatinDiacritics,
        ScriptId::Cyrillic,
        ScriptId::Hebrew,
        ScriptId::HebrewPointed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScriptId::Latin => "latin",
            ScriptId::LatinDiacritics => "latin_diacritics",
            ScriptId::Cyrillic => "cyrillic",
            ScriptId::Hebrew => "hebrew",
            ScriptId::HebrewPointed => "hebrew_pointed",
        }
    }

    pub fn spec(self) -> &'static ScriptSpec {
        &SPECS[self as usize]
    }
}

impl fmt::Display for ScriptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScriptId {
    type Err = LexiconError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScriptId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| LexiconError::UnknownScript(s.to_string()))
    }
}

/// Codepoint ranges that make up a script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptSpec {
    pub id: ScriptId,
    pub base_ranges: &'static [RangeInclusive<char>],
    /// Empty for scripts written without diacritics.
    pub diacritic_ranges: &'static [RangeInclusive<char>],
}

const LATIN_BASE: &[RangeInclusive<char>] = &['A'..='Z', 'a'..='z'];
const COMBINING: &[RangeInclusive<char>] = &['\u{0300}'..='\u{036F}'];
const CYRILLIC_BASE: &[RangeInclusive<char>] = &['\u{0400}'..='\u{04FF}'];
const HEBREW_BASE: &[RangeInclusive<char>] = &['\u{05D0}'..='\u{05EA}'];
const HEBREW_POINTS: &[RangeInclusive<char>] = &['\u{05B0}'..='\u{05C7}'];

static SPECS: [ScriptSpec; 5] = [
    ScriptSpec {
        id: ScriptId::Latin,
        base_ranges: LATIN_BASE,
        diacritic_ranges: &[],
    },
    ScriptSpec {
        id: ScriptId::LatinDiacritics,
        base_ranges: LATIN_BASE,
        diacritic_ranges: COMBINING,
    },
    ScriptSpec {
        id: ScriptId::Cyrillic,
        base_ranges: CYRILLIC_BASE,
        diacritic_ranges: &[],
    },
    ScriptSpec {
        id: ScriptId::Hebrew,
        base_ranges: HEBREW_BASE,
        diacritic_ranges: &[],
    },
    ScriptSpec {
        id: ScriptId::HebrewPointed,
        base_ranges: HEBREW_BASE,
        diacritic_ranges: HEBREW_POINTS,
    },
];

impl ScriptSpec {
    pub fn is_base(&self, c: char) -> bool {
        self.base_ranges.iter().any(|r| r.contains(&c))
    }

    pub fn is_diacritic(&self, c: char) -> bool {
        self.diacritic_ranges.iter().any(|r| r.contains(&c))
    }

    pub fn has_diacritics(&self) -> bool {
        !self.diacritic_ranges.is_empty()
    }

    /// True iff every codepoint lies in one of the script's ranges.
    pub fn covers(&self, word: &str) -> bool {
        word.chars().all(|c| self.is_base(c) || self.is_diacritic(c))
    }
}

/// Scripts consistent with `word`.
///
/// A script with diacritics only claims words that carry at least one of its
/// marks, so plain Latin stays `{Latin}` and unpointed Hebrew stays
/// `{Hebrew}`. Words mixing scripts get the empty set.
pub fn script_of(word: &str) -> BTreeSet<ScriptId> {
    ScriptId::ALL
        .into_iter()
        .filter(|id| {
            let spec = id.spec();
            let marked = word.chars().any(|c| spec.is_diacritic(c));
            !word.is_empty() && spec.covers(word) && marked == spec.has_diacritics()
        })
        .collect()
}

/// Letter-to-string tables for rendering Latin skeletons in each script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptTable {
    pub version: u32,
    maps: HashMap<ScriptId, HashMap<char, String>>,
}

#[derive(Deserialize)]
struct TableFile {
    version: u32,
    scripts: HashMap<String, HashMap<String, String>>,
}

const BUILTIN_TABLE: &str = include_str!("../../data/script_tables.json");

impl ScriptTable {
    /// The tables shipped with the crate.
    pub fn builtin() -> &'static ScriptTable {
        static TABLE: OnceLock<ScriptTable> = OnceLock::new();
        TABLE.get_or_init(|| ScriptTable::parse(BUILTIN_TABLE, None).expect("builtin script table"))
    }

    /// Loads a table file. Scripts absent from the file fall back to the
    /// builtin tables; every entry is checked against the script's ranges.
    pub fn from_json(text: &str) -> Result<ScriptTable, LexiconError> {
        ScriptTable::parse(text, Some(ScriptTable::builtin()))
    }

    fn parse(text: &str, fallback: Option<&ScriptTable>) -> Result<ScriptTable, LexiconError> {
        let file: TableFile = serde_json::from_str(text).map_err(|e| LexiconError::BadTable(e.to_string()))?;
        let mut maps = HashMap::new();
        for (name, entries) in file.scripts {
            let id: ScriptId = name.parse()?;
            let spec = id.spec();
            let mut map = HashMap::new();
            let mut outputs = HashSet::new();
            for (k, v) in entries {
                let mut ks = k.chars();
                let (Some(letter), None) = (ks.next(), ks.next()) else {
                    return Err(LexiconError::BadTable(format!("{name}: key {k:?} is not one letter")));
                };
                if !spec.covers(&v) {
                    return Err(LexiconError::BadTable(format!(
                        "{name}: {k:?} maps outside the script's ranges"
                    )));
                }
                let is_vowel = super::VOWELS.contains(&letter);
                // Consonants must stay distinguishable; unpointed vowels may vanish.
                if !is_vowel && !outputs.insert(v.clone()) {
                    return Err(LexiconError::BadTable(format!("{name}: {v:?} is used twice")));
                }
                map.insert(letter, v);
            }
            for c in super::CONSONANTS.iter().chain(super::VOWELS) {
                if !map.contains_key(c) {
                    return Err(LexiconError::BadTable(format!("{name}: no entry for {c:?}")));
                }
            }
            maps.insert(id, map);
        }
        if maps.is_empty() {
            return Err(LexiconError::BadTable("no scripts".into()));
        }
        if let Some(builtin) = fallback {
            for (id, map) in &builtin.maps {
                maps.entry(*id).or_insert_with(|| map.clone());
            }
        }
        Ok(ScriptTable {
            version: file.version,
            maps,
        })
    }

    pub fn transliterate(&self, skeleton: &str, script: ScriptId) -> Result<WordForm, LexiconError> {
        let mut rendered = String::new();
        for c in skeleton.chars() {
            if !super::is_inventory_letter(c) {
                return Err(LexiconError::OutsideInventory(c));
            }
            match self.maps.get(&script) {
                Some(map) => rendered.push_str(map.get(&c).ok_or(LexiconError::OutsideInventory(c))?),
                None if script == ScriptId::Latin => rendered.push(c),
                None => return Err(LexiconError::UnknownScript(script.to_string())),
            }
        }
        Ok(WordForm {
            latin_skeleton: skeleton.to_string(),
            rendered,
        })
    }
}

/// Renders a Latin skeleton with the builtin tables.
pub fn transliterate(skeleton: &str, script: ScriptId) -> Result<WordForm, LexiconError> {
    ScriptTable::builtin().transliterate(skeleton, script)
}
