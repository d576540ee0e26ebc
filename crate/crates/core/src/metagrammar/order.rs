use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::MetaError;

/// Basic constituent order of a language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum WordOrder {
    Svo,
    Sov,
    Ovs,
}

impl WordOrder {
    pub const ALL: [WordOrder; 3] = [WordOrder::Svo, WordOrder::Sov, WordOrder::Ovs];
}

impl fmt::Display for WordOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WordOrder::Svo => "SVO",
            WordOrder::Sov => "SOV",
            WordOrder::Ovs => "OVS",
        })
    }
}

impl FromStr for WordOrder {
    type Err = MetaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "SVO" => Ok(WordOrder::Svo),
            "SOV" => Ok(WordOrder::Sov),
            "OVS" => Ok(WordOrder::Ovs),
            _ => Err(MetaError::BadSpec(format!("unknown word order {s:?}"))),
        }
    }
}

/// Child order of the three clause-level phrases for one side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhraseOrders {
    /// `TP -> NP_SUBJ TBAR` when true, `TBAR NP_SUBJ` otherwise.
    pub subject_first: bool,
    /// `TBAR -> T VP` when true, `VP T` otherwise.
    pub tense_first: bool,
    /// `VBAR -> V OBJ_PHRASE` when true, `OBJ_PHRASE V` otherwise.
    pub verb_first: bool,
}

pub fn word_order_map(order: WordOrder) -> PhraseOrders {
    match order {
        WordOrder::Svo => PhraseOrders {
            subject_first: true,
            tense_first: true,
            verb_first: true,
        },
        WordOrder::Sov => PhraseOrders {
            subject_first: true,
            tense_first: false,
            verb_first: false,
        },
        WordOrder::Ovs => PhraseOrders {
            subject_first: false,
            tense_first: false,
            verb_first: false,
        },
    }
}

impl PhraseOrders {
    pub(super) fn tp<'a>(&self, subj: &'a str, tbar: &'a str) -> [&'a str; 2] {
        pair(self.subject_first, subj, tbar)
    }

    pub(super) fn tbar<'a>(&self, t: &'a str, vp: &'a str) -> [&'a str; 2] {
        pair(self.tense_first, t, vp)
    }

    pub(super) fn vbar<'a>(&self, v: &'a str, obj: &'a str) -> [&'a str; 2] {
        pair(self.verb_first, v, obj)
    }

    /// Determiner placement in the bare DETBAR projection follows the
    /// verb/object head direction.
    pub(super) fn detbar<'a>(&self, det: &'a str, np: &'a str) -> [&'a str; 2] {
        pair(self.verb_first, det, np)
    }
}

fn pair<'a>(first: bool, a: &'a str, b: &'a str) -> [&'a str; 2] {
    if first {
        [a, b]
    } else {
        [b, a]
    }
}
