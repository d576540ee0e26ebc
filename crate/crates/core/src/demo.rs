//! Small grammars used in docs, tests and the CLI.

use crate::grammar::{parse_grammar_text, SyncGrammar};
use crate::metagrammar::{agreement_fragment_rules, SuffixTable};

/// English/Japanese toy grammar: "I open the box" ~ "watashi wa hako wo akemasu".
pub const ENGLISH_JAPANESE: &str = "\
S -> <NP VP, NP VP>
VP -> <VB NP, NP VB>
NP -> <'I', 'watashi wa'>
NP -> <'the box', 'hako wo'>
VB -> <'open', 'akemasu'>
";

/// A 57-rule grammar in the meta-grammar's shape (SVO source, OVS target,
/// no agreement, Latin script).
pub const REFERENCE_GRAMMAR: &str = include_str!("../data/reference_grammar.scfg");

pub fn english_japanese() -> SyncGrammar {
    parse_grammar_text(ENGLISH_JAPANESE).expect("toy grammar parses")
}

pub fn reference_grammar() -> SyncGrammar {
    parse_grammar_text(REFERENCE_GRAMMAR).expect("reference grammar parses")
}

/// Pronoun + verb fragment showing the four agreement paradigms.
///
/// Source pronouns are `na` (1sg), `sa` (3sg), `ran` (3pl), `ma` (1pl) and the
/// verb stem is `lam`; target pronouns are `ni`, `su`, `ren`, `mu` with stem
/// `tor`. When a side agrees, its verb takes the suffixes `-mi/-su/-sar/-mar`
/// (source) or `-ik/-o/-on/-et` (target).
pub fn agreement_fragment(src_agr: bool, tgt_agr: bool) -> SyncGrammar {
    let src = SuffixTable::new(["mi", "mar", "su", "sar"]);
    let tgt = SuffixTable::new(["ik", "et", "o", "on"]);
    let rules = agreement_fragment_rules(
        [("na", "ni"), ("ma", "mu"), ("sa", "su"), ("ran", "ren")],
        ("lam", "tor"),
        src_agr.then_some(&src),
        tgt_agr.then_some(&tgt),
    );
    SyncGrammar::new(rules).expect("fragment is valid")
}
