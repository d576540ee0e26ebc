//! Synchronous context-free grammars.
//!
//! A [`SyncGrammar`] is an ordered list of [`SyncRule`]s. Each rule expands a
//! nonterminal simultaneously in a source and a target language. Rules are
//! either *non-lexical* (both sides are nonterminal sequences with the same
//! multiset of names) or *lexical* (both sides are terminal sequences).
//!
//! Terminals whose surface begins with `∅` are null words: they take part in
//! derivations but never show up in surface strings.

mod cfg;
mod text;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cfg::{Cfg, CfgRule};
pub use text::{parse_grammar_text, serialize_grammar};

/// The null symbol prefix, U+2205.
pub const NULL_SYMBOL: char = '\u{2205}';

/// Name of the distinguished start symbol.
pub const START_SYMBOL: &str = "S";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid nonterminal name {0:?}")]
    BadNonterminal(String),
    #[error("rule for {lhs}: {message}")]
    BadRule { lhs: String, message: String },
    #[error("nonterminal {0} is used but has no rules")]
    Dangling(String),
    #[error("no rule expands the start symbol S")]
    MissingStart,
}

/// Which half of a synchronous rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Source,
    Target,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Nonterminal(String),
    /// A terminal surface; may hold several space-separated words.
    Terminal(String),
}

impl Symbol {
    pub fn nonterminal(name: impl Into<String>) -> Result<Self, GrammarError> {
        let name = name.into();
        if !is_valid_nonterminal(&name) {
            return Err(GrammarError::BadNonterminal(name));
        }
        Ok(Symbol::Nonterminal(name))
    }

    pub fn terminal(surface: impl Into<String>) -> Self {
        Symbol::Terminal(surface.into())
    }

    pub fn is_nonterminal(&self) -> bool {
        matches!(self, Symbol::Nonterminal(_))
    }

    /// True iff this is a terminal whose surface begins with `∅`.
    pub fn is_null(&self) -> bool {
        matches!(self, Symbol::Terminal(s) if s.starts_with(NULL_SYMBOL))
    }

    pub fn name(&self) -> &str {
        match self {
            Symbol::Nonterminal(s) | Symbol::Terminal(s) => s,
        }
    }

    /// Surface words contributed by this symbol. Null terminals and
    /// nonterminals contribute none.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        let surface = match self {
            Symbol::Terminal(s) if !self.is_null() => s.as_str(),
            _ => "",
        };
        surface.split_whitespace()
    }
}

pub(crate) fn is_valid_nonterminal(name: &str) -> bool {
    !name.is_empty()
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '<' | '>' | '\'' | ','))
}

/// One synchronous production `lhs -> <src, tgt>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SyncRule {
    lhs: String,
    src: Vec<Symbol>,
    tgt: Vec<Symbol>,
    /// `alignment[i]` is the position, among the target nonterminals, of the
    /// i-th source nonterminal.
    alignment: Vec<usize>,
    /// Written as `< A, A >` rather than `<A, A>`.
    padded: bool,
}

impl SyncRule {
    /// Builds a rule, checking the side shapes and computing the alignment.
    ///
    /// Nonterminals are aligned by name. A name may occur at most once per
    /// side, so the alignment is always unambiguous.
    pub fn new(lhs: impl Into<String>, src: Vec<Symbol>, tgt: Vec<Symbol>) -> Result<Self, GrammarError> {
        let lhs = lhs.into();
        if !is_valid_nonterminal(&lhs) {
            return Err(GrammarError::BadNonterminal(lhs));
        }
        let bad = |message: &str| GrammarError::BadRule {
            lhs: lhs.clone(),
            message: message.to_string(),
        };
        if src.is_empty() || tgt.is_empty() {
            return Err(bad("empty right-hand side"));
        }
        for side in [&src, &tgt] {
            let nts = side.iter().filter(|s| s.is_nonterminal()).count();
            if nts != 0 && nts != side.len() {
                return Err(bad("mixes terminals and nonterminals on one side"));
            }
            for sym in side.iter() {
                if let Symbol::Nonterminal(n) = sym {
                    if !is_valid_nonterminal(n) {
                        return Err(GrammarError::BadNonterminal(n.clone()));
                    }
                }
            }
        }
        let src_lexical = !src[0].is_nonterminal();
        let tgt_lexical = !tgt[0].is_nonterminal();
        if src_lexical != tgt_lexical {
            return Err(bad("one side is lexical and the other is not"));
        }

        let mut alignment = Vec::new();
        if !src_lexical {
            let mut tgt_pos: HashMap<&str, usize> = HashMap::new();
            for (i, sym) in tgt.iter().enumerate() {
                if tgt_pos.insert(sym.name(), i).is_some() {
                    return Err(bad("duplicate nonterminal on target side"));
                }
            }
            let mut seen = HashSet::new();
            for sym in &src {
                if !seen.insert(sym.name()) {
                    return Err(bad("duplicate nonterminal on source side"));
                }
                match tgt_pos.get(sym.name()) {
                    Some(&j) => alignment.push(j),
                    None => return Err(bad("sides have different nonterminals")),
                }
            }
            if src.len() != tgt.len() {
                return Err(bad("sides have different nonterminals"));
            }
        }
        Ok(SyncRule {
            lhs,
            src,
            tgt,
            alignment,
            padded: false,
        })
    }

    /// A lexical rule with one terminal per side.
    pub fn lexical(
        lhs: impl Into<String>,
        src: impl Into<String>,
        tgt: impl Into<String>,
    ) -> Result<Self, GrammarError> {
        SyncRule::new(lhs, vec![Symbol::terminal(src)], vec![Symbol::terminal(tgt)])
    }

    /// A non-lexical rule from nonterminal names.
    pub fn nonlexical(lhs: impl Into<String>, src: &[&str], tgt: &[&str]) -> Result<Self, GrammarError> {
        let conv = |names: &[&str]| -> Result<Vec<Symbol>, GrammarError> {
            names.iter().map(|n| Symbol::nonterminal(*n)).collect()
        };
        SyncRule::new(lhs, conv(src)?, conv(tgt)?)
    }

    /// Marks the rule to be written with inner padding, `< A, A >`.
    pub fn with_padding(mut self, padded: bool) -> Self {
        self.padded = padded;
        self
    }

    pub fn lhs(&self) -> &str {
        &self.lhs
    }

    pub fn side(&self, side: Side) -> &[Symbol] {
        match side {
            Side::Source => &self.src,
            Side::Target => &self.tgt,
        }
    }

    pub fn src(&self) -> &[Symbol] {
        &self.src
    }

    pub fn tgt(&self) -> &[Symbol] {
        &self.tgt
    }

    /// Target position of each source nonterminal, in source order.
    pub fn alignment(&self) -> &[usize] {
        &self.alignment
    }

    pub fn is_padded(&self) -> bool {
        self.padded
    }

    pub fn is_lexical(&self) -> bool {
        !self.src[0].is_nonterminal()
    }

    /// Surface words of one side of a lexical rule, nulls removed.
    pub fn words(&self, side: Side) -> Vec<&str> {
        self.side(side).iter().flat_map(Symbol::words).collect()
    }

    /// Nonterminal names on the right-hand side, in source order.
    pub fn children(&self) -> impl Iterator<Item = &str> {
        self.src.iter().filter(|s| s.is_nonterminal()).map(Symbol::name)
    }
}

impl fmt::Display for SyncRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pad = if self.padded { " " } else { "" };
        write!(
            f,
            "{} -> <{pad}{}, {}{pad}>",
            self.lhs,
            text::format_side(&self.src),
            text::format_side(&self.tgt)
        )
    }
}

/// A validated synchronous grammar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncGrammar {
    rules: Vec<SyncRule>,
    src_vocab: BTreeSet<String>,
    tgt_vocab: BTreeSet<String>,
}

impl SyncGrammar {
    /// Validates and wraps a rule list.
    ///
    /// The start symbol must have a rule, and every nonterminal reachable from
    /// it must have at least one rule. Unreachable rules are kept as they are.
    pub fn new(rules: Vec<SyncRule>) -> Result<Self, GrammarError> {
        let mut by_lhs: HashMap<&str, Vec<&SyncRule>> = HashMap::new();
        for r in &rules {
            by_lhs.entry(r.lhs()).or_default().push(r);
        }
        if !by_lhs.contains_key(START_SYMBOL) {
            return Err(GrammarError::MissingStart);
        }
        let mut seen: HashSet<&str> = HashSet::from([START_SYMBOL]);
        let mut stack = vec![START_SYMBOL];
        while let Some(nt) = stack.pop() {
            let Some(rs) = by_lhs.get(nt) else {
                return Err(GrammarError::Dangling(nt.to_string()));
            };
            for r in rs {
                for child in r.children() {
                    if seen.insert(child) {
                        stack.push(child);
                    }
                }
            }
        }

        let mut src_vocab = BTreeSet::new();
        let mut tgt_vocab = BTreeSet::new();
        for r in rules.iter().filter(|r| r.is_lexical()) {
            for (side, vocab) in [(&r.src, &mut src_vocab), (&r.tgt, &mut tgt_vocab)] {
                for sym in side.iter().filter(|s| !s.is_null()) {
                    vocab.insert(sym.name().to_string());
                }
            }
        }
        Ok(SyncGrammar {
            rules,
            src_vocab,
            tgt_vocab,
        })
    }

    pub fn start(&self) -> &str {
        START_SYMBOL
    }

    pub fn rules(&self) -> &[SyncRule] {
        &self.rules
    }

    /// |G|, the number of production rules.
    pub fn size(&self) -> usize {
        self.rules.len()
    }

    /// Non-null terminal surfaces of one side.
    pub fn vocab(&self, side: Side) -> &BTreeSet<String> {
        match side {
            Side::Source => &self.src_vocab,
            Side::Target => &self.tgt_vocab,
        }
    }

    /// Individual words of one side's vocabulary (multi-word surfaces split).
    pub fn words(&self, side: Side) -> BTreeSet<String> {
        self.vocab(side)
            .iter()
            .flat_map(|s| s.split_whitespace())
            .map(str::to_string)
            .collect()
    }

    /// Ordinary CFG obtained by keeping one side of every rule.
    pub fn project(&self, side: Side) -> Cfg {
        Cfg::project(self, side)
    }

    /// All distinct nonterminal names, in order of first appearance.
    pub fn nonterminals(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for r in &self.rules {
            for n in std::iter::once(r.lhs()).chain(r.children()) {
                if seen.insert(n) {
                    out.push(n);
                }
            }
        }
        out
    }

    /// Nonterminals reachable from the start symbol.
    pub fn reachable(&self) -> HashSet<&str> {
        let mut by_lhs: HashMap<&str, Vec<&SyncRule>> = HashMap::new();
        for r in &self.rules {
            by_lhs.entry(r.lhs()).or_default().push(r);
        }
        let mut seen: HashSet<&str> = HashSet::from([START_SYMBOL]);
        let mut stack = vec![START_SYMBOL];
        while let Some(nt) = stack.pop() {
            for r in by_lhs.get(nt).into_iter().flatten() {
                for child in r.children() {
                    if seen.insert(child) {
                        stack.push(child);
                    }
                }
            }
        }
        seen
    }
}

impl fmt::Display for SyncGrammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_grammar(self))
    }
}
