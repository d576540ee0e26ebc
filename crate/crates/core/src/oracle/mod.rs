//! Sampling sentence pairs, translating with the grammar, and checking
//! candidate translations.
//!
//! Translation parses the source sentence under the source projection of the
//! grammar, then reads every target yield off the packed forest. Checking a
//! candidate never enumerates translations: it parses the candidate under the
//! target projection and intersects the two forests rule by rule.
//!
//! ```
//! use scfgmt::demo;
//! use scfgmt::oracle::{is_valid_translation, sample_pair};
//!
//! let g = demo::reference_grammar();
//! let pair = sample_pair(&g, 6, 42).unwrap();
//! assert_eq!(pair.source.len(), 6);
//! assert!(is_valid_translation(&g, &pair.source, &pair.target));
//! ```

mod chart;
mod compiled;
mod sample;

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::{Side, SyncGrammar, SyncRule};

use chart::Chart;
use compiled::{credited_rules, Body, Compiled};

pub use compiled::Crediting;
pub use sample::{sample_pair, Sampler, MAX_SAMPLE_LEN};

/// Default bound on the number of distinct translations returned.
pub const DEFAULT_CAP: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("input is empty")]
    EmptyInput,
    #[error("sentence is not in the source language")]
    NotInLanguage,
    #[error("no derivation of length {len} (nearest shorter: {below:?}, nearest longer: {above:?})")]
    NoDerivation {
        len: usize,
        below: Option<usize>,
        above: Option<usize>,
    },
    #[error("length {len} is outside 1..={max}")]
    LengthOutOfRange { len: usize, max: usize },
    #[error("nonterminal {0} can rewrite to itself without consuming input")]
    Cycle(String),
}

/// Nonterminal, source span and target span already decided by `sync`.
type SyncMemo = HashMap<(usize, (usize, usize), (usize, usize)), bool>;

/// A derivation: the rule applied at each node, children in source order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationTree {
    pub rule: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<DerivationTree>,
}

impl DerivationTree {
    /// Words of one side, with null terminals dropped.
    pub fn yield_side(&self, g: &SyncGrammar, side: Side) -> Vec<String> {
        let mut out = Vec::new();
        self.collect(g, side, &mut out);
        out
    }

    fn collect(&self, g: &SyncGrammar, side: Side, out: &mut Vec<String>) {
        let rule = &g.rules()[self.rule];
        if rule.is_lexical() {
            out.extend(rule.words(side).into_iter().map(str::to_string));
            return;
        }
        match side {
            Side::Source => {
                for c in &self.children {
                    c.collect(g, side, out);
                }
            }
            Side::Target => {
                let mut order: Vec<(usize, &DerivationTree)> =
                    rule.alignment().iter().copied().zip(&self.children).collect();
                order.sort_by_key(|(pos, _)| *pos);
                for (_, c) in order {
                    c.collect(g, side, out);
                }
            }
        }
    }

    /// Rule indices in preorder.
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            out.push(t.rule);
            stack.extend(t.children.iter().rev());
        }
        out
    }

    /// Rebuilds a tree from its preorder rule list.
    pub fn from_preorder(g: &SyncGrammar, rules: &[usize]) -> Option<DerivationTree> {
        let mut it = rules.iter().copied();
        let tree = Self::build(g, &mut it)?;
        it.next().is_none().then_some(tree)
    }

    fn build(g: &SyncGrammar, it: &mut impl Iterator<Item = usize>) -> Option<DerivationTree> {
        let rule = it.next()?;
        let r = g.rules().get(rule)?;
        let mut children = Vec::new();
        for want in r.children() {
            let child = Self::build(g, it)?;
            if g.rules()[child.rule].lhs() != want {
                return None;
            }
            children.push(child);
        }
        Some(DerivationTree { rule, children })
    }

    /// Whether every node's children match its rule.
    pub fn is_well_formed(&self, g: &SyncGrammar) -> bool {
        let Some(r) = g.rules().get(self.rule) else {
            return false;
        };
        let want: Vec<&str> = r.children().collect();
        want.len() == self.children.len()
            && self
                .children
                .iter()
                .zip(want)
                .all(|(c, w)| g.rules().get(c.rule).is_some_and(|cr| cr.lhs() == w) && c.is_well_formed(g))
    }
}

/// A sampled source sentence with its gold translation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentencePair {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub tree: DerivationTree,
    pub len_src: usize,
    pub len_tgt: usize,
}

/// Distinct target yields of a source sentence, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Translation {
    pub outputs: Vec<Vec<String>>,
    /// True when more translations exist than the cap allowed.
    pub overflow: bool,
}

impl Translation {
    pub fn sentences(&self) -> Vec<String> {
        self.outputs.iter().map(|o| o.join(" ")).collect()
    }

    pub fn contains<S: AsRef<str>>(&self, cand: &[S]) -> bool {
        self.outputs
            .iter()
            .any(|o| o.len() == cand.len() && o.iter().zip(cand).all(|(a, b)| a == b.as_ref()))
    }
}

/// A grammar prepared for repeated translation and checking.
#[derive(Debug, Clone)]
pub struct Transducer {
    compiled: Compiled,
    crediting: Crediting,
}

type Yields = Rc<(BTreeSet<Vec<Rc<str>>>, bool)>;

impl Transducer {
    /// Prepares `g` with the default [`Crediting::AnyAgreement`].
    pub fn new(g: &SyncGrammar) -> Result<Transducer, OracleError> {
        Self::with_crediting(g, Crediting::default())
    }

    pub fn with_crediting(g: &SyncGrammar, crediting: Crediting) -> Result<Transducer, OracleError> {
        let rules: Vec<SyncRule> = credited_rules(g.rules(), crediting);
        Ok(Transducer {
            compiled: Compiled::new(&rules)?,
            crediting,
        })
    }

    pub fn crediting(&self) -> Crediting {
        self.crediting
    }

    /// All target yields of `s`, at most `cap` of them.
    pub fn translate<S: AsRef<str>>(&self, s: &[S], cap: usize) -> Result<Translation, OracleError> {
        if s.is_empty() {
            return Err(OracleError::EmptyInput);
        }
        let words: Vec<&str> = s.iter().map(AsRef::as_ref).collect();
        let chart = Chart::parse(&self.compiled, Side::Source, &words);
        let start = self.compiled.start;
        if !chart.has(0, words.len(), start) {
            return Err(OracleError::NotInLanguage);
        }
        let mut memo = HashMap::new();
        let yields = self.yields(&chart, start, 0, words.len(), cap.max(1), &mut memo);
        Ok(Translation {
            outputs: yields
                .0
                .iter()
                .map(|ws| ws.iter().map(|w| w.to_string()).collect())
                .collect(),
            overflow: yields.1,
        })
    }

    fn yields(
        &self,
        chart: &Chart,
        nt: usize,
        i: usize,
        j: usize,
        cap: usize,
        memo: &mut HashMap<(usize, usize, usize), Yields>,
    ) -> Yields {
        if let Some(y) = memo.get(&(nt, i, j)) {
            return y.clone();
        }
        let mut set: BTreeSet<Vec<Rc<str>>> = BTreeSet::new();
        let mut overflow = false;
        for edge in chart.edges(i, j, nt) {
            match &self.compiled.rules[edge.rule].body {
                Body::Lexical { tgt, .. } => {
                    set.insert(tgt.iter().map(|w| Rc::from(w.as_str())).collect());
                }
                Body::Phrasal { src, tgt_to_src, .. } => {
                    let parts: Vec<Yields> = (0..src.len())
                        .map(|a| self.yields(chart, src[a], edge.bounds[a], edge.bounds[a + 1], cap, memo))
                        .collect();
                    let mut acc: Vec<Vec<Rc<str>>> = vec![Vec::new()];
                    for &a in tgt_to_src {
                        overflow |= parts[a].1;
                        let mut next = Vec::new();
                        'outer: for prefix in &acc {
                            for suffix in &parts[a].0 {
                                if next.len() >= cap {
                                    overflow = true;
                                    break 'outer;
                                }
                                let mut w = prefix.clone();
                                w.extend(suffix.iter().cloned());
                                next.push(w);
                            }
                        }
                        acc = next;
                    }
                    set.extend(acc);
                }
            }
            if set.len() > cap {
                overflow = true;
                while set.len() > cap {
                    set.pop_last();
                }
            }
        }
        let y = Rc::new((set, overflow));
        memo.insert((nt, i, j), y.clone());
        y
    }

    /// True iff some synchronized derivation yields `s` on the source side
    /// and `cand` on the target side.
    pub fn is_valid_translation<S: AsRef<str>, T: AsRef<str>>(&self, s: &[S], cand: &[T]) -> bool {
        let src: Vec<&str> = s.iter().map(AsRef::as_ref).collect();
        let tgt: Vec<&str> = cand.iter().map(AsRef::as_ref).collect();
        let start = self.compiled.start;
        let sc = Chart::parse(&self.compiled, Side::Source, &src);
        if !sc.has(0, src.len(), start) {
            return false;
        }
        let tc = Chart::parse(&self.compiled, Side::Target, &tgt);
        if !tc.has(0, tgt.len(), start) {
            return false;
        }
        let mut memo = HashMap::new();
        self.sync(&sc, &tc, start, (0, src.len()), (0, tgt.len()), &mut memo)
    }

    fn sync(
        &self,
        sc: &Chart,
        tc: &Chart,
        nt: usize,
        s: (usize, usize),
        t: (usize, usize),
        memo: &mut SyncMemo,
    ) -> bool {
        if let Some(&v) = memo.get(&(nt, s, t)) {
            return v;
        }
        let mut ok = false;
        'edges: for e in sc.edges(s.0, s.1, nt) {
            for f in tc.edges(t.0, t.1, nt).iter().filter(|f| f.rule == e.rule) {
                let matched = match &self.compiled.rules[e.rule].body {
                    Body::Lexical { .. } => true,
                    Body::Phrasal { src, src_to_tgt, .. } => src.iter().enumerate().all(|(a, &c)| {
                        let p = src_to_tgt[a];
                        self.sync(
                            sc,
                            tc,
                            c,
                            (e.bounds[a], e.bounds[a + 1]),
                            (f.bounds[p], f.bounds[p + 1]),
                            memo,
                        )
                    }),
                };
                if matched {
                    ok = true;
                    break 'edges;
                }
            }
        }
        memo.insert((nt, s, t), ok);
        ok
    }

    /// Whether `s` is in the source language.
    pub fn parses<S: AsRef<str>>(&self, side: Side, s: &[S]) -> bool {
        let words: Vec<&str> = s.iter().map(AsRef::as_ref).collect();
        Chart::parse(&self.compiled, side, &words).has(0, words.len(), self.compiled.start)
    }
}

/// Translates `s` with the default crediting.
pub fn translate<S: AsRef<str>>(g: &SyncGrammar, s: &[S], cap: usize) -> Result<Translation, OracleError> {
    Transducer::new(g)?.translate(s, cap)
}

/// Checks a candidate with the default crediting. Malformed grammars and
/// unparseable inputs give `false`.
pub fn is_valid_translation<S: AsRef<str>, T: AsRef<str>>(g: &SyncGrammar, s: &[S], cand: &[T]) -> bool {
    Transducer::new(g).is_ok_and(|t| t.is_valid_translation(s, cand))
}
