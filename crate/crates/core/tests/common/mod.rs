//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use scfgmt::grammar::{Side, Symbol, SyncGrammar, SyncRule};
use scfgmt::oracle::DerivationTree;

/// Rules by left-hand side, in grammar order.
fn by_lhs(rules: &[SyncRule]) -> HashMap<&str, Vec<&SyncRule>> {
    let mut m: HashMap<&str, Vec<&SyncRule>> = HashMap::new();
    for r in rules {
        m.entry(r.lhs()).or_default().push(r);
    }
    m
}

/// Every way `nt` can derive a prefix of `words[pos..]`: the end position
/// and the target yield, one entry per derivation.
fn expand(
    rules: &HashMap<&str, Vec<&SyncRule>>,
    nt: &str,
    words: &[&str],
    pos: usize,
    depth: usize,
) -> Vec<(usize, Vec<String>)> {
    let mut out = Vec::new();
    if depth == 0 {
        return out;
    }
    for r in rules.get(nt).into_iter().flatten() {
        if r.is_lexical() {
            let src: Vec<&str> = r.src().iter().flat_map(Symbol::words).collect();
            if words.len() >= pos + src.len() && words[pos..pos + src.len()] == src[..] {
                let tgt = r.tgt().iter().flat_map(Symbol::words).map(str::to_string).collect();
                out.push((pos + src.len(), tgt));
            }
            continue;
        }
        // children left to right, carrying (position, partial target pieces)
        let children: Vec<&str> = r.src().iter().map(Symbol::name).collect();
        let mut partial: Vec<(usize, Vec<Vec<String>>)> = vec![(pos, Vec::new())];
        for child in &children {
            let mut next = Vec::new();
            for (p, pieces) in &partial {
                for (end, y) in expand(rules, child, words, *p, depth - 1) {
                    let mut pieces = pieces.clone();
                    pieces.push(y);
                    next.push((end, pieces));
                }
            }
            partial = next;
        }
        for (end, pieces) in partial {
            let mut tgt = Vec::new();
            for sym in r.tgt() {
                let k = children.iter().position(|c| *c == sym.name()).unwrap();
                tgt.extend(pieces[k].iter().cloned());
            }
            out.push((end, tgt));
        }
    }
    out
}

/// All target yields of derivations whose source yield is exactly `words`,
/// by plain top-down enumeration.
pub fn brute_force_translations(rules: &[SyncRule], words: &[&str]) -> BTreeSet<Vec<String>> {
    let idx = by_lhs(rules);
    // every cycle in a well-formed grammar consumes a word, so the depth
    // needed is bounded by the number of nonterminals per word
    let depth = (idx.len() + 1) * (words.len() + 1);
    expand(&idx, "S", words, 0, depth)
        .into_iter()
        .filter(|(end, _)| *end == words.len())
        .map(|(_, t)| t)
        .collect()
}

/// Splits `V_3sg` into `("V", "3sg")`.
fn feature_base(name: &str) -> Option<&str> {
    let (base, tag) = name.rsplit_once('_')?;
    matches!(tag, "1sg" | "1pl" | "3sg" | "3pl").then_some(base)
}

/// Adds, for each feature-indexed lexical rule, copies carrying the target
/// side of every sibling cell with the same source side.
pub fn expand_agreement_variants(rules: &[SyncRule]) -> Vec<SyncRule> {
    let mut out: Vec<SyncRule> = rules.to_vec();
    for r in rules.iter().filter(|r| r.is_lexical()) {
        let Some(base) = feature_base(r.lhs()) else { continue };
        for v in rules.iter().filter(|v| v.is_lexical()) {
            if feature_base(v.lhs()) == Some(base) && v.src() == r.src() && v.tgt() != r.tgt() {
                let extra = SyncRule::new(r.lhs(), r.src().to_vec(), v.tgt().to_vec()).unwrap();
                if !out.contains(&extra) {
                    out.push(extra);
                }
            }
        }
    }
    out
}

/// Lexical leaves of a tree in target order, as (source words, target words).
pub fn target_leaves(g: &SyncGrammar, t: &DerivationTree) -> Vec<(Vec<String>, Vec<String>)> {
    let r = &g.rules()[t.rule];
    if r.is_lexical() {
        let w = |s: Side| r.words(s).into_iter().map(str::to_string).collect();
        return vec![(w(Side::Source), w(Side::Target))];
    }
    let mut kids: Vec<(usize, &DerivationTree)> = r.alignment().iter().copied().zip(&t.children).collect();
    kids.sort_by_key(|(p, _)| *p);
    kids.into_iter().flat_map(|(_, c)| target_leaves(g, c)).collect()
}

pub fn words(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}
