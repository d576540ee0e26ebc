use std::collections::{HashMap, HashSet};

use crate::grammar::{Side, SyncRule, START_SYMBOL};
use crate::metagrammar::split_feature;

use super::OracleError;

#[derive(Debug, Clone)]
pub(crate) enum Body {
    Lexical {
        src: Vec<String>,
        tgt: Vec<String>,
    },
    Phrasal {
        /// Children in source order.
        src: Vec<usize>,
        /// Children in target order.
        tgt: Vec<usize>,
        /// Source child index of each target position.
        tgt_to_src: Vec<usize>,
        /// Target position of each source child.
        src_to_tgt: Vec<usize>,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct Rule {
    pub lhs: usize,
    pub body: Body,
}

impl Rule {
    pub fn children(&self, side: Side) -> &[usize] {
        match (&self.body, side) {
            (Body::Lexical { .. }, _) => &[],
            (Body::Phrasal { src, .. }, Side::Source) => src,
            (Body::Phrasal { tgt, .. }, Side::Target) => tgt,
        }
    }

    pub fn words(&self, side: Side) -> Option<&[String]> {
        match (&self.body, side) {
            (Body::Lexical { src, .. }, Side::Source) => Some(src),
            (Body::Lexical { tgt, .. }, Side::Target) => Some(tgt),
            _ => None,
        }
    }
}

/// A grammar with interned nonterminals, ready for parsing and counting.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub names: Vec<String>,
    pub rules: Vec<Rule>,
    pub by_lhs: Vec<Vec<usize>>,
    pub start: usize,
    /// Lexical rules keyed by their space-joined surface, per side.
    lexicon: [HashMap<String, Vec<usize>>; 2],
    pub max_lexical_len: [usize; 2],
    pub phrasal: Vec<usize>,
}

fn side_index(side: Side) -> usize {
    match side {
        Side::Source => 0,
        Side::Target => 1,
    }
}

impl Compiled {
    pub fn new(rules: &[SyncRule]) -> Result<Compiled, OracleError> {
        let mut names = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut intern = |n: &str| -> usize {
            if let Some(&i) = index.get(n) {
                return i;
            }
            names.push(n.to_string());
            index.insert(n.to_string(), names.len() - 1);
            names.len() - 1
        };
        let start = intern(START_SYMBOL);
        let mut out = Vec::with_capacity(rules.len());
        for r in rules {
            let lhs = intern(r.lhs());
            let body = if r.is_lexical() {
                Body::Lexical {
                    src: r.words(Side::Source).into_iter().map(str::to_string).collect(),
                    tgt: r.words(Side::Target).into_iter().map(str::to_string).collect(),
                }
            } else {
                let src: Vec<usize> = r.src().iter().map(|s| intern(s.name())).collect();
                let tgt: Vec<usize> = r.tgt().iter().map(|s| intern(s.name())).collect();
                let src_to_tgt = r.alignment().to_vec();
                let mut tgt_to_src = vec![0; src_to_tgt.len()];
                for (a, &t) in src_to_tgt.iter().enumerate() {
                    tgt_to_src[t] = a;
                }
                Body::Phrasal {
                    src,
                    tgt,
                    tgt_to_src,
                    src_to_tgt,
                }
            };
            out.push(Rule { lhs, body });
        }
        let mut by_lhs = vec![Vec::new(); names.len()];
        let mut lexicon = [HashMap::new(), HashMap::new()];
        let mut max_lexical_len = [0, 0];
        let mut phrasal = Vec::new();
        for (i, r) in out.iter().enumerate() {
            by_lhs[r.lhs].push(i);
            match &r.body {
                Body::Lexical { .. } => {
                    for side in [Side::Source, Side::Target] {
                        let words = r.words(side).unwrap();
                        let k = side_index(side);
                        max_lexical_len[k] = max_lexical_len[k].max(words.len());
                        lexicon[k].entry(words.join(" ")).or_insert_with(Vec::new).push(i);
                    }
                }
                Body::Phrasal { .. } => phrasal.push(i),
            }
        }
        let compiled = Compiled {
            names,
            rules: out,
            by_lhs,
            start,
            lexicon,
            max_lexical_len,
            phrasal,
        };
        compiled.check_cycles()?;
        Ok(compiled)
    }

    pub fn lexical(&self, side: Side, words: &[&str]) -> &[usize] {
        self.lexicon[side_index(side)]
            .get(&words.join(" "))
            .map_or(&[], Vec::as_slice)
    }

    /// Nonterminals that can derive the empty string.
    pub fn nullable(&self) -> Vec<bool> {
        let mut nullable = vec![false; self.names.len()];
        loop {
            let mut changed = false;
            for r in &self.rules {
                if nullable[r.lhs] {
                    continue;
                }
                let null = match &r.body {
                    Body::Lexical { src, .. } => src.is_empty(),
                    Body::Phrasal { src, .. } => src.iter().all(|&c| nullable[c]),
                };
                if null {
                    nullable[r.lhs] = true;
                    changed = true;
                }
            }
            if !changed {
                return nullable;
            }
        }
    }

    /// Rejects grammars where a nonterminal can rewrite to itself without
    /// consuming input, which would give infinitely many derivations.
    fn check_cycles(&self) -> Result<(), OracleError> {
        let nullable = self.nullable();
        let mut succ: Vec<HashSet<usize>> = vec![HashSet::new(); self.names.len()];
        for r in &self.rules {
            if let Body::Phrasal { src, .. } = &r.body {
                for (k, &c) in src.iter().enumerate() {
                    let others_null = src.iter().enumerate().all(|(m, &d)| m == k || nullable[d]);
                    if others_null {
                        succ[r.lhs].insert(c);
                    }
                }
            }
        }
        // 0 unvisited, 1 on stack, 2 done
        let mut state = vec![0u8; self.names.len()];
        for root in 0..self.names.len() {
            if state[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, succ[root].iter().copied().collect::<Vec<_>>())];
            state[root] = 1;
            while let Some((node, pending)) = stack.last_mut() {
                match pending.pop() {
                    Some(next) => match state[next] {
                        0 => {
                            state[next] = 1;
                            let s = succ[next].iter().copied().collect();
                            stack.push((next, s));
                        }
                        1 => return Err(OracleError::Cycle(self.names[next].clone())),
                        _ => {}
                    },
                    None => {
                        state[*node] = 2;
                        stack.pop();
                    }
                }
            }
        }
        Ok(())
    }
}

/// How agreement mismatches are treated when checking translations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Crediting {
    /// Only the target forms the grammar pairs with the source.
    Strict,
    /// Any agreement variant of a target word is accepted: a feature-indexed
    /// lexical rule `X_f` also licenses the target surface of every `X_g`
    /// rule with the same source surface.
    #[default]
    AnyAgreement,
}

/// The grammar's rules followed by the extra lexical rules that crediting
/// adds. Original rule indices are preserved.
pub(crate) fn credited_rules(rules: &[SyncRule], crediting: Crediting) -> Vec<SyncRule> {
    let mut out = rules.to_vec();
    if crediting == Crediting::Strict {
        return out;
    }
    let mut variants: HashMap<(&str, &[_]), Vec<&SyncRule>> = HashMap::new();
    for r in rules.iter().filter(|r| r.is_lexical()) {
        if let Some((base, _)) = split_feature(r.lhs()) {
            variants.entry((base, r.src())).or_default().push(r);
        }
    }
    let mut seen: HashSet<(String, String)> = HashSet::new();
    for r in rules.iter().filter(|r| r.is_lexical()) {
        seen.insert((r.lhs().to_string(), r.to_string()));
    }
    for r in rules.iter().filter(|r| r.is_lexical()) {
        let Some((base, _)) = split_feature(r.lhs()) else {
            continue;
        };
        for v in &variants[&(base, r.src())] {
            if v.tgt() == r.tgt() {
                continue;
            }
            let extra =
                SyncRule::new(r.lhs(), r.src().to_vec(), v.tgt().to_vec()).expect("variant of a valid lexical rule");
            if seen.insert((extra.lhs().to_string(), extra.to_string())) {
                out.push(extra);
            }
        }
    }
    out
}
