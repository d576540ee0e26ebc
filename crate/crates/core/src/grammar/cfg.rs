use std::collections::{BTreeSet, HashMap};

use super::{Side, Symbol, SyncGrammar, START_SYMBOL};

/// One side of a synchronous grammar. Rule `i` here is rule `i` of the
/// grammar it was projected from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cfg {
    pub side: Side,
    pub rules: Vec<CfgRule>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfgRule {
    pub lhs: String,
    /// Null terminals are kept; they derive the empty string.
    pub rhs: Vec<Symbol>,
}

impl CfgRule {
    pub fn is_epsilon(&self) -> bool {
        self.rhs.iter().all(Symbol::is_null)
    }
}

impl Cfg {
    pub(super) fn project(g: &SyncGrammar, side: Side) -> Cfg {
        Cfg {
            side,
            rules: g
                .rules()
                .iter()
                .map(|r| CfgRule {
                    lhs: r.lhs().to_string(),
                    rhs: r.side(side).to_vec(),
                })
                .collect(),
        }
    }

    pub fn start(&self) -> &str {
        START_SYMBOL
    }

    /// Every sentence of at most `max_words` words, by bottom-up set
    /// iteration. Only meant for small grammars.
    pub fn language(&self, max_words: usize) -> BTreeSet<Vec<String>> {
        type Lang = BTreeSet<Vec<String>>;
        let mut table: HashMap<&str, Lang> = HashMap::new();
        loop {
            let mut changed = false;
            for rule in &self.rules {
                let mut partial: Lang = BTreeSet::from([Vec::new()]);
                for sym in &rule.rhs {
                    let options: Lang = match sym {
                        Symbol::Nonterminal(n) => table.get(n.as_str()).cloned().unwrap_or_default(),
                        t => BTreeSet::from([t.words().map(str::to_string).collect()]),
                    };
                    let mut next = BTreeSet::new();
                    for p in &partial {
                        for o in &options {
                            if p.len() + o.len() <= max_words {
                                let mut v = p.clone();
                                v.extend(o.iter().cloned());
                                next.insert(v);
                            }
                        }
                    }
                    partial = next;
                }
                let entry = table.entry(rule.lhs.as_str()).or_default();
                for s in partial {
                    changed |= entry.insert(s);
                }
            }
            if !changed {
                break;
            }
        }
        table.remove(START_SYMBOL).unwrap_or_default()
    }
}
