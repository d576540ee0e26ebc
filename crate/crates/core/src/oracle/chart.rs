use std::collections::HashMap;

use crate::grammar::Side;

use super::compiled::Compiled;

/// One way of building an item: a rule and the boundaries of its children
/// in this side's order (`bounds.len() == children + 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Edge {
    pub rule: usize,
    pub bounds: Vec<usize>,
}

/// A packed parse forest over one side of the grammar.
///
/// Spans are filled from width zero upwards. Inside a span, unary rules and
/// rules with nullable children can depend on items of the same span, so
/// each span is iterated to a fixpoint; the grammar is known to be free of
/// such cycles, so the number of rounds is bounded by the chain depth.
pub(crate) struct Chart {
    n: usize,
    nts: usize,
    present: Vec<bool>,
    edges: Vec<HashMap<usize, Vec<Edge>>>,
}

impl Chart {
    pub fn parse(g: &Compiled, side: Side, words: &[&str]) -> Chart {
        let n = words.len();
        let nts = g.names.len();
        let cells = (n + 1) * (n + 1);
        let mut chart = Chart {
            n,
            nts,
            present: vec![false; cells * nts],
            edges: (0..cells).map(|_| HashMap::new()).collect(),
        };
        let max_lex = g.max_lexical_len[match side {
            Side::Source => 0,
            Side::Target => 1,
        }];
        for width in 0..=n {
            for i in 0..=n - width {
                let j = i + width;
                let mut lexical: HashMap<usize, Vec<Edge>> = HashMap::new();
                if width <= max_lex {
                    for &r in g.lexical(side, &words[i..j]) {
                        lexical.entry(g.rules[r].lhs).or_default().push(Edge {
                            rule: r,
                            bounds: vec![i, j],
                        });
                    }
                }
                for nt in lexical.keys() {
                    chart.set(i, j, *nt);
                }
                let mut count = lexical.len();
                loop {
                    let mut found = lexical.clone();
                    for &r in &g.phrasal {
                        let children = g.rules[r].children(side);
                        let mut bounds = vec![i];
                        chart.splits(children, j, &mut bounds, &mut |b| {
                            found.entry(g.rules[r].lhs).or_default().push(Edge {
                                rule: r,
                                bounds: b.to_vec(),
                            });
                        });
                    }
                    for nt in found.keys() {
                        chart.set(i, j, *nt);
                    }
                    let done = found.len() == count;
                    count = found.len();
                    if done {
                        chart.edges[i * (n + 1) + j] = found;
                        break;
                    }
                }
            }
        }
        chart
    }

    fn slot(&self, i: usize, j: usize, nt: usize) -> usize {
        (i * (self.n + 1) + j) * self.nts + nt
    }

    fn set(&mut self, i: usize, j: usize, nt: usize) {
        let s = self.slot(i, j, nt);
        self.present[s] = true;
    }

    pub fn has(&self, i: usize, j: usize, nt: usize) -> bool {
        self.present[self.slot(i, j, nt)]
    }

    pub fn edges(&self, i: usize, j: usize, nt: usize) -> &[Edge] {
        self.edges[i * (self.n + 1) + j].get(&nt).map_or(&[], Vec::as_slice)
    }

    /// Calls `emit` with every boundary list that lets `children` cover
    /// `bounds.last()..end` using items already in the chart.
    fn splits(&self, children: &[usize], end: usize, bounds: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
        let p = *bounds.last().unwrap();
        match children {
            [] => {
                if p == end {
                    emit(bounds);
                }
            }
            [last] => {
                if self.has(p, end, *last) {
                    bounds.push(end);
                    emit(bounds);
                    bounds.pop();
                }
            }
            [first, rest @ ..] => {
                for q in p..=end {
                    if self.has(p, q, *first) {
                        bounds.push(q);
                        self.splits(rest, end, bounds, emit);
                        bounds.pop();
                    }
                }
            }
        }
    }
}
