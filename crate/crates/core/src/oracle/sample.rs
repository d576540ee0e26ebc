use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::grammar::{Side, SyncGrammar};

use super::compiled::{Body, Compiled};
use super::{DerivationTree, OracleError, SentencePair};

/// Longest source sentence a sampler will build tables for.
pub const MAX_SAMPLE_LEN: usize = 400;

/// Uniform sampler over derivations with a given source length.
///
/// `counts[X][n]` is the number of derivations of `X` whose source yield
/// has exactly `n` words. A derivation is drawn top-down, choosing each rule
/// and each split of the length among the children with probability
/// proportional to the number of completions.
pub struct Sampler {
    grammar: SyncGrammar,
    compiled: Compiled,
    counts: Vec<Vec<BigUint>>,
    max_len: usize,
}

impl Sampler {
    pub fn new(grammar: &SyncGrammar, max_len: usize) -> Result<Sampler, OracleError> {
        if max_len > MAX_SAMPLE_LEN {
            return Err(OracleError::LengthOutOfRange {
                len: max_len,
                max: MAX_SAMPLE_LEN,
            });
        }
        let compiled = Compiled::new(grammar.rules())?;
        let mut sampler = Sampler {
            grammar: grammar.clone(),
            counts: vec![vec![BigUint::zero(); max_len + 1]; compiled.names.len()],
            compiled,
            max_len,
        };
        for n in 0..=max_len {
            sampler.fill(n);
        }
        Ok(sampler)
    }

    pub fn grammar(&self) -> &SyncGrammar {
        &self.grammar
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Number of derivations from `S` with `len` source words.
    pub fn count(&self, len: usize) -> BigUint {
        self.counts[self.compiled.start].get(len).cloned().unwrap_or_default()
    }

    /// Source lengths up to `max_len` that have at least one derivation.
    pub fn achievable_lengths(&self) -> Vec<usize> {
        (0..=self.max_len).filter(|&n| !self.count(n).is_zero()).collect()
    }

    fn fill(&mut self, n: usize) {
        // Lengths below n are final; items of length n may feed each other
        // through unary and nullable children, so iterate to a fixpoint.
        loop {
            let mut changed = false;
            for nt in 0..self.compiled.names.len() {
                let total: BigUint = self.compiled.by_lhs[nt].iter().map(|&r| self.rule_count(r, n)).sum();
                if total != self.counts[nt][n] {
                    self.counts[nt][n] = total;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    fn rule_count(&self, r: usize, n: usize) -> BigUint {
        match &self.compiled.rules[r].body {
            Body::Lexical { src, .. } => {
                if src.len() == n {
                    BigUint::one()
                } else {
                    BigUint::zero()
                }
            }
            Body::Phrasal { src, .. } => self.ways(src, n),
        }
    }

    /// Number of ways the children together derive exactly `n` words.
    fn ways(&self, children: &[usize], n: usize) -> BigUint {
        match children {
            [] => {
                if n == 0 {
                    BigUint::one()
                } else {
                    BigUint::zero()
                }
            }
            [only] => self.counts[*only][n].clone(),
            [a, b] => (0..=n)
                .filter(|&m| !self.counts[*a][m].is_zero())
                .map(|m| &self.counts[*a][m] * &self.counts[*b][n - m])
                .sum(),
            [first, rest @ ..] => (0..=n)
                .filter(|&m| !self.counts[*first][m].is_zero())
                .map(|m| &self.counts[*first][m] * self.ways(rest, n - m))
                .sum(),
        }
    }

    /// Draws a sentence pair whose source has exactly `len` words.
    pub fn sample(&self, len: usize, seed: u64) -> Result<SentencePair, OracleError> {
        if len == 0 || len > self.max_len {
            return Err(OracleError::LengthOutOfRange { len, max: self.max_len });
        }
        if self.count(len).is_zero() {
            let achievable = self.achievable_lengths();
            return Err(OracleError::NoDerivation {
                len,
                below: achievable.iter().rev().find(|&&m| m < len && m > 0).copied(),
                above: achievable.iter().find(|&&m| m > len).copied(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tree = self.draw(self.compiled.start, len, &mut rng);
        Ok(SentencePair::from_tree(&self.grammar, tree))
    }

    fn draw(&self, nt: usize, n: usize, rng: &mut ChaCha8Rng) -> DerivationTree {
        let mut pick = rng.gen_biguint_below(&self.counts[nt][n]);
        for &r in &self.compiled.by_lhs[nt] {
            let c = self.rule_count(r, n);
            if pick < c {
                let children = match &self.compiled.rules[r].body {
                    Body::Lexical { .. } => Vec::new(),
                    Body::Phrasal { src, .. } => {
                        let lens = self.split(src, n, rng);
                        src.iter().zip(lens).map(|(&c, m)| self.draw(c, m, rng)).collect()
                    }
                };
                return DerivationTree { rule: r, children };
            }
            pick -= c;
        }
        unreachable!("count table out of sync")
    }

    /// Chooses the children's lengths with probability proportional to the
    /// number of derivations each choice allows.
    fn split(&self, children: &[usize], n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let mut lens = Vec::with_capacity(children.len());
        let mut rest = n;
        for k in 0..children.len() {
            if k + 1 == children.len() {
                lens.push(rest);
                break;
            }
            let total = self.ways(&children[k..], rest);
            let mut pick = rng.gen_biguint_below(&total);
            for m in 0..=rest {
                let w = &self.counts[children[k]][m] * self.ways(&children[k + 1..], rest - m);
                if pick < w {
                    lens.push(m);
                    rest -= m;
                    break;
                }
                pick -= w;
            }
        }
        lens
    }
}

/// Samples one pair of source length `len`. Build a [`Sampler`] once when
/// drawing many pairs from the same grammar.
pub fn sample_pair(g: &SyncGrammar, len: usize, seed: u64) -> Result<SentencePair, OracleError> {
    Sampler::new(g, len.saturating_add(16).clamp(1, MAX_SAMPLE_LEN))?.sample(len, seed)
}

impl SentencePair {
    pub fn from_tree(g: &SyncGrammar, tree: DerivationTree) -> SentencePair {
        let source = tree.yield_side(g, Side::Source);
        let target = tree.yield_side(g, Side::Target);
        SentencePair {
            len_src: source.len(),
            len_tgt: target.len(),
            source,
            target,
            tree,
        }
    }
}
