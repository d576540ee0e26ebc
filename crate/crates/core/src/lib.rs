//! Synchronous context-free grammars as a testbed for in-context machine
//! translation.
//!
//! The crate generates paired artificial languages from a handful of
//! typological parameters, samples gold sentence pairs, decides whether a
//! candidate translation is licensed by the grammar, scores candidates with
//! exact match, bag-of-words, BLEU and chrF++, labels the errors, and drives
//! model endpoints through a reproducible evaluation loop.
//!
//! ```
//! use scfgmt::demo;
//! use scfgmt::oracle::translate;
//!
//! let g = demo::english_japanese();
//! let out = translate(&g, &["I", "open", "the", "box"], 10).unwrap();
//! assert_eq!(out.sentences(), vec!["watashi wa hako wo akemasu"]);
//! ```

pub mod demo;
pub mod grammar;
pub mod harness;
pub mod lexicon;
pub mod metagrammar;
pub mod metrics;
pub mod oracle;
pub mod seed;
pub mod taxonomy;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/grammars.md")]
    mod grammars {}
    #[doc = include_str!("../../../book/src/generating.md")]
    mod generating {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/scripts.md")]
    mod scripts {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/errors.md")]
    mod errors {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
