//! Labeled string samples: the training input for every learner in the crate.

use crate::dfa::Alphabet;
use crate::{Error, Result};
use std::cmp::Ordering;
use std::collections::BTreeSet;

/// Shortlex order: shorter strings first, ties broken lexicographically.
pub fn shortlex_cmp(a: &str, b: &str) -> Ordering {
    a.chars()
        .count()
        .cmp(&b.chars().count())
        .then_with(|| a.cmp(b))
}

/// A set of positive strings and a set of negative strings over one alphabet.
///
/// Both sets are deduplicated and kept in shortlex order. Construction fails
/// if any string appears in both sets, so a `LabeledSample` is always
/// consistent: the prefix tree of its positives rejects every negative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSample {
    positives: Vec<String>,
    negatives: Vec<String>,
    alphabet: Alphabet,
}

impl LabeledSample {
    /// Builds a sample, inferring the alphabet from the symbols that occur.
    pub fn new<P, N>(positives: P, negatives: N) -> Result<Self>
    where
        P: IntoIterator<Item = String>,
        N: IntoIterator<Item = String>,
    {
        let pos: BTreeSet<String> = positives.into_iter().collect();
        let neg: BTreeSet<String> = negatives.into_iter().collect();
        let alphabet = Alphabet::from_strings(pos.iter().chain(neg.iter()));
        Self::build(pos, neg, alphabet)
    }

    /// Builds a sample over a caller-supplied alphabet. Every symbol in the
    /// strings must belong to it.
    pub fn with_alphabet<P, N>(positives: P, negatives: N, alphabet: Alphabet) -> Result<Self>
    where
        P: IntoIterator<Item = String>,
        N: IntoIterator<Item = String>,
    {
        let pos: BTreeSet<String> = positives.into_iter().collect();
        let neg: BTreeSet<String> = negatives.into_iter().collect();
        Self::build(pos, neg, alphabet)
    }

    fn build(pos: BTreeSet<String>, neg: BTreeSet<String>, alphabet: Alphabet) -> Result<Self> {
        if let Some(s) = pos.intersection(&neg).next() {
            return Err(Error::OverlappingSample(s.clone()));
        }
        for s in pos.iter().chain(neg.iter()) {
            for c in s.chars() {
                if alphabet.index_of(c).is_none() {
                    return Err(Error::SymbolNotInAlphabet(c));
                }
            }
        }
        let mut positives: Vec<String> = pos.into_iter().collect();
        let mut negatives: Vec<String> = neg.into_iter().collect();
        positives.sort_by(|a, b| shortlex_cmp(a, b));
        negatives.sort_by(|a, b| shortlex_cmp(a, b));
        Ok(LabeledSample {
            positives,
            negatives,
            alphabet,
        })
    }

    /// Positive strings in shortlex order.
    pub fn positives(&self) -> &[String] {
        &self.positives
    }

    /// Negative strings in shortlex order.
    pub fn negatives(&self) -> &[String] {
        &self.negatives
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positives.is_empty() && self.negatives.is_empty()
    }
}
