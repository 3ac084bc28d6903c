//! Prefix tree acceptor construction.

use crate::dfa::Dfa;
use crate::sample::{shortlex_cmp, LabeledSample};
use crate::{Error, Result};
use std::collections::{BTreeSet, HashMap};

/// Builds the prefix tree acceptor of the sample's positive strings.
///
/// States are the distinct prefixes of the positives, indexed in shortlex
/// order, so state 0 is the empty prefix and also the start state. A state is
/// accepting exactly when its prefix is itself a positive string. Fails when
/// there are no positives.
pub fn build_pta(sample: &LabeledSample) -> Result<Dfa> {
    let (dfa, _) = build_pta_with_prefixes(sample)?;
    Ok(dfa)
}

/// `build_pta` plus the prefix owned by each state, index-aligned.
pub(crate) fn build_pta_with_prefixes(sample: &LabeledSample) -> Result<(Dfa, Vec<String>)> {
    if sample.positives().is_empty() {
        return Err(Error::EmptyPositiveSample);
    }
    let mut prefix_set: BTreeSet<String> = BTreeSet::new();
    for s in sample.positives() {
        let chars: Vec<char> = s.chars().collect();
        for end in 0..=chars.len() {
            prefix_set.insert(chars[..end].iter().collect());
        }
    }
    let mut prefixes: Vec<String> = prefix_set.into_iter().collect();
    prefixes.sort_by(|a, b| shortlex_cmp(a, b));

    let index: HashMap<&str, usize> = prefixes
        .iter()
        .enumerate()
        .map(|(i, p)| (p.as_str(), i))
        .collect();

    let alphabet = sample.alphabet().clone();
    let mut transitions = vec![vec![None; alphabet.len()]; prefixes.len()];
    for (i, p) in prefixes.iter().enumerate() {
        for (sym, &c) in alphabet.symbols().iter().enumerate() {
            let mut child = p.clone();
            child.push(c);
            if let Some(&j) = index.get(child.as_str()) {
                transitions[i][sym] = Some(j);
            }
        }
    }
    let positive_set: BTreeSet<&str> = sample.positives().iter().map(|s| s.as_str()).collect();
    let accepting: Vec<bool> = prefixes
        .iter()
        .map(|p| positive_set.contains(p.as_str()))
        .collect();

    Ok((Dfa::from_parts(alphabet, transitions, accepting, 0), prefixes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(pos: &[&str], neg: &[&str]) -> LabeledSample {
        LabeledSample::new(
            pos.iter().map(|s| s.to_string()),
            neg.iter().map(|s| s.to_string()),
        )
        .unwrap()
    }

    #[test]
    fn two_strings_share_prefixes() {
        // prefixes: "", a, aa, ab
        let pta = build_pta(&sample(&["aa", "ab"], &[])).unwrap();
        assert_eq!(pta.state_count(), 4);
        assert_eq!(pta.accepting_states(), vec![2, 3]);
        assert_eq!(pta.run("a"), Some(1));
        assert_eq!(pta.run("ab"), Some(3));
        assert!(pta.accepts("aa"));
        assert!(!pta.accepts("a"));
    }

    #[test]
    fn states_are_indexed_shortlex() {
        let (_, prefixes) =
            build_pta_with_prefixes(&sample(&["aa", "ab", "b"], &[])).unwrap();
        assert_eq!(prefixes, vec!["", "a", "b", "aa", "ab"]);
    }

    #[test]
    fn pta_accepts_exactly_the_positives() {
        let s = sample(&["ab", "abb", "ba"], &[]);
        let pta = build_pta(&s).unwrap();
        for p in s.positives() {
            assert!(pta.accepts(p), "should accept {p:?}");
        }
        for probe in ["", "a", "b", "bb", "aba", "bab", "abba"] {
            assert!(!pta.accepts(probe), "should reject {probe:?}");
        }
    }

    #[test]
    fn epsilon_only_pta_is_a_single_accepting_state() {
        let pta = build_pta(&sample(&[""], &[])).unwrap();
        assert_eq!(pta.state_count(), 1);
        assert!(pta.is_accepting(0));
        assert_eq!(pta.defined_transition_count(), 0);
        assert!(pta.accepts(""));
    }

    #[test]
    fn empty_positives_error() {
        let s = sample(&[], &["a"]);
        assert_eq!(build_pta(&s), Err(Error::EmptyPositiveSample));
    }

    #[test]
    fn run_falls_off_missing_branches() {
        let pta = build_pta(&sample(&["aa"], &["b"])).unwrap();
        assert_eq!(pta.run("a"), Some(1));
        assert_eq!(pta.run("ab"), None);
        assert_eq!(pta.run("b"), None);
    }

    #[test]
    fn state_count_matches_prefix_set_size() {
        // oracle: count distinct prefixes directly
        let strings = ["abc", "abd", "ab", "c", "ca"];
        let s = sample(&strings, &[]);
        let mut prefixes = std::collections::BTreeSet::new();
        for t in &strings {
            for end in 0..=t.len() {
                prefixes.insert(&t[..end]);
            }
        }
        let pta = build_pta(&s).unwrap();
        assert_eq!(pta.state_count(), prefixes.len());
    }
}
