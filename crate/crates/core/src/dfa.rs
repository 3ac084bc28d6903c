//! Deterministic finite automata with partial transition functions.

use crate::sample::LabeledSample;
use crate::{Error, Result};
use std::collections::{BTreeSet, VecDeque};

/// An ordered set of single-character symbols.
///
/// Symbols are kept sorted and distinct; indices into the alphabet are stable
/// and used everywhere a transition names its symbol. An empty alphabet is
/// legal as long as every string it must explain is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    pub fn new(mut symbols: Vec<char>) -> Result<Self> {
        symbols.sort_unstable();
        symbols.dedup();
        Ok(Alphabet { symbols })
    }

    /// The sorted set of symbols occurring in the given strings.
    pub fn from_strings<'a, I: IntoIterator<Item = &'a String>>(strings: I) -> Self {
        let set: BTreeSet<char> = strings.into_iter().flat_map(|s| s.chars()).collect();
        Alphabet {
            symbols: set.into_iter().collect(),
        }
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.symbols.binary_search(&c).ok()
    }

    pub fn symbol(&self, index: usize) -> char {
        self.symbols[index]
    }
}

/// A deterministic finite automaton with a partial transition function.
///
/// States are `0..state_count`. A missing transition means the string is
/// rejected the moment it is needed; there is no implicit dead state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Alphabet,
    /// transitions[state][symbol index] = target state, if defined.
    transitions: Vec<Vec<Option<usize>>>,
    accepting: Vec<bool>,
    start: usize,
}

impl Dfa {
    /// Builds a DFA from transition triples `(state, symbol, target)`.
    /// Fails on out-of-range states, symbols outside the alphabet, a
    /// duplicate `(state, symbol)` pair, or zero states.
    pub fn new(
        alphabet: Alphabet,
        state_count: usize,
        start: usize,
        accepting: impl IntoIterator<Item = usize>,
        transitions: impl IntoIterator<Item = (usize, char, usize)>,
    ) -> Result<Self> {
        if state_count == 0 {
            return Err(Error::InvalidDfa("state_count must be at least 1".into()));
        }
        if start >= state_count {
            return Err(Error::InvalidDfa(format!(
                "start state {start} out of range (state_count {state_count})"
            )));
        }
        let mut acc = vec![false; state_count];
        for q in accepting {
            if q >= state_count {
                return Err(Error::InvalidDfa(format!(
                    "accepting state {q} out of range"
                )));
            }
            acc[q] = true;
        }
        let mut trans = vec![vec![None; alphabet.len()]; state_count];
        for (q, c, t) in transitions {
            if q >= state_count || t >= state_count {
                return Err(Error::InvalidDfa(format!(
                    "transition ({q}, '{c}', {t}) out of range"
                )));
            }
            let sym = alphabet
                .index_of(c)
                .ok_or(Error::SymbolNotInAlphabet(c))?;
            if trans[q][sym].is_some() {
                return Err(Error::InvalidDfa(format!(
                    "duplicate transition from state {q} on '{c}'"
                )));
            }
            trans[q][sym] = Some(t);
        }
        Ok(Dfa {
            alphabet,
            transitions: trans,
            accepting: acc,
            start,
        })
    }

    /// Internal constructor for parts already known to be consistent.
    pub(crate) fn from_parts(
        alphabet: Alphabet,
        transitions: Vec<Vec<Option<usize>>>,
        accepting: Vec<bool>,
        start: usize,
    ) -> Self {
        debug_assert!(!transitions.is_empty());
        debug_assert_eq!(transitions.len(), accepting.len());
        debug_assert!(start < transitions.len());
        Dfa {
            alphabet,
            transitions,
            accepting,
            start,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    /// Accepting states in ascending order.
    pub fn accepting_states(&self) -> Vec<usize> {
        (0..self.state_count())
            .filter(|&q| self.accepting[q])
            .collect()
    }

    /// Target of `(state, symbol index)`, if defined.
    pub fn transition(&self, state: usize, symbol: usize) -> Option<usize> {
        self.transitions[state][symbol]
    }

    /// All defined transitions as `(state, symbol char, target)`, ordered by
    /// state then symbol.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, char, usize)> + '_ {
        self.transitions.iter().enumerate().flat_map(move |(q, row)| {
            row.iter().enumerate().filter_map(move |(s, t)| {
                t.map(|target| (q, self.alphabet.symbol(s), target))
            })
        })
    }

    pub fn defined_transition_count(&self) -> usize {
        self.transitions
            .iter()
            .map(|row| row.iter().filter(|t| t.is_some()).count())
            .sum()
    }

    /// Walks `input` from the start state. Returns the final state, or `None`
    /// as soon as a needed transition is missing or a symbol is outside the
    /// alphabet.
    pub fn run(&self, input: &str) -> Option<usize> {
        let mut state = self.start;
        for c in input.chars() {
            let sym = self.alphabet.index_of(c)?;
            state = self.transitions[state][sym]?;
        }
        Some(state)
    }

    pub fn accepts(&self, input: &str) -> bool {
        self.run(input).map(|q| self.accepting[q]).unwrap_or(false)
    }

    /// Fraction of sample strings classified correctly (positives accepted,
    /// negatives rejected). Fails on an empty sample.
    pub fn accuracy(&self, sample: &LabeledSample) -> Result<f64> {
        if sample.is_empty() {
            return Err(Error::EmptySample);
        }
        let correct = sample
            .positives()
            .iter()
            .filter(|s| self.accepts(s))
            .count()
            + sample
                .negatives()
                .iter()
                .filter(|s| !self.accepts(s))
                .count();
        Ok(correct as f64 / sample.len() as f64)
    }
}

/// Shortest string on which the two automata disagree, up to `max_len`
/// symbols, with ties broken lexicographically; `Ok(None)` if they agree on
/// every string that short. The automata must share an alphabet.
///
/// Implemented as a breadth-first search of the product automaton, with an
/// explicit dead side for walks that fall off a partial transition function.
pub fn difference_witness(a: &Dfa, b: &Dfa, max_len: usize) -> Result<Option<String>> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::InvalidDfa(
            "automata use different alphabets".into(),
        ));
    }
    let symbols: Vec<char> = a.alphabet().symbols().to_vec();

    // Product states: (Option<state in a>, Option<state in b>), None = dead.
    let index = |qa: Option<usize>, qb: Option<usize>| -> usize {
        let ia = qa.map_or(0, |q| q + 1);
        let ib = qb.map_or(0, |q| q + 1);
        ia * (b.state_count() + 1) + ib
    };
    let accepts_pair = |qa: Option<usize>, qb: Option<usize>| -> (bool, bool) {
        (
            qa.is_some_and(|q| a.is_accepting(q)),
            qb.is_some_and(|q| b.is_accepting(q)),
        )
    };

    let mut seen = vec![false; (a.state_count() + 1) * (b.state_count() + 1)];
    let mut queue: VecDeque<(Option<usize>, Option<usize>, String)> = VecDeque::new();
    let start = (Some(a.start()), Some(b.start()));
    seen[index(start.0, start.1)] = true;
    queue.push_back((start.0, start.1, String::new()));

    while let Some((qa, qb, word)) = queue.pop_front() {
        let (acc_a, acc_b) = accepts_pair(qa, qb);
        if acc_a != acc_b {
            return Ok(Some(word));
        }
        if word.chars().count() == max_len {
            continue;
        }
        for (sym, &c) in symbols.iter().enumerate() {
            let na = qa.and_then(|q| a.transition(q, sym));
            let nb = qb.and_then(|q| b.transition(q, sym));
            if na.is_none() && nb.is_none() {
                continue; // both dead: never accepts, never differs
            }
            let idx = index(na, nb);
            if !seen[idx] {
                seen[idx] = true;
                let mut next = word.clone();
                next.push(c);
                queue.push_back((na, nb, next));
            }
        }
    }
    Ok(None)
}
