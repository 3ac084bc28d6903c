//! Red/blue state merging: standard RPNI and the splitting variant that
//! extracts one DFA per collapsed group of positive strings.
//!
//! The hypothesis is always the red core (an arbitrary digraph over surviving
//! states) plus fringe trees from the original prefix tree acceptor. Merging a
//! blue state into a red one redirects the blue state's unique incoming
//! transition and then folds the blue subtree into the target, recursively
//! determinizing. States keep their original prefix-tree indices for the whole
//! run, so "ascending index" and "alphabetical prefix" stay well defined after
//! any number of merges.

use crate::dfa::{Alphabet, Dfa};
use crate::pta::build_pta_with_prefixes;
use crate::sample::LabeledSample;
use crate::{Error, Result};
use std::collections::BTreeSet;

/// Working automaton during a merge run. States are original prefix-tree
/// indices; folded states are tombstoned, never renumbered.
#[derive(Debug, Clone)]
struct Hypothesis {
    trans: Vec<Vec<Option<usize>>>,
    accepting: Vec<bool>,
    /// Negative strings whose full walk ends here must stay rejecting; used
    /// to abort a fold early when it would accept one of them.
    rejecting: Vec<bool>,
    alive: Vec<bool>,
    /// Ids of positive strings whose accepting state folded into this state.
    provenance: Vec<BTreeSet<usize>>,
    live_count: usize,
}

impl Hypothesis {
    fn accepts(&self, input: &str, alphabet: &Alphabet) -> bool {
        let mut state = 0usize;
        for c in input.chars() {
            let Some(sym) = alphabet.index_of(c) else {
                return false;
            };
            match self.trans[state][sym] {
                Some(t) => state = t,
                None => return false,
            }
        }
        self.accepting[state]
    }

    /// Folds `source` into `target`, merging subtrees symbol by symbol.
    /// Collects eliminated accepting provenance into `eliminated`; returns
    /// false as soon as a state would become both accepting and rejecting.
    fn fold(&mut self, target: usize, source: usize, eliminated: &mut BTreeSet<usize>) -> bool {
        if target == source {
            return true;
        }
        debug_assert!(self.alive[target] && self.alive[source]);
        if self.accepting[source] {
            eliminated.extend(self.provenance[source].iter().copied());
        }
        self.accepting[target] |= self.accepting[source];
        self.rejecting[target] |= self.rejecting[source];
        if self.accepting[target] && self.rejecting[target] {
            return false;
        }
        let prov = std::mem::take(&mut self.provenance[source]);
        self.provenance[target].extend(prov);
        self.alive[source] = false;
        self.live_count -= 1;
        for sym in 0..self.trans[source].len() {
            if let Some(child) = self.trans[source][sym] {
                match self.trans[target][sym] {
                    Some(existing) => {
                        if !self.fold(existing, child, eliminated) {
                            return false;
                        }
                    }
                    None => self.trans[target][sym] = Some(child),
                }
            }
        }
        true
    }

    /// Compacts live states (ascending original index) into a `Dfa`.
    fn compact(&self, alphabet: &Alphabet) -> Dfa {
        let mut map = vec![usize::MAX; self.trans.len()];
        let mut next = 0usize;
        for (q, &alive) in self.alive.iter().enumerate() {
            if alive {
                map[q] = next;
                next += 1;
            }
        }
        let mut trans = vec![vec![None; alphabet.len()]; next];
        let mut accepting = vec![false; next];
        for (q, &alive) in self.alive.iter().enumerate() {
            if !alive {
                continue;
            }
            accepting[map[q]] = self.accepting[q];
            for sym in 0..alphabet.len() {
                if let Some(t) = self.trans[q][sym] {
                    debug_assert!(self.alive[t], "live state points at folded state");
                    trans[map[q]][sym] = Some(map[t]);
                }
            }
        }
        debug_assert_eq!(map[0], 0, "start state never folds away");
        Dfa::from_parts(alphabet.clone(), trans, accepting, 0)
    }
}

/// Outcome of a tentative merge: the folded hypothesis plus what the fold
/// destroyed. Produced by [`MergeContext::merge_fold`], applied by
/// [`MergeContext::commit`].
#[derive(Debug, Clone)]
pub struct MergeCandidate {
    hyp: Hypothesis,
    eliminated: BTreeSet<usize>,
    removed_states: usize,
}

impl MergeCandidate {
    /// Ids (into the sample's shortlex positives) of strings whose accepting
    /// state was folded into another state.
    pub fn eliminated(&self) -> &BTreeSet<usize> {
        &self.eliminated
    }

    /// Number of states the fold removed.
    pub fn removed_states(&self) -> usize {
        self.removed_states
    }
}

/// One red/blue merging run over a sample's prefix tree acceptor.
#[derive(Debug, Clone)]
pub struct MergeContext {
    hyp: Hypothesis,
    alphabet: Alphabet,
    prefixes: Vec<String>,
    positives: Vec<String>,
    negatives: Vec<String>,
    red: Vec<usize>,
    blue: BTreeSet<usize>,
}

impl MergeContext {
    /// Builds the prefix tree acceptor, seeds provenance at each positive
    /// string's accepting state, and starts with the root red and the
    /// one-symbol prefixes blue.
    pub fn from_sample(sample: &LabeledSample) -> Result<Self> {
        let (pta, prefixes) = build_pta_with_prefixes(sample)?;
        let n = pta.state_count();
        let alphabet = sample.alphabet().clone();
        let mut trans = vec![vec![None; alphabet.len()]; n];
        let mut accepting = vec![false; n];
        for q in 0..n {
            accepting[q] = pta.is_accepting(q);
            for sym in 0..alphabet.len() {
                trans[q][sym] = pta.transition(q, sym);
            }
        }
        let mut provenance = vec![BTreeSet::new(); n];
        for (i, s) in sample.positives().iter().enumerate() {
            let q = pta.run(s).expect("prefix tree accepts its own positives");
            provenance[q].insert(i);
        }
        let mut rejecting = vec![false; n];
        for s in sample.negatives() {
            if let Some(q) = pta.run(s) {
                rejecting[q] = true;
            }
        }
        let hyp = Hypothesis {
            trans,
            accepting,
            rejecting,
            alive: vec![true; n],
            provenance,
            live_count: n,
        };
        let mut ctx = MergeContext {
            hyp,
            alphabet,
            prefixes,
            positives: sample.positives().to_vec(),
            negatives: sample.negatives().to_vec(),
            red: vec![0],
            blue: BTreeSet::new(),
        };
        ctx.recompute_blue();
        Ok(ctx)
    }

    fn recompute_blue(&mut self) {
        self.blue.clear();
        for &r in &self.red {
            for sym in 0..self.alphabet.len() {
                if let Some(t) = self.hyp.trans[r][sym] {
                    if !self.red.contains(&t) {
                        self.blue.insert(t);
                    }
                }
            }
        }
    }

    /// The next blue state to process: alphabetically (lexicographically)
    /// first original prefix. `None` when no blue states remain.
    pub fn choose(&self) -> Option<usize> {
        self.blue
            .iter()
            .copied()
            .min_by(|&a, &b| self.prefixes[a].cmp(&self.prefixes[b]))
    }

    /// Moves a blue state to the red set and refreshes the blue fringe.
    pub fn promote(&mut self, blue: usize) {
        assert!(self.blue.contains(&blue), "promote target must be blue");
        self.red.push(blue);
        self.red.sort_unstable();
        self.recompute_blue();
    }

    /// Tentatively merges `blue` into `red`: redirects the blue state's
    /// unique incoming transition, then folds. `None` when the fold runs a
    /// known-rejecting state into an accepting one, which always means the
    /// merged automaton would accept a negative string.
    pub fn merge_fold(&self, red: usize, blue: usize) -> Option<MergeCandidate> {
        assert!(self.red.contains(&red), "merge source must be red");
        assert!(self.blue.contains(&blue), "merge target must be blue");
        let mut hyp = self.hyp.clone();
        let live_before = hyp.live_count;
        let mut redirected = false;
        'outer: for &r in &self.red {
            for sym in 0..self.alphabet.len() {
                if hyp.trans[r][sym] == Some(blue) {
                    hyp.trans[r][sym] = Some(red);
                    redirected = true;
                    break 'outer;
                }
            }
        }
        debug_assert!(redirected, "blue state reachable from red core");
        let mut eliminated = BTreeSet::new();
        if !hyp.fold(red, blue, &mut eliminated) {
            return None;
        }
        let removed_states = live_before - hyp.live_count;
        Some(MergeCandidate {
            hyp,
            eliminated,
            removed_states,
        })
    }

    /// True when the candidate's automaton rejects every negative string.
    pub fn candidate_consistent(&self, cand: &MergeCandidate) -> bool {
        self.negatives
            .iter()
            .all(|s| !cand.hyp.accepts(s, &self.alphabet))
    }

    /// Replaces the hypothesis with a candidate and refreshes the blue set.
    pub fn commit(&mut self, cand: MergeCandidate) {
        self.hyp = cand.hyp;
        self.recompute_blue();
    }

    /// Red states in ascending original index, the order merges are tried in.
    pub fn reds(&self) -> &[usize] {
        &self.red
    }

    pub fn blues(&self) -> &BTreeSet<usize> {
        &self.blue
    }

    /// Original prefix-tree prefix owned by a state.
    pub fn prefix(&self, state: usize) -> &str {
        &self.prefixes[state]
    }

    pub fn positive(&self, id: usize) -> &str {
        &self.positives[id]
    }

    pub fn live_state_count(&self) -> usize {
        self.hyp.live_count
    }

    /// The current hypothesis as a compact DFA.
    pub fn dfa(&self) -> Dfa {
        self.hyp.compact(&self.alphabet)
    }

    /// First red state (ascending index) whose merge with `blue` folds
    /// cleanly and keeps every negative rejected.
    fn first_consistent_merge(&self, blue: usize) -> Option<MergeCandidate> {
        for &r in &self.red {
            if let Some(cand) = self.merge_fold(r, blue) {
                if self.candidate_consistent(&cand) {
                    return Some(cand);
                }
            }
        }
        None
    }
}

/// True when the automaton rejects every one of the given strings.
pub fn rpni_compatible<S: AsRef<str>>(dfa: &Dfa, negatives: &[S]) -> bool {
    negatives.iter().all(|s| !dfa.accepts(s.as_ref()))
}

/// A merging run's result plus counters used by callers that reason about
/// how much generalization happened.
#[derive(Debug, Clone)]
pub struct RpniRun {
    pub dfa: Dfa,
    pub committed_merges: usize,
    pub promotions: usize,
}

/// Standard RPNI: repeatedly pick the alphabetically first blue state, merge
/// it into the first red state that keeps all negatives rejected, or promote
/// it when no red works. The result accepts every positive and rejects every
/// negative.
pub fn standard_rpni(sample: &LabeledSample) -> Result<Dfa> {
    standard_rpni_detailed(sample).map(|run| run.dfa)
}

pub fn standard_rpni_detailed(sample: &LabeledSample) -> Result<RpniRun> {
    let mut ctx = MergeContext::from_sample(sample)?;
    let mut committed = 0usize;
    let mut promotions = 0usize;
    while let Some(b) = ctx.choose() {
        match ctx.first_consistent_merge(b) {
            Some(cand) => {
                ctx.commit(cand);
                committed += 1;
            }
            None => {
                ctx.promote(b);
                promotions += 1;
            }
        }
    }
    Ok(RpniRun {
        dfa: ctx.dfa(),
        committed_merges: committed,
        promotions,
    })
}

/// One extracted sub-solution: a DFA and the positive strings it was learned
/// from (shortlex order).
#[derive(Debug, Clone)]
pub struct SplitPart {
    pub dfa: Dfa,
    pub positives: Vec<String>,
}

/// Result of [`rpni_splitting`]: sub-DFAs in extraction order whose positive
/// assignments partition the input positives.
#[derive(Debug, Clone)]
pub struct SplitResult {
    pub parts: Vec<SplitPart>,
}

impl SplitResult {
    pub fn dfas(&self) -> impl Iterator<Item = &Dfa> {
        self.parts.iter().map(|p| &p.dfa)
    }

    pub fn assignments(&self) -> impl Iterator<Item = &[String]> {
        self.parts.iter().map(|p| p.positives.as_slice())
    }
}

/// RPNI with split extraction. Runs like standard RPNI, but before committing
/// a merge checks how much it collapses: with `E` the positive strings whose
/// accepting states were folded away and `dq` the number of removed states, a
/// merge with `|E|·k ≥ |S+|` or `dq·k ≥ |Q|` (and `∅ ⊂ E ⊊ S+`, `k > 1`)
/// triggers a split instead. The strings of `E` are learned separately with
/// standard RPNI, and the run restarts on the remaining positives with `E`
/// added to the negatives and `k` halved. Yields at most `k` DFAs, each
/// rejecting every original negative.
pub fn rpni_splitting(sample: &LabeledSample, k: usize) -> Result<SplitResult> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    let mut parts = Vec::new();
    split_level(sample.clone(), k, &mut parts)?;
    Ok(SplitResult { parts })
}

fn split_level(sample: LabeledSample, k: usize, parts: &mut Vec<SplitPart>) -> Result<()> {
    let mut ctx = MergeContext::from_sample(&sample)?;
    let positives_total = sample.positives().len();
    while let Some(b) = ctx.choose() {
        match ctx.first_consistent_merge(b) {
            Some(cand) => {
                let eliminated = cand.eliminated().len();
                let live_before = ctx.live_state_count();
                let big = eliminated * k >= positives_total
                    || cand.removed_states() * k >= live_before;
                if k > 1 && eliminated > 0 && eliminated < positives_total && big {
                    let extracted: Vec<String> = cand
                        .eliminated()
                        .iter()
                        .map(|&id| ctx.positive(id).to_string())
                        .collect();
                    let extracted_set: BTreeSet<&String> = extracted.iter().collect();
                    let part_sample = LabeledSample::with_alphabet(
                        extracted.iter().cloned(),
                        sample.negatives().iter().cloned(),
                        sample.alphabet().clone(),
                    )?;
                    let dfa = standard_rpni(&part_sample)?;
                    parts.push(SplitPart {
                        dfa,
                        positives: part_sample.positives().to_vec(),
                    });
                    let rest: Vec<String> = sample
                        .positives()
                        .iter()
                        .filter(|s| !extracted_set.contains(s))
                        .cloned()
                        .collect();
                    let negatives: Vec<String> = sample
                        .negatives()
                        .iter()
                        .cloned()
                        .chain(extracted.iter().cloned())
                        .collect();
                    let rest_sample = LabeledSample::with_alphabet(
                        rest,
                        negatives,
                        sample.alphabet().clone(),
                    )?;
                    return split_level(rest_sample, k / 2, parts);
                }
                ctx.commit(cand);
            }
            None => ctx.promote(b),
        }
    }
    parts.push(SplitPart {
        dfa: ctx.dfa(),
        positives: sample.positives().to_vec(),
    });
    Ok(())
}
