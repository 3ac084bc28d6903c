//! Randomized invariants over the library's public surface: tree building,
//! language comparison, serialization, merging with splits, genome coding,
//! and clustering, each checked against a brute-force oracle where one
//! exists.

use dfalearn::evolution::{crossover, fitness, mutate, transition_clustering, Genome};
use dfalearn::textio::{deserialize_dfa, parse_sample, serialize_dfa, write_sample};
use dfalearn::{
    build_pta, difference_witness, rpni_splitting, standard_rpni, Alphabet, Dfa, LabeledSample,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

fn symbols(width: usize) -> Vec<char> {
    ['a', 'b', 'c'][..width].to_vec()
}

/// All strings over the first `width` symbols up to `max_len`, shortlex.
fn enumerate(width: usize, max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &layer {
            for c in symbols(width) {
                let mut t = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn string_strategy(width: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(0..width, 0..7).prop_map(move |idx| {
        idx.into_iter().map(|i| symbols(width)[i]).collect()
    })
}

fn sample_strategy() -> impl Strategy<Value = LabeledSample> {
    (1..=2usize)
        .prop_flat_map(|width| {
            (
                prop::collection::btree_set(string_strategy(width), 1..8),
                prop::collection::btree_set(string_strategy(width), 0..6),
            )
        })
        .prop_map(|(pos, neg)| {
            let negatives: Vec<String> = neg.difference(&pos).cloned().collect();
            LabeledSample::new(pos.into_iter().collect::<Vec<_>>(), negatives).unwrap()
        })
}

/// Arbitrary partial DFA: `width` symbols, up to 6 states, any start.
fn dfa_strategy(width: usize) -> impl Strategy<Value = Dfa> {
    (1..=6usize)
        .prop_flat_map(move |n| {
            (
                Just(n),
                prop::collection::vec(prop::option::of(0..n), n * width),
                prop::collection::vec(any::<bool>(), n),
                0..n,
            )
        })
        .prop_map(move |(n, cells, accepting, start)| {
            let alphabet = Alphabet::new(symbols(width)).unwrap();
            let mut transitions = Vec::new();
            for q in 0..n {
                for (sym, &target) in cells[q * width..(q + 1) * width].iter().enumerate() {
                    if let Some(t) = target {
                        transitions.push((q, symbols(width)[sym], t));
                    }
                }
            }
            let accepting: Vec<usize> =
                (0..n).filter(|&q| accepting[q]).collect();
            Dfa::new(alphabet, n, start, accepting, transitions).unwrap()
        })
}

proptest! {
    #[test]
    fn pta_accepts_exactly_the_positive_strings(sample in sample_strategy()) {
        let pta = build_pta(&sample).unwrap();
        let max_len = sample.positives().iter().map(|s| s.chars().count()).max().unwrap();
        let positives: BTreeSet<&String> = sample.positives().iter().collect();
        for s in enumerate(sample.alphabet().len(), max_len + 1) {
            prop_assert_eq!(pta.accepts(&s), positives.contains(&s), "on {:?}", s);
        }
    }

    #[test]
    fn witness_agrees_with_exhaustive_search(
        a in dfa_strategy(2),
        b in dfa_strategy(2),
    ) {
        let expected = enumerate(2, 5)
            .into_iter()
            .find(|s| a.accepts(s) != b.accepts(s));
        prop_assert_eq!(difference_witness(&a, &b, 5).unwrap(), expected);
    }

    #[test]
    fn witness_of_self_is_none(a in dfa_strategy(2)) {
        prop_assert_eq!(difference_witness(&a, &a, 6).unwrap(), None);
    }

    #[test]
    fn dfa_text_round_trips(d in dfa_strategy(2)) {
        prop_assert_eq!(deserialize_dfa(&serialize_dfa(&d)).unwrap(), d);
    }

    #[test]
    fn sample_text_round_trips(s in sample_strategy()) {
        prop_assert_eq!(parse_sample(&write_sample(&s)).unwrap(), s.clone());
    }

    #[test]
    fn merging_output_is_consistent_with_the_sample(s in sample_strategy()) {
        let dfa = standard_rpni(&s).unwrap();
        for p in s.positives() {
            prop_assert!(dfa.accepts(p), "lost positive {:?}", p);
        }
        for n in s.negatives() {
            prop_assert!(!dfa.accepts(n), "accepted negative {:?}", n);
        }
    }

    #[test]
    fn splitting_partitions_positives_and_rejects_negatives(
        s in sample_strategy(),
        k in 1..=5usize,
    ) {
        let split = rpni_splitting(&s, k).unwrap();
        prop_assert!(split.parts.len() <= k);
        prop_assert!(!split.parts.is_empty());
        let mut covered = Vec::new();
        for part in &split.parts {
            prop_assert!(!part.positives.is_empty());
            for p in &part.positives {
                prop_assert!(part.dfa.accepts(p), "part must accept {:?}", p);
            }
            for n in s.negatives() {
                prop_assert!(!part.dfa.accepts(n), "part accepts negative {:?}", n);
            }
            covered.extend(part.positives.iter().cloned());
        }
        covered.sort();
        let mut expected: Vec<String> = s.positives().to_vec();
        expected.sort();
        prop_assert_eq!(covered, expected, "assignments must partition the sample");
    }

    #[test]
    fn genome_coding_is_a_bijection_on_start_zero_dfas(d in dfa_strategy(2)) {
        if d.start() == 0 {
            let g = Genome::encode(&d).unwrap();
            prop_assert_eq!(g.decode(), d);
        } else {
            prop_assert!(Genome::encode(&d).is_err());
        }
    }

    #[test]
    fn mutation_changes_exactly_one_cell(
        d in dfa_strategy(2),
        seed in 0..1_000u64,
        share in 0.0..=1.0f64,
    ) {
        if d.start() != 0 {
            return Ok(());
        }
        let g = Genome::encode(&d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = mutate(&g, share, &mut rng);
        prop_assert_eq!(m.state_count(), g.state_count());
        let cell_diffs = g
            .cells()
            .iter()
            .zip(m.cells())
            .filter(|(x, y)| x != y)
            .count();
        let output_diffs = g
            .outputs()
            .iter()
            .zip(m.outputs())
            .filter(|(x, y)| x != y)
            .count();
        prop_assert_eq!(cell_diffs + output_diffs, 1);
    }

    #[test]
    fn crossover_swaps_a_prefix_at_one_cut(
        d1 in dfa_strategy(2),
        d2 in dfa_strategy(2),
        seed in 0..1_000u64,
    ) {
        if d1.start() != 0 || d2.start() != 0 {
            return Ok(());
        }
        let p1 = Genome::encode(&d1).unwrap();
        let p2 = Genome::encode(&d2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c1, c2) = crossover(&p1, &p2, &mut rng).unwrap();
        let n = p1.state_count().max(p2.state_count());
        prop_assert_eq!(c1.state_count(), n);
        prop_assert_eq!(c2.state_count(), n);
        // clamp any target beyond a parent's own states, as crossover does
        let w = 2usize;
        let pad = |g: &Genome| -> (Vec<Option<usize>>, Vec<bool>) {
            let mut cells: Vec<Option<usize>> = g
                .cells()
                .iter()
                .map(|t| t.filter(|&x| x < n))
                .collect();
            cells.resize(n * w, None);
            let mut outputs = g.outputs().to_vec();
            outputs.resize(n, false);
            (cells, outputs)
        };
        let (a_cells, a_out) = pad(&p1);
        let (b_cells, b_out) = pad(&p2);
        let some_cut = (0..=n * w).any(|cut| {
            let r = cut / w;
            let want1: Vec<Option<usize>> = a_cells[..cut]
                .iter()
                .chain(&b_cells[cut..])
                .copied()
                .collect();
            let want2: Vec<Option<usize>> = b_cells[..cut]
                .iter()
                .chain(&a_cells[cut..])
                .copied()
                .collect();
            let wout1: Vec<bool> = a_out[..r].iter().chain(&b_out[r..]).copied().collect();
            let wout2: Vec<bool> = b_out[..r].iter().chain(&a_out[r..]).copied().collect();
            c1.cells() == want1.as_slice()
                && c2.cells() == want2.as_slice()
                && c1.outputs() == wout1.as_slice()
                && c2.outputs() == wout2.as_slice()
        });
        prop_assert!(some_cut, "children are not a one-cut exchange");
    }

    #[test]
    fn fitness_is_bounded_and_zero_only_when_consistent(
        d in dfa_strategy(2),
        s in sample_strategy(),
        k in 1..=4usize,
    ) {
        if d.start() != 0 || s.alphabet().len() != 2 {
            return Ok(());
        }
        let g = Genome::encode(&d).unwrap();
        let f = fitness(&g, &s, k).unwrap();
        prop_assert!((0.0..=1.0).contains(&f.f1));
        prop_assert!(f.f2 >= 0.0);
        let consistent = s.positives().iter().all(|p| d.accepts(p))
            && s.negatives().iter().all(|n| !d.accepts(n));
        prop_assert_eq!(f.f1 == 0.0, consistent);
    }

    #[test]
    fn clustering_agrees_with_oracle(
        d in dfa_strategy(2),
        strings in prop::collection::btree_set(string_strategy(2), 1..10),
    ) {
        let positives: Vec<String> = strings.into_iter().collect();
        let clustering = transition_clustering(&d, &positives);

        // oracle: trace each accepted string by hand in shortlex order, key
        // by the used transition triples plus the landing state
        let mut in_shortlex = positives.clone();
        in_shortlex.sort_by(|a, b| dfalearn::shortlex_cmp(a, b));
        let mut oracle: Vec<((Vec<(usize, usize, usize)>, usize), Vec<String>)> = Vec::new();
        for s in &in_shortlex {
            let mut q = d.start();
            let mut used = BTreeSet::new();
            let mut ok = true;
            for c in s.chars() {
                let sym = d.alphabet().index_of(c).unwrap();
                match d.transition(q, sym) {
                    Some(t) => {
                        used.insert((q, sym, t));
                        q = t;
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok || !d.is_accepting(q) {
                continue;
            }
            let key = (used.into_iter().collect::<Vec<_>>(), q);
            match oracle.iter_mut().find(|(k, _)| *k == key) {
                Some((_, members)) => members.push(s.clone()),
                None => oracle.push((key, vec![s.clone()])),
            }
        }

        prop_assert_eq!(clustering.records.len(), oracle.len());
        prop_assert_eq!(clustering.subs.len(), oracle.len());
        for (record, (key, members)) in clustering.records.iter().zip(&oracle) {
            let triples: Vec<(usize, usize, usize)> =
                record.transitions.iter().copied().collect();
            prop_assert_eq!(&triples, &key.0);
            prop_assert_eq!(record.final_state, key.1);
            prop_assert_eq!(&record.members, members);
        }
        // each sub-DFA accepts its own members and keeps the parent's size
        for (sub, record) in clustering.subs.iter().zip(&clustering.records) {
            prop_assert_eq!(sub.state_count(), d.state_count());
            for m in &record.members {
                prop_assert!(sub.accepts(m));
            }
            prop_assert_eq!(sub.accepting_states(), vec![record.final_state]);
        }
    }
}

#[test]
fn split_consistency_over_two_hundred_random_samples() {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut checked = 0;
    while checked < 220 {
        let width = rng.gen_range(1..=2);
        let pos_count = rng.gen_range(1..=9);
        let mut positives = BTreeSet::new();
        for _ in 0..pos_count {
            let len = rng.gen_range(0..=6);
            let s: String = (0..len)
                .map(|_| symbols(width)[rng.gen_range(0..width)])
                .collect();
            positives.insert(s);
        }
        let mut negatives = BTreeSet::new();
        for _ in 0..rng.gen_range(0..=5) {
            let len = rng.gen_range(0..=6);
            let s: String = (0..len)
                .map(|_| symbols(width)[rng.gen_range(0..width)])
                .collect();
            if !positives.contains(&s) {
                negatives.insert(s);
            }
        }
        let sample = LabeledSample::new(
            positives.iter().cloned().collect::<Vec<_>>(),
            negatives.iter().cloned().collect::<Vec<_>>(),
        )
        .unwrap();
        let k = rng.gen_range(1..=5);
        let split = rpni_splitting(&sample, k).unwrap();
        assert!(split.parts.len() <= k);
        let mut covered: Vec<String> = Vec::new();
        for part in &split.parts {
            for p in &part.positives {
                assert!(part.dfa.accepts(p), "part must accept {p:?}");
            }
            for n in sample.negatives() {
                assert!(!part.dfa.accepts(n), "part accepts negative {n:?}");
            }
            covered.extend(part.positives.iter().cloned());
        }
        covered.sort();
        assert_eq!(covered.len(), sample.positives().len());
        let mut expected = sample.positives().to_vec();
        expected.sort();
        assert_eq!(covered, expected);
        checked += 1;
    }
}
