//! Multi-objective evolutionary DFA learning.
//!
//! A genome is the flat transition matrix plus output array of a DFA whose
//! start state is 0. The search minimizes two objectives at once: f1, the
//! misclassification share on the sample, and f2, the distance between the
//! requested sub-DFA count k and the number of distinct transition paths the
//! positives take through the automaton. Selection is NSGA-II over the pooled
//! parent and offspring populations.

use crate::dfa::{Alphabet, Dfa};
use crate::sample::{shortlex_cmp, LabeledSample};
use crate::textio::serialize_dfa;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;
use std::collections::BTreeSet;

/// A DFA with start state 0, encoded as a row-major transition matrix (one
/// row per state, one column per alphabet symbol, entries are target states
/// or undefined) and a boolean output per state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Genome {
    alphabet: Alphabet,
    state_count: usize,
    cells: Vec<Option<usize>>,
    outputs: Vec<bool>,
}

impl Genome {
    /// Encodes a DFA. The genome layout has no start-state field, so the
    /// DFA's start must be state 0.
    pub fn encode(dfa: &Dfa) -> Result<Genome> {
        if dfa.start() != 0 {
            return Err(Error::InvalidDfa(
                "genome encoding requires start state 0".into(),
            ));
        }
        let alphabet = dfa.alphabet().clone();
        let n = dfa.state_count();
        let mut cells = Vec::with_capacity(n * alphabet.len());
        for q in 0..n {
            for sym in 0..alphabet.len() {
                cells.push(dfa.transition(q, sym));
            }
        }
        let outputs = (0..n).map(|q| dfa.is_accepting(q)).collect();
        Ok(Genome {
            alphabet,
            state_count: n,
            cells,
            outputs,
        })
    }

    pub fn decode(&self) -> Dfa {
        let w = self.alphabet.len();
        let transitions = (0..self.state_count)
            .map(|q| self.cells[q * w..(q + 1) * w].to_vec())
            .collect();
        Dfa::from_parts(
            self.alphabet.clone(),
            transitions,
            self.outputs.clone(),
            0,
        )
    }

    /// Chain acceptor for a single string: states 0..=len, one transition per
    /// symbol, only the last state accepting.
    fn single_string_chain(s: &str, alphabet: &Alphabet) -> Result<Genome> {
        let w = alphabet.len();
        let syms: Vec<usize> = s
            .chars()
            .map(|c| alphabet.index_of(c).ok_or(Error::SymbolNotInAlphabet(c)))
            .collect::<Result<_>>()?;
        let n = syms.len() + 1;
        let mut cells = vec![None; n * w];
        for (i, &sym) in syms.iter().enumerate() {
            cells[i * w + sym] = Some(i + 1);
        }
        let mut outputs = vec![false; n];
        outputs[n - 1] = true;
        Ok(Genome {
            alphabet: alphabet.clone(),
            state_count: n,
            cells,
            outputs,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    /// Flat row-major transition cells, `state * alphabet_len + symbol`.
    pub fn cells(&self) -> &[Option<usize>] {
        &self.cells
    }

    pub fn outputs(&self) -> &[bool] {
        &self.outputs
    }

    /// Canonical text of the decoded DFA; total order used for tie-breaking.
    fn tie_key(&self) -> String {
        serialize_dfa(&self.decode())
    }

    fn padded(&self, state_count: usize) -> Genome {
        debug_assert!(state_count >= self.state_count);
        let w = self.alphabet.len();
        let mut cells = self.cells.clone();
        cells.resize(state_count * w, None);
        let mut outputs = self.outputs.clone();
        outputs.resize(state_count, false);
        Genome {
            alphabet: self.alphabet.clone(),
            state_count,
            cells,
            outputs,
        }
    }
}

/// One genome per positive string (in the given order): its single-string
/// chain acceptor.
pub fn init_population(positives: &[String], alphabet: &Alphabet) -> Result<Vec<Genome>> {
    if positives.is_empty() {
        return Err(Error::EmptyPositiveSample);
    }
    positives
        .iter()
        .map(|s| Genome::single_string_chain(s, alphabet))
        .collect()
}

/// Returns a copy with exactly one cell changed. With probability
/// `output_share` one output bit is flipped; otherwise one matrix cell is
/// redrawn uniformly from the targets-or-undefined domain excluding its
/// current value. A genome with no matrix cells always takes the output path.
///
/// Random draws, in order: the path coin, the cell index, then (matrix path
/// only) the replacement value.
pub fn mutate<R: Rng>(genome: &Genome, output_share: f64, rng: &mut R) -> Genome {
    let mut child = genome.clone();
    let flip_output = rng.gen::<f64>() < output_share;
    if flip_output || child.cells.is_empty() {
        let idx = rng.gen_range(0..child.outputs.len());
        child.outputs[idx] = !child.outputs[idx];
        return child;
    }
    let idx = rng.gen_range(0..child.cells.len());
    // domain is {undefined, 0, .., n-1} minus the current value: n choices
    let current = child.cells[idx].map_or(0, |t| t + 1);
    let draw = rng.gen_range(0..child.state_count);
    let pos = if draw >= current { draw + 1 } else { draw };
    child.cells[idx] = if pos == 0 { None } else { Some(pos - 1) };
    child
}

/// Single-point crossover. Both parents are padded with undefined rows to the
/// larger state count, a cut index over the flattened matrix is drawn
/// (0..=len inclusive), and the children exchange suffixes; output arrays are
/// cut at the state the matrix cut falls in. Any target pointing past the
/// padded state count is dropped to undefined.
pub fn crossover<R: Rng>(p1: &Genome, p2: &Genome, rng: &mut R) -> Result<(Genome, Genome)> {
    if p1.alphabet != p2.alphabet {
        return Err(Error::InvalidDfa(
            "crossover parents use different alphabets".into(),
        ));
    }
    let n = p1.state_count.max(p2.state_count);
    let a = p1.padded(n);
    let b = p2.padded(n);
    let w = a.alphabet.len();
    let cut = rng.gen_range(0..=a.cells.len());
    let out_cut = cut.checked_div(w).unwrap_or(0);
    let clamp = |cells: Vec<Option<usize>>| -> Vec<Option<usize>> {
        cells
            .into_iter()
            .map(|t| t.filter(|&target| target < n))
            .collect()
    };
    let splice = |head: &Genome, tail: &Genome| -> Genome {
        let mut cells = head.cells[..cut].to_vec();
        cells.extend_from_slice(&tail.cells[cut..]);
        let mut outputs = head.outputs[..out_cut].to_vec();
        outputs.extend_from_slice(&tail.outputs[out_cut..]);
        Genome {
            alphabet: a.alphabet.clone(),
            state_count: n,
            cells: clamp(cells),
            outputs,
        }
    };
    Ok((splice(&a, &b), splice(&b, &a)))
}

/// Minimization objectives: `f1` is the misclassified share of the sample,
/// `f2` the normalized distance between the clustering count and k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitnessPair {
    pub f1: f64,
    pub f2: f64,
}

impl FitnessPair {
    /// Pareto dominance under minimization: no worse in both, better in one.
    pub fn dominates(&self, other: &FitnessPair) -> bool {
        self.f1 <= other.f1
            && self.f2 <= other.f2
            && (self.f1 < other.f1 || self.f2 < other.f2)
    }

    /// Total order by f1 then f2.
    pub fn lex_cmp(&self, other: &FitnessPair) -> Ordering {
        self.f1
            .partial_cmp(&other.f1)
            .unwrap()
            .then(self.f2.partial_cmp(&other.f2).unwrap())
    }

    pub fn is_perfect(&self) -> bool {
        self.f1 == 0.0 && self.f2 == 0.0
    }
}

/// The transition path of one accepted string: the set of traversed
/// transitions `(state, symbol index, target)` plus where it ended. Strings
/// sharing a record are listed together in `members` (shortlex order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathRecord {
    pub transitions: BTreeSet<(usize, usize, usize)>,
    pub states: BTreeSet<usize>,
    pub final_state: usize,
    pub members: Vec<String>,
}

/// Sub-DFAs extracted from one automaton by grouping accepted positives over
/// their path records. `subs[i]` is described by `records[i]`: it keeps the
/// parent's state indices, defines exactly the traversed transitions, and
/// accepts at the record's final state.
#[derive(Debug, Clone)]
pub struct SubDfaSet {
    pub subs: Vec<Dfa>,
    pub records: Vec<PathRecord>,
}

impl SubDfaSet {
    pub fn len(&self) -> usize {
        self.subs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subs.is_empty()
    }
}

/// Groups the accepted positives by the exact set of transitions they
/// traverse plus their final state; every distinct group becomes one sub-DFA.
/// Strings the automaton rejects contribute nothing. Records appear in first
/// occurrence order over the shortlex-sorted positives.
pub fn transition_clustering(dfa: &Dfa, positives: &[String]) -> SubDfaSet {
    let mut sorted: Vec<&String> = positives.iter().collect();
    sorted.sort_by(|a, b| shortlex_cmp(a, b));
    sorted.dedup();

    let mut records: Vec<PathRecord> = Vec::new();
    for s in sorted {
        let Some(record) = trace_path(dfa, s) else {
            continue;
        };
        match records.iter_mut().find(|r| {
            r.transitions == record.transitions && r.final_state == record.final_state
        }) {
            Some(existing) => existing.members.push(s.clone()),
            None => {
                let mut rec = record;
                rec.members.push(s.clone());
                records.push(rec);
            }
        }
    }

    let subs = records
        .iter()
        .map(|rec| {
            let w = dfa.alphabet().len();
            let mut trans = vec![vec![None; w]; dfa.state_count()];
            for &(q, sym, t) in &rec.transitions {
                trans[q][sym] = Some(t);
            }
            let mut accepting = vec![false; dfa.state_count()];
            accepting[rec.final_state] = true;
            Dfa::from_parts(dfa.alphabet().clone(), trans, accepting, dfa.start())
        })
        .collect();
    SubDfaSet { subs, records }
}

/// Path record of `s` through `dfa`, or `None` when `s` is not accepted.
/// `members` is left empty for the caller to fill.
fn trace_path(dfa: &Dfa, s: &str) -> Option<PathRecord> {
    let mut state = dfa.start();
    let mut transitions = BTreeSet::new();
    let mut states = BTreeSet::new();
    states.insert(state);
    for c in s.chars() {
        let sym = dfa.alphabet().index_of(c)?;
        let target = dfa.transition(state, sym)?;
        transitions.insert((state, sym, target));
        states.insert(target);
        state = target;
    }
    if !dfa.is_accepting(state) {
        return None;
    }
    Some(PathRecord {
        transitions,
        states,
        final_state: state,
        members: Vec::new(),
    })
}

/// Evaluates a genome: `f1 = 1 - accuracy` on the sample, `f2 = |1 - n/k|`
/// with n the number of distinct transition paths over the positives.
pub fn fitness(genome: &Genome, sample: &LabeledSample, k: usize) -> Result<FitnessPair> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    let dfa = genome.decode();
    let f1 = 1.0 - dfa.accuracy(sample)?;
    let n = transition_clustering(&dfa, sample.positives()).len();
    let f2 = (1.0 - n as f64 / k as f64).abs();
    Ok(FitnessPair { f1, f2 })
}

/// Non-dominated fronts of a fitness set, best front first. Within a front,
/// indices keep their input order.
pub fn pareto_fronts(fitness: &[FitnessPair]) -> Vec<Vec<usize>> {
    let n = fitness.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominates: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if fitness[i].dominates(&fitness[j]) {
                dominates[i].push(j);
                dominated_by[j] += 1;
            } else if fitness[j].dominates(&fitness[i]) {
                dominates[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// NSGA-II survivor selection: fill whole fronts in order; break the last,
/// partially fitting front by descending crowding distance (front boundary
/// points count as infinitely spread). Returns indices into `fitness`.
/// Deterministic: all ties fall back to ascending index.
pub fn nsga2_select(fitness: &[FitnessPair], target: usize) -> Vec<usize> {
    assert!(target <= fitness.len(), "cannot select more than offered");
    let mut selected = Vec::with_capacity(target);
    for front in pareto_fronts(fitness) {
        if selected.len() == target {
            break;
        }
        if selected.len() + front.len() <= target {
            selected.extend(front);
            continue;
        }
        let crowding = crowding_distances(fitness, &front);
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&x, &y| {
            crowding[y]
                .partial_cmp(&crowding[x])
                .unwrap()
                .then(front[x].cmp(&front[y]))
        });
        for &pos in order.iter().take(target - selected.len()) {
            selected.push(front[pos]);
        }
        break;
    }
    selected
}

fn crowding_distances(fitness: &[FitnessPair], front: &[usize]) -> Vec<f64> {
    let mut crowding = vec![0.0f64; front.len()];
    for objective in [|f: &FitnessPair| f.f1, |f: &FitnessPair| f.f2] {
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&x, &y| {
            objective(&fitness[front[x]])
                .partial_cmp(&objective(&fitness[front[y]]))
                .unwrap()
                .then(front[x].cmp(&front[y]))
        });
        let lo = objective(&fitness[front[order[0]]]);
        let hi = objective(&fitness[front[*order.last().unwrap()]]);
        crowding[order[0]] = f64::INFINITY;
        crowding[*order.last().unwrap()] = f64::INFINITY;
        if hi > lo {
            for w in order.windows(3) {
                let spread = objective(&fitness[front[w[2]]]) - objective(&fitness[front[w[0]]]);
                crowding[w[1]] += spread / (hi - lo);
            }
        }
    }
    crowding
}

/// Search parameters. `k` is the sub-DFA count the fitness targets.
#[derive(Debug, Clone, PartialEq)]
pub struct EaConfig {
    pub k: usize,
    pub population_size: usize,
    pub max_generations: usize,
    /// Probability that an offspring is mutated.
    pub mutation_rate: f64,
    /// Probability that a mutation flips an output bit instead of rewriting a
    /// matrix cell.
    pub output_mutation_share: f64,
    /// Probability that a parent pair recombines instead of being copied.
    pub crossover_rate: f64,
    pub rng_seed: u64,
}

impl Default for EaConfig {
    fn default() -> Self {
        EaConfig {
            k: 1,
            population_size: 64,
            max_generations: 500,
            mutation_rate: 0.8,
            output_mutation_share: 0.2,
            crossover_rate: 0.9,
            rng_seed: 0,
        }
    }
}

impl EaConfig {
    pub fn new(k: usize, rng_seed: u64) -> Self {
        EaConfig {
            k,
            rng_seed,
            ..EaConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if self.population_size < 2 {
            return Err(Error::InvalidConfig(
                "population_size must be at least 2".into(),
            ));
        }
        for (name, rate) in [
            ("mutation_rate", self.mutation_rate),
            ("output_mutation_share", self.output_mutation_share),
            ("crossover_rate", self.crossover_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be within [0, 1], got {rate}"
                )));
            }
        }
        Ok(())
    }

    /// Parses a flat `key = value` file (one pair per line, `#` comments).
    /// Unknown or repeated keys are rejected with their line number.
    pub fn from_key_values(text: &str) -> Result<EaConfig> {
        let mut config = EaConfig::default();
        let mut seen = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or(Error::Parse {
                line,
                message: format!("expected key = value, got {trimmed:?}"),
            })?;
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::Parse {
                    line,
                    message: format!("key {key:?} given twice"),
                });
            }
            let bad_int = |e: std::num::ParseIntError| Error::Parse {
                line,
                message: format!("{key}: {e}"),
            };
            let bad_float = |e: std::num::ParseFloatError| Error::Parse {
                line,
                message: format!("{key}: {e}"),
            };
            match key {
                "k" => config.k = value.parse().map_err(bad_int)?,
                "population_size" => config.population_size = value.parse().map_err(bad_int)?,
                "max_generations" => config.max_generations = value.parse().map_err(bad_int)?,
                "mutation_rate" => config.mutation_rate = value.parse().map_err(bad_float)?,
                "output_mutation_share" => {
                    config.output_mutation_share = value.parse().map_err(bad_float)?
                }
                "crossover_rate" => config.crossover_rate = value.parse().map_err(bad_float)?,
                "rng_seed" => config.rng_seed = value.parse().map_err(bad_int)?,
                other => {
                    return Err(Error::Parse {
                        line,
                        message: format!("unknown key {other:?}"),
                    })
                }
            }
        }
        config.validate()?;
        Ok(config)
    }
}

/// Snapshot of one generation: the population's lexicographically best
/// fitness and the size of its first non-dominated front.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryEntry {
    pub generation: usize,
    pub best: FitnessPair,
    pub front_size: usize,
}

#[derive(Debug, Clone)]
pub struct EvolutionOutcome {
    pub best: Genome,
    pub best_fitness: FitnessPair,
    pub history: Vec<HistoryEntry>,
}

/// History rows as CSV (`generation,best_f1,best_f2,front_size`).
pub fn history_csv(history: &[HistoryEntry]) -> String {
    let mut out = String::from("generation,best_f1,best_f2,front_size\n");
    for entry in history {
        out.push_str(&format!(
            "{},{},{},{}\n",
            entry.generation, entry.best.f1, entry.best.f2, entry.front_size
        ));
    }
    out
}

/// Runs the evolutionary search. The initial population holds one chain
/// acceptor per positive string; each generation breeds `population_size`
/// offspring (uniformly drawn parent pairs, crossover then mutation at the
/// configured rates), pools them with the parents, and selects survivors with
/// NSGA-II. The population's lexicographically best individual always
/// survives, so the reported best never worsens. Stops when an individual
/// reaches fitness (0, 0) or after `max_generations`.
///
/// Fully deterministic for a given config; the rng stream is consumed in
/// breeding order only.
pub fn evolve(sample: &LabeledSample, config: &EaConfig) -> Result<EvolutionOutcome> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut population = init_population(sample.positives(), sample.alphabet())?;
    let mut fits: Vec<FitnessPair> = population
        .iter()
        .map(|g| fitness(g, sample, config.k))
        .collect::<Result<_>>()?;

    let mut history = Vec::new();
    let mut best_idx = best_index(&population, &fits);
    history.push(HistoryEntry {
        generation: 0,
        best: fits[best_idx],
        front_size: pareto_fronts(&fits)[0].len(),
    });

    for generation in 1..=config.max_generations {
        if fits[best_idx].is_perfect() {
            break;
        }
        let mut offspring = Vec::with_capacity(config.population_size + 1);
        while offspring.len() < config.population_size {
            let i = rng.gen_range(0..population.len());
            let j = rng.gen_range(0..population.len());
            let (mut c1, mut c2) = if rng.gen::<f64>() < config.crossover_rate {
                crossover(&population[i], &population[j], &mut rng)?
            } else {
                (population[i].clone(), population[j].clone())
            };
            if rng.gen::<f64>() < config.mutation_rate {
                c1 = mutate(&c1, config.output_mutation_share, &mut rng);
            }
            if rng.gen::<f64>() < config.mutation_rate {
                c2 = mutate(&c2, config.output_mutation_share, &mut rng);
            }
            offspring.push(c1);
            offspring.push(c2);
        }
        offspring.truncate(config.population_size);

        let mut pool = population;
        let mut pool_fits = fits;
        for child in offspring {
            pool_fits.push(fitness(&child, sample, config.k)?);
            pool.push(child);
        }

        let pool_best = best_index(&pool, &pool_fits);
        let mut selected = nsga2_select(&pool_fits, config.population_size);
        let best_fit = pool_fits[pool_best];
        if !selected
            .iter()
            .any(|&i| pool_fits[i].lex_cmp(&best_fit) == Ordering::Equal)
        {
            // crowding can drop the single best individual from an oversized
            // first front; keep it alive in place of the worst survivor
            let worst = (0..selected.len())
                .max_by(|&x, &y| {
                    pool_fits[selected[x]]
                        .lex_cmp(&pool_fits[selected[y]])
                        .then(x.cmp(&y))
                })
                .unwrap();
            selected[worst] = pool_best;
        }

        population = selected.iter().map(|&i| pool[i].clone()).collect();
        fits = selected.iter().map(|&i| pool_fits[i]).collect();
        best_idx = best_index(&population, &fits);
        history.push(HistoryEntry {
            generation,
            best: fits[best_idx],
            front_size: pareto_fronts(&fits)[0].len(),
        });
        if fits[best_idx].is_perfect() {
            break;
        }
    }

    Ok(EvolutionOutcome {
        best: population[best_idx].clone(),
        best_fitness: fits[best_idx],
        history,
    })
}

/// Index of the best individual: lexicographically smallest fitness, ties
/// broken by smallest serialized form.
fn best_index(population: &[Genome], fits: &[FitnessPair]) -> usize {
    let mut best = 0usize;
    let mut best_key: Option<String> = None;
    for i in 1..population.len() {
        match fits[i].lex_cmp(&fits[best]) {
            Ordering::Less => {
                best = i;
                best_key = None;
            }
            Ordering::Equal => {
                let key = best_key.get_or_insert_with(|| population[best].tie_key());
                let candidate = population[i].tie_key();
                if candidate < *key {
                    best = i;
                    best_key = Some(candidate);
                }
            }
            Ordering::Greater => {}
        }
    }
    best
}

/// Clusters the positives through the decoded best individual, yielding the
/// final sub-DFA set.
pub fn extract_solution(best: &Genome, sample: &LabeledSample) -> SubDfaSet {
    transition_clustering(&best.decode(), sample.positives())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alphabet(s: &str) -> Alphabet {
        Alphabet::new(s.chars().collect()).unwrap()
    }

    fn sample(pos: &[&str], neg: &[&str]) -> LabeledSample {
        LabeledSample::new(
            pos.iter().map(|s| s.to_string()),
            neg.iter().map(|s| s.to_string()),
        )
        .unwrap()
    }

    fn clustering_parent() -> Dfa {
        Dfa::new(
            alphabet("ab"),
            8,
            0,
            vec![3, 6],
            vec![
                (0, 'a', 2),
                (0, 'b', 1),
                (1, 'b', 3),
                (2, 'a', 2),
                (2, 'b', 3),
                (3, 'a', 5),
                (3, 'b', 4),
                (4, 'a', 6),
                (4, 'b', 4),
                (5, 'b', 6),
                (6, 'a', 7),
                (7, 'b', 3),
            ],
        )
        .unwrap()
    }

    #[test]
    fn encode_decode_round_trip() {
        let dfa = clustering_parent();
        let genome = Genome::encode(&dfa).unwrap();
        assert_eq!(genome.decode(), dfa);
        assert_eq!(Genome::encode(&genome.decode()).unwrap(), genome);
    }

    #[test]
    fn encode_rejects_nonzero_start() {
        let dfa = Dfa::new(alphabet("a"), 2, 1, vec![0], vec![(1, 'a', 0)]).unwrap();
        assert!(Genome::encode(&dfa).is_err());
    }

    #[test]
    fn chain_genome_shape() {
        let genomes = init_population(&["ab".to_string()], &alphabet("ab")).unwrap();
        let g = &genomes[0];
        assert_eq!(g.state_count(), 3);
        assert_eq!(g.cells().iter().filter(|c| c.is_some()).count(), 2);
        assert_eq!(g.outputs(), &[false, false, true]);
    }

    #[test]
    fn initial_genomes_accept_exactly_their_string() {
        let positives = vec!["a".to_string(), "ab".to_string()];
        let genomes = init_population(&positives, &alphabet("ab")).unwrap();
        assert_eq!(genomes.len(), 2);
        assert_eq!(genomes[0].state_count(), 2);
        assert_eq!(genomes[1].state_count(), 3);
        for (g, own) in genomes.iter().zip(&positives) {
            let dfa = g.decode();
            for s in &positives {
                assert_eq!(dfa.accepts(s), s == own);
            }
        }
    }

    #[test]
    fn init_rejects_empty_positives() {
        assert!(init_population(&[], &alphabet("a")).is_err());
    }

    #[test]
    fn mutate_changes_exactly_one_cell() {
        let base = init_population(&["abab".to_string()], &alphabet("ab")).unwrap()[0].clone();
        for seed in 0..200u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let child = mutate(&base, 0.2, &mut rng);
            let cell_diffs = base
                .cells()
                .iter()
                .zip(child.cells())
                .filter(|(a, b)| a != b)
                .count();
            let output_diffs = base
                .outputs()
                .iter()
                .zip(child.outputs())
                .filter(|(a, b)| a != b)
                .count();
            assert_eq!(cell_diffs + output_diffs, 1, "seed {seed}");
        }
    }

    #[test]
    fn mutate_share_extremes_pick_the_right_array() {
        let base = init_population(&["ab".to_string()], &alphabet("ab")).unwrap()[0].clone();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let child = mutate(&base, 1.0, &mut rng);
        assert_eq!(child.cells(), base.cells());
        assert_ne!(child.outputs(), base.outputs());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let child = mutate(&base, 0.0, &mut rng);
        assert_ne!(child.cells(), base.cells());
        assert_eq!(child.outputs(), base.outputs());
    }

    #[test]
    fn crossover_of_equal_parents_is_identity() {
        let g = init_population(&["aba".to_string()], &alphabet("ab")).unwrap()[0].clone();
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (c1, c2) = crossover(&g, &g, &mut rng).unwrap();
            assert_eq!(c1, g);
            assert_eq!(c2, g);
        }
    }

    #[test]
    fn crossover_children_are_prefix_suffix_exchanges() {
        let pop = init_population(
            &["ab".to_string(), "babab".to_string()],
            &alphabet("ab"),
        )
        .unwrap();
        let (p1, p2) = (&pop[0], &pop[1]);
        let n = p1.state_count().max(p2.state_count());
        let (a, b) = (p1.padded(n), p2.padded(n));
        let w = 2;
        for seed in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (c1, c2) = crossover(p1, p2, &mut rng).unwrap();
            assert_eq!(c1.state_count(), n);
            assert_eq!(c2.state_count(), n);
            let matches_cut = |c: usize| {
                let mut expect1 = a.cells()[..c].to_vec();
                expect1.extend_from_slice(&b.cells()[c..]);
                let mut expect2 = b.cells()[..c].to_vec();
                expect2.extend_from_slice(&a.cells()[c..]);
                let r = c / w;
                let mut out1 = a.outputs()[..r].to_vec();
                out1.extend_from_slice(&b.outputs()[r..]);
                let mut out2 = b.outputs()[..r].to_vec();
                out2.extend_from_slice(&a.outputs()[r..]);
                c1.cells() == expect1.as_slice()
                    && c2.cells() == expect2.as_slice()
                    && c1.outputs() == out1.as_slice()
                    && c2.outputs() == out2.as_slice()
            };
            assert!(
                (0..=a.cells().len()).any(matches_cut),
                "seed {seed} produced children not explained by any single cut"
            );
        }
    }

    #[test]
    fn crossover_rejects_alphabet_mismatch() {
        let g1 = init_population(&["a".to_string()], &alphabet("a")).unwrap()[0].clone();
        let g2 = init_population(&["b".to_string()], &alphabet("b")).unwrap()[0].clone();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(crossover(&g1, &g2, &mut rng).is_err());
    }

    #[test]
    fn clustering_on_the_reference_parent_matches_the_four_records() {
        let dfa = clustering_parent();
        let positives: Vec<String> = [
            "abab",
            "ababab",
            "abababab",
            "abbba",
            "abbbbba",
            "abbbbbbba",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let set = transition_clustering(&dfa, &positives);
        assert_eq!(set.len(), 4);
        let pairs: Vec<(BTreeSet<(usize, usize)>, usize)> = set
            .records
            .iter()
            .map(|r| {
                (
                    r.transitions.iter().map(|&(q, _, t)| (q, t)).collect(),
                    r.final_state,
                )
            })
            .collect();
        let expect = |edges: &[(usize, usize)], fin: usize| {
            (edges.iter().copied().collect::<BTreeSet<_>>(), fin)
        };
        assert_eq!(
            pairs,
            vec![
                expect(&[(0, 2), (2, 3), (3, 5), (5, 6)], 6),
                expect(&[(0, 2), (2, 3), (3, 4), (4, 4), (4, 6)], 6),
                expect(&[(0, 2), (2, 3), (3, 5), (5, 6), (6, 7), (7, 3)], 3),
                expect(&[(0, 2), (2, 3), (3, 5), (5, 6), (6, 7), (7, 3)], 6),
            ]
        );
        assert_eq!(set.records[1].members, vec!["abbba", "abbbbba", "abbbbbbba"]);
        for (sub, rec) in set.subs.iter().zip(&set.records) {
            assert_eq!(sub.accepting_states(), vec![rec.final_state]);
            for member in &rec.members {
                assert!(sub.accepts(member));
            }
        }
    }

    #[test]
    fn clustering_skips_rejected_strings() {
        let dfa = clustering_parent();
        let set = transition_clustering(&dfa, &["bbb".to_string(), "a".to_string()]);
        assert!(set.is_empty());
    }

    #[test]
    fn clustering_merges_identical_records() {
        // a* in one state: "a" and "aa" traverse the same single transition
        let dfa = Dfa::new(alphabet("a"), 1, 0, vec![0], vec![(0, 'a', 0)]).unwrap();
        let set = transition_clustering(&dfa, &["a".to_string(), "aa".to_string()]);
        assert_eq!(set.len(), 1);
        assert_eq!(set.records[0].members, vec!["a", "aa"]);
    }

    #[test]
    fn fitness_matches_hand_computation() {
        // chain for "a" on S+={a}, S-={b}, k=1: everything classified, one path
        let g = init_population(&["a".to_string()], &alphabet("ab")).unwrap()[0].clone();
        let s = sample(&["a"], &["b"]);
        let fit = fitness(&g, &s, 1).unwrap();
        assert_eq!(fit, FitnessPair { f1: 0.0, f2: 0.0 });
        assert!(fit.is_perfect());

        // two paths, k=4: f2 = |1 - 2/4|
        let two = Dfa::new(
            alphabet("ab"),
            3,
            0,
            vec![1, 2],
            vec![(0, 'a', 1), (0, 'b', 2)],
        )
        .unwrap();
        let fit = fitness(&Genome::encode(&two).unwrap(), &sample(&["a", "b"], &[]), 4).unwrap();
        assert_eq!(fit, FitnessPair { f1: 0.0, f2: 0.5 });

        // all-rejecting DFA, |S+| = |S-|: half misclassified, zero paths
        let dead = Dfa::new(alphabet("ab"), 1, 0, vec![], vec![]).unwrap();
        let fit = fitness(
            &Genome::encode(&dead).unwrap(),
            &sample(&["a", "aa"], &["b", "bb"]),
            3,
        )
        .unwrap();
        assert_eq!(fit, FitnessPair { f1: 0.5, f2: 1.0 });
    }

    #[test]
    fn dominance_and_selection_basics() {
        let f = |f1: f64, f2: f64| FitnessPair { f1, f2 };
        assert!(f(0.2, 0.5).dominates(&f(0.4, 0.6)));
        assert!(!f(0.1, 0.9).dominates(&f(0.9, 0.1)));
        assert!(!f(0.3, 0.3).dominates(&f(0.3, 0.3)));

        assert_eq!(nsga2_select(&[f(0.2, 0.5), f(0.4, 0.6)], 1), vec![0]);
        assert_eq!(nsga2_select(&[f(0.1, 0.9), f(0.9, 0.1)], 2), vec![0, 1]);
    }

    #[test]
    fn collinear_front_prefers_the_extremes() {
        let f = |f1: f64, f2: f64| FitnessPair { f1, f2 };
        let fits = [f(0.1, 0.9), f(0.2, 0.8), f(0.3, 0.7)];
        let mut picked = nsga2_select(&fits, 2);
        picked.sort_unstable();
        assert_eq!(picked, vec![0, 2]);
    }

    #[test]
    fn fronts_partition_by_domination_depth() {
        let f = |f1: f64, f2: f64| FitnessPair { f1, f2 };
        // (0,0) dominates everything; (1,2)/(2,1) mutually non-dominated;
        // (3,3) dominated by all
        let fits = [f(3.0, 3.0), f(0.0, 0.0), f(1.0, 2.0), f(2.0, 1.0)];
        let fronts = pareto_fronts(&fits);
        assert_eq!(fronts, vec![vec![1], vec![2, 3], vec![0]]);
    }

    #[test]
    fn perfect_initial_genome_stops_at_generation_zero() {
        let s = sample(&["a"], &["b"]);
        let config = EaConfig::new(1, 11);
        let outcome = evolve(&s, &config).unwrap();
        assert_eq!(outcome.history.len(), 1);
        assert_eq!(outcome.history[0].generation, 0);
        assert!(outcome.best_fitness.is_perfect());
    }

    #[test]
    fn evolve_is_deterministic_and_monotone() {
        let s = sample(&["a", "aa", "ab"], &["b", "bb"]);
        let mut config = EaConfig::new(2, 42);
        config.population_size = 16;
        config.max_generations = 30;
        let a = evolve(&s, &config).unwrap();
        let b = evolve(&s, &config).unwrap();
        assert_eq!(a.history, b.history);
        assert_eq!(a.best, b.best);
        for w in a.history.windows(2) {
            assert!(
                w[1].best.lex_cmp(&w[0].best) != Ordering::Greater,
                "best fitness worsened from {:?} to {:?}",
                w[0].best,
                w[1].best
            );
        }
    }

    #[test]
    fn history_never_exceeds_generation_budget() {
        let s = sample(&["aba", "ab"], &["b", "a"]);
        let mut config = EaConfig::new(3, 9);
        config.population_size = 8;
        config.max_generations = 5;
        let outcome = evolve(&s, &config).unwrap();
        assert!(outcome.history.len() <= config.max_generations + 1);
        let csv = history_csv(&outcome.history);
        assert!(csv.starts_with("generation,best_f1,best_f2,front_size\n"));
        assert_eq!(csv.lines().count(), outcome.history.len() + 1);
    }

    #[test]
    fn config_file_round_trip_and_errors() {
        let parsed = EaConfig::from_key_values(
            "# tuning\nk = 2\npopulation_size = 16\nmutation_rate = 0.5\n\nrng_seed = 7\n",
        )
        .unwrap();
        assert_eq!(parsed.k, 2);
        assert_eq!(parsed.population_size, 16);
        assert_eq!(parsed.mutation_rate, 0.5);
        assert_eq!(parsed.rng_seed, 7);
        assert_eq!(parsed.max_generations, EaConfig::default().max_generations);

        match EaConfig::from_key_values("k = 2\nwhatever = 3\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        match EaConfig::from_key_values("k = 2\nk = 3\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected duplicate-key error, got {other:?}"),
        }
        assert!(EaConfig::from_key_values("mutation_rate = 1.5\n").is_err());
        assert!(EaConfig::from_key_values("population_size = 1\n").is_err());
    }

    #[test]
    fn extract_solution_clusters_the_best_genome() {
        let s = sample(&["a", "b"], &[]);
        let two = Dfa::new(
            alphabet("ab"),
            3,
            0,
            vec![1, 2],
            vec![(0, 'a', 1), (0, 'b', 2)],
        )
        .unwrap();
        let genome = Genome::encode(&two).unwrap();
        let set = extract_solution(&genome, &s);
        assert_eq!(set.len(), 2);
        assert!(set.subs[0].accepts("a") ^ set.subs[1].accepts("a"));
    }
}
