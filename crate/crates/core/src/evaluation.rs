//! Benchmark harness: six small target languages over {a, b, c}, seeded
//! sample generation, train/test splitting, purity scoring, and the
//! (k, language subset, density, method, seed) grid.

use crate::dfa::{Alphabet, Dfa};
use crate::evolution::{evolve, extract_solution, EaConfig};
use crate::merging::{rpni_splitting, standard_rpni};
use crate::sample::LabeledSample;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeSet;
use std::time::Instant;

/// Longest string the generators produce.
pub const MAX_SAMPLE_LEN: usize = 24;

/// Success probability of the geometric draw for repetition counts.
const GEOMETRIC_P: f64 = 0.3;

/// Rejection-sampling attempts before giving up on a pattern.
const MAX_DRAWS: usize = 10_000_000;

/// The six benchmark languages. Names follow their patterns: `a+`,
/// `(ab)^(>=2)`, `(abc)+`, `ab+a`, `a+b+`, `a(bc)+a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LanguageId {
    APlus,
    AbGe2,
    AbcPlus,
    ABPlusA,
    APlusBPlus,
    ABcPlusA,
}

impl LanguageId {
    pub const ALL: [LanguageId; 6] = [
        LanguageId::APlus,
        LanguageId::AbGe2,
        LanguageId::AbcPlus,
        LanguageId::ABPlusA,
        LanguageId::APlusBPlus,
        LanguageId::ABcPlusA,
    ];

    /// Stable id used in CSV output.
    pub fn as_str(&self) -> &'static str {
        match self {
            LanguageId::APlus => "A_PLUS",
            LanguageId::AbGe2 => "AB_GE2",
            LanguageId::AbcPlus => "ABC_PLUS",
            LanguageId::ABPlusA => "A_BPLUS_A",
            LanguageId::APlusBPlus => "APLUS_BPLUS",
            LanguageId::ABcPlusA => "A_BC_PLUS_A",
        }
    }

    pub fn membership(&self, s: &str) -> bool {
        let b = s.as_bytes();
        match self {
            LanguageId::APlus => !b.is_empty() && b.iter().all(|&c| c == b'a'),
            LanguageId::AbGe2 => {
                b.len() >= 4 && b.len() % 2 == 0 && b.chunks(2).all(|c| c == b"ab")
            }
            LanguageId::AbcPlus => {
                b.len() >= 3 && b.len() % 3 == 0 && b.chunks(3).all(|c| c == b"abc")
            }
            LanguageId::ABPlusA => {
                b.len() >= 3
                    && b[0] == b'a'
                    && b[b.len() - 1] == b'a'
                    && b[1..b.len() - 1].iter().all(|&c| c == b'b')
            }
            LanguageId::APlusBPlus => {
                let a_run = b.iter().take_while(|&&c| c == b'a').count();
                a_run >= 1 && a_run < b.len() && b[a_run..].iter().all(|&c| c == b'b')
            }
            LanguageId::ABcPlusA => {
                b.len() >= 4
                    && b.len() % 2 == 0
                    && b[0] == b'a'
                    && b[b.len() - 1] == b'a'
                    && b[1..b.len() - 1].chunks(2).all(|c| c == b"bc")
            }
        }
    }

    /// Number of member strings no longer than [`MAX_SAMPLE_LEN`].
    pub fn inventory(&self) -> usize {
        match self {
            // a^n, 1 <= n <= 24
            LanguageId::APlus => MAX_SAMPLE_LEN,
            // (ab)^n, 2 <= n <= 12
            LanguageId::AbGe2 => MAX_SAMPLE_LEN / 2 - 1,
            // (abc)^n, 1 <= n <= 8
            LanguageId::AbcPlus => MAX_SAMPLE_LEN / 3,
            // a b^n a, 1 <= n <= 22
            LanguageId::ABPlusA => MAX_SAMPLE_LEN - 2,
            // a^m b^n, m,n >= 1, m+n <= 24
            LanguageId::APlusBPlus => MAX_SAMPLE_LEN * (MAX_SAMPLE_LEN - 1) / 2,
            // a (bc)^n a, 1 <= n <= 11
            LanguageId::ABcPlusA => (MAX_SAMPLE_LEN - 2) / 2,
        }
    }

    /// Hand-built acceptor for the language, over the full {a, b, c}
    /// alphabet so it can be compared against any benchmark string.
    pub fn reference_dfa(&self) -> Dfa {
        let alphabet = benchmark_alphabet();
        let dfa = |states: usize, accepting: Vec<usize>, trans: Vec<(usize, char, usize)>| {
            Dfa::new(alphabet.clone(), states, 0, accepting, trans)
                .expect("reference automata are well formed")
        };
        match self {
            LanguageId::APlus => dfa(2, vec![1], vec![(0, 'a', 1), (1, 'a', 1)]),
            LanguageId::AbGe2 => dfa(
                5,
                vec![4],
                vec![
                    (0, 'a', 1),
                    (1, 'b', 2),
                    (2, 'a', 3),
                    (3, 'b', 4),
                    (4, 'a', 3),
                ],
            ),
            LanguageId::AbcPlus => dfa(
                4,
                vec![3],
                vec![(0, 'a', 1), (1, 'b', 2), (2, 'c', 3), (3, 'a', 1)],
            ),
            LanguageId::ABPlusA => dfa(
                4,
                vec![3],
                vec![(0, 'a', 1), (1, 'b', 2), (2, 'b', 2), (2, 'a', 3)],
            ),
            LanguageId::APlusBPlus => dfa(
                3,
                vec![2],
                vec![(0, 'a', 1), (1, 'a', 1), (1, 'b', 2), (2, 'b', 2)],
            ),
            LanguageId::ABcPlusA => dfa(
                5,
                vec![4],
                vec![
                    (0, 'a', 1),
                    (1, 'b', 2),
                    (2, 'c', 3),
                    (3, 'b', 2),
                    (3, 'a', 4),
                ],
            ),
        }
    }
}

pub fn benchmark_alphabet() -> Alphabet {
    Alphabet::new(vec!['a', 'b', 'c']).expect("three fixed symbols")
}

/// Number of extra repetitions beyond a pattern's minimum.
fn geometric<R: Rng>(rng: &mut R) -> usize {
    let mut n = 0;
    while rng.gen::<f64>() >= GEOMETRIC_P {
        n += 1;
    }
    n
}

/// One member string of the language, with repetition counts drawn
/// geometrically above the pattern minimum; redraws anything longer than
/// [`MAX_SAMPLE_LEN`].
fn draw_member<R: Rng>(lang: LanguageId, rng: &mut R) -> String {
    loop {
        let s = match lang {
            LanguageId::APlus => "a".repeat(1 + geometric(rng)),
            LanguageId::AbGe2 => "ab".repeat(2 + geometric(rng)),
            LanguageId::AbcPlus => "abc".repeat(1 + geometric(rng)),
            LanguageId::ABPlusA => format!("a{}a", "b".repeat(1 + geometric(rng))),
            LanguageId::APlusBPlus => {
                let a_run = 1 + geometric(rng);
                let b_run = 1 + geometric(rng);
                format!("{}{}", "a".repeat(a_run), "b".repeat(b_run))
            }
            LanguageId::ABcPlusA => format!("a{}a", "bc".repeat(1 + geometric(rng))),
        };
        if s.len() <= MAX_SAMPLE_LEN {
            debug_assert!(lang.membership(&s));
            return s;
        }
    }
}

/// `count` distinct member strings, shortlex-sorted. Fails when the length
/// cap leaves fewer than `count` members in the whole language.
pub fn sample_language<R: Rng>(lang: LanguageId, count: usize, rng: &mut R) -> Result<Vec<String>> {
    if count > lang.inventory() {
        return Err(Error::SamplerExhausted(format!(
            "{} has only {} strings of length <= {}, needed {}",
            lang.as_str(),
            lang.inventory(),
            MAX_SAMPLE_LEN,
            count
        )));
    }
    let mut seen = BTreeSet::new();
    let mut draws = 0usize;
    while seen.len() < count {
        draws += 1;
        if draws > MAX_DRAWS {
            return Err(Error::SamplerExhausted(format!(
                "{}: no new string after {} draws",
                lang.as_str(),
                MAX_DRAWS
            )));
        }
        seen.insert(draw_member(lang, rng));
    }
    let mut out: Vec<String> = seen.into_iter().collect();
    out.sort_by(|a, b| crate::sample::shortlex_cmp(a, b));
    Ok(out)
}

/// Which learner a benchmark cell runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    /// Merging with split extraction, k as the split budget.
    Rp,
    /// Evolutionary search plus path clustering, k as the target count.
    Ea,
    /// Plain merging producing one DFA; baseline, ignores k.
    Single,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Rp => "RP",
            Method::Ea => "EA",
            Method::Single => "SINGLE",
        }
    }

    pub fn parse(s: &str) -> Result<Method> {
        match s {
            "RP" | "rp" => Ok(Method::Rp),
            "EA" | "ea" => Ok(Method::Ea),
            "SINGLE" | "single" => Ok(Method::Single),
            other => Err(Error::InvalidConfig(format!("unknown method {other:?}"))),
        }
    }
}

/// One benchmark cell: which languages to mix, how much of the generated
/// data becomes training input, and which learner to run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub languages: Vec<LanguageId>,
    pub density: f64,
    pub method: Method,
    pub total_strings: usize,
    pub seed: u64,
    pub ea: Option<EaConfig>,
}

impl ExperimentConfig {
    /// Sorted, deduplicated languages; fails on an empty set, a density
    /// outside (0, 1), or a string budget below one per language.
    fn normalized_languages(&self) -> Result<Vec<LanguageId>> {
        let langs: BTreeSet<LanguageId> = self.languages.iter().copied().collect();
        if langs.is_empty() {
            return Err(Error::InvalidConfig("no languages selected".into()));
        }
        if !(self.density > 0.0 && self.density < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "density must be within (0, 1), got {}",
                self.density
            )));
        }
        if self.total_strings < langs.len() {
            return Err(Error::InvalidConfig(format!(
                "total_strings {} cannot cover {} languages",
                self.total_strings,
                langs.len()
            )));
        }
        Ok(langs.into_iter().collect())
    }
}

/// Training sample plus labeled test strings. The test side is a multiset:
/// the same member string may occur several times, never one from train.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub train: LabeledSample,
    pub test: Vec<(String, LanguageId)>,
}

/// Splits `n` into `parts` non-negative summands, earlier parts taking the
/// remainder first.
fn distribute(n: usize, parts: usize) -> Vec<usize> {
    (0..parts).map(|i| n / parts + usize::from(i < n % parts)).collect()
}

/// Generates the benchmark dataset for one cell: the string budget is split
/// evenly across the languages; per language, the training share is drawn as
/// distinct strings and the rest of the budget becomes labeled test draws
/// (repeats allowed, training strings excluded). The negative side of the
/// training sample is every string of length 1 or 2 over {a, b, c} that
/// belongs to none of the selected languages.
pub fn make_dataset<R: Rng>(config: &ExperimentConfig, rng: &mut R) -> Result<Dataset> {
    let languages = config.normalized_languages()?;
    let k = languages.len();
    let total = config.total_strings;
    let quotas = distribute(total, k);
    let train_total = ((config.density * total as f64).ceil() as usize).max(k);
    let train_quotas = distribute(train_total, k);

    let mut train_pos: Vec<String> = Vec::new();
    let mut test: Vec<(String, LanguageId)> = Vec::new();
    for ((&lang, &quota), &train_quota) in languages.iter().zip(&quotas).zip(&train_quotas) {
        debug_assert!(train_quota <= quota);
        let train_strings = sample_language(lang, train_quota, rng)?;
        let train_set: BTreeSet<&String> = train_strings.iter().collect();
        let test_quota = quota - train_quota;
        if test_quota > 0 && lang.inventory() == train_quota {
            return Err(Error::SamplerExhausted(format!(
                "{}: all {} strings of length <= {} used for training, none left to test on",
                lang.as_str(),
                train_quota,
                MAX_SAMPLE_LEN
            )));
        }
        let mut draws = 0usize;
        let mut produced = 0usize;
        while produced < test_quota {
            draws += 1;
            if draws > MAX_DRAWS {
                return Err(Error::SamplerExhausted(format!(
                    "{}: no test string clear of training after {} draws",
                    lang.as_str(),
                    MAX_DRAWS
                )));
            }
            let s = draw_member(lang, rng);
            if train_set.contains(&s) {
                continue;
            }
            test.push((s, lang));
            produced += 1;
        }
        train_pos.extend(train_strings);
    }
    if test.is_empty() {
        return Err(Error::InvalidConfig(
            "density leaves no test strings".into(),
        ));
    }

    let negatives = sigma_one_two()
        .into_iter()
        .filter(|s| languages.iter().all(|lang| !lang.membership(s)));
    let train = LabeledSample::with_alphabet(train_pos, negatives, benchmark_alphabet())?;
    Ok(Dataset { train, test })
}

/// All strings of length 1 or 2 over {a, b, c}, shortlex order.
pub fn sigma_one_two() -> Vec<String> {
    let symbols = ['a', 'b', 'c'];
    let mut out: Vec<String> = symbols.iter().map(|c| c.to_string()).collect();
    for x in symbols {
        for y in symbols {
            out.push(format!("{x}{y}"));
        }
    }
    out
}

/// Share of test strings captured per true language by its best-matching
/// learned automaton: `(1/|T|) * Σ_lang max_dfa |{(s, l) in T : l = lang,
/// dfa accepts s}|`. An empty learner list scores 0; an empty test set is an
/// error.
pub fn purity(test: &[(String, LanguageId)], learned: &[Dfa]) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::EmptySample);
    }
    let langs: BTreeSet<LanguageId> = test.iter().map(|&(_, l)| l).collect();
    let mut captured = 0usize;
    for lang in langs {
        let members: Vec<&str> = test
            .iter()
            .filter(|&&(_, l)| l == lang)
            .map(|(s, _)| s.as_str())
            .collect();
        captured += learned
            .iter()
            .map(|dfa| members.iter().filter(|s| dfa.accepts(s)).count())
            .max()
            .unwrap_or(0);
    }
    Ok(captured as f64 / test.len() as f64)
}

/// Full benchmark sweep parameters.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub ks: Vec<usize>,
    pub densities: Vec<f64>,
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    pub total_strings: usize,
    pub ea: Option<EaConfig>,
}

impl GridSpec {
    /// The benchmark defaults: k 2..=5, five densities from 0.02 to 0.20,
    /// merging-with-splits only.
    pub fn new(seeds: Vec<u64>) -> Self {
        GridSpec {
            ks: (2..=5).collect(),
            densities: vec![0.02, 0.05, 0.10, 0.15, 0.20],
            methods: vec![Method::Rp],
            seeds,
            total_strings: 100,
            ea: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PurityRow {
    pub method: Method,
    pub k: usize,
    pub languages: Vec<LanguageId>,
    pub density: f64,
    pub seed: u64,
    pub purity: f64,
    pub dfa_count: usize,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone)]
pub struct ErrorRow {
    pub method: Method,
    pub k: usize,
    pub languages: Vec<LanguageId>,
    pub density: f64,
    pub seed: u64,
    pub message: String,
}

/// All grid results: per-cell purity rows plus the cells that failed
/// (infeasible sampling for their density, mostly).
#[derive(Debug, Clone)]
pub struct PurityReport {
    pub rows: Vec<PurityRow>,
    pub errors: Vec<ErrorRow>,
}

fn join_languages(languages: &[LanguageId]) -> String {
    languages
        .iter()
        .map(|l| l.as_str())
        .collect::<Vec<_>>()
        .join("+")
}

impl PurityReport {
    /// Per-cell rows: `method,k,languages,density,seed,purity,dfa_count,runtime_ms`.
    pub fn results_csv(&self) -> String {
        let mut out = String::from("method,k,languages,density,seed,purity,dfa_count,runtime_ms\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.method.as_str(),
                r.k,
                join_languages(&r.languages),
                r.density,
                r.seed,
                r.purity,
                r.dfa_count,
                r.runtime_ms
            ));
        }
        out
    }

    /// Mean and sample standard deviation of purity per (method, k, density).
    pub fn summary_csv(&self) -> String {
        let mut groups: Vec<((Method, usize, u64), Vec<f64>)> = Vec::new();
        for r in &self.rows {
            let key = (r.method, r.k, r.density.to_bits());
            match groups.iter_mut().find(|(k, _)| *k == key) {
                Some((_, values)) => values.push(r.purity),
                None => groups.push((key, vec![r.purity])),
            }
        }
        groups.sort_by_key(|g| g.0);
        let mut out = String::from("method,k,density,runs,mean_purity,stddev_purity\n");
        for ((method, k, density_bits), values) in groups {
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let stddev = if values.len() > 1 {
                (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                method.as_str(),
                k,
                f64::from_bits(density_bits),
                values.len(),
                mean,
                stddev
            ));
        }
        out
    }

    /// Failed cells: `method,k,languages,density,seed,error` with the message
    /// quoted.
    pub fn errors_csv(&self) -> String {
        let mut out = String::from("method,k,languages,density,seed,error\n");
        for r in &self.errors {
            out.push_str(&format!(
                "{},{},{},{},{},\"{}\"\n",
                r.method.as_str(),
                r.k,
                join_languages(&r.languages),
                r.density,
                r.seed,
                r.message.replace('"', "\"\"")
            ));
        }
        out
    }
}

/// Stable digest mixing a cell's coordinates into its private rng seed, so
/// cells are independent and insensitive to grid iteration order.
fn cell_seed(seed: u64, k: usize, languages: &[LanguageId], density: f64, method: Method) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let mut eat = |x: u64| {
        for byte in x.to_le_bytes() {
            h = (h ^ u64::from(byte)).wrapping_mul(PRIME);
        }
    };
    eat(seed);
    eat(k as u64);
    for lang in languages {
        eat(LanguageId::ALL.iter().position(|l| l == lang).unwrap() as u64);
    }
    eat(density.to_bits());
    eat(match method {
        Method::Rp => 0,
        Method::Ea => 1,
        Method::Single => 2,
    });
    h
}

fn subsets_of_size(k: usize) -> Vec<Vec<LanguageId>> {
    fn go(start: usize, k: usize, current: &mut Vec<LanguageId>, out: &mut Vec<Vec<LanguageId>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..LanguageId::ALL.len() {
            current.push(LanguageId::ALL[i]);
            go(i + 1, k, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    go(0, k, &mut Vec::new(), &mut out);
    out
}

/// Runs one grid cell: dataset generation, learning, purity.
fn run_cell(
    method: Method,
    k: usize,
    languages: &[LanguageId],
    density: f64,
    seed: u64,
    total_strings: usize,
    ea: &Option<EaConfig>,
) -> Result<PurityRow> {
    let derived = cell_seed(seed, k, languages, density, method);
    let mut rng = ChaCha8Rng::seed_from_u64(derived);
    let config = ExperimentConfig {
        languages: languages.to_vec(),
        density,
        method,
        total_strings,
        seed: derived,
        ea: ea.clone(),
    };
    let started = Instant::now();
    let dataset = make_dataset(&config, &mut rng)?;
    let dfas: Vec<Dfa> = match method {
        Method::Rp => rpni_splitting(&dataset.train, k)?
            .parts
            .into_iter()
            .map(|p| p.dfa)
            .collect(),
        Method::Single => vec![standard_rpni(&dataset.train)?],
        Method::Ea => {
            let mut ea_config = ea.clone().unwrap_or_default();
            ea_config.k = k;
            ea_config.rng_seed = derived;
            let outcome = evolve(&dataset.train, &ea_config)?;
            extract_solution(&outcome.best, &dataset.train).subs
        }
    };
    let purity = purity(&dataset.test, &dfas)?;
    Ok(PurityRow {
        method,
        k,
        languages: languages.to_vec(),
        density,
        seed,
        purity,
        dfa_count: dfas.len(),
        runtime_ms: started.elapsed().as_millis() as u64,
    })
}

/// Sweeps every (k, language subset of size k, density, method, seed) cell,
/// in parallel. Failed cells land in the report's error list; rows come out
/// sorted regardless of scheduling.
pub fn run_grid(spec: &GridSpec) -> PurityReport {
    let mut cells = Vec::new();
    for &k in &spec.ks {
        for subset in subsets_of_size(k) {
            for &density in &spec.densities {
                for &method in &spec.methods {
                    for &seed in &spec.seeds {
                        cells.push((method, k, subset.clone(), density, seed));
                    }
                }
            }
        }
    }
    let outcomes: Vec<std::result::Result<PurityRow, ErrorRow>> = cells
        .par_iter()
        .map(|(method, k, languages, density, seed)| {
            run_cell(
                *method,
                *k,
                languages,
                *density,
                *seed,
                spec.total_strings,
                &spec.ea,
            )
            .map_err(|e| ErrorRow {
                method: *method,
                k: *k,
                languages: languages.clone(),
                density: *density,
                seed: *seed,
                message: e.to_string(),
            })
        })
        .collect();

    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(row) => rows.push(row),
            Err(err) => errors.push(err),
        }
    }
    let row_key = |m: Method, k: usize, langs: &[LanguageId], d: f64, s: u64| {
        (m, k, langs.to_vec(), d.to_bits(), s)
    };
    rows.sort_by_key(|r| row_key(r.method, r.k, &r.languages, r.density, r.seed));
    errors.sort_by_key(|r| row_key(r.method, r.k, &r.languages, r.density, r.seed));
    PurityReport { rows, errors }
}
