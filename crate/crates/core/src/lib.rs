//! Learn sets of deterministic finite automata from positively and negatively
//! labeled strings.
//!
//! The crate provides a shared automata substrate ([`Dfa`], [`Alphabet`],
//! [`LabeledSample`], prefix tree construction, file formats), two learners
//! that produce one DFA per inferred sub-language (red/blue state merging with
//! split extraction in [`merging`], a multi-objective evolutionary search in
//! [`evolution`]), and a benchmark harness over six small target languages in
//! [`evaluation`].

pub mod dfa;
pub mod evaluation;
pub mod evolution;
pub mod merging;
pub mod pta;
pub mod sample;
pub mod textio;

pub use dfa::{difference_witness, Alphabet, Dfa};
pub use evaluation::{make_dataset, purity, run_grid, ExperimentConfig, GridSpec, LanguageId, Method, PurityReport};
pub use evolution::{evolve, extract_solution, history_csv, transition_clustering, EaConfig, EvolutionOutcome, SubDfaSet};
pub use merging::{rpni_compatible, rpni_splitting, standard_rpni, MergeContext, SplitResult};
pub use pta::build_pta;
pub use sample::{shortlex_cmp, LabeledSample};

use std::fmt;

/// Errors shared across the crate. Parse errors carry 1-based line numbers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    EmptyPositiveSample,
    EmptySample,
    OverlappingSample(String),
    SymbolNotInAlphabet(char),
    InvalidDfa(String),
    Parse { line: usize, message: String },
    InvalidConfig(String),
    SamplerExhausted(String),
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyPositiveSample => write!(f, "empty positive sample"),
            Error::EmptySample => write!(f, "sample has no strings"),
            Error::OverlappingSample(s) => {
                write!(f, "string {s:?} is labeled both positive and negative")
            }
            Error::SymbolNotInAlphabet(c) => write!(f, "symbol '{c}' not in alphabet"),
            Error::InvalidDfa(msg) => write!(f, "invalid dfa: {msg}"),
            Error::Parse { line, message } => write!(f, "line {line}: {message}"),
            Error::InvalidConfig(msg) => write!(f, "invalid config: {msg}"),
            Error::SamplerExhausted(msg) => write!(f, "sampler exhausted: {msg}"),
            Error::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
