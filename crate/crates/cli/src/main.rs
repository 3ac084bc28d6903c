//! Command line front end: learn, split, evolve, cluster, and benchmark
//! DFA sets from labeled string files.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors (unreadable
//! files, malformed input, infeasible configurations).

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use dfalearn::evaluation::{GridSpec, Method};
use dfalearn::evolution::{history_csv, EaConfig};
use dfalearn::textio::{deserialize_dfa, parse_sample, serialize_dfa, to_dot};
use dfalearn::{
    build_pta, evolve, extract_solution, rpni_splitting, run_grid, standard_rpni,
    transition_clustering, Dfa, LabeledSample,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "dfalearn",
    version,
    about = "Learn sets of DFAs from positively and negatively labeled strings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the prefix tree acceptor of a sample
    Pta(SampleArgs),
    /// Learn a single DFA by state merging
    Rpni(SampleArgs),
    /// Learn up to k DFAs by state merging with split extraction
    RpniSplit(SplitArgs),
    /// Learn up to k DFAs by evolutionary search
    Ea(EaArgs),
    /// Group a sample's accepted strings by the transitions they use in a DFA
    Cluster(ClusterArgs),
    /// Run the purity benchmark grid and write CSV reports
    Bench(BenchArgs),
    /// Print a DFA in Graphviz DOT form
    Dot(DotArgs),
}

#[derive(Args)]
struct SampleArgs {
    /// Labeled sample file
    #[arg(long)]
    sample: PathBuf,
}

#[derive(Args)]
struct SplitArgs {
    /// Labeled sample file
    #[arg(long)]
    sample: PathBuf,
    /// Split budget: at most this many DFAs
    #[arg(long)]
    k: usize,
}

#[derive(Args)]
struct EaArgs {
    /// Labeled sample file
    #[arg(long)]
    sample: PathBuf,
    /// Target number of DFAs
    #[arg(long)]
    k: usize,
    /// Seed for all random draws
    #[arg(long)]
    seed: u64,
    /// Population size
    #[arg(long)]
    pop: Option<usize>,
    /// Generation budget
    #[arg(long)]
    gens: Option<usize>,
}

#[derive(Args)]
struct ClusterArgs {
    /// DFA file
    #[arg(long)]
    dfa: PathBuf,
    /// Labeled sample file; only its positive strings are traced
    #[arg(long)]
    sample: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory for results.csv, summary.csv, and errors.csv
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated seeds, one grid pass per seed
    #[arg(long, value_delimiter = ',', required = true)]
    seeds: Vec<u64>,
    /// Comma-separated methods to run (RP, EA, SINGLE)
    #[arg(long, value_delimiter = ',', default_value = "RP")]
    methods: Vec<String>,
    /// Strings generated per grid cell
    #[arg(long, default_value_t = 100)]
    total: usize,
}

#[derive(Args)]
struct DotArgs {
    /// DFA file
    #[arg(long)]
    dfa: PathBuf,
}

/// A data-level failure; maps to exit code 2.
struct DataError(String);

impl<E: std::fmt::Display> From<E> for DataError {
    fn from(e: E) -> Self {
        DataError(e.to_string())
    }
}

fn read_to_string(path: &Path) -> Result<String, DataError> {
    std::fs::read_to_string(path)
        .map_err(|e| DataError(format!("cannot read {}: {e}", path.display())))
}

fn load_sample(path: &Path) -> Result<LabeledSample, DataError> {
    let text = read_to_string(path)?;
    parse_sample(&text).map_err(|e| DataError(format!("{}: {e}", path.display())))
}

fn load_dfa(path: &Path) -> Result<Dfa, DataError> {
    let text = read_to_string(path)?;
    deserialize_dfa(&text).map_err(|e| DataError(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> Result<(), DataError> {
    std::fs::write(path, content)
        .map_err(|e| DataError(format!("cannot write {}: {e}", path.display())))
}

/// Output path `<stem>.<suffix>` next to `input`.
fn sibling(input: &Path, suffix: &str) -> PathBuf {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    input.with_file_name(format!("{stem}.{suffix}"))
}

/// Writes each DFA to `<stem>.sub<i>.dfa` (1-based) next to the input file
/// and prints the paths written.
fn emit_sub_dfas(input: &Path, dfas: &[Dfa]) -> Result<(), DataError> {
    for (i, dfa) in dfas.iter().enumerate() {
        let path = sibling(input, &format!("sub{}.dfa", i + 1));
        write_file(&path, &serialize_dfa(dfa))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn cmd_pta(args: &SampleArgs) -> Result<(), DataError> {
    let sample = load_sample(&args.sample)?;
    let pta = build_pta(&sample)?;
    print!("{}", serialize_dfa(&pta));
    Ok(())
}

fn cmd_rpni(args: &SampleArgs) -> Result<(), DataError> {
    let sample = load_sample(&args.sample)?;
    let dfa = standard_rpni(&sample)?;
    print!("{}", serialize_dfa(&dfa));
    Ok(())
}

fn cmd_rpni_split(args: &SplitArgs) -> Result<(), DataError> {
    let sample = load_sample(&args.sample)?;
    let split = rpni_splitting(&sample, args.k)?;
    let dfas: Vec<Dfa> = split.dfas().cloned().collect();
    emit_sub_dfas(&args.sample, &dfas)
}

fn cmd_ea(args: &EaArgs) -> Result<(), DataError> {
    let sample = load_sample(&args.sample)?;
    let mut config = EaConfig::new(args.k, args.seed);
    if let Some(pop) = args.pop {
        config.population_size = pop;
    }
    if let Some(gens) = args.gens {
        config.max_generations = gens;
    }
    let outcome = evolve(&sample, &config)?;
    let solution = extract_solution(&outcome.best, &sample);
    emit_sub_dfas(&args.sample, &solution.subs)?;
    let history_path = sibling(&args.sample, "history.csv");
    write_file(&history_path, &history_csv(&outcome.history))?;
    println!("{}", history_path.display());
    Ok(())
}

fn cmd_cluster(args: &ClusterArgs) -> Result<(), DataError> {
    let dfa = load_dfa(&args.dfa)?;
    let sample = load_sample(&args.sample)?;
    for p in sample.positives() {
        for c in p.chars() {
            if dfa.alphabet().index_of(c).is_none() {
                return Err(DataError(format!(
                    "{}: symbol '{c}' not in the alphabet of {}",
                    args.sample.display(),
                    args.dfa.display()
                )));
            }
        }
    }
    let clustering = transition_clustering(&dfa, sample.positives());
    for record in &clustering.records {
        let trans: Vec<String> = record
            .transitions
            .iter()
            .map(|&(q, s, t)| format!("({q},{},{t})", dfa.alphabet().symbol(s)))
            .collect();
        println!(
            "transitions {{{}}} final {} strings {}",
            trans.join(" "),
            record.final_state,
            record.members.join(" ")
        );
    }
    emit_sub_dfas(&args.dfa, &clustering.subs)
}

fn cmd_bench(args: &BenchArgs) -> Result<(), DataError> {
    let mut methods = Vec::new();
    for m in &args.methods {
        methods.push(Method::parse(m)?);
    }
    let mut spec = GridSpec::new(args.seeds.clone());
    spec.methods = methods;
    spec.total_strings = args.total;
    let report = run_grid(&spec);
    std::fs::create_dir_all(&args.out)
        .map_err(|e| DataError(format!("cannot create {}: {e}", args.out.display())))?;
    let results = args.out.join("results.csv");
    write_file(&results, &report.results_csv())?;
    println!("{}", results.display());
    let summary = args.out.join("summary.csv");
    write_file(&summary, &report.summary_csv())?;
    println!("{}", summary.display());
    if !report.errors.is_empty() {
        let errors = args.out.join("errors.csv");
        write_file(&errors, &report.errors_csv())?;
        println!("{}", errors.display());
    }
    eprintln!(
        "{} cells ok, {} infeasible",
        report.rows.len(),
        report.errors.len()
    );
    Ok(())
}

fn cmd_dot(args: &DotArgs) -> Result<(), DataError> {
    let dfa = load_dfa(&args.dfa)?;
    print!("{}", to_dot(&dfa));
    Ok(())
}

fn main() -> ExitCode {
    // die quietly when the read end of a pipe closes (e.g. `... | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Pta(args) => cmd_pta(args),
        Command::Rpni(args) => cmd_rpni(args),
        Command::RpniSplit(args) => cmd_rpni_split(args),
        Command::Ea(args) => cmd_ea(args),
        Command::Cluster(args) => cmd_cluster(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Dot(args) => cmd_dot(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(DataError(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
