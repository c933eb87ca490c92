//! `fptcov`: solve, reduce, verify, benchmark and generate fair coverage instances.
//!
//! Exit codes: 0 solved or feasible, 1 no solution, 2 budget exceeded,
//! 64 usage error, 65 data error.

mod load;
mod report;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fptcov::exact::{exact_maxsat, exact_pccds, exact_pccds_matroid, DEFAULT_ENUMERATION_LIMIT};
use fptcov::formats::{write_colored_cnf, write_set_system};
use fptcov::freqd::{pccds_matroid_solve, pccds_solve, SolveConfig, SolveOutcome, Trials, DEFAULT_TRIAL_CAP};
use fptcov::generate::{gen_cnf, gen_freq_d, gen_kdd_free, DemandMode, GenParams};
use fptcov::kddfree::{kdd_pccds, kdd_pccds_matroid, HashMode, KddConfig, KddSolver, LabelMode, DEFAULT_REPETITION_CAP};
use fptcov::reduction::{
    default_probability, reduce_and_solve_with, CoverageSolver, ExactSolver, FreqdSolver,
};
use fptcov::{derive_seed, parse_rational, CoverageInstance, MatroidOracle, Rational};

use report::{emit, Format, Outcome, Params, RunReport};

pub enum Failure {
    Usage(String),
    Data(String),
    Budget(String),
}

impl From<fptcov::Error> for Failure {
    fn from(e: fptcov::Error) -> Self {
        match e {
            fptcov::Error::Input(_) => Failure::Data(e.to_string()),
            fptcov::Error::Size(_) => Failure::Budget(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "fptcov", version, about = "Approximation schemes for fair coverage and colored MaxSAT")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Freqd,
    Kdd,
    Exact,
}

impl Algorithm {
    fn name(self) -> &'static str {
        match self {
            Algorithm::Freqd => "freqd",
            Algorithm::Kdd => "kdd",
            Algorithm::Exact => "exact",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum HashArg {
    Exhaustive,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DemandArg {
    Planted,
    Random,
}

impl From<DemandArg> for DemandMode {
    fn from(d: DemandArg) -> Self {
        match d {
            DemandArg::Planted => DemandMode::Planted,
            DemandArg::Random => DemandMode::Random,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GenKind {
    FreqD,
    KddFree,
    Cnf,
}

/// `auto` or a fixed count.
#[derive(Clone, Copy, Debug, PartialEq)]
enum TrialsArg {
    Auto,
    Fixed(u64),
}

impl std::fmt::Display for TrialsArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TrialsArg::Auto => f.write_str("auto"),
            TrialsArg::Fixed(n) => write!(f, "{n}"),
        }
    }
}

fn parse_trials(s: &str) -> Result<TrialsArg, String> {
    if s == "auto" {
        return Ok(TrialsArg::Auto);
    }
    match s.parse::<u64>() {
        Ok(0) | Err(_) => Err(format!("expected `auto` or a positive count, got `{s}`")),
        Ok(n) => Ok(TrialsArg::Fixed(n)),
    }
}

fn parse_rat(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Args, Clone, Debug)]
struct SolverArgs {
    #[arg(long, value_enum, default_value_t = Algorithm::Freqd)]
    algorithm: Algorithm,
    #[arg(long, default_value = "1/2", value_parser = parse_rat)]
    epsilon: Rational,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "auto", value_parser = parse_trials)]
    trials: TrialsArg,
    #[arg(long, default_value_t = DEFAULT_TRIAL_CAP)]
    trial_cap: u64,
    /// Biclique parameter; required by `kdd`.
    #[arg(long)]
    d: Option<usize>,
    /// Check that the input has no `d` sets sharing `d` elements before solving.
    #[arg(long)]
    strict_kdd: bool,
    /// Enumerate a perfect hash family instead of drawing random labels.
    #[arg(long)]
    derandomize: bool,
    /// Label count for `--derandomize`.
    #[arg(long)]
    labels: Option<u32>,
    #[arg(long, value_enum, default_value_t = HashArg::Random)]
    hash: HashArg,
    /// Repetitions of the randomized label search.
    #[arg(long, default_value_t = DEFAULT_REPETITION_CAP)]
    repetitions: u64,
}

#[derive(Args, Clone, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Column separator of the table format.
    #[arg(long, default_value = "\t")]
    delimiter: String,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a set system (or a colored CNF formula exactly).
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        matroid: Option<PathBuf>,
        /// Write the report as a JSON solution file.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Solve a colored CNF formula through the random reduction.
    Reduce {
        instance: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Probability of a variable in the seed assignment; defaults to eps / 2r.
        #[arg(long, value_parser = parse_rat)]
        probability: Option<Rational>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Recompute coverage, size and independence of a claimed solution.
    Verify {
        instance: PathBuf,
        solution: PathBuf,
        /// Defaults to the epsilon recorded in the solution file, else 0.
        #[arg(long, value_parser = parse_rat)]
        epsilon: Option<Rational>,
        #[arg(long)]
        matroid: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run algorithms over a grid of generated instances.
    Bench {
        #[arg(long, value_enum, default_value_t = GenKind::FreqD)]
        kind: GenKind,
        /// Instances per grid cell.
        #[arg(long, default_value_t = 20)]
        instances: usize,
        #[arg(long, value_delimiter = ',', default_value = "10")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "12")]
        m: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        k: Vec<usize>,
        #[arg(long, value_delimiter = ',', value_parser = parse_rat, default_value = "3/10")]
        epsilon: Vec<Rational>,
        #[arg(long, value_delimiter = ',', value_enum, default_value = "freqd,exact")]
        algorithms: Vec<Algorithm>,
        #[arg(long, value_enum, default_value_t = DemandArg::Planted)]
        demands: DemandArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "auto", value_parser = parse_trials)]
        trials: TrialsArg,
        #[arg(long, default_value_t = DEFAULT_TRIAL_CAP)]
        trial_cap: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Generate a random instance.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = DemandArg::Planted)]
        demands: DemandArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_set_size: usize,
        #[arg(long, default_value_t = 10_000)]
        attempts: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn ms_since(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn check_flags(s: &SolverArgs) -> Result<(), Failure> {
    fptcov::rational::check_epsilon(s.epsilon).map_err(|e| Failure::Usage(e.to_string()))?;
    if s.algorithm == Algorithm::Kdd && s.d.is_none() {
        return Err(Failure::Usage("algorithm kdd needs --d".into()));
    }
    if s.algorithm != Algorithm::Kdd && (s.strict_kdd || s.derandomize || s.labels.is_some()) {
        return Err(Failure::Usage("--strict-kdd, --derandomize and --labels apply to algorithm kdd only".into()));
    }
    if s.labels.is_some() && !s.derandomize {
        return Err(Failure::Usage("--labels needs --derandomize".into()));
    }
    if s.labels == Some(0) {
        return Err(Failure::Usage("--labels must be positive".into()));
    }
    Ok(())
}

fn solve_config(s: &SolverArgs) -> SolveConfig {
    let trials = match s.trials {
        TrialsArg::Auto => Trials::Auto { c: 1.0 },
        TrialsArg::Fixed(n) => Trials::Fixed(n),
    };
    SolveConfig { trials, trial_cap: s.trial_cap, seed: s.seed }
}

fn kdd_config(s: &SolverArgs) -> KddConfig {
    let d = s.d.expect("checked by check_flags");
    let mode = if s.derandomize {
        let hash = match s.hash {
            HashArg::Exhaustive => HashMode::Exhaustive,
            HashArg::Random => HashMode::RandomVerified { seed: s.seed, max_functions: 1_000_000 },
        };
        LabelMode::Derandomized { labels: s.labels, hash }
    } else {
        LabelMode::Randomized { repetition_cap: s.repetitions }
    };
    KddConfig { strict: s.strict_kdd, mode, seed: s.seed, ..KddConfig::new(d) }
}

fn params(id: String, s: &SolverArgs, matroid: Option<String>) -> Params {
    let trials = match s.algorithm {
        Algorithm::Exact => "-".into(),
        Algorithm::Kdd if s.derandomize => "hash".into(),
        Algorithm::Kdd => s.repetitions.to_string(),
        Algorithm::Freqd => s.trials.to_string(),
    };
    Params { instance: id, algorithm: s.algorithm.name().into(), eps: s.epsilon, trials, seed: s.seed, d: s.d, matroid }
}

/// Runs one algorithm on a set system; the report carries recomputed coverage.
fn run_sets(
    inst: &CoverageInstance,
    matroid: Option<&MatroidOracle>,
    s: &SolverArgs,
    p: &Params,
) -> Result<RunReport, Failure> {
    let start = Instant::now();
    let (outcome, solution, runs) = match s.algorithm {
        Algorithm::Freqd => {
            let cfg = solve_config(s);
            let rep = match matroid {
                Some(m) => pccds_matroid_solve(inst, m, s.epsilon, &cfg)?,
                None => pccds_solve(inst, s.epsilon, &cfg)?,
            };
            match rep.outcome {
                SolveOutcome::Found(sol) => (Outcome::Solution, Some(sol), rep.trials_run),
                SolveOutcome::NotFound => (Outcome::No, None, rep.trials_run),
                SolveOutcome::BudgetExceeded => (Outcome::BudgetExceeded, None, rep.trials_run),
            }
        }
        Algorithm::Kdd => {
            let cfg = kdd_config(s);
            let rep = match matroid {
                Some(m) => kdd_pccds_matroid(inst, m, s.epsilon, &cfg)?,
                None => kdd_pccds(inst, s.epsilon, &cfg)?,
            };
            let outcome = if rep.solution.is_some() { Outcome::Solution } else { Outcome::No };
            (outcome, rep.solution, rep.labelings_run)
        }
        Algorithm::Exact => {
            let res = match matroid {
                Some(m) => exact_pccds_matroid(inst, m, DEFAULT_ENUMERATION_LIMIT)?,
                None => exact_pccds(inst, DEFAULT_ENUMERATION_LIMIT)?,
            };
            if res.feasible {
                (Outcome::Solution, res.best_solution, 1)
            } else {
                (Outcome::No, None, 1)
            }
        }
    };
    Ok(RunReport::for_sets(p, inst, matroid, outcome, solution, runs).timed(ms_since(start)))
}

fn exit_for(outcome: Outcome) -> u8 {
    match outcome {
        Outcome::Solution => 0,
        Outcome::No => 1,
        Outcome::BudgetExceeded => 2,
    }
}

fn write_output(path: &Path, r: &RunReport) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(r).expect("report serializes") + "\n";
    fs::write(path, text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn print(reports: &[RunReport], out: &OutputArgs) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    emit(&mut lock, reports, out.format, &out.delimiter)?;
    lock.flush()?;
    Ok(())
}

fn cmd_solve(
    path: &Path,
    s: &SolverArgs,
    matroid: Option<&Path>,
    output: Option<&Path>,
    out: &OutputArgs,
) -> Result<u8, Failure> {
    check_flags(s)?;
    let inst = match load::instance(path)? {
        load::Loaded::Sets(inst) => inst,
        load::Loaded::Cnf(phi) => {
            if s.algorithm != Algorithm::Exact || matroid.is_some() {
                return Err(Failure::Usage("colored CNF is solved by `reduce`, or by `solve --algorithm exact`".into()));
            }
            let start = Instant::now();
            let res = exact_maxsat(&phi, DEFAULT_ENUMERATION_LIMIT)?;
            let vars = res
                .best_solution
                .filter(|_| res.feasible)
                .map(|values| (1..=values.len()).filter(|&v| values[v - 1]).collect());
            let outcome = if vars.is_some() { Outcome::Solution } else { Outcome::No };
            let report = RunReport::for_cnf(&params(load::id(path), s, None), &phi, outcome, vars, 1).timed(ms_since(start));
            if let Some(o) = output {
                write_output(o, &report)?;
            }
            print(std::slice::from_ref(&report), out)?;
            return Ok(exit_for(report.outcome));
        }
    };
    let spec = matroid.map(load::matroid).transpose()?;
    let oracle = spec.as_ref().map(|m| m.build(inst.num_sets())).transpose()?;
    let p = params(load::id(path), s, spec.as_ref().map(|m| m.kind().to_string()));
    let report = run_sets(&inst, oracle.as_ref(), s, &p)?;
    if let Some(o) = output {
        write_output(o, &report)?;
    }
    print(std::slice::from_ref(&report), out)?;
    Ok(exit_for(report.outcome))
}

fn cmd_reduce(
    path: &Path,
    s: &SolverArgs,
    probability: Option<Rational>,
    output: Option<&Path>,
    out: &OutputArgs,
) -> Result<u8, Failure> {
    check_flags(s)?;
    let phi = load::cnf(path)?;
    let eps = s.epsilon;
    // auto: ceil(4 (2r/eps)^k) rounds, capped
    let rounds = match s.trials {
        TrialsArg::Fixed(n) => n,
        TrialsArg::Auto => {
            let base = fptcov::rational::to_f64(&(Rational::from_integer(2 * phi.num_colors().max(1) as i64) / eps));
            let planned = (4.0 * base.powi(phi.budget() as i32)).ceil();
            if planned > s.trial_cap as f64 {
                s.trial_cap.max(1)
            } else {
                planned as u64
            }
        }
    };
    let p = probability.unwrap_or_else(|| default_probability(eps, phi.num_colors()));
    let solver: Box<dyn CoverageSolver> = match s.algorithm {
        Algorithm::Exact => Box::new(ExactSolver { limit: DEFAULT_ENUMERATION_LIMIT }),
        Algorithm::Freqd => Box::new(FreqdSolver {
            eps,
            config: SolveConfig { trials: Trials::Auto { c: 1.0 }, trial_cap: s.trial_cap, seed: 0 },
        }),
        Algorithm::Kdd => Box::new(KddSolver { eps, config: kdd_config(s) }),
    };
    let start = Instant::now();
    let rep = reduce_and_solve_with(&phi, eps, p, solver.as_ref(), rounds, s.seed)?;
    let params = Params {
        instance: load::id(path),
        algorithm: format!("reduce+{}", s.algorithm.name()),
        eps,
        trials: s.trials.to_string(),
        seed: s.seed,
        d: s.d,
        matroid: None,
    };
    let (outcome, vars) = match rep.best {
        Some(a) => (Outcome::Solution, Some(a.true_vars())),
        None => (Outcome::No, None),
    };
    let report = RunReport::for_cnf(&params, &phi, outcome, vars, rounds).timed(ms_since(start));
    if let Some(o) = output {
        write_output(o, &report)?;
    }
    print(std::slice::from_ref(&report), out)?;
    Ok(if report.success { 0 } else { 1 })
}

#[derive(serde::Deserialize)]
struct RecordedEps {
    epsilon: Option<String>,
}

fn cmd_verify(
    path: &Path,
    solution: &Path,
    epsilon: Option<Rational>,
    matroid: Option<&Path>,
    out: &OutputArgs,
) -> Result<u8, Failure> {
    let claimed = load::solution(solution)?;
    let eps = match epsilon {
        Some(e) => e,
        None => {
            let text = fs::read_to_string(solution)?;
            let rec: RecordedEps = serde_json::from_str(&text).map_err(|e| Failure::Data(e.to_string()))?;
            rec.epsilon.map(|t| parse_rational(&t)).transpose()?.unwrap_or_default()
        }
    };
    if eps < Rational::default() || eps >= Rational::from_integer(1) {
        return Err(Failure::Usage("epsilon must lie in [0, 1)".into()));
    }
    let base = |m: Option<String>| Params {
        instance: load::id(path),
        algorithm: "verify".into(),
        eps,
        trials: "-".into(),
        seed: 0,
        d: None,
        matroid: m,
    };
    let report = match load::instance(path)? {
        load::Loaded::Sets(inst) => {
            let spec = matroid.map(load::matroid).transpose()?;
            let oracle = spec.as_ref().map(|m| m.build(inst.num_sets())).transpose()?;
            RunReport::for_sets(&base(spec.map(|m| m.kind().into())), &inst, oracle.as_ref(), Outcome::Solution, Some(claimed), 0)
        }
        load::Loaded::Cnf(phi) => {
            if matroid.is_some() {
                return Err(Failure::Usage("--matroid applies to set systems only".into()));
            }
            RunReport::for_cnf(&base(None), &phi, Outcome::Solution, Some(claimed), 0)
        }
    };
    print(std::slice::from_ref(&report), out)?;
    Ok(if report.success { 0 } else { 1 })
}

struct BenchGrid<'a> {
    kind: GenKind,
    instances: usize,
    n: &'a [usize],
    m: &'a [usize],
    d: usize,
    r: usize,
    k: &'a [usize],
    epsilon: &'a [Rational],
    algorithms: &'a [Algorithm],
    demands: DemandArg,
    seed: u64,
    trials: TrialsArg,
    trial_cap: u64,
}

/// Rows ordered by grid cell, then instance, then algorithm. Instance `i` of
/// cell `c` is generated from `derive_seed(seed, c * instances + i)`.
fn bench_rows(g: &BenchGrid) -> Result<Vec<RunReport>, Failure> {
    if g.kind == GenKind::Cnf {
        return Err(Failure::Usage("bench runs set-system generators only".into()));
    }
    let mut rows = Vec::new();
    let mut cell = 0u64;
    for &n in g.n {
        for &m in g.m {
            for &k in g.k {
                for &eps in g.epsilon {
                    fptcov::rational::check_epsilon(eps).map_err(|e| Failure::Usage(e.to_string()))?;
                    for i in 0..g.instances {
                        let seed = derive_seed(g.seed, cell * g.instances as u64 + i as u64);
                        let gp = GenParams { seed, demands: g.demands.into(), ..GenParams::new(n, m, g.d, g.r, k) };
                        let inst = match g.kind {
                            GenKind::FreqD => gen_freq_d(&gp)?.instance,
                            _ => gen_kdd_free(&gp)?.instance,
                        };
                        let id = format!("n{n}-m{m}-k{k}-i{i}");
                        for &alg in g.algorithms {
                            let s = SolverArgs {
                                algorithm: alg,
                                epsilon: eps,
                                seed: derive_seed(seed, 1),
                                trials: g.trials,
                                trial_cap: g.trial_cap,
                                d: (alg == Algorithm::Kdd).then_some(g.d),
                                strict_kdd: false,
                                derandomize: false,
                                labels: None,
                                hash: HashArg::Random,
                                repetitions: DEFAULT_REPETITION_CAP,
                            };
                            rows.push(run_sets(&inst, None, &s, &params(id.clone(), &s, None))?);
                        }
                    }
                    cell += 1;
                }
            }
        }
    }
    Ok(rows)
}

fn cmd_gen(
    kind: GenKind,
    p: GenParams,
    output: Option<&Path>,
) -> Result<u8, Failure> {
    let text = match kind {
        GenKind::FreqD => write_set_system(&gen_freq_d(&p)?.instance),
        GenKind::KddFree => write_set_system(&gen_kdd_free(&p)?.instance),
        GenKind::Cnf => write_colored_cnf(&gen_cnf(&p)?.instance),
    };
    match output {
        Some(o) => fs::write(o, text).map_err(|e| Failure::Data(format!("{}: {e}", o.display())))?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Solve { instance, solver, matroid, output, out } => {
            cmd_solve(&instance, &solver, matroid.as_deref(), output.as_deref(), &out)
        }
        Command::Reduce { instance, solver, probability, output, out } => {
            cmd_reduce(&instance, &solver, probability, output.as_deref(), &out)
        }
        Command::Verify { instance, solution, epsilon, matroid, out } => {
            cmd_verify(&instance, &solution, epsilon, matroid.as_deref(), &out)
        }
        Command::Bench { kind, instances, n, m, d, r, k, epsilon, algorithms, demands, seed, trials, trial_cap, out } => {
            let grid = BenchGrid {
                kind,
                instances,
                n: &n,
                m: &m,
                d,
                r,
                k: &k,
                epsilon: &epsilon,
                algorithms: &algorithms,
                demands,
                seed,
                trials,
                trial_cap,
            };
            print(&bench_rows(&grid)?, &out)?;
            Ok(0)
        }
        Command::Gen { kind, n, m, d, r, k, demands, seed, max_set_size, attempts, output } => {
            let p = GenParams { demands: demands.into(), seed, max_set_size, attempts, ..GenParams::new(n, m, d, r, k) };
            cmd_gen(kind, p, output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (64, m),
                Failure::Data(m) => (65, m),
                Failure::Budget(m) => (2, m),
            };
            eprintln!("fptcov: {msg}");
            ExitCode::from(code)
        }
    }
}
