use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;

use fptcov::{format_rational, CnfInstance, CoverageInstance, MatroidOracle, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Solution,
    No,
    BudgetExceeded,
}

impl Outcome {
    fn as_str(self) -> &'static str {
        match self {
            Outcome::Solution => "solution",
            Outcome::No => "no",
            Outcome::BudgetExceeded => "budget-exceeded",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub instance: String,
    pub algorithm: String,
    pub epsilon: String,
    pub trials: String,
    pub seed: u64,
    pub d: Option<usize>,
    pub matroid: Option<String>,
    pub outcome: Outcome,
    /// Set ids (0-based), or true variables (1-based) for CNF.
    pub solution: Option<Vec<usize>>,
    pub runs: u64,
    pub coverage: Vec<usize>,
    pub demands: Vec<String>,
    pub success: bool,
    pub wall_ms: f64,
}

/// Run parameters shared by every report of one invocation.
#[derive(Clone, Debug)]
pub struct Params {
    pub instance: String,
    pub algorithm: String,
    pub eps: Rational,
    pub trials: String,
    pub seed: u64,
    pub d: Option<usize>,
    pub matroid: Option<String>,
}

fn meets(coverage: &[usize], demands: &[Rational], eps: Rational) -> bool {
    let factor = Rational::from_integer(1) - eps;
    coverage.iter().zip(demands).all(|(&c, &t)| Rational::from_integer(c as i64) >= factor * t)
}

impl RunReport {
    fn base(p: &Params, outcome: Outcome, solution: Option<Vec<usize>>, runs: u64) -> Self {
        RunReport {
            instance: p.instance.clone(),
            algorithm: p.algorithm.clone(),
            epsilon: format_rational(&p.eps),
            trials: p.trials.clone(),
            seed: p.seed,
            d: p.d,
            matroid: p.matroid.clone(),
            outcome,
            solution,
            runs,
            coverage: Vec::new(),
            demands: Vec::new(),
            success: false,
            wall_ms: 0.0,
        }
    }

    /// Coverage and success are recomputed here from the instance alone.
    pub fn for_sets(
        p: &Params,
        inst: &CoverageInstance,
        matroid: Option<&MatroidOracle>,
        outcome: Outcome,
        solution: Option<Vec<usize>>,
        runs: u64,
    ) -> Self {
        let mut r = Self::base(p, outcome, solution, runs);
        r.demands = inst.demands().iter().map(format_rational).collect();
        match &r.solution {
            Some(s) if s.iter().all(|&v| v < inst.num_sets()) => {
                let cov = inst.coverage_vector(s).expect("ids checked");
                r.coverage = (0..inst.num_colors()).map(|j| cov.get(j)).collect();
                let mut distinct = s.clone();
                distinct.sort_unstable();
                distinct.dedup();
                let independent = matroid.is_none_or(|m| m.is_independent(s).unwrap_or(false));
                r.success = distinct.len() == s.len()
                    && s.len() <= inst.budget()
                    && independent
                    && meets(&r.coverage, inst.demands(), p.eps);
            }
            _ => r.coverage = vec![0; inst.num_colors()],
        }
        r
    }

    pub fn for_cnf(p: &Params, phi: &CnfInstance, outcome: Outcome, true_vars: Option<Vec<usize>>, runs: u64) -> Self {
        let mut r = Self::base(p, outcome, true_vars, runs);
        r.demands = phi.demands().iter().map(format_rational).collect();
        match &r.solution {
            Some(vars) if vars.iter().all(|&v| (1..=phi.num_vars()).contains(&v)) => {
                let mut values = vec![false; phi.num_vars()];
                for &v in vars {
                    values[v - 1] = true;
                }
                let weight = values.iter().filter(|&&b| b).count();
                r.coverage = phi.satisfied_per_color(&values);
                r.success = weight == vars.len() && weight <= phi.budget() && meets(&r.coverage, phi.demands(), p.eps);
            }
            _ => r.coverage = vec![0; phi.num_colors()],
        }
        r
    }

    pub fn timed(mut self, ms: f64) -> Self {
        self.wall_ms = ms;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    JsonLines,
}

const COLUMNS: [&str; 14] = [
    "instance", "algorithm", "epsilon", "trials", "seed", "d", "matroid", "outcome", "solution", "runs", "coverage",
    "demands", "success", "wall_ms",
];

fn joined<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

fn row(r: &RunReport) -> [String; 14] {
    [
        r.instance.clone(),
        r.algorithm.clone(),
        r.epsilon.clone(),
        r.trials.clone(),
        r.seed.to_string(),
        r.d.map_or_else(|| "-".into(), |d| d.to_string()),
        r.matroid.clone().unwrap_or_else(|| "-".into()),
        r.outcome.as_str().into(),
        match r.solution.as_deref() {
            None => "-".into(),
            Some([]) => "{}".into(),
            Some(s) => joined(s),
        },
        r.runs.to_string(),
        joined(&r.coverage),
        joined(&r.demands),
        r.success.to_string(),
        format!("{:.3}", r.wall_ms),
    ]
}

pub fn emit(out: &mut impl Write, reports: &[RunReport], format: Format, delimiter: &str) -> std::io::Result<()> {
    match format {
        Format::Table => {
            writeln!(out, "{}", COLUMNS.join(delimiter))?;
            for r in reports {
                writeln!(out, "{}", row(r).join(delimiter))?;
            }
        }
        Format::JsonLines => {
            for r in reports {
                writeln!(out, "{}", serde_json::to_string(r).expect("report serializes"))?;
            }
        }
    }
    Ok(())
}
