//! From colored CNF to colored coverage, and back.
//!
//! A random sparse assignment `psi` is drawn first. Clauses that `psi`
//! satisfies through a negative literal are set aside and credited to their
//! color; the remaining clauses lose their negative literals and every
//! variable that `psi` set to false, which leaves a monotone formula. That
//! formula is encoded as a coverage instance with one set per variable and one
//! element per clause, and demands shrink by the set-aside counts scaled by
//! `1 / (1 - eps)`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{input, Result};
use crate::exact::exact_pccds;
use crate::freqd::{pccds_matroid_solve, pccds_solve, SolveConfig, SolveOutcome};
use crate::instance::{approx_factor, CnfInstance, ColorId, CoverageInstance, ElemId, SetId};
use crate::matroid::MatroidOracle;
use crate::rational::{check_epsilon, count, Rational};
use crate::seed::{derive_seed, rng_from_seed};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub values: Vec<bool>,
    pub weight: usize,
}

impl Assignment {
    pub fn from_values(values: Vec<bool>) -> Self {
        let weight = values.iter().filter(|&&b| b).count();
        Self { values, weight }
    }

    pub fn zeros(n: usize) -> Self {
        Self { values: vec![false; n], weight: 0 }
    }

    /// 1-based indices of the variables set to true.
    pub fn true_vars(&self) -> Vec<usize> {
        self.values.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i + 1).collect()
    }
}

/// Default sampling probability `eps / 2r`.
pub fn default_probability(eps: Rational, num_colors: usize) -> Rational {
    eps / Rational::from_integer(2 * num_colors.max(1) as i64)
}

/// Sets each variable to true independently with probability `p`, exactly.
///
/// `p = 1` is accepted and yields the all-true assignment.
pub fn random_assignment(phi: &CnfInstance, p: Rational, seed: u64) -> Result<Assignment> {
    if p <= Rational::zero() || p > Rational::one() {
        return input("assignment probability must lie in (0, 1]");
    }
    let mut rng = rng_from_seed(seed);
    let (num, den) = (*p.numer(), *p.denom());
    let values = (0..phi.num_vars()).map(|_| rng.gen_range(0..den) < num).collect();
    Ok(Assignment::from_values(values))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionOutput {
    pub cov: CoverageInstance,
    pub seed_assignment: Assignment,
    /// Variable (0-based) of each set.
    pub var_of_set: Vec<usize>,
    /// Clause index of each element.
    pub clause_of_elem: Vec<usize>,
    /// Clauses satisfied negatively by the seed assignment, per color.
    pub negative_counts: Vec<usize>,
    pub num_vars: usize,
}

/// Builds the coverage instance for a random assignment drawn with `p = eps / 2r`.
pub fn reduce_instance(phi: &CnfInstance, eps: Rational, seed: u64) -> Result<ReductionOutput> {
    reduce_instance_with_probability(phi, eps, default_probability(eps, phi.num_colors()), seed)
}

pub fn reduce_instance_with_probability(
    phi: &CnfInstance,
    eps: Rational,
    p: Rational,
    seed: u64,
) -> Result<ReductionOutput> {
    check_epsilon(eps)?;
    let psi = random_assignment(phi, p, seed)?;
    reduce_with_assignment(phi, eps, psi)
}

/// Deterministic part of the reduction, for a given assignment.
pub fn reduce_with_assignment(phi: &CnfInstance, eps: Rational, psi: Assignment) -> Result<ReductionOutput> {
    check_epsilon(eps)?;
    if psi.values.len() != phi.num_vars() {
        return input("assignment length differs from the number of variables");
    }
    let mut negative_counts = vec![0usize; phi.num_colors()];
    let mut clause_of_elem = Vec::new();
    let mut colors = Vec::new();
    let mut occurrences: BTreeMap<usize, Vec<ElemId>> = BTreeMap::new();
    for (ci, clause) in phi.clauses().iter().enumerate() {
        if clause.literals.iter().any(|l| !l.positive && !psi.values[l.var]) {
            negative_counts[clause.color] += 1;
            continue;
        }
        let e = clause_of_elem.len();
        clause_of_elem.push(ci);
        colors.push(clause.color);
        for l in &clause.literals {
            if l.positive && psi.values[l.var] {
                occurrences.entry(l.var).or_default().push(e);
            }
        }
    }
    let scale = Rational::one() / approx_factor(eps);
    let demands: Vec<Rational> =
        phi.demands().iter().zip(&negative_counts).map(|(&t, &n)| t - count(n) * scale).collect();
    let var_of_set: Vec<usize> = occurrences.keys().copied().collect();
    let adjacency: Vec<Vec<ElemId>> = occurrences.into_values().collect();
    let cov = CoverageInstance::new_allow_empty_colors(adjacency, colors, demands, phi.budget(), None)?;
    Ok(ReductionOutput { cov, seed_assignment: psi, var_of_set, clause_of_elem, negative_counts, num_vars: phi.num_vars() })
}

/// `sigma(x) = 1` exactly when the set of `x` is in `sets`.
pub fn lift_solution(red: &ReductionOutput, sets: &[SetId]) -> Result<Assignment> {
    let mut values = vec![false; red.num_vars];
    for &s in sets {
        let Some(&v) = red.var_of_set.get(s) else {
            return input(format!("set {s} is not part of the reduced instance"));
        };
        values[v] = true;
    }
    Ok(Assignment::from_values(values))
}

/// A coverage solver usable inside [`reduce_and_solve`]. `Ok(None)` means no
/// solution was found.
pub trait CoverageSolver {
    fn solve(
        &self,
        inst: &CoverageInstance,
        matroid: Option<&MatroidOracle>,
        seed: u64,
    ) -> Result<Option<Vec<SetId>>>;
}

impl<F> CoverageSolver for F
where
    F: Fn(&CoverageInstance, Option<&MatroidOracle>, u64) -> Result<Option<Vec<SetId>>>,
{
    fn solve(&self, inst: &CoverageInstance, matroid: Option<&MatroidOracle>, seed: u64) -> Result<Option<Vec<SetId>>> {
        self(inst, matroid, seed)
    }
}

/// Exhaustive search; returns the best subset even when it misses a demand.
#[derive(Clone, Copy, Debug)]
pub struct ExactSolver {
    pub limit: u64,
}

impl CoverageSolver for ExactSolver {
    fn solve(&self, inst: &CoverageInstance, matroid: Option<&MatroidOracle>, _seed: u64) -> Result<Option<Vec<SetId>>> {
        let res = match matroid {
            Some(m) => crate::exact::exact_pccds_matroid(inst, m, self.limit)?,
            None => exact_pccds(inst, self.limit)?,
        };
        Ok(res.best_solution)
    }
}

/// The bounded-frequency solver; the seed in `config` is replaced by the round seed.
#[derive(Clone, Debug)]
pub struct FreqdSolver {
    pub eps: Rational,
    pub config: SolveConfig,
}

impl CoverageSolver for FreqdSolver {
    fn solve(&self, inst: &CoverageInstance, matroid: Option<&MatroidOracle>, seed: u64) -> Result<Option<Vec<SetId>>> {
        let config = SolveConfig { seed, ..self.config.clone() };
        let report = match matroid {
            Some(m) => pccds_matroid_solve(inst, m, self.eps, &config)?,
            None => pccds_solve(inst, self.eps, &config)?,
        };
        Ok(match report.outcome {
            SolveOutcome::Found(s) => Some(s),
            _ => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RoundOutcome {
    Lifted { weight: usize, min_ratio: Option<Rational> },
    NoSolution,
    Failed(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundRecord {
    pub round: u64,
    pub seed: u64,
    pub outcome: RoundOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionReport {
    pub best: Option<Assignment>,
    /// Satisfied clauses per color under `best` (zeros when there is none).
    pub satisfied: Vec<usize>,
    /// Whether `best` satisfies at least `(1 - eps) t_j` clauses of every color.
    pub success: bool,
    pub rounds: Vec<RoundRecord>,
}

fn min_ratio(satisfied: &[usize], demands: &[Rational]) -> Option<Rational> {
    demands.iter().zip(satisfied).filter(|(t, _)| **t > Rational::zero()).map(|(&t, &s)| count(s) / t).min()
}

/// Runs `trials` independent reduce, solve and lift rounds. Round `i` uses
/// `derive_seed(seed, i)`. The kept assignment maximizes the smallest
/// `satisfied_j / t_j`, then has the fewest true variables, then came first.
pub fn reduce_and_solve(
    phi: &CnfInstance,
    eps: Rational,
    solver: &dyn CoverageSolver,
    trials: u64,
    seed: u64,
) -> Result<ReductionReport> {
    reduce_and_solve_with(phi, eps, default_probability(eps, phi.num_colors()), solver, trials, seed)
}

pub fn reduce_and_solve_with(
    phi: &CnfInstance,
    eps: Rational,
    p: Rational,
    solver: &dyn CoverageSolver,
    trials: u64,
    seed: u64,
) -> Result<ReductionReport> {
    check_epsilon(eps)?;
    if trials == 0 {
        return input("at least one trial is required");
    }
    let mut best: Option<(Option<Rational>, Assignment, Vec<usize>)> = None;
    let mut rounds = Vec::new();
    for i in 0..trials {
        let round_seed = derive_seed(seed, i);
        let red = reduce_instance_with_probability(phi, eps, p, round_seed)?;
        let outcome = match solver.solve(&red.cov, None, derive_seed(round_seed, 1)) {
            Err(e) => RoundOutcome::Failed(e.to_string()),
            Ok(None) => RoundOutcome::NoSolution,
            Ok(Some(sets)) => {
                let sigma = lift_solution(&red, &sets)?;
                let sat = phi.satisfied_per_color(&sigma.values);
                let r = min_ratio(&sat, phi.demands());
                let outcome = RoundOutcome::Lifted { weight: sigma.weight, min_ratio: r };
                let better = match &best {
                    None => true,
                    Some((br, b, _)) => {
                        let key = |x: Option<Rational>| (x.is_none(), x.unwrap_or_default());
                        key(r) > key(*br) || (key(r) == key(*br) && sigma.weight < b.weight)
                    }
                };
                if better {
                    best = Some((r, sigma, sat));
                }
                outcome
            }
        };
        rounds.push(RoundRecord { round: i, seed: round_seed, outcome });
    }
    let demands: Vec<(ColorId, Rational)> = phi.color_demands();
    Ok(match best {
        Some((_, assignment, satisfied)) => {
            let success = crate::instance::counts_as_vector(&satisfied).meets(&demands, approx_factor(eps));
            ReductionReport { best: Some(assignment), satisfied, success, rounds }
        }
        None => ReductionReport { best: None, satisfied: vec![0; phi.num_colors()], success: false, rounds },
    })
}
