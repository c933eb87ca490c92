//! Bounded-frequency solver: bucketing plus probabilistic branching.
//!
//! One run picks a bag of degree-equivalent sets uniformly at random, anchors
//! on a member of it and samples the next set from a distribution that puts
//! half of the mass on the anchor and spreads the rest according to how much
//! each other set overlaps the anchor, color by color. The chosen set is
//! committed through [`prune_instance`] and the run recurses until the budget
//! is spent. [`pccds_solve`] repeats independent runs.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{input, Result};
use crate::instance::{approx_factor, ColorId, CoverageInstance, CoverageVector, SetId};
use crate::matroid::MatroidOracle;
use crate::rational::{ceil_log, check_epsilon, count, int, lcm, shrinking_ceil_thresholds, Rational};
use crate::seed::{derive_seed, rng_from_seed, SolverRng};

/// Default cap on the number of single runs in [`pccds_solve`].
pub const DEFAULT_TRIAL_CAP: u64 = 10_000_000;

/// `lambda = ceil(log_{1+eps}(2 k* / eps))`.
pub fn bucket_lambda(eps: Rational, kstar: usize) -> u32 {
    ceil_log(Rational::one() + eps, int(2 * kstar as i64) / eps)
}

/// Analytic bound `(6 ln k* / eps^2)^r` on the number of bags.
pub fn analytic_bag_bound(eps: Rational, kstar: usize, r: usize) -> f64 {
    let e = crate::rational::to_f64(&eps);
    (6.0 * (kstar as f64).ln() / (e * e)).powi(r as i32)
}

/// Sets grouped by their bucket index vector, one index per active color.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BagPartition {
    pub lambda: u32,
    /// Active colors, in the order used by the index vectors.
    pub colors: Vec<ColorId>,
    /// Non-empty bags in lexicographic order of their index vectors; members ascending.
    pub bags: BTreeMap<Vec<u32>, Vec<SetId>>,
}

impl BagPartition {
    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }
}

/// Computes bucket indices; caches the integer thresholds of each demand value.
#[derive(Clone, Debug)]
pub struct Bucketer {
    ratio: Rational,
    lambda: u32,
    cache: HashMap<Rational, Vec<i64>>,
}

impl Bucketer {
    pub fn new(eps: Rational, kstar: usize) -> Result<Self> {
        check_epsilon(eps)?;
        if kstar == 0 {
            return input("bucketing needs an original budget of at least 1");
        }
        Ok(Self { ratio: Rational::one() + eps, lambda: bucket_lambda(eps, kstar), cache: HashMap::new() })
    }

    pub fn lambda(&self) -> u32 {
        self.lambda
    }

    /// Bucket of a set with `degree` neighbors of a color demanding `t`:
    /// 0 when `degree >= t`, `alpha` in `1..=lambda` when
    /// `t / (1+eps)^alpha <= degree < t / (1+eps)^(alpha-1)`, else `lambda + 1`.
    pub fn index(&mut self, degree: usize, t: Rational) -> u32 {
        let (ratio, lambda) = (self.ratio, self.lambda);
        let th = self.cache.entry(t).or_insert_with(|| shrinking_ceil_thresholds(t, ratio, lambda));
        let d = degree as i64;
        th.iter().position(|&c| d >= c).map_or(lambda + 1, |a| a as u32)
    }

    pub fn partition(&mut self, inst: &CoverageInstance) -> BagPartition {
        let colors = inst.active_colors().to_vec();
        let mut bags: BTreeMap<Vec<u32>, Vec<SetId>> = BTreeMap::new();
        for &v in inst.live_sets() {
            let deg = inst.color_degrees(v);
            let key: Vec<u32> = colors.iter().map(|&j| self.index(deg[j], inst.demand(j))).collect();
            bags.entry(key).or_default().push(v);
        }
        BagPartition { lambda: self.lambda, colors, bags }
    }
}

/// Bags of the live sets of `inst`, using its original budget as `k*`.
pub fn bucketing(inst: &CoverageInstance, eps: Rational) -> Result<BagPartition> {
    Ok(Bucketer::new(eps, inst.original_budget())?.partition(inst))
}

/// Sampling masses around an anchor; the anchor carries 1/2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchWeights {
    pub anchor: SetId,
    /// Sets with positive mass, ascending by id.
    pub others: Vec<(SetId, Rational)>,
}

impl BranchWeights {
    pub fn anchor_mass() -> Rational {
        Rational::new(1, 2)
    }

    pub fn mass(&self, w: SetId) -> Rational {
        if w == self.anchor {
            return Self::anchor_mass();
        }
        self.others.iter().find(|(v, _)| *v == w).map_or(Rational::zero(), |(_, p)| *p)
    }

    /// Sum of all masses.
    pub fn total(&self) -> Rational {
        self.others.iter().fold(Self::anchor_mass(), |acc, (_, p)| acc + p)
    }
}

/// Masses `p(w) = (1 / 2rd) * sum_j |N_j(w) ∩ N_j(v)| / |N_j(v)|` for every
/// live `w != v`, with `p(v) = 1/2`. Colors where the anchor has no neighbor
/// contribute nothing.
pub fn branch_distribution(inst: &CoverageInstance, anchor: SetId, d: usize) -> Result<BranchWeights> {
    if !inst.is_live_set(anchor) {
        return input(format!("anchor {anchor} is not a live set"));
    }
    let r = inst.active_colors().len();
    if r == 0 || d == 0 {
        return Ok(BranchWeights { anchor, others: Vec::new() });
    }
    // color of each anchor neighbor, and the anchor's color degrees
    let mut anchor_color: HashMap<usize, ColorId> = HashMap::new();
    for &e in inst.neighbors(anchor) {
        if let Some(c) = inst.color_of(e) {
            anchor_color.insert(e, c);
        }
    }
    let anchor_deg = inst.color_degrees(anchor);
    let scale = Rational::new(1, 2 * r as i64 * d as i64);
    let mut others = Vec::new();
    let mut shared = vec![0usize; inst.num_colors()];
    for &w in inst.live_sets() {
        if w == anchor {
            continue;
        }
        shared.iter_mut().for_each(|x| *x = 0);
        let mut any = false;
        for e in inst.neighbors(w) {
            if let Some(&c) = anchor_color.get(e) {
                shared[c] += 1;
                any = true;
            }
        }
        if !any {
            continue;
        }
        let h: Rational = inst
            .active_colors()
            .iter()
            .filter(|&&j| anchor_deg[j] > 0)
            .map(|&j| Rational::new(shared[j] as i64, anchor_deg[j] as i64))
            .sum();
        if h > Rational::zero() {
            others.push((w, h * scale));
        }
    }
    Ok(BranchWeights { anchor, others })
}

/// Draws a set with probability `p(w) / l`, `l` the total mass, exactly.
pub fn sample_vertex(weights: &BranchWeights, rng: &mut SolverRng) -> SetId {
    let denom = weights.others.iter().fold(2i64, |acc, (_, p)| lcm(acc, *p.denom()));
    let scaled = |p: Rational| (p * Rational::from_integer(denom)).to_integer() as u64;
    let total: u64 = weights.others.iter().map(|(_, p)| scaled(*p)).sum::<u64>() + scaled(BranchWeights::anchor_mass());
    let mut x = rng.gen_range(0..total);
    let anchor_share = scaled(BranchWeights::anchor_mass());
    if x < anchor_share {
        return weights.anchor;
    }
    x -= anchor_share;
    for (w, p) in &weights.others {
        let s = scaled(*p);
        if x < s {
            return *w;
        }
        x -= s;
    }
    unreachable!("sample falls inside the total mass")
}

/// Residual instance after adding `u` to the solution; see [`CoverageInstance::prune`].
pub fn prune_instance(inst: &CoverageInstance, u: SetId) -> Result<CoverageInstance> {
    inst.prune(u)
}

/// State shared by repeated runs on the same instance.
#[derive(Clone, Debug)]
pub struct PccdsRunner {
    bucketer: Bucketer,
    frequency: usize,
}

impl PccdsRunner {
    pub fn new(inst: &CoverageInstance, eps: Rational) -> Result<Self> {
        Ok(Self { bucketer: Bucketer::new(eps, inst.original_budget().max(1))?, frequency: inst.max_frequency() })
    }

    /// One root-to-leaf run. With a matroid, the anchor is drawn uniformly
    /// from a maximal independent subset of the bag, the matroid is contracted
    /// on every chosen set, and sets that became loops are dropped before
    /// bucketing, so each pick stays independent of the earlier ones.
    pub fn run_once(
        &mut self,
        inst: &CoverageInstance,
        matroid: Option<&MatroidOracle>,
        rng: &mut SolverRng,
    ) -> Result<Vec<SetId>> {
        let mut current = inst.clone();
        let mut matroid = match matroid {
            Some(m) => Some(m.truncate(inst.budget().min(m.rank()))?),
            None => None,
        };
        let mut chosen = Vec::new();
        while current.budget() > 0 {
            if let Some(m) = &matroid {
                current = current.retain_sets(|v| !m.is_loop(v));
            }
            if current.live_sets().is_empty() {
                break;
            }
            let bags = self.bucketer.partition(&current);
            let pick = rng.gen_range(0..bags.len());
            let bag = bags.bags.values().nth(pick).expect("bag index in range");
            let anchor = match &matroid {
                None => bag[0],
                Some(m) => {
                    let rep = m.maximal_independent_subset(bag).members;
                    rep[rng.gen_range(0..rep.len())]
                }
            };
            let weights = branch_distribution(&current, anchor, self.frequency)?;
            assert!(weights.total() <= Rational::one(), "branch masses exceed 1");
            let u = sample_vertex(&weights, rng);
            if let Some(m) = matroid.as_mut() {
                *m = m.contract(u).expect("sampled set is independent of the partial solution");
            }
            chosen.push(u);
            current = current.prune(u)?;
        }
        Ok(chosen)
    }
}

/// One randomized run with the given bucketing accuracy.
pub fn pccds_once(inst: &CoverageInstance, eps: Rational, seed: u64) -> Result<Vec<SetId>> {
    PccdsRunner::new(inst, eps)?.run_once(inst, None, &mut rng_from_seed(seed))
}

/// One randomized run under a matroid constraint.
pub fn pccds_matroid_once(
    inst: &CoverageInstance,
    matroid: &MatroidOracle,
    eps: Rational,
    seed: u64,
) -> Result<Vec<SetId>> {
    check_ground(inst, matroid)?;
    let sol = PccdsRunner::new(inst, eps)?.run_once(inst, Some(matroid), &mut rng_from_seed(seed))?;
    assert!(matroid.is_independent(&sol)?, "matroid run returned a dependent set");
    Ok(sol)
}

fn check_ground(inst: &CoverageInstance, matroid: &MatroidOracle) -> Result<()> {
    if matroid.ground_size() != inst.num_sets() {
        return input(format!("matroid has {} elements but the instance has {} sets", matroid.ground_size(), inst.num_sets()));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Trials {
    Fixed(u64),
    /// `ceil(c / q * ln(n + 2))` runs.
    Auto { c: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveConfig {
    pub trials: Trials,
    pub trial_cap: u64,
    pub seed: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self { trials: Trials::Auto { c: 1.0 }, trial_cap: DEFAULT_TRIAL_CAP, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    /// A set meeting `(1 - eps) t_j` for every color.
    Found(Vec<SetId>),
    /// Every planned run failed.
    NotFound,
    /// The planned number of runs exceeded the cap and the capped runs all failed.
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub outcome: SolveOutcome,
    /// Runs requested by the schedule; may exceed the cap.
    pub planned_trials: f64,
    pub trials_run: u64,
}

/// Number of runs for the automatic schedule, before capping.
///
/// `q = ((1/L) * (eps/3) / (2rd))^k` with `L` the number of non-empty bags at
/// the root; the matroid variant multiplies the count by `k`.
pub fn auto_trials(inst: &CoverageInstance, eps: Rational, c: f64, with_matroid: bool) -> Result<f64> {
    let inner = eps / int(3);
    let bags = bucketing(inst, inner)?.len().max(1) as f64;
    let r = inst.active_colors().len().max(1) as f64;
    let d = inst.max_frequency().max(1) as f64;
    let k = inst.budget() as f64;
    let per_level = bags * 2.0 * r * d / crate::rational::to_f64(&inner);
    let n = inst.live_sets().len() as f64;
    let mut ln_trials = c.ln() + k * per_level.ln() + (n + 2.0).ln().ln();
    if with_matroid && inst.budget() > 1 {
        ln_trials += k.ln();
    }
    Ok(ln_trials.exp().ceil())
}

fn solve_impl(
    inst: &CoverageInstance,
    matroid: Option<&MatroidOracle>,
    eps: Rational,
    config: &SolveConfig,
) -> Result<SolveReport> {
    check_epsilon(eps)?;
    if let Some(m) = matroid {
        check_ground(inst, m)?;
    }
    let planned = match config.trials {
        Trials::Fixed(0) => return input("at least one trial is required"),
        Trials::Fixed(n) => n as f64,
        Trials::Auto { c } => {
            if c.is_nan() || c <= 0.0 {
                return input("repetition constant must be positive");
            }
            auto_trials(inst, eps, c, matroid.is_some())?
        }
    };
    let factor = approx_factor(eps);
    if inst.trivially_infeasible(factor) {
        return Ok(SolveReport { outcome: SolveOutcome::NotFound, planned_trials: planned, trials_run: 0 });
    }
    let capped = planned > config.trial_cap as f64;
    let runs = if capped { config.trial_cap } else { planned.to_u64().unwrap_or(u64::MAX) };
    let mut runner = PccdsRunner::new(inst, eps / int(3))?;
    for i in 0..runs {
        let mut rng = rng_from_seed(derive_seed(config.seed, i));
        let sol = runner.run_once(inst, matroid, &mut rng)?;
        if let Some(m) = matroid {
            assert!(m.is_independent(&sol)?, "matroid run returned a dependent set");
        }
        if inst.satisfies(&sol, factor) {
            return Ok(SolveReport { outcome: SolveOutcome::Found(sol), planned_trials: planned, trials_run: i + 1 });
        }
    }
    let outcome = if capped { SolveOutcome::BudgetExceeded } else { SolveOutcome::NotFound };
    Ok(SolveReport { outcome, planned_trials: planned, trials_run: runs })
}

/// Repeats [`pccds_once`] at accuracy `eps / 3` and returns the first set
/// covering at least `(1 - eps) t_j` of every color.
///
/// When the schedule asks for more runs than `trial_cap`, only `trial_cap`
/// runs are made and a failure is reported as [`SolveOutcome::BudgetExceeded`].
pub fn pccds_solve(inst: &CoverageInstance, eps: Rational, config: &SolveConfig) -> Result<SolveReport> {
    solve_impl(inst, None, eps, config)
}

/// Matroid-constrained variant of [`pccds_solve`]; returned sets are
/// independent in `matroid`.
pub fn pccds_matroid_solve(
    inst: &CoverageInstance,
    matroid: &MatroidOracle,
    eps: Rational,
    config: &SolveConfig,
) -> Result<SolveReport> {
    solve_impl(inst, Some(matroid), eps, config)
}

/// Per-run guarantee of the inductive analysis: for every color,
/// `cov_j >= (1 - 2eps) min(reference_j, t_j) - (eps k / k*) t_j`.
pub fn meets_induction_bound(
    inst: &CoverageInstance,
    coverage: &CoverageVector,
    reference: &CoverageVector,
    eps: Rational,
) -> bool {
    let two = int(2);
    let ratio = Rational::new(inst.budget() as i64, inst.original_budget().max(1) as i64);
    inst.active_demands().iter().all(|&(j, t)| {
        let target = count(reference.get(j)).min(t);
        count(coverage.get(j)) >= (Rational::one() - two * eps) * target - eps * ratio * t
    })
}

/// `cov_j >= (1 - 3 eps) t_j` for every color.
pub fn meets_rescaled_bound(inst: &CoverageInstance, coverage: &CoverageVector, eps: Rational) -> bool {
    coverage.meets(&inst.active_demands(), Rational::one() - int(3) * eps)
}
