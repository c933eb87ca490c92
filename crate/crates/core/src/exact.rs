//! Brute-force ground truth.
//!
//! Every subset of at most `k` sets (or every assignment of weight at most
//! `k`) is enumerated in lexicographic order. The best candidate maximizes
//! `min_j coverage_j / t_j` over colors with positive demand; ties keep the
//! lexicographically smallest one.

use crate::error::{Error, Result};
use crate::instance::{binomial, counts_as_vector, CnfInstance, ColorId, CoverageInstance, CoverageVector, SetId};
use crate::matroid::MatroidOracle;
use crate::rational::{count, Rational};

pub use crate::instance::DEFAULT_ENUMERATION_LIMIT;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactResult<S> {
    pub feasible: bool,
    pub best_solution: Option<S>,
    pub best_coverage: CoverageVector,
    /// `None` when no color has a positive demand.
    pub optimum_min_ratio: Option<Rational>,
}

/// Orders ratios with "no positive demand" above every number.
fn ratio_key(r: Option<Rational>) -> (bool, Rational) {
    (r.is_none(), r.unwrap_or_default())
}

fn min_ratio(covered: &[usize], demands: &[(ColorId, Rational)]) -> Option<Rational> {
    demands.iter().filter(|(_, t)| *t > Rational::default()).map(|&(j, t)| count(covered[j]) / t).min()
}

fn enumeration_size(n: usize, k: usize) -> u64 {
    (0..=k.min(n)).fold(0u64, |acc, i| acc.saturating_add(binomial(n as u64, i as u64)))
}

fn check_budget(n: usize, k: usize, limit: u64) -> Result<()> {
    let total = enumeration_size(n, k);
    if total > limit {
        return Err(Error::Size(format!("{total} candidate subsets exceed the limit {limit}")));
    }
    Ok(())
}

struct SetSearch<'a> {
    inst: &'a CoverageInstance,
    matroid: Option<&'a MatroidOracle>,
    demands: Vec<(ColorId, Rational)>,
    multiplicity: Vec<u32>,
    covered: Vec<usize>,
    chosen: Vec<SetId>,
    best: Option<(Option<Rational>, Vec<SetId>, Vec<usize>)>,
}

impl SetSearch<'_> {
    fn visit(&mut self) {
        let r = min_ratio(&self.covered, &self.demands);
        let better = match &self.best {
            None => true,
            Some((b, _, _)) => ratio_key(r) > ratio_key(*b),
        };
        if better {
            self.best = Some((r, self.chosen.clone(), self.covered.clone()));
        }
    }

    fn add(&mut self, v: SetId, delta: i32) {
        for &e in self.inst.neighbors(v) {
            let m = &mut self.multiplicity[e];
            let before = *m;
            *m = (*m as i32 + delta) as u32;
            if (before == 0) != (*m == 0) {
                if let Some(c) = self.inst.color_of(e) {
                    if delta > 0 {
                        self.covered[c] += 1;
                    } else {
                        self.covered[c] -= 1;
                    }
                }
            }
        }
    }

    fn dfs(&mut self, start: usize) {
        self.visit();
        if self.chosen.len() == self.inst.budget() {
            return;
        }
        let live = self.inst.live_sets();
        for (i, &v) in live.iter().enumerate().skip(start) {
            self.chosen.push(v);
            let ok = self.matroid.is_none_or(|m| m.is_independent(&self.chosen).unwrap_or(false));
            if ok {
                self.add(v, 1);
                self.dfs(i + 1);
                self.add(v, -1);
            }
            self.chosen.pop();
        }
    }
}

fn run_set_search(
    inst: &CoverageInstance,
    matroid: Option<&MatroidOracle>,
    limit: u64,
) -> Result<ExactResult<Vec<SetId>>> {
    check_budget(inst.live_sets().len(), inst.budget(), limit)?;
    let mut search = SetSearch {
        inst,
        matroid,
        demands: inst.active_demands(),
        multiplicity: vec![0; inst.num_elements()],
        covered: vec![0; inst.num_colors()],
        chosen: Vec::new(),
        best: None,
    };
    search.dfs(0);
    let (ratio, sets, covered) = search.best.expect("the empty set is always a candidate");
    let best_coverage = CoverageVector {
        per_color: inst.active_colors().iter().map(|&j| (j, covered[j])).collect(),
    };
    let feasible = best_coverage.meets(&search.demands, Rational::from_integer(1));
    Ok(ExactResult { feasible, best_solution: Some(sets), best_coverage, optimum_min_ratio: ratio })
}

/// Exhaustive PCCDS over all subsets of at most `budget` live sets.
pub fn exact_pccds(inst: &CoverageInstance, limit: u64) -> Result<ExactResult<Vec<SetId>>> {
    run_set_search(inst, None, limit)
}

/// As [`exact_pccds`], restricted to subsets independent in `matroid`.
pub fn exact_pccds_matroid(
    inst: &CoverageInstance,
    matroid: &MatroidOracle,
    limit: u64,
) -> Result<ExactResult<Vec<SetId>>> {
    run_set_search(inst, Some(matroid), limit)
}

/// Exhaustive search over assignments of weight at most `budget`; the
/// coverage vector holds satisfied-clause counts per color.
pub fn exact_maxsat(phi: &CnfInstance, limit: u64) -> Result<ExactResult<Vec<bool>>> {
    let n = phi.num_vars();
    check_budget(n, phi.budget(), limit)?;
    let demands = phi.color_demands();
    let mut values = vec![false; n];
    let mut best: Option<(Option<Rational>, Vec<bool>, Vec<usize>)> = None;
    fn dfs(
        phi: &CnfInstance,
        demands: &[(ColorId, Rational)],
        values: &mut Vec<bool>,
        weight: usize,
        start: usize,
        best: &mut Option<(Option<Rational>, Vec<bool>, Vec<usize>)>,
    ) {
        let sat = phi.satisfied_per_color(values);
        let r = min_ratio(&sat, demands);
        if best.as_ref().is_none_or(|(b, _, _)| ratio_key(r) > ratio_key(*b)) {
            *best = Some((r, values.clone(), sat));
        }
        if weight == phi.budget() {
            return;
        }
        for v in start..values.len() {
            values[v] = true;
            dfs(phi, demands, values, weight + 1, v + 1, best);
            values[v] = false;
        }
    }
    dfs(phi, &demands, &mut values, 0, 0, &mut best);
    let (ratio, assignment, sat) = best.expect("the all-false assignment is always a candidate");
    let best_coverage = counts_as_vector(&sat);
    let feasible = best_coverage.meets(&demands, Rational::from_integer(1));
    Ok(ExactResult { feasible, best_solution: Some(assignment), best_coverage, optimum_min_ratio: ratio })
}
