//! Coverage and colored-CNF instances.
//!
//! A [`CoverageInstance`] is the bipartite incidence structure between sets
//! (left side) and colored elements (right side). Identifiers are dense
//! 0-based indices fixed at construction; pruning deletes vertices but never
//! renumbers them, so solutions found on residual instances are already in the
//! original id space.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::rational::{count, Rational};

pub type SetId = usize;
pub type ElemId = usize;
pub type ColorId = usize;

/// Default enumeration budget for exhaustive checks.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageInstance {
    num_colors: usize,
    /// Live sets, ascending.
    left: Vec<SetId>,
    /// Sorted live neighbors, indexed by `SetId`; empty for deleted sets.
    adjacency: Vec<Vec<ElemId>>,
    /// Color of each element, `None` once deleted.
    color: Vec<Option<ColorId>>,
    /// Colors still carrying a demand, ascending.
    active_colors: Vec<ColorId>,
    demands: Vec<Rational>,
    budget: usize,
    original_budget: usize,
}

/// Per-color count of covered elements, `|N_j(S)|`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageVector {
    pub per_color: BTreeMap<ColorId, usize>,
}

impl CoverageVector {
    pub fn get(&self, color: ColorId) -> usize {
        self.per_color.get(&color).copied().unwrap_or(0)
    }

    /// `true` when every listed color reaches `factor * demand`.
    pub fn meets(&self, demands: &[(ColorId, Rational)], factor: Rational) -> bool {
        demands.iter().all(|&(j, t)| count(self.get(j)) >= factor * t)
    }

    /// `min_j coverage_j / t_j` over colors with a positive demand; `None`
    /// when no color has one.
    pub fn min_ratio(&self, demands: &[(ColorId, Rational)]) -> Option<Rational> {
        demands
            .iter()
            .filter(|(_, t)| *t > Rational::zero())
            .map(|&(j, t)| count(self.get(j)) / t)
            .min()
    }
}

impl CoverageInstance {
    /// Builds an instance and checks every structural invariant, including that
    /// each color owns at least one element.
    ///
    /// `adjacency[v]` lists the elements of set `v`; `colors[e]` is the color of
    /// element `e` and must be below `demands.len()`.
    pub fn new(
        adjacency: Vec<Vec<ElemId>>,
        colors: Vec<ColorId>,
        demands: Vec<Rational>,
        budget: usize,
        original_budget: Option<usize>,
    ) -> Result<Self> {
        let inst = Self::new_allow_empty_colors(adjacency, colors, demands, budget, original_budget)?;
        for j in 0..inst.num_colors {
            if inst.elements_of_color(j) == 0 {
                return input(format!("color {} has no elements", j + 1));
            }
        }
        Ok(inst)
    }

    /// Same as [`CoverageInstance::new`] but admits colors without elements.
    /// The reduction from CNF produces such colors when every clause of a
    /// color is satisfied negatively.
    pub fn new_allow_empty_colors(
        mut adjacency: Vec<Vec<ElemId>>,
        colors: Vec<ColorId>,
        demands: Vec<Rational>,
        budget: usize,
        original_budget: Option<usize>,
    ) -> Result<Self> {
        let num_colors = demands.len();
        let num_elements = colors.len();
        for (e, &c) in colors.iter().enumerate() {
            if c >= num_colors {
                return input(format!("element {e} has color {} but only {num_colors} colors are declared", c + 1));
            }
        }
        for (v, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_unstable();
            for w in nbrs.windows(2) {
                if w[0] == w[1] {
                    return input(format!("set {v} lists element {} twice", w[0]));
                }
            }
            if let Some(&e) = nbrs.last() {
                if e >= num_elements {
                    return input(format!("set {v} references unknown element {e}"));
                }
            }
        }
        let original_budget = original_budget.unwrap_or(budget);
        if budget > original_budget {
            return input(format!("budget {budget} exceeds original budget {original_budget}"));
        }
        Ok(Self {
            num_colors,
            left: (0..adjacency.len()).collect(),
            adjacency,
            color: colors.into_iter().map(Some).collect(),
            active_colors: (0..num_colors).collect(),
            demands,
            budget,
            original_budget,
        })
    }

    /// Size of the set id space (live or not).
    pub fn num_sets(&self) -> usize {
        self.adjacency.len()
    }

    /// Size of the element id space (live or not).
    pub fn num_elements(&self) -> usize {
        self.color.len()
    }

    /// Size of the color id space (active or not).
    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    pub fn live_sets(&self) -> &[SetId] {
        &self.left
    }

    pub fn active_colors(&self) -> &[ColorId] {
        &self.active_colors
    }

    pub fn is_live_set(&self, v: SetId) -> bool {
        self.left.binary_search(&v).is_ok()
    }

    pub fn is_active_color(&self, j: ColorId) -> bool {
        self.active_colors.binary_search(&j).is_ok()
    }

    pub fn neighbors(&self, v: SetId) -> &[ElemId] {
        &self.adjacency[v]
    }

    pub fn color_of(&self, e: ElemId) -> Option<ColorId> {
        self.color[e]
    }

    pub fn demand(&self, j: ColorId) -> Rational {
        self.demands[j]
    }

    /// `(color, demand)` for every active color.
    pub fn active_demands(&self) -> Vec<(ColorId, Rational)> {
        self.active_colors.iter().map(|&j| (j, self.demands[j])).collect()
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn original_budget(&self) -> usize {
        self.original_budget
    }

    /// Live elements of color `j`.
    pub fn elements_of_color(&self, j: ColorId) -> usize {
        self.color.iter().filter(|c| **c == Some(j)).count()
    }

    pub fn live_elements(&self) -> impl Iterator<Item = ElemId> + '_ {
        self.color.iter().enumerate().filter(|(_, c)| c.is_some()).map(|(e, _)| e)
    }

    /// Copy with a different budget; keeps the original budget.
    pub fn with_budget(&self, budget: usize) -> Result<Self> {
        if budget > self.original_budget {
            return input(format!("budget {budget} exceeds original budget {}", self.original_budget));
        }
        Ok(Self { budget, ..self.clone() })
    }

    fn check_set(&self, v: SetId) -> Result<()> {
        if !self.is_live_set(v) {
            return input(format!("unknown set {v}"));
        }
        Ok(())
    }

    fn check_color(&self, j: ColorId) -> Result<()> {
        if !self.is_active_color(j) {
            return input(format!("unknown color {}", j + 1));
        }
        Ok(())
    }

    /// `|N_j(v)|`.
    pub fn j_degree(&self, v: SetId, j: ColorId) -> Result<usize> {
        self.check_set(v)?;
        self.check_color(j)?;
        Ok(self.degree(v, j))
    }

    pub(crate) fn degree(&self, v: SetId, j: ColorId) -> usize {
        self.adjacency[v].iter().filter(|&&e| self.color[e] == Some(j)).count()
    }

    /// Degrees of `v` toward every color id (inactive colors read 0).
    pub fn color_degrees(&self, v: SetId) -> Vec<usize> {
        let mut out = vec![0; self.num_colors];
        for &e in &self.adjacency[v] {
            if let Some(c) = self.color[e] {
                out[c] += 1;
            }
        }
        out
    }

    /// Sorted `N_j(v)`.
    pub fn color_neighbors(&self, v: SetId, j: ColorId) -> Vec<ElemId> {
        self.adjacency[v].iter().copied().filter(|&e| self.color[e] == Some(j)).collect()
    }

    /// `|N_j(S)|` for every active color, with union semantics.
    pub fn coverage_vector(&self, sets: &[SetId]) -> Result<CoverageVector> {
        for &v in sets {
            self.check_set(v)?;
        }
        Ok(self.coverage_unchecked(sets))
    }

    pub(crate) fn coverage_unchecked(&self, sets: &[SetId]) -> CoverageVector {
        let mut seen = vec![false; self.color.len()];
        let mut per_color: BTreeMap<ColorId, usize> = self.active_colors.iter().map(|&j| (j, 0)).collect();
        for &v in sets {
            for &e in &self.adjacency[v] {
                if !seen[e] {
                    seen[e] = true;
                    if let Some(c) = self.color[e] {
                        *per_color.entry(c).or_insert(0) += 1;
                    }
                }
            }
        }
        CoverageVector { per_color }
    }

    /// Largest number of live sets containing one element.
    pub fn max_frequency(&self) -> usize {
        let mut freq = vec![0usize; self.color.len()];
        for &v in &self.left {
            for &e in &self.adjacency[v] {
                freq[e] += 1;
            }
        }
        freq.into_iter().max().unwrap_or(0)
    }

    /// `true` when every color with positive demand is met by `sets` at `factor * t_j`.
    pub fn satisfies(&self, sets: &[SetId], factor: Rational) -> bool {
        self.coverage_unchecked(sets).meets(&self.active_demands(), factor)
    }

    /// `true` iff no `d` live sets share `d` common elements.
    ///
    /// Exhaustive over all `d`-subsets of sets; refuses to run when their
    /// number exceeds `limit`.
    pub fn check_kdd_free(&self, d: usize, limit: u64) -> Result<bool> {
        if d == 0 {
            return input("d must be at least 1");
        }
        let n = self.left.len();
        if d > n {
            return Ok(true);
        }
        let combos = binomial(n as u64, d as u64);
        if combos > limit {
            return Err(Error::Size(format!("C({n}, {d}) = {combos} subsets exceed the limit {limit}")));
        }
        let mut chosen = Vec::with_capacity(d);
        Ok(!self.has_biclique(0, d, &mut chosen, None))
    }

    fn has_biclique(&self, start: usize, d: usize, chosen: &mut Vec<SetId>, common: Option<&[ElemId]>) -> bool {
        if let Some(c) = common {
            if c.len() < d {
                return false;
            }
            if chosen.len() == d {
                return true;
            }
        }
        for i in start..self.left.len() {
            let v = self.left[i];
            let next: Vec<ElemId> = match common {
                None => self.adjacency[v].clone(),
                Some(c) => sorted_intersection(c, &self.adjacency[v]),
            };
            chosen.push(v);
            let found = self.has_biclique(i + 1, d, chosen, Some(&next));
            chosen.pop();
            if found {
                return true;
            }
        }
        false
    }

    /// Residual instance after committing `u` to the solution.
    ///
    /// Colors already met by `u` are dropped along with all their elements;
    /// `u` and its neighbors are deleted; other demands drop by `|N_j(u)|`;
    /// the budget drops by one and the original budget is kept.
    pub fn prune(&self, u: SetId) -> Result<Self> {
        self.check_set(u)?;
        if self.budget == 0 {
            return input("cannot prune an instance with budget 0");
        }
        let deg = self.color_degrees(u);
        let satisfied: Vec<ColorId> = self
            .active_colors
            .iter()
            .copied()
            .filter(|&j| count(deg[j]) >= self.demands[j])
            .collect();
        let mut color = self.color.clone();
        for &e in &self.adjacency[u] {
            color[e] = None;
        }
        if !satisfied.is_empty() {
            for c in color.iter_mut() {
                if let Some(j) = *c {
                    if satisfied.binary_search(&j).is_ok() {
                        *c = None;
                    }
                }
            }
        }
        let mut adjacency = vec![Vec::new(); self.adjacency.len()];
        let left: Vec<SetId> = self.left.iter().copied().filter(|&v| v != u).collect();
        for &v in &left {
            adjacency[v] = self.adjacency[v].iter().copied().filter(|&e| color[e].is_some()).collect();
        }
        let active_colors: Vec<ColorId> = self
            .active_colors
            .iter()
            .copied()
            .filter(|j| satisfied.binary_search(j).is_err())
            .collect();
        let mut demands = self.demands.clone();
        for &j in &active_colors {
            demands[j] -= count(deg[j]);
        }
        Ok(Self {
            num_colors: self.num_colors,
            left,
            adjacency,
            color,
            active_colors,
            demands,
            budget: self.budget - 1,
            original_budget: self.original_budget,
        })
    }

    /// Copy keeping only the live sets accepted by `keep`.
    pub fn retain_sets(&self, mut keep: impl FnMut(SetId) -> bool) -> Self {
        let mut out = self.clone();
        out.left.retain(|&v| keep(v));
        for v in 0..out.adjacency.len() {
            if out.left.binary_search(&v).is_err() {
                out.adjacency[v].clear();
            }
        }
        out
    }

    /// Colors of live elements, indexed by element id (deleted elements read `None`).
    pub fn colors(&self) -> &[Option<ColorId>] {
        &self.color
    }

    /// Demand of every color id, active or not.
    pub fn demands(&self) -> &[Rational] {
        &self.demands
    }

    /// Upper bound on the coverage any selection can reach, per active color.
    pub fn color_capacity(&self) -> CoverageVector {
        let mut per_color: BTreeMap<ColorId, usize> = self.active_colors.iter().map(|&j| (j, 0)).collect();
        for c in self.color.iter().flatten() {
            if let Some(x) = per_color.get_mut(c) {
                *x += 1;
            }
        }
        CoverageVector { per_color }
    }

    /// `true` when no selection can reach `factor * t_j` for some color.
    pub fn trivially_infeasible(&self, factor: Rational) -> bool {
        !self.color_capacity().meets(&self.active_demands(), factor)
    }
}

pub(crate) fn sorted_intersection(a: &[ElemId], b: &[ElemId]) -> Vec<ElemId> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

pub(crate) fn intersection_size(a: &[ElemId], b: &[ElemId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// A literal: positive or negated variable, variables numbered from 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Self { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Self { var, positive: false }
    }

    /// DIMACS form: `var + 1`, negated for a negative literal.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }

    pub fn from_dimacs(lit: i64) -> Option<Self> {
        if lit == 0 {
            return None;
        }
        Some(Self { var: lit.unsigned_abs() as usize - 1, positive: lit > 0 })
    }

    pub fn satisfied_by(self, values: &[bool]) -> bool {
        values[self.var] == self.positive
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub color: ColorId,
    /// Sorted and duplicate free.
    pub literals: Vec<Literal>,
}

/// CNF formula with colored clauses, per-color demands and a weight budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfInstance {
    num_vars: usize,
    clauses: Vec<Clause>,
    demands: Vec<Rational>,
    budget: usize,
}

impl CnfInstance {
    /// Validates variable ranges, colors (surjective onto the declared
    /// colors) and rejects tautological clauses. Duplicate literals are merged.
    pub fn new(num_vars: usize, clauses: Vec<Clause>, demands: Vec<Rational>, budget: usize) -> Result<Self> {
        let r = demands.len();
        let mut seen_color = vec![false; r];
        let mut clean = Vec::with_capacity(clauses.len());
        for (i, mut c) in clauses.into_iter().enumerate() {
            if c.color >= r {
                return input(format!("clause {} has color {} but only {r} colors are declared", i + 1, c.color + 1));
            }
            seen_color[c.color] = true;
            c.literals.sort();
            c.literals.dedup();
            for l in &c.literals {
                if l.var >= num_vars {
                    return input(format!("clause {} uses variable {} beyond {num_vars}", i + 1, l.var + 1));
                }
            }
            if c.literals.windows(2).any(|w| w[0].var == w[1].var) {
                return input(format!("clause {} is tautological", i + 1));
            }
            clean.push(c);
        }
        if let Some(j) = seen_color.iter().position(|s| !s) {
            return input(format!("color {} has no clauses", j + 1));
        }
        Ok(Self { num_vars, clauses: clean, demands, budget })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_colors(&self) -> usize {
        self.demands.len()
    }

    pub fn demands(&self) -> &[Rational] {
        &self.demands
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn is_monotone(&self) -> bool {
        self.clauses.iter().all(|c| c.literals.iter().all(|l| l.positive))
    }

    /// Number of satisfied clauses of each color under `values`.
    pub fn satisfied_per_color(&self, values: &[bool]) -> Vec<usize> {
        let mut out = vec![0; self.num_colors()];
        for c in &self.clauses {
            if c.literals.iter().any(|l| l.satisfied_by(values)) {
                out[c.color] += 1;
            }
        }
        out
    }

    /// `(color, demand)` pairs.
    pub fn color_demands(&self) -> Vec<(ColorId, Rational)> {
        self.demands.iter().copied().enumerate().collect()
    }

    /// Set-system encoding of a monotone formula: one set per variable
    /// holding the clauses it occurs in, one element per clause.
    pub fn monotone_encoding(&self) -> Result<CoverageInstance> {
        if !self.is_monotone() {
            return input("formula has negative literals");
        }
        let mut adjacency = vec![Vec::new(); self.num_vars];
        for (ci, c) in self.clauses.iter().enumerate() {
            for l in &c.literals {
                adjacency[l.var].push(ci);
            }
        }
        let colors = self.clauses.iter().map(|c| c.color).collect();
        CoverageInstance::new(adjacency, colors, self.demands.clone(), self.budget, None)
    }
}

/// Satisfaction counts as a coverage vector, for uniform reporting.
pub fn counts_as_vector(counts: &[usize]) -> CoverageVector {
    CoverageVector { per_color: counts.iter().copied().enumerate().collect() }
}

/// `factor = 1 - eps`.
pub fn approx_factor(eps: Rational) -> Rational {
    Rational::one() - eps
}
