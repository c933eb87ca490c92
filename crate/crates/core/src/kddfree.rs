//! Solver for set systems without `d` sets sharing `d` common elements.
//!
//! Colors are split by demand. Elements of small-demand colors receive random
//! labels, so that sets agreeing on the labels of their small neighbors can be
//! treated alike; sets are also grouped by their degree in each large-demand
//! color. Each group contributes an anchor and the sets whose neighborhoods
//! overlap the anchor heavily, and the search branches over all of them.
//!
//! The guarantee holds for a labeling that separates the neighborhood of an
//! optimal solution, so the randomized driver repeats with fresh labels; the
//! derandomized driver instead walks a perfect hash family.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{input, Error, Result};
use crate::instance::{binomial, intersection_size, ColorId, CoverageInstance, ElemId, SetId, DEFAULT_ENUMERATION_LIMIT};
use crate::matroid::MatroidOracle;
use crate::rational::{check_epsilon, count, growing_floor_thresholds, int, to_f64, Rational};
use crate::reduction::CoverageSolver;
use crate::seed::{derive_seed, rng_from_seed, SolverRng};

pub const DEFAULT_REPETITION_CAP: u64 = 64;
pub const DEFAULT_NODE_LIMIT: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorSplit {
    /// Colors with `t_j <= threshold`.
    pub small: Vec<ColorId>,
    pub large: Vec<ColorId>,
    pub threshold: Rational,
}

impl ColorSplit {
    pub fn is_small(&self, j: ColorId) -> bool {
        self.small.binary_search(&j).is_ok()
    }
}

/// Splits the active colors at `2 k^2 d / eps`.
pub fn split_colors(inst: &CoverageInstance, eps: Rational, k: usize, d: usize) -> ColorSplit {
    let threshold = int(2 * (k * k * d) as i64) / eps;
    let (small, large) = inst.active_colors().iter().partition(|&&j| inst.demand(j) <= threshold);
    ColorSplit { small, large, threshold }
}

/// `ceil(2 k^2 z d / eps)` with `z` the number of small colors.
pub fn num_labels(split: &ColorSplit, eps: Rational, k: usize, d: usize) -> u32 {
    let z = split.small.len();
    (int(2 * (k * k * z * d) as i64) / eps).ceil().to_integer() as u32
}

/// Labels of the elements of small colors, indexed by element id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    pub num_labels: u32,
    labels: Vec<Option<u32>>,
}

impl Labeling {
    pub fn empty(num_elements: usize) -> Self {
        Self { num_labels: 0, labels: vec![None; num_elements] }
    }

    pub fn from_labels(num_labels: u32, labels: Vec<Option<u32>>) -> Self {
        Self { num_labels, labels }
    }

    pub fn label(&self, e: ElemId) -> Option<u32> {
        self.labels.get(e).copied().flatten()
    }

    /// Number of labeled elements.
    pub fn len(&self) -> usize {
        self.labels.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn small_elements<'a>(inst: &'a CoverageInstance, split: &'a ColorSplit) -> impl Iterator<Item = ElemId> + 'a {
    inst.colors().iter().enumerate().filter_map(|(e, c)| c.filter(|&j| split.is_small(j)).map(|_| e))
}

fn draw_labels(inst: &CoverageInstance, split: &ColorSplit, eps: Rational, k: usize, d: usize, rng: &mut SolverRng) -> Labeling {
    let q = num_labels(split, eps, k, d);
    let mut out = Labeling::empty(inst.num_elements());
    if split.small.is_empty() || q == 0 {
        return out;
    }
    out.num_labels = q;
    for e in small_elements(inst, split) {
        out.labels[e] = Some(rng.gen_range(0..q));
    }
    out
}

/// Independent uniform labels for the elements of small colors.
pub fn label_coding(inst: &CoverageInstance, split: &ColorSplit, eps: Rational, k: usize, d: usize, seed: u64) -> Labeling {
    draw_labels(inst, split, eps, k, d, &mut rng_from_seed(seed))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum KddBagKey {
    /// Degree buckets over the large colors plus a label signature.
    Joint { buckets: Vec<u32>, labels: Vec<u32> },
    /// Label signature only.
    Labels(Vec<u32>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KddBag {
    pub key: KddBagKey,
    /// Ascending.
    pub members: Vec<SetId>,
}

/// Degree bucketing for one large color: bucket 0 holds degrees up to
/// `2kd/eps`, bucket `alpha` degrees in `(base (1+eps)^(alpha-1), base (1+eps)^alpha]`.
#[derive(Clone, Debug)]
pub struct LargeBuckets {
    thresholds: Vec<i64>,
}

impl LargeBuckets {
    pub fn new(eps: Rational, k: usize, d: usize, max_degree: usize) -> Self {
        let base = int(2 * (k * d) as i64) / eps;
        Self { thresholds: growing_floor_thresholds(base, Rational::one() + eps, max_degree as i64) }
    }

    pub fn index(&self, degree: usize) -> u32 {
        let d = degree as i64;
        self.thresholds.iter().position(|&c| d <= c).expect("thresholds reach the largest degree") as u32
    }
}

/// Label signature `label(N(v) ∩ B_small)`, sorted.
fn signature(inst: &CoverageInstance, labeling: &Labeling, split: &ColorSplit, v: SetId) -> Vec<u32> {
    let set: BTreeSet<u32> = inst
        .neighbors(v)
        .iter()
        .filter(|&&e| inst.color_of(e).is_some_and(|j| split.is_small(j)))
        .filter_map(|&e| labeling.label(e))
        .collect();
    set.into_iter().collect()
}

/// All non-empty bags: the joint bags (when some color is large) followed by
/// the label-only bags, each group in key order. Only realized signatures appear.
pub fn kdd_buckets(
    inst: &CoverageInstance,
    split: &ColorSplit,
    labeling: &Labeling,
    eps: Rational,
    k: usize,
    d: usize,
) -> Vec<KddBag> {
    let max_degree = inst.live_sets().iter().map(|&v| inst.neighbors(v).len()).max().unwrap_or(0);
    let buckets = LargeBuckets::new(eps, k, d, max_degree);
    let mut joint: BTreeMap<(Vec<u32>, Vec<u32>), Vec<SetId>> = BTreeMap::new();
    let mut by_labels: BTreeMap<Vec<u32>, Vec<SetId>> = BTreeMap::new();
    for &v in inst.live_sets() {
        let gamma = signature(inst, labeling, split, v);
        if !split.large.is_empty() {
            let deg = inst.color_degrees(v);
            let key: Vec<u32> = split.large.iter().map(|&j| buckets.index(deg[j])).collect();
            joint.entry((key, gamma.clone())).or_default().push(v);
        }
        by_labels.entry(gamma).or_default().push(v);
    }
    let joint = joint.into_iter().map(|((buckets, labels), members)| KddBag {
        key: KddBagKey::Joint { buckets, labels },
        members,
    });
    let labels = by_labels.into_iter().map(|(g, members)| KddBag { key: KddBagKey::Labels(g), members });
    joint.chain(labels).collect()
}

/// Live sets `v` with `|N_j(v) ∩ X| >= |X| / beta` and `|N_j(v)| >= d`.
/// `x` must be sorted.
pub fn high_degree_set(inst: &CoverageInstance, x: &[ElemId], j: ColorId, beta: Rational, d: usize) -> Vec<SetId> {
    if x.is_empty() {
        return Vec::new();
    }
    let need = count(x.len()) / beta;
    inst.live_sets()
        .iter()
        .copied()
        .filter(|&v| {
            let nj = inst.color_neighbors(v, j);
            nj.len() >= d && count(intersection_size(&nj, x)) >= need
        })
        .collect()
}

/// `(d - 1) (2 beta)^(d - 1)`.
pub fn high_degree_bound(beta: Rational, d: usize) -> f64 {
    (d.saturating_sub(1)) as f64 * (2.0 * to_f64(&beta)).powi(d as i32 - 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HashMode {
    /// Deterministic greedy construction, checked against every `q`-subset.
    Exhaustive,
    /// Random functions added until every `q`-subset is separated.
    RandomVerified { seed: u64, max_functions: u64 },
}

/// Size gate of the exhaustive construction.
pub const EXHAUSTIVE_MAX_P: usize = 12;
pub const EXHAUSTIVE_MAX_Q: usize = 4;

fn for_each_subset(p: usize, q: usize, mut f: impl FnMut(&[usize]) -> bool) {
    let mut idx: Vec<usize> = (0..q).collect();
    loop {
        if !f(&idx) {
            return;
        }
        let mut i = q;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < p - q + i {
                idx[i] += 1;
                for t in i + 1..q {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

fn injective_on(f: &[u32], subset: &[usize]) -> bool {
    let mut seen = BTreeSet::new();
    subset.iter().all(|&e| seen.insert(f[e]))
}

/// Checks that every `q`-subset of `0..p` is mapped injectively by some member.
pub fn is_perfect_hash_family(p: usize, q: usize, family: &[Vec<u32>]) -> bool {
    if q > p {
        return true;
    }
    if q == 0 {
        return true;
    }
    let mut ok = true;
    for_each_subset(p, q, |s| {
        ok = family.iter().any(|f| injective_on(f, s));
        ok
    });
    ok
}

/// Functions `0..p -> 0..q` such that every `q`-subset is mapped injectively by at least one.
pub fn perfect_hash_family(p: usize, q: usize, mode: HashMode) -> Result<Vec<Vec<u32>>> {
    if q >= p {
        return Ok(vec![(0..p as u32).collect()]);
    }
    if q <= 1 {
        return Ok(vec![vec![0; p]]);
    }
    let subsets = binomial(p as u64, q as u64);
    let mut family: Vec<Vec<u32>> = Vec::new();
    match mode {
        HashMode::Exhaustive => {
            if p > EXHAUSTIVE_MAX_P || q > EXHAUSTIVE_MAX_Q {
                return Err(Error::Size(format!(
                    "exhaustive hash family needs p <= {EXHAUSTIVE_MAX_P} and q <= {EXHAUSTIVE_MAX_Q}, got p = {p}, q = {q}"
                )));
            }
            for_each_subset(p, q, |s| {
                if !family.iter().any(|f| injective_on(f, s)) {
                    let mut f: Vec<u32> = (0..p).map(|e| (e % q) as u32).collect();
                    for (i, &e) in s.iter().enumerate() {
                        f[e] = i as u32;
                    }
                    family.push(f);
                }
                true
            });
        }
        HashMode::RandomVerified { seed, max_functions } => {
            if subsets > DEFAULT_ENUMERATION_LIMIT {
                return Err(Error::Size(format!("{subsets} subsets are too many to verify")));
            }
            let mut uncovered: Vec<Vec<usize>> = Vec::new();
            for_each_subset(p, q, |s| {
                uncovered.push(s.to_vec());
                true
            });
            let mut rng = rng_from_seed(seed);
            let mut tries = 0;
            while !uncovered.is_empty() {
                if tries == max_functions {
                    return Err(Error::Size(format!(
                        "{} subsets still unseparated after {max_functions} random functions",
                        uncovered.len()
                    )));
                }
                tries += 1;
                let f: Vec<u32> = (0..p).map(|_| rng.gen_range(0..q as u32)).collect();
                let before = uncovered.len();
                uncovered.retain(|s| !injective_on(&f, s));
                if uncovered.len() < before {
                    family.push(f);
                }
            }
        }
    }
    debug_assert!(is_perfect_hash_family(p, q, &family));
    Ok(family)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelMode {
    /// Fresh random labels at every call, whole search repeated up to the cap.
    Randomized { repetition_cap: u64 },
    /// One fixed labeling per member of a perfect hash family over the live
    /// elements. `labels` overrides the label count.
    Derandomized { labels: Option<u32>, hash: HashMode },
}

#[derive(Clone, Debug, PartialEq)]
pub struct KddConfig {
    /// Declared biclique parameter.
    pub d: usize,
    /// Verify the biclique-freeness of the input first.
    pub strict: bool,
    pub mode: LabelMode,
    pub seed: u64,
    /// Run the search with `eps / k`, so that the result meets `(1 - eps) t_j`
    /// on large colors. When off, the search runs with `eps` itself and
    /// accepts `(1 - k eps) t_j`.
    pub substitute_eps: bool,
    pub node_limit: u64,
    pub check_limit: u64,
}

impl KddConfig {
    pub fn new(d: usize) -> Self {
        Self {
            d,
            strict: false,
            mode: LabelMode::Randomized { repetition_cap: DEFAULT_REPETITION_CAP },
            seed: 0,
            substitute_eps: true,
            node_limit: DEFAULT_NODE_LIMIT,
            check_limit: DEFAULT_ENUMERATION_LIMIT,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KddReport {
    /// Sorted solution, or `None` for NO.
    pub solution: Option<Vec<SetId>>,
    /// Labelings tried (repetitions or hash family members).
    pub labelings_run: u64,
    pub labelings_planned: u64,
    pub nodes: u64,
}

/// Smallest `d >= 1` for which the instance has no `d` sets sharing `d` elements.
pub fn smallest_free_parameter(inst: &CoverageInstance, limit: u64) -> Result<usize> {
    let top = inst.max_frequency() + 1;
    for d in 1..top {
        if inst.check_kdd_free(d, limit)? {
            return Ok(d);
        }
    }
    Ok(top)
}

/// `min(cap, ceil(e^min(2 k^3 k* d r / eps, ln cap)))`.
pub fn planned_repetitions(inst: &CoverageInstance, eps: Rational, d: usize, cap: u64) -> u64 {
    let k = inst.budget() as f64;
    let exponent = 2.0 * k.powi(3) * inst.original_budget() as f64 * d as f64 * inst.active_colors().len() as f64
        / to_f64(&eps);
    let capped = exponent.min((cap.max(1) as f64).ln());
    (capped.exp().ceil() as u64).clamp(1, cap.max(1))
}

/// Large colors must reach `(1 - k eps) t_j`, small colors `t_j`.
fn level_accepts(inst: &CoverageInstance, split: &ColorSplit, eps: Rational, sets: &[SetId]) -> bool {
    let cov = inst.coverage_unchecked(sets);
    let relaxed = Rational::one() - count(inst.budget()) * eps;
    inst.active_demands().iter().all(|&(j, t)| {
        let c = count(cov.get(j));
        if split.is_small(j) {
            c >= t
        } else {
            c >= relaxed * t
        }
    })
}

struct Search<'a> {
    eps: Rational,
    d: usize,
    verified: bool,
    fixed: Option<&'a Labeling>,
    rng: SolverRng,
    nodes: u64,
    node_limit: u64,
}

impl Search<'_> {
    fn branch_set(
        &self,
        inst: &CoverageInstance,
        split: &ColorSplit,
        bags: &[KddBag],
        matroid: Option<&MatroidOracle>,
    ) -> Vec<SetId> {
        let beta = count(inst.budget()) / self.eps;
        let mut z = BTreeSet::new();
        for bag in bags {
            let anchors = match matroid {
                Some(m) => m.maximal_independent_subset(&bag.members).members,
                None => vec![bag.members[0]],
            };
            for x in anchors {
                z.insert(x);
                if matches!(bag.key, KddBagKey::Labels(_)) {
                    continue;
                }
                for &j in &split.large {
                    let nx = inst.color_neighbors(x, j);
                    let ahd = high_degree_set(inst, &nx, j, beta, self.d);
                    if self.verified && count(nx.len()) / (int(2) * beta) > count(self.d) {
                        assert!(
                            ahd.len() as f64 <= high_degree_bound(beta, self.d),
                            "high-degree set exceeds its bound on a biclique-free instance"
                        );
                    }
                    z.extend(ahd);
                }
            }
        }
        z.into_iter().collect()
    }

    fn solve(&mut self, inst: &CoverageInstance, matroid: Option<&MatroidOracle>) -> Result<Option<Vec<SetId>>> {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(Error::Size(format!("search exceeded {} nodes", self.node_limit)));
        }
        let k = inst.budget();
        if k == 0 {
            return Ok(Some(Vec::new()));
        }
        let pruned;
        let inst = match matroid {
            Some(m) => {
                pruned = inst.retain_sets(|v| !m.is_loop(v));
                &pruned
            }
            None => inst,
        };
        let split = split_colors(inst, self.eps, k, self.d);
        let drawn;
        let labeling = match self.fixed {
            Some(l) => l,
            None => {
                drawn = draw_labels(inst, &split, self.eps, k, self.d, &mut self.rng);
                &drawn
            }
        };
        let bags = kdd_buckets(inst, &split, labeling, self.eps, k, self.d);
        let z = self.branch_set(inst, &split, &bags, matroid);
        if z.is_empty() {
            return Ok(level_accepts(inst, &split, self.eps, &[]).then(Vec::new));
        }
        for y in z {
            let sub = inst.prune(y)?;
            let sub_matroid = matroid.map(|m| m.contract(y)).transpose()?;
            if let Some(mut s) = self.solve(&sub, sub_matroid.as_ref())? {
                s.push(y);
                if level_accepts(inst, &split, self.eps, &s) {
                    return Ok(Some(s));
                }
            }
        }
        Ok(None)
    }
}

fn run(inst: &CoverageInstance, matroid: Option<&MatroidOracle>, eps: Rational, config: &KddConfig) -> Result<KddReport> {
    check_epsilon(eps)?;
    if config.d == 0 {
        return input("d must be at least 1");
    }
    if config.strict && !inst.check_kdd_free(config.d, config.check_limit)? {
        return input(format!("instance contains {0} sets sharing {0} elements", config.d));
    }
    if let Some(m) = matroid {
        if m.ground_size() != inst.num_sets() {
            return input(format!("matroid has {} elements but the instance has {} sets", m.ground_size(), inst.num_sets()));
        }
    }
    let k = inst.budget();
    if k == 0 {
        let ok = inst.active_demands().iter().all(|(_, t)| *t <= Rational::zero());
        return Ok(KddReport { solution: ok.then(Vec::new), labelings_run: 0, labelings_planned: 0, nodes: 1 });
    }
    let inner = if config.substitute_eps { eps / count(k) } else { eps };
    let truncated = match matroid {
        Some(m) => Some(m.truncate(k.min(m.rank()))?),
        None => None,
    };
    let mut report = KddReport { solution: None, labelings_run: 0, labelings_planned: 0, nodes: 0 };
    let attempt = |fixed: Option<&Labeling>, seed: u64, report: &mut KddReport| -> Result<bool> {
        let mut search = Search {
            eps: inner,
            d: config.d,
            verified: config.strict,
            fixed,
            rng: rng_from_seed(seed),
            nodes: 0,
            node_limit: config.node_limit.saturating_sub(report.nodes),
        };
        let found = search.solve(inst, truncated.as_ref());
        report.nodes += search.nodes;
        report.labelings_run += 1;
        if let Some(mut s) = found? {
            s.sort_unstable();
            report.solution = Some(s);
            return Ok(true);
        }
        Ok(false)
    };
    match config.mode {
        LabelMode::Randomized { repetition_cap } => {
            report.labelings_planned = planned_repetitions(inst, inner, config.d, repetition_cap);
            for i in 0..report.labelings_planned {
                if attempt(None, derive_seed(config.seed, i), &mut report)? {
                    break;
                }
            }
        }
        LabelMode::Derandomized { labels, hash } => {
            let elems: Vec<ElemId> = inst.live_elements().collect();
            let q = labels.unwrap_or_else(|| num_labels(&split_colors(inst, inner, k, config.d), inner, k, config.d));
            let family = if q == 0 {
                vec![vec![0; elems.len()]]
            } else {
                perfect_hash_family(elems.len(), q as usize, hash)?
            };
            report.labelings_planned = family.len() as u64;
            for f in &family {
                let mut labels = vec![None; inst.num_elements()];
                for (i, &e) in elems.iter().enumerate() {
                    labels[e] = Some(f[i]);
                }
                let labeling = Labeling::from_labels(q.max(1), labels);
                if attempt(Some(&labeling), config.seed, &mut report)? {
                    break;
                }
            }
        }
    }
    if let (Some(m), Some(s)) = (matroid, &report.solution) {
        assert!(m.is_independent(s)?, "matroid search returned a dependent set");
    }
    Ok(report)
}

/// Branching search; `None` in the report means NO.
///
/// A returned set has at most `k` members, covers at least `t_j` elements of
/// every small color and, with `substitute_eps`, at least `(1 - eps) t_j` of
/// every large one.
pub fn kdd_pccds(inst: &CoverageInstance, eps: Rational, config: &KddConfig) -> Result<KddReport> {
    run(inst, None, eps, config)
}

/// Matroid-constrained variant: every member of a maximal independent subset
/// of each bag acts as an anchor, and the matroid is contracted on each branch.
pub fn kdd_pccds_matroid(
    inst: &CoverageInstance,
    matroid: &MatroidOracle,
    eps: Rational,
    config: &KddConfig,
) -> Result<KddReport> {
    run(inst, Some(matroid), eps, config)
}

/// Adapter for the CNF reduction; the round seed replaces the configured one.
#[derive(Clone, Debug)]
pub struct KddSolver {
    pub eps: Rational,
    pub config: KddConfig,
}

impl CoverageSolver for KddSolver {
    fn solve(&self, inst: &CoverageInstance, matroid: Option<&MatroidOracle>, seed: u64) -> Result<Option<Vec<SetId>>> {
        let config = KddConfig { seed, ..self.config.clone() };
        let report = match matroid {
            Some(m) => kdd_pccds_matroid(inst, m, self.eps, &config)?,
            None => kdd_pccds(inst, self.eps, &config)?,
        };
        Ok(report.solution)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Rational {
        Rational::new(1, 2)
    }

    #[test]
    fn unit_demands_are_small() {
        let inst = CoverageInstance::new(vec![vec![0, 1]], vec![0, 1], vec![int(1), int(1)], 5, None).unwrap();
        let s = split_colors(&inst, half(), 5, 1);
        assert_eq!(s.small, vec![0, 1]);
        assert!(s.large.is_empty());
    }

    #[test]
    fn whole_color_class_above_threshold_is_large() {
        // k = 1, d = 1, eps = 1/2: threshold 4, class of 6
        let inst = CoverageInstance::new(vec![(0..6).collect()], vec![0; 6], vec![int(6)], 1, None).unwrap();
        let s = split_colors(&inst, half(), 1, 1);
        assert_eq!(s.large, vec![0]);
    }

    #[test]
    fn no_small_colors_no_labels() {
        let inst = CoverageInstance::new(vec![(0..6).collect()], vec![0; 6], vec![int(6)], 1, None).unwrap();
        let s = split_colors(&inst, half(), 1, 1);
        assert!(label_coding(&inst, &s, half(), 1, 1, 3).is_empty());
    }

    #[test]
    fn label_only_bags_without_large_colors() {
        let inst = CoverageInstance::new(vec![vec![0], vec![1], vec![0, 1]], vec![0, 0], vec![int(1)], 2, None).unwrap();
        let s = split_colors(&inst, half(), 2, 2);
        let l = label_coding(&inst, &s, half(), 2, 2, 7);
        let bags = kdd_buckets(&inst, &s, &l, half(), 2, 2);
        assert!(bags.iter().all(|b| matches!(b.key, KddBagKey::Labels(_))));
        let total: usize = bags.iter().map(|b| b.members.len()).sum();
        assert_eq!(total, 3);
    }

    #[test]
    fn high_degree_examples() {
        // v0 holds 5 of X = {0..9}; v1 holds 4 of them with only 4 neighbors
        let x: Vec<ElemId> = (0..10).collect();
        let inst = CoverageInstance::new(
            vec![vec![0, 1, 2, 3, 4], vec![5, 6, 7, 8]],
            vec![0; 10],
            vec![int(1)],
            1,
            None,
        )
        .unwrap();
        assert_eq!(high_degree_set(&inst, &x, 0, int(2), 5), vec![0]);
        assert!(high_degree_set(&inst, &x, 0, int(2), 6).is_empty());
        assert!(high_degree_set(&inst, &[], 0, int(2), 1).is_empty());
    }

    #[test]
    fn budget_zero_base_case() {
        let zero = CoverageInstance::new(vec![vec![0]], vec![0], vec![int(0)], 0, Some(1)).unwrap();
        assert_eq!(kdd_pccds(&zero, half(), &KddConfig::new(2)).unwrap().solution, Some(vec![]));
        let pos = CoverageInstance::new(vec![vec![0]], vec![0], vec![int(1)], 0, Some(1)).unwrap();
        assert_eq!(kdd_pccds(&pos, half(), &KddConfig::new(2)).unwrap().solution, None);
    }

    #[test]
    fn single_covering_set_found() {
        let inst = CoverageInstance::new(
            vec![vec![0], vec![0, 1, 2, 3], vec![3]],
            vec![0, 0, 1, 1],
            vec![int(2), int(2)],
            1,
            None,
        )
        .unwrap();
        assert_eq!(kdd_pccds(&inst, half(), &KddConfig::new(2)).unwrap().solution, Some(vec![1]));
    }

    #[test]
    fn partition_matroid_forbids_covering_pair() {
        let inst = CoverageInstance::new(vec![vec![0, 1], vec![2, 3], vec![]], vec![0; 4], vec![int(4)], 2, None).unwrap();
        let m = MatroidOracle::partition(3, &[vec![0, 1]], &[1]).unwrap();
        assert_eq!(kdd_pccds_matroid(&inst, &m, half(), &KddConfig::new(2)).unwrap().solution, None);
        assert_eq!(kdd_pccds(&inst, half(), &KddConfig::new(2)).unwrap().solution, Some(vec![0, 1]));
    }

    #[test]
    fn strict_mode_rejects_bicliques() {
        // two sets sharing two elements form a K_{2,2}
        let inst = CoverageInstance::new(vec![vec![0, 1], vec![0, 1]], vec![0, 0], vec![int(1)], 1, None).unwrap();
        let cfg = KddConfig { strict: true, ..KddConfig::new(2) };
        assert!(matches!(kdd_pccds(&inst, half(), &cfg), Err(Error::Input(_))));
        assert_eq!(smallest_free_parameter(&inst, 1000).unwrap(), 3);
    }

    #[test]
    fn trivial_hash_families() {
        assert_eq!(perfect_hash_family(5, 1, HashMode::Exhaustive).unwrap().len(), 1);
        assert_eq!(perfect_hash_family(4, 4, HashMode::Exhaustive).unwrap(), vec![vec![0, 1, 2, 3]]);
        assert!(perfect_hash_family(20, 4, HashMode::Exhaustive).is_err());
    }

    #[test]
    fn six_three_family_is_perfect() {
        let fam = perfect_hash_family(6, 3, HashMode::Exhaustive).unwrap();
        assert!(is_perfect_hash_family(6, 3, &fam));
        let rnd = perfect_hash_family(6, 3, HashMode::RandomVerified { seed: 1, max_functions: 10_000 }).unwrap();
        assert!(is_perfect_hash_family(6, 3, &rnd));
    }

    #[test]
    fn derandomized_finds_covering_pair() {
        let inst = CoverageInstance::new(
            vec![vec![0], vec![1], vec![2], vec![0, 1]],
            vec![0, 0, 1],
            vec![int(2), int(1)],
            2,
            None,
        )
        .unwrap();
        let cfg = KddConfig {
            mode: LabelMode::Derandomized { labels: Some(3), hash: HashMode::Exhaustive },
            ..KddConfig::new(2)
        };
        let rep = kdd_pccds(&inst, half(), &cfg).unwrap();
        let sol = rep.solution.unwrap();
        assert!(inst.satisfies(&sol, int(1)));
    }
}
