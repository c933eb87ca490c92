//! Seeded random instances.
//!
//! In planted mode a random size-`k` selection (or weight-`k` assignment) is
//! drawn first and every demand is set to what it covers, so the instance is
//! feasible by construction. In random mode each demand is uniform between 0
//! and the size of its color class.

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::error::{input, Error, Result};
use crate::instance::{Clause, CnfInstance, CoverageInstance, Literal, SetId};
use crate::rational::{count, Rational};
use crate::seed::{rng_from_seed, SolverRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DemandMode {
    Planted,
    Random,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenParams {
    /// Sets, or variables for CNF.
    pub n: usize,
    /// Elements, or clauses for CNF.
    pub m: usize,
    /// Frequency bound, biclique parameter, or clause width for CNF.
    pub d: usize,
    pub r: usize,
    pub k: usize,
    pub demands: DemandMode,
    pub seed: u64,
    /// Largest set drawn by the biclique-free generator.
    pub max_set_size: usize,
    /// Resampling budget of the biclique-free generator.
    pub attempts: u64,
}

impl GenParams {
    pub fn new(n: usize, m: usize, d: usize, r: usize, k: usize) -> Self {
        Self { n, m, d, r, k, demands: DemandMode::Planted, seed: 0, max_set_size: 4, attempts: 10_000 }
    }

    fn check(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 || self.d == 0 || self.r == 0 {
            return input("n, m, d and r must be positive");
        }
        if self.r > self.m {
            return input("more colors than elements");
        }
        if self.k > self.n {
            return input("budget exceeds the number of sets");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated<T> {
    pub instance: T,
    /// The planted selection (sets, or true variables 0-based).
    pub planted: Option<Vec<usize>>,
}

/// Colors with every color used at least once.
fn surjective_colors(m: usize, r: usize, rng: &mut SolverRng) -> Vec<usize> {
    let mut colors: Vec<usize> = (0..m).map(|e| if e < r { e } else { rng.gen_range(0..r) }).collect();
    colors.shuffle(rng);
    colors
}

fn demands_for(covered: &[usize], class_sizes: &[usize], mode: DemandMode, rng: &mut SolverRng) -> Vec<Rational> {
    match mode {
        DemandMode::Planted => covered.iter().map(|&c| count(c)).collect(),
        DemandMode::Random => class_sizes.iter().map(|&s| count(rng.gen_range(0..=s))).collect(),
    }
}

fn class_sizes(colors: &[usize], r: usize) -> Vec<usize> {
    let mut sizes = vec![0; r];
    for &c in colors {
        sizes[c] += 1;
    }
    sizes
}

fn finish_sets(
    adjacency: Vec<Vec<usize>>,
    colors: Vec<usize>,
    p: &GenParams,
    rng: &mut SolverRng,
) -> Result<Generated<CoverageInstance>> {
    let planted: Vec<SetId> = {
        let mut s = index::sample(rng, p.n, p.k).into_vec();
        s.sort_unstable();
        s
    };
    let probe = CoverageInstance::new(adjacency.clone(), colors.clone(), vec![Rational::default(); p.r], p.k, None)?;
    let cov = probe.coverage_vector(&planted)?;
    let covered: Vec<usize> = (0..p.r).map(|j| cov.get(j)).collect();
    let demands = demands_for(&covered, &class_sizes(&colors, p.r), p.demands, rng);
    let instance = CoverageInstance::new(adjacency, colors, demands, p.k, None)?;
    let planted = (p.demands == DemandMode::Planted).then_some(planted);
    Ok(Generated { instance, planted })
}

/// Every element lies in between 1 and `d` distinct sets.
pub fn gen_freq_d(p: &GenParams) -> Result<Generated<CoverageInstance>> {
    p.check()?;
    let mut rng = rng_from_seed(p.seed);
    let colors = surjective_colors(p.m, p.r, &mut rng);
    let mut adjacency = vec![Vec::new(); p.n];
    for e in 0..p.m {
        let f = rng.gen_range(1..=p.d.min(p.n));
        for v in index::sample(&mut rng, p.n, f) {
            adjacency[v].push(e);
        }
    }
    finish_sets(adjacency, colors, p, &mut rng)
}

fn shares_biclique(adjacency: &[Vec<usize>], colors: &[usize], r: usize, d: usize) -> Result<bool> {
    let inst = CoverageInstance::new_allow_empty_colors(adjacency.to_vec(), colors.to_vec(), vec![Rational::default(); r], 0, None)?;
    Ok(!inst.check_kdd_free(d, u64::MAX)?)
}

/// Sets of size `1..=max_set_size`; a set that would complete `d` sets
/// sharing `d` elements is redrawn, up to `attempts` redraws in total.
pub fn gen_kdd_free(p: &GenParams) -> Result<Generated<CoverageInstance>> {
    p.check()?;
    if p.max_set_size == 0 {
        return input("max_set_size must be positive");
    }
    let mut rng = rng_from_seed(p.seed);
    let colors = surjective_colors(p.m, p.r, &mut rng);
    let mut adjacency: Vec<Vec<usize>> = Vec::with_capacity(p.n);
    let mut redraws = 0;
    while adjacency.len() < p.n {
        let size = rng.gen_range(1..=p.max_set_size.min(p.m));
        let mut set = index::sample(&mut rng, p.m, size).into_vec();
        set.sort_unstable();
        adjacency.push(set);
        if adjacency.len() >= p.d && shares_biclique(&adjacency, &colors, p.r, p.d)? {
            adjacency.pop();
            redraws += 1;
            if redraws > p.attempts {
                return Err(Error::Size(format!("no biclique-free set found within {} redraws", p.attempts)));
            }
        }
    }
    finish_sets(adjacency, colors, p, &mut rng)
}

/// `m` clauses of width `min(d, n)` over `n` variables, each literal negated with probability 1/2.
pub fn gen_cnf(p: &GenParams) -> Result<Generated<CnfInstance>> {
    p.check()?;
    let mut rng = rng_from_seed(p.seed);
    let colors = surjective_colors(p.m, p.r, &mut rng);
    let width = p.d.min(p.n);
    let clauses: Vec<Clause> = colors
        .iter()
        .map(|&color| {
            let literals = index::sample(&mut rng, p.n, width)
                .into_iter()
                .map(|v| Literal { var: v, positive: rng.gen_bool(0.5) })
                .collect();
            Clause { color, literals }
        })
        .collect();
    let mut values = vec![false; p.n];
    let chosen = index::sample(&mut rng, p.n, p.k).into_vec();
    for &v in &chosen {
        values[v] = true;
    }
    let probe = CnfInstance::new(p.n, clauses.clone(), vec![Rational::default(); p.r], p.k)?;
    let sat = probe.satisfied_per_color(&values);
    let demands = demands_for(&sat, &class_sizes(&colors, p.r), p.demands, &mut rng);
    let instance = CnfInstance::new(p.n, clauses, demands, p.k)?;
    let planted = (p.demands == DemandMode::Planted).then(|| {
        let mut c = chosen;
        c.sort_unstable();
        c
    });
    Ok(Generated { instance, planted })
}
