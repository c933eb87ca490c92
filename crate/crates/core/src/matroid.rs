//! Matroid independence oracles.
//!
//! Three backends are supported: uniform, partition and linear over a prime
//! field. Truncation and contraction wrap any backend. Truncation caps the
//! size of `S ∪ contracted`, so truncating first and contracting afterwards
//! leaves a matroid of rank `k - |contracted|`, which is how the solvers use it.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::instance::SetId;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Backend {
    Uniform { rank: usize },
    Partition { block_of: Vec<Option<usize>>, capacities: Vec<usize> },
    Linear { field: u64, columns: Vec<Vec<u64>> },
}

/// Row-echelon basis over GF(p); every row has a unit pivot and zeros at the
/// pivots of the rows before it.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Echelon {
    field: u64,
    rows: Vec<(usize, Vec<u64>)>,
}

impl Echelon {
    fn new(field: u64) -> Self {
        Self { field, rows: Vec::new() }
    }

    /// Adds `v` to the span; returns `false` if it was already in it.
    fn insert(&mut self, mut v: Vec<u64>) -> bool {
        let p = self.field;
        for (pivot, row) in &self.rows {
            let f = v[*pivot];
            if f != 0 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x = (*x + (p - f) * r % p) % p;
                }
            }
        }
        let Some(pivot) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = mod_inverse(v[pivot], p);
        for x in v.iter_mut() {
            *x = *x * inv % p;
        }
        self.rows.push((pivot, v));
        true
    }
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    mod_pow(a, p - 2, p)
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Largest supported field size; keeps products below `u64::MAX`.
pub const MAX_FIELD: u64 = 1 << 31;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatroidOracle {
    ground_size: usize,
    backend: Arc<Backend>,
    contracted: Vec<usize>,
    /// Cap on `|S ∪ contracted|`.
    size_cap: Option<usize>,
    basis: Option<Echelon>,
}

impl MatroidOracle {
    fn from_backend(ground_size: usize, backend: Backend) -> Self {
        let basis = match &backend {
            Backend::Linear { field, .. } => Some(Echelon::new(*field)),
            _ => None,
        };
        Self { ground_size, backend: Arc::new(backend), contracted: Vec::new(), size_cap: None, basis }
    }

    pub fn uniform(ground_size: usize, rank: usize) -> Self {
        Self::from_backend(ground_size, Backend::Uniform { rank })
    }

    /// Disjoint `blocks` with per-block `capacities`. Elements in no block are
    /// unconstrained.
    pub fn partition(ground_size: usize, blocks: &[Vec<usize>], capacities: &[usize]) -> Result<Self> {
        if blocks.len() != capacities.len() {
            return input(format!("{} blocks but {} capacities", blocks.len(), capacities.len()));
        }
        let mut block_of = vec![None; ground_size];
        for (b, block) in blocks.iter().enumerate() {
            for &e in block {
                if e >= ground_size {
                    return input(format!("block {b} lists element {e} outside a ground set of {ground_size}"));
                }
                if block_of[e].is_some() {
                    return input(format!("element {e} appears in two blocks"));
                }
                block_of[e] = Some(b);
            }
        }
        Ok(Self::from_backend(ground_size, Backend::Partition { block_of, capacities: capacities.to_vec() }))
    }

    /// Linear matroid over GF(`field`); element `i` is `columns[i]`.
    pub fn linear(field: u64, columns: Vec<Vec<u64>>) -> Result<Self> {
        if !is_prime(field) || field > MAX_FIELD {
            return input(format!("field size {field} is not a supported prime"));
        }
        let dim = columns.first().map_or(0, Vec::len);
        for (i, c) in columns.iter().enumerate() {
            if c.len() != dim {
                return input(format!("column {i} has dimension {} instead of {dim}", c.len()));
            }
            if let Some(x) = c.iter().find(|&&x| x >= field) {
                return input(format!("column {i} has entry {x} outside GF({field})"));
            }
        }
        Ok(Self::from_backend(columns.len(), Backend::Linear { field, columns }))
    }

    /// Size of the original ground set.
    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn contracted(&self) -> &[usize] {
        &self.contracted
    }

    /// Ground set minus contracted elements, ascending.
    pub fn ground_set(&self) -> Vec<usize> {
        (0..self.ground_size).filter(|e| !self.contracted.contains(e)).collect()
    }

    pub fn in_ground_set(&self, e: usize) -> bool {
        e < self.ground_size && !self.contracted.contains(&e)
    }

    fn base_independent(&self, elems: &[usize]) -> bool {
        if let Some(cap) = self.size_cap {
            if elems.len() + self.contracted.len() > cap {
                return false;
            }
        }
        match &*self.backend {
            Backend::Uniform { rank } => elems.len() + self.contracted.len() <= *rank,
            Backend::Partition { block_of, capacities } => {
                let mut used = vec![0usize; capacities.len()];
                for e in self.contracted.iter().chain(elems) {
                    if let Some(b) = block_of[*e] {
                        used[b] += 1;
                        if used[b] > capacities[b] {
                            return false;
                        }
                    }
                }
                true
            }
            Backend::Linear { columns, .. } => {
                let mut basis = self.basis.clone().expect("linear oracle keeps a basis");
                elems.iter().all(|&e| basis.insert(columns[e].clone()))
            }
        }
    }

    /// Independence of `set` in the current (truncated, contracted) matroid.
    pub fn is_independent(&self, set: &[usize]) -> Result<bool> {
        let mut elems = set.to_vec();
        elems.sort_unstable();
        elems.dedup();
        for &e in &elems {
            if !self.in_ground_set(e) {
                return input(format!("element {e} is not in the ground set"));
            }
        }
        Ok(self.base_independent(&elems))
    }

    fn independent_unchecked(&self, elems: &[usize]) -> bool {
        self.base_independent(elems)
    }

    /// Size of a largest independent subset of `set`, found greedily.
    pub fn rank_of(&self, set: &[usize]) -> Result<usize> {
        for &e in set {
            if !self.in_ground_set(e) {
                return input(format!("element {e} is not in the ground set"));
            }
        }
        Ok(self.greedy(set).len())
    }

    /// Rank of the whole (effective) matroid.
    pub fn rank(&self) -> usize {
        self.greedy(&self.ground_set()).len()
    }

    fn greedy(&self, pool: &[usize]) -> Vec<usize> {
        let mut elems = pool.to_vec();
        elems.sort_unstable();
        elems.dedup();
        let mut chosen: Vec<usize> = Vec::new();
        for e in elems {
            if !self.in_ground_set(e) {
                continue;
            }
            chosen.push(e);
            if !self.independent_unchecked(&chosen) {
                chosen.pop();
            }
        }
        chosen
    }

    /// Matroid whose independent sets are those of `self` with at most `k` elements.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        let rank = self.rank();
        if k > rank {
            return input(format!("cannot truncate a rank-{rank} matroid to rank {k}"));
        }
        let cap = k + self.contracted.len();
        Ok(Self { size_cap: Some(self.size_cap.map_or(cap, |c| c.min(cap))), ..self.clone() })
    }

    /// Contraction by `u`: `S` is independent in the result iff `S ∪ {u}` is
    /// independent here.
    pub fn contract(&self, u: usize) -> Result<Self> {
        if !self.in_ground_set(u) {
            return input(format!("element {u} is not in the ground set"));
        }
        if !self.independent_unchecked(&[u]) {
            return input(format!("element {u} is a loop of the current matroid"));
        }
        let mut out = self.clone();
        if let (Some(basis), Backend::Linear { columns, .. }) = (out.basis.as_mut(), &*self.backend) {
            basis.insert(columns[u].clone());
        }
        out.contracted.push(u);
        Ok(out)
    }

    pub fn is_loop(&self, e: usize) -> bool {
        !self.in_ground_set(e) || !self.independent_unchecked(&[e])
    }

    /// Inclusion-wise maximal independent subset of `pool`, scanning in
    /// ascending element order. Elements outside the ground set are skipped.
    ///
    /// The result 1-represents the singletons of `pool`: for any `u` in the
    /// pool and any basis `X` containing `u`, some member `u'` of the result
    /// makes `X - u + u'` a basis.
    pub fn maximal_independent_subset(&self, pool: &[SetId]) -> RepresentativeSubset {
        RepresentativeSubset { members: self.greedy(pool) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentativeSubset {
    pub members: Vec<usize>,
}

/// Matroid description as stored on disk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MatroidSpec {
    Uniform {
        rank: usize,
    },
    Partition {
        blocks: Vec<Vec<usize>>,
        capacities: Vec<usize>,
    },
    Linear {
        #[serde(default = "default_field")]
        field: u64,
        columns: Vec<Vec<u64>>,
    },
}

fn default_field() -> u64 {
    2
}

impl MatroidSpec {
    /// Builds the oracle over the sets `0..ground_size` of an instance.
    pub fn build(&self, ground_size: usize) -> Result<MatroidOracle> {
        match self {
            MatroidSpec::Uniform { rank } => Ok(MatroidOracle::uniform(ground_size, *rank)),
            MatroidSpec::Partition { blocks, capacities } => MatroidOracle::partition(ground_size, blocks, capacities),
            MatroidSpec::Linear { field, columns } => {
                if columns.len() != ground_size {
                    return input(format!("{} columns for {ground_size} sets", columns.len()));
                }
                MatroidOracle::linear(*field, columns.clone())
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MatroidSpec::Uniform { .. } => "uniform",
            MatroidSpec::Partition { .. } => "partition",
            MatroidSpec::Linear { .. } => "linear",
        }
    }
}
