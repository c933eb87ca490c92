use std::collections::BTreeSet;

use proptest::prelude::*;

use fptcov::exact::{exact_pccds, DEFAULT_ENUMERATION_LIMIT};
use fptcov::formats::{parse_colored_cnf, parse_set_system, write_colored_cnf, write_set_system};
use fptcov::freqd::{branch_distribution, bucketing, pccds_once, sample_vertex};
use fptcov::generate::{gen_freq_d, GenParams};
use fptcov::kddfree::{
    is_perfect_hash_family, kdd_buckets, kdd_pccds, kdd_pccds_matroid, label_coding, perfect_hash_family,
    split_colors, HashMode, KddBagKey, KddConfig,
};
use fptcov::reduction::{lift_solution, reduce_instance};
use fptcov::{rng_from_seed, Clause, CnfInstance, CoverageInstance, Literal, MatroidOracle, Rational};

fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// Random instance: `(adjacency, colors, demands, budget)`.
fn instance() -> impl Strategy<Value = CoverageInstance> {
    (1usize..=8, 1usize..=10, 1usize..=3, 0usize..=3)
        .prop_flat_map(|(n, m, r, k)| {
            let r = r.min(m);
            (
                proptest::collection::vec(proptest::collection::btree_set(0..m, 0..=m.min(5)), n),
                proptest::collection::vec(0..r, m - r),
                proptest::collection::vec(0i64..=8, r),
                Just((m, r, k.min(n))),
            )
        })
        .prop_map(|(sets, extra, demands, (_, r, k))| {
            let colors: Vec<usize> = (0..r).chain(extra).collect();
            let adjacency = sets.into_iter().map(|s| s.into_iter().collect()).collect();
            CoverageInstance::new(adjacency, colors, demands.into_iter().map(int).collect(), k, None).unwrap()
        })
}

fn subset_of(n: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::btree_set(0..n, 0..=n).prop_map(|s| s.into_iter().collect())
}

fn scan_degree(inst: &CoverageInstance, v: usize, j: usize) -> usize {
    inst.neighbors(v).iter().filter(|&&e| inst.color_of(e) == Some(j)).count()
}

/// Rank over GF(p) by plain Gaussian elimination on a copy.
fn gauss_rank(p: u64, cols: &[Vec<u64>]) -> usize {
    let mut rows: Vec<Vec<u64>> = cols.to_vec();
    let dim = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..dim {
        let Some(piv) = (rank..rows.len()).find(|&i| rows[i][c] % p != 0) else { continue };
        rows.swap(rank, piv);
        let inv = (1..p).find(|x| rows[rank][c] * x % p == 1).unwrap();
        for x in rows[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..rows.len() {
            if i != rank && rows[i][c] != 0 {
                let f = rows[i][c];
                for t in 0..dim {
                    rows[i][t] = (rows[i][t] + (p - f) * rows[rank][t]) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn linear_matroid() -> impl Strategy<Value = (u64, Vec<Vec<u64>>)> {
    (prop_oneof![Just(2u64), Just(3), Just(5)], 1usize..=6, 1usize..=4).prop_flat_map(|(p, n, dim)| {
        (Just(p), proptest::collection::vec(proptest::collection::vec(0..p, dim), n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn degrees_match_scan(inst in instance()) {
        for v in 0..inst.num_sets() {
            let mut total = 0;
            for j in 0..inst.num_colors() {
                let d = inst.j_degree(v, j).unwrap();
                prop_assert_eq!(d, scan_degree(&inst, v, j));
                total += d;
            }
            prop_assert_eq!(total, inst.neighbors(v).len());
        }
    }

    #[test]
    fn coverage_matches_membership_and_is_monotone(inst in instance(), a in subset_of(8), b in subset_of(8)) {
        let n = inst.num_sets();
        let s: Vec<usize> = a.into_iter().filter(|&v| v < n).collect();
        let mut big: Vec<usize> = s.iter().copied().chain(b.into_iter().filter(|&v| v < n)).collect();
        big.sort_unstable();
        big.dedup();
        let cov = inst.coverage_vector(&s).unwrap();
        let cov_big = inst.coverage_vector(&big).unwrap();
        for j in 0..inst.num_colors() {
            let brute = (0..inst.num_elements())
                .filter(|&e| inst.color_of(e) == Some(j) && s.iter().any(|&v| inst.neighbors(v).contains(&e)))
                .count();
            prop_assert_eq!(cov.get(j), brute);
            prop_assert!(cov.get(j) <= cov_big.get(j));
            let sum: usize = s.iter().map(|&v| scan_degree(&inst, v, j)).sum();
            let mut seen = BTreeSet::new();
            let disjoint = s.iter().all(|&v| {
                inst.neighbors(v).iter().filter(|&&e| inst.color_of(e) == Some(j)).all(|&e| seen.insert(e))
            });
            prop_assert!(cov.get(j) <= sum);
            prop_assert_eq!(cov.get(j) == sum, disjoint);
        }
    }

    #[test]
    fn biclique_check_for_pairs(inst in instance()) {
        let n = inst.num_sets();
        let mut found = false;
        for a in 0..n {
            for b in a + 1..n {
                let sa: BTreeSet<_> = inst.neighbors(a).iter().collect();
                found |= inst.neighbors(b).iter().filter(|e| sa.contains(e)).count() >= 2;
            }
        }
        prop_assert_eq!(inst.check_kdd_free(2, u64::MAX).unwrap(), !found);
        let f = inst.max_frequency();
        prop_assert!(inst.check_kdd_free(f + 1, u64::MAX).unwrap());
    }

    #[test]
    fn prune_bookkeeping(inst in instance(), pick in 0usize..8) {
        prop_assume!(inst.budget() > 0);
        let u = pick % inst.num_sets();
        let next = inst.prune(u).unwrap();
        prop_assert_eq!(next.budget(), inst.budget() - 1);
        prop_assert_eq!(next.original_budget(), inst.original_budget());
        prop_assert!(!next.is_live_set(u));
        for &j in inst.active_colors() {
            let dj = scan_degree(&inst, u, j);
            if int(dj as i64) >= inst.demand(j) {
                prop_assert!(!next.is_active_color(j));
                prop_assert_eq!(next.elements_of_color(j), 0);
            } else {
                prop_assert_eq!(next.demand(j), inst.demand(j) - int(dj as i64));
            }
        }
        for &e in inst.neighbors(u) {
            prop_assert_eq!(next.color_of(e), None);
        }
    }

    #[test]
    fn linear_independence_matches_elimination((p, cols) in linear_matroid()) {
        let m = MatroidOracle::linear(p, cols.clone()).unwrap();
        let n = cols.len();
        for mask in 0u32..1 << n {
            let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let sub: Vec<Vec<u64>> = s.iter().map(|&i| cols[i].clone()).collect();
            let rank = gauss_rank(p, &sub);
            prop_assert_eq!(m.is_independent(&s).unwrap(), rank == s.len());
            prop_assert_eq!(m.rank_of(&s).unwrap(), rank);
            prop_assert_eq!(m.maximal_independent_subset(&s).members.len(), rank);
        }
    }

    #[test]
    fn bags_partition_live_sets(inst in instance(), e in 1i64..=9) {
        prop_assume!(inst.budget() > 0);
        let bp = bucketing(&inst, Rational::new(e, 10)).unwrap();
        let mut all: Vec<usize> = bp.bags.values().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, inst.live_sets().to_vec());
        prop_assert!(bp.bags.keys().all(|k| k.len() == inst.active_colors().len()));
    }

    #[test]
    fn bag_count_within_analytic_bound(inst in instance(), e in 1i64..=5) {
        prop_assume!(inst.original_budget() >= 2);
        let eps = Rational::new(e, 10);
        let bp = bucketing(&inst, eps).unwrap();
        let bound = fptcov::freqd::analytic_bag_bound(eps, inst.original_budget(), inst.active_colors().len());
        prop_assert!(bp.len() as f64 <= bound);
    }

    #[test]
    fn sampled_set_has_positive_mass(inst in instance(), seed in any::<u64>()) {
        prop_assume!(!inst.live_sets().is_empty());
        let d = inst.max_frequency().max(1);
        let v = inst.live_sets()[seed as usize % inst.live_sets().len()];
        let w = branch_distribution(&inst, v, d).unwrap();
        prop_assert!(w.total() <= Rational::from_integer(1));
        let mut rng = rng_from_seed(seed);
        for _ in 0..20 {
            let u = sample_vertex(&w, &mut rng);
            prop_assert!(w.mass(u) > Rational::default());
        }
    }

    #[test]
    fn single_run_is_a_small_selection(inst in instance(), seed in any::<u64>()) {
        prop_assume!(inst.budget() > 0);
        let s = pccds_once(&inst, Rational::new(1, 3), seed).unwrap();
        prop_assert!(s.len() <= inst.budget());
        let set: BTreeSet<_> = s.iter().collect();
        prop_assert_eq!(set.len(), s.len());
    }

    #[test]
    fn color_split_matches_threshold(inst in instance(), k in 1usize..=3, d in 1usize..=3, e in 1i64..=9) {
        let eps = Rational::new(e, 10);
        let split = split_colors(&inst, eps, k, d);
        for &j in inst.active_colors() {
            let small = inst.demand(j) * eps <= int(2 * (k * k * d) as i64);
            prop_assert_eq!(split.small.contains(&j), small);
            prop_assert_eq!(split.large.contains(&j), !small);
        }
    }

    #[test]
    fn kdd_bags_cover_and_respect_intervals(inst in instance(), seed in any::<u64>(), k in 1usize..=2) {
        let eps = Rational::new(1, 20);
        let d = 1;
        let split = split_colors(&inst, eps, k, d);
        let labels = label_coding(&inst, &split, eps, k, d, seed);
        let bags = kdd_buckets(&inst, &split, &labels, eps, k, d);
        let base = int(2 * (k * d) as i64) / eps;
        let mut seen = BTreeSet::new();
        for bag in &bags {
            let gamma = match &bag.key {
                KddBagKey::Joint { labels, .. } | KddBagKey::Labels(labels) => labels.clone(),
            };
            for &v in &bag.members {
                seen.insert(v);
                let sig: BTreeSet<u32> = inst
                    .neighbors(v)
                    .iter()
                    .filter(|&&e| inst.color_of(e).is_some_and(|j| split.small.contains(&j)))
                    .filter_map(|&e| labels.label(e))
                    .collect();
                prop_assert_eq!(sig.into_iter().collect::<Vec<_>>(), gamma.clone());
                if let KddBagKey::Joint { buckets, .. } = &bag.key {
                    for (pos, &j) in split.large.iter().enumerate() {
                        let dj = int(scan_degree(&inst, v, j) as i64);
                        let a = buckets[pos];
                        let mut hi = base;
                        for _ in 0..a {
                            hi *= Rational::from_integer(1) + eps;
                        }
                        prop_assert!(dj <= hi);
                        if a > 0 {
                            prop_assert!(dj > hi / (Rational::from_integer(1) + eps));
                        }
                    }
                }
            }
        }
        prop_assert_eq!(seen.into_iter().collect::<Vec<_>>(), inst.live_sets().to_vec());
        if split.large.is_empty() {
            prop_assert!(bags.iter().all(|b| matches!(b.key, KddBagKey::Labels(_))));
        }
    }

    #[test]
    fn kdd_answers_are_sound(inst in instance(), seed in any::<u64>()) {
        let eps = Rational::new(1, 2);
        let cfg = KddConfig { seed, ..KddConfig::new(inst.max_frequency() + 1) };
        let rep = kdd_pccds(&inst, eps, &cfg).unwrap();
        if let Some(s) = rep.solution {
            prop_assert!(s.len() <= inst.budget());
            prop_assert!(inst.satisfies(&s, Rational::new(1, 2)));
        }
        let exact = exact_pccds(&inst, DEFAULT_ENUMERATION_LIMIT).unwrap();
        if !inst.satisfies(&exact.best_solution.unwrap(), Rational::new(1, 2)) {
            prop_assert_eq!(kdd_pccds(&inst, eps, &cfg).unwrap().solution, None);
        }
    }

    #[test]
    fn kdd_matroid_outputs_are_independent(inst in instance(), seed in any::<u64>(), dim in 1usize..=3) {
        let mut rng = rng_from_seed(seed);
        let cols = (0..inst.num_sets()).map(|_| (0..dim).map(|_| rand::Rng::gen_range(&mut rng, 0..2)).collect()).collect();
        let m = MatroidOracle::linear(2, cols).unwrap();
        let cfg = KddConfig { seed, ..KddConfig::new(inst.max_frequency() + 1) };
        if let Some(s) = kdd_pccds_matroid(&inst, &m, Rational::new(1, 2), &cfg).unwrap().solution {
            prop_assert!(m.is_independent(&s).unwrap());
        }
    }

    #[test]
    fn hash_families_are_perfect(p in 1usize..=9, q in 1usize..=4, seed in any::<u64>()) {
        let fam = perfect_hash_family(p, q, HashMode::Exhaustive).unwrap();
        prop_assert!(is_perfect_hash_family(p, q, &fam));
        let rnd = perfect_hash_family(p, q, HashMode::RandomVerified { seed, max_functions: 1_000_000 }).unwrap();
        prop_assert!(is_perfect_hash_family(p, q, &rnd));
        prop_assert!(fam.iter().chain(&rnd).all(|f| f.len() == p && f.iter().all(|&x| (x as usize) < q.max(1) || q >= p)));
    }

    #[test]
    fn set_system_round_trip(inst in instance()) {
        prop_assert_eq!(parse_set_system(&write_set_system(&inst)).unwrap(), inst);
    }
}

fn cnf() -> impl Strategy<Value = CnfInstance> {
    (1usize..=8, 1usize..=10, 1usize..=2, 0usize..=3).prop_flat_map(|(n, m, r, k)| {
        let r = r.min(m);
        let clause = (proptest::collection::btree_map(0..n, any::<bool>(), 0..=3), 0..r);
        (Just((n, r, k)), proptest::collection::vec(clause, m - r), proptest::collection::vec(clause_for(n), r), proptest::collection::vec(-4i64..=12, r), 1i64..=3)
    })
    .prop_map(|((n, r, k), rest, first, nums, den)| {
        let mut clauses: Vec<Clause> = first.into_iter().enumerate().map(|(j, lits)| Clause { color: j, literals: lits }).collect();
        clauses.extend(rest.into_iter().map(|(lits, c)| Clause {
            color: c,
            literals: lits.into_iter().map(|(v, s)| Literal { var: v, positive: s }).collect(),
        }));
        let demands = nums.into_iter().map(|x| Rational::new(x, den)).collect();
        let _ = r;
        CnfInstance::new(n, clauses, demands, k).unwrap()
    })
}

fn clause_for(n: usize) -> impl Strategy<Value = Vec<Literal>> {
    proptest::collection::btree_map(0..n, any::<bool>(), 0..=3)
        .prop_map(|m| m.into_iter().map(|(v, s)| Literal { var: v, positive: s }).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cnf_round_trip(phi in cnf()) {
        prop_assert_eq!(parse_colored_cnf(&write_colored_cnf(&phi)).unwrap(), phi);
    }

    #[test]
    fn reduction_postconditions(phi in cnf(), seed in any::<u64>(), e in 1i64..=9) {
        let eps = Rational::new(e, 10);
        let red = reduce_instance(&phi, eps, seed).unwrap();
        let psi = &red.seed_assignment.values;
        prop_assert_eq!(red.seed_assignment.weight, psi.iter().filter(|&&b| b).count());
        // each element is a surviving clause; each set a true variable occurring positively there
        for (s, &v) in red.var_of_set.iter().enumerate() {
            prop_assert!(psi[v]);
            for &el in red.cov.neighbors(s) {
                let c = &phi.clauses()[red.clause_of_elem[el]];
                prop_assert!(c.literals.contains(&Literal::pos(v)));
            }
        }
        let mut negative = vec![0usize; phi.num_colors()];
        for (ci, c) in phi.clauses().iter().enumerate() {
            let neg = c.literals.iter().any(|l| !l.positive && !psi[l.var]);
            prop_assert_eq!(red.clause_of_elem.contains(&ci), !neg);
            if neg {
                negative[c.color] += 1;
            }
        }
        prop_assert_eq!(&red.negative_counts, &negative);
        for j in 0..phi.num_colors() {
            let expect = phi.demands()[j] - Rational::from_integer(negative[j] as i64) / (Rational::from_integer(1) - eps);
            prop_assert_eq!(red.cov.demand(j), expect);
        }
        prop_assert_eq!(red.cov.budget(), phi.budget());
    }

    #[test]
    fn lifting_accounts_for_every_cover(phi in cnf(), seed in any::<u64>(), pick in any::<u64>()) {
        let red = reduce_instance(&phi, Rational::new(1, 2), seed).unwrap();
        let n = red.cov.num_sets();
        let z: Vec<usize> = (0..n).filter(|i| pick >> (i % 64) & 1 == 1).collect();
        let sigma = lift_solution(&red, &z).unwrap();
        prop_assert_eq!(sigma.weight, z.len());
        let sat = phi.satisfied_per_color(&sigma.values);
        let cov = red.cov.coverage_vector(&z).unwrap();
        for j in 0..phi.num_colors() {
            prop_assert!(sat[j] >= cov.get(j) + red.negative_counts[j]);
        }
        let all: Vec<usize> = (0..n).collect();
        let full = lift_solution(&red, &all).unwrap();
        for v in 0..phi.num_vars() {
            prop_assert_eq!(full.values[v], red.var_of_set.contains(&v));
        }
    }
}

#[test]
fn generated_frequency_bound() {
    for seed in 0..200 {
        let p = GenParams { seed, ..GenParams::new(6, 6, 2, 2, 2) };
        assert!(gen_freq_d(&p).unwrap().instance.max_frequency() <= 2);
    }
}

mod thresholds {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Signed};
    use proptest::prelude::*;

    use fptcov::rational::{ceil_log, growing_floor_thresholds, shrinking_ceil_thresholds};
    use fptcov::Rational;

    fn big(x: Rational) -> BigRational {
        BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
    }

    proptest! {
        #[test]
        fn match_reduced_big_rationals(tn in -20i64..=60, td in 1i64..=4, e in 1i64..=40, x in 0i64..=70) {
            let t = Rational::new(tn, td);
            let ratio = Rational::new(1, 1) + Rational::new(e, 40);
            let th = shrinking_ceil_thresholds(t, ratio, 60);
            let mut pw = BigRational::one();
            for (alpha, &c) in th.iter().enumerate() {
                if alpha > 0 {
                    pw *= big(ratio);
                }
                let x_meets = BigRational::from_integer(BigInt::from(x)) * &pw >= big(t);
                prop_assert_eq!(x >= c, x_meets, "alpha {}", alpha);
            }
            let up = growing_floor_thresholds(t.abs() + Rational::new(1, 3), ratio, 70);
            let mut v = big(t.abs() + Rational::new(1, 3));
            for &f in &up {
                prop_assert_eq!(x <= f, BigRational::from_integer(BigInt::from(x)) <= v);
                v *= big(ratio);
            }
            let target = t.abs() + Rational::new(1, 1);
            let l = ceil_log(ratio, target);
            prop_assert!(big(ratio).pow(l as i32) >= big(target));
            prop_assert!(l == 0 || big(ratio).pow(l as i32 - 1) < big(target));
        }
    }
}
