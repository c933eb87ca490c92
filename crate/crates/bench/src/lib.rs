//! Fixed seeded instances shared by the benchmarks in `benches/`.

use fptcov::generate::{gen_cnf, gen_freq_d, gen_kdd_free, GenParams};
use fptcov::{CnfInstance, CoverageInstance};

pub fn freq_d(n: usize, m: usize, k: usize, seed: u64) -> CoverageInstance {
    gen_freq_d(&GenParams { seed, ..GenParams::new(n, m, 2, 2, k) }).expect("valid parameters").instance
}

pub fn kdd_free(n: usize, m: usize, k: usize, seed: u64) -> CoverageInstance {
    gen_kdd_free(&GenParams { seed, ..GenParams::new(n, m, 2, 2, k) }).expect("valid parameters").instance
}

pub fn cnf(n: usize, m: usize, k: usize, seed: u64) -> CnfInstance {
    gen_cnf(&GenParams { seed, ..GenParams::new(n, m, 3, 2, k) }).expect("valid parameters").instance
}
