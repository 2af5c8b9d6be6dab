//! Seeded random profiles and partitions for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cmatrix::{CMat, C64};
use crate::factorize::Partition;
use crate::lattice::{CoefficientProfile, Tail};

/// Couplings with a worse condition number are redrawn.
const MAX_COUPLING_COND: f64 = 1e3;

// Perturbation sizes relative to the tail. Stronger perturbations make some
// windows nearly opaque, and the transition matrices then grow like the
// inverse transmission, which costs its square in relative accuracy.
const COUPLING_SPREAD: f64 = 0.3;
const POTENTIAL_SPREAD: f64 = 0.6;
const WEIGHT_SPREAD: f64 = 0.8;
const WEIGHT_FLOOR: f64 = 0.75;

/// Deterministic generator for a seed, identical on every platform.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit_complex(rng: &mut impl Rng, r: f64) -> C64 {
    C64::new(rng.gen_range(-r..=r), rng.gen_range(-r..=r))
}

fn random_matrix(rng: &mut impl Rng, q: usize, r: f64) -> CMat {
    CMat::from_fn(q, q, |_, _| unit_complex(rng, r))
}

/// Random tail with `|a_inf|, w_inf` in `[0.5, 2]` and `b_inf` in `[-1, 1]`.
pub fn random_tail(rng: &mut impl Rng) -> Tail {
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    Tail::new(sign * rng.gen_range(0.5..=2.0), rng.gen_range(-1.0..=1.0), rng.gen_range(0.5..=2.0))
}

/// Random admissible profile of order `q` whose window has `len` sites.
///
/// Perturbations scale with `|a_inf|`, so every entry stays bounded by 5 in
/// modulus. Weights are `w_inf (X X^† / 2q + 0.75 I)`, positive definite by
/// construction.
pub fn random_profile(rng: &mut impl Rng, q: usize, len: usize) -> CoefficientProfile {
    let tail = random_tail(rng);
    let n_min: i64 = rng.gen_range(-3..=3);
    let n_max = n_min + len as i64 - 1;
    let hop = tail.a_inf.abs();
    let a: Vec<CMat> = (0..=len)
        .map(|_| loop {
            let m = &CMat::scalar(q, C64::new(tail.a_inf, 0.0)) + &random_matrix(rng, q, COUPLING_SPREAD * hop);
            if m.cond() < MAX_COUPLING_COND {
                break m;
            }
        })
        .collect();
    let b: Vec<CMat> = (0..len)
        .map(|_| {
            let h = random_matrix(rng, q, POTENTIAL_SPREAD * hop).hermitian_part();
            &CMat::scalar(q, C64::new(tail.b_inf, 0.0)) + &h
        })
        .collect();
    let w: Vec<CMat> = (0..len)
        .map(|_| {
            let x = random_matrix(rng, q, WEIGHT_SPREAD);
            let g = (&x * &x.adjoint()).scale_re(1.0 / (2.0 * q as f64)).hermitian_part();
            (&g + &CMat::scalar(q, C64::new(WEIGHT_FLOOR, 0.0))).scale_re(tail.w_inf)
        })
        .collect();
    CoefficientProfile::new(q, tail, n_min, n_max, a, b, w).expect("consistent shapes")
}

/// Between 1 and `max_cuts` distinct sorted cuts in `[n_min - 1, n_max + 1]`.
pub fn random_partition(rng: &mut impl Rng, p: &CoefficientProfile, max_cuts: usize) -> Partition {
    let lo = p.n_min() - 1;
    let hi = p.n_max() + 1;
    let span = (hi - lo + 1) as usize;
    let count = rng.gen_range(1..=max_cuts.min(span).max(1));
    let mut cuts = rand::seq::index::sample(rng, span, count).into_iter().map(|k| lo + k as i64).collect::<Vec<_>>();
    cuts.sort_unstable();
    Partition::new(cuts).expect("distinct sorted cuts")
}

/// One draw of the standard ensemble: `q` in `{1, 2, 3}`, window of 1 to 6
/// sites, 1 to 3 cuts.
pub fn draw(rng: &mut impl Rng) -> (CoefficientProfile, Partition) {
    let q = rng.gen_range(1..=3);
    let len = rng.gen_range(1..=6);
    let p = random_profile(rng, q, len);
    let part = random_partition(rng, &p, 3);
    (p, part)
}
