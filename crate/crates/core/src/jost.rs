//! Solutions of the three-term recurrence and their Wronskians.
//!
//! The left Jost solution is `f_l(z, n) = z^n I` to the right of the
//! perturbation and the right one is `f_r(z, n) = z^{-n} I` to its left; both
//! are continued through the window by exact stepping of the recurrence.

use std::ops::{Index, RangeInclusive};

use crate::cmatrix::{CMat, C64};
use crate::error::{Error, Result};
use crate::lattice::{lambda_of_z, CoefficientProfile};

/// `z^n`.
pub fn plane_wave(z: C64, n: i64) -> C64 {
    let n = i32::try_from(n).expect("lattice index fits in i32");
    z.powi(n)
}

/// Two consecutive values `psi(n)` and `psi(n + 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionFrame {
    pub n: i64,
    pub lower: CMat,
    pub upper: CMat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Moves a frame one site using the recurrence at the appropriate site.
///
/// Forward solves the equation at `n + 1` for `psi(n + 2)`; backward solves the
/// equation at `n` for `psi(n - 1)`.
pub fn step_recurrence(
    p: &CoefficientProfile,
    lambda: C64,
    frame: &SolutionFrame,
    direction: Direction,
) -> Result<SolutionFrame> {
    let n = frame.n;
    match direction {
        Direction::Forward => {
            let k = n + 1;
            let rhs = &(&(&p.w(k).scale(lambda) - p.b(k)) * &frame.upper) - &(&p.a(k).adjoint() * &frame.lower);
            let next = p.a(k + 1).solve(&rhs).map_err(|e| at_site(e, k + 1))?;
            Ok(SolutionFrame { n: k, lower: frame.upper.clone(), upper: next })
        }
        Direction::Backward => {
            let rhs = &(&(&p.w(n).scale(lambda) - p.b(n)) * &frame.lower) - &(p.a(n + 1) * &frame.upper);
            let prev = p.a(n).adjoint().solve(&rhs).map_err(|e| at_site(e, n))?;
            Ok(SolutionFrame { n: n - 1, lower: prev, upper: frame.lower.clone() })
        }
    }
}

fn at_site(e: Error, n: i64) -> Error {
    match e {
        Error::SingularMatrix(msg) => Error::SingularMatrix(format!("a({n}): {msg}")),
        other => other,
    }
}

/// Matrix-valued lattice function on a contiguous range of sites.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSequence {
    start: i64,
    values: Vec<CMat>,
}

impl MatrixSequence {
    pub fn new(start: i64, values: Vec<CMat>) -> Self {
        Self { start, values }
    }

    pub fn range(&self) -> RangeInclusive<i64> {
        self.start..=self.start + self.values.len() as i64 - 1
    }

    pub fn get(&self, n: i64) -> Option<&CMat> {
        if n < self.start {
            return None;
        }
        self.values.get((n - self.start) as usize)
    }

    /// Pointwise adjoint, for the left slot of a Wronskian.
    pub fn adjoint(&self) -> Self {
        Self { start: self.start, values: self.values.iter().map(CMat::adjoint).collect() }
    }

    /// Pointwise right multiplication by a constant matrix.
    pub fn mul_right(&self, m: &CMat) -> Self {
        Self { start: self.start, values: self.values.iter().map(|v| v * m).collect() }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &CMat)> {
        self.values.iter().enumerate().map(move |(k, v)| (self.start + k as i64, v))
    }
}

impl Index<i64> for MatrixSequence {
    type Output = CMat;
    fn index(&self, n: i64) -> &CMat {
        self.get(n).unwrap_or_else(|| panic!("site {n} outside {:?}", self.range()))
    }
}

/// Left Jost solution `f_l(z, .)` on `range`.
pub fn jost_left(p: &CoefficientProfile, z: C64, range: RangeInclusive<i64>) -> Result<MatrixSequence> {
    let (lo, hi) = (*range.start(), *range.end());
    let q = p.q();
    let seed = p.n_max() + 1;
    let free = |n: i64| CMat::scalar(q, plane_wave(z, n));
    let mut values: Vec<CMat> = Vec::with_capacity((hi - lo + 1).max(0) as usize);
    if lo < seed {
        let lambda = lambda_of_z(z, &p.tail());
        let mut frame = SolutionFrame { n: seed, lower: free(seed), upper: free(seed + 1) };
        let mut below = Vec::with_capacity((seed - lo) as usize);
        while frame.n > lo {
            frame = step_recurrence(p, lambda, &frame, Direction::Backward)?;
            if frame.n <= hi {
                below.push(frame.lower.clone());
            }
        }
        below.reverse();
        values.extend(below);
    }
    values.extend((lo.max(seed)..=hi).map(free));
    Ok(MatrixSequence::new(lo, values))
}

/// Right Jost solution `f_r(z, .)` on `range`.
pub fn jost_right(p: &CoefficientProfile, z: C64, range: RangeInclusive<i64>) -> Result<MatrixSequence> {
    let (lo, hi) = (*range.start(), *range.end());
    let q = p.q();
    let seed = p.n_min() - 1;
    let free = |n: i64| CMat::scalar(q, plane_wave(z, -n));
    let mut values: Vec<CMat> = (lo..=hi.min(seed)).map(free).collect();
    if hi > seed {
        let lambda = lambda_of_z(z, &p.tail());
        let mut frame = SolutionFrame { n: seed - 1, lower: free(seed - 1), upper: free(seed) };
        while frame.n + 1 < hi {
            frame = step_recurrence(p, lambda, &frame, Direction::Forward)?;
            if frame.n + 1 >= lo {
                values.push(frame.upper.clone());
            }
        }
    }
    Ok(MatrixSequence::new(lo, values))
}

/// `[alpha; beta](n) = alpha(n) a(n+1) beta(n+1) - alpha(n+1) a(n+1)^† beta(n)`.
///
/// `alpha` is passed already adjointed, e.g. `f.adjoint()`.
pub fn wronskian(p: &CoefficientProfile, alpha: &MatrixSequence, beta: &MatrixSequence, n: i64) -> CMat {
    let a = p.a(n + 1);
    &(&(&alpha[n] * a) * &beta[n + 1]) - &(&(&alpha[n + 1] * &a.adjoint()) * &beta[n])
}

/// Jost solutions at `z` and at `1/z` on a common range.
#[derive(Clone, Debug)]
pub struct JostPair {
    pub f_l: MatrixSequence,
    pub f_r: MatrixSequence,
    pub g_l: MatrixSequence,
    pub g_r: MatrixSequence,
}

impl JostPair {
    pub fn compute(p: &CoefficientProfile, z: C64, range: RangeInclusive<i64>) -> Result<Self> {
        let zi = z.inv();
        Ok(Self {
            f_l: jost_left(p, z, range.clone())?,
            f_r: jost_right(p, z, range.clone())?,
            g_l: jost_left(p, zi, range.clone())?,
            g_r: jost_right(p, zi, range)?,
        })
    }
}

/// Sites from two left of the window to two right of it.
pub fn padded_range(p: &CoefficientProfile) -> RangeInclusive<i64> {
    p.n_min() - 2..=p.n_max() + 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Tail;
    use std::collections::BTreeMap;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn residual_of_recurrence(p: &CoefficientProfile, z: C64, f: &MatrixSequence, n: i64) -> f64 {
        let lambda = lambda_of_z(z, &p.tail());
        let lhs = &(&(p.a(n + 1) * &f[n + 1]) + &(p.b(n) * &f[n])) + &(&p.a(n).adjoint() * &f[n - 1]);
        (&lhs - &(&p.w(n).scale(lambda) * &f[n])).max_abs()
    }

    fn sample_profile() -> CoefficientProfile {
        let a1 = CMat::from_rows(&[vec![c(0.9, 0.2), c(0.1, 0.0)], vec![c(-0.3, 0.4), c(1.2, -0.1)]]).unwrap();
        let b0 = CMat::from_rows(&[vec![c(0.5, 0.0), c(0.2, 0.3)], vec![c(0.2, -0.3), c(-1.0, 0.0)]]).unwrap();
        let w1 = CMat::from_rows(&[vec![c(2.0, 0.0), c(0.1, 0.5)], vec![c(0.1, -0.5), c(1.0, 0.0)]]).unwrap();
        CoefficientProfile::from_sites(
            2,
            Tail::new(0.7, 0.3, 1.4),
            &BTreeMap::from([(1, a1)]),
            &BTreeMap::from([(0, b0)]),
            &BTreeMap::from([(1, w1)]),
        )
        .unwrap()
    }

    #[test]
    fn free_left_solution_is_a_plane_wave() {
        let p = CoefficientProfile::free(2, Tail::new(1.0, 0.0, 1.0));
        let z = C64::from_polar(1.0, 0.7);
        let f = jost_left(&p, z, -3..=3).unwrap();
        for (n, v) in f.iter() {
            assert!((v - &CMat::scalar(2, plane_wave(z, n))).max_abs() < 1e-14);
        }
    }

    #[test]
    fn exact_outside_support() {
        let p = sample_profile();
        let z = C64::from_polar(1.0, 1.1);
        let f = jost_left(&p, z, -4..=6).unwrap();
        for n in p.n_max() + 1..=6 {
            assert_eq!(f[n], CMat::scalar(2, plane_wave(z, n)));
        }
        let g = jost_right(&p, z, -4..=6).unwrap();
        for n in -4..p.n_min() {
            assert_eq!(g[n], CMat::scalar(2, plane_wave(z, -n)));
        }
    }

    #[test]
    fn jost_solutions_satisfy_the_recurrence() {
        let p = sample_profile();
        let z = C64::from_polar(1.0, 2.3);
        let fl = jost_left(&p, z, -4..=6).unwrap();
        let fr = jost_right(&p, z, -4..=6).unwrap();
        for n in -3..=5 {
            assert!(residual_of_recurrence(&p, z, &fl, n) < 1e-12);
            assert!(residual_of_recurrence(&p, z, &fr, n) < 1e-12);
        }
    }

    #[test]
    fn stepping_forward_then_back_is_identity() {
        let p = sample_profile();
        let lambda = lambda_of_z(C64::from_polar(1.0, 0.4), &p.tail());
        let f0 = SolutionFrame { n: -1, lower: CMat::identity(2), upper: CMat::scalar(2, c(0.0, 1.0)) };
        let f1 = step_recurrence(&p, lambda, &f0, Direction::Forward).unwrap();
        let back = step_recurrence(&p, lambda, &f1, Direction::Backward).unwrap();
        assert_eq!(back.n, -1);
        assert!((&back.lower - &f0.lower).max_abs() < 1e-13);
        assert!((&back.upper - &f0.upper).max_abs() < 1e-13);
    }

    #[test]
    fn singular_coupling_is_reported_with_site() {
        let a0 = CMat::real(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let p = CoefficientProfile::from_sites(
            2,
            Tail::new(1.0, 0.0, 1.0),
            &BTreeMap::from([(0, a0)]),
            &BTreeMap::new(),
            &BTreeMap::new(),
        )
        .unwrap();
        let err = jost_right(&p, c(0.0, 1.0), -2..=2).unwrap_err();
        assert!(matches!(err, Error::SingularMatrix(ref m) if m.contains("a(0)")));
    }

    #[test]
    fn free_wronskian_of_conjugate_left_and_right() {
        // [f_l(z*)^†; f_r(z)] = -(z - 1/z) a_inf I when nothing scatters.
        let a_inf = -0.8;
        let p = CoefficientProfile::free(1, Tail::new(a_inf, 0.0, 1.0));
        let z = C64::from_polar(1.0, 0.9);
        let fl = jost_left(&p, z.conj(), -2..=3).unwrap().adjoint();
        let fr = jost_right(&p, z, -2..=3).unwrap();
        let expect = -(z - z.inv()) * a_inf;
        for n in -2..=2 {
            assert!((wronskian(&p, &fl, &fr, n)[(0, 0)] - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn wronskian_is_site_independent() {
        let p = sample_profile();
        let z = C64::from_polar(1.0, 1.9);
        let range = padded_range(&p);
        let fl_star = jost_left(&p, z.conj(), range.clone()).unwrap().adjoint();
        let fr = jost_right(&p, z, range.clone()).unwrap();
        let w0 = wronskian(&p, &fl_star, &fr, *range.start());
        for n in *range.start()..*range.end() {
            assert!((&wronskian(&p, &fl_star, &fr, n) - &w0).max_abs() < 1e-12);
        }
    }
}
