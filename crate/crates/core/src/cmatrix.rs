//! Dense complex matrices sized for small block systems.
//!
//! Everything here works on `q x q` or `2q x 2q` matrices with `q` in the
//! single digits, so the kernels favour clarity over blocking or SIMD.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Pivots smaller than this fraction of the largest entry in their original
/// column are treated as zero.
pub const PIVOT_RELATIVE_FLOOR: f64 = 1e-13;
/// Entrywise asymmetry allowed in a Hermitian matrix, relative to its size.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Positive definiteness requires `min eig > POSITIVE_FLOOR * max eig`.
pub const POSITIVE_FLOOR: f64 = 1e-12;
const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, C64::new(1.0, 0.0))
    }

    /// `s * I` of size `n`.
    pub fn scalar(n: usize, s: C64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = s;
        }
        m
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self { rows: rows.len(), cols, data: rows.concat() })
    }

    /// Real matrix from nested rows; panics on ragged input.
    pub fn real(rows: &[&[f64]]) -> Self {
        let r: Vec<Vec<C64>> = rows.iter().map(|row| row.iter().map(|&x| C64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&r).expect("ragged rows")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    /// Checked product.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    /// Checked sum.
    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.same_shape(rhs, "add")?;
        Ok(self.zip(rhs, |a, b| a + b))
    }

    /// Checked difference.
    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.same_shape(rhs, "subtract")?;
        Ok(self.zip(rhs, |a, b| a - b))
    }

    fn same_shape(&self, rhs: &Self, op: &str) -> Result<()> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Dimension(format!(
                "cannot {op} {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(())
    }

    fn zip(&self, rhs: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// Assembles `[[a, b], [c, d]]` from four blocks.
    pub fn block2(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        if a.rows != b.rows || c.rows != d.rows || a.cols != c.cols || b.cols != d.cols {
            return Err(Error::Dimension("incompatible blocks".into()));
        }
        let (r0, c0) = (a.rows, a.cols);
        Ok(Self::from_fn(r0 + c.rows, c0 + b.cols, |i, j| match (i < r0, j < c0) {
            (true, true) => a[(i, j)],
            (true, false) => b[(i, j - c0)],
            (false, true) => c[(i - r0, j)],
            (false, false) => d[(i - r0, j - c0)],
        }))
    }

    /// Block `(bi, bj)` of size `q x q`.
    pub fn block(&self, bi: usize, bj: usize, q: usize) -> Self {
        Self::from_fn(q, q, |i, j| self[(bi * q + i, bj * q + j)])
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> Result<Lu> {
        Lu::new(self)
    }

    /// Inverse and determinant from one LU factorization.
    pub fn inverse_det(&self) -> Result<(Self, C64)> {
        let lu = self.lu()?;
        Ok((lu.inverse(), lu.det()))
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(self.lu()?.inverse())
    }

    /// Determinant; zero when the matrix is numerically singular.
    pub fn det(&self) -> Result<C64> {
        match self.lu() {
            Ok(lu) => Ok(lu.det()),
            Err(Error::SingularMatrix(_)) => Ok(C64::new(0.0, 0.0)),
            Err(e) => Err(e),
        }
    }

    /// Solves `self * X = rhs`.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        self.lu()?.solve(rhs)
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols.min(self.rows) {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && self.hermitian_asymmetry() <= HERMITIAN_TOL * self.max_abs().max(1.0)
    }

    /// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, Self)> {
        if !self.is_square() {
            return Err(Error::Dimension("eigendecomposition needs a square matrix".into()));
        }
        if !self.is_hermitian() {
            return Err(Error::NotHermitian { asymmetry: self.hermitian_asymmetry() });
        }
        Ok(jacobi_eigen(self))
    }

    /// The unique positive definite square root of a positive definite matrix.
    pub fn hermitian_sqrt(&self) -> Result<Self> {
        self.spectral_map(f64::sqrt)
    }

    /// `self^{-1/2}` for a positive definite matrix.
    pub fn inverse_sqrt(&self) -> Result<Self> {
        self.spectral_map(|x| 1.0 / x.sqrt())
    }

    fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let (vals, vecs) = self.hermitian_eigen()?;
        check_positive(&vals)?;
        let n = self.rows;
        let mapped: Vec<f64> = vals.iter().map(|&v| f(v)).collect();
        Ok(Self::from_fn(n, n, |i, j| (0..n).map(|k| vecs[(i, k)] * mapped[k] * vecs[(j, k)].conj()).sum()))
    }

    /// Whether a Hermitian matrix is positive definite.
    pub fn is_positive_definite(&self) -> bool {
        self.hermitian_eigen().map(|(v, _)| check_positive(&v).is_ok()).unwrap_or(false)
    }

    /// Spectral norm, the largest singular value.
    pub fn op_norm(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        let gram = &self.adjoint() * self;
        let (vals, _) = jacobi_eigen(&gram.hermitian_part());
        vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
    }

    /// Spectral condition number; infinite when singular.
    pub fn cond(&self) -> f64 {
        match self.inverse() {
            Ok(inv) => self.op_norm() * inv.op_norm(),
            Err(_) => f64::INFINITY,
        }
    }

    /// `(A + A^†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }
}

fn check_positive(vals: &[f64]) -> Result<()> {
    let min = vals.first().copied().unwrap_or(1.0);
    let max = vals.last().copied().unwrap_or(1.0);
    if max <= 0.0 || min <= POSITIVE_FLOOR * max {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    Ok(())
}

/// Cyclic complex Jacobi rotations on a Hermitian matrix.
fn jacobi_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.rows;
    let mut a = m.clone();
    let mut v = CMat::identity(n);
    let scale = a.frobenius_norm();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let vals = order.iter().map(|&k| a[(k, k)].re).collect();
    let vecs = CMat::from_fn(n, n, |i, j| v[(i, order[j])]);
    (vals, vecs)
}

/// One rotation zeroing `a[p][q]`; `a <- U^† a U`, `v <- v U`.
fn rotate(a: &mut CMat, v: &mut CMat, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
    let t = if tau >= 0.0 { 1.0 } else { -1.0 } / (tau.abs() + (1.0 + tau * tau).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let ph = phase.conj();
    let u = [[C64::new(c, 0.0), C64::new(s, 0.0)], [ph * (-s), ph * c]];
    let n = a.rows;
    for k in 0..n {
        let (xp, xq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = xp * u[0][0] + xq * u[1][0];
        a[(k, q)] = xp * u[0][1] + xq * u[1][1];
        let (yp, yq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = yp * u[0][0] + yq * u[1][0];
        v[(k, q)] = yp * u[0][1] + yq * u[1][1];
    }
    for k in 0..n {
        let (xp, xq) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = u[0][0].conj() * xp + u[1][0].conj() * xq;
        a[(q, k)] = u[0][1].conj() * xp + u[1][1].conj() * xq;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Packed LU factors `P A = L U` with unit lower triangle.
#[derive(Clone, Debug)]
pub struct Lu {
    factors: CMat,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn new(m: &CMat) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!("LU of a {}x{} matrix", m.rows, m.cols)));
        }
        let n = m.rows;
        let col_max: Vec<f64> = (0..n).map(|j| (0..n).map(|i| m[(i, j)].norm()).fold(0.0, f64::max)).collect();
        let mut f = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (piv, mag) =
                (k..n)
                    .map(|i| (i, f[(i, k)].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if mag == 0.0 || mag < PIVOT_RELATIVE_FLOOR * col_max[k] || !mag.is_finite() {
                return Err(Error::SingularMatrix(format!("pivot {mag:.3e} in column {k}")));
            }
            if piv != k {
                for j in 0..n {
                    f.data.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
                sign = -sign;
            }
            let d = f[(k, k)];
            for i in k + 1..n {
                let l = f[(i, k)] / d;
                f[(i, k)] = l;
                for j in k + 1..n {
                    let u = f[(k, j)];
                    f[(i, j)] -= l * u;
                }
            }
        }
        Ok(Self { factors: f, perm, sign })
    }

    pub fn det(&self) -> C64 {
        let n = self.factors.rows;
        (0..n).map(|i| self.factors[(i, i)]).product::<C64>() * self.sign
    }

    pub fn solve(&self, rhs: &CMat) -> Result<CMat> {
        let n = self.factors.rows;
        if rhs.rows != n {
            return Err(Error::Dimension(format!("solve with {n}x{n} and {} rows", rhs.rows)));
        }
        let f = &self.factors;
        let mut x = CMat::from_fn(n, rhs.cols, |i, j| rhs[(self.perm[i], j)]);
        for j in 0..rhs.cols {
            for i in 0..n {
                let mut s = x[(i, j)];
                for k in 0..i {
                    s -= f[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, j)];
                for k in i + 1..n {
                    s -= f[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s / f[(i, i)];
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> CMat {
        let n = self.factors.rows;
        self.solve(&CMat::identity(n)).expect("square identity")
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        &mut self.data[i * self.cols + j]
    }
}

// Operator forms panic on shape mismatch; use the `try_*` methods for
// shapes that come from user input.
impl Mul for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        self.try_mul(rhs).expect("matrix product shape")
    }
}

impl Mul<C64> for &CMat {
    type Output = CMat;
    fn mul(self, rhs: C64) -> CMat {
        self.scale(rhs)
    }
}

impl Add for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        self.try_add(rhs).expect("matrix sum shape")
    }
}

impl Sub for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        self.try_sub(rhs).expect("matrix difference shape")
    }
}

impl Neg for &CMat {
    type Output = CMat;
    fn neg(self) -> CMat {
        self.scale_re(-1.0)
    }
}

impl AddAssign<&CMat> for CMat {
    fn add_assign(&mut self, rhs: &CMat) {
        *self = &*self + rhs;
    }
}

/// `‖x - y‖ / max(1, ‖y‖)` in the spectral norm.
pub fn mixed_residual(x: &CMat, y: &CMat) -> f64 {
    (x - y).op_norm() / y.op_norm().max(1.0)
}

/// `‖x - y‖ / ‖y‖`, falling back to the absolute error when `y = 0`.
pub fn relative_residual(x: &CMat, y: &CMat) -> f64 {
    let d = (x - y).op_norm();
    let s = y.op_norm();
    if s == 0.0 {
        d
    } else {
        d / s
    }
}
