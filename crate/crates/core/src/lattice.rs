//! Coefficient profiles, spectral points and class checks.
//!
//! A profile stores `b(n)` and `w(n)` on the window `[n_min, n_max]` and
//! `a(n)` on `[n_min, n_max + 1]`; every accessor returns the tail value
//! (a scalar multiple of the identity) outside those ranges. An empty window
//! (`n_max = n_min - 1`) still stores the single coupling `a(n_min)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use crate::cmatrix::{CMat, C64};
use crate::error::{Error, Result};

/// Default half-width of the excluded neighbourhoods of `z = 1` and `z = -1`.
pub const DEFAULT_EXCLUSION_EPS: f64 = 1e-6;
/// How far a spectral point may sit off the unit circle.
pub const UNIT_CIRCLE_TOL: f64 = 1e-12;

/// Asymptotic values: `a -> a_inf I`, `b -> b_inf I`, `w -> w_inf I`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tail {
    pub a_inf: f64,
    pub b_inf: f64,
    pub w_inf: f64,
}

impl Tail {
    pub fn new(a_inf: f64, b_inf: f64, w_inf: f64) -> Self {
        Self { a_inf, b_inf, w_inf }
    }

    /// Tail of the discrete Schrödinger operator: `a = -1, b = 2, w = 1`.
    pub fn schrodinger() -> Self {
        Self::new(-1.0, 2.0, 1.0)
    }

    pub fn regime(&self) -> Option<Regime> {
        if !(self.a_inf.is_finite() && self.b_inf.is_finite() && self.w_inf > 0.0) {
            return None;
        }
        if self.a_inf > 0.0 {
            Some(Regime::JacobiLike)
        } else if self.a_inf < 0.0 {
            Some(Regime::SchrodingerLike)
        } else {
            None
        }
    }

    pub(crate) fn check_usable(&self) -> Result<()> {
        if self.regime().is_none() {
            return Err(Error::InvalidProfile(format!(
                "tail needs a_inf real and nonzero, b_inf real, w_inf > 0; got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Sign of `a_inf`, which fixes where the continuous spectrum sits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    JacobiLike,
    SchrodingerLike,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::JacobiLike => "Jacobi-like",
            Regime::SchrodingerLike => "Schrödinger-like",
        })
    }
}

/// Coefficients of `a(n+1) psi(n+1) + b(n) psi(n) + a(n)^† psi(n-1) = lambda w(n) psi(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientProfile {
    q: usize,
    tail: Tail,
    n_min: i64,
    n_max: i64,
    a: Vec<CMat>,
    b: Vec<CMat>,
    w: Vec<CMat>,
    a_tail: CMat,
    b_tail: CMat,
    w_tail: CMat,
}

impl CoefficientProfile {
    /// `a` covers `[n_min, n_max + 1]`, `b` and `w` cover `[n_min, n_max]`.
    pub fn new(q: usize, tail: Tail, n_min: i64, n_max: i64, a: Vec<CMat>, b: Vec<CMat>, w: Vec<CMat>) -> Result<Self> {
        if q == 0 {
            return Err(Error::Dimension("matrix order q must be positive".into()));
        }
        if n_max < n_min - 1 {
            return Err(Error::InvalidProfile(format!("window [{n_min}, {n_max}] is reversed")));
        }
        let len = (n_max - n_min + 1) as usize;
        if a.len() != len + 1 || b.len() != len || w.len() != len {
            return Err(Error::Dimension(format!(
                "window of {len} sites needs {} a, {len} b, {len} w; got {}, {}, {}",
                len + 1,
                a.len(),
                b.len(),
                w.len()
            )));
        }
        for m in a.iter().chain(&b).chain(&w) {
            if m.rows() != q || m.cols() != q {
                return Err(Error::Dimension(format!("coefficient is {}x{}, expected {q}x{q}", m.rows(), m.cols())));
            }
        }
        let s = |x: f64| CMat::scalar(q, C64::new(x, 0.0));
        Ok(Self { q, tail, n_min, n_max, a, b, w, a_tail: s(tail.a_inf), b_tail: s(tail.b_inf), w_tail: s(tail.w_inf) })
    }

    /// The unperturbed profile, with an empty window at the origin.
    pub fn free(q: usize, tail: Tail) -> Self {
        let a = vec![CMat::scalar(q, C64::new(tail.a_inf, 0.0))];
        Self::new(q, tail, 0, -1, a, vec![], vec![]).expect("free profile is well formed")
    }

    /// Builds the smallest window holding the given sites; missing sites take
    /// tail values.
    pub fn from_sites(
        q: usize,
        tail: Tail,
        a: &BTreeMap<i64, CMat>,
        b: &BTreeMap<i64, CMat>,
        w: &BTreeMap<i64, CMat>,
    ) -> Result<Self> {
        let lo = [a.keys().next(), b.keys().next(), w.keys().next()].into_iter().flatten().min();
        let Some(&n_min) = lo else {
            return Ok(Self::free(q, tail));
        };
        let hi_bw = [b.keys().next_back(), w.keys().next_back()].into_iter().flatten().max();
        let hi_a = a.keys().next_back().map(|&k| k - 1);
        let n_max = [hi_bw.copied(), hi_a].into_iter().flatten().max().unwrap_or(n_min - 1);
        Self::with_window(q, tail, n_min, n_max, a, b, w)
    }

    /// Fills an explicit window from sparse site maps.
    pub fn with_window(
        q: usize,
        tail: Tail,
        n_min: i64,
        n_max: i64,
        a: &BTreeMap<i64, CMat>,
        b: &BTreeMap<i64, CMat>,
        w: &BTreeMap<i64, CMat>,
    ) -> Result<Self> {
        if n_max < n_min - 1 {
            return Err(Error::InvalidProfile(format!("window [{n_min}, {n_max}] is reversed")));
        }
        let outside = |map: &BTreeMap<i64, CMat>, hi: i64| map.keys().find(|&&k| k < n_min || k > hi).copied();
        if let Some(k) = outside(a, n_max + 1) {
            return Err(Error::InvalidProfile(format!("a({k}) lies outside [{n_min}, {}]", n_max + 1)));
        }
        for (name, map) in [("b", b), ("w", w)] {
            if let Some(k) = outside(map, n_max) {
                return Err(Error::InvalidProfile(format!("{name}({k}) lies outside [{n_min}, {n_max}]")));
            }
        }
        let s = |x: f64| CMat::scalar(q, C64::new(x, 0.0));
        let fill = |map: &BTreeMap<i64, CMat>, hi: i64, dflt: f64| -> Vec<CMat> {
            (n_min..=hi).map(|n| map.get(&n).cloned().unwrap_or_else(|| s(dflt))).collect()
        };
        Self::new(
            q,
            tail,
            n_min,
            n_max,
            fill(a, n_max + 1, tail.a_inf),
            fill(b, n_max, tail.b_inf),
            fill(w, n_max, tail.w_inf),
        )
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_max
    }

    pub fn a(&self, n: i64) -> &CMat {
        if n >= self.n_min && n <= self.n_max + 1 {
            &self.a[(n - self.n_min) as usize]
        } else {
            &self.a_tail
        }
    }

    pub fn b(&self, n: i64) -> &CMat {
        if n >= self.n_min && n <= self.n_max {
            &self.b[(n - self.n_min) as usize]
        } else {
            &self.b_tail
        }
    }

    pub fn w(&self, n: i64) -> &CMat {
        if n >= self.n_min && n <= self.n_max {
            &self.w[(n - self.n_min) as usize]
        } else {
            &self.w_tail
        }
    }

    pub fn a_tail(&self) -> &CMat {
        &self.a_tail
    }

    pub fn b_tail(&self) -> &CMat {
        &self.b_tail
    }

    pub fn w_tail(&self) -> &CMat {
        &self.w_tail
    }

    /// Smallest `[lo, hi]` such that every coefficient outside equals its tail
    /// value, reported in the same convention as the stored window (`a` may
    /// deviate at `hi + 1`). `None` for a free profile.
    pub fn support(&self) -> Option<(i64, i64)> {
        let bw = (self.n_min..=self.n_max).filter(|&n| self.b(n) != &self.b_tail || self.w(n) != &self.w_tail);
        let aa = (self.n_min..=self.n_max + 1).filter(|&n| self.a(n) != &self.a_tail);
        let lo = bw.clone().next().into_iter().chain(aa.clone().next()).min()?;
        let hi_bw = bw.clone().next_back();
        let hi_a = aa.clone().next_back().map(|k| k - 1);
        let hi = hi_bw.into_iter().chain(hi_a).max().unwrap_or(lo - 1);
        Some((lo, hi))
    }

    /// Whether every `det a(n)` is real, within `tol` relative to its modulus.
    pub fn det_a_all_real(&self, tol: f64) -> bool {
        (self.n_min..=self.n_max + 1).all(|n| match self.a(n).det() {
            Ok(d) => d.im.abs() <= tol * d.norm().max(1.0),
            Err(_) => false,
        })
    }

    /// The same coefficients on a window enlarged to `[lo, hi]`.
    pub fn widened(&self, lo: i64, hi: i64) -> Result<Self> {
        let lo = lo.min(self.n_min);
        let hi = hi.max(self.n_max);
        Self::new(
            self.q,
            self.tail,
            lo,
            hi,
            (lo..=hi + 1).map(|n| self.a(n).clone()).collect(),
            (lo..=hi).map(|n| self.b(n).clone()).collect(),
            (lo..=hi).map(|n| self.w(n).clone()).collect(),
        )
    }
}

/// A point `z` on the unit circle away from `z = 1` and `z = -1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralPoint {
    z: C64,
}

impl SpectralPoint {
    pub fn new(z: C64, exclusion_eps: f64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) || (z.norm() - 1.0).abs() > UNIT_CIRCLE_TOL {
            return Err(Error::Domain(format!("|z| = {} is not 1", z.norm())));
        }
        for edge in [1.0, -1.0] {
            if (z - edge).norm() <= exclusion_eps {
                return Err(Error::Domain(format!("z = {z} is within {exclusion_eps:e} of {edge}")));
            }
        }
        Ok(Self { z })
    }

    pub fn from_angle(theta: f64, exclusion_eps: f64) -> Result<Self> {
        Self::new(C64::from_polar(1.0, theta), exclusion_eps)
    }

    pub fn z(&self) -> C64 {
        self.z
    }

    /// `z^*`, which equals `1/z` on the circle.
    pub fn conj(&self) -> Self {
        Self { z: self.z.conj() }
    }

    /// Spectral parameter `(a_inf (z + 1/z) + b_inf) / w_inf`.
    pub fn lambda(&self, tail: &Tail) -> C64 {
        lambda_of_z(self.z, tail)
    }

    /// `z - 1/z`.
    pub fn gap(&self) -> C64 {
        self.z - self.z.inv()
    }
}

impl fmt::Display for SpectralPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.z)
    }
}

pub fn lambda_of_z(z: C64, tail: &Tail) -> C64 {
    (tail.a_inf * (z + z.inv()) + tail.b_inf) / tail.w_inf
}

/// `n` equispaced angles `2 pi (k + 1/4) / n`, none of which is `0` or `pi`,
/// minus those within `exclusion_eps` of `z = 1` or `z = -1`.
pub fn make_spectral_grid(n: usize, exclusion_eps: f64) -> Result<Vec<SpectralPoint>> {
    let grid: Vec<_> = (0..n)
        .filter_map(|k| {
            let theta = 2.0 * PI * (k as f64 + 0.25) / n as f64;
            SpectralPoint::from_angle(theta, exclusion_eps).ok()
        })
        .collect();
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(grid)
}

/// Which part of the class definition a check covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassItem {
    /// `b(n)` and `w(n)` Hermitian.
    Hermitian,
    /// `a(n)` invertible and `w(n)` positive definite.
    InvertiblePositive,
    /// `a_inf` real nonzero, `b_inf` real, `w_inf > 0`.
    Tail,
    /// Weighted first moments of the perturbations are finite.
    Summable,
}

impl ClassItem {
    pub fn label(&self) -> &'static str {
        match self {
            ClassItem::Hermitian => "(a) b(n), w(n) hermitian",
            ClassItem::InvertiblePositive => "(b) a(n) invertible, w(n) positive definite",
            ClassItem::Tail => "(c) tail a_inf real nonzero, b_inf real, w_inf > 0",
            ClassItem::Summable => "(d) perturbations summable with first moment",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationItem {
    pub item: ClassItem,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub items: Vec<ValidationItem>,
    pub regime: Option<Regime>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationItem> {
        self.items.iter().filter(|i| !i.passed)
    }
}

/// Checks every condition of the admissible class and classifies the tail.
pub fn validate_class_a(p: &CoefficientProfile) -> ValidationReport {
    let mut items = Vec::with_capacity(4);

    let herm_bad: Vec<String> = (p.n_min..=p.n_max)
        .flat_map(|n| {
            let mut bad = vec![];
            if !p.b(n).is_hermitian() {
                bad.push(format!("b({n})"));
            }
            if !p.w(n).is_hermitian() {
                bad.push(format!("w({n})"));
            }
            bad
        })
        .collect();
    items.push(ValidationItem {
        item: ClassItem::Hermitian,
        passed: herm_bad.is_empty(),
        detail: if herm_bad.is_empty() {
            "all hermitian".into()
        } else {
            format!("not hermitian: {}", herm_bad.join(", "))
        },
    });

    let mut ip_bad = vec![];
    for n in p.n_min..=p.n_max + 1 {
        if p.a(n).inverse().is_err() {
            ip_bad.push(format!("a({n}) singular"));
        }
    }
    for n in p.n_min..=p.n_max {
        if !p.w(n).is_positive_definite() {
            ip_bad.push(format!("w({n}) not positive definite"));
        }
    }
    items.push(ValidationItem {
        item: ClassItem::InvertiblePositive,
        passed: ip_bad.is_empty(),
        detail: if ip_bad.is_empty() { "ok".into() } else { ip_bad.join(", ") },
    });

    let t = p.tail;
    let regime = t.regime();
    items.push(ValidationItem {
        item: ClassItem::Tail,
        passed: regime.is_some(),
        detail: format!("a_inf = {}, b_inf = {}, w_inf = {}", t.a_inf, t.b_inf, t.w_inf),
    });

    let summable = if regime.is_some() && ip_bad.is_empty() && herm_bad.is_empty() {
        match perturbations(p) {
            Ok((pp, qq)) => {
                let moment: f64 = pp.iter().chain(&qq).map(|(&n, m)| (1.0 + n.abs() as f64) * m.op_norm()).sum();
                ValidationItem {
                    item: ClassItem::Summable,
                    passed: moment.is_finite(),
                    detail: format!("finite support, first moment {moment:.6e}"),
                }
            }
            Err(e) => ValidationItem { item: ClassItem::Summable, passed: false, detail: e.to_string() },
        }
    } else {
        ValidationItem {
            item: ClassItem::Summable,
            passed: false,
            detail: "not evaluated: earlier conditions fail".into(),
        }
    };
    items.push(summable);

    ValidationReport { items, regime }
}

/// Perturbations `P(n)` and `Q(n)` of the normalized operator from the free
/// one, on the sites where they can be nonzero. Both vanish elsewhere.
pub fn perturbations(p: &CoefficientProfile) -> Result<(BTreeMap<i64, CMat>, BTreeMap<i64, CMat>)> {
    let r = reduce(p)?;
    let id = CMat::identity(p.q);
    let pp = r.sites().map(|n| (n, r.a_tilde(n) - &id)).collect();
    let qq = r.sites().map(|n| (n, r.b_tilde(n).clone())).collect();
    Ok((pp, qq))
}

/// Profile brought to unit weight and tail `(1, 0, 1)`, stored on
/// `[n_min, n_max + 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedProfile {
    q: usize,
    n_min: i64,
    a_tilde: Vec<CMat>,
    b_tilde: Vec<CMat>,
    identity: CMat,
    zero: CMat,
}

impl ReducedProfile {
    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    /// Last site where the reduced coefficients may differ from `(I, 0)`.
    pub fn n_max(&self) -> i64 {
        self.n_min + self.a_tilde.len() as i64 - 1
    }

    pub fn sites(&self) -> std::ops::RangeInclusive<i64> {
        self.n_min..=self.n_max()
    }

    pub fn a_tilde(&self, n: i64) -> &CMat {
        if self.sites().contains(&n) {
            &self.a_tilde[(n - self.n_min) as usize]
        } else {
            &self.identity
        }
    }

    pub fn b_tilde(&self, n: i64) -> &CMat {
        if self.sites().contains(&n) {
            &self.b_tilde[(n - self.n_min) as usize]
        } else {
            &self.zero
        }
    }

    /// The reduced operator as a profile in its own right.
    pub fn to_profile(&self) -> Result<CoefficientProfile> {
        let lo = self.n_min;
        let hi = self.n_max();
        CoefficientProfile::new(
            self.q,
            Tail::new(1.0, 0.0, 1.0),
            lo,
            hi,
            (lo..=hi + 1).map(|n| self.a_tilde(n).clone()).collect(),
            self.b_tilde.clone(),
            vec![self.identity.clone(); self.b_tilde.len()],
        )
    }
}

/// Removes the weight and normalizes the tail:
/// `a~(n) = (w_inf/a_inf) w(n-1)^{-1/2} a(n) w(n)^{-1/2}` and
/// `b~(n) = (w_inf/a_inf) w(n)^{-1/2} b(n) w(n)^{-1/2} - (b_inf/a_inf) I`.
pub fn reduce(p: &CoefficientProfile) -> Result<ReducedProfile> {
    p.tail.check_usable()?;
    let Tail { a_inf, b_inf, w_inf } = p.tail;
    let lo = p.n_min;
    let hi = p.n_max + 1;
    let isqrt: BTreeMap<i64, CMat> = (lo - 1..=hi).map(|n| Ok((n, p.w(n).inverse_sqrt()?))).collect::<Result<_>>()?;
    let id = CMat::identity(p.q);
    let mut a_tilde = Vec::new();
    let mut b_tilde = Vec::new();
    for n in lo..=hi {
        a_tilde.push((&(&isqrt[&(n - 1)] * p.a(n)) * &isqrt[&n]).scale_re(w_inf / a_inf));
        let bt = (&(&isqrt[&n] * p.b(n)) * &isqrt[&n]).scale_re(w_inf / a_inf);
        b_tilde.push(&bt - &id.scale_re(b_inf / a_inf));
    }
    Ok(ReducedProfile { q: p.q, n_min: lo, a_tilde, b_tilde, identity: id, zero: CMat::zeros(p.q, p.q) })
}
