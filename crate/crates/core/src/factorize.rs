//! Splitting a profile into fragments and recombining their scattering data.
//!
//! Cuts `m_1 < ... < m_P` split the lattice into `(-inf, m_1]`,
//! `[m_1 + 1, m_2]`, ..., `[m_P + 1, inf)`. A fragment keeps the parent's
//! `b(n)`, `w(n)` and `a(n)` for `n` in its piece and takes tail values
//! elsewhere, so the coupling `a(m + 1)` across a cut belongs to the piece on
//! the right. The left transition matrix then factors as
//! `Lambda = Lambda_1 ... Lambda_{P+1}` and the right one as
//! `Sigma = Sigma_{P+1} ... Sigma_1`.

use crate::cmatrix::{mixed_residual, CMat, C64};
use crate::error::{Error, Result};
use crate::jost::{jost_left, jost_right, plane_wave};
use crate::lattice::{CoefficientProfile, SpectralPoint};
use crate::report::ReportCard;
use crate::scattering::{extract_scattering, ScatteringData};
use crate::transition::{build_frames, build_transition};

/// Strictly increasing cut positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    cuts: Vec<i64>,
}

impl Partition {
    pub fn new(cuts: Vec<i64>) -> Result<Self> {
        if cuts.is_empty() {
            return Err(Error::InvalidPartition("at least one cut is needed".into()));
        }
        if let Some(w) = cuts.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPartition(format!("cuts must increase strictly, found {} then {}", w[0], w[1])));
        }
        Ok(Self { cuts })
    }

    pub fn cuts(&self) -> &[i64] {
        &self.cuts
    }

    /// Pieces as `(lo, hi)`, with `None` for an unbounded end.
    pub fn pieces(&self) -> Vec<(Option<i64>, Option<i64>)> {
        let mut out = Vec::with_capacity(self.cuts.len() + 1);
        let mut lo = None;
        for &m in &self.cuts {
            out.push((lo, Some(m)));
            lo = Some(m + 1);
        }
        out.push((lo, None));
        out
    }
}

/// One piece of a partitioned profile.
#[derive(Clone, Debug, PartialEq)]
pub struct Fragment {
    pub lo: Option<i64>,
    pub hi: Option<i64>,
    pub profile: CoefficientProfile,
}

/// Splits `p` along `partition`; fragments are ordered left to right.
pub fn fragment(p: &CoefficientProfile, partition: &Partition) -> Result<Vec<Fragment>> {
    partition
        .pieces()
        .into_iter()
        .map(|(lo, hi)| {
            let first = lo.map_or(p.n_min(), |l| l.max(p.n_min()));
            let last_a = hi.map_or(p.n_max() + 1, |h| h.min(p.n_max() + 1));
            let profile = if first > last_a {
                CoefficientProfile::free(p.q(), p.tail())
            } else {
                let n_max = hi.map_or(p.n_max(), |h| h.min(p.n_max()));
                let inside = |n: i64| hi.is_none_or(|h| n <= h);
                CoefficientProfile::new(
                    p.q(),
                    p.tail(),
                    first,
                    n_max,
                    (first..=n_max + 1).map(|n| if inside(n) { p.a(n).clone() } else { p.a_tail().clone() }).collect(),
                    (first..=n_max).map(|n| p.b(n).clone()).collect(),
                    (first..=n_max).map(|n| p.w(n).clone()).collect(),
                )?
            };
            Ok(Fragment { lo, hi, profile })
        })
        .collect()
}

/// Parent and fragment transition matrices at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub lambda: CMat,
    pub sigma: CMat,
    pub fragment_lambdas: Vec<CMat>,
    pub fragment_sigmas: Vec<CMat>,
    /// `Lambda_1 ... Lambda_{P+1}`.
    pub lambda_product: CMat,
    /// `Sigma_{P+1} ... Sigma_1`.
    pub sigma_product: CMat,
}

impl Factorization {
    /// `‖Lambda - Lambda_1 ... Lambda_{P+1}‖` in the spectral norm.
    pub fn lambda_residual(&self) -> f64 {
        (&self.lambda - &self.lambda_product).op_norm()
    }

    /// `‖Sigma - Sigma_{P+1} ... Sigma_1‖` in the spectral norm.
    pub fn sigma_residual(&self) -> f64 {
        (&self.sigma - &self.sigma_product).op_norm()
    }

    pub fn report(&self) -> ReportCard {
        let mut card = ReportCard::new();
        card.push("factorization Lambda = Lambda_1 ... Lambda_{P+1}", self.lambda_residual());
        card.push("factorization Sigma = Sigma_{P+1} ... Sigma_1", self.sigma_residual());
        card
    }
}

/// Transition matrices of `p` and of its fragments at `z`.
pub fn factorization_check(p: &CoefficientProfile, partition: &Partition, z: &SpectralPoint) -> Result<Factorization> {
    let parent = build_transition(&extract_scattering(p, z)?);
    let frags = fragment(p, partition)?;
    let mut fragment_lambdas = Vec::with_capacity(frags.len());
    let mut fragment_sigmas = Vec::with_capacity(frags.len());
    for f in &frags {
        let tm = build_transition(&extract_scattering(&f.profile, z)?);
        fragment_lambdas.push(tm.lambda);
        fragment_sigmas.push(tm.sigma);
    }
    let id = CMat::identity(2 * p.q());
    let lambda_product = fragment_lambdas.iter().fold(id.clone(), |acc, m| &acc * m);
    let sigma_product = fragment_sigmas.iter().rev().fold(id, |acc, m| &acc * m);
    Ok(Factorization {
        lambda: parent.lambda,
        sigma: parent.sigma,
        fragment_lambdas,
        fragment_sigmas,
        lambda_product,
        sigma_product,
    })
}

/// Scattering data of two adjacent pieces joined, left piece first.
///
/// Values at `1/z` are taken from the conjugation symmetries, so only data at
/// `z` is needed.
pub fn compose_scattering(left: &ScatteringData, right: &ScatteringData) -> Result<ScatteringData> {
    if left.q() != right.q() {
        return Err(Error::Dimension(format!("composing q = {} with q = {}", left.q(), right.q())));
    }
    let id = CMat::identity(left.q());
    let (d1, d2) = (left, right);
    let m_rl = (&id - &(&d1.r * &d2.l)).inverse()?;
    let m_lr = (&id - &(&d2.l * &d1.r)).inverse()?;
    let t_l = &(&d2.t_l * &m_rl) * &d1.t_l;
    let l = &(&(&d1.t_r_inv.adjoint() * &(&d2.l - &d1.r.adjoint())) * &m_rl) * &d1.t_l;
    let t_r = &(&d1.t_r * &m_lr) * &d2.t_r;
    let r = &(&(&d2.t_l * &m_rl) * &(&d1.r - &d2.l.adjoint())) * &d2.t_r_inv.adjoint();
    ScatteringData::from_coefficients(d1.z, t_l, t_r, l, r)
}

/// Folds [`compose_scattering`] over pieces ordered left to right.
pub fn compose_all(pieces: &[ScatteringData]) -> Result<ScatteringData> {
    let (first, rest) = pieces.split_first().ok_or_else(|| Error::InvalidPartition("nothing to compose".into()))?;
    rest.iter().try_fold(first.clone(), |acc, d| compose_scattering(&acc, d))
}

/// Site of a profile whose whole perturbation is `b(m)`, `w(m)` and `a(m)`.
pub fn defect_site(p: &CoefficientProfile) -> Result<i64> {
    match p.support() {
        None => Ok(p.n_min()),
        Some((lo, hi)) if hi == lo - 1 => Ok(lo),
        Some((lo, hi)) if hi == lo && p.a(lo + 1) == p.a_tail() => Ok(lo),
        Some((lo, hi)) => {
            Err(Error::NotPointDefect(format!("perturbation spans sites {lo}..={} (couplings included)", hi + 1)))
        }
    }
}

/// Closed-form scattering data of a single-site defect at `m`:
/// `q1 = (a_inf/w_inf) w a^{-1}`, `q2 = (b_inf/w_inf) w a^{-1} - b a^{-1}`,
/// `q3 = (a_inf/w_inf) w a^{-1} - a^†/a_inf` with `a, b, w` taken at `m`.
pub fn point_defect_closed_form(p: &CoefficientProfile, z: &SpectralPoint) -> Result<ScatteringData> {
    p.tail().check_usable()?;
    let m = defect_site(p)?;
    let t = p.tail();
    let (a, b, w) = (p.a(m), p.b(m), p.w(m));
    let a_inv = a.inverse()?;
    let a_dag_inv = a_inv.adjoint();
    let wa = w * &a_inv;
    let q1 = wa.scale_re(t.a_inf / t.w_inf);
    let q2 = &wa.scale_re(t.b_inf / t.w_inf) - &(b * &a_inv);
    let q3 = &q1 - &a.adjoint().scale_re(1.0 / t.a_inf);
    let zz = z.z();
    let zi = zz.inv();
    let pw = |k: i64| plane_wave(zz, k);
    let up = (zz - zi).inv();
    let down = (zi - zz).inv();
    let m2 = 2 * m;
    let lin = |x: &CMat, cx: C64, y: &CMat, cy: C64, u: &CMat, cu: C64| &(&x.scale(cx) + &y.scale(cy)) + &u.scale(cu);

    let t_r_inv = lin(&q1, zi, &q2, C64::new(1.0, 0.0), &(&q3 - &a_inv.scale_re(t.a_inf)), zz).scale(down);
    let r_t_r_inv = lin(&(&q1 - &a_inv.scale_re(t.a_inf)), pw(-m2 - 1), &q2, pw(-m2), &q3, pw(-m2 + 1)).scale(up);
    let (q1d, q2d, q3d) = (q1.adjoint(), q2.adjoint(), q3.adjoint());
    let t_l_inv = lin(&q1d, zi, &q2d, C64::new(1.0, 0.0), &(&q3d - &a_dag_inv.scale_re(t.a_inf)), zz).scale(down);
    let l_t_l_inv = lin(&(&q1d - &a_dag_inv.scale_re(t.a_inf)), pw(m2 + 1), &q2d, pw(m2), &q3d, pw(m2 - 1)).scale(up);
    ScatteringData::from_inverses(*z, t_l_inv, l_t_l_inv, t_r_inv, r_t_r_inv)
}

/// Relations between parent Jost solutions and those of the two fragments on
/// either side of cut `m`.
pub fn fragment_jost_relations(p: &CoefficientProfile, m: i64, z: &SpectralPoint) -> Result<ReportCard> {
    let frags = fragment(p, &Partition::new(vec![m])?)?;
    let (p1, p2) = (&frags[0].profile, &frags[1].profile);
    let zz = z.z();
    let q = p.q();
    let a_inf = p.tail().a_inf;
    let lo = p.n_min().min(m) - 2;
    let hi = p.n_max().max(m) + 2;
    let f_r = jost_right(p, zz, lo..=hi)?;
    let f_l = jost_left(p, zz, lo..=hi)?;
    let f_r1 = jost_right(p1, zz, lo..=hi)?;
    let f_l2 = jost_left(p2, zz, lo..=hi)?;
    let d = extract_scattering(p, z)?;
    let d1 = extract_scattering(p1, z)?;
    let d2 = extract_scattering(p2, z)?;
    let a_m1 = p.a(m + 1).scale_re(1.0 / a_inf);
    let worst = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0, f64::max);
    let mut card = ReportCard::new();

    card.push("fragment f_r1 = f_r left of cut", worst(&mut (lo..=m).map(|n| mixed_residual(&f_r1[n], &f_r[n]))));
    card.push("fragment a_inf f_r1(m+1) = a(m+1) f_r(m+1)", mixed_residual(&f_r1[m + 1], &(&a_m1 * &f_r[m + 1])));
    card.push("fragment f_l2 = f_l right of cut", worst(&mut (m..=hi).map(|n| mixed_residual(&f_l2[n], &f_l[n]))));
    card.push(
        "fragment f_r1 plane waves right of cut",
        worst(&mut (m..=hi).map(|n| {
            let pw = &d1.t_r_inv.scale(plane_wave(zz, -n)) + &d1.r_t_r_inv.scale(plane_wave(zz, n));
            mixed_residual(&f_r1[n], &pw)
        })),
    );
    card.push(
        "fragment f_l2 plane waves left of cut",
        worst(&mut (lo..=m).map(|n| {
            let pw = &d2.t_l_inv.scale(plane_wave(zz, n)) + &d2.l_t_l_inv.scale(plane_wave(zz, -n));
            mixed_residual(&f_l2[n], &pw)
        })),
    );
    let boundary = &d2.t_l_inv.scale(plane_wave(zz, m + 1)) + &d2.l_t_l_inv.scale(plane_wave(zz, -m - 1));
    card.push("fragment a(m+1) f_l2(m+1) / a_inf boundary", mixed_residual(&(&a_m1 * &f_l2[m + 1]), &boundary));

    let g = build_frames(p, zz, m)?.mixed;
    let s = |x: C64| CMat::scalar(q, x);
    let zero = CMat::zeros(q, q);
    let id = CMat::identity(q);
    let scale_rows = CMat::block2(&id, &zero, &zero, &s(C64::new(a_inf, 0.0)))?;
    let waves = CMat::block2(
        &s(plane_wave(zz, m)),
        &s(plane_wave(zz, -m)),
        &s(plane_wave(zz, m + 1)),
        &s(plane_wave(zz, -m - 1)),
    )?;
    let free = &scale_rows * &waves;
    let upper = CMat::block2(&id, &d.r_t_r_inv, &zero, &d.t_r_inv)?;
    let lower = CMat::block2(&d.t_l_inv, &zero, &d.l_t_l_inv, &id)?;
    let lambda2 = build_transition(&d2).lambda;
    let sigma1 = build_transition(&d1).sigma;
    card.push("fragment G(m) via Lambda_2", mixed_residual(&g, &(&(&free * &lambda2) * &upper)));
    card.push("fragment G(m) via Sigma_1", mixed_residual(&g, &(&(&free * &sigma1) * &lower)));
    Ok(card)
}
