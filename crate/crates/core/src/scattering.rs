//! Transmission and reflection coefficients.
//!
//! The coefficients come from Wronskians of Jost solutions evaluated just to
//! the right of the window, where every Wronskian is already constant.

use std::ops::RangeInclusive;

use crate::cmatrix::{mixed_residual, CMat};
use crate::error::{Error, Result};
use crate::jost::{jost_left, jost_right, padded_range, wronskian, JostPair, MatrixSequence};
use crate::lattice::{CoefficientProfile, SpectralPoint};
use crate::report::ReportCard;

/// Inverting a transmission inverse with a larger condition number than this
/// is reported as singular.
pub const MAX_TRANSMISSION_COND: f64 = 1e10;

/// Scattering coefficients at one spectral point, with the inverse forms they
/// were computed from.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringData {
    pub z: SpectralPoint,
    pub t_l: CMat,
    pub t_r: CMat,
    pub l: CMat,
    pub r: CMat,
    /// `T_l^{-1}`.
    pub t_l_inv: CMat,
    /// `T_r^{-1}`.
    pub t_r_inv: CMat,
    /// `L T_l^{-1}`.
    pub l_t_l_inv: CMat,
    /// `R T_r^{-1}`.
    pub r_t_r_inv: CMat,
}

impl ScatteringData {
    /// Completes the coefficients from `T_l^{-1}`, `L T_l^{-1}`, `T_r^{-1}`, `R T_r^{-1}`.
    pub fn from_inverses(
        z: SpectralPoint,
        t_l_inv: CMat,
        l_t_l_inv: CMat,
        t_r_inv: CMat,
        r_t_r_inv: CMat,
    ) -> Result<Self> {
        let t_l = invert_transmission(&t_l_inv, "T_l", z)?;
        let t_r = invert_transmission(&t_r_inv, "T_r", z)?;
        Ok(Self { z, l: &l_t_l_inv * &t_l, r: &r_t_r_inv * &t_r, t_l, t_r, t_l_inv, t_r_inv, l_t_l_inv, r_t_r_inv })
    }

    /// Builds the inverse forms from the coefficients themselves.
    pub fn from_coefficients(z: SpectralPoint, t_l: CMat, t_r: CMat, l: CMat, r: CMat) -> Result<Self> {
        let t_l_inv = invert_transmission(&t_l, "T_l^-1", z)?;
        let t_r_inv = invert_transmission(&t_r, "T_r^-1", z)?;
        Ok(Self { z, l_t_l_inv: &l * &t_l_inv, r_t_r_inv: &r * &t_r_inv, t_l, t_r, l, r, t_l_inv, t_r_inv })
    }

    pub fn q(&self) -> usize {
        self.t_l.rows()
    }

    /// Largest mixed residual between corresponding coefficients.
    pub fn distance(&self, other: &Self) -> f64 {
        [
            mixed_residual(&self.t_l, &other.t_l),
            mixed_residual(&self.t_r, &other.t_r),
            mixed_residual(&self.l, &other.l),
            mixed_residual(&self.r, &other.r),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn invert_transmission(m: &CMat, name: &str, z: SpectralPoint) -> Result<CMat> {
    if !m.is_finite() {
        return Err(Error::SingularMatrix(format!("{name}^-1 is not finite at z = {z}")));
    }
    let kappa = m.cond();
    if kappa > MAX_TRANSMISSION_COND {
        return Err(Error::SingularMatrix(format!("{name}^-1 has condition number {kappa:.3e} at z = {z}")));
    }
    m.inverse()
}

/// Scattering coefficients of `p` at `z`.
pub fn extract_scattering(p: &CoefficientProfile, z: &SpectralPoint) -> Result<ScatteringData> {
    p.tail().check_usable()?;
    let n = p.n_max() + 1;
    let zz = z.z();
    let range = n..=n + 1;
    let f_l = jost_left(p, zz, range.clone())?;
    let f_l_star = jost_left(p, zz.conj(), range.clone())?;
    let f_r = jost_right(p, zz, range.clone())?;
    let f_r_star = jost_right(p, zz.conj(), range)?;

    let c = z.gap() * p.tail().a_inf;
    let w_lr = wronskian(p, &f_l.adjoint(), &f_r, n);
    let t_r_inv = wronskian(p, &f_l_star.adjoint(), &f_r, n).scale(-c.inv());
    let r_t_r_inv = w_lr.scale(c.inv());
    let t_l_inv = wronskian(p, &f_r_star.adjoint(), &f_l, n).scale(c.inv());
    let l_t_l_inv = w_lr.scale((-c).inv()).adjoint();
    ScatteringData::from_inverses(*z, t_l_inv, l_t_l_inv, t_r_inv, r_t_r_inv)
}

/// `S = [[T_l, R], [L, T_r]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SMatrix(pub CMat);

pub fn assemble_smatrix(d: &ScatteringData) -> SMatrix {
    SMatrix(CMat::block2(&d.t_l, &d.r, &d.l, &d.t_r).expect("q x q blocks"))
}

/// `[[0, I], [I, 0]]` of size `2q`.
pub fn swap_matrix(q: usize) -> CMat {
    let z = CMat::zeros(q, q);
    let i = CMat::identity(q);
    CMat::block2(&z, &i, &i, &z).expect("q x q blocks")
}

/// Physical solutions `Psi_l = f_l T_l` and `Psi_r = f_r T_r`.
pub fn physical_solutions(
    p: &CoefficientProfile,
    d: &ScatteringData,
    range: RangeInclusive<i64>,
) -> Result<(MatrixSequence, MatrixSequence)> {
    let z = d.z.z();
    let f_l = jost_left(p, z, range.clone())?;
    let f_r = jost_right(p, z, range)?;
    Ok((f_l.mul_right(&d.t_l), f_r.mul_right(&d.t_r)))
}

/// Unitarity, conjugation symmetries and Wronskian identities at `z`.
///
/// Data at `z^*` is extracted independently, so the symmetry checks compare
/// two separate computations.
pub fn identity_suite(p: &CoefficientProfile, d: &ScatteringData) -> Result<ReportCard> {
    let q = p.q();
    let id2 = CMat::identity(2 * q);
    let zp = d.z;
    let ds = extract_scattering(p, &zp.conj())?;
    let mut card = ReportCard::new();

    let s = assemble_smatrix(d).0;
    let s_star = assemble_smatrix(&ds).0;
    card.push("unitarity S^dag S = I", mixed_residual(&(&s.adjoint() * &s), &id2));
    card.push("unitarity S S^dag = I", mixed_residual(&(&s * &s.adjoint()), &id2));
    card.push("symmetry L(z*) = L(z)^dag", mixed_residual(&ds.l, &d.l.adjoint()));
    card.push("symmetry R(z*) = R(z)^dag", mixed_residual(&ds.r, &d.r.adjoint()));
    card.push("symmetry T_l(z*) = T_r(z)^dag", mixed_residual(&ds.t_l, &d.t_r.adjoint()));
    card.push("symmetry T_r(z*) = T_l(z)^dag", mixed_residual(&ds.t_r, &d.t_l.adjoint()));
    let qm = swap_matrix(q);
    card.push("symmetry S(z)^dag = Q S(z*) Q", mixed_residual(&s.adjoint(), &(&(&qm * &s_star) * &qm)));

    let t_r_dag_inv = d.t_r_inv.adjoint();
    card.push(
        "reflection -T_l^-1 R = L^dag (T_r^dag)^-1",
        mixed_residual(&-&(&d.t_l_inv * &d.r), &(&d.l.adjoint() * &t_r_dag_inv)),
    );
    card.push(
        "reflection L L^dag (T_r^dag)^-1 + T_r = (T_r^dag)^-1",
        mixed_residual(&(&(&(&d.l * &d.l.adjoint()) * &t_r_dag_inv) + &d.t_r), &t_r_dag_inv),
    );

    for (name, residual) in wronskian_relations(p, d, &ds)? {
        card.push(name, residual);
    }
    Ok(card)
}

/// Sites at which Wronskian identities are sampled: left of, inside and right
/// of the window.
pub fn sample_sites(p: &CoefficientProfile) -> [i64; 3] {
    [p.n_min() - 2, (p.n_min() + p.n_max()).div_euclid(2), p.n_max() + 1]
}

/// Each Wronskian compared with its value from the right (`n -> +inf`) and
/// from the left (`n -> -inf`) plane-wave forms at three sites.
fn wronskian_relations(p: &CoefficientProfile, d: &ScatteringData, ds: &ScatteringData) -> Result<Vec<(String, f64)>> {
    let q = p.q();
    let z = d.z.z();
    let range: RangeInclusive<i64> = padded_range(p);
    let jp = JostPair::compute(p, z, range.clone())?;
    let f_l_star = jost_left(p, z.conj(), range.clone())?;
    let f_r_star = jost_right(p, z.conj(), range)?;
    let c = d.z.gap() * p.tail().a_inf;
    let ci = CMat::scalar(q, c);
    let zero = CMat::zeros(q, q);
    // Targets are expanded into products of the stored blocks `T^{-1}` and
    // `L T^{-1}`; forming `I - L^dag L` first loses digits when reflection is strong.
    let gram = |x: &CMat, y: &CMat, u: &CMat, v: &CMat| (&(&x.adjoint() * y) - &(&u.adjoint() * v)).scale(c);
    let cases: Vec<(&str, &MatrixSequence, &MatrixSequence, CMat, CMat)> = vec![
        (
            "wronskian [f_l^dag; f_l]",
            &jp.f_l,
            &jp.f_l,
            ci.clone(),
            gram(&d.t_l_inv, &d.t_l_inv, &d.l_t_l_inv, &d.l_t_l_inv),
        ),
        (
            "wronskian [f_l^dag; g_l]",
            &jp.f_l,
            &jp.g_l,
            zero.clone(),
            gram(&d.t_l_inv, &ds.l_t_l_inv, &d.l_t_l_inv, &ds.t_l_inv),
        ),
        (
            "wronskian [g_l^dag; f_l]",
            &jp.g_l,
            &jp.f_l,
            zero.clone(),
            gram(&ds.t_l_inv, &d.l_t_l_inv, &ds.l_t_l_inv, &d.t_l_inv),
        ),
        (
            "wronskian [g_l^dag; g_l]",
            &jp.g_l,
            &jp.g_l,
            -&ci,
            -&gram(&ds.t_l_inv, &ds.t_l_inv, &ds.l_t_l_inv, &ds.l_t_l_inv),
        ),
        (
            "wronskian [f_r^dag; f_r]",
            &jp.f_r,
            &jp.f_r,
            -&gram(&d.t_r_inv, &d.t_r_inv, &d.r_t_r_inv, &d.r_t_r_inv),
            -&ci,
        ),
        (
            "wronskian [g_r^dag; f_r]",
            &jp.g_r,
            &jp.f_r,
            gram(&ds.t_r_inv, &d.r_t_r_inv, &ds.r_t_r_inv, &d.t_r_inv),
            zero.clone(),
        ),
        (
            "wronskian [g_r^dag; g_r]",
            &jp.g_r,
            &jp.g_r,
            gram(&ds.t_r_inv, &ds.t_r_inv, &ds.r_t_r_inv, &ds.r_t_r_inv),
            ci.clone(),
        ),
        ("wronskian [f_l^dag; f_r]", &jp.f_l, &jp.f_r, d.r_t_r_inv.scale(c), d.l_t_l_inv.adjoint().scale(-c)),
        ("wronskian [f_l(z*)^dag; f_r]", &f_l_star, &jp.f_r, d.t_r_inv.scale(-c), ds.t_l_inv.adjoint().scale(-c)),
        ("wronskian [f_r(z*)^dag; f_l]", &f_r_star, &jp.f_l, ds.t_r_inv.adjoint().scale(c), d.t_l_inv.scale(c)),
    ];

    let sites = sample_sites(p);
    Ok(cases
        .into_iter()
        .map(|(name, alpha, beta, plus_inf, minus_inf)| {
            let alpha = alpha.adjoint();
            let worst = sites
                .iter()
                .map(|&n| {
                    let w = wronskian(p, &alpha, beta, n);
                    mixed_residual(&w, &plus_inf).max(mixed_residual(&w, &minus_inf))
                })
                .fold(0.0, f64::max);
            (name.to_string(), worst)
        })
        .collect())
}

/// `q = 1` energy balance `|T|^2 + |L|^2 - 1`.
pub fn scalar_energy_defect(d: &ScatteringData) -> Result<f64> {
    if d.q() != 1 {
        return Err(Error::Dimension(format!("energy balance needs q = 1, got {}", d.q())));
    }
    let t = d.t_l[(0, 0)];
    let l = d.l[(0, 0)];
    Ok((t.norm_sqr() + l.norm_sqr() - 1.0).abs())
}
