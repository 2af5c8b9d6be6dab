//! Independent route to the scattering data: propagate each Jost solution
//! through the window and read its plane-wave amplitudes on the far side.

use crate::cmatrix::{CMat, C64};
use crate::error::{Error, Result};
use crate::jost::{jost_left, jost_right, plane_wave};
use crate::lattice::{CoefficientProfile, SpectralPoint};
use crate::scattering::ScatteringData;

/// Amplitudes of `v(n) = z^n c_plus + z^{-n} c_minus`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneWaveFit {
    pub c_plus: CMat,
    pub c_minus: CMat,
}

/// Fits `z^n c_plus + z^{-n} c_minus` to the values at `n` and `n + 1`.
pub fn fit_plane_waves(v_n: &CMat, v_n1: &CMat, z: C64, n: i64) -> Result<PlaneWaveFit> {
    let (a, b) = (plane_wave(z, n), plane_wave(z, -n));
    let (c, d) = (plane_wave(z, n + 1), plane_wave(z, -n - 1));
    let det = a * d - b * c;
    if det.norm() < 1e-12 {
        return Err(Error::DegenerateFit(format!("z = {z} makes the plane waves dependent")));
    }
    Ok(PlaneWaveFit {
        c_plus: (&v_n.scale(d) - &v_n1.scale(b)).scale(det.inv()),
        c_minus: (&v_n1.scale(a) - &v_n.scale(c)).scale(det.inv()),
    })
}

/// Scattering data from plane-wave amplitudes of the propagated Jost solutions.
pub fn oracle_scattering(p: &CoefficientProfile, z: &SpectralPoint) -> Result<ScatteringData> {
    let zz = z.z();
    let left = p.n_min() - 2;
    let right = p.n_max() + 1;
    let f_l = jost_left(p, zz, left..=left + 1)?;
    let f_r = jost_right(p, zz, right..=right + 1)?;
    let fl_fit = fit_plane_waves(&f_l[left], &f_l[left + 1], zz, left)?;
    let fr_fit = fit_plane_waves(&f_r[right], &f_r[right + 1], zz, right)?;
    ScatteringData::from_inverses(*z, fl_fit.c_plus, fl_fit.c_minus, fr_fit.c_minus, fr_fit.c_plus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Tail, DEFAULT_EXCLUSION_EPS};
    use crate::scattering::extract_scattering;
    use std::collections::BTreeMap;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn fit_recovers_amplitudes() {
        let z = C64::from_polar(1.0, 0.3);
        let cp = CMat::real(&[&[1.0, 2.0], &[0.0, -1.0]]);
        let cm = CMat::from_rows(&[vec![c(0.0, 1.0), c(0.5, 0.0)], vec![c(1.0, 1.0), c(2.0, 0.0)]]).unwrap();
        let v = |n: i64| &cp.scale(plane_wave(z, n)) + &cm.scale(plane_wave(z, -n));
        let fit = fit_plane_waves(&v(4), &v(5), z, 4).unwrap();
        assert!((&fit.c_plus - &cp).max_abs() < 1e-14);
        assert!((&fit.c_minus - &cm).max_abs() < 1e-14);
    }

    #[test]
    fn fit_is_degenerate_at_band_edge() {
        let id = CMat::identity(1);
        assert!(matches!(fit_plane_waves(&id, &id, c(1.0, 0.0), 0), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn free_profile_has_trivial_amplitudes() {
        let p = CoefficientProfile::free(2, Tail::new(-1.3, 0.4, 0.9));
        let z = SpectralPoint::from_angle(2.0, DEFAULT_EXCLUSION_EPS).unwrap();
        let d = oracle_scattering(&p, &z).unwrap();
        assert!((&d.t_l - &CMat::identity(2)).max_abs() < 1e-14);
        assert!(d.r.max_abs() < 1e-14);
    }

    #[test]
    fn agrees_with_wronskian_route() {
        let a0 = CMat::from_rows(&[vec![c(1.1, 0.3), c(0.2, -0.4)], vec![c(0.0, 0.5), c(0.8, 0.0)]]).unwrap();
        let b1 = CMat::real(&[&[0.3, -0.6], &[-0.6, 1.2]]);
        let w0 = CMat::real(&[&[1.5, 0.2], &[0.2, 0.7]]);
        let p = CoefficientProfile::from_sites(
            2,
            Tail::new(0.9, -0.1, 1.2),
            &BTreeMap::from([(0, a0)]),
            &BTreeMap::from([(1, b1)]),
            &BTreeMap::from([(0, w0)]),
        )
        .unwrap();
        for theta in [0.4, 1.7, 3.5, 5.9] {
            let z = SpectralPoint::from_angle(theta, DEFAULT_EXCLUSION_EPS).unwrap();
            let o = oracle_scattering(&p, &z).unwrap();
            let w = extract_scattering(&p, &z).unwrap();
            assert!(o.distance(&w) < 1e-12);
        }
    }
}
