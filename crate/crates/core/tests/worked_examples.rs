//! Closed-form scattering data for small profiles, checked against the
//! numerical pipeline.

use std::collections::BTreeMap;

use jacobi_scatter::cmatrix::{mixed_residual, relative_residual};
use jacobi_scatter::factorize::defect_site;
use jacobi_scatter::{
    build_transition, determinant_suite, extract_scattering, make_spectral_grid, point_defect_closed_form, profiles,
    CMat, Expectation, Partition, SpectralPoint, Tail, C64, DEFAULT_EXCLUSION_EPS,
};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn i() -> C64 {
    c(0.0, 1.0)
}

fn v0() -> CMat {
    CMat::from_rows(&[vec![c(1.0, 0.0), i()], vec![-i(), c(2.0, 0.0)]]).unwrap()
}

fn v1() -> CMat {
    CMat::from_rows(&[vec![c(3.0, 0.0), i() * -7.0], vec![i() * 7.0, c(4.0, 0.0)]]).unwrap()
}

fn two_site() -> jacobi_scatter::CoefficientProfile {
    profiles::schrodinger(&BTreeMap::from([(0, v0()), (1, v1())]))
}

fn m2(a: C64, b: C64, cc: C64, d: C64) -> CMat {
    CMat::from_rows(&[vec![a, b], vec![cc, d]]).unwrap()
}

/// Rational transmission and reflection coefficients of the two-site profile.
fn two_site_expected(z: C64) -> [CMat; 4] {
    let one = c(1.0, 0.0);
    let p = 33.0 * z.powi(4) + 114.0 * z.powi(3) + 17.0 * z * z - 10.0 * z - one;
    let (zm, zp) = (z - one, z + one);
    let t_l = m2(
        zm * zp * (6.0 * z + one),
        3.0 * i() * z * zm * zp * (z + 2.0),
        -i() * z * zm * zp * (11.0 * z + 6.0),
        -(zm * zm) * zp * (5.0 * z + one),
    )
    .scale(p.inv());
    let t_r = m2(
        zm * zp * (6.0 * z + one),
        i() * z * zm * zp * (11.0 * z + 6.0),
        -3.0 * i() * z * zm * zp * (z + 2.0),
        -(zm * zm) * zp * (5.0 * z + one),
    )
    .scale(p.inv());
    let off_l = i() * z * zm * zp * (4.0 * z - one) * (11.0 * z + one);
    let l = m2(
        -z * (77.0 * z.powi(4) + 57.0 * z.powi(3) + 28.0 * z * z - 8.0 * z - one),
        off_l,
        -off_l,
        -z * (41.0 * z.powi(4) + 64.0 * z.powi(3) + 65.0 * z * z - 15.0 * z - 2.0),
    )
    .scale(p.inv());
    let off_r = i() * zm * zp * (6.0 * z * z + 21.0 * z + 7.0);
    let r = m2(
        3.0 * z.powi(4) - 21.0 * z.powi(3) - 110.0 * z * z - 28.0 * z + 3.0,
        off_r,
        -off_r,
        z.powi(4) - 24.0 * z.powi(3) - 109.0 * z * z - 25.0 * z + 4.0,
    )
    .scale((z * p).inv());
    [t_l, t_r, l, r]
}

#[test]
fn two_site_schrodinger_matches_rational_coefficients() {
    let p = two_site();
    for z in make_spectral_grid(32, DEFAULT_EXCLUSION_EPS).unwrap() {
        let d = extract_scattering(&p, &z).unwrap();
        let [t_l, t_r, l, r] = two_site_expected(z.z());
        for (got, want) in [(&d.t_l, &t_l), (&d.t_r, &t_r), (&d.l, &l), (&d.r, &r)] {
            assert!(relative_residual(got, want) < 1e-12, "z = {z}");
        }
        let zz = z.z();
        let p4 = 33.0 * zz.powi(4) + 114.0 * zz.powi(3) + 17.0 * zz * zz - 10.0 * zz - 1.0;
        let det_expect = -(zz * zz - 1.0).powi(2) / p4;
        assert!((d.t_l.det().unwrap() - det_expect).norm() < 1e-12 * det_expect.norm());
        assert!((d.t_r.det().unwrap() - det_expect).norm() < 1e-12 * det_expect.norm());
    }
}

#[test]
fn two_site_transition_matrix_is_product_of_point_defects() {
    let p = two_site();
    let (a, b) = (v0(), v1());
    let ab = &a * &b;
    for z in make_spectral_grid(12, DEFAULT_EXCLUSION_EPS).unwrap() {
        let zz = z.z();
        let k = z.gap().inv();
        let corr = CMat::block2(
            &-&(&(&a + &b) + &ab.scale(zz)),
            &-&(&(&a + &b.scale(zz.powi(-2))) + &ab.scale(zz.inv())),
            &(&(&a + &b.scale(zz * zz)) + &ab.scale(zz)),
            &(&(&a + &b) + &ab.scale(zz.inv())),
        )
        .unwrap()
        .scale(k);
        let expect = &CMat::identity(4) + &corr;
        let lambda = build_transition(&extract_scattering(&p, &z).unwrap()).lambda;
        assert!(mixed_residual(&lambda, &expect) < 1e-12);
        let f = jacobi_scatter::factorization_check(&p, &Partition::new(vec![0]).unwrap(), &z).unwrap();
        assert!(f.lambda_residual() < 1e-12);
    }
}

#[test]
fn schrodinger_point_defect_closed_form_and_transition() {
    let v = v1();
    for m in [-2, 0, 3] {
        let p = profiles::schrodinger(&BTreeMap::from([(m, v.clone())]));
        assert_eq!(defect_site(&p).unwrap(), m);
        for z in make_spectral_grid(32, DEFAULT_EXCLUSION_EPS).unwrap() {
            let zz = z.z();
            let k = z.gap().inv();
            let e = zz.powi(2 * m as i32);
            let t_inv = &CMat::identity(2) - &v.scale(k);
            let d = extract_scattering(&p, &z).unwrap();
            let cf = point_defect_closed_form(&p, &z).unwrap();
            for got in [&d, &cf] {
                assert!(mixed_residual(&got.t_l_inv, &t_inv) < 1e-11);
                assert!(mixed_residual(&got.t_r_inv, &t_inv) < 1e-11);
                assert!(mixed_residual(&got.l_t_l_inv, &v.scale(k * e)) < 1e-11);
                assert!(mixed_residual(&got.r_t_r_inv, &v.scale(k / e)) < 1e-11);
            }
            assert!(d.distance(&cf) < 1e-11);
        }
    }
}

#[test]
fn hermitian_coupling_gives_equal_transmissions() {
    let a = m2(c(2.0, 0.0), c(0.5, -1.0), c(0.5, 1.0), c(-1.5, 0.0));
    let p = profiles::coupling_defect(1, a.clone(), Tail::new(1.0, 0.0, 1.0));
    for z in make_spectral_grid(16, DEFAULT_EXCLUSION_EPS).unwrap() {
        let zz = z.z();
        let expect = (&a.inverse().unwrap().scale(zz.inv()) - &a.scale(zz)).scale((zz.inv() - zz).inv());
        let d = extract_scattering(&p, &z).unwrap();
        assert!(mixed_residual(&d.t_l_inv, &expect) < 1e-12);
        assert!(mixed_residual(&d.t_l, &d.t_r) < 1e-12);
    }
}

#[test]
fn unit_determinant_coupling() {
    let a = m2(c(1.0, 0.0), i(), c(0.0, 0.0), c(1.0, 0.0));
    let p = profiles::coupling_defect(0, a, Tail::new(1.0, 0.0, 1.0));
    for z in make_spectral_grid(16, DEFAULT_EXCLUSION_EPS).unwrap() {
        let zz = z.z();
        let zi = zz.inv();
        let k = (zi - zz).inv();
        let tl_inv = m2(zi - zz, -i() * zz, i() * zi, zi - zz).scale(k);
        let tr_inv = m2(zi - zz, -i() * zi, i() * zz, zi - zz).scale(k);
        let d = extract_scattering(&p, &z).unwrap();
        assert!(mixed_residual(&d.t_l_inv, &tl_inv) < 1e-12);
        assert!(mixed_residual(&d.t_r_inv, &tr_inv) < 1e-12);
        let z2 = zz * zz;
        let det = (1.0 - 2.0 * z2 + z2 * z2) / (1.0 - 3.0 * z2 + z2 * z2);
        assert!((d.t_l.det().unwrap() - det).norm() < 1e-12);
        assert!((d.t_r.det().unwrap() - det).norm() < 1e-12);
        assert!(determinant_suite(&p, &d, false).unwrap().passes(1e-10));
    }
}

#[test]
fn imaginary_coupling_is_reflectionless_with_opposite_determinants() {
    let p = profiles::coupling_defect(0, CMat::diag(&[i(), c(1.0, 0.0)]), Tail::new(1.0, 0.0, 1.0));
    for z in make_spectral_grid(16, DEFAULT_EXCLUSION_EPS).unwrap() {
        let d = extract_scattering(&p, &z).unwrap();
        assert!(mixed_residual(&d.t_l_inv, &CMat::diag(&[i(), c(1.0, 0.0)])) < 1e-12);
        assert!(mixed_residual(&d.t_r_inv, &CMat::diag(&[-i(), c(1.0, 0.0)])) < 1e-12);
        assert!(d.l.max_abs() < 1e-12 && d.r.max_abs() < 1e-12);
        assert!((d.t_l.det().unwrap() + i()).norm() < 1e-12);
        assert!((d.t_r.det().unwrap() - i()).norm() < 1e-12);
        let card = determinant_suite(&p, &d, true).unwrap();
        assert!(card.passes(1e-9), "{card}");
        assert_eq!(card.get("det T_l = det T_r").unwrap().expectation, Expectation::Differs);
    }
}

#[test]
fn complex_determinant_coupling() {
    let one_i = c(1.0, 1.0);
    let p = profiles::coupling_defect(0, CMat::diag(&[one_i, c(1.0, 0.0)]), Tail::new(1.0, 0.0, 1.0));
    for z in make_spectral_grid(16, DEFAULT_EXCLUSION_EPS).unwrap() {
        let zz = z.z();
        let zi = zz.inv();
        let k = (zi - zz).inv();
        let d = extract_scattering(&p, &z).unwrap();
        let tl_inv = CMat::diag(&[one_i / 2.0 * zi - one_i * zz, zi - zz]).scale(k);
        let tr_inv = CMat::diag(&[one_i.conj() / 2.0 * zi - one_i.conj() * zz, zi - zz]).scale(k);
        assert!(mixed_residual(&d.t_l_inv, &tl_inv) < 1e-12);
        assert!(mixed_residual(&d.t_r_inv, &tr_inv) < 1e-12);
        let base = (1.0 - zz * zz) / (1.0 - 2.0 * zz * zz);
        assert!((d.t_l.det().unwrap() - one_i.conj() * base).norm() < 1e-12);
        assert!((d.t_r.det().unwrap() - one_i * base).norm() < 1e-12);
    }
}

#[test]
fn spectral_point_conjugate_is_reciprocal() {
    let z = SpectralPoint::from_angle(1.234, DEFAULT_EXCLUSION_EPS).unwrap();
    assert!((z.conj().z() - z.z().inv()).norm() < 1e-15);
}
