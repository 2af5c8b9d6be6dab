//! Acceptance runner: prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use jacobi_scatter::cmatrix::{mixed_residual, relative_residual};
use jacobi_scatter::ensemble::{draw, random_profile, seeded_rng};
use jacobi_scatter::{
    build_transition, compose_scattering, determinant_suite, extract_scattering, factorization_check, fragment,
    identity_suite, make_spectral_grid, oracle_scattering, point_defect_closed_form, profiles, scalar_energy_defect,
    CMat, CoefficientProfile, Partition, ScatteringData, SpectralPoint, Tail, C64, DEFAULT_EXCLUSION_EPS,
};
use rand::Rng;

const ENSEMBLE_SEED: u64 = 0x5eed_2024;
const ENSEMBLE_SIZE: usize = 200;
const Z_PER_PROFILE: usize = 8;

type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn residual(worst: f64, tol: f64, extra: &str) -> Self {
        Outcome { pass: worst < tol, detail: format!("max residual {worst:.3e} (tol {tol:.0e}){extra}") }
    }

    fn and_within(mut self, elapsed: Duration, limit: Duration) -> Self {
        let ok = elapsed < limit;
        self.pass &= ok;
        self.detail.push_str(&format!(", runtime {:.3} s (limit {} s)", elapsed.as_secs_f64(), limit.as_secs()));
        self
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn grid(n: usize) -> Vec<SpectralPoint> {
    make_spectral_grid(n, DEFAULT_EXCLUSION_EPS).expect("non-empty grid")
}

fn ensemble() -> Vec<(CoefficientProfile, Partition)> {
    let mut rng = seeded_rng(ENSEMBLE_SEED);
    (0..ENSEMBLE_SIZE).map(|_| draw(&mut rng)).collect()
}

fn track(worst: &mut f64, value: f64) {
    *worst = if value.is_nan() { f64::INFINITY } else { worst.max(value) };
}

fn two_site_potentials() -> (CMat, CMat) {
    let i = c(0.0, 1.0);
    let v0 = CMat::from_rows(&[vec![c(1.0, 0.0), i], vec![-i, c(2.0, 0.0)]]).unwrap();
    let v1 = CMat::from_rows(&[vec![c(3.0, 0.0), -7.0 * i], vec![7.0 * i, c(4.0, 0.0)]]).unwrap();
    (v0, v1)
}

fn two_site_rational(z: C64) -> [CMat; 4] {
    let i = c(0.0, 1.0);
    let one = c(1.0, 0.0);
    let m2 = |a, b, cc, d| CMat::from_rows(&[vec![a, b], vec![cc, d]]).unwrap();
    let p = 33.0 * z.powi(4) + 114.0 * z.powi(3) + 17.0 * z * z - 10.0 * z - one;
    let (zm, zp) = (z - one, z + one);
    let diag_t = zm * zp * (6.0 * z + one);
    let diag_b = -(zm * zm) * zp * (5.0 * z + one);
    let u = 3.0 * i * z * zm * zp * (z + 2.0);
    let v = i * z * zm * zp * (11.0 * z + 6.0);
    let t_l = m2(diag_t, u, -v, diag_b).scale(p.inv());
    let t_r = m2(diag_t, v, -u, diag_b).scale(p.inv());
    let off_l = i * z * zm * zp * (4.0 * z - one) * (11.0 * z + one);
    let l = m2(
        -z * (77.0 * z.powi(4) + 57.0 * z.powi(3) + 28.0 * z * z - 8.0 * z - one),
        off_l,
        -off_l,
        -z * (41.0 * z.powi(4) + 64.0 * z.powi(3) + 65.0 * z * z - 15.0 * z - 2.0),
    )
    .scale(p.inv());
    let off_r = i * zm * zp * (6.0 * z * z + 21.0 * z + 7.0);
    let r = m2(
        3.0 * z.powi(4) - 21.0 * z.powi(3) - 110.0 * z * z - 28.0 * z + 3.0,
        off_r,
        -off_r,
        z.powi(4) - 24.0 * z.powi(3) - 109.0 * z * z - 25.0 * z + 4.0,
    )
    .scale((z * p).inv());
    [t_l, t_r, l, r]
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (v0, v1) = two_site_potentials();
    let p = profiles::schrodinger(&BTreeMap::from([(0, v0), (1, v1)]));
    let mut worst = 0.0;
    for z in grid(32) {
        let d = extract_scattering(&p, &z).expect("extraction");
        let want = two_site_rational(z.z());
        for (got, want) in [&d.t_l, &d.t_r, &d.l, &d.r].into_iter().zip(want.iter()) {
            track(&mut worst, relative_residual(got, want));
        }
    }
    Outcome::residual(worst, 1e-9, " over 32 points").and_within(start.elapsed(), Duration::from_secs(1))
}

fn criterion_2() -> Outcome {
    let (_, v) = two_site_potentials();
    let id = CMat::identity(2);
    let mut worst_closed = 0.0;
    let mut worst_agree = 0.0;
    for m in [-3, 0, 2] {
        let p = profiles::schrodinger(&BTreeMap::from([(m, v.clone())]));
        for z in grid(32) {
            let zz = z.z();
            let k = z.gap().inv();
            let e = zz.powi(2 * m as i32);
            let t_inv = &id - &v.scale(k);
            let lt = v.scale(k * e);
            let rt = v.scale(k / e);
            let corr = CMat::block2(&-&v, &v.scale(-e.inv()), &v.scale(e), &v).unwrap().scale(k);
            let lambda = &CMat::identity(4) + &corr;
            let sigma = &CMat::identity(4) - &corr;

            let d = extract_scattering(&p, &z).expect("extraction");
            let cf = point_defect_closed_form(&p, &z).expect("closed form");
            for got in [&d, &cf] {
                for (x, y) in
                    [(&got.t_l_inv, &t_inv), (&got.t_r_inv, &t_inv), (&got.l_t_l_inv, &lt), (&got.r_t_r_inv, &rt)]
                {
                    track(&mut worst_closed, mixed_residual(x, y));
                }
                let tm = build_transition(got);
                track(&mut worst_closed, mixed_residual(&tm.lambda, &lambda));
                track(&mut worst_closed, mixed_residual(&tm.sigma, &sigma));
            }
            track(&mut worst_agree, d.distance(&cf));
        }
    }
    let tol = 1e-10;
    Outcome {
        pass: worst_closed < tol && worst_agree < tol,
        detail: format!(
            "blockwise max residual {worst_closed:.3e}, closed form vs pipeline {worst_agree:.3e} (tol {tol:.0e})"
        ),
    }
}

fn criterion_3(ens: &[(CoefficientProfile, Partition)]) -> Outcome {
    let start = Instant::now();
    let zs = grid(Z_PER_PROFILE);
    let mut worst = 0.0;
    let mut errors = 0;
    for (p, part) in ens {
        for z in &zs {
            match factorization_check(p, part, z) {
                Ok(f) => track(&mut worst, f.lambda_residual()),
                Err(_) => errors += 1,
            }
        }
    }
    let mut o = Outcome::residual(worst, 1e-8, &format!(" over {} profiles x {} z", ens.len(), zs.len()));
    o.pass &= errors == 0;
    if errors > 0 {
        o.detail.push_str(&format!(", {errors} extraction errors"));
    }
    o.and_within(start.elapsed(), Duration::from_secs(30))
}

fn two_piece_data(p: &CoefficientProfile, cut: i64, z: &SpectralPoint) -> jacobi_scatter::Result<[ScatteringData; 2]> {
    let frags = fragment(p, &Partition::new(vec![cut])?)?;
    Ok([extract_scattering(&frags[0].profile, z)?, extract_scattering(&frags[1].profile, z)?])
}

fn criterion_4(ens: &[(CoefficientProfile, Partition)]) -> Outcome {
    let zs = grid(Z_PER_PROFILE);
    let mut worst = 0.0;
    for (p, part) in ens {
        for &cut in part.cuts() {
            for z in &zs {
                let direct = extract_scattering(p, z).expect("extraction");
                let composed = two_piece_data(p, cut, z).and_then(|[l, r]| compose_scattering(&l, &r));
                track(&mut worst, composed.map_or(f64::INFINITY, |d| d.distance(&direct)));
            }
        }
    }
    Outcome::residual(worst, 1e-8, " (every cut of every partition)")
}

fn criterion_5(ens: &[(CoefficientProfile, Partition)]) -> Outcome {
    let zs = grid(Z_PER_PROFILE);
    let mut worst = 0.0;
    let mut checks = 0;
    for (p, _) in ens {
        for z in &zs {
            let d = extract_scattering(p, z).expect("extraction");
            match identity_suite(p, &d) {
                Ok(card) => {
                    checks = checks.max(card.checks.len());
                    track(&mut worst, card.max_residual());
                }
                Err(_) => track(&mut worst, f64::INFINITY),
            }
        }
    }
    Outcome::residual(worst, 1e-9, &format!(" ({checks} checks per point, Wronskians at 3 sites)"))
}

/// Rescales each coupling by a phase so that its determinant is real.
fn with_real_det_couplings(p: &CoefficientProfile) -> CoefficientProfile {
    let q = p.q();
    let sites = p.n_min()..=p.n_max();
    let a = (p.n_min()..=p.n_max() + 1)
        .map(|n| {
            let det = p.a(n).det().expect("invertible coupling");
            p.a(n).scale(C64::from_polar(1.0, -det.arg() / q as f64))
        })
        .collect();
    let b = sites.clone().map(|n| p.b(n).clone()).collect();
    let w = sites.map(|n| p.w(n).clone()).collect();
    CoefficientProfile::new(q, p.tail(), p.n_min(), p.n_max(), a, b, w).expect("same shapes")
}

fn counter_cases() -> f64 {
    let i = c(0.0, 1.0);
    let tail = Tail::new(1.0, 0.0, 1.0);
    let imag = profiles::coupling_defect(0, CMat::diag(&[i, c(1.0, 0.0)]), tail);
    let skew = profiles::coupling_defect(0, CMat::diag(&[c(1.0, 1.0), c(1.0, 0.0)]), tail);
    let mut worst: f64 = 0.0;
    for z in grid(32) {
        let zz = z.z();
        let d = extract_scattering(&imag, &z).expect("extraction");
        worst = worst.max((d.t_l.det().unwrap() + i).norm()).max((d.t_r.det().unwrap() - i).norm());
        let d = extract_scattering(&skew, &z).expect("extraction");
        let base = (1.0 - zz * zz) / (1.0 - 2.0 * zz * zz);
        worst = worst
            .max((d.t_l.det().unwrap() - c(1.0, -1.0) * base).norm())
            .max((d.t_r.det().unwrap() - c(1.0, 1.0) * base).norm());
    }
    worst
}

fn criterion_6(ens: &[(CoefficientProfile, Partition)]) -> Outcome {
    let zs = grid(Z_PER_PROFILE);
    let mut worst = 0.0;
    let mut real_det_checks = 0usize;
    for (p, _) in ens {
        for profile in [p.clone(), with_real_det_couplings(p)] {
            for z in &zs {
                let d = extract_scattering(&profile, z).expect("extraction");
                match determinant_suite(&profile, &d, false) {
                    Ok(card) => {
                        real_det_checks += card.get("det T_l = det T_r").is_some() as usize;
                        track(&mut worst, card.max_residual());
                    }
                    Err(_) => track(&mut worst, f64::INFINITY),
                }
            }
        }
    }
    let mut flagged_ok = true;
    for a in [CMat::diag(&[c(0.0, 1.0), c(1.0, 0.0)]), CMat::diag(&[c(1.0, 1.0), c(1.0, 0.0)])] {
        let p = profiles::coupling_defect(0, a, Tail::new(1.0, 0.0, 1.0));
        for z in &zs {
            let d = extract_scattering(&p, z).expect("extraction");
            flagged_ok &= determinant_suite(&p, &d, true).is_ok_and(|card| card.passes(1e-9));
        }
    }
    let counter = counter_cases();
    let tol = 1e-9;
    Outcome {
        pass: worst < tol && counter < 1e-12 && flagged_ok && real_det_checks > 0,
        detail: format!(
            "identities max residual {worst:.3e} (tol {tol:.0e}, {real_det_checks} real-det evaluations), \
             counter-cases {counter:.3e} (tol 1e-12), flagged inequalities {}",
            if flagged_ok { "reported as expected" } else { "MISREPORTED" }
        ),
    }
}

fn criterion_7(ens: &[(CoefficientProfile, Partition)]) -> Outcome {
    let zs = grid(Z_PER_PROFILE);
    let mut worst = 0.0;
    for (p, _) in ens {
        for z in &zs {
            let w = extract_scattering(p, z).expect("extraction");
            track(&mut worst, oracle_scattering(p, z).map_or(f64::INFINITY, |o| o.distance(&w)));
        }
    }
    Outcome::residual(worst, 1e-8, "")
}

fn criterion_8(ens: &[(CoefficientProfile, Partition)]) -> Outcome {
    let zs = grid(32);
    let mut rng = seeded_rng(ENSEMBLE_SEED ^ 1);
    let mut scalar: Vec<CoefficientProfile> = ens.iter().filter(|(p, _)| p.q() == 1).map(|(p, _)| p.clone()).collect();
    let from_ensemble = scalar.len();
    scalar.extend((0..100).map(|_| {
        let len = rng.gen_range(1..=6);
        random_profile(&mut rng, 1, len)
    }));
    let mut worst = 0.0;
    for p in &scalar {
        for z in &zs {
            let d = extract_scattering(p, z).expect("extraction");
            track(&mut worst, scalar_energy_defect(&d).unwrap_or(f64::INFINITY));
        }
    }
    Outcome::residual(
        worst,
        1e-10,
        &format!(" over {} scalar profiles ({from_ensemble} from the ensemble)", scalar.len()),
    )
}

fn main() -> ExitCode {
    let ens = ensemble();
    let criteria: [(&str, Criterion<'_>); 8] = [
        ("two-site rational coefficients", Box::new(criterion_1)),
        ("single-site defect closed form", Box::new(criterion_2)),
        ("transition matrix factorization", Box::new(|| criterion_3(&ens))),
        ("two-piece composition", Box::new(|| criterion_4(&ens))),
        ("unitarity, symmetries, Wronskians", Box::new(|| criterion_5(&ens))),
        ("determinant identities", Box::new(|| criterion_6(&ens))),
        ("oracle vs Wronskian extraction", Box::new(|| criterion_7(&ens))),
        ("scalar energy balance", Box::new(|| criterion_8(&ens))),
    ];
    let mut all = true;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        all &= o.pass;
        println!("{} criterion {} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, k + 1, o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
