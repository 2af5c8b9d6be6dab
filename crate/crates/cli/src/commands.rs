use rayon::prelude::*;
use serde_json::{json, Value};

use jacobi_scatter::factorize::defect_site;
use jacobi_scatter::{
    assemble_smatrix, determinant_suite, extract_scattering, factorization_check, fragment, fragment_jost_relations,
    frame_suite, identity_suite, make_spectral_grid, oracle_scattering, point_defect_closed_form, validate_class_a,
    CMat, CoefficientProfile, Expectation, Partition, ReportCard, ScatteringData, SpectralPoint,
};

use crate::config::{Format, RunConfig};
use crate::emit::*;
use crate::CliError;

/// What a command produced: the data to write, a one-line summary for
/// standard error, and whether every check passed.
pub struct Outcome {
    pub data: String,
    pub summary: String,
    pub passed: bool,
}

fn grid(cfg: &RunConfig) -> Result<Vec<SpectralPoint>, CliError> {
    make_spectral_grid(cfg.z_samples, cfg.eps).map_err(|e| CliError::Input(e.to_string()))
}

fn require_admissible(p: &CoefficientProfile) -> Result<(), CliError> {
    let report = validate_class_a(p);
    if report.passed() {
        return Ok(());
    }
    let items: Vec<String> = report.failures().map(|i| format!("{}: {}", i.item.label(), i.detail)).collect();
    Err(CliError::Input(format!("profile is not admissible; {}", items.join("; "))))
}

fn point_header() -> Vec<String> {
    ["z_re", "z_im", "lambda_re", "lambda_im"].map(String::from).to_vec()
}

fn point_fields(p: &CoefficientProfile, z: &SpectralPoint) -> Vec<String> {
    let mut f = complex_fields(z.z()).to_vec();
    f.extend(complex_fields(z.lambda(&p.tail())));
    f
}

fn coefficient_header(q: usize) -> Vec<String> {
    ["Tl", "Tr", "L", "R"].iter().flat_map(|name| matrix_header(name, q)).collect()
}

fn coefficient_fields(d: Option<&ScatteringData>, q: usize) -> Vec<String> {
    match d {
        Some(d) => [&d.t_l, &d.t_r, &d.l, &d.r].into_iter().flat_map(matrix_fields).collect(),
        None => (0..4).flat_map(|_| missing_fields(q)).collect(),
    }
}

fn coefficient_json(d: &ScatteringData) -> Value {
    json!({
        "T_l": json_matrix(&d.t_l),
        "T_r": json_matrix(&d.t_r),
        "L": json_matrix(&d.l),
        "R": json_matrix(&d.r),
    })
}

pub fn validate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let report = validate_class_a(&cfg.profile);
    let regime = report.regime.map_or_else(|| "unclassified".to_string(), |r| r.to_string());
    let status = |ok: bool| if ok { "PASS" } else { "FAIL" };
    let data = match cfg.format {
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = report
                .items
                .iter()
                .map(|i| vec![i.item.label().to_string(), status(i.passed).to_string(), i.detail.clone()])
                .collect();
            rows.push(vec!["regime".into(), regime.clone(), String::new()]);
            csv_table(&["item".into(), "status".into(), "detail".into()], &rows)?
        }
        Format::Json => json_text(&json!({
            "passed": report.passed(),
            "regime": regime,
            "items": report.items.iter().map(|i| json!({
                "item": i.item.label(),
                "passed": i.passed,
                "detail": i.detail,
            })).collect::<Vec<_>>(),
        })),
    };
    let failed = report.failures().count();
    Ok(Outcome {
        data,
        summary: format!("validate: {failed} of {} items failed, {regime}", report.items.len()),
        passed: report.passed(),
    })
}

struct ScatterRow {
    z: SpectralPoint,
    data: Result<(ScatteringData, f64), String>,
}

fn unitarity_residual(d: &ScatteringData) -> f64 {
    let s = assemble_smatrix(d).0;
    (&(&s.adjoint() * &s) - &CMat::identity(s.rows())).op_norm()
}

pub fn scatter(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = &cfg.profile;
    require_admissible(p)?;
    let q = p.q();
    let rows: Vec<ScatterRow> = grid(cfg)?
        .par_iter()
        .map(|z| ScatterRow {
            z: *z,
            data: extract_scattering(p, z)
                .map(|d| {
                    let u = unitarity_residual(&d);
                    (d, u)
                })
                .map_err(|e| e.to_string()),
        })
        .collect();
    let status = |r: &ScatterRow| match &r.data {
        Ok((_, u)) if *u < cfg.tol => "ok".to_string(),
        Ok(_) => "unitarity".to_string(),
        Err(e) => format!("error: {e}"),
    };
    let flagged = rows.iter().filter(|r| status(r) != "ok").count();
    let worst = rows.iter().filter_map(|r| r.data.as_ref().ok().map(|(_, u)| *u)).fold(0.0, f64::max);

    let data = match cfg.format {
        Format::Csv => {
            let mut header = point_header();
            header.extend(coefficient_header(q));
            header.extend(["unitarity_residual".to_string(), "status".to_string()]);
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut f = point_fields(p, &r.z);
                    let d = r.data.as_ref().ok();
                    f.extend(coefficient_fields(d.map(|(d, _)| d), q));
                    f.push(num(d.map_or(f64::NAN, |(_, u)| *u)));
                    f.push(status(r));
                    f
                })
                .collect();
            csv_table(&header, &table)?
        }
        Format::Json => json_text(&json!({
            "q": q,
            "rows": rows.iter().map(|r| {
                let mut v = json!({
                    "z": json_complex(r.z.z()),
                    "lambda": json_complex(r.z.lambda(&p.tail())),
                    "status": status(r),
                });
                if let Ok((d, u)) = &r.data {
                    v["coefficients"] = coefficient_json(d);
                    v["unitarity_residual"] = json_num(*u);
                }
                v
            }).collect::<Vec<_>>(),
        })),
    };
    Ok(Outcome {
        data,
        summary: format!("scatter: {} points, {flagged} flagged, max unitarity residual {worst:.3e}", rows.len()),
        passed: flagged == 0,
    })
}

pub fn factorize(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = &cfg.profile;
    require_admissible(p)?;
    let part = cfg
        .partition
        .as_ref()
        .ok_or_else(|| CliError::Input("factorize needs --cuts (or --seed without --profile)".into()))?;
    let pieces = fragment(p, part).map_err(|e| CliError::Input(e.to_string()))?;
    let results: Vec<_> =
        grid(cfg)?.par_iter().map(|z| (*z, factorization_check(p, part, z).map_err(|e| e.to_string()))).collect();

    let residual = |r: &Result<jacobi_scatter::Factorization, String>| {
        r.as_ref().map_or(f64::INFINITY, |f| f.lambda_residual().max(f.sigma_residual()))
    };
    let worst = results.iter().map(|(_, r)| residual(r)).fold(0.0, f64::max);
    let errors = results.iter().filter(|(_, r)| r.is_err()).count();
    let bound = |b: Option<i64>| b.map_or(String::new(), |n| n.to_string());
    let size = 2 * p.q();

    let data = match cfg.format {
        Format::Csv => {
            let mut header = ["z_re", "z_im", "piece", "lo", "hi"].map(String::from).to_vec();
            header.extend(matrix_header("Lambda", size));
            header.extend(["lambda_residual", "sigma_residual", "status"].map(String::from));
            let mut table = Vec::new();
            for (z, r) in &results {
                let zf = complex_fields(z.z());
                let row = |label: String, lo: String, hi: String, m: Option<&CMat>| {
                    let mut f = zf.to_vec();
                    f.extend([label, lo, hi]);
                    f.extend(m.map_or_else(|| missing_fields(size), matrix_fields));
                    match r {
                        Ok(fz) => f.extend([
                            num(fz.lambda_residual()),
                            num(fz.sigma_residual()),
                            if fz.lambda_residual().max(fz.sigma_residual()) < cfg.tol { "ok" } else { "residual" }
                                .to_string(),
                        ]),
                        Err(e) => f.extend([num(f64::NAN), num(f64::NAN), format!("error: {e}")]),
                    }
                    f
                };
                let fz = r.as_ref().ok();
                table.push(row("parent".into(), String::new(), String::new(), fz.map(|f| &f.lambda)));
                table.push(row("product".into(), String::new(), String::new(), fz.map(|f| &f.lambda_product)));
                for (j, piece) in pieces.iter().enumerate() {
                    let m = fz.map(|f| &f.fragment_lambdas[j]);
                    table.push(row((j + 1).to_string(), bound(piece.lo), bound(piece.hi), m));
                }
            }
            csv_table(&header, &table)?
        }
        Format::Json => json_text(&json!({
            "cuts": part.cuts(),
            "fragments": pieces.iter().map(|f| json!({"lo": f.lo, "hi": f.hi})).collect::<Vec<_>>(),
            "rows": results.iter().map(|(z, r)| match r {
                Ok(f) => json!({
                    "z": json_complex(z.z()),
                    "lambda": json_matrix(&f.lambda),
                    "lambda_product": json_matrix(&f.lambda_product),
                    "fragment_lambdas": f.fragment_lambdas.iter().map(json_matrix).collect::<Vec<_>>(),
                    "lambda_residual": json_num(f.lambda_residual()),
                    "sigma_residual": json_num(f.sigma_residual()),
                }),
                Err(e) => json!({"z": json_complex(z.z()), "error": e}),
            }).collect::<Vec<_>>(),
            "max_residual": json_num(worst),
        })),
    };
    Ok(Outcome {
        data,
        summary: format!(
            "factorize: {} fragments, {} points, {errors} errors, max product residual {worst:.3e}",
            pieces.len(),
            results.len()
        ),
        passed: worst < cfg.tol,
    })
}

pub fn closed_form(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = &cfg.profile;
    require_admissible(p)?;
    let site = defect_site(p).map_err(|e| CliError::Input(e.to_string()))?;
    let q = p.q();
    let results: Vec<_> = grid(cfg)?
        .par_iter()
        .map(|z| {
            let r = point_defect_closed_form(p, z)
                .and_then(|cf| extract_scattering(p, z).map(|d| (cf.distance(&d), cf)))
                .map_err(|e| e.to_string());
            (*z, r)
        })
        .collect();
    let worst = results.iter().map(|(_, r)| r.as_ref().map_or(f64::INFINITY, |(e, _)| *e)).fold(0.0, f64::max);
    let status = |r: &Result<(f64, ScatteringData), String>| match r {
        Ok((e, _)) if *e < cfg.tol => "ok".to_string(),
        Ok(_) => "mismatch".to_string(),
        Err(e) => format!("error: {e}"),
    };
    let data = match cfg.format {
        Format::Csv => {
            let mut header = point_header();
            header.extend(coefficient_header(q));
            header.extend(["pipeline_distance", "status"].map(String::from));
            let table: Vec<Vec<String>> = results
                .iter()
                .map(|(z, r)| {
                    let mut f = point_fields(p, z);
                    f.extend(coefficient_fields(r.as_ref().ok().map(|(_, d)| d), q));
                    f.push(num(r.as_ref().map_or(f64::NAN, |(e, _)| *e)));
                    f.push(status(r));
                    f
                })
                .collect();
            csv_table(&header, &table)?
        }
        Format::Json => json_text(&json!({
            "site": site,
            "rows": results.iter().map(|(z, r)| {
                let mut v = json!({"z": json_complex(z.z()), "status": status(r)});
                if let Ok((e, d)) = r {
                    v["coefficients"] = coefficient_json(d);
                    v["pipeline_distance"] = json_num(*e);
                }
                v
            }).collect::<Vec<_>>(),
        })),
    };
    Ok(Outcome {
        data,
        summary: format!("closed-form: defect at site {site}, max distance to pipeline {worst:.3e}"),
        passed: worst < cfg.tol,
    })
}

fn verify_point(cfg: &RunConfig, part: &Partition, z: &SpectralPoint) -> jacobi_scatter::Result<ReportCard> {
    let p = &cfg.profile;
    let d = extract_scattering(p, z)?;
    let mut card = identity_suite(p, &d)?;
    card.absorb(&frame_suite(p, &d)?);
    card.absorb(&determinant_suite(p, &d, cfg.expect_unequal_det)?);
    card.push("oracle vs wronskian extraction", oracle_scattering(p, z)?.distance(&d));
    card.absorb(&factorization_check(p, part, z)?.report());
    for &m in part.cuts() {
        card.absorb(&fragment_jost_relations(p, m, z)?);
    }
    if defect_site(p).is_ok() {
        card.push("closed form vs pipeline", point_defect_closed_form(p, z)?.distance(&d));
    }
    Ok(card)
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = &cfg.profile;
    require_admissible(p)?;
    let part = match &cfg.partition {
        Some(part) => part.clone(),
        None => Partition::new(vec![(p.n_min() + p.n_max()).div_euclid(2)]).expect("single cut"),
    };
    let cards: Vec<_> = grid(cfg)?.par_iter().map(|z| (*z, verify_point(cfg, &part, z))).collect();
    let mut merged = ReportCard::new();
    let mut errors = Vec::new();
    for (z, card) in &cards {
        match card {
            Ok(c) => merged.absorb(c),
            Err(e) => errors.push(format!("z = {z}: {e}")),
        }
    }
    if !errors.is_empty() {
        merged.push("evaluation errors", f64::INFINITY);
    }
    let tol = cfg.tol;
    let expectation = |c: &jacobi_scatter::Check| match c.expectation {
        Expectation::Holds => "holds",
        Expectation::Differs => "differs",
    };
    let data = match cfg.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = merged
                .checks
                .iter()
                .map(|c| {
                    let status = if c.passes(tol) { "pass" } else { "FAIL" };
                    vec![c.name.clone(), num(c.residual), expectation(c).into(), status.into()]
                })
                .collect();
            csv_table(&["check", "max_residual", "expectation", "status"].map(String::from), &rows)?
        }
        Format::Json => json_text(&json!({
            "passed": merged.passes(tol),
            "tolerance": tol,
            "errors": errors,
            "checks": merged.checks.iter().map(|c| json!({
                "name": c.name,
                "max_residual": json_num(c.residual),
                "expectation": expectation(c),
                "passed": c.passes(tol),
            })).collect::<Vec<_>>(),
        })),
    };
    let failed = merged.failures(tol).count();
    let mut summary = format!("verify: {} checks over {} points, {failed} failed", merged.checks.len(), cards.len());
    for e in &errors {
        summary.push_str(&format!("\n  {e}"));
    }
    Ok(Outcome { data, summary, passed: failed == 0 })
}
