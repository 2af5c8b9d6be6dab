//! JSON profile documents.
//!
//! ```json
//! {
//!   "q": 2,
//!   "tail": {"a_inf": -1.0, "b_inf": 2.0, "w_inf": 1.0},
//!   "window": {"n_min": 0, "n_max": 1},
//!   "b": {"0": [[[3, 0], [0, 1]], [[0, -1], [4, 0]]]},
//!   "expect_unequal_det": false
//! }
//! ```
//!
//! Matrices are rows of `[re, im]` pairs keyed by site. Sites left out of
//! `a`, `b` or `w` take tail values.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cmatrix::{CMat, C64};
use crate::error::{Error, Result};
use crate::lattice::{CoefficientProfile, Tail};

type MatrixDoc = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct TailDoc {
    a_inf: f64,
    b_inf: f64,
    w_inf: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct WindowDoc {
    n_min: i64,
    n_max: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct ProfileDoc {
    q: usize,
    tail: TailDoc,
    window: WindowDoc,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    a: BTreeMap<i64, MatrixDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    b: BTreeMap<i64, MatrixDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    w: BTreeMap<i64, MatrixDoc>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    expect_unequal_det: bool,
}

/// A parsed profile with its run options.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileSpec {
    pub profile: CoefficientProfile,
    /// The transmission determinants are known to differ for this profile.
    pub expect_unequal_det: bool,
}

fn to_matrix(doc: &MatrixDoc, q: usize, what: &str) -> Result<CMat> {
    if doc.len() != q || doc.iter().any(|r| r.len() != q) {
        return Err(Error::Dimension(format!("{what} must be {q}x{q}")));
    }
    let rows: Vec<Vec<C64>> = doc.iter().map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect()).collect();
    CMat::from_rows(&rows)
}

fn to_doc(m: &CMat) -> MatrixDoc {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn parse_profile(text: &str) -> Result<ProfileSpec> {
    let doc: ProfileDoc = serde_json::from_str(text).map_err(|e| Error::InvalidProfile(e.to_string()))?;
    let q = doc.q;
    let convert = |map: &BTreeMap<i64, MatrixDoc>, name: &str| -> Result<BTreeMap<i64, CMat>> {
        map.iter().map(|(&n, m)| Ok((n, to_matrix(m, q, &format!("{name}({n})"))?))).collect()
    };
    let profile = CoefficientProfile::with_window(
        q,
        Tail::new(doc.tail.a_inf, doc.tail.b_inf, doc.tail.w_inf),
        doc.window.n_min,
        doc.window.n_max,
        &convert(&doc.a, "a")?,
        &convert(&doc.b, "b")?,
        &convert(&doc.w, "w")?,
    )?;
    Ok(ProfileSpec { profile, expect_unequal_det: doc.expect_unequal_det })
}

pub fn load_profile(path: &Path) -> Result<ProfileSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidProfile(format!("cannot read {}: {e}", path.display())))?;
    parse_profile(&text)
}

/// Serializes every stored site, so parsing the result gives back `p`.
pub fn profile_to_json(p: &CoefficientProfile, expect_unequal_det: bool) -> String {
    let t = p.tail();
    let doc = ProfileDoc {
        q: p.q(),
        tail: TailDoc { a_inf: t.a_inf, b_inf: t.b_inf, w_inf: t.w_inf },
        window: WindowDoc { n_min: p.n_min(), n_max: p.n_max() },
        a: (p.n_min()..=p.n_max() + 1).map(|n| (n, to_doc(p.a(n)))).collect(),
        b: (p.n_min()..=p.n_max()).map(|n| (n, to_doc(p.b(n)))).collect(),
        w: (p.n_min()..=p.n_max()).map(|n| (n, to_doc(p.w(n)))).collect(),
        expect_unequal_det,
    };
    serde_json::to_string_pretty(&doc).expect("profile documents always serialize")
}
