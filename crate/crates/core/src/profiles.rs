//! Builders for commonly used profiles.

use std::collections::BTreeMap;

use crate::cmatrix::{CMat, C64};
use crate::lattice::{CoefficientProfile, Tail};

/// Discrete Schrödinger operator `-psi(n+1) + (2 + V(n)) psi(n) - psi(n-1)`
/// with the given Hermitian potentials; all potentials share one order `q`.
pub fn schrodinger(potentials: &BTreeMap<i64, CMat>) -> CoefficientProfile {
    let q = potentials.values().next().map_or(1, CMat::rows);
    let two = CMat::scalar(q, C64::new(2.0, 0.0));
    let b: BTreeMap<i64, CMat> = potentials.iter().map(|(&n, v)| (n, &two + v)).collect();
    CoefficientProfile::from_sites(q, Tail::schrodinger(), &BTreeMap::new(), &b, &BTreeMap::new())
        .expect("potentials share one order")
}

/// Profile whose only perturbation is the coupling `a(m)`.
pub fn coupling_defect(m: i64, a_m: CMat, tail: Tail) -> CoefficientProfile {
    let q = a_m.rows();
    CoefficientProfile::from_sites(q, tail, &BTreeMap::from([(m, a_m)]), &BTreeMap::new(), &BTreeMap::new())
        .expect("single square coupling")
}
