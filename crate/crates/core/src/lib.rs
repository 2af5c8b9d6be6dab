//! Scattering theory for matrix-valued Jacobi operators on the integers.
//!
//! A [`CoefficientProfile`] describes the recurrence
//! `a(n+1) psi(n+1) + b(n) psi(n) + a(n)^† psi(n-1) = lambda w(n) psi(n)` with
//! coefficients that equal scalar tails outside a finite window. For a point
//! `z` on the unit circle, [`extract_scattering`] returns the transmission and
//! reflection coefficients; [`build_transition`] assembles the transition
//! matrices, and [`factorization_check`] verifies that cutting the profile
//! into fragments factors the left transition matrix into a product.

pub mod cmatrix;
pub mod ensemble;
pub mod error;
pub mod factorize;
pub mod jost;
pub mod lattice;
pub mod oracle;
pub mod profile_io;
pub mod profiles;
pub mod report;
pub mod scattering;
pub mod transition;

pub use cmatrix::{CMat, C64};
pub use error::{Error, Result};
pub use factorize::{
    compose_all, compose_scattering, factorization_check, fragment, fragment_jost_relations, point_defect_closed_form,
    Factorization, Fragment, Partition,
};
pub use jost::{jost_left, jost_right, wronskian, JostPair, MatrixSequence};
pub use lattice::{
    lambda_of_z, make_spectral_grid, reduce, validate_class_a, CoefficientProfile, ReducedProfile, Regime,
    SpectralPoint, Tail, ValidationReport, DEFAULT_EXCLUSION_EPS,
};
pub use oracle::{fit_plane_waves, oracle_scattering, PlaneWaveFit};
pub use profile_io::{load_profile, parse_profile, profile_to_json, ProfileSpec};
pub use report::{Check, Expectation, ReportCard};
pub use scattering::{
    assemble_smatrix, extract_scattering, identity_suite, physical_solutions, scalar_energy_defect, SMatrix,
    ScatteringData,
};
pub use transition::{
    build_frame_series, build_frames, build_transition, closed_form_inverses, determinant_suite, frame_suite,
    relate_frames, transition_from_pair, FrameInverses, FundamentalFrame, TransitionMatrices,
};
