//! Local manipulation of finite bipartite pure states.
//!
//! Everything works in the Schmidt basis. A state is reduced to its ordered
//! spectrum of squared Schmidt coefficients ([`SchmidtSpectrum`]); on top of
//! that the crate provides
//!
//! - the tail-sum entanglement monotones and the deterministic and
//!   probabilistic feasibility tests built from them ([`monotones`]),
//! - the constructive side: average target state, diagonal local measurement
//!   and the classical die for coinciding targets ([`transform`]),
//! - the optimal entanglement concentration distribution, its single-shot
//!   measurement, the reduced-cost certificate and tensor-power analysis
//!   ([`concentrate`]),
//! - a small dense simplex solver with an exact rational mode and a
//!   vertex-enumeration oracle ([`lp`]),
//! - a seeded Monte Carlo executor for diagonal measurements ([`sim`]).
//!
//! All types are immutable values and all operations are pure.

#![forbid(unsafe_code)]

pub mod concentrate;
pub mod error;
pub mod lp;
pub mod monotones;
pub mod schmidt;
pub mod sim;
pub mod transform;

pub use concentrate::{
    asymptotic_yield_curve, concentration_lp, optimal_plan, optimality_certificate, phi_monotone,
    single_shot_povm, tensor_power, ConcentrationPlan, OptimalityCertificate, Weights,
};
pub use error::{Error, Result};
pub use lp::{
    enumerate_vertices, simplex_solve, verify_solution, LpProblem, LpSolution, LpStatus, Relation,
};
pub use monotones::{
    ensemble_feasible, max_conversion_probability, nielsen_feasible, vidal_monotones,
    FeasibilityReport, MonotoneVector,
};
pub use schmidt::{
    entropy, make_spectrum, schmidt_decompose, AmplitudeMatrix, Entropy, SchmidtSpectrum,
};
pub use sim::{simulate, yield_statistics, SimulationReport};
pub use transform::{
    apply_povm_element, average_target, build_theorem1_povm, merge_duplicates, DiagonalPovm,
    DieTable, PovmElement, TargetEnsemble,
};

/// Maximum deviation of a squared norm or probability sum from 1.
pub const NORM_TOL: f64 = 1e-9;
/// Squared Schmidt coefficients below this are treated as zero.
pub const ZERO_TOL: f64 = 1e-12;
/// Allowed negative slack in monotone inequalities.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Componentwise tolerance for treating two target spectra as identical.
pub const MERGE_TOL: f64 = 1e-9;
/// Allowed completeness residual of a diagonal measurement.
pub const POVM_TOL: f64 = 1e-10;
