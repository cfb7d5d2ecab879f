//! Multiple chordal SLE(0) systems of type `(n, m)`.
//!
//! A system is described by `n` growth points on the boundary of a
//! uniformizing domain, `m` screening charges and a marked boundary point
//! `u`. The crate covers the whole pipeline:
//!
//! * [`config`], [`mobius`], [`link`]: configurations, Möbius geometry and
//!   link-pattern combinatorics,
//! * [`stationary`] and [`solver`]: the master function, the stationary
//!   relations between growth points and screening charges, and a solver that
//!   enumerates all screening-charge solutions at desk scale,
//! * [`rational`]: the real rational function whose critical points are the
//!   growth points,
//! * [`locus`]: tracing the real locus `Im R = 0` from the critical points,
//! * [`loewner`]: the multi-slit Loewner flow with the field integral of
//!   motion and curve-tip reconstruction,
//! * [`calogero`]: null vector Hamiltonians, Lax matrices, Poisson brackets
//!   and the induced Calogero–Moser dynamics.
//!
//! ```
//! use sle0::prelude::*;
//!
//! let cfg = Configuration::half_plane(&[-1.0, 1.0], &[C64::new(0.0, 0.0)]).unwrap();
//! let residual = stationary_residual(&cfg);
//! assert!(residual.max_abs < 1e-12);
//! ```
#![allow(clippy::needless_range_loop)]

pub mod calogero;
pub mod config;
pub mod link;
pub mod locus;
pub mod loewner;
pub mod mobius;
pub mod poly;
pub mod rational;
pub mod solver;
pub mod stationary;

pub use num_complex::Complex64 as C64;

pub mod prelude {
    pub use crate::calogero::{
        cm_dynamics_residual, energy, lax_matrices, null_hamiltonians, phase_from_configuration,
        poisson_bracket, LaxPair, NullHamiltonian, PhaseFunction, PhasePoint,
    };
    pub use crate::config::{
        validate_configuration, Configuration, Point, RawConfiguration, Regime, ScreeningCharges,
        Uniformization, ValidationReport,
    };
    pub use crate::link::{ballot_number, enumerate_link_patterns, LinkPattern};
    pub use crate::locus::{extract_pattern, trace_all, trace_from, LocusProblem, Terminal, Trace, TraceOptions};
    pub use crate::loewner::{
        evolve, iom_drift, null_vector_drift, reconstruct_tips, stationarity_drift, CapacityWeights,
        EvolveOptions, History,
    };
    pub use crate::mobius::{transport_configuration, MobiusMap};
    pub use crate::rational::{
        derivative_from_configuration, primitive, pullback_disk, residues, FactoredDerivative,
        RationalMap,
    };
    pub use crate::solver::{solve_stationary, SolutionSet, SolverOptions};
    pub use crate::stationary::{
        drift_vector, master_log, null_vector_residual, stationary_residual, ward_residual,
    };
    pub use crate::C64;
}

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    F: Fn(T) -> R,
{
    items.into_iter().map(f).collect()
}
