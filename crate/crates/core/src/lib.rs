//! Invariant-measure geometry and typical correlations of mixed Gaussian
//! quantum states.
//!
//! Everything here is pure computation over covariance matrices: symplectic
//! spectra and invariants, the Hilbert–Schmidt, Fisher–Rao and
//! reduced-pure-state densities, logarithmic negativity and steering of
//! two-mode states, and typical values of those correlations under purity or
//! energy constraints. Numerical integration is provided by [`quad`]
//! (adaptive Gauss–Kronrod) and [`mcint`] (VEGAS).
//!
//! The crate is `no_std` and only needs `alloc`. Parallel evaluation is
//! pluggable through [`mcint::ChunkRunner`]; the `gaussq` crate supplies a
//! thread-backed runner, file formats and the command line.
//!
//! Phase-space ordering is `q1, p1, ..., qN, pN` throughout.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod correlations;
pub mod covariance;
mod error;
pub mod linalg;
pub mod mcint;
pub mod measures;
pub mod quad;
pub mod standard_form;
pub mod typicality;

pub use correlations::{
    classify_region, delta_bounds, log_negativity, partial_transpose, ppt_spectrum, steerability,
    DeltaInterval, PptConvention, PptSpectrum, RegionClass, RegionSummary, Steering,
};
pub use covariance::{CovMat, SympForm, SympSpectrum, DEFAULT_BONA_FIDE_TOL};
pub use error::{Error, Result};
pub use mcint::{McEstimate, VegasConfig};
pub use measures::MeasureKind;
pub use standard_form::{cm_from_invariants, invariants, standard_form, InvariantCoords, StdForm};
