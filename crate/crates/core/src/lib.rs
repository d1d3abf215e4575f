//! Radial scattering off piecewise-constant potentials.
//!
//! The crate solves the zero angular momentum radial Schrödinger equation
//! `-χ'' + κ V(r) χ = k² χ` for potentials that are constant on a finite
//! set of shells and vanish beyond the outermost breakpoint. From the regular
//! solution it builds the Jost functions, the S-matrix, the standing-wave and
//! "in"/"out" continuum eigenfunctions with their spectral measures, and the
//! Gamow (purely outgoing) resonance states together with their residue
//! normalizations.
//!
//! Everything here is pure computation over immutable values. The crate is
//! `no_std` and only needs `alloc`; file formats and the command-line tool
//! live in the `gamow` crate.

#![no_std]

// Float methods on `f64` come from num-traits (libm backed). Unit test
// builds link std, which provides them inherently, hence the
// `cfg(not(test))` imports in the numeric modules.

extern crate alloc;

pub mod cmath;
pub mod criterion;
pub mod error;
pub mod potential;
pub mod quadrature;
pub mod resonance;
pub mod solution;
pub mod spectral;
pub mod verification;

pub use num_complex::Complex64;

pub use crate::error::{Error, Result};
pub use crate::potential::{local_wavenumber, make_shell, PhysicalScale, Potential};
pub use crate::solution::{evaluate_chi, evaluate_chi_derivative, solve_regular, LayerSolution};
pub use crate::spectral::{
    eigenfunction, energy_transform, jost, s_matrix, sqrt_branch, EigenfunctionFamily,
    FamilyKind, JostPair, RadialSamples, SMatrixValue, Transform,
};
pub use crate::criterion::{
    check_symmetry, classify_eigensolution, Classification, CriterionReport, CriterionTarget,
    EnergyGrid,
};
pub use crate::resonance::{
    find_resonances, gamow_eigenfunction, growing_partner, residue_norm, GamowKind, GamowState,
    ResonanceSearch, SearchRegion,
};
pub use crate::verification::{
    free_delta_oracle, grid_scan_oracle, parseval_check, rk_oracle, smeared_delta_check, GaussianTest, QuadratureSpec,
    SmearedDeltaReport,
};
