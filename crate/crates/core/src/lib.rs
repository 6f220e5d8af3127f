//! Vortex-cross solutions of the scalar and two-component discrete nonlinear
//! Schrödinger lattice near the anti-continuum limit.
//!
//! The crate is organised around the computation pipeline:
//!
//! * [`lattice`] holds the grid, the contour shells around the vortex cross and
//!   the field storage.
//! * [`stationary`] solves the stationary equations by Newton continuation in
//!   the coupling and builds the perturbation series used as reference fields.
//! * [`spectrum`] linearizes about a stationary state, computes the stability
//!   spectrum with Krein signatures, tracks eigenvalues along a branch and
//!   locates Hamiltonian–Hopf collisions.
//! * [`lsred`] evaluates the closed-form reductions: bifurcation functions,
//!   reduction matrices and small-eigenvalue asymptotics.

pub mod error;
pub mod lattice;
mod linearize;
pub mod lsred;
pub mod sparse;
pub mod spectrum;
pub mod stationary;

pub use error::{Result, VortexError};
pub use lattice::{
    anti_continuum_seed, build_contours, ChargePair, ContourSet, GridShape, Hopping, LatticeField, Model, Node,
    VortexSpec,
};
pub use num_complex::Complex64;
