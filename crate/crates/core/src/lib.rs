//! Spin-orbit coupled particle in two-dimensional power-law potentials
//! `V(r) = −ϱ / r^{2k+2}`.
//!
//! The crate covers both sides of the quantum–classical correspondence:
//!
//! - [`classical`]: zero-energy periodic orbits, their numerical integration
//!   and the classical spin precession;
//! - [`gauge`]: the matrix-valued gauge potential and field strength of the
//!   spin-orbit coupling, gauge transformations and loop holonomy;
//! - [`quantum`]: Bessel radial modes, angular modes carrying the spin
//!   phase, the binomial superposition state and its density;
//! - [`qcc`]: ridge extraction and comparison of densities with orbits;
//! - [`special`]: Bessel, Gamma and adaptive quadrature.
//!
//! Units: ħ = M = 1, and the potential strength enters only through the
//! dimensionless combination `2Mϱ/ħ²`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod classical;
pub mod gauge;
pub mod io;
pub mod ode;
pub mod qcc;
pub mod quantum;
pub mod rational;
pub mod special;
