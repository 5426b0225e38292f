//! Discrete energy laws of Runge-Kutta methods for linear seminegative
//! systems `du/dt = Lu`.
//!
//! The crate derives, for any rational stability function
//! `R(Z) = Q(Z)^{-1} P(Z)`, the exact coefficients of the per-step energy
//! identity, its shifted Cholesky-type decomposition, and the resulting
//! stability classification. It also provides the unified closed forms for
//! diagonal Pade approximations, the series expansion of the continuous
//! energy law, and a floating-point simulator that checks measured against
//! theoretical energy dissipation on concrete systems.
//!
//! Module map:
//! - [`exactnum`]: big-rational scalars, combinatorics, exact `U^T D U`
//!   factorization of symmetric rational matrices.
//! - [`methods`]: stability-function constructors (Pade, Taylor, Butcher
//!   tableaus) and the built-in method registry.
//! - [`energy`]: energy coefficients (alpha, beta, gamma), shifted
//!   decomposition, stability classification, identity rendering.
//! - [`pade`]: closed-form diagonal Pade quantities and exact identity
//!   verifiers.
//! - [`continuum`]: series expansion of the continuous energy law and the
//!   Hilbert-matrix decomposition behind it.
//! - [`simulator`]: double-precision time stepping, energy traces, and the
//!   convergence harness.

pub mod continuum;
pub mod energy;
pub mod exactnum;
pub mod methods;
pub mod pade;
pub mod simulator;

pub use energy::{Classification, EnergyCoefficients, EnergyDecomposition, StabilityReport};
pub use exactnum::{Rational, RationalMatrix};
pub use methods::{ButcherTableau, StabilityFunction};
pub use simulator::{EnergyTrace, SeminegativeSystem};
