//! Integrability analysis and closed-form propagators for time-dependent
//! su(2) spin Hamiltonians `H(t) = B(t) . S`.
//!
//! The crate decides whether a driving field `B(t)` admits a transformation,
//! confined to a one-parameter subset of SU(2), onto the trivially solvable
//! Hamiltonian `D(t) S_z`. When it does, it constructs the exact propagator
//! `U(t) = W(t) exp(-i Theta(t) S_z) W(0)^{-1}` in any finite spin-j
//! representation, and validates it against independent numerical
//! integrators of the Schroedinger equation.
//!
//! Module map:
//! - [`su2`]: the group SU(2) in real coordinates, its algebra, exp/log,
//!   adjoint action.
//! - [`spinrep`]: spin-j operator matrices, Hamiltonian assembly, Hermitian
//!   matrix exponentials, the group representation.
//! - [`fields`]: time-dependent field specifications and their polar
//!   decomposition.
//! - [`liesys`]: the right-invariant group equation and the 4-dimensional
//!   transformation system connecting two such equations.
//! - [`integrability`]: the gamma/D conditions, connecting curves, and
//!   closed-form propagators.
//! - [`oracle`]: independent RK4 and exponential-midpoint integrators plus
//!   comparison metrics; the ground truth for every closed form.

pub mod error;
pub mod fields;
pub mod grid;
pub mod integrability;
pub mod liesys;
pub mod oracle;
pub mod spinrep;
pub mod su2;

pub use error::{Error, Result};
pub use grid::TimeGrid;
