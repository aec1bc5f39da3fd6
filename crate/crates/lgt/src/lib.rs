//! Numerical toolkit for U(N) lattice gauge theory on the box `{0,…,n-1}^d`:
//! exact lattice combinatorics, the lattice Maxwell quadratic form and its
//! log-determinant constant `K_{n,d}`, Haar-measure small-ball asymptotics,
//! the Wilson action with axial gauge fixing, and Monte Carlo free-energy
//! estimation by thermodynamic integration.

pub(crate) mod band;
pub mod bessel;
pub mod error;
pub mod gauge;
pub mod lattice;
pub mod linalg;
pub mod maxwell;
pub mod montecarlo;
pub mod report;
pub mod unitary;
pub mod verify;

pub use error::{Error, Result};

/// Tolerance ladder used across the crate: construction invariants at
/// `1e-12`, algebraic identities at `1e-10`, and accumulated `n^d`-term
/// action identities at `1e-8`.
pub mod tol {
    pub const CONSTRUCTION: f64 = 1e-12;
    pub const ALGEBRAIC: f64 = 1e-10;
    pub const ACCUMULATED: f64 = 1e-8;
}
