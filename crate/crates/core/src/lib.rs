//! Numerical toolkit for bipartite bound-entanglement activation studies:
//! subsystem-aware dense complex linear algebra, Werner and pentagon-UPB
//! state constructors, partial-transpose entanglement criteria, a
//! Schmidt-rank-2 distillability witness, and a rank-constrained see-saw
//! optimizer.

pub mod criteria;
pub mod error;
pub mod layout;
pub mod operator;
pub mod optimizer;
pub mod states;
pub mod verification;
pub mod witness;

pub use error::{BekError, Result};
pub use layout::{Party, SubsystemLayout};
pub use operator::{Ket, Operator};

/// Maximum tolerated Hermiticity deviation, max-entry |X - X^dag|.
pub const TOL_HERM: f64 = 1e-10;
/// Maximum tolerated trace deviation for density matrices.
pub const TOL_TRACE: f64 = 1e-10;
/// Eigenvalues above -TOL_PSD count as nonnegative.
pub const TOL_PSD: f64 = 1e-9;
/// Maximum tolerated eigenpair residual ||A v - lambda v||.
pub const TOL_EIG: f64 = 1e-10;
