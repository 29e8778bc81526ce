//! Finite-volume IMEX discretization of the kinetic Fokker-Planck
//! equation
//!
//! ```text
//!   (∂t + v·∇x) f = ∇v·(A ∇v f) + B·∇v f + c f + s
//! ```
//!
//! on an interval in position times a truncated velocity box, with the
//! boundary operators from [`crate::boundary`] closing the incoming
//! traces.  Transport in x is explicit first-order upwind (monotone
//! under the CFL bound), the velocity operator is implicit (tridiagonal
//! per position line), so the overall step preserves the maximum
//! principle for c ≤ 0 and tracks mass and weighted-energy ledgers per
//! step.

mod coeffs;
mod field;
mod grid;
mod scheme;

pub use coeffs::{CoefficientError, CoefficientField, SampleBox};
pub use field::{LedgerRecord, SolutionField, StepRecord, TraceSet};
pub use grid::{Grid, GridError, CFL_DEFAULT};
pub use scheme::{
    energy_ledger, mirror_coefficients, mirror_extended_field, step, step_viscous,
    step_with_incoming, Scheme, SolverConfig, SolverError, VBox,
};
