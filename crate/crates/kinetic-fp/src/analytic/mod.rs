//! Special functions and closed-form reference solutions.
//!
//! The centerpiece is the steady half-space benchmark
//!
//! ```text
//!     v ∂x f = ∂v² f   on x > 0,  f(0, v) = 0 for v > 0,
//! ```
//!
//! solved exactly by `f(x,v) = x^{1/6} Ψ(−v³/(9x))` with Ψ a fixed
//! combination of confluent hypergeometric functions. Everything here is
//! deterministic, allocation-free in the hot paths, and validated against
//! high-precision reference tables generated with an independent
//! arbitrary-precision implementation.

mod dd;
mod gamma;
mod kummer;
mod manufactured;
mod steady;

pub use gamma::gamma;
pub use kummer::{kummer_m, tricomi_psi, KummerParams, SpecialError};
pub use manufactured::{
    manufactured_solution, Field3, ManufacturedCase, UnknownManufactured, REGISTRY_NAMES,
};
pub use steady::{steady_solution, SteadyBenchmark, SteadyDerivatives};
