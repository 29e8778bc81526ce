//! Kinetic Fokker-Planck equations on bounded spatial domains.
//!
//! The crate simulates densities f(t,x,v) governed by
//!
//! ```text
//!   (∂t + v·∇x) f = ∇v·(A ∇v f) + B·∇v f + c f + s
//! ```
//!
//! with uniformly elliptic A and bounded B, c, closed on the spatial
//! boundary by one of three operators: prescribed inflow, diffuse
//! (Maxwellian) reflection, or (damped) specular reflection.  Diffusion
//! acts only in velocity; regularity still propagates to (t,x) through
//! the transport commutator, and the crate's diagnostics measure that
//! hypoelliptic gain empirically.
//!
//! Main pieces:
//!
//! * [`analytic`] — Kummer/Tricomi confluent hypergeometric functions and
//!   the explicit steady half-space benchmark f(x,v) = x^(1/6) Ψ(−v³/9x),
//!   plus manufactured solutions for order verification.
//! * [`geometry`] — bounded domains (interval, disk, epigraph), outward
//!   normals, boundary-flattening charts, and the mirror reflection.
//! * [`transforms`] — the kinetic scaling group, kinetic cylinders, and
//!   the weighted-moment coefficient transform.
//! * [`boundary`] — phase-boundary classification and the three boundary
//!   operators with the boundary Maxwellian and macroscopic flux.
//! * [`solver`] — monotone IMEX upwind discretization in d=1, viscous
//!   (Robin-closed) variant, energy/mass ledgers, traces, and the
//!   specular mirror extension.
//! * [`iteration`] — damped specular and time-slab diffuse fixed-point
//!   schemes with measured contraction.
//! * [`diagnostics`] — kinetic Hölder seminorms, oscillation decay over
//!   shrinking cylinders, boundary exponent fits, verdict reports.
//! * [`config`], [`driver`], [`report`] — batch front end used by the
//!   `kfp` binary (subcommands `run`, `verify`, `tabulate-special`,
//!   `holder-probe`).
//!
//! Everything is deterministic: fixed seeds drive all randomized checks
//! and output files carry the config hash they were produced from.

pub mod analytic;
pub mod boundary;
pub mod config;
pub mod diagnostics;
pub mod driver;
pub mod expr;
pub mod geometry;
pub mod iteration;
pub mod report;
pub mod solver;
pub mod transforms;

pub use analytic::{kummer_m, steady_solution, tricomi_psi, SteadyBenchmark};
pub use boundary::{
    apply_boundary, boundary_maxwellian, classify, macroscopic_flux, specular, BoundaryClass,
    BoundaryClassTag, BoundaryError, BoundaryMeasure, BoundarySpec, DiffuseWeight,
};
pub use config::{
    load_config, parse_config, BoundaryVariant, CoeffPreset, CoeffSpec, ConfigError, DataSpec,
    Probe, RunConfig, VProfile,
};
pub use diagnostics::{
    fit_boundary_exponents, fit_log_log, holder_seminorm, kinetic_distance, oscillation_decay,
    verdict, BoundaryFit, CheckRecord, DiagnosticsError, DiagnosticsReport, ExponentFit,
    HolderProbe, LatticeField, SampleRegion, ScaleLadder,
};
pub use driver::{
    acceptance_checks, benchmark_value, holder_probe_file, read_field_csv, run, tabulate_special,
    verify, AcceptanceCheck, DriverError, RunOutcome, TabulateSpec, SUITES,
};
pub use expr::{Expr, ExprError};
pub use geometry::{mirror_reflect, DomainGeometry, FlatteningChart, GeometryError};
pub use iteration::{
    diffuse_slab_iterate, specular_iterate, IterationConfig, IterationError, IterationTrace,
    ReflectionProblem, SlabRun, SlabTrace,
};
pub use solver::{
    energy_ledger, mirror_extended_field, step, step_viscous, CoefficientField, Grid,
    LedgerRecord, SampleBox, Scheme, SolutionField, SolverConfig, SolverError, VBox,
};
pub use transforms::{
    scale_map, scale_map_inverse, scaled_coefficients, weighted_coefficients, KineticCylinder,
    PhaseState, WeightSpec, WeightedCoefficients,
};
