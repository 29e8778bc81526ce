//! Fixed-point reflection schemes: damped specular iteration on the
//! whole time horizon and diffuse iteration chained over time slabs.
//!
//! Both schemes repeatedly solve the inflow problem, feeding each
//! iterate's outgoing trace through the boundary operator to produce
//! the next iterate's incoming data,
//!
//! ```text
//!   specular:  γ₋f_{n+1} = a ℛ γ₊f_n,        γ₋f_0 = 0,
//!   diffuse:   γ₋f_{n+1} = ℳ Υ[f_n] / Φ_h,   γ₋f_0 = 0,
//! ```
//!
//! and measure the boundary defect δ_n: the squared L²(Σ_T, |n·v|)
//! norm of the incoming-data update over the horizon.  For the damped
//! scheme the energy estimate makes the defect sequence contract like
//! a² (squared-norm quotient), which the recorded ratios exhibit.  The
//! diffuse operator contracts only over short enough time slabs, so the
//! slab scheme shortens its slabs (halving τ, at most six times) until
//! the measured quotient drops below 1/2, then chains slabs together.
//!
//! The iterations drive [`crate::solver::step_with_incoming`] directly
//! with the lagged data and apply the genuine boundary operator via
//! [`crate::boundary::apply_boundary`], so a converged iterate is, step
//! for step, the solution the direct solver produces with the same
//! boundary condition; the tests check that coincidence.

use std::error::Error;
use std::fmt;
use std::sync::Arc;

use crate::boundary::{apply_boundary, macroscopic_flux, BoundaryError, BoundarySpec, DiffuseWeight};
use crate::solver::{
    step_with_incoming, CoefficientField, Grid, SolutionField, SolverConfig, SolverError,
};

/// How many times the slab scheme may halve τ before giving up.
const MAX_TAU_HALVINGS: usize = 6;

/// Squared-defect quotient the slab scheme demands before it accepts a
/// slab length.
const SLAB_CONTRACTION_TARGET: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct IterationConfig {
    /// Specular damping factor a ∈ [0, 1); the scheme contracts like a².
    pub damping: f64,
    /// Initial slab length as a fraction of the horizon, τ ∈ (0, 1].
    pub slab_tau: f64,
    /// Fixed-point iterations allowed (per slab, for the slab scheme).
    pub max_iters: usize,
    /// Convergence threshold on the trace norm (not squared) of the
    /// boundary-data update.
    pub defect_tol: f64,
}

impl Default for IterationConfig {
    fn default() -> Self {
        IterationConfig { damping: 0.5, slab_tau: 1.0, max_iters: 60, defect_tol: 1e-9 }
    }
}

impl IterationConfig {
    pub fn validate(&self) -> Result<(), IterationError> {
        if !(0.0..1.0).contains(&self.damping) {
            return Err(IterationError::Config(format!(
                "damping must lie in [0, 1), got {}",
                self.damping
            )));
        }
        if !(self.slab_tau > 0.0 && self.slab_tau <= 1.0) {
            return Err(IterationError::Config(format!(
                "slab fraction must lie in (0, 1], got {}",
                self.slab_tau
            )));
        }
        if self.max_iters == 0 {
            return Err(IterationError::Config("need at least one iteration".to_string()));
        }
        if !(self.defect_tol > 0.0 && self.defect_tol.is_finite()) {
            return Err(IterationError::Config(format!(
                "defect tolerance must be positive, got {}",
                self.defect_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug)]
pub enum IterationError {
    Config(String),
    /// Five consecutive non-decreasing boundary defects.
    Diverged { defects: Vec<f64> },
    /// The slab scheme exhausted its τ halvings without reaching the
    /// contraction target; carries where and what it last measured.
    SlabExhausted { slab: usize, tau: f64, halvings: usize, last_defects: Vec<f64> },
    Solver(SolverError),
}

impl fmt::Display for IterationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IterationError::Config(msg) => write!(f, "iteration configuration: {msg}"),
            IterationError::Diverged { defects } => write!(
                f,
                "boundary defects stopped decreasing for five iterations (last {:?})",
                &defects[defects.len().saturating_sub(5)..]
            ),
            IterationError::SlabExhausted { slab, tau, halvings, .. } => write!(
                f,
                "slab {slab} missed the contraction target after {halvings} halvings (tau = {tau})"
            ),
            IterationError::Solver(e) => write!(f, "inner solve: {e}"),
        }
    }
}

impl Error for IterationError {
    fn source(&self) -> Option<&(dyn Error + 'static)> {
        match self {
            IterationError::Solver(e) => Some(e),
            _ => None,
        }
    }
}

impl From<SolverError> for IterationError {
    fn from(e: SolverError) -> Self {
        IterationError::Solver(e)
    }
}

impl From<BoundaryError> for IterationError {
    fn from(e: BoundaryError) -> Self {
        IterationError::Solver(SolverError::Boundary(e))
    }
}

/// The evolution problem a reflection iteration solves: everything the
/// direct solver needs except the incoming boundary data, which the
/// iteration supplies.
#[derive(Clone)]
pub struct ReflectionProblem {
    pub grid: Grid,
    pub coeffs: CoefficientField,
    pub solver: SolverConfig,
    pub initial: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub t_end: f64,
}

impl ReflectionProblem {
    pub fn new<F>(
        grid: Grid,
        coeffs: CoefficientField,
        solver: SolverConfig,
        initial: F,
        t_end: f64,
    ) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        ReflectionProblem { grid, coeffs, solver, initial: Arc::new(initial), t_end }
    }

    /// Number of steps in the horizon; the horizon must be a whole
    /// number of time steps.
    fn step_count(&self) -> Result<usize, IterationError> {
        let steps = (self.t_end / self.grid.dt).round();
        if steps < 1.0 || (steps * self.grid.dt - self.t_end).abs() > 1e-9 * self.t_end.max(1.0) {
            return Err(IterationError::Config(format!(
                "horizon {} is not a positive whole number of steps of {}",
                self.t_end, self.grid.dt
            )));
        }
        Ok(steps as usize)
    }

    fn initial_values(&self) -> Vec<f64> {
        let init = self.initial.clone();
        SolutionField::new(self.grid.clone(), 0.0, move |x, v| init(x, v)).values().to_vec()
    }
}

/// Defect and norm history of a fixed-point run.  `boundary_defects[n]`
/// is the squared L²(Σ, |n·v|) norm of the incoming-data update
/// produced by iterate n; `volume_defects[n]` is the squared
/// sup-in-time weighted L² distance between iterates n and n+1, one
/// entry shorter.  `ratios()` returns successive defect quotients, the
/// quantity the contraction theory bounds (by a² for damped specular).
#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub boundary_defects: Vec<f64>,
    pub volume_defects: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub final_field: SolutionField,
}

impl IterationTrace {
    pub fn ratios(&self) -> Vec<f64> {
        ratios_of(&self.boundary_defects)
    }
}

fn ratios_of(defects: &[f64]) -> Vec<f64> {
    defects
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
        .collect()
}

/// One accepted slab of the diffuse scheme.
#[derive(Debug, Clone)]
pub struct SlabRun {
    pub slab_index: usize,
    pub t_start: f64,
    pub t_end: f64,
    /// Squared trace-norm defects per iterate, as in [`IterationTrace`].
    pub boundary_defects: Vec<f64>,
    /// Squared sup-in-time ⟨v⟩^q-weighted L² distances between
    /// consecutive iterates (q from the diffuse weight's moment bound).
    pub volume_defects: Vec<f64>,
    /// Time-integrated emitted flux ∫(Υ_left + Υ_right) dt per iterate;
    /// its increments shrink with the defects.
    pub upsilon: Vec<f64>,
}

impl SlabRun {
    pub fn ratios(&self) -> Vec<f64> {
        ratios_of(&self.boundary_defects)
    }
}

/// Outcome of the slab scheme: the τ it settled on, how it got there,
/// per-slab defect histories, and the boundary-identity residual (the
/// trace norm by which the converged data misses γ₋f = 𝒩f, maximized
/// over slabs).
#[derive(Debug, Clone)]
pub struct SlabTrace {
    pub tau: f64,
    pub halvings: usize,
    pub slabs: Vec<SlabRun>,
    pub boundary_identity_residual: f64,
    pub final_field: SolutionField,
}

/// Stagnation guard: five consecutive non-decreasing defects mean the
/// fixed point is making no progress (true divergence, or a tolerance
/// below the attainable floor).  In practice the damped iteration on a
/// fixed horizon is hard to stall: each iterate's data change is
/// supported one boundary round trip deeper into the horizon, so the
/// defects die super-geometrically once the round trips outnumber the
/// horizon, whatever the interior growth.  The guard protects the
/// pathological remainder.
struct DefectMonitor {
    last: Option<f64>,
    streak: usize,
}

impl DefectMonitor {
    fn new() -> Self {
        DefectMonitor { last: None, streak: 0 }
    }

    /// Feeds one defect; true means the sequence has stagnated.
    fn stagnated(&mut self, delta: f64) -> bool {
        if let Some(last) = self.last {
            if delta >= last {
                self.streak += 1;
            } else {
                self.streak = 0;
            }
        }
        self.last = Some(delta);
        self.streak >= 5
    }
}

struct IterateRun {
    next_data: Vec<(Vec<f64>, Vec<f64>)>,
    slices: Vec<Vec<f64>>,
    upsilon: f64,
    final_values: Vec<f64>,
    final_t: f64,
}

/// Solves one iterate over `data.len()` steps from `init_values` at
/// `t0`, applying the lagged incoming data and recording what the true
/// boundary operator would emit at every level (the next iterate's
/// data).
fn solve_iterate(
    grid: &Grid,
    coeffs: &CoefficientField,
    solver: &SolverConfig,
    spec: &BoundarySpec,
    t0: f64,
    init_values: &[f64],
    data: &[(Vec<f64>, Vec<f64>)],
) -> Result<IterateRun, IterationError> {
    let mut f = SolutionField::from_values(grid.clone(), t0, init_values.to_vec());
    let mut next_data = Vec::with_capacity(data.len());
    let mut slices = Vec::with_capacity(data.len());
    let mut upsilon = 0.0;
    for (left, right) in data {
        next_data.push(apply_boundary(spec, &f, f.t)?);
        upsilon += grid.dt
            * (macroscopic_flux(&f, f.t, grid.x_face(0))?
                + macroscopic_flux(&f, f.t, grid.x_face(grid.nx))?);
        f = step_with_incoming(&f, coeffs, solver, left.clone(), right.clone())?;
        slices.push(f.values().to_vec());
    }
    let final_t = f.t;
    Ok(IterateRun { next_data, slices, upsilon, final_values: f.values().to_vec(), final_t })
}

/// Squared L²(Σ, |n·v| dv dt) distance between two incoming-data
/// histories (both faces).
fn trace_defect_sq(g: &Grid, a: &[(Vec<f64>, Vec<f64>)], b: &[(Vec<f64>, Vec<f64>)]) -> f64 {
    let mut total = 0.0;
    for ((al, ar), (bl, br)) in a.iter().zip(b) {
        for j in 0..=g.nv {
            let w = g.v_weight(j) * g.v_node(j).abs();
            let dl = al[j] - bl[j];
            let dr = ar[j] - br[j];
            total += g.dt * w * (dl * dl + dr * dr);
        }
    }
    total
}

/// Squared sup-in-time ⟨v⟩^{2q}-weighted L²(x, v) distance between two
/// slice histories.
fn volume_defect_sq(g: &Grid, a: &[Vec<f64>], b: &[Vec<f64>], q: f64) -> f64 {
    let mut worst = 0.0f64;
    for (sa, sb) in a.iter().zip(b) {
        let mut sum = 0.0;
        for i in 0..g.nx {
            for j in 0..=g.nv {
                let v = g.v_node(j);
                let d = sa[g.index(i, j)] - sb[g.index(i, j)];
                sum += g.hx * g.v_weight(j) * (1.0 + v * v).powf(q) * d * d;
            }
        }
        worst = worst.max(sum);
    }
    worst
}

fn zero_data(g: &Grid, steps: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    vec![(vec![0.0; g.nv + 1], vec![0.0; g.nv + 1]); steps]
}

/// Damped specular fixed point on the whole horizon: iterates
/// γ₋f_{n+1} = a ℛ γ₊f_n from zero data until the boundary defect
/// drops below the tolerance.  Reports divergence after five
/// consecutive non-decreasing defects.  At a = 0 the first iterate is
/// already the solution (the problem is the absorbing one).
pub fn specular_iterate(
    problem: &ReflectionProblem,
    cfg: &IterationConfig,
) -> Result<IterationTrace, IterationError> {
    cfg.validate()?;
    problem.solver.validate()?;
    let g = &problem.grid;
    let steps = problem.step_count()?;
    let spec = BoundarySpec::damped_specular(cfg.damping)?;
    let init_values = problem.initial_values();

    let mut data = zero_data(g, steps);
    let mut boundary_defects: Vec<f64> = Vec::new();
    let mut volume_defects = Vec::new();
    let mut prev_slices: Option<Vec<Vec<f64>>> = None;
    let mut monitor = DefectMonitor::new();
    let mut converged = false;
    let mut final_values = init_values.clone();
    let mut final_t = 0.0;

    for _ in 0..cfg.max_iters {
        let run =
            solve_iterate(g, &problem.coeffs, &problem.solver, &spec, 0.0, &init_values, &data)?;
        let delta = trace_defect_sq(g, &run.next_data, &data);
        if let Some(prev) = &prev_slices {
            volume_defects.push(volume_defect_sq(g, &run.slices, prev, 0.0));
        }
        if delta.sqrt() > cfg.defect_tol && monitor.stagnated(delta) {
            boundary_defects.push(delta);
            return Err(IterationError::Diverged { defects: boundary_defects });
        }
        boundary_defects.push(delta);
        prev_slices = Some(run.slices);
        data = run.next_data;
        final_values = run.final_values;
        final_t = run.final_t;
        if delta.sqrt() <= cfg.defect_tol {
            converged = true;
            break;
        }
    }

    let iterations = boundary_defects.len();
    Ok(IterationTrace {
        boundary_defects,
        volume_defects,
        converged,
        iterations,
        final_field: SolutionField::from_values(g.clone(), final_t, final_values),
    })
}

enum SlabOutcome {
    Accepted { run: SlabRun, final_values: Vec<f64>, final_t: f64 },
    /// Missed the contraction target or the tolerance; carries the
    /// measured defects for diagnostics.
    TooLong { defects: Vec<f64> },
}

#[allow(clippy::too_many_arguments)]
fn run_slab(
    problem: &ReflectionProblem,
    spec: &BoundarySpec,
    q_volume: f64,
    slab_index: usize,
    t_start: f64,
    state: &[f64],
    slab_steps: usize,
    cfg: &IterationConfig,
) -> Result<SlabOutcome, IterationError> {
    let g = &problem.grid;
    let mut data = zero_data(g, slab_steps);
    let mut boundary_defects: Vec<f64> = Vec::new();
    let mut volume_defects = Vec::new();
    let mut upsilon = Vec::new();
    let mut prev_slices: Option<Vec<Vec<f64>>> = None;
    let mut monitor = DefectMonitor::new();
    let mut result: Option<(Vec<f64>, f64)> = None;

    for _ in 0..cfg.max_iters {
        let run = solve_iterate(g, &problem.coeffs, &problem.solver, spec, t_start, state, &data)?;
        let delta = trace_defect_sq(g, &run.next_data, &data);
        if let Some(prev) = &prev_slices {
            volume_defects.push(volume_defect_sq(g, &run.slices, prev, q_volume));
        }
        if delta.sqrt() > cfg.defect_tol && monitor.stagnated(delta) {
            boundary_defects.push(delta);
            return Ok(SlabOutcome::TooLong { defects: boundary_defects });
        }
        boundary_defects.push(delta);
        upsilon.push(run.upsilon);
        prev_slices = Some(run.slices);
        data = run.next_data;
        if delta.sqrt() <= cfg.defect_tol {
            result = Some((run.final_values, run.final_t));
            break;
        }
    }

    let Some((final_values, final_t)) = result else {
        return Ok(SlabOutcome::TooLong { defects: boundary_defects });
    };

    // contraction gate: quotients of defects still above the
    // convergence floor must sit below the target, from the second
    // quotient on (the first mixes in the zero-data start)
    let floor = (10.0 * cfg.defect_tol).powi(2);
    for (n, pair) in boundary_defects.windows(2).enumerate() {
        if n >= 1 && pair[0] > floor && pair[1] / pair[0] > SLAB_CONTRACTION_TARGET {
            return Ok(SlabOutcome::TooLong { defects: boundary_defects });
        }
    }

    Ok(SlabOutcome::Accepted {
        run: SlabRun {
            slab_index,
            t_start,
            t_end: final_t,
            boundary_defects,
            volume_defects,
            upsilon,
        },
        final_values,
        final_t,
    })
}

/// Diffuse fixed point chained over time slabs: within each slab,
/// iterate γ₋f_{n+1} = ℳ Υ[f_n]/Φ_h to convergence, then use the
/// converged terminal slice as the next slab's initial data.  The slab
/// fraction τ is halved (at most six times, globally) whenever a slab
/// misses the tolerance or its defect quotients exceed 1/2, so the τ
/// the trace reports is one at which the measured contraction is at
/// most 1/2.
pub fn diffuse_slab_iterate(
    problem: &ReflectionProblem,
    weight: &DiffuseWeight,
    cfg: &IterationConfig,
) -> Result<SlabTrace, IterationError> {
    cfg.validate()?;
    problem.solver.validate()?;
    let g = &problem.grid;
    let total_steps = problem.step_count()?;
    let spec = BoundarySpec::Diffuse(weight.clone());
    let q_volume = weight.moment_q;

    let mut tau = cfg.slab_tau;
    let mut halvings = 0usize;
    let mut slabs: Vec<SlabRun> = Vec::new();
    let mut state = problem.initial_values();
    let mut t_cursor = 0.0;
    let mut steps_done = 0usize;
    let mut identity_residual = 0.0f64;

    while steps_done < total_steps {
        let slab_steps = ((tau * total_steps as f64).round() as usize)
            .max(1)
            .min(total_steps - steps_done);
        match run_slab(problem, &spec, q_volume, slabs.len(), t_cursor, &state, slab_steps, cfg)? {
            SlabOutcome::Accepted { run, final_values, final_t } => {
                if let Some(&last) = run.boundary_defects.last() {
                    identity_residual = identity_residual.max(last.sqrt());
                }
                slabs.push(run);
                state = final_values;
                t_cursor = final_t;
                steps_done += slab_steps;
            }
            SlabOutcome::TooLong { defects } => {
                if halvings >= MAX_TAU_HALVINGS {
                    return Err(IterationError::SlabExhausted {
                        slab: slabs.len(),
                        tau,
                        halvings,
                        last_defects: defects,
                    });
                }
                halvings += 1;
                tau *= 0.5;
            }
        }
    }

    Ok(SlabTrace {
        tau,
        halvings,
        slabs,
        boundary_identity_residual: identity_residual,
        final_field: SolutionField::from_values(g.clone(), t_cursor, state),
    })
}
