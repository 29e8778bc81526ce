//! The time step: explicit upwind transport, implicit velocity
//! operator, optional implicit x-viscosity with Robin inflow closure.
//!
//! One step of size Δt from time t advances
//!
//! ```text
//!   transport:  f* = f − Δt v ∂x f        (first-order upwind, explicit)
//!   collision:  (I − Δt L_v) f' = f* + Δt s   (tridiagonal per cell)
//!   viscosity:  (I − Δt ε ∂xx) f'' = f'   (parabolic scheme only)
//! ```
//!
//! with L_v f = ∂v(a ∂v f) + b ∂v f + c f discretized conservatively at
//! velocity half-nodes.  The drift uses centered differences where
//! |b| h_v ≤ 2 min(a₋, a₊) and one-sided differences elsewhere, so the
//! implicit matrix is an M-matrix regardless of the drift size and the
//! step is monotone: the discrete maximum principle holds for c ≤ 0
//! without a time-step restriction from b.
//!
//! Boundary data enters the transport upwind stencil as the face value
//! for incoming velocities; it is produced by
//! [`crate::boundary::apply_boundary`] at the old time level.  Under
//! the parabolic scheme the face value solves the Robin condition
//! ε ∂n f + (n·v)₋ (f − g) = 0 instead, which recovers the plain
//! inflow value
//! as ε → 0 and zero-order extrapolation where no data applies.

use std::fmt;
use std::sync::Arc;

use crate::boundary::{apply_boundary, BoundaryError, BoundarySpec};
use crate::transforms::PhaseState;

use super::coeffs::CoefficientField;
use super::field::{LedgerRecord, SolutionField, StepRecord};
use super::grid::{Grid, CFL_DEFAULT};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Explicit upwind transport plus implicit velocity operator.
    ImexUpwind,
    /// Same, plus an implicit ε ∂xx regularization in position with the
    /// inflow condition relaxed to a Robin condition.
    ViscousParabolic,
}

/// Dirichlet closure at the velocity-box ends v = ±V.  `Zero` truncates
/// (correct when the solution is negligible at |v| = V); `Data` pins the
/// ends to a known profile, which keeps manufactured and benchmark
/// solutions exact at the box.
#[derive(Clone)]
pub enum VBox {
    Zero,
    Data(Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for VBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VBox::Zero => f.write_str("Zero"),
            VBox::Data(_) => f.write_str("Data(..)"),
        }
    }
}

impl VBox {
    pub fn data<F>(g: F) -> Self
    where
        F: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        VBox::Data(Arc::new(g))
    }

    fn eval(&self, t: f64, x: f64, v: f64) -> f64 {
        match self {
            VBox::Zero => 0.0,
            VBox::Data(g) => g(t, x, v),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub scheme: Scheme,
    /// Position-diffusion strength for the parabolic scheme.
    pub epsilon: f64,
    /// Relative residual target for the implicit tridiagonal solves.
    pub implicit_tol: f64,
    /// Iterative-refinement sweeps allowed before an implicit solve is
    /// declared failed.
    pub max_refine: usize,
    pub cfl_limit: f64,
    pub vbox: VBox,
}

impl SolverConfig {
    pub fn imex() -> Self {
        SolverConfig {
            scheme: Scheme::ImexUpwind,
            epsilon: 0.0,
            implicit_tol: 1e-12,
            max_refine: 4,
            cfl_limit: CFL_DEFAULT,
            vbox: VBox::Zero,
        }
    }

    pub fn viscous(epsilon: f64) -> Self {
        SolverConfig { scheme: Scheme::ViscousParabolic, epsilon, ..SolverConfig::imex() }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.implicit_tol > 0.0 && self.implicit_tol.is_finite()) {
            return Err(SolverError::Config(format!(
                "implicit solve tolerance must be positive, got {}",
                self.implicit_tol
            )));
        }
        if !(self.cfl_limit > 0.0 && self.cfl_limit.is_finite()) {
            return Err(SolverError::Config(format!(
                "CFL limit must be positive, got {}",
                self.cfl_limit
            )));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(SolverError::Config(format!(
                "viscosity must be non-negative, got {}",
                self.epsilon
            )));
        }
        if self.scheme == Scheme::ViscousParabolic && self.epsilon <= 0.0 {
            return Err(SolverError::Config(
                "the parabolic scheme needs epsilon > 0; use the plain scheme at epsilon = 0"
                    .to_string(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug)]
pub enum SolverError {
    Config(String),
    Cfl { ratio: f64, limit: f64 },
    /// A tridiagonal solve missed the residual target after the
    /// configured refinement sweeps.
    ImplicitSolve { residual: f64, tol: f64 },
    /// Ledger recomputation needs the last step's record.
    TracesMissing,
    /// Mirror extension requires an exactly specular boundary.
    NonSpecular,
    Boundary(BoundaryError),
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::Config(msg) => write!(f, "solver configuration: {msg}"),
            SolverError::Cfl { ratio, limit } => {
                write!(f, "CFL violated at step time: dt*V/h_x = {ratio} exceeds {limit}")
            }
            SolverError::ImplicitSolve { residual, tol } => write!(
                f,
                "implicit solve stalled at relative residual {residual} (target {tol})"
            ),
            SolverError::TracesMissing => {
                f.write_str("no step record on this field; advance it once to produce traces")
            }
            SolverError::NonSpecular => f.write_str(
                "mirror extension needs a specular boundary (or damped specular with a = 1)",
            ),
            SolverError::Boundary(e) => write!(f, "boundary operator: {e}"),
        }
    }
}

impl std::error::Error for SolverError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            SolverError::Boundary(e) => Some(e),
            _ => None,
        }
    }
}

impl From<BoundaryError> for SolverError {
    fn from(e: BoundaryError) -> Self {
        SolverError::Boundary(e)
    }
}

fn linf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, &x| m.max(x.abs()))
}

/// Plain elimination on a tridiagonal system; `None` on a vanishing
/// pivot (cannot happen for the M-matrices assembled here, guarded
/// anyway).
fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot.abs() < 1e-300 {
        return None;
    }
    c[0] = sup[0] / pivot;
    x[0] = rhs[0] / pivot;
    for k in 1..n {
        pivot = diag[k] - sub[k] * c[k - 1];
        if pivot.abs() < 1e-300 {
            return None;
        }
        c[k] = sup[k] / pivot;
        x[k] = (rhs[k] - sub[k] * x[k - 1]) / pivot;
    }
    for k in (0..n - 1).rev() {
        x[k] -= c[k] * x[k + 1];
    }
    Some(x)
}

/// Tridiagonal solve with iterative refinement: accepts once the
/// residual drops below tol·(1 + ‖rhs‖∞), refines up to `max_refine`
/// times otherwise, and reports the stalled residual as an error after
/// that.  This is what the configured tolerance and sweep budget mean
/// operationally.
fn solve_refined(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    rhs: &[f64],
    tol: f64,
    max_refine: usize,
) -> Result<Vec<f64>, SolverError> {
    let n = diag.len();
    let fail = |r: f64| SolverError::ImplicitSolve { residual: r, tol };
    let mut x = thomas(sub, diag, sup, rhs).ok_or_else(|| fail(f64::INFINITY))?;
    let target = tol * (1.0 + linf(rhs));
    let mut res = vec![0.0; n];
    for sweep in 0..=max_refine {
        for k in 0..n {
            let mut ax = diag[k] * x[k];
            if k > 0 {
                ax += sub[k] * x[k - 1];
            }
            if k + 1 < n {
                ax += sup[k] * x[k + 1];
            }
            res[k] = rhs[k] - ax;
        }
        let rmax = linf(&res);
        if rmax <= target {
            return Ok(x);
        }
        if sweep == max_refine {
            return Err(fail(rmax));
        }
        let delta = thomas(sub, diag, sup, &res).ok_or_else(|| fail(rmax))?;
        for k in 0..n {
            x[k] += delta[k];
        }
    }
    unreachable!("refinement loop returns on its last sweep");
}

fn check_cfl(g: &Grid, cfg: &SolverConfig) -> Result<(), SolverError> {
    let ratio = g.dt * g.vmax / g.hx;
    if ratio > cfg.cfl_limit * (1.0 + 1e-12) {
        return Err(SolverError::Cfl { ratio, limit: cfg.cfl_limit });
    }
    Ok(())
}

/// Advances one step of `f.grid().dt`, producing the incoming boundary
/// data from `spec` at the old time level.  Dispatches on the
/// configured scheme.
pub fn step(
    f: &SolutionField,
    coeffs: &CoefficientField,
    spec: &BoundarySpec,
    cfg: &SolverConfig,
) -> Result<SolutionField, SolverError> {
    cfg.validate()?;
    check_cfl(f.grid(), cfg)?;
    let (left, right) = apply_boundary(spec, f, f.t)?;
    step_with_incoming(f, coeffs, cfg, left, right)
}

/// The ε-regularized step; requires the parabolic scheme (and hence
/// ε > 0).  [`step`] dispatches here automatically when the config says
/// so, this entry point just refuses to run un-regularized.
pub fn step_viscous(
    f: &SolutionField,
    coeffs: &CoefficientField,
    spec: &BoundarySpec,
    cfg: &SolverConfig,
) -> Result<SolutionField, SolverError> {
    cfg.validate()?;
    if cfg.scheme != Scheme::ViscousParabolic {
        return Err(SolverError::Config(
            "viscous stepping requires the parabolic scheme".to_string(),
        ));
    }
    step(f, coeffs, spec, cfg)
}

/// One step with the incoming boundary data supplied directly (one
/// value per velocity node and face, zeros at non-incoming nodes).
/// This is the primitive the reflection iterations drive with lagged
/// trace data; [`step`] wraps it with the boundary operator.
pub fn step_with_incoming(
    f: &SolutionField,
    coeffs: &CoefficientField,
    cfg: &SolverConfig,
    incoming_left: Vec<f64>,
    incoming_right: Vec<f64>,
) -> Result<SolutionField, SolverError> {
    cfg.validate()?;
    let g = f.grid().clone();
    check_cfl(&g, cfg)?;
    let nv1 = g.nv + 1;
    assert_eq!(incoming_left.len(), nv1, "incoming trace length mismatch");
    assert_eq!(incoming_right.len(), nv1, "incoming trace length mismatch");
    let dt = g.dt;
    let t_old = f.t;
    let t_new = t_old + dt;
    let old = f.values();

    // explicit upwind transport; incoming face values are the data,
    // or its Robin relaxation under the parabolic scheme
    let robin_kappa = match cfg.scheme {
        Scheme::ImexUpwind => None,
        Scheme::ViscousParabolic => Some(2.0 * cfg.epsilon / g.hx),
    };
    let mut star = old.to_vec();
    for j in 0..nv1 {
        let v = g.v_node(j);
        if v == 0.0 {
            continue;
        }
        let cfl = dt * v / g.hx;
        if v > 0.0 {
            let face = match robin_kappa {
                None => incoming_left[j],
                Some(k) => (k * old[g.index(0, j)] + v * incoming_left[j]) / (k + v),
            };
            for i in (0..g.nx).rev() {
                let upstream = if i == 0 { face } else { old[g.index(i - 1, j)] };
                star[g.index(i, j)] = old[g.index(i, j)] - cfl * (old[g.index(i, j)] - upstream);
            }
        } else {
            let beta = -v;
            let face = match robin_kappa {
                None => incoming_right[j],
                Some(k) => (k * old[g.index(g.nx - 1, j)] + beta * incoming_right[j]) / (k + beta),
            };
            for i in 0..g.nx {
                let downstream = if i + 1 == g.nx { face } else { old[g.index(i + 1, j)] };
                star[g.index(i, j)] =
                    old[g.index(i, j)] - cfl * (downstream - old[g.index(i, j)]);
            }
        }
    }

    // implicit velocity operator, one tridiagonal system per cell
    let mut new_data = vec![0.0; g.len()];
    let mut sub = vec![0.0; nv1];
    let mut diag = vec![0.0; nv1];
    let mut sup = vec![0.0; nv1];
    let mut rhs = vec![0.0; nv1];
    let hv = g.hv;
    for i in 0..g.nx {
        let x = g.x_center(i);
        // diffusion coefficient at velocity half-nodes
        let mut ah = vec![0.0; g.nv];
        for (j, a) in ah.iter_mut().enumerate() {
            let vh = 0.5 * (g.v_node(j) + g.v_node(j + 1));
            *a = coeffs.a(&PhaseState::new_1d(t_new, x, vh))[0][0];
        }
        sub[0] = 0.0;
        diag[0] = 1.0;
        sup[0] = 0.0;
        rhs[0] = cfg.vbox.eval(t_new, x, g.v_node(0));
        sub[g.nv] = 0.0;
        diag[g.nv] = 1.0;
        sup[g.nv] = 0.0;
        rhs[g.nv] = cfg.vbox.eval(t_new, x, g.v_node(g.nv));
        for j in 1..g.nv {
            let v = g.v_node(j);
            let z = PhaseState::new_1d(t_new, x, v);
            let b = coeffs.b(&z)[0];
            let c = coeffs.c(&z);
            let s = coeffs.s(&z);
            let am = ah[j - 1];
            let ap = ah[j];
            // hybrid drift: centered while the cell Peclet number
            // allows an M-matrix, one-sided otherwise
            let (d_sub, d_diag, d_sup) = if b.abs() * hv <= 2.0 * am.min(ap) {
                (-b / (2.0 * hv), 0.0, b / (2.0 * hv))
            } else if b > 0.0 {
                (0.0, -b / hv, b / hv)
            } else {
                (-b / hv, b / hv, 0.0)
            };
            sub[j] = -dt * (am / (hv * hv) + d_sub);
            diag[j] = 1.0 + dt * (am + ap) / (hv * hv) - dt * d_diag - dt * c;
            sup[j] = -dt * (ap / (hv * hv) + d_sup);
            rhs[j] = star[g.index(i, j)] + dt * s;
        }
        let solved = solve_refined(&sub, &diag, &sup, &rhs, cfg.implicit_tol, cfg.max_refine)?;
        for j in 0..nv1 {
            new_data[g.index(i, j)] = solved[j];
        }
    }

    // implicit position diffusion with Robin flux closure
    if cfg.scheme == Scheme::ViscousParabolic {
        let eps = cfg.epsilon;
        let kappa = 2.0 * eps / g.hx;
        let lam = dt * eps / (g.hx * g.hx);
        let mut xsub = vec![0.0; g.nx];
        let mut xdiag = vec![0.0; g.nx];
        let mut xsup = vec![0.0; g.nx];
        let mut xrhs = vec![0.0; g.nx];
        for j in 0..nv1 {
            let v = g.v_node(j);
            // (n·v)₋ per face; zero at outgoing and grazing nodes, so
            // those see a homogeneous Neumann face
            let beta_l = v.max(0.0);
            let beta_r = (-v).max(0.0);
            let gamma_l = kappa * beta_l / (kappa + beta_l);
            let gamma_r = kappa * beta_r / (kappa + beta_r);
            for i in 0..g.nx {
                xsub[i] = -lam;
                xdiag[i] = 1.0 + 2.0 * lam;
                xsup[i] = -lam;
                xrhs[i] = new_data[g.index(i, j)];
            }
            xsub[0] = 0.0;
            xdiag[0] = 1.0 + lam + dt * gamma_l / g.hx;
            xrhs[0] += dt * gamma_l * incoming_left[j] / g.hx;
            xsup[g.nx - 1] = 0.0;
            xdiag[g.nx - 1] = 1.0 + lam + dt * gamma_r / g.hx;
            xrhs[g.nx - 1] += dt * gamma_r * incoming_right[j] / g.hx;
            let solved =
                solve_refined(&xsub, &xdiag, &xsup, &xrhs, cfg.implicit_tol, cfg.max_refine)?;
            for i in 0..g.nx {
                new_data[g.index(i, j)] = solved[i];
            }
        }
    }

    let record = StepRecord {
        prev: old.to_vec(),
        incoming_left,
        incoming_right,
        coeffs: coeffs.clone(),
        dt,
        t_old,
    };
    let step_index = f.step_index() + 1;
    let entry = compute_ledger(&g, &record, &new_data, step_index, t_new, 0.0);
    Ok(SolutionField::from_step(
        g,
        t_new,
        new_data,
        step_index,
        record,
        f.ledger().to_vec(),
        entry,
    ))
}

/// Weighted energy balance of the last step at moment weight q,
/// recomputed from the stored step record.
pub fn energy_ledger(f: &SolutionField, q: f64) -> Result<LedgerRecord, SolverError> {
    let rec = f.last_step().ok_or(SolverError::TracesMissing)?;
    Ok(compute_ledger(f.grid(), rec, f.values(), f.step_index(), f.t, q))
}

/// Quadratures for every ledger term; the scheme's own step entry and
/// [`energy_ledger`] share this.  All volume terms are evaluated on the
/// new slice (implicit-Euler consistency), boundary terms use the
/// applied incoming data and the old outgoing restriction, so the
/// residual measures the balance the discretization actually achieves
/// and shrinks at first order under refinement.
fn compute_ledger(
    g: &Grid,
    rec: &StepRecord,
    new: &[f64],
    step: u64,
    t: f64,
    q: f64,
) -> LedgerRecord {
    let dt = rec.dt;
    let t_new = rec.t_old + dt;
    let weight = |v: f64| (1.0 + v * v).powf(q);
    let dweight = |v: f64| 2.0 * q * v * (1.0 + v * v).powf(q - 1.0);

    let mut mass = 0.0;
    let mut weighted_l2_sq = 0.0;
    let mut energy_old = 0.0;
    for i in 0..g.nx {
        for j in 0..=g.nv {
            let v = g.v_node(j);
            let wq = weight(v);
            let fold = rec.prev[g.index(i, j)];
            let fnew = new[g.index(i, j)];
            let cell = g.hx * g.v_weight(j);
            mass += cell * fnew;
            weighted_l2_sq += cell * fnew * fnew * wq;
            energy_old += cell * fold * fold * wq;
        }
    }
    let energy_delta = weighted_l2_sq - energy_old;

    // boundary terms: outgoing values by restriction of the old slice,
    // incoming values as applied by the step
    let mut mass_flux_net = 0.0;
    let mut boundary_flux_sq = 0.0;
    for j in 0..=g.nv {
        let v = g.v_node(j);
        let w = g.v_weight(j);
        let wq = weight(v);
        let gamma_left =
            if v > 0.0 { rec.incoming_left[j] } else { rec.prev[g.index(0, j)] };
        let gamma_right =
            if v < 0.0 { rec.incoming_right[j] } else { rec.prev[g.index(g.nx - 1, j)] };
        // net inflow: v·γ at the left face, −v·γ at the right face
        mass_flux_net += w * (v * gamma_left - v * gamma_right);
        // (n·v)(γf)²: n·v = −v on the left face, +v on the right
        boundary_flux_sq +=
            w * wq * (-v * gamma_left * gamma_left + v * gamma_right * gamma_right);
    }
    mass_flux_net *= dt;

    // volume terms on the new slice
    let mut dissipation = 0.0;
    let mut drift_term = 0.0;
    let mut zeroth_term = 0.0;
    let mut source_term = 0.0;
    for i in 0..g.nx {
        let x = g.x_center(i);
        for j in 0..g.nv {
            let vh = 0.5 * (g.v_node(j) + g.v_node(j + 1));
            let a = rec.coeffs.a(&PhaseState::new_1d(t_new, x, vh))[0][0];
            let df = (new[g.index(i, j + 1)] - new[g.index(i, j)]) / g.hv;
            dissipation += 2.0 * g.hx * g.hv * a * df * df * weight(vh);
        }
        for j in 0..=g.nv {
            let v = g.v_node(j);
            let z = PhaseState::new_1d(t_new, x, v);
            let fnew = new[g.index(i, j)];
            let dvf = if j == 0 {
                (new[g.index(i, 1)] - new[g.index(i, 0)]) / g.hv
            } else if j == g.nv {
                (new[g.index(i, g.nv)] - new[g.index(i, g.nv - 1)]) / g.hv
            } else {
                (new[g.index(i, j + 1)] - new[g.index(i, j - 1)]) / (2.0 * g.hv)
            };
            let cell = g.hx * g.v_weight(j);
            let a = rec.coeffs.a(&z)[0][0];
            let b = rec.coeffs.b(&z)[0];
            // transport term 2∫ b f ∂v f w plus the weight commutator
            // −2∫ a f ∂v f ∂v w from integrating the diffusion by parts
            drift_term += cell * (2.0 * b * fnew * dvf * weight(v) - 2.0 * a * fnew * dvf * dweight(v));
            zeroth_term += cell * 2.0 * rec.coeffs.c(&z) * fnew * fnew * weight(v);
            source_term += cell * 2.0 * rec.coeffs.s(&z) * fnew * weight(v);
        }
    }

    let residual = energy_delta + dt * boundary_flux_sq + dt * dissipation
        - dt * (drift_term + zeroth_term + source_term);

    LedgerRecord {
        step,
        t,
        weight_q: q,
        mass,
        mass_flux_net,
        weighted_l2_sq,
        energy_delta,
        boundary_flux_sq,
        dissipation,
        drift_term,
        zeroth_term,
        source_term,
        residual,
    }
}

/// Even reflection through the left face: the solution of the specular
/// problem on (0, L) extends to (−L, L) by f̂(−x, v) = f(x, −v), and on
/// the symmetric grid the reflected nodes land exactly on grid nodes.
/// Requires a specular boundary (damped with a = 1 counts); anything
/// else has no reflection symmetry to extend with.
pub fn mirror_extended_field(
    f: &SolutionField,
    spec: &BoundarySpec,
) -> Result<SolutionField, SolverError> {
    match spec {
        BoundarySpec::Specular => {}
        BoundarySpec::DampedSpecular(a) if *a == 1.0 => {}
        _ => return Err(SolverError::NonSpecular),
    }
    let g = f.grid();
    let ext = Grid {
        x0: g.x0 - g.length,
        length: 2.0 * g.length,
        nx: 2 * g.nx,
        hx: g.hx,
        vmax: g.vmax,
        nv: g.nv,
        hv: g.hv,
        dt: g.dt,
        cfl_limit: g.cfl_limit,
    };
    let mut data = vec![0.0; ext.len()];
    for i in 0..ext.nx {
        for j in 0..=ext.nv {
            data[ext.index(i, j)] = if i < g.nx {
                f.value(g.nx - 1 - i, g.mirror_v(j))
            } else {
                f.value(i - g.nx, j)
            };
        }
    }
    Ok(SolutionField::from_values(ext, f.t, data))
}

/// Coefficients for the mirror-extended problem: on the reflected side
/// of the plane the field evaluates at the reflected phase point with
/// A conjugated by the reflection (off-diagonal entries in the mirrored
/// axis change sign) and the mirrored drift component negated.  With
/// these coefficients the even extension satisfies the same equation
/// across the interface.
pub fn mirror_coefficients(coeffs: &CoefficientField, axis: usize, plane: f64) -> CoefficientField {
    assert!(axis < 2, "axis must be 0 or 1");
    let reflect = move |z: &PhaseState| -> (PhaseState, bool) {
        if z.x[axis] >= plane {
            (*z, false)
        } else {
            let mut r = *z;
            r.x[axis] = 2.0 * plane - z.x[axis];
            r.v[axis] = -z.v[axis];
            (r, true)
        }
    };
    let ca = coeffs.clone();
    let cb = coeffs.clone();
    let cc = coeffs.clone();
    let cs = coeffs.clone();
    CoefficientField::from_closures(
        move |z| {
            let (r, flipped) = reflect(z);
            let mut a = ca.a(&r);
            if flipped {
                for k in 0..2 {
                    if k != axis {
                        a[axis][k] = -a[axis][k];
                        a[k][axis] = -a[k][axis];
                    }
                }
            }
            a
        },
        move |z| {
            let (r, flipped) = reflect(z);
            let mut b = cb.b(&r);
            if flipped {
                b[axis] = -b[axis];
            }
            b
        },
        move |z| cc.c(&reflect(z).0),
        move |z| cs.s(&reflect(z).0),
        coeffs.lambda(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::boundary_maxwellian;

    fn xorshift(state: &mut u64) -> f64 {
        *state ^= *state >> 12;
        *state ^= *state << 25;
        *state ^= *state >> 27;
        (state.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64 / (1u64 << 53) as f64
    }

    #[test]
    fn constant_data_is_a_fixed_point() {
        // c = 0, s = 0, constant inflow and v-box matching the field:
        // the step must return the same constant
        let g = Grid::new(1.0, 20, 3.0, 24, 5e-3).unwrap();
        let coeffs = CoefficientField::from_closures(
            |z: &PhaseState| {
                let a = 1.2 + 0.3 * (z.x[0] + z.v[0]).sin();
                [[a, 0.0], [0.0, a]]
            },
            |z: &PhaseState| [0.4 * (z.x[0] * z.v[0]).cos(), 0.0],
            |_| 0.0,
            |_| 0.0,
            2.0,
        );
        let spec = BoundarySpec::inflow(|_, _, _| 1.0);
        let mut cfg = SolverConfig::imex();
        cfg.vbox = VBox::data(|_, _, _| 1.0);
        let mut f = SolutionField::new(g, 0.0, |_, _| 1.0);
        for _ in 0..50 {
            f = step(&f, &coeffs, &spec, &cfg).unwrap();
        }
        let dev = f.values().iter().fold(0.0f64, |m, &x| m.max((x - 1.0).abs()));
        assert!(dev < 1e-12, "constant drifted by {dev}");
        assert!((f.t - 0.25).abs() < 1e-12);
        assert_eq!(f.step_index(), 50);
    }

    /// Manufactured solution f = e^{−t}(1 + 0.5 sin 2πx)e^{−v²/2} for
    /// a = 1, b = c = 0, with the source it forces; exact inflow and
    /// v-box data.
    fn manufactured(nx: usize, nv: usize, dt: f64, t_end: f64) -> f64 {
        let exact = |t: f64, x: f64, v: f64| {
            (-t).exp() * (1.0 + 0.5 * (std::f64::consts::TAU * x).sin()) * (-v * v / 2.0).exp()
        };
        let coeffs = CoefficientField::from_closures(
            |_| [[1.0, 0.0], [0.0, 1.0]],
            |_| [0.0, 0.0],
            |_| 0.0,
            |z: &PhaseState| {
                let tau = std::f64::consts::TAU;
                let (t, x, v) = (z.t, z.x[0], z.v[0]);
                let phi = 1.0 + 0.5 * (tau * x).sin();
                let psi = (-v * v / 2.0).exp();
                // ∂t f + v ∂x f − ∂vv f
                (-t).exp()
                    * psi
                    * (-phi + v * 0.5 * tau * (tau * x).cos() - phi * (v * v - 1.0))
            },
            2.0,
        );
        let spec = BoundarySpec::inflow(move |t, x, v| exact(t, x, v));
        let mut cfg = SolverConfig::imex();
        cfg.vbox = VBox::data(move |t, x, v| exact(t, x, v));
        let g = Grid::new(1.0, nx, 4.0, nv, dt).unwrap();
        let mut f = SolutionField::new(g.clone(), 0.0, |x, v| exact(0.0, x, v));
        let steps = (t_end / dt).round() as usize;
        for _ in 0..steps {
            f = step(&f, &coeffs, &spec, &cfg).unwrap();
        }
        let truth = SolutionField::new(g, 0.0, |x, v| exact(f.t, x, v));
        f.l2_distance(&truth)
    }

    #[test]
    fn manufactured_solution_converges_at_first_order() {
        let e1 = manufactured(30, 30, 4e-3, 0.08);
        let e2 = manufactured(60, 60, 2e-3, 0.08);
        let e3 = manufactured(120, 120, 1e-3, 0.08);
        assert!(
            e1 / e2 > 1.8 && e2 / e3 > 1.8,
            "errors {e1:.3e} {e2:.3e} {e3:.3e} refine too slowly"
        );
    }

    #[test]
    fn randomized_runs_respect_the_maximum_principle() {
        // c ≤ 0, s = 0, absorbing boundary: the discrete solution never
        // exceeds the initial bound
        for seed in [11u64, 57, 1023] {
            let mut rng = seed;
            let (p1, p2, p3) = (xorshift(&mut rng), xorshift(&mut rng), xorshift(&mut rng));
            let coeffs = CoefficientField::from_closures(
                move |z: &PhaseState| {
                    let a = 1.0 + 0.5 * p1 * (3.0 * z.v[0] + z.x[0]).sin();
                    [[a, 0.0], [0.0, a]]
                },
                move |z: &PhaseState| [1.5 * p2 * (z.x[0] - z.v[0]).cos(), 0.0],
                move |z: &PhaseState| -0.8 * p3 * (1.0 + (z.v[0]).sin()),
                |_| 0.0,
                4.0,
            );
            let g = Grid::new(1.0, 24, 4.0, 32, 4e-3).unwrap();
            let mut rng2 = seed.wrapping_mul(77);
            let amp = 0.5 + 0.5 * xorshift(&mut rng2);
            let freq = (2.0 + 3.0 * xorshift(&mut rng2)).round();
            let f0 = SolutionField::new(g, 0.0, move |x, v| {
                amp * (0.5 + 0.5 * (freq * std::f64::consts::TAU * x).sin()) * (-v * v).exp()
            });
            let bound = f0.max_abs();
            let cfg = SolverConfig::imex();
            let mut f = f0;
            for _ in 0..25 {
                f = step(&f, &coeffs, &BoundarySpec::absorbing(), &cfg).unwrap();
                let hi = f.values().iter().cloned().fold(f64::MIN, f64::max);
                let lo = f.values().iter().cloned().fold(f64::MAX, f64::min);
                assert!(hi <= bound + 1e-8, "seed {seed}: max grew to {hi} > {bound}");
                assert!(lo >= -1e-12, "seed {seed}: negative undershoot {lo}");
            }
        }
    }

    #[test]
    fn reflecting_boundaries_conserve_mass() {
        // c = 0, s = 0, B = 0: the only mass routes out are the v-box
        // ends.  Velocity diffusion widens the Gaussian to variance
        // 0.5 + 2t ≈ 1.1 by the final time, so V = 8 keeps the Dirichlet
        // truncation under 1e−11
        let g = Grid::new(1.0, 40, 8.0, 160, 2.5e-3).unwrap();
        let init = |x: f64, v: f64| {
            (1.0 + 0.5 * (std::f64::consts::TAU * x).sin()) * (-v * v).exp()
        };
        let coeffs = CoefficientField::isotropic_unit();
        let cfg = SolverConfig::imex();
        for spec in [
            BoundarySpec::Specular,
            BoundarySpec::Diffuse(boundary_maxwellian(1.0, 1).unwrap()),
        ] {
            let mut f = SolutionField::new(g.clone(), 0.0, init);
            let m0 = f.mass();
            for _ in 0..120 {
                f = step(&f, &coeffs, &spec, &cfg).unwrap();
            }
            let drift = (f.mass() - m0).abs() / f.t;
            assert!(drift < 1e-8, "{spec:?}: mass drift {drift} per unit time");
        }
    }

    #[test]
    fn energy_decays_without_sources() {
        // c ≤ 0, s = 0, absorbing data: the L² norm is non-increasing
        let g = Grid::new(1.0, 24, 6.0, 48, 3e-3).unwrap();
        let coeffs = CoefficientField::from_closures(
            |z: &PhaseState| {
                let a = 1.0 + 0.1 * z.v[0].sin();
                [[a, 0.0], [0.0, a]]
            },
            |_| [0.2, 0.0],
            |_| -0.5,
            |_| 0.0,
            2.0,
        );
        let cfg = SolverConfig::imex();
        let mut f = SolutionField::new(g, 0.0, |x, v| (x * (1.0 - x)) * (-v * v / 2.0).exp());
        let mut energy = f.weighted_l2_sq(0.0);
        for _ in 0..30 {
            f = step(&f, &coeffs, &BoundarySpec::absorbing(), &cfg).unwrap();
            let next = f.weighted_l2_sq(0.0);
            assert!(next <= energy * (1.0 + 1e-12), "energy grew: {energy} -> {next}");
            energy = next;
        }
    }

    #[test]
    fn ledger_is_identically_zero_on_the_zero_field() {
        let g = Grid::new(1.0, 10, 3.0, 12, 5e-3).unwrap();
        let f0 = SolutionField::new(g, 0.0, |_, _| 0.0);
        let f1 = step(&f0, &CoefficientField::isotropic_unit(), &BoundarySpec::absorbing(),
            &SolverConfig::imex()).unwrap();
        let entry = f1.ledger().last().unwrap();
        assert_eq!(entry.mass, 0.0);
        assert_eq!(entry.weighted_l2_sq, 0.0);
        assert_eq!(entry.residual, 0.0);
        assert_eq!(entry.boundary_flux_sq, 0.0);
        // and recomputing at a different weight stays zero
        let at_q = energy_ledger(&f1, 2.0).unwrap();
        assert_eq!(at_q.residual, 0.0);
    }

    #[test]
    fn specular_boundary_term_vanishes_on_constants() {
        let g = Grid::new(1.0, 10, 3.0, 12, 5e-3).unwrap();
        let mut cfg = SolverConfig::imex();
        cfg.vbox = VBox::data(|_, _, _| 2.0);
        let f0 = SolutionField::new(g, 0.0, |_, _| 2.0);
        let f1 = step(&f0, &CoefficientField::isotropic_unit(), &BoundarySpec::Specular, &cfg)
            .unwrap();
        // the outgoing and incoming halves pair up exactly at ±v
        assert_eq!(f1.ledger().last().unwrap().boundary_flux_sq, 0.0);
        let weighted = energy_ledger(&f1, 1.5).unwrap();
        assert_eq!(weighted.boundary_flux_sq, 0.0);
    }

    #[test]
    fn ledger_residual_shrinks_under_refinement() {
        // First-order decay of the total residual needs a solution that
        // stays smooth uniformly under refinement, so drive the
        // manufactured solution with compatible inflow.  (Absorbing
        // data instead develops the grazing-set corner singularity and
        // drags the observed order down to about one half, which is
        // the boundary regularity story itself, not a ledger defect.)
        let exact = |t: f64, x: f64, v: f64| {
            (-t).exp() * (1.0 + 0.5 * (std::f64::consts::TAU * x).sin()) * (-v * v / 2.0).exp()
        };
        let total = |nx: usize, nv: usize, dt: f64| -> f64 {
            let g = Grid::new(1.0, nx, 4.0, nv, dt).unwrap();
            let coeffs = CoefficientField::from_closures(
                |_| [[1.0, 0.0], [0.0, 1.0]],
                |_| [0.0, 0.0],
                |_| 0.0,
                |z: &PhaseState| {
                    let tau = std::f64::consts::TAU;
                    let (t, x, v) = (z.t, z.x[0], z.v[0]);
                    let phi = 1.0 + 0.5 * (tau * x).sin();
                    let psi = (-v * v / 2.0).exp();
                    (-t).exp() * psi * (-phi + v * 0.5 * tau * (tau * x).cos() - phi * (v * v - 1.0))
                },
                2.0,
            );
            let mut cfg = SolverConfig::imex();
            cfg.vbox = VBox::data(move |t, x, v| exact(t, x, v));
            let spec = BoundarySpec::inflow(move |t, x, v| exact(t, x, v));
            let mut f = SolutionField::new(g, 0.0, |x, v| exact(0.0, x, v));
            let steps = (0.1 / dt).round() as usize;
            let mut sum = 0.0;
            for _ in 0..steps {
                f = step(&f, &coeffs, &spec, &cfg).unwrap();
                sum += f.ledger().last().unwrap().residual.abs();
            }
            sum
        };
        let coarse = total(20, 24, 5e-3);
        let mid = total(40, 48, 2.5e-3);
        let fine = total(80, 96, 1.25e-3);
        assert!(
            coarse / mid > 1.6 && mid / fine > 1.7,
            "ledger residual refines too slowly: {coarse:.3e} -> {mid:.3e} -> {fine:.3e}"
        );
    }

    #[test]
    fn ledger_requires_a_completed_step() {
        let g = Grid::new(1.0, 10, 3.0, 12, 5e-3).unwrap();
        let fresh = SolutionField::new(g, 0.0, |_, _| 1.0);
        assert!(matches!(energy_ledger(&fresh, 0.0), Err(SolverError::TracesMissing)));
    }

    #[test]
    fn mirror_extension_is_exactly_even() {
        let g = Grid::new(1.0, 12, 3.0, 16, 5e-3).unwrap();
        let f = SolutionField::new(g.clone(), 0.0, |x, v| {
            (2.0 * x).exp() * (0.7 * v + 0.3).sin()
        });
        let ext = mirror_extended_field(&f, &BoundarySpec::Specular).unwrap();
        let eg = ext.grid().clone();
        assert_eq!(eg.nx, 2 * g.nx);
        assert!((eg.x_face(0) + 1.0).abs() < 1e-15);
        // f̂(−x, v) = f̂(x, −v) node for node, bit for bit
        for i in 0..eg.nx {
            for j in 0..=eg.nv {
                assert_eq!(ext.value(i, j), ext.value(eg.nx - 1 - i, eg.mirror_v(j)));
            }
        }
        // right half is the original field
        for i in 0..g.nx {
            for j in 0..=g.nv {
                assert_eq!(ext.value(g.nx + i, j), f.value(i, j));
            }
        }
        // only exactly specular boundaries qualify
        assert!(matches!(
            mirror_extended_field(&f, &BoundarySpec::absorbing()),
            Err(SolverError::NonSpecular)
        ));
        assert!(matches!(
            mirror_extended_field(&f, &BoundarySpec::damped_specular(0.5).unwrap()),
            Err(SolverError::NonSpecular)
        ));
        assert!(mirror_extended_field(&f, &BoundarySpec::damped_specular(1.0).unwrap()).is_ok());
    }

    #[test]
    fn mirror_interface_jump_is_discretization_small() {
        // evolve even-in-v data under specular walls; the reflected
        // extension stays continuous across the interface up to the
        // scheme's own first-order error
        let jump = |nx: usize, nv: usize, dt: f64| -> f64 {
            let g = Grid::new(1.0, nx, 4.0, nv, dt).unwrap();
            let coeffs = CoefficientField::isotropic_unit();
            let cfg = SolverConfig::imex();
            let mut f = SolutionField::new(g.clone(), 0.0, |x, v| {
                (1.0 + 0.5 * (std::f64::consts::PI * x).cos()) * (-v * v / 2.0).exp()
            });
            let steps = (0.05 / dt).round() as usize;
            for _ in 0..steps {
                f = step(&f, &coeffs, &BoundarySpec::Specular, &cfg).unwrap();
            }
            // interface continuity defect: f(0⁺, v) vs its mirror value
            let mut worst = 0.0f64;
            for j in 0..=g.nv {
                worst = worst.max((f.value(0, j) - f.value(0, g.mirror_v(j))).abs());
            }
            worst
        };
        let coarse = jump(20, 32, 4e-3);
        let fine = jump(40, 64, 2e-3);
        assert!(coarse < 0.05, "interface jump {coarse} too large on the coarse grid");
        assert!(fine < 0.65 * coarse, "interface jump does not refine: {coarse} -> {fine}");
    }

    #[test]
    fn mirrored_coefficients_reflect_the_matrix_and_drift() {
        let base = CoefficientField::from_closures(
            |z: &PhaseState| [[2.0 + z.x[0], 0.3], [0.3, 1.0]],
            |z: &PhaseState| [0.5 * (1.0 + z.x[0]), -0.2],
            |z: &PhaseState| -0.1 * z.x[0],
            |z: &PhaseState| 0.7 + z.v[0],
            4.0,
        );
        let ext = mirror_coefficients(&base, 0, 0.0);
        // physical side: untouched
        let zp = PhaseState::new_2d(0.0, [0.4, 0.1], [1.0, -2.0]);
        assert_eq!(ext.a(&zp), base.a(&zp));
        assert_eq!(ext.b(&zp), base.b(&zp));
        // mirror side: evaluate at the reflected point, conjugated
        let zm = PhaseState::new_2d(0.0, [-0.4, 0.1], [1.0, -2.0]);
        let a = ext.a(&zm);
        assert_eq!(a[0][0], 2.4); // 2 + 0.4 from the reflected point
        assert_eq!(a[0][1], -0.3);
        assert_eq!(a[1][0], -0.3);
        assert_eq!(a[1][1], 1.0);
        let b = ext.b(&zm);
        assert_eq!(b[0], -0.5 * 1.4); // negated mirrored component
        assert_eq!(b[1], -0.2);
        assert_eq!(ext.c(&zm), -0.1 * 0.4);
        // v is reflected too: s depends on v[0]... axis 0 of v flips
        assert_eq!(ext.s(&zm), 0.7 - 1.0);
        assert_eq!(ext.lambda(), 4.0);
    }

    #[test]
    fn viscous_scheme_demands_positive_epsilon() {
        assert!(SolverConfig::viscous(0.0).validate().is_err());
        assert!(SolverConfig::viscous(-1.0).validate().is_err());
        assert!(SolverConfig::viscous(1e-3).validate().is_ok());
        // and the explicit entry point refuses a non-viscous config
        let g = Grid::new(1.0, 10, 3.0, 12, 5e-3).unwrap();
        let f = SolutionField::new(g, 0.0, |_, _| 0.0);
        let err = step_viscous(
            &f,
            &CoefficientField::isotropic_unit(),
            &BoundarySpec::absorbing(),
            &SolverConfig::imex(),
        );
        assert!(matches!(err, Err(SolverError::Config(_))));
    }

    #[test]
    fn viscous_step_preserves_zero_data() {
        let g = Grid::new(1.0, 16, 3.0, 16, 4e-3).unwrap();
        let mut f = SolutionField::new(g, 0.0, |_, _| 0.0);
        let cfg = SolverConfig::viscous(0.05);
        for _ in 0..10 {
            f = step_viscous(
                &f,
                &CoefficientField::isotropic_unit(),
                &BoundarySpec::absorbing(),
                &cfg,
            )
            .unwrap();
        }
        assert_eq!(f.max_abs(), 0.0);
    }

    #[test]
    fn viscous_solution_approaches_the_transport_solution() {
        // same data, shrinking ε: distance to the un-regularized
        // solution decreases
        let g = Grid::new(1.0, 24, 4.0, 32, 4e-3).unwrap();
        let coeffs = CoefficientField::isotropic_unit();
        let spec = BoundarySpec::inflow(|_, _, v: f64| (-(v - 1.0) * (v - 1.0)).exp());
        let init = |x: f64, v: f64| (-(x - 0.5) * (x - 0.5) * 30.0).exp() * (-v * v).exp();
        let run = |cfg: &SolverConfig| -> SolutionField {
            let mut f = SolutionField::new(g.clone(), 0.0, init);
            for _ in 0..25 {
                f = step(&f, &coeffs, &spec, cfg).unwrap();
            }
            f
        };
        let direct = run(&SolverConfig::imex());
        let mut last = f64::INFINITY;
        for eps in [0.1, 0.025, 0.00625] {
            let regularized = run(&SolverConfig::viscous(eps));
            let d = regularized.l2_distance(&direct);
            assert!(d < last, "distance did not decrease at eps = {eps}: {d} vs {last}");
            last = d;
        }
        assert!(last < 0.02, "smallest-viscosity distance {last} still large");
    }

    #[test]
    fn tighter_cfl_limit_in_config_is_enforced() {
        let g = Grid::new(1.0, 20, 3.0, 24, 0.01).unwrap(); // ratio 0.6
        let f = SolutionField::new(g, 0.0, |_, _| 0.0);
        let mut cfg = SolverConfig::imex();
        cfg.cfl_limit = 0.5;
        let err = step(&f, &CoefficientField::isotropic_unit(), &BoundarySpec::absorbing(), &cfg);
        match err {
            Err(SolverError::Cfl { ratio, limit }) => {
                assert!((ratio - 0.6).abs() < 1e-12 && limit == 0.5);
            }
            other => panic!("expected CFL error, got {other:?}"),
        }
    }
}
