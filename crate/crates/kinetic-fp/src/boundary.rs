//! Phase-boundary classification and the three boundary operators.
//!
//! At a boundary point with outward normal n, velocities split by the
//! sign of n·v: outgoing (n·v > 0), incoming (n·v < 0), grazing
//! (n·v = 0).  The incoming trace is closed by one of
//!
//! ```text
//!   inflow:    γ₋f = g,
//!   diffuse:   γ₋f = ℳ(v) · Υ[f],   Υ[f] = ∫_{n·v>0} γ₊f (n·v) dv,
//!   specular:  γ₋f(v) = γ₊f(v − 2(n·v)n),   damped: a·(specular), a ∈ [0,1],
//! ```
//!
//! with the boundary Maxwellian
//!
//! ```text
//!   ℳ(v) = (2π)^{−(d−1)/2} Θ^{−(d+1)/2} e^{−|v|²/(2Θ)},
//! ```
//!
//! normalized to unit incoming flux ∫_{n·v<0} |n·v| ℳ dv = 1 for every
//! unit n.  On a truncated velocity grid the emitted profile is
//! renormalized by the discrete incoming flux of ℳ so that the diffuse
//! operator conserves mass exactly at the quadrature level, not just up
//! to truncation error.

use std::error::Error;
use std::fmt;
use std::sync::Arc;

use crate::solver::SolutionField;

/// Grazing test is exact by default: grid-aligned velocities hit
/// n·v = 0 exactly, and the curved-boundary quadrature widens it via
/// [`classify_with_tolerance`].
pub const GRAZING_TOL_DEFAULT: f64 = 0.0;

/// Position tolerance for locating a boundary face from a coordinate.
const FACE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryClassTag {
    Outgoing,
    Incoming,
    Grazing,
}

/// Which part of the phase boundary a velocity belongs to, with the
/// signed normal speed n·v.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryClass {
    pub tag: BoundaryClassTag,
    pub speed: f64,
}

#[derive(Debug, Clone)]
pub enum BoundaryError {
    NonPositiveTemperature(f64),
    DampingOutOfRange(f64),
    /// Outgoing trace data unavailable where an operator needs it.
    MissingTrace { face: &'static str },
    /// Inflow data evaluated to NaN at an incoming node.
    InflowUndefined { face: &'static str, v: f64 },
    /// The discrete incoming flux of the diffuse weight vanished, so
    /// the emitted profile cannot be normalized.
    DegenerateDiffuseFlux { face: &'static str },
    /// Queried coordinate does not match a boundary face.
    NoSuchFace { x: f64 },
}

impl fmt::Display for BoundaryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryError::NonPositiveTemperature(th) => {
                write!(f, "boundary temperature must be positive, got {th}")
            }
            BoundaryError::DampingOutOfRange(a) => {
                write!(f, "specular damping must lie in [0, 1], got {a}")
            }
            BoundaryError::MissingTrace { face } => {
                write!(f, "outgoing trace data missing on the {face} face")
            }
            BoundaryError::InflowUndefined { face, v } => {
                write!(f, "inflow data undefined (NaN) on the {face} face at v = {v}")
            }
            BoundaryError::DegenerateDiffuseFlux { face } => {
                write!(f, "diffuse weight has zero discrete incoming flux on the {face} face")
            }
            BoundaryError::NoSuchFace { x } => {
                write!(f, "no boundary face at x = {x}")
            }
        }
    }
}

impl Error for BoundaryError {}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Splits a velocity at a boundary point with unit outward normal n.
pub fn classify(n: &[f64], v: &[f64]) -> BoundaryClass {
    classify_with_tolerance(n, v, GRAZING_TOL_DEFAULT)
}

pub fn classify_with_tolerance(n: &[f64], v: &[f64], grazing_tol: f64) -> BoundaryClass {
    debug_assert!((dot(n, n) - 1.0).abs() < 1e-12, "normal must be unit length");
    let speed = dot(n, v);
    let tag = if speed.abs() <= grazing_tol {
        BoundaryClassTag::Grazing
    } else if speed > 0.0 {
        BoundaryClassTag::Outgoing
    } else {
        BoundaryClassTag::Incoming
    };
    BoundaryClass { tag, speed }
}

/// Specular image v − 2(n·v)n.  Isometry and involution; fixes grazing
/// velocities.
pub fn specular(n: &[f64], v: &[f64]) -> [f64; 2] {
    debug_assert!((dot(n, n) - 1.0).abs() < 1e-12, "normal must be unit length");
    let nv = dot(n, v);
    let mut out = [0.0; 2];
    for i in 0..v.len() {
        out[i] = v[i] - 2.0 * nv * n[i];
    }
    out
}

/// The measure dμ = |n·v| dσ dv on the phase boundary, up to the
/// surface factor dσ which is a counting measure on the two faces in
/// d = 1.  Vanishes exactly on grazing velocities (within the
/// configured tolerance).
#[derive(Debug, Clone, Copy)]
pub struct BoundaryMeasure {
    pub grazing_tol: f64,
}

impl Default for BoundaryMeasure {
    fn default() -> Self {
        BoundaryMeasure { grazing_tol: GRAZING_TOL_DEFAULT }
    }
}

impl BoundaryMeasure {
    pub fn density(&self, n: &[f64], v: &[f64]) -> f64 {
        let speed = dot(n, v).abs();
        if speed <= self.grazing_tol {
            0.0
        } else {
            speed
        }
    }
}

/// Inflow data g(t, x, v) for the d = 1 solver.
pub type InflowData = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Velocity weight ℳ(v), dimension-generic.
pub type WeightFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Diffuse-reflection weight with its recorded moment and regularity
/// bounds: sup ⟨v⟩^q ℳ ≤ lambda_q, and ℳ is C^beta in v.  The bounds
/// are carried as data (they parametrize how far the diffuse theory
/// applies), not re-derived from the closure.
#[derive(Clone)]
pub struct DiffuseWeight {
    eval: WeightFn,
    pub moment_q: f64,
    pub lambda_q: f64,
    pub beta: f64,
}

impl fmt::Debug for DiffuseWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiffuseWeight")
            .field("moment_q", &self.moment_q)
            .field("lambda_q", &self.lambda_q)
            .field("beta", &self.beta)
            .finish_non_exhaustive()
    }
}

impl DiffuseWeight {
    pub fn from_closure<F>(eval: F, moment_q: f64, lambda_q: f64, beta: f64) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        DiffuseWeight { eval: Arc::new(eval), moment_q, lambda_q, beta }
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        (self.eval)(v)
    }
}

/// Boundary Maxwellian at temperature Θ in dimension d, with unit
/// incoming flux against any unit normal.  Records the moment bound at
/// q = d + 3 (enough margin over the q > 1 + d the flux theory needs):
/// sup ⟨v⟩^q ℳ is attained at |v|² = qΘ − 1 when qΘ > 1.
pub fn boundary_maxwellian(theta: f64, d: usize) -> Result<DiffuseWeight, BoundaryError> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(BoundaryError::NonPositiveTemperature(theta));
    }
    assert!(d == 1 || d == 2, "dimension must be 1 or 2, got {d}");
    let tau = std::f64::consts::TAU;
    let norm = tau.powf(-((d as f64 - 1.0) / 2.0)) * theta.powf(-((d as f64 + 1.0) / 2.0));
    let q = (d + 3) as f64;
    let r2_star = (q * theta - 1.0).max(0.0);
    let lambda_q = (1.0 + r2_star).powf(q / 2.0) * norm * (-r2_star / (2.0 * theta)).exp();
    Ok(DiffuseWeight::from_closure(
        move |v: &[f64]| {
            let speed2: f64 = v.iter().map(|c| c * c).sum();
            norm * (-speed2 / (2.0 * theta)).exp()
        },
        q,
        lambda_q,
        // smooth in v; recorded as Lipschitz since only β ∈ (0,1] enters
        1.0,
    ))
}

/// Which operator closes the incoming trace.
#[derive(Clone)]
pub enum BoundarySpec {
    Inflow(InflowData),
    Diffuse(DiffuseWeight),
    Specular,
    DampedSpecular(f64),
}

impl fmt::Debug for BoundarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundarySpec::Inflow(_) => f.write_str("Inflow"),
            BoundarySpec::Diffuse(w) => write!(f, "Diffuse({w:?})"),
            BoundarySpec::Specular => f.write_str("Specular"),
            BoundarySpec::DampedSpecular(a) => write!(f, "DampedSpecular({a})"),
        }
    }
}

impl BoundarySpec {
    /// Inflow with g ≡ 0: the absorbing boundary condition.
    pub fn absorbing() -> Self {
        BoundarySpec::Inflow(Arc::new(|_, _, _| 0.0))
    }

    pub fn inflow<F>(g: F) -> Self
    where
        F: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        BoundarySpec::Inflow(Arc::new(g))
    }

    pub fn damped_specular(a: f64) -> Result<Self, BoundaryError> {
        if !(0.0..=1.0).contains(&a) {
            return Err(BoundaryError::DampingOutOfRange(a));
        }
        Ok(BoundarySpec::DampedSpecular(a))
    }
}

/// One face of the d = 1 phase boundary as the solver sees it.
#[derive(Debug, Clone, Copy)]
pub struct FaceTrace<'a> {
    /// Outward normal, −1 (left) or +1 (right).
    pub normal: f64,
    /// Face position.
    pub x: f64,
    /// Symmetric velocity nodes.
    pub v_nodes: &'a [f64],
    /// Trapezoid weights matching `v_nodes`.
    pub v_weights: &'a [f64],
    /// γ₊ values; read only at nodes with n·v > 0.
    pub outgoing: &'a [f64],
}

impl<'a> FaceTrace<'a> {
    fn name(&self) -> &'static str {
        if self.normal < 0.0 {
            "left"
        } else {
            "right"
        }
    }
}

/// Υ[f] at one face: trapezoid quadrature of γ₊f (n·v)₊ over the
/// velocity grid.
pub fn macroscopic_flux_face(face: &FaceTrace) -> f64 {
    let mut total = 0.0;
    for (j, &v) in face.v_nodes.iter().enumerate() {
        let speed = face.normal * v;
        if speed > 0.0 {
            total += face.v_weights[j] * speed * face.outgoing[j];
        }
    }
    total
}

/// Υ[f](t, x) on a solver field; x must sit on one of the two faces and
/// t must match the field's time level (traces live on snapshots).
pub fn macroscopic_flux(f: &SolutionField, t: f64, x: f64) -> Result<f64, BoundaryError> {
    let g = f.grid();
    let (normal, face_name) = if (x - g.x_face(0)).abs() <= FACE_TOL {
        (-1.0, "left")
    } else if (x - g.x_face(g.nx)).abs() <= FACE_TOL {
        (1.0, "right")
    } else {
        return Err(BoundaryError::NoSuchFace { x });
    };
    if (t - f.t).abs() > FACE_TOL {
        return Err(BoundaryError::MissingTrace { face: face_name });
    }
    let traces = f.restriction_traces();
    let outgoing = if normal < 0.0 { &traces.left } else { &traces.right };
    let v_nodes: Vec<f64> = (0..=g.nv).map(|j| g.v_node(j)).collect();
    let v_weights: Vec<f64> = (0..=g.nv).map(|j| g.v_weight(j)).collect();
    Ok(macroscopic_flux_face(&FaceTrace {
        normal,
        x,
        v_nodes: &v_nodes,
        v_weights: &v_weights,
        outgoing,
    }))
}

/// Evaluates the boundary operator on one face: returns γ₋ values at
/// every node (zeros at outgoing and grazing nodes).
///
/// The diffuse branch runs in two phases: gather Υ from the completed
/// outgoing snapshot, then emit ℳ(v)·Υ/Φ_h, where Φ_h is the discrete
/// incoming flux of ℳ on this grid.  Dividing by Φ_h (→ 1 under
/// refinement) makes the discrete incoming flux equal Υ exactly.
pub fn apply_boundary_face(
    spec: &BoundarySpec,
    face: &FaceTrace,
    t: f64,
) -> Result<Vec<f64>, BoundaryError> {
    let nv1 = face.v_nodes.len();
    let mut incoming = vec![0.0; nv1];
    match spec {
        BoundarySpec::Inflow(g) => {
            for (j, &v) in face.v_nodes.iter().enumerate() {
                if face.normal * v < 0.0 {
                    let val = g(t, face.x, v);
                    if val.is_nan() {
                        return Err(BoundaryError::InflowUndefined { face: face.name(), v });
                    }
                    incoming[j] = val;
                }
            }
        }
        BoundarySpec::Specular | BoundarySpec::DampedSpecular(_) => {
            let a = match spec {
                BoundarySpec::DampedSpecular(a) => {
                    if !(0.0..=1.0).contains(a) {
                        return Err(BoundaryError::DampingOutOfRange(*a));
                    }
                    *a
                }
                _ => 1.0,
            };
            // symmetric node set: the specular image of node j is the
            // node carrying −v, found by value match on the exact grid
            for (j, &v) in face.v_nodes.iter().enumerate() {
                if face.normal * v < 0.0 {
                    let mirrored = nv1 - 1 - j;
                    debug_assert_eq!(face.v_nodes[mirrored], -v, "velocity grid not symmetric");
                    incoming[j] = a * face.outgoing[mirrored];
                }
            }
        }
        BoundarySpec::Diffuse(weight) => {
            let upsilon = macroscopic_flux_face(face);
            let mut phi_h = 0.0;
            for (j, &v) in face.v_nodes.iter().enumerate() {
                let speed = face.normal * v;
                if speed < 0.0 {
                    phi_h += face.v_weights[j] * (-speed) * weight.eval(&[v]);
                }
            }
            if phi_h <= 0.0 {
                return Err(BoundaryError::DegenerateDiffuseFlux { face: face.name() });
            }
            for (j, &v) in face.v_nodes.iter().enumerate() {
                if face.normal * v < 0.0 {
                    incoming[j] = weight.eval(&[v]) * upsilon / phi_h;
                }
            }
        }
    }
    Ok(incoming)
}

/// Evaluates the boundary operator on both faces of a solver field at
/// time t, gathering outgoing traces by restriction first.
pub fn apply_boundary(
    spec: &BoundarySpec,
    f: &SolutionField,
    t: f64,
) -> Result<(Vec<f64>, Vec<f64>), BoundaryError> {
    let g = f.grid();
    let traces = f.restriction_traces();
    let v_nodes: Vec<f64> = (0..=g.nv).map(|j| g.v_node(j)).collect();
    let v_weights: Vec<f64> = (0..=g.nv).map(|j| g.v_weight(j)).collect();
    let left = apply_boundary_face(
        spec,
        &FaceTrace {
            normal: -1.0,
            x: g.x_face(0),
            v_nodes: &v_nodes,
            v_weights: &v_weights,
            outgoing: &traces.left,
        },
        t,
    )?;
    let right = apply_boundary_face(
        spec,
        &FaceTrace {
            normal: 1.0,
            x: g.x_face(g.nx),
            v_nodes: &v_nodes,
            v_weights: &v_weights,
            outgoing: &traces.right,
        },
        t,
    )?;
    Ok((left, right))
}
