//! Spatial domains, outward normals, boundary-flattening charts, and
//! the mirror reflection used by the specular extension.
//!
//! Near a boundary piece written as a graph, the chart
//!
//! ```text
//!   P(y̌, y_d) = m(y̌) + y_d n(y̌),
//!   m(y̌) = (y̌, ψ(y̌)),    n(y̌) = (−Dψ(y̌), 1) / |(Dψ(y̌), 1)|,
//! ```
//!
//! straightens the boundary to {y_d = 0}, with the interior mapped to
//! y_d < 0.  The convention throughout is that the domain lies locally
//! *below* the graph of ψ (the outward normal has positive last
//! component), which is how the built-in shapes construct their charts.
//! On the flattened side, mirror reflection negates the normal
//! components of position and velocity.

use std::error::Error;
use std::fmt;
use std::sync::Arc;

use crate::transforms::PhaseState;

/// Tolerance for deciding whether a query point lies on the boundary.
const ON_BOUNDARY_TOL: f64 = 1e-9;

/// Step for central differencing of user-supplied graph functions.
const GRAPH_DIFF_STEP: f64 = 1e-6;

/// Newton solve in [`FlatteningChart::unflatten`]: residual target and
/// iteration cap.  The target sits below the 1e−10 round-trip contract
/// but above the reproducibility floor of charts whose gradient comes
/// from central differencing (cancellation noise ~5e−12 per graph
/// evaluation).
const UNFLATTEN_TOL: f64 = 1e-11;
const UNFLATTEN_MAX_ITER: usize = 50;

type GraphFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone)]
pub enum GeometryError {
    /// Constructor rejected a non-positive extent or a chart bound ≤ 1.
    BadParameter { what: &'static str, value: f64 },
    /// normal_at called off the boundary; reports how far away.
    NotOnBoundary { distance: f64, tolerance: f64 },
    /// Chart coordinates outside (−R, R)^d.
    OutOfChart { coordinate: f64, half_width: f64 },
    /// det(P′) left [κ^{−1}, κ].
    ChartBoundViolated { det: f64, kappa: f64 },
    /// Newton iteration for the chart inverse stalled.
    NoConvergence { residual: f64 },
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::BadParameter { what, value } => {
                write!(f, "invalid {what}: {value}")
            }
            GeometryError::NotOnBoundary { distance, tolerance } => write!(
                f,
                "point is not on the boundary: distance {distance:e} exceeds tolerance {tolerance:e}"
            ),
            GeometryError::OutOfChart { coordinate, half_width } => write!(
                f,
                "coordinate {coordinate} outside the chart domain (-{half_width}, {half_width})"
            ),
            GeometryError::ChartBoundViolated { det, kappa } => write!(
                f,
                "chart Jacobian determinant {det} outside [1/{kappa}, {kappa}]; shrink the chart half-width"
            ),
            GeometryError::NoConvergence { residual } => write!(
                f,
                "chart inversion did not converge: residual {residual:e}"
            ),
        }
    }
}

impl Error for GeometryError {}

/// The spatial domain Ω.
#[derive(Clone)]
pub enum DomainGeometry {
    /// (0, length) in one dimension.
    Interval { length: f64 },
    /// Disk of the given radius centered at the origin.
    Disk { radius: f64 },
    /// Bounded patch whose boundary is the graph x₂ = ψ(x₁) over
    /// |x₁| < half_width, with the domain below the graph.
    Epigraph { graph: GraphFn, gradient: GraphFn, half_width: f64 },
}

impl fmt::Debug for DomainGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainGeometry::Interval { length } => {
                f.debug_struct("Interval").field("length", length).finish()
            }
            DomainGeometry::Disk { radius } => {
                f.debug_struct("Disk").field("radius", radius).finish()
            }
            DomainGeometry::Epigraph { half_width, .. } => {
                f.debug_struct("Epigraph").field("half_width", half_width).finish_non_exhaustive()
            }
        }
    }
}

fn central_diff(g: &GraphFn, s: f64) -> f64 {
    (g(s + GRAPH_DIFF_STEP) - g(s - GRAPH_DIFF_STEP)) / (2.0 * GRAPH_DIFF_STEP)
}

impl DomainGeometry {
    pub fn interval(length: f64) -> Result<Self, GeometryError> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(GeometryError::BadParameter { what: "interval length", value: length });
        }
        Ok(DomainGeometry::Interval { length })
    }

    pub fn disk(radius: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeometryError::BadParameter { what: "disk radius", value: radius });
        }
        Ok(DomainGeometry::Disk { radius })
    }

    /// Boundary graph with analytically supplied gradient.
    pub fn epigraph_with_gradient<G, DG>(graph: G, gradient: DG, half_width: f64) -> Result<Self, GeometryError>
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
        DG: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(GeometryError::BadParameter { what: "epigraph half-width", value: half_width });
        }
        Ok(DomainGeometry::Epigraph {
            graph: Arc::new(graph),
            gradient: Arc::new(gradient),
            half_width,
        })
    }

    /// Boundary graph with gradient by central differences (step 1e−6);
    /// adequate for C^{1,1} graphs.
    pub fn epigraph<G>(graph: G, half_width: f64) -> Result<Self, GeometryError>
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let g: GraphFn = Arc::new(graph);
        let g2 = g.clone();
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(GeometryError::BadParameter { what: "epigraph half-width", value: half_width });
        }
        Ok(DomainGeometry::Epigraph {
            graph: g,
            gradient: Arc::new(move |s| central_diff(&g2, s)),
            half_width,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainGeometry::Interval { .. } => 1,
            _ => 2,
        }
    }

    /// Signed distance to the boundary along the natural coordinate;
    /// used only for the on-boundary test, so it is exact for interval
    /// and disk and a graph-distance surrogate |x₂ − ψ(x₁)| for graphs.
    fn boundary_distance(&self, x: &[f64]) -> f64 {
        match self {
            DomainGeometry::Interval { length } => x[0].abs().min((x[0] - length).abs()),
            DomainGeometry::Disk { radius } => ((x[0] * x[0] + x[1] * x[1]).sqrt() - radius).abs(),
            DomainGeometry::Epigraph { graph, .. } => (x[1] - graph(x[0])).abs(),
        }
    }

    /// Outward unit normal at a boundary point.  The point must lie on
    /// ∂Ω within 1e−9 or the call is rejected with the measured
    /// distance.
    pub fn normal_at(&self, x: &[f64]) -> Result<[f64; 2], GeometryError> {
        assert_eq!(x.len(), self.dim(), "query dimension mismatch");
        let distance = self.boundary_distance(x);
        if distance > ON_BOUNDARY_TOL {
            return Err(GeometryError::NotOnBoundary { distance, tolerance: ON_BOUNDARY_TOL });
        }
        Ok(match self {
            DomainGeometry::Interval { length } => {
                if x[0].abs() <= (x[0] - length).abs() {
                    [-1.0, 0.0]
                } else {
                    [1.0, 0.0]
                }
            }
            DomainGeometry::Disk { .. } => {
                let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
                [x[0] / r, x[1] / r]
            }
            DomainGeometry::Epigraph { gradient, .. } => {
                // domain below the graph, so outward points up the graph's
                // normal: (−Dψ, 1) normalized
                let dp = gradient(x[0]);
                let norm = (1.0 + dp * dp).sqrt();
                [-dp / norm, 1.0 / norm]
            }
        })
    }

    /// Local flattening chart at a boundary point, expressed in the
    /// frame adapted to that point (see [`FlatteningChart`]).  The
    /// half-width is a knob: the κ bound is asserted at evaluation
    /// rather than derived from curvature.
    pub fn chart_at(&self, x: &[f64], half_width: f64, kappa: f64) -> Result<FlatteningChart, GeometryError> {
        // reuse the on-boundary rejection
        self.normal_at(x)?;
        match self {
            DomainGeometry::Interval { .. } => FlatteningChart::identity_1d(half_width, kappa),
            DomainGeometry::Disk { radius } => {
                // by rotation invariance the graph over the tangent line is
                // the same at every boundary point
                let r0 = *radius;
                FlatteningChart::new_with_gradient(
                    move |s| (r0 * r0 - s * s).sqrt() - r0,
                    move |s| -s / (r0 * r0 - s * s).sqrt(),
                    half_width,
                    kappa,
                )
            }
            DomainGeometry::Epigraph { graph, gradient, .. } => {
                let x0 = x[0];
                let g = graph.clone();
                let dg = gradient.clone();
                let offset = graph(x0);
                FlatteningChart::new_with_gradient(
                    move |s| g(x0 + s) - offset,
                    move |s| dg(x0 + s),
                    half_width,
                    kappa,
                )
            }
        }
    }
}

/// Boundary-flattening chart P(y̌, y_d) = m(y̌) + y_d n(y̌) over the cube
/// (−R, R)^d, in the frame where the boundary passes through the origin
/// as the graph of ψ with ψ(0) = 0 and the domain below it.
///
/// In d = 1 the chart is the identity (a 0-dimensional graph carries no
/// curvature), kept as a degenerate case so callers need not branch.
#[derive(Clone)]
pub struct FlatteningChart {
    psi: GraphFn,
    dpsi: GraphFn,
    half_width: f64,
    kappa: f64,
    dim: usize,
}

impl fmt::Debug for FlatteningChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FlatteningChart")
            .field("half_width", &self.half_width)
            .field("kappa", &self.kappa)
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

impl FlatteningChart {
    fn validate(half_width: f64, kappa: f64) -> Result<(), GeometryError> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(GeometryError::BadParameter { what: "chart half-width", value: half_width });
        }
        if !(kappa > 1.0 && kappa.is_finite()) {
            return Err(GeometryError::BadParameter { what: "chart bound kappa", value: kappa });
        }
        Ok(())
    }

    /// Chart from a graph function with analytic gradient (d = 2).
    pub fn new_with_gradient<G, DG>(psi: G, dpsi: DG, half_width: f64, kappa: f64) -> Result<Self, GeometryError>
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
        DG: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::validate(half_width, kappa)?;
        Ok(FlatteningChart {
            psi: Arc::new(psi),
            dpsi: Arc::new(dpsi),
            half_width,
            kappa,
            dim: 2,
        })
    }

    /// Chart from a graph function, gradient by central differences
    /// (step 1e−6).
    pub fn new<G>(psi: G, half_width: f64, kappa: f64) -> Result<Self, GeometryError>
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let g: GraphFn = Arc::new(psi);
        let g2 = g.clone();
        Self::validate(half_width, kappa)?;
        Ok(FlatteningChart {
            psi: g,
            dpsi: Arc::new(move |s| central_diff(&g2, s)),
            half_width,
            kappa,
            dim: 2,
        })
    }

    /// Degenerate d = 1 chart: the identity on (−R, R).
    pub fn identity_1d(half_width: f64, kappa: f64) -> Result<Self, GeometryError> {
        Self::validate(half_width, kappa)?;
        Ok(FlatteningChart {
            psi: Arc::new(|_| 0.0),
            dpsi: Arc::new(|_| 0.0),
            half_width,
            kappa,
            dim: 1,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// ψ(y̌).
    pub fn graph(&self, s: f64) -> f64 {
        (self.psi)(s)
    }

    /// m(y̌) = (y̌, ψ(y̌)).
    pub fn base_point(&self, s: f64) -> [f64; 2] {
        [s, (self.psi)(s)]
    }

    /// n(y̌) = (−Dψ, 1)/|(Dψ, 1)|, the outward unit normal along the
    /// graph.
    pub fn normal(&self, s: f64) -> [f64; 2] {
        let dp = (self.dpsi)(s);
        let norm = (1.0 + dp * dp).sqrt();
        [-dp / norm, 1.0 / norm]
    }

    fn check_in_cube(&self, y: &[f64]) -> Result<(), GeometryError> {
        for &c in &y[..self.dim] {
            if !(c.abs() < self.half_width) {
                return Err(GeometryError::OutOfChart { coordinate: c, half_width: self.half_width });
            }
        }
        Ok(())
    }

    /// det(P′)(y) = |(Dψ, 1)|·(1 − y_d ψ″/|(Dψ, 1)|³); ψ″ by central
    /// differences of the gradient.  Equals |(Dψ,1)| at y_d = 0.
    pub fn jacobian_det(&self, y: &[f64]) -> f64 {
        if self.dim == 1 {
            return 1.0;
        }
        let (s, yd) = (y[0], y[1]);
        let dp = (self.dpsi)(s);
        let ddp = central_diff(&self.dpsi, s);
        let w = (1.0 + dp * dp).sqrt();
        w * (1.0 - yd * ddp / (w * w * w))
    }

    fn check_kappa(&self, y: &[f64]) -> Result<(), GeometryError> {
        let det = self.jacobian_det(y);
        if det < 1.0 / self.kappa || det > self.kappa {
            return Err(GeometryError::ChartBoundViolated { det, kappa: self.kappa });
        }
        Ok(())
    }

    /// P(y̌, y_d) = m(y̌) + y_d n(y̌).  Rejects y outside (−R, R)^d and
    /// asserts the κ bound on det(P′) at y.
    pub fn flatten(&self, y: &[f64]) -> Result<[f64; 2], GeometryError> {
        assert_eq!(y.len(), self.dim, "chart dimension mismatch");
        self.check_in_cube(y)?;
        self.check_kappa(y)?;
        if self.dim == 1 {
            return Ok([y[0], 0.0]);
        }
        let m = self.base_point(y[0]);
        let n = self.normal(y[0]);
        Ok([m[0] + y[1] * n[0], m[1] + y[1] * n[1]])
    }

    /// Inverse of [`FlatteningChart::flatten`] by Newton iteration
    /// started from (x̌, x_d − ψ(x̌)).  The result satisfies
    /// ‖P(y) − x‖ ≤ 1e−12 and lies in the chart cube; y_d < 0 iff x is
    /// on the domain side.
    pub fn unflatten(&self, x: &[f64]) -> Result<[f64; 2], GeometryError> {
        assert_eq!(x.len(), self.dim, "chart dimension mismatch");
        if self.dim == 1 {
            self.check_in_cube(x)?;
            return Ok([x[0], 0.0]);
        }
        let mut s = x[0];
        let mut yd = x[1] - (self.psi)(s);
        let mut residual = f64::INFINITY;
        for _ in 0..UNFLATTEN_MAX_ITER {
            let m = self.base_point(s);
            let n = self.normal(s);
            let rx = m[0] + yd * n[0] - x[0];
            let ry = m[1] + yd * n[1] - x[1];
            residual = (rx * rx + ry * ry).sqrt();
            if residual <= UNFLATTEN_TOL {
                let y = [s, yd];
                self.check_in_cube(&y)?;
                self.check_kappa(&y)?;
                return Ok(y);
            }
            // Jacobian columns: ∂P/∂y̌ = m′ + y_d n′ with
            // n′ = −(ψ″/w³)(1, ψ′); ∂P/∂y_d = n
            let dp = (self.dpsi)(s);
            let ddp = central_diff(&self.dpsi, s);
            let w = (1.0 + dp * dp).sqrt();
            let tang = 1.0 - yd * ddp / (w * w * w);
            let j00 = tang;
            let j10 = dp * tang;
            let det = j00 * n[1] - n[0] * j10;
            if det.abs() < 1e-14 {
                return Err(GeometryError::NoConvergence { residual });
            }
            let ds = (rx * n[1] - n[0] * ry) / det;
            let dyd = (j00 * ry - j10 * rx) / det;
            s -= ds;
            yd -= dyd;
        }
        Err(GeometryError::NoConvergence { residual })
    }
}

/// Mirror reflection in flattened coordinates:
/// ℛ_m(t, y̌, y_d, w̌, w_d) = (t, y̌, −y_d, w̌, −w_d).  An involution
/// fixing t and the tangential components bit for bit.  In d = 1 there
/// is no tangential part and the whole of (y, w) flips sign.
pub fn mirror_reflect(z: &PhaseState) -> PhaseState {
    let mut out = *z;
    let last = z.dim - 1;
    out.x[last] = -z.x[last];
    out.v[last] = -z.v[last];
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xorshift(state: &mut u64) -> f64 {
        *state ^= *state >> 12;
        *state ^= *state << 25;
        *state ^= *state >> 27;
        (state.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64 / (1u64 << 53) as f64
    }

    #[test]
    fn interval_normals_point_outward() {
        let geom = DomainGeometry::interval(1.0).unwrap();
        assert_eq!(geom.normal_at(&[0.0]).unwrap(), [-1.0, 0.0]);
        assert_eq!(geom.normal_at(&[1.0]).unwrap(), [1.0, 0.0]);
        match geom.normal_at(&[0.5]) {
            Err(GeometryError::NotOnBoundary { distance, .. }) => {
                assert!((distance - 0.5).abs() < 1e-15);
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn disk_normal_is_radial() {
        let geom = DomainGeometry::disk(1.0).unwrap();
        assert_eq!(geom.normal_at(&[1.0, 0.0]).unwrap(), [1.0, 0.0]);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let n = geom.normal_at(&[inv_sqrt2, inv_sqrt2]).unwrap();
        assert!((n[0] - inv_sqrt2).abs() < 1e-12 && (n[1] - inv_sqrt2).abs() < 1e-12);
        assert!(geom.normal_at(&[0.5, 0.0]).is_err());
    }

    #[test]
    fn flat_graph_normal_is_vertical() {
        let geom = DomainGeometry::epigraph(|_| 0.0, 1.0).unwrap();
        let n = geom.normal_at(&[0.3, 0.0]).unwrap();
        assert!((n[0]).abs() < 1e-9 && (n[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unit_normal_everywhere() {
        let geom = DomainGeometry::epigraph(|s: f64| 0.3 * (2.0 * s).sin(), 1.0).unwrap();
        let mut rng = 11u64;
        for _ in 0..100 {
            let s = 2.0 * xorshift(&mut rng) - 1.0;
            let x = [s, 0.3 * (2.0 * s).sin()];
            let n = geom.normal_at(&x).unwrap();
            let len = (n[0] * n[0] + n[1] * n[1]).sqrt();
            assert!((len - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_chart_is_identity() {
        let chart = FlatteningChart::new(|_| 0.0, 1.0, 2.0).unwrap();
        let p = chart.flatten(&[0.2, -0.1]).unwrap();
        assert!((p[0] - 0.2).abs() < 1e-15 && (p[1] + 0.1).abs() < 1e-15);
        assert!((chart.jacobian_det(&[0.2, -0.1]) - 1.0).abs() < 1e-12);
        let y = chart.unflatten(&[0.2, -0.1]).unwrap();
        assert!((y[0] - 0.2).abs() < 1e-12 && (y[1] + 0.1).abs() < 1e-12);
    }

    #[test]
    fn parabola_chart_matches_direct_formula() {
        let chart = FlatteningChart::new_with_gradient(|s| s * s, |s| 2.0 * s, 0.5, 4.0).unwrap();
        let p = chart.flatten(&[0.1, 0.0]).unwrap();
        assert!((p[0] - 0.1).abs() < 1e-15);
        assert!((p[1] - 0.01).abs() < 1e-15);
        // at y_d = 0 the determinant is the metric factor |(Dψ,1)|
        let det = chart.jacobian_det(&[0.1, 0.0]);
        assert!((det - (1.0 + 0.04f64).sqrt()).abs() < 1e-9, "det {det}");

        // off the boundary: P = m(0.1) − 0.05 n(0.1) componentwise
        let p = chart.flatten(&[0.1, -0.05]).unwrap();
        let w = (1.0 + 0.04f64).sqrt();
        let n = [-0.2 / w, 1.0 / w];
        assert!((p[0] - (0.1 - 0.05 * n[0])).abs() < 1e-15);
        assert!((p[1] - (0.01 - 0.05 * n[1])).abs() < 1e-15);
    }

    #[test]
    fn normal_is_unit_and_orthogonal_to_tangent() {
        let chart = FlatteningChart::new(|s: f64| 0.2 * s * s - 0.1 * s, 1.0, 4.0).unwrap();
        let mut rng = 5u64;
        for _ in 0..200 {
            let s = 2.0 * xorshift(&mut rng) - 1.0;
            let n = chart.normal(s);
            assert!(((n[0] * n[0] + n[1] * n[1]).sqrt() - 1.0).abs() < 1e-10);
            // tangent of the graph: m′(s) = (1, ψ′(s)); the analytic ψ′
            // keeps this check independent of the differenced normal
            let dp = 0.4 * s - 0.1;
            assert!((n[0] + dp * n[1]).abs() < 1e-10, "tangent dot normal at {s}");
        }
    }

    #[test]
    fn round_trip_on_sampled_points() {
        let charts = [
            FlatteningChart::new_with_gradient(|s| s * s, |s| 2.0 * s, 0.5, 4.0).unwrap(),
            FlatteningChart::new(|s: f64| 0.25 * (3.0 * s).cos(), 0.5, 6.0).unwrap(),
        ];
        let mut rng = 17u64;
        for chart in &charts {
            for _ in 0..500 {
                // sample chart coordinates in the boundary collar (the
                // normal offset stays below the focal distance of the
                // curved graphs, past which the offset map folds), push
                // forward, and require the image to land back on itself
                let y = [0.9 * (2.0 * xorshift(&mut rng) - 1.0) * chart.half_width(),
                         0.3 * (2.0 * xorshift(&mut rng) - 1.0) * chart.half_width()];
                let x = chart.flatten(&y).unwrap();
                let y_back = chart.unflatten(&x).unwrap();
                let x_back = chart.flatten(&y_back).unwrap();
                let err = ((x_back[0] - x[0]).powi(2) + (x_back[1] - x[1]).powi(2)).sqrt();
                assert!(err < 1e-10, "round trip error {err:e} at {y:?}");
            }
        }
    }

    #[test]
    fn unflatten_sign_tracks_domain_side() {
        // domain below the graph: points under the parabola unflatten to
        // y_d < 0
        let chart = FlatteningChart::new_with_gradient(|s| s * s, |s| 2.0 * s, 0.5, 4.0).unwrap();
        let inside = chart.unflatten(&[0.1, -0.2]).unwrap();
        assert!(inside[1] < 0.0);
        let outside = chart.unflatten(&[0.1, 0.2]).unwrap();
        assert!(outside[1] > 0.0);
    }

    #[test]
    fn out_of_chart_inputs_are_rejected() {
        let chart = FlatteningChart::new_with_gradient(|s| s * s, |s| 2.0 * s, 0.5, 4.0).unwrap();
        assert!(matches!(chart.flatten(&[0.7, 0.0]), Err(GeometryError::OutOfChart { .. })));
        // far outside the image: the Newton solve converges to a point
        // outside the cube, which is rejected as out-of-chart
        assert!(chart.unflatten(&[3.0, 0.0]).is_err());
    }

    #[test]
    fn kappa_bound_holds_for_disk_and_parabola_charts() {
        // normal offsets are confined to the boundary collar (0.3 R):
        // the κ bound is a statement about where charts are used, and
        // past the focal distance of a curved graph the offset map folds
        let disk = DomainGeometry::disk(1.0).unwrap();
        let chart = disk.chart_at(&[1.0, 0.0], 0.4, 4.0).unwrap();
        let mut rng = 3u64;
        for _ in 0..500 {
            let y = [0.95 * (2.0 * xorshift(&mut rng) - 1.0) * 0.4,
                     0.3 * (2.0 * xorshift(&mut rng) - 1.0) * 0.4];
            let det = chart.jacobian_det(&y);
            assert!(det >= 0.25 && det <= 4.0, "disk chart det {det} at {y:?}");
            chart.flatten(&y).unwrap();
        }
        let parabola = FlatteningChart::new_with_gradient(|s| s * s, |s| 2.0 * s, 0.5, 4.0).unwrap();
        for _ in 0..500 {
            let y = [0.95 * (2.0 * xorshift(&mut rng) - 1.0) * 0.5,
                     0.3 * (2.0 * xorshift(&mut rng) - 1.0) * 0.5];
            let det = parabola.jacobian_det(&y);
            assert!(det >= 0.25 && det <= 4.0, "parabola chart det {det} at {y:?}");
        }
    }

    #[test]
    fn kappa_violation_is_reported() {
        // steep graph: |(Dψ,1)| = √(1+25) > κ at s away from 0
        let chart = FlatteningChart::new_with_gradient(|s| 5.0 * s, |_| 5.0, 0.5, 2.0).unwrap();
        match chart.flatten(&[0.1, 0.0]) {
            Err(GeometryError::ChartBoundViolated { det, kappa }) => {
                assert!(det > kappa);
            }
            other => panic!("expected chart-bound violation, got {other:?}"),
        }
    }

    #[test]
    fn disk_chart_matches_circle_geometry() {
        let disk = DomainGeometry::disk(2.0).unwrap();
        let chart = disk.chart_at(&[0.0, 2.0], 0.5, 4.0).unwrap();
        // the graph through the chart origin is the circle dropped by R₀
        assert!((chart.graph(0.0)).abs() < 1e-15);
        assert!((chart.graph(0.5) - ((4.0f64 - 0.25).sqrt() - 2.0)).abs() < 1e-12);
        // flattened points on {y_d = 0} live on the circle of radius R₀
        // in the chart frame centered at (0, −R₀)
        let p = chart.flatten(&[0.3, 0.0]).unwrap();
        let r = (p[0] * p[0] + (p[1] + 2.0) * (p[1] + 2.0)).sqrt();
        assert!((r - 2.0).abs() < 1e-12);
    }

    #[test]
    fn interval_chart_degenerates_to_identity() {
        let geom = DomainGeometry::interval(1.0).unwrap();
        let chart = geom.chart_at(&[0.0], 0.25, 2.0).unwrap();
        assert_eq!(chart.dim(), 1);
        let y = chart.unflatten(&[0.1]).unwrap();
        assert_eq!(y[0], 0.1);
        assert_eq!(chart.flatten(&[0.1]).unwrap()[0], 0.1);
        assert_eq!(chart.jacobian_det(&[0.1]), 1.0);
    }

    #[test]
    fn mirror_reflection_involution() {
        let z = PhaseState::new_2d(0.0, [1.0, 2.0], [3.0, 4.0]);
        let r = mirror_reflect(&z);
        assert_eq!(r, PhaseState::new_2d(0.0, [1.0, -2.0], [3.0, -4.0]));
        assert_eq!(mirror_reflect(&r), z);

        let mut rng = 29u64;
        for _ in 0..100 {
            let z = PhaseState::new_2d(
                xorshift(&mut rng),
                [xorshift(&mut rng), xorshift(&mut rng)],
                [xorshift(&mut rng), xorshift(&mut rng)],
            );
            let rr = mirror_reflect(&mirror_reflect(&z));
            assert_eq!(rr, z);
            let r = mirror_reflect(&z);
            assert_eq!(r.t, z.t);
            assert_eq!(r.x[0], z.x[0]);
            assert_eq!(r.v[0], z.v[0]);
        }
    }

    #[test]
    fn mirror_fixes_the_grazing_set() {
        let z = PhaseState::new_2d(0.5, [0.7, 0.0], [-1.2, 0.0]);
        assert_eq!(mirror_reflect(&z), z);
        // d = 1: everything is normal direction
        let z1 = PhaseState::new_1d(0.5, 0.3, -2.0);
        let r1 = mirror_reflect(&z1);
        assert_eq!(r1, PhaseState::new_1d(0.5, -0.3, 2.0));
    }

    #[test]
    fn constructors_reject_bad_extents() {
        assert!(DomainGeometry::interval(0.0).is_err());
        assert!(DomainGeometry::disk(-1.0).is_err());
        assert!(FlatteningChart::new(|_| 0.0, 1.0, 1.0).is_err());
        assert!(FlatteningChart::identity_1d(-0.5, 2.0).is_err());
    }
}
