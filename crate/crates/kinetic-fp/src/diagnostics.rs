//! Empirical regularity probes: Hölder seminorms in the kinetic
//! geometry, oscillation decay over shrinking cylinders, boundary
//! exponent fits, and the aggregated verdict report.
//!
//! The kinetic cylinder of radius r centered at z₀ = (t₀, x₀, v₀) is
//!
//! ```text
//!   Q_r(z₀) = { (t,x,v) : t₀ − r² < t ≤ t₀,
//!               |x − x₀ − (t − t₀) v₀| < r³,  |v − v₀| < r },
//! ```
//!
//! so time scales like r², velocity like r, and position like r³ along
//! the center's characteristic.  The distance used by the seminorm is
//! the smallest r at which the pair fits in one cylinder.  This scaling
//! unifies the two boundary exponents of the steady benchmark
//! f = x^{1/6} Ψ(−v³/9x): with x ~ r³ and v ~ r, both x^{1/6} and
//! |v|^{1/2} read r^{1/2}, so the field is kinetic-Hölder of exponent
//! exactly 1/2 near the characteristic corner, while the per-variable
//! power laws 1/6 (in x at v = 0) and 1/2 (in v at x = 0) are what
//! [`fit_boundary_exponents`] recovers from log-log slopes.
//!
//! All probes act on immutable [`LatticeField`] snapshots and are safe
//! to run concurrently over distinct centers.

use std::error::Error;
use std::fmt;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analytic::{SpecialError, SteadyBenchmark};
use crate::solver::SolutionField;
use crate::transforms::PhaseState;

/// Default number of sampled pairs for seminorm estimation.
pub const DEFAULT_PAIR_COUNT: usize = 100_000;

/// Default seed for the pair sampler; fixed so reruns reproduce.
pub const DEFAULT_PROBE_SEED: u64 = 0x51AB_BED5;

/// Log-log fits with rms residual above this are flagged as suspect.
pub const FIT_FLAG_RESIDUAL: f64 = 0.05;

#[derive(Debug)]
pub enum DiagnosticsError {
    /// Hölder exponents must lie in (0, 1].
    BadExponent(f64),
    /// Fewer than two lattice nodes fall inside the sampling region.
    RegionTooSmall { nodes: usize },
    /// Fewer than three ladder cylinders contain two or more nodes.
    TooFewCylinders { found: usize },
    /// A log-log fit needs at least five samples.
    TooFewSamples { found: usize },
    /// Log-log fitting requires strictly positive data.
    NonPositiveSample { value: f64 },
    BadLadder(String),
    /// Axis/value shapes that do not assemble into a lattice.
    BadLattice(String),
    /// A verdict needs at least one check.
    NoChecks,
    Special(SpecialError),
}

impl fmt::Display for DiagnosticsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagnosticsError::BadExponent(a) => {
                write!(f, "Hölder exponent must lie in (0, 1], got {a}")
            }
            DiagnosticsError::RegionTooSmall { nodes } => {
                write!(f, "region holds {nodes} lattice node(s); pair sampling needs two")
            }
            DiagnosticsError::TooFewCylinders { found } => {
                write!(f, "only {found} ladder cylinder(s) contain enough nodes; need three")
            }
            DiagnosticsError::TooFewSamples { found } => {
                write!(f, "log-log fit needs at least five samples, got {found}")
            }
            DiagnosticsError::NonPositiveSample { value } => {
                write!(f, "log-log fit requires positive samples, got {value}")
            }
            DiagnosticsError::BadLadder(msg) => write!(f, "scale ladder: {msg}"),
            DiagnosticsError::BadLattice(msg) => write!(f, "lattice field: {msg}"),
            DiagnosticsError::NoChecks => write!(f, "verdict requires at least one check"),
            DiagnosticsError::Special(e) => write!(f, "benchmark evaluation: {e}"),
        }
    }
}

impl Error for DiagnosticsError {
    fn source(&self) -> Option<&(dyn Error + 'static)> {
        match self {
            DiagnosticsError::Special(e) => Some(e),
            _ => None,
        }
    }
}

impl From<SpecialError> for DiagnosticsError {
    fn from(e: SpecialError) -> Self {
        DiagnosticsError::Special(e)
    }
}

/// Smallest cylinder radius r such that the earlier of the two points
/// lies in Q_r centered at the later one (whose velocity defines the
/// characteristic the position offset is measured along):
/// max(√Δt, |Δv|, |offset|^{1/3}).  Symmetric whenever the times agree.
pub fn kinetic_distance(a: &PhaseState, b: &PhaseState) -> f64 {
    debug_assert_eq!(a.dim, b.dim);
    let (c, p) = if a.t >= b.t { (a, b) } else { (b, a) };
    let dt = c.t - p.t;
    let mut dv2 = 0.0;
    let mut off2 = 0.0;
    for k in 0..c.dim {
        let dvk = p.v[k] - c.v[k];
        dv2 += dvk * dvk;
        let ok = p.x[k] - c.x[k] + dt * c.v[k];
        off2 += ok * ok;
    }
    dt.sqrt().max(dv2.sqrt()).max(off2.sqrt().cbrt())
}

/// A field sampled on a rectangular (x, v) lattice at one time level.
/// Probes compare lattice values only, so a refinement study is a
/// sequence of `LatticeField`s with finer node sets.
#[derive(Debug, Clone)]
pub struct LatticeField {
    xs: Vec<f64>,
    vs: Vec<f64>,
    values: Vec<f64>,
}

impl LatticeField {
    pub fn from_fn<F: Fn(f64, f64) -> f64>(xs: Vec<f64>, vs: Vec<f64>, f: F) -> LatticeField {
        let mut values = Vec::with_capacity(xs.len() * vs.len());
        for &x in &xs {
            for &v in &vs {
                values.push(f(x, v));
            }
        }
        LatticeField { xs, vs, values }
    }

    /// Assemble from explicit axes and row-major values (x outer, v
    /// inner); axes must be strictly increasing.
    pub fn from_values(
        xs: Vec<f64>,
        vs: Vec<f64>,
        values: Vec<f64>,
    ) -> Result<LatticeField, DiagnosticsError> {
        if values.len() != xs.len() * vs.len() {
            return Err(DiagnosticsError::BadLattice(format!(
                "{} values cannot fill a {} x {} lattice",
                values.len(),
                xs.len(),
                vs.len()
            )));
        }
        for axis in [&xs, &vs] {
            if axis.is_empty() {
                return Err(DiagnosticsError::BadLattice("empty axis".to_string()));
            }
            if axis.windows(2).any(|w| !(w[1] > w[0])) || axis.iter().any(|a| !a.is_finite()) {
                return Err(DiagnosticsError::BadLattice(
                    "axes must be finite and strictly increasing".to_string(),
                ));
            }
        }
        Ok(LatticeField { xs, vs, values })
    }

    /// Snapshot of a solver field: cell centers by velocity nodes.
    pub fn from_solution(f: &SolutionField) -> LatticeField {
        let g = f.grid();
        let xs = (0..g.nx).map(|i| g.x_center(i)).collect();
        let vs = (0..=g.nv).map(|j| g.v_node(j)).collect();
        LatticeField { xs, vs, values: f.values().to_vec() }
    }

    /// One-dimensional profile in v at a single x station.
    pub fn v_line<F: Fn(f64) -> f64>(x: f64, vs: Vec<f64>, f: F) -> LatticeField {
        LatticeField::from_fn(vec![x], vs, move |_, v| f(v))
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn vs(&self) -> &[f64] {
        &self.vs
    }

    pub fn value(&self, ix: usize, iv: usize) -> f64 {
        self.values[ix * self.vs.len() + iv]
    }
}

/// Rectangular sampling window in (x, v); bounds are inclusive.
#[derive(Debug, Clone, Copy)]
pub struct SampleRegion {
    pub x: (f64, f64),
    pub v: (f64, f64),
}

impl SampleRegion {
    pub fn new(x: (f64, f64), v: (f64, f64)) -> SampleRegion {
        SampleRegion { x, v }
    }

    /// The whole lattice.
    pub fn all() -> SampleRegion {
        SampleRegion {
            x: (f64::NEG_INFINITY, f64::INFINITY),
            v: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn contains(&self, x: f64, v: f64) -> bool {
        x >= self.x.0 && x <= self.x.1 && v >= self.v.0 && v <= self.v.1
    }
}

/// Estimates the Hölder seminorm sup |f(z) − f(z′)| / dist(z, z′)^α
/// over lattice node pairs in the region, with the cylinder-entry
/// distance of [`kinetic_distance`] (at equal times: max of |Δv| and
/// |Δx|^{1/3}).  All pairs are compared when their count fits the
/// budget; otherwise `pairs` node pairs are drawn with a seeded
/// generator, so reruns reproduce.
pub fn holder_seminorm(
    field: &LatticeField,
    alpha: f64,
    region: &SampleRegion,
    pairs: usize,
    seed: u64,
) -> Result<f64, DiagnosticsError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(DiagnosticsError::BadExponent(alpha));
    }
    let mut nodes: Vec<(f64, f64, f64)> = Vec::new();
    for (ix, &x) in field.xs.iter().enumerate() {
        for (iv, &v) in field.vs.iter().enumerate() {
            if region.contains(x, v) {
                nodes.push((x, v, field.value(ix, iv)));
            }
        }
    }
    let n = nodes.len();
    if n < 2 {
        return Err(DiagnosticsError::RegionTooSmall { nodes: n });
    }

    let ratio_of = |a: &(f64, f64, f64), b: &(f64, f64, f64)| -> f64 {
        let za = PhaseState::new_1d(0.0, a.0, a.1);
        let zb = PhaseState::new_1d(0.0, b.0, b.1);
        let d = kinetic_distance(&za, &zb);
        if d == 0.0 {
            0.0
        } else {
            (a.2 - b.2).abs() / d.powf(alpha)
        }
    };

    let mut best = 0.0f64;
    let total = n * (n - 1) / 2;
    if total <= pairs {
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.max(ratio_of(&nodes[i], &nodes[j]));
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut drawn = 0usize;
        while drawn < pairs {
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            if i == j {
                continue;
            }
            best = best.max(ratio_of(&nodes[i], &nodes[j]));
            drawn += 1;
        }
    }
    Ok(best)
}

/// Geometric ladder of cylinder radii r_k = r₀ ϱ^k, k = 0..depth.
#[derive(Debug, Clone, Copy)]
pub struct ScaleLadder {
    pub r0: f64,
    pub ratio: f64,
    pub depth: usize,
}

impl ScaleLadder {
    pub const DEFAULT_RATIO: f64 = 0.5;

    pub fn new(r0: f64, ratio: f64, depth: usize) -> Result<ScaleLadder, DiagnosticsError> {
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(DiagnosticsError::BadLadder(format!("top radius must be positive, got {r0}")));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(DiagnosticsError::BadLadder(format!(
                "ratio must lie in (0, 1), got {ratio}"
            )));
        }
        if depth < 2 {
            return Err(DiagnosticsError::BadLadder(format!(
                "depth must be at least 2, got {depth}"
            )));
        }
        Ok(ScaleLadder { r0, ratio, depth })
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..=self.depth).map(|k| self.r0 * self.ratio.powi(k as i32)).collect()
    }
}

/// Oscillation-decay measurement at one center: realized radii (the
/// ladder truncates where cylinders stop holding two lattice nodes),
/// oscillations osc_k = max − min over Q_{r_k} ∩ lattice, and the
/// least-squares slope of log osc against log r (an empirical Hölder
/// exponent at the center).
#[derive(Debug, Clone, Serialize)]
pub struct HolderProbe {
    pub center: (f64, f64),
    pub radii: Vec<f64>,
    pub oscillations: Vec<f64>,
    pub slope: f64,
    pub residual: f64,
}

/// Measures oscillations of the field over the shrinking cylinders
/// {|x − x₀| < r³, |v − v₀| < r} and fits the decay rate.  Nesting is
/// exact by construction (deeper cylinders see subsets of the same
/// nodes), so the oscillation sequence is asserted non-increasing.
pub fn oscillation_decay(
    field: &LatticeField,
    center: (f64, f64),
    ladder: &ScaleLadder,
) -> Result<HolderProbe, DiagnosticsError> {
    let (x0, v0) = center;
    let mut radii = Vec::new();
    let mut oscillations = Vec::new();
    for r in ladder.radii() {
        let (rx, rv) = (r * r * r, r);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut count = 0usize;
        for (ix, &x) in field.xs.iter().enumerate() {
            if (x - x0).abs() >= rx {
                continue;
            }
            for (iv, &v) in field.vs.iter().enumerate() {
                if (v - v0).abs() >= rv {
                    continue;
                }
                let val = field.value(ix, iv);
                lo = lo.min(val);
                hi = hi.max(val);
                count += 1;
            }
        }
        if count < 2 {
            // cylinders nest, so every deeper one is empty too
            break;
        }
        radii.push(r);
        oscillations.push(hi - lo);
    }
    if radii.len() < 3 {
        return Err(DiagnosticsError::TooFewCylinders { found: radii.len() });
    }
    for w in oscillations.windows(2) {
        assert!(w[1] <= w[0], "oscillations must not increase down the ladder");
    }

    // fit over positive oscillations; a field constant at the center
    // has nothing to fit and reports a zero rate
    let fit_r: Vec<f64> = radii
        .iter()
        .zip(&oscillations)
        .filter(|(_, &o)| o > 0.0)
        .map(|(&r, _)| r)
        .collect();
    let fit_o: Vec<f64> = oscillations.iter().copied().filter(|&o| o > 0.0).collect();
    let (slope, residual) = if fit_r.len() >= 2 {
        least_squares_loglog(&fit_r, &fit_o)
    } else {
        (0.0, 0.0)
    };

    Ok(HolderProbe { center, radii, oscillations, slope, residual })
}

/// Plain least-squares line through (ln x, ln y); returns (slope, rms
/// residual).  Callers guarantee positive data and length ≥ 2.
fn least_squares_loglog(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let us: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ws: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let um = us.iter().sum::<f64>() / n;
    let wm = ws.iter().sum::<f64>() / n;
    let mut suw = 0.0;
    let mut suu = 0.0;
    for (u, w) in us.iter().zip(&ws) {
        suw += (u - um) * (w - wm);
        suu += (u - um) * (u - um);
    }
    let slope = if suu > 0.0 { suw / suu } else { 0.0 };
    let intercept = wm - slope * um;
    let mut rss = 0.0;
    for (u, w) in us.iter().zip(&ws) {
        let r = w - (intercept + slope * u);
        rss += r * r;
    }
    (slope, (rss / n).sqrt())
}

/// A completed log-log regression: the stored samples, the fitted
/// slope and intercept, the rms residual, a rough 95% half-width on
/// the slope, and whether the residual exceeds [`FIT_FLAG_RESIDUAL`].
#[derive(Debug, Clone, Serialize)]
pub struct ExponentFit {
    pub log_abscissa: Vec<f64>,
    pub log_ordinate: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub half_width: f64,
    pub flagged: bool,
}

/// Least-squares power-law fit y ≈ C xᵃ; needs at least five strictly
/// positive samples.
pub fn fit_log_log(abscissa: &[f64], ordinate: &[f64]) -> Result<ExponentFit, DiagnosticsError> {
    let n = abscissa.len().min(ordinate.len());
    if n < 5 {
        return Err(DiagnosticsError::TooFewSamples { found: n });
    }
    for &x in abscissa.iter().chain(ordinate.iter()) {
        if !(x > 0.0 && x.is_finite()) {
            return Err(DiagnosticsError::NonPositiveSample { value: x });
        }
    }
    let us: Vec<f64> = abscissa[..n].iter().map(|x| x.ln()).collect();
    let ws: Vec<f64> = ordinate[..n].iter().map(|y| y.ln()).collect();
    let nf = n as f64;
    let um = us.iter().sum::<f64>() / nf;
    let wm = ws.iter().sum::<f64>() / nf;
    let mut suw = 0.0;
    let mut suu = 0.0;
    for (u, w) in us.iter().zip(&ws) {
        suw += (u - um) * (w - wm);
        suu += (u - um) * (u - um);
    }
    if suu == 0.0 {
        return Err(DiagnosticsError::NonPositiveSample { value: 0.0 });
    }
    let slope = suw / suu;
    let intercept = wm - slope * um;
    let mut rss = 0.0;
    for (u, w) in us.iter().zip(&ws) {
        let r = w - (intercept + slope * u);
        rss += r * r;
    }
    let residual = (rss / nf).sqrt();
    let half_width = 2.0 * (rss / (nf - 2.0) / suu).sqrt();
    Ok(ExponentFit {
        log_abscissa: us,
        log_ordinate: ws,
        slope,
        intercept,
        residual,
        half_width,
        flagged: residual > FIT_FLAG_RESIDUAL,
    })
}

/// The two boundary power laws of the steady benchmark.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryFit {
    /// Slope of log f(x, 0) against log x; the exact value is 1/6.
    pub alpha_x: ExponentFit,
    /// Slope of log f(0⁺, −v) against log v; the limit law is
    /// 3^{−1/3} v^{1/2}.
    pub alpha_v: ExponentFit,
}

/// Fits the boundary exponents of the steady benchmark: f(x, 0) over
/// x ∈ [1e−6, 1e−2] for the x-law, and f(x₀, −v) over v ∈ [1e−3, 1e−1]
/// for the v-law, with x₀ = 1e−12 standing in for the x → 0 limit.
/// The proxy must satisfy (9 x₀)^{1/3} ≪ min v, or the plateau where
/// Ψ has not yet left its τ = 0 value bends the low decade of the fit
/// and drags the slope visibly below 1/2 (x₀ = 1e−8 already biases it
/// to 0.46); at 1e−12 the bend sits at v ≈ 2e−4, safely outside.
pub fn fit_boundary_exponents(bench: &SteadyBenchmark) -> Result<BoundaryFit, DiagnosticsError> {
    let n = 25;
    let geometric = |lo: f64, hi: f64| -> Vec<f64> {
        (0..n)
            .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
            .collect()
    };

    let xs = geometric(1e-6, 1e-2);
    let mut fx = Vec::with_capacity(n);
    for &x in &xs {
        fx.push(bench.value(x, 0.0)?);
    }
    let alpha_x = fit_log_log(&xs, &fx)?;

    let vs = geometric(1e-3, 1e-1);
    let mut fv = Vec::with_capacity(n);
    for &v in &vs {
        fv.push(bench.value(1e-12, -v)?);
    }
    let alpha_v = fit_log_log(&vs, &fv)?;

    Ok(BoundaryFit { alpha_x, alpha_v })
}

/// One named check with its measured value and tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub context: String,
}

impl CheckRecord {
    pub fn new(name: &str, passed: bool, measured: f64, tolerance: f64, context: &str) -> Self {
        CheckRecord {
            name: name.to_string(),
            passed,
            measured,
            tolerance,
            context: context.to_string(),
        }
    }
}

/// Aggregated verdict over a batch of checks.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub overall_pass: bool,
    pub checks: Vec<CheckRecord>,
    pub grid_note: String,
    pub config_hash: String,
}

impl DiagnosticsReport {
    /// Names of the failing checks, in order.
    pub fn failing(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}

/// Builds the report; refuses an empty check list.
pub fn verdict(
    checks: Vec<CheckRecord>,
    grid_note: &str,
    config_hash: &str,
) -> Result<DiagnosticsReport, DiagnosticsError> {
    if checks.is_empty() {
        return Err(DiagnosticsError::NoChecks);
    }
    let overall_pass = checks.iter().all(|c| c.passed);
    Ok(DiagnosticsReport {
        overall_pass,
        checks,
        grid_note: grid_note.to_string(),
        config_hash: config_hash.to_string(),
    })
}
