//! Batch pipeline behind the command-line front end: materialize a run
//! configuration into solver objects, march it, probe it, and write the
//! stamped artifacts.  The second half hosts the named acceptance
//! checks that `verify` and the acceptance test suite share, grouped
//! into suites (`all`, `analytic`, `solver`, `iteration`, `geometry`).

use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::{kummer_m, tricomi_psi, SpecialError, SteadyBenchmark};
use crate::boundary::{boundary_maxwellian, BoundaryError, BoundarySpec};
use crate::config::{
    BoundaryVariant, CoeffPreset, CoeffSpec, ConfigError, DataSpec, Probe, RunConfig,
};
use crate::diagnostics::{
    fit_boundary_exponents, holder_seminorm, oscillation_decay, verdict, CheckRecord,
    DiagnosticsError, DiagnosticsReport, HolderProbe, LatticeField, SampleRegion, ScaleLadder,
};
use crate::geometry::{DomainGeometry, FlatteningChart, GeometryError};
use crate::iteration::{
    diffuse_slab_iterate, specular_iterate, IterationConfig, IterationError, ReflectionProblem,
};
use crate::report::{
    self, config_hash, fmt_shortest, write_artifact, write_decay_csv, write_field_csv,
    write_ledger_json, write_report_json, ReportError,
};
use crate::solver::{
    step, step_viscous, CoefficientError, CoefficientField, Grid, GridError, SampleBox,
    SolutionField, SolverConfig, SolverError, VBox,
};
use crate::transforms::PhaseState;

mod reference {
    #![allow(dead_code)]
    include!("../tests/data/reference_tables.rs");
}

/// 3^{−1/3}, the prefactor of the x → 0⁺ trace law |v|^{1/2}·3^{−1/3}
/// on the incoming side.
const TRACE_PREFACTOR: f64 = 0.693_361_274_350_634_7;

pub enum DriverError {
    Config(ConfigError),
    Coefficient(CoefficientError),
    Solver(SolverError),
    Grid(GridError),
    Boundary(BoundaryError),
    Iteration(IterationError),
    Diagnostics(DiagnosticsError),
    Report(ReportError),
    Special(SpecialError),
    Geometry(GeometryError),
    /// Malformed command or input that never reached the solver.
    Usage(String),
    Csv { path: PathBuf, line: usize, msg: String },
}

impl fmt::Display for DriverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DriverError::Config(e) => write!(f, "config: {e}"),
            DriverError::Coefficient(e) => write!(f, "coefficients: {e}"),
            DriverError::Solver(e) => write!(f, "solver: {e}"),
            DriverError::Grid(e) => write!(f, "grid: {e}"),
            DriverError::Boundary(e) => write!(f, "boundary: {e}"),
            DriverError::Iteration(e) => write!(f, "iteration: {e}"),
            DriverError::Diagnostics(e) => write!(f, "diagnostics: {e}"),
            DriverError::Report(e) => write!(f, "artifact: {e}"),
            DriverError::Special(e) => write!(f, "special function: {e}"),
            DriverError::Geometry(e) => write!(f, "geometry: {e}"),
            DriverError::Usage(msg) => write!(f, "usage: {msg}"),
            DriverError::Csv { path, line, msg } => {
                write!(f, "{}:{line}: {msg}", path.display())
            }
        }
    }
}

impl fmt::Debug for DriverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::error::Error for DriverError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            DriverError::Config(e) => Some(e),
            DriverError::Coefficient(e) => Some(e),
            DriverError::Solver(e) => Some(e),
            DriverError::Grid(e) => Some(e),
            DriverError::Boundary(e) => Some(e),
            DriverError::Iteration(e) => Some(e),
            DriverError::Diagnostics(e) => Some(e),
            DriverError::Report(e) => Some(e),
            DriverError::Special(e) => Some(e),
            DriverError::Geometry(e) => Some(e),
            DriverError::Usage(_) | DriverError::Csv { .. } => None,
        }
    }
}

macro_rules! from_err {
    ($variant:ident, $ty:ty) => {
        impl From<$ty> for DriverError {
            fn from(e: $ty) -> Self {
                DriverError::$variant(e)
            }
        }
    };
}

from_err!(Config, ConfigError);
from_err!(Coefficient, CoefficientError);
from_err!(Solver, SolverError);
from_err!(Grid, GridError);
from_err!(Boundary, BoundaryError);
from_err!(Iteration, IterationError);
from_err!(Diagnostics, DiagnosticsError);
from_err!(Report, ReportError);
from_err!(Special, SpecialError);
from_err!(Geometry, GeometryError);

/// Everything a finished run hands back: the verdict that went into
/// `report.json`, the artifact paths written, and the final field for
/// callers that keep probing.
pub struct RunOutcome {
    pub report: DiagnosticsReport,
    pub artifacts: Vec<PathBuf>,
    pub final_field: SolutionField,
}

/// Steady-benchmark value extended to the closure of the quadrant:
/// the x → 0⁺ trace is |v|^{1/2}·3^{−1/3} on v < 0 and zero on v ≥ 0.
pub fn benchmark_value(x: f64, v: f64) -> f64 {
    if x > 0.0 {
        SteadyBenchmark.value(x, v).unwrap_or(f64::NAN)
    } else if v < 0.0 {
        TRACE_PREFACTOR * v.abs().sqrt()
    } else {
        0.0
    }
}

type Data3 = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

fn data_fn(spec: &DataSpec) -> Data3 {
    match spec {
        DataSpec::Zero => Arc::new(|_, _, _| 0.0),
        DataSpec::Benchmark => Arc::new(|_, x, v| benchmark_value(x, v)),
        DataSpec::Expression(e) => {
            let e = e.clone();
            Arc::new(move |t, x, v| e.eval(t, [x, 0.0], [v, 0.0]))
        }
        DataSpec::Table(p) => {
            let p = p.clone();
            Arc::new(move |_, _, v| p.eval(v))
        }
    }
}

fn build_coefficients(spec: &CoeffSpec) -> CoefficientField {
    match spec {
        CoeffSpec::Preset(CoeffPreset::TransportDiffusion) => CoefficientField::isotropic_unit(),
        CoeffSpec::Preset(CoeffPreset::DampedDiffusion) => CoefficientField::from_closures(
            |_| [[1.0, 0.0], [0.0, 1.0]],
            |_| [0.0, 0.0],
            |_| -0.3,
            |_| 0.0,
            2.0,
        ),
        CoeffSpec::Expressions { a, b, c, s, lambda } => {
            let (a, b, c, s) = (a.clone(), b.clone(), c.clone(), s.clone());
            CoefficientField::from_closures(
                move |z: &PhaseState| {
                    let av = a.eval_state(z);
                    [[av, 0.0], [0.0, av]]
                },
                move |z: &PhaseState| [b.eval_state(z), 0.0],
                move |z: &PhaseState| c.eval_state(z),
                move |z: &PhaseState| s.eval_state(z),
                *lambda,
            )
        }
    }
}

fn build_boundary(cfg: &RunConfig) -> Result<BoundarySpec, DriverError> {
    Ok(match cfg.boundary.variant {
        BoundaryVariant::Inflow => {
            let g = data_fn(&cfg.boundary.data);
            BoundarySpec::inflow(move |t, x, v| g(t, x, v))
        }
        BoundaryVariant::Absorbing => BoundarySpec::absorbing(),
        BoundaryVariant::Specular => BoundarySpec::Specular,
        BoundaryVariant::DampedSpecular => BoundarySpec::damped_specular(cfg.boundary.damping)?,
        BoundaryVariant::Diffuse => {
            BoundarySpec::Diffuse(boundary_maxwellian(cfg.boundary.theta, 1)?)
        }
    })
}

fn build_vbox(spec: &DataSpec) -> VBox {
    match spec {
        DataSpec::Zero => VBox::Zero,
        other => {
            let g = data_fn(other);
            VBox::data(move |t, x, v| g(t, x, v))
        }
    }
}

/// True when the sampled lower-order coefficients vanish on the run
/// box, which is the regime where the scheme should conserve mass
/// under reflecting walls.
fn conserves_mass(coeffs: &CoefficientField, grid: &Grid, t_end: f64) -> bool {
    let mut worst = 0.0f64;
    for it in 0..5 {
        let t = t_end * it as f64 / 4.0;
        for ix in 0..7 {
            let x = grid.length * (ix as f64 + 0.5) / 7.0;
            for iv in 0..9 {
                let v = grid.vmax * (2.0 * (iv as f64 + 0.5) / 9.0 - 1.0);
                let z = PhaseState::new_1d(t, x, v);
                let b = coeffs.b(&z);
                worst = worst.max(b[0].abs()).max(b[1].abs());
                worst = worst.max(coeffs.c(&z).abs()).max(coeffs.s(&z).abs());
            }
        }
    }
    worst < 1e-14
}

/// Max relative residual of v ∂x f − ∂v² f for the analytic evaluator
/// over [0.01, 10] × [−5, 5] on an `n` × `n` grid.
fn analytic_residual(n: usize) -> Result<f64, SpecialError> {
    let bench = SteadyBenchmark;
    let mut worst = 0.0f64;
    for i in 0..n {
        let x = 0.01 + (10.0 - 0.01) * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let v = -5.0 + 10.0 * j as f64 / (n - 1) as f64;
            let d = bench.derivatives(x, v)?;
            let lhs = v * d.f_x;
            let scale = lhs.abs().max(d.f_vv.abs()).max(1e-300);
            worst = worst.max((lhs - d.f_vv).abs() / scale);
        }
    }
    Ok(worst)
}

fn rel_l2_to_benchmark(f: &SolutionField) -> f64 {
    let g = f.grid();
    let truth = SolutionField::new(g.clone(), 0.0, benchmark_value);
    f.l2_distance(&truth) / truth.weighted_l2_sq(0.0).sqrt()
}

/// Runs one configured simulation end to end and writes the requested
/// artifacts into `out_dir` (created if missing).  The returned report
/// is the same object serialized to `report.json`.  The decay artifact
/// only exists when the oscillation probe ran; a decay name without
/// that probe is skipped.
pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome, DriverError> {
    let hash = config_hash(&cfg.source);
    let grid = cfg.grid.build()?;
    let coeffs = build_coefficients(&cfg.coefficients);
    let box_1d = SampleBox::new_1d(
        (0.0, cfg.grid.t_end),
        (0.0, cfg.grid.length),
        (-cfg.grid.vmax, cfg.grid.vmax),
    );
    coeffs.spot_check(&box_1d, 200, cfg.seed)?;
    let spec = build_boundary(cfg)?;
    let solver = cfg.scheme.build(build_vbox(&cfg.vbox));
    solver.validate()?;
    let initial = data_fn(&cfg.initial);
    let init = {
        let initial = initial.clone();
        move |x: f64, v: f64| initial(0.0, x, v)
    };

    let mut f = SolutionField::new(grid.clone(), 0.0, &init);
    let mass0 = f.mass();
    let steps = cfg.grid.steps();
    for _ in 0..steps {
        f = step(&f, &coeffs, &spec, &solver)?;
    }

    let mut checks: Vec<CheckRecord> = Vec::new();
    let max_abs = f.max_abs();
    checks.push(CheckRecord::new(
        "run_completed",
        max_abs.is_finite(),
        max_abs,
        f64::MAX,
        &format!("{} steps to t = {}; sup |f| stays finite", steps, fmt_shortest(f.t)),
    ));

    let reflecting = matches!(
        cfg.boundary.variant,
        BoundaryVariant::Specular | BoundaryVariant::Diffuse
    );
    if reflecting && conserves_mass(&coeffs, &grid, cfg.grid.t_end) && cfg.grid.t_end > 0.0 {
        let tol = if cfg.boundary.variant == BoundaryVariant::Specular { 1e-6 } else { 1e-4 };
        let drift = (f.mass() - mass0).abs() / (mass0.max(1e-300) * cfg.grid.t_end);
        checks.push(CheckRecord::new(
            "mass_drift",
            drift <= tol,
            drift,
            tol,
            "relative mass drift per unit time under reflecting walls",
        ));
    }

    if cfg.boundary.variant == BoundaryVariant::Inflow
        && matches!(cfg.initial, DataSpec::Benchmark)
        && matches!(cfg.boundary.data, DataSpec::Benchmark)
    {
        let err = rel_l2_to_benchmark(&f);
        checks.push(CheckRecord::new(
            "benchmark_l2_error",
            err <= 0.05,
            err,
            0.05,
            "relative L2 distance between the marched and analytic fields",
        ));
    }

    if let Some(iter_cfg) = &cfg.iteration {
        checks.extend(run_iteration_probe(cfg, iter_cfg, &grid, &coeffs, &solver, &init)?);
    }

    let mut decay_probe: Option<HolderProbe> = None;
    for probe in &cfg.diagnostics.probes {
        match probe {
            Probe::Exponents => {
                let fit = fit_boundary_exponents(&SteadyBenchmark)?;
                let dx = (fit.alpha_x.slope - 1.0 / 6.0).abs();
                checks.push(CheckRecord::new(
                    "alpha_x",
                    dx <= 1e-3,
                    dx,
                    1e-3,
                    &format!("fitted {}, exact 1/6", fmt_shortest(fit.alpha_x.slope)),
                ));
                let dv = (fit.alpha_v.slope - 0.5).abs();
                checks.push(CheckRecord::new(
                    "alpha_v",
                    dv <= 0.02,
                    dv,
                    0.02,
                    &format!("fitted {}, exact 1/2", fmt_shortest(fit.alpha_v.slope)),
                ));
                let res = analytic_residual(100)?;
                checks.push(CheckRecord::new(
                    "analytic_residual",
                    res <= cfg.diagnostics.residual_tol,
                    res,
                    cfg.diagnostics.residual_tol,
                    "max relative residual of v fx - fvv on [0.01,10] x [-5,5], 100 x 100",
                ));
            }
            Probe::Seminorm => {
                let field = LatticeField::from_solution(&f);
                let region = match cfg.diagnostics.region {
                    Some((x0, x1, v0, v1)) => SampleRegion::new((x0, x1), (v0, v1)),
                    None => SampleRegion::all(),
                };
                let value = holder_seminorm(
                    &field,
                    cfg.diagnostics.alpha,
                    &region,
                    cfg.diagnostics.pair_count,
                    cfg.seed,
                )?;
                checks.push(CheckRecord::new(
                    "holder_seminorm",
                    value.is_finite(),
                    value,
                    f64::MAX,
                    &format!(
                        "sampled kinetic seminorm at alpha = {}",
                        fmt_shortest(cfg.diagnostics.alpha)
                    ),
                ));
            }
            Probe::Oscillation => {
                let field = LatticeField::from_solution(&f);
                let ladder = ScaleLadder::new(
                    cfg.diagnostics.ladder_r0,
                    cfg.diagnostics.ladder_ratio,
                    cfg.diagnostics.ladder_depth,
                )?;
                let probe = oscillation_decay(&field, cfg.diagnostics.center, &ladder)?;
                checks.push(CheckRecord::new(
                    "oscillation_decay",
                    probe.slope >= 0.0,
                    probe.slope,
                    0.0,
                    "log-log slope of shrinking-cylinder oscillations (decay is nonnegative)",
                ));
                decay_probe = Some(probe);
            }
        }
    }

    let note = format!(
        "{} x {} cells, dt = {}, t_end = {}",
        grid.nx,
        grid.nv,
        fmt_shortest(grid.dt),
        fmt_shortest(cfg.grid.t_end)
    );
    let report = verdict(checks, &note, &hash)?;

    fs::create_dir_all(out_dir).map_err(|e| DriverError::Report(ReportError::Io(e)))?;
    let mut artifacts = Vec::new();
    if let Some(name) = &cfg.output.fields {
        let path = out_dir.join(name);
        write_artifact(&path, |mut w| write_field_csv(&mut w, &f, &hash))?;
        artifacts.push(path);
    }
    if let Some(name) = &cfg.output.ledger {
        let path = out_dir.join(name);
        write_artifact(&path, |mut w| write_ledger_json(&mut w, f.ledger(), &hash))?;
        artifacts.push(path);
    }
    if let Some(probe) = &decay_probe {
        if let Some(name) = &cfg.output.decay {
            let path = out_dir.join(name);
            write_artifact(&path, |mut w| write_decay_csv(&mut w, probe, &hash))?;
            artifacts.push(path);
        }
    }
    if let Some(name) = &cfg.output.report {
        let path = out_dir.join(name);
        write_artifact(&path, |mut w| write_report_json(&mut w, &report, &hash))?;
        artifacts.push(path);
    }

    Ok(RunOutcome { report, artifacts, final_field: f })
}

fn run_iteration_probe(
    cfg: &RunConfig,
    iter_cfg: &IterationConfig,
    grid: &Grid,
    coeffs: &CoefficientField,
    solver: &SolverConfig,
    init: &(impl Fn(f64, f64) -> f64 + Send + Sync + Clone + 'static),
) -> Result<Vec<CheckRecord>, DriverError> {
    let problem = ReflectionProblem::new(
        grid.clone(),
        coeffs.clone(),
        solver.clone(),
        init.clone(),
        cfg.grid.t_end,
    );
    let mut checks = Vec::new();
    let floor = (10.0 * iter_cfg.defect_tol).powi(2);
    match cfg.boundary.variant {
        BoundaryVariant::Specular | BoundaryVariant::DampedSpecular => {
            let trace = specular_iterate(&problem, iter_cfg)?;
            checks.push(CheckRecord::new(
                "iteration_converged",
                trace.converged,
                trace.iterations as f64,
                iter_cfg.max_iters as f64,
                "absorbing-sweep fixed point reached within the iteration budget",
            ));
            let a = iter_cfg.damping;
            if a == 0.0 {
                checks.push(CheckRecord::new(
                    "iteration_single_shot",
                    trace.iterations == 1,
                    trace.iterations as f64,
                    1.0,
                    "zero damping converges in one sweep exactly",
                ));
            } else {
                let mut worst = 0.0f64;
                for (n, r) in trace.ratios().iter().enumerate() {
                    if n >= 1 && trace.boundary_defects[n] > floor {
                        worst = worst.max(r / (a * a));
                    }
                }
                checks.push(CheckRecord::new(
                    "iteration_contraction",
                    worst <= 1.2,
                    worst,
                    1.2,
                    "squared-defect quotients against the damping-squared rate",
                ));
            }
        }
        BoundaryVariant::Diffuse => {
            let weight = boundary_maxwellian(cfg.boundary.theta, 1)?;
            let trace = diffuse_slab_iterate(&problem, &weight, iter_cfg)?;
            let mut worst = 0.0f64;
            for slab in &trace.slabs {
                for (n, r) in slab.ratios().iter().enumerate() {
                    if n >= 1 && slab.boundary_defects[n] > floor {
                        worst = worst.max(*r);
                    }
                }
            }
            checks.push(CheckRecord::new(
                "slab_contraction",
                worst <= 0.6,
                worst,
                0.6,
                &format!("per-slab defect quotients over {} slab(s)", trace.slabs.len()),
            ));
            checks.push(CheckRecord::new(
                "slab_boundary_identity",
                trace.boundary_identity_residual <= iter_cfg.defect_tol,
                trace.boundary_identity_residual,
                iter_cfg.defect_tol,
                "converged trace satisfies the diffuse re-emission identity",
            ));
        }
        _ => {
            return Err(DriverError::Usage(
                "the iteration probe needs a reflecting boundary variant".to_string(),
            ))
        }
    }
    Ok(checks)
}

/// What `tabulate-special` emits: either the two Kummer branches and
/// the Tricomi profile along τ, or the benchmark profile along a
/// logarithmic x line at fixed v.
pub enum TabulateSpec {
    Tau { lo: f64, hi: f64, points: usize },
    XLine { lo: f64, hi: f64, points: usize, v: f64 },
}

pub fn tabulate_special(
    spec: &TabulateSpec,
    mut w: &mut dyn Write,
    hash: &str,
) -> Result<(), DriverError> {
    match *spec {
        TabulateSpec::Tau { lo, hi, points } => {
            if !(lo.is_finite() && hi.is_finite() && lo < hi && points >= 2) {
                return Err(DriverError::Usage(format!(
                    "tau table needs finite lo < hi and at least two points, got [{lo}, {hi}] x {points}"
                )));
            }
            report::stamp(&mut w, hash)
                .map_err(|e| DriverError::Report(ReportError::Io(e)))?;
            writeln!(w, "tau,m,psi").map_err(|e| DriverError::Report(ReportError::Io(e)))?;
            for k in 0..points {
                let tau = lo + (hi - lo) * k as f64 / (points - 1) as f64;
                let m = kummer_m(-1.0 / 6.0, 2.0 / 3.0, tau)?;
                let psi = tricomi_psi(tau)?;
                writeln!(w, "{},{},{}", fmt_shortest(tau), fmt_shortest(m), fmt_shortest(psi))
                    .map_err(|e| DriverError::Report(ReportError::Io(e)))?;
            }
        }
        TabulateSpec::XLine { lo, hi, points, v } => {
            if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi && points >= 2) {
                return Err(DriverError::Usage(format!(
                    "x table needs finite 0 < lo < hi and at least two points, got [{lo}, {hi}] x {points}"
                )));
            }
            report::stamp(&mut w, hash)
                .map_err(|e| DriverError::Report(ReportError::Io(e)))?;
            writeln!(w, "x,f").map_err(|e| DriverError::Report(ReportError::Io(e)))?;
            for k in 0..points {
                let x = lo * (hi / lo).powf(k as f64 / (points - 1) as f64);
                let f = SteadyBenchmark.value(x, v)?;
                writeln!(w, "{},{}", fmt_shortest(x), fmt_shortest(f))
                    .map_err(|e| DriverError::Report(ReportError::Io(e)))?;
            }
        }
    }
    Ok(())
}

/// Reads a field CSV written by [`write_field_csv`] back into a
/// lattice (the time column is ignored; the dump is a single slice).
pub fn read_field_csv(path: &Path) -> Result<LatticeField, DriverError> {
    let file = fs::File::open(path).map_err(|e| DriverError::Csv {
        path: path.to_path_buf(),
        line: 0,
        msg: e.to_string(),
    })?;
    let fail = |line: usize, msg: String| DriverError::Csv {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    let mut saw_header = false;
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| fail(idx + 1, e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "t,x,v,f" {
                return Err(fail(idx + 1, format!("expected header t,x,v,f, got '{line}'")));
            }
            saw_header = true;
            continue;
        }
        let mut cells = line.split(',');
        let mut next = |name: &str| -> Result<f64, DriverError> {
            cells
                .next()
                .ok_or_else(|| fail(idx + 1, format!("missing column {name}")))?
                .parse::<f64>()
                .map_err(|e| fail(idx + 1, format!("column {name}: {e}")))
        };
        let _t = next("t")?;
        let x = next("x")?;
        let v = next("v")?;
        let f = next("f")?;
        rows.push((x, v, f));
    }
    if rows.is_empty() {
        return Err(fail(0, "no data rows".to_string()));
    }
    let mut vs: Vec<f64> = Vec::new();
    for &(_, v, _) in &rows {
        if !vs.is_empty() && v == vs[0] {
            break;
        }
        vs.push(v);
    }
    let mut xs: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::with_capacity(rows.len());
    for (k, &(x, v, f)) in rows.iter().enumerate() {
        if k % vs.len() == 0 {
            xs.push(x);
        } else if x != xs[xs.len() - 1] {
            return Err(fail(0, format!("ragged lattice: x changes mid-block at row {k}")));
        }
        if v != vs[k % vs.len()] {
            return Err(fail(0, format!("ragged lattice: v pattern breaks at row {k}")));
        }
        values.push(f);
    }
    Ok(LatticeField::from_values(xs, vs, values)?)
}

/// Oscillation-decay probe over a previously dumped field CSV.
pub fn holder_probe_file(
    path: &Path,
    center: (f64, f64),
    ladder: &ScaleLadder,
) -> Result<HolderProbe, DriverError> {
    let field = read_field_csv(path)?;
    Ok(oscillation_decay(&field, center, ladder)?)
}

/// Suites understood by [`verify`]; `all` selects every check.
pub const SUITES: [&str; 5] = ["all", "analytic", "solver", "iteration", "geometry"];

pub struct AcceptanceCheck {
    pub name: &'static str,
    /// Position in the stated acceptance list, 1-based.
    pub criterion: usize,
    pub suite: &'static str,
    pub run: fn() -> Vec<CheckRecord>,
}

static CHECKS: [AcceptanceCheck; 11] = [
    AcceptanceCheck {
        name: "appendix_residual",
        criterion: 1,
        suite: "analytic",
        run: checks::appendix_residual,
    },
    AcceptanceCheck {
        name: "boundary_exponents",
        criterion: 2,
        suite: "analytic",
        run: checks::boundary_exponents,
    },
    AcceptanceCheck {
        name: "special_functions",
        criterion: 3,
        suite: "analytic",
        run: checks::special_functions,
    },
    AcceptanceCheck {
        name: "solver_convergence",
        criterion: 4,
        suite: "solver",
        run: checks::solver_convergence,
    },
    AcceptanceCheck {
        name: "maximum_principle",
        criterion: 5,
        suite: "solver",
        run: checks::maximum_principle,
    },
    AcceptanceCheck {
        name: "mass_conservation",
        criterion: 6,
        suite: "solver",
        run: checks::mass_conservation,
    },
    AcceptanceCheck {
        name: "specular_contraction",
        criterion: 7,
        suite: "iteration",
        run: checks::specular_contraction,
    },
    AcceptanceCheck {
        name: "diffuse_slabs",
        criterion: 8,
        suite: "iteration",
        run: checks::diffuse_slabs,
    },
    AcceptanceCheck {
        name: "energy_ledger_order",
        criterion: 9,
        suite: "solver",
        run: checks::energy_ledger_order,
    },
    AcceptanceCheck {
        name: "geometry",
        criterion: 10,
        suite: "geometry",
        run: checks::geometry,
    },
    AcceptanceCheck {
        name: "viscosity_limit",
        criterion: 11,
        suite: "solver",
        run: checks::viscosity_limit,
    },
];

pub fn acceptance_checks() -> &'static [AcceptanceCheck] {
    &CHECKS
}

/// Runs the named suite across `threads` workers and aggregates one
/// report.  Check functions never abort the batch: a panic inside one
/// becomes a failed record.
pub fn verify(suite: &str, threads: usize) -> Result<DiagnosticsReport, DriverError> {
    if !SUITES.contains(&suite) {
        return Err(DriverError::Usage(format!(
            "unknown suite '{suite}'; expected one of {}",
            SUITES.join(", ")
        )));
    }
    let selected: Vec<&'static AcceptanceCheck> = CHECKS
        .iter()
        .filter(|c| suite == "all" || c.suite == suite)
        .collect();
    let workers = threads.max(1).min(selected.len());
    let cursor = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Vec<CheckRecord>>>> = Mutex::new(vec![None; selected.len()]);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = cursor.fetch_add(1, Ordering::Relaxed);
                if k >= selected.len() {
                    break;
                }
                let check = selected[k];
                let records = std::panic::catch_unwind(check.run).unwrap_or_else(|_| {
                    vec![CheckRecord::new(
                        check.name,
                        false,
                        f64::MAX,
                        f64::MAX,
                        "check panicked",
                    )]
                });
                slots.lock().unwrap()[k] = Some(records);
            });
        }
    });
    let mut all = Vec::new();
    for slot in slots.into_inner().unwrap() {
        all.extend(slot.expect("every scheduled check reports"));
    }
    let note = format!("suite '{suite}', {} check group(s)", selected.len());
    Ok(verdict(all, &note, &config_hash(suite))?)
}

/// The acceptance checks themselves.  Each returns self-contained
/// records (never panics on expected error paths) so the batch runner
/// and the test suite share one implementation.
pub mod checks {
    use super::*;

    fn error_record(name: &str, err: &dyn fmt::Display) -> Vec<CheckRecord> {
        vec![CheckRecord::new(name, false, f64::MAX, f64::MAX, &format!("error: {err}"))]
    }

    /// Criterion 1: analytic residual on [0.01, 10] x [-5, 5] at
    /// 200 x 200 stays under 1e-6 and evaluates in under five seconds.
    pub fn appendix_residual() -> Vec<CheckRecord> {
        let clock = Instant::now();
        let worst = match analytic_residual(200) {
            Ok(w) => w,
            Err(e) => return error_record("appendix_residual", &e),
        };
        let secs = clock.elapsed().as_secs_f64();
        vec![CheckRecord::new(
            "appendix_residual",
            worst < 1e-6 && secs < 5.0,
            worst,
            1e-6,
            &format!("max relative residual of v fx - fvv, 200 x 200, {secs:.2} s (cap 5 s)"),
        )]
    }

    /// Criterion 2: fitted boundary exponents hit 1/6 and 1/2.
    pub fn boundary_exponents() -> Vec<CheckRecord> {
        let fit = match fit_boundary_exponents(&SteadyBenchmark) {
            Ok(f) => f,
            Err(e) => return error_record("boundary_exponents", &e),
        };
        let dx = (fit.alpha_x.slope - 1.0 / 6.0).abs();
        let dv = (fit.alpha_v.slope - 0.5).abs();
        vec![
            CheckRecord::new(
                "alpha_x",
                dx <= 1e-3,
                dx,
                1e-3,
                &format!("fitted {} against 1/6", fmt_shortest(fit.alpha_x.slope)),
            ),
            CheckRecord::new(
                "alpha_v",
                dv <= 0.02,
                dv,
                0.02,
                &format!("fitted {} against 1/2", fmt_shortest(fit.alpha_v.slope)),
            ),
        ]
    }

    /// Criterion 3: Kummer/Tricomi evaluators against the frozen
    /// extended-precision rows, plus the asymptotic ratio laws at
    /// τ = ±10³.
    pub fn special_functions() -> Vec<CheckRecord> {
        let mut worst = 0.0f64;
        for &(tau, m1, m2, psi) in reference::KUMMER_PSI_REFERENCE.iter() {
            let got1 = match kummer_m(-1.0 / 6.0, 2.0 / 3.0, tau) {
                Ok(v) => v,
                Err(e) => return error_record("special_reference", &e),
            };
            let got2 = match kummer_m(1.0 / 6.0, 4.0 / 3.0, tau) {
                Ok(v) => v,
                Err(e) => return error_record("special_reference", &e),
            };
            let got3 = match tricomi_psi(tau) {
                Ok(v) => v,
                Err(e) => return error_record("special_reference", &e),
            };
            worst = worst.max(((got1 - m1) / m1).abs());
            worst = worst.max(((got2 - m2) / m2).abs());
            worst = worst.max(((got3 - psi) / psi).abs());
        }
        let psi_pos = match tricomi_psi(1e3) {
            Ok(v) => v,
            Err(e) => return error_record("special_asymptotics", &e),
        };
        let psi_neg = match tricomi_psi(-1e3) {
            Ok(v) => v,
            Err(e) => return error_record("special_asymptotics", &e),
        };
        let pos_dev = (psi_pos / 1e3f64.powf(1.0 / 6.0) - 1.0).abs();
        let neg_bound = psi_neg.abs() * 1e3f64.powf(5.0 / 6.0);
        let asym = pos_dev.max(neg_bound);
        vec![
            CheckRecord::new(
                "special_reference",
                worst < 1e-10,
                worst,
                1e-10,
                "max relative error over 50 frozen rows, three evaluators each",
            ),
            CheckRecord::new(
                "special_asymptotics",
                asym <= 1e-2,
                asym,
                1e-2,
                "Psi/tau^(1/6) -> 1 at +1e3 and Psi*|tau|^(5/6) -> 0 at -1e3",
            ),
        ]
    }

    fn benchmark_march(nx: usize, nv: usize, dt: f64, t_end: f64) -> Result<f64, DriverError> {
        let g = Grid::new(1.0, nx, 3.0, nv, dt)?;
        let coeffs = CoefficientField::isotropic_unit();
        let spec = BoundarySpec::inflow(|_, x, v| benchmark_value(x, v));
        let mut cfg = SolverConfig::imex();
        cfg.vbox = VBox::data(|_, x, v| benchmark_value(x, v));
        let mut f = SolutionField::new(g, 0.0, benchmark_value);
        let steps = (t_end / dt).round() as usize;
        for _ in 0..steps {
            f = step(&f, &coeffs, &spec, &cfg)?;
        }
        Ok(rel_l2_to_benchmark(&f))
    }

    /// Criterion 4: marching the analytic steady state on
    /// (0,1) x (-3,3) stays within 5% at 200 x 200 and the error
    /// ratio under one halving of every mesh parameter is below 0.7.
    pub fn solver_convergence() -> Vec<CheckRecord> {
        let clock = Instant::now();
        let coarse = match benchmark_march(200, 200, 1.25e-3, 0.6) {
            Ok(e) => e,
            Err(e) => return error_record("solver_convergence", &e),
        };
        let fine = match benchmark_march(400, 400, 6.25e-4, 0.6) {
            Ok(e) => e,
            Err(e) => return error_record("solver_convergence", &e),
        };
        let secs = clock.elapsed().as_secs_f64();
        let ratio = fine / coarse;
        vec![
            CheckRecord::new(
                "solver_benchmark_error",
                coarse < 0.05,
                coarse,
                0.05,
                "relative L2 distance to the analytic field at 200 x 200",
            ),
            CheckRecord::new(
                "solver_refinement_ratio",
                ratio < 0.7 && secs < 300.0,
                ratio,
                0.7,
                &format!("error {} at 400 x 400; {secs:.1} s (cap 300 s)", fmt_shortest(fine)),
            ),
        ]
    }

    /// Criterion 5: twenty randomized dissipative runs (Λ = 2, c ≤ 0,
    /// s = 0) across all five boundary variants stay below the data
    /// bound.
    pub fn maximum_principle() -> Vec<CheckRecord> {
        let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_5501);
        let mut worst = -f64::INFINITY;
        for run in 0..20u32 {
            let p1: f64 = rng.random_range(0.0..1.0);
            let p2: f64 = rng.random_range(-1.0..1.0);
            let p3: f64 = rng.random_range(0.0..1.0);
            let coeffs = CoefficientField::from_closures(
                move |z: &PhaseState| {
                    let a = 1.0 + 0.5 * p1 * (3.0 * z.v[0] + z.x[0]).sin();
                    [[a, 0.0], [0.0, a]]
                },
                move |z: &PhaseState| [1.5 * p2 * (z.x[0] - z.v[0]).cos(), 0.0],
                move |z: &PhaseState| -0.8 * p3 * (1.0 + z.v[0].sin()),
                |_| 0.0,
                2.0,
            );
            let amp: f64 = rng.random_range(0.5..1.0);
            let freq: f64 = rng.random_range(2.0..5.0f64).round();
            let g = match Grid::new(1.0, 16, 4.0, 24, 4e-3) {
                Ok(g) => g,
                Err(e) => return error_record("maximum_principle", &e),
            };
            let f0 = SolutionField::new(g, 0.0, move |x, v| {
                amp * (0.5 + 0.5 * (freq * std::f64::consts::TAU * x).sin()) * (-v * v).exp()
            });
            let inflow_amp: f64 = rng.random_range(0.1..0.8);
            let damping: f64 = rng.random_range(0.0..0.99);
            let theta: f64 = rng.random_range(0.5..2.0);
            let spec = match run % 5 {
                0 => BoundarySpec::absorbing(),
                1 => BoundarySpec::inflow(move |t: f64, x: f64, v: f64| {
                    inflow_amp * (0.5 + 0.5 * (3.0 * t + 2.0 * x).sin()) * (-v * v).exp()
                }),
                2 => BoundarySpec::Specular,
                3 => match BoundarySpec::damped_specular(damping) {
                    Ok(s) => s,
                    Err(e) => return error_record("maximum_principle", &e),
                },
                _ => match boundary_maxwellian(theta, 1) {
                    Ok(w) => BoundarySpec::Diffuse(w),
                    Err(e) => return error_record("maximum_principle", &e),
                },
            };
            let bound = if run % 5 == 1 { f0.max_abs().max(inflow_amp) } else { f0.max_abs() };
            let cfg = SolverConfig::imex();
            let mut f = f0;
            for _ in 0..25 {
                f = match step(&f, &coeffs, &spec, &cfg) {
                    Ok(f) => f,
                    Err(e) => return error_record("maximum_principle", &e),
                };
                let hi = f.values().iter().cloned().fold(f64::MIN, f64::max);
                worst = worst.max(hi - bound);
            }
        }
        vec![CheckRecord::new(
            "maximum_principle",
            worst <= 1e-8,
            worst,
            1e-8,
            "max excess of sup f over the data bound, 20 randomized runs, 5 variants",
        )]
    }

    /// Criterion 6: reflecting walls conserve mass when the lower-order
    /// coefficients vanish; the velocity box is sized so the Gaussian
    /// spread (variance 0.5 + 2t) stays far from the Dirichlet ends.
    pub fn mass_conservation() -> Vec<CheckRecord> {
        let run = |spec: BoundarySpec| -> Result<f64, DriverError> {
            let g = Grid::new(1.0, 40, 8.0, 160, 2.5e-3)?;
            let coeffs = CoefficientField::isotropic_unit();
            let cfg = SolverConfig::imex();
            let mut f = SolutionField::new(g, 0.0, |x, v| {
                (1.0 + 0.5 * (std::f64::consts::TAU * x).sin()) * (-v * v).exp()
            });
            let m0 = f.mass();
            for _ in 0..120 {
                f = step(&f, &coeffs, &spec, &cfg)?;
            }
            Ok((f.mass() - m0).abs() / (m0 * f.t))
        };
        let specular = match run(BoundarySpec::Specular) {
            Ok(d) => d,
            Err(e) => return error_record("mass_specular", &e),
        };
        let weight = match boundary_maxwellian(1.0, 1) {
            Ok(w) => w,
            Err(e) => return error_record("mass_diffuse", &e),
        };
        let diffuse = match run(BoundarySpec::Diffuse(weight)) {
            Ok(d) => d,
            Err(e) => return error_record("mass_diffuse", &e),
        };
        vec![
            CheckRecord::new(
                "mass_specular",
                specular < 1e-6,
                specular,
                1e-6,
                "relative mass drift per unit time, specular walls",
            ),
            CheckRecord::new(
                "mass_diffuse",
                diffuse < 1e-4,
                diffuse,
                1e-4,
                "relative mass drift per unit time, unit-flux Maxwellian walls",
            ),
        ]
    }

    fn reference_problem(t_end: f64) -> Result<ReflectionProblem, DriverError> {
        let grid = Grid::new(1.0, 20, 4.0, 32, 8e-3)?;
        let coeffs = CoefficientField::from_closures(
            |_| [[1.0, 0.0], [0.0, 1.0]],
            |_| [0.0, 0.0],
            |_| -0.3,
            |_| 0.0,
            2.0,
        );
        Ok(ReflectionProblem::new(
            grid,
            coeffs,
            SolverConfig::imex(),
            |x: f64, v: f64| (1.0 + 0.5 * (std::f64::consts::TAU * x).cos()) * (-v * v).exp(),
            t_end,
        ))
    }

    /// Criterion 7: the damped-specular fixed point contracts like a²
    /// (quotients of squared defects stay under a²·1.2 from the second
    /// iterate) and a = 0 converges in one sweep.
    pub fn specular_contraction() -> Vec<CheckRecord> {
        let mut worst = 0.0f64;
        for a in [0.3, 0.5, 0.8] {
            let p = match reference_problem(0.4) {
                Ok(p) => p,
                Err(e) => return error_record("specular_contraction", &e),
            };
            let cfg = IterationConfig { damping: a, ..IterationConfig::default() };
            let trace = match specular_iterate(&p, &cfg) {
                Ok(t) => t,
                Err(e) => return error_record("specular_contraction", &e),
            };
            if !trace.converged {
                return error_record(
                    "specular_contraction",
                    &format!("damping {a} did not converge"),
                );
            }
            let floor = (10.0 * cfg.defect_tol).powi(2);
            for (n, r) in trace.ratios().iter().enumerate() {
                if n >= 1 && trace.boundary_defects[n] > floor {
                    worst = worst.max(r / (a * a));
                }
            }
        }
        let p = match reference_problem(0.4) {
            Ok(p) => p,
            Err(e) => return error_record("specular_single_shot", &e),
        };
        let cfg = IterationConfig { damping: 0.0, ..IterationConfig::default() };
        let single = match specular_iterate(&p, &cfg) {
            Ok(t) => t,
            Err(e) => return error_record("specular_single_shot", &e),
        };
        vec![
            CheckRecord::new(
                "specular_contraction",
                worst <= 1.2,
                worst,
                1.2,
                "defect quotients normalized by damping squared, a in {0.3, 0.5, 0.8}",
            ),
            CheckRecord::new(
                "specular_single_shot",
                single.converged && single.iterations == 1,
                single.iterations as f64,
                1.0,
                "zero damping is the absorbing problem: one sweep exactly",
            ),
        ]
    }

    /// Criterion 8: the time-slab scheme for diffuse walls contracts at
    /// 0.6 or better per iterate and the converged trace satisfies the
    /// re-emission identity below tolerance.
    pub fn diffuse_slabs() -> Vec<CheckRecord> {
        let grid = match Grid::new(1.0, 20, 6.0, 48, 5e-3) {
            Ok(g) => g,
            Err(e) => return error_record("diffuse_slabs", &e),
        };
        let coeffs = CoefficientField::from_closures(
            |_| [[1.0, 0.0], [0.0, 1.0]],
            |_| [0.0, 0.0],
            |_| -0.3,
            |_| 0.0,
            2.0,
        );
        let p = ReflectionProblem::new(
            grid,
            coeffs,
            SolverConfig::imex(),
            |x: f64, v: f64| (1.0 + 0.5 * (std::f64::consts::TAU * x).cos()) * (-v * v).exp(),
            0.4,
        );
        let weight = match boundary_maxwellian(1.0, 1) {
            Ok(w) => w,
            Err(e) => return error_record("diffuse_slabs", &e),
        };
        let cfg = IterationConfig { defect_tol: 1e-10, ..IterationConfig::default() };
        let trace = match diffuse_slab_iterate(&p, &weight, &cfg) {
            Ok(t) => t,
            Err(e) => return error_record("diffuse_slabs", &e),
        };
        let floor = (10.0 * cfg.defect_tol).powi(2);
        let mut worst = 0.0f64;
        for slab in &trace.slabs {
            for (n, r) in slab.ratios().iter().enumerate() {
                if n >= 1 && slab.boundary_defects[n] > floor {
                    worst = worst.max(*r);
                }
            }
        }
        vec![
            CheckRecord::new(
                "slab_contraction",
                worst <= 0.6,
                worst,
                0.6,
                &format!("worst per-iterate quotient over {} slab(s)", trace.slabs.len()),
            ),
            CheckRecord::new(
                "slab_boundary_identity",
                trace.boundary_identity_residual <= cfg.defect_tol,
                trace.boundary_identity_residual,
                cfg.defect_tol,
                "trace-norm residual of the diffuse re-emission identity",
            ),
        ]
    }

    /// Criterion 9: the per-step energy-ledger residual decays at first
    /// order under refinement on a smooth compatible-inflow run.
    pub fn energy_ledger_order() -> Vec<CheckRecord> {
        let exact = |t: f64, x: f64, v: f64| {
            (-t).exp() * (1.0 + 0.5 * (std::f64::consts::TAU * x).sin()) * (-v * v / 2.0).exp()
        };
        let total = |nx: usize, nv: usize, dt: f64| -> Result<f64, DriverError> {
            let g = Grid::new(1.0, nx, 4.0, nv, dt)?;
            let coeffs = CoefficientField::from_closures(
                |_| [[1.0, 0.0], [0.0, 1.0]],
                |_| [0.0, 0.0],
                |_| 0.0,
                |z: &PhaseState| {
                    let tau = std::f64::consts::TAU;
                    let (t, x, v) = (z.t, z.x[0], z.v[0]);
                    let phi = 1.0 + 0.5 * (tau * x).sin();
                    let psi = (-v * v / 2.0).exp();
                    (-t).exp()
                        * psi
                        * (-phi + v * 0.5 * tau * (tau * x).cos() - phi * (v * v - 1.0))
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
                f = step(&f, &coeffs, &spec, &cfg)?;
                sum += f.ledger().last().expect("stepped field has a ledger").residual.abs();
            }
            Ok(sum)
        };
        let coarse = match total(40, 48, 2.5e-3) {
            Ok(s) => s,
            Err(e) => return error_record("energy_ledger_order", &e),
        };
        let mid = match total(80, 96, 1.25e-3) {
            Ok(s) => s,
            Err(e) => return error_record("energy_ledger_order", &e),
        };
        let fine = match total(160, 192, 6.25e-4) {
            Ok(s) => s,
            Err(e) => return error_record("energy_ledger_order", &e),
        };
        let order = (coarse / mid).log2().min((mid / fine).log2());
        vec![CheckRecord::new(
            "energy_ledger_order",
            order >= 0.9,
            order,
            0.9,
            &format!(
                "residual sums {} / {} / {} under two halvings",
                fmt_shortest(coarse),
                fmt_shortest(mid),
                fmt_shortest(fine)
            ),
        )]
    }

    /// Criterion 10: chart round-trips, the κ bound on det(P′), and
    /// the specular mirror-interface jump refining at first order.
    pub fn geometry() -> Vec<CheckRecord> {
        let mut records = Vec::new();
        let disk = match DomainGeometry::disk(1.0).and_then(|d| d.chart_at(&[1.0, 0.0], 0.4, 4.0))
        {
            Ok(c) => c,
            Err(e) => return error_record("geometry_round_trip", &e),
        };
        let parabola =
            match FlatteningChart::new_with_gradient(|s| s * s, |s| 2.0 * s, 0.5, 4.0) {
                Ok(c) => c,
                Err(e) => return error_record("geometry_round_trip", &e),
            };
        let mut rng = ChaCha8Rng::seed_from_u64(0x6E0_751B);
        let mut worst_rt = 0.0f64;
        let mut worst_det = 0.0f64;
        for chart in [&disk, &parabola] {
            for _ in 0..500 {
                let y = [
                    0.9 * rng.random_range(-1.0..1.0) * chart.half_width(),
                    0.3 * rng.random_range(-1.0..1.0) * chart.half_width(),
                ];
                let x = match chart.flatten(&y) {
                    Ok(x) => x,
                    Err(e) => return error_record("geometry_round_trip", &e),
                };
                let y_back = match chart.unflatten(&x) {
                    Ok(y) => y,
                    Err(e) => return error_record("geometry_round_trip", &e),
                };
                let x_back = match chart.flatten(&y_back) {
                    Ok(x) => x,
                    Err(e) => return error_record("geometry_round_trip", &e),
                };
                let err = ((x_back[0] - x[0]).powi(2) + (x_back[1] - x[1]).powi(2)).sqrt();
                worst_rt = worst_rt.max(err);
                let det = chart.jacobian_det(&y);
                worst_det = worst_det.max(0.25 - det).max(det - 4.0);
            }
        }
        records.push(CheckRecord::new(
            "geometry_round_trip",
            worst_rt < 1e-10,
            worst_rt,
            1e-10,
            "flatten/unflatten round trip over 1000 collar points, disk and parabola",
        ));
        records.push(CheckRecord::new(
            "geometry_kappa_bound",
            worst_det <= 0.0,
            worst_det,
            0.0,
            "excess of det(P') outside [1/4, 4] at kappa = 4",
        ));
        records.push(mirror_jump_record());
        records
    }

    fn mirror_jump_record() -> CheckRecord {
        let jump = |nx: usize, nv: usize, dt: f64| -> Result<f64, DriverError> {
            let g = Grid::new(1.0, nx, 4.0, nv, dt)?;
            let coeffs = CoefficientField::isotropic_unit();
            let cfg = SolverConfig::imex();
            let mut f = SolutionField::new(g.clone(), 0.0, |x, v| {
                (1.0 + 0.5 * (std::f64::consts::PI * x).cos()) * (-v * v / 2.0).exp()
            });
            let steps = (0.05 / dt).round() as usize;
            for _ in 0..steps {
                f = step(&f, &coeffs, &BoundarySpec::Specular, &cfg)?;
            }
            let mut worst = 0.0f64;
            for j in 0..=g.nv {
                worst = worst.max((f.value(0, j) - f.value(0, g.mirror_v(j))).abs());
            }
            Ok(worst)
        };
        let coarse = match jump(20, 32, 4e-3) {
            Ok(j) => j,
            Err(e) => return error_record("geometry_mirror_jump", &e).remove(0),
        };
        let fine = match jump(40, 64, 2e-3) {
            Ok(j) => j,
            Err(e) => return error_record("geometry_mirror_jump", &e).remove(0),
        };
        CheckRecord::new(
            "geometry_mirror_jump",
            coarse < 0.05 && fine < 0.65 * coarse,
            fine / coarse,
            0.65,
            &format!(
                "interface jump {} -> {} under one halving",
                fmt_shortest(coarse),
                fmt_shortest(fine)
            ),
        )
    }

    /// Criterion 11: the vanishing-viscosity family approaches the
    /// direct inflow solve monotonically and lands within twice the
    /// discretization error.
    pub fn viscosity_limit() -> Vec<CheckRecord> {
        let inflow = |_t: f64, _x: f64, v: f64| (-(v - 1.0) * (v - 1.0)).exp();
        let init = |x: f64, v: f64| (-(x - 0.5) * (x - 0.5) * 30.0).exp() * (-v * v).exp();
        let march = |nx: usize, nv: usize, dt: f64, cfg: &SolverConfig| -> Result<SolutionField, DriverError> {
            let g = Grid::new(1.0, nx, 3.0, nv, dt)?;
            let coeffs = CoefficientField::isotropic_unit();
            let spec = BoundarySpec::inflow(inflow);
            let mut f = SolutionField::new(g, 0.0, init);
            let steps = (0.2 / dt).round() as usize;
            for _ in 0..steps {
                f = if cfg.epsilon > 0.0 {
                    step_viscous(&f, &coeffs, &spec, cfg)?
                } else {
                    step(&f, &coeffs, &spec, cfg)?
                };
            }
            Ok(f)
        };
        let direct = match march(40, 48, 2e-3, &SolverConfig::imex()) {
            Ok(f) => f,
            Err(e) => return error_record("viscosity_limit", &e),
        };
        let norm = direct.weighted_l2_sq(0.0).sqrt();
        let mut dists = Vec::new();
        for k in 1..=5usize {
            let eps = 1.0 / (k * k) as f64;
            let f = match march(40, 48, 2e-3, &SolverConfig::viscous(eps)) {
                Ok(f) => f,
                Err(e) => return error_record("viscosity_limit", &e),
            };
            dists.push(f.l2_distance(&direct) / norm);
        }
        let monotone = dists.windows(2).all(|w| w[1] < w[0]);
        let fine = match march(80, 96, 1e-3, &SolverConfig::imex()) {
            Ok(f) => f,
            Err(e) => return error_record("viscosity_limit", &e),
        };
        let disc = restrict_distance(&fine, &direct) / norm;
        // the inflow layer gives d(eps) = L + a sqrt(eps) + o(sqrt(eps));
        // the sequence limit L is the sqrt(eps)-intercept over the
        // asymptotic tail (eps = 1 is excluded as pre-asymptotic)
        let mut sx = 0.0;
        let mut sy = 0.0;
        for k in 2..=5usize {
            sx += 1.0 / k as f64;
            sy += dists[k - 1];
        }
        let (mx, my) = (sx / 4.0, sy / 4.0);
        let mut sxx = 0.0;
        let mut sxy = 0.0;
        for k in 2..=5usize {
            let dxk = 1.0 / k as f64 - mx;
            sxx += dxk * dxk;
            sxy += dxk * (dists[k - 1] - my);
        }
        let limit = (my - (sxy / sxx) * mx).abs();
        vec![
            CheckRecord::new(
                "viscosity_monotone",
                monotone,
                *dists.last().expect("five viscosity levels"),
                dists[0],
                &format!(
                    "distances {} along eps = k^-2, k = 1..5",
                    dists.iter().map(|d| fmt_shortest(*d)).collect::<Vec<_>>().join(" ")
                ),
            ),
            CheckRecord::new(
                "viscosity_limit",
                limit <= 2.0 * disc,
                limit,
                2.0 * disc,
                &format!(
                    "extrapolated sequence limit against 2 x discretization ({})",
                    fmt_shortest(disc)
                ),
            ),
        ]
    }

    /// L² distance between a twice-refined field and a coarse field,
    /// evaluated on the coarse lattice (fine x-cells average in pairs,
    /// fine v-nodes nest at even indices).
    fn restrict_distance(fine: &SolutionField, coarse: &SolutionField) -> f64 {
        let gc = coarse.grid();
        let mut sum = 0.0;
        for i in 0..gc.nx {
            for j in 0..=gc.nv {
                let avg = 0.5 * (fine.value(2 * i, 2 * j) + fine.value(2 * i + 1, 2 * j));
                let d = avg - coarse.value(i, j);
                sum += d * d * gc.hx * gc.hv;
            }
        }
        sum.sqrt()
    }
}
