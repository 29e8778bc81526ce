//! Run-configuration files: a flat, commented key = value format with
//! one level of named blocks.  Parsing compiles coefficient and data
//! expressions, loads any referenced CSV tables, and range-checks
//! every numeric parameter, so a returned [`RunConfig`] is ready to
//! execute without further validation.
//!
//! ```text
//! # lines starting anywhere with '#' are comments
//! title = steady benchmark          # optional
//! seed  = 42                        # optional, default 0
//!
//! geometry {                        # optional; default interval
//!   shape = interval                # interval is the runnable shape
//! }
//! grid {                            # required
//!   length = 1.0                    # slab length, > 0
//!   nx     = 200                    # position cells, >= 2
//!   vmax   = 3.0                    # velocity box half-width, > 0
//!   nv     = 200                    # velocity intervals, even, >= 4
//!   dt     = 1e-3                   # time step, > 0, CFL-checked
//!   t_end  = 0.5                    # horizon; t_end/dt must be whole
//!   cfl    = 0.9                    # optional explicit-CFL cap (0, 1]
//! }
//! coefficients {                    # required
//!   preset = transport_diffusion    # or damped_diffusion
//!   # ... or expressions in t, x, v (lambda then required, > 1):
//!   # a = 1 + 0.5*cos(v)            # diffusion, within [1/lambda, lambda]
//!   # b = 0                         # drift, |b| <= lambda
//!   # c = -0.1                      # zeroth order, |c| <= lambda
//!   # s = 0                         # source
//!   # lambda = 2.0
//! }
//! boundary {                        # required
//!   variant = inflow                # inflow | absorbing | specular
//!                                   # | damped_specular | diffuse
//!   data    = benchmark             # inflow only: zero | benchmark
//!                                   # | csv:profile.csv | an expression
//!   damping = 0.5                   # damped_specular only, [0, 1]
//!   theta   = 1.0                   # diffuse wall temperature, > 0
//! }
//! initial { data = zero }           # optional; zero | benchmark
//!                                   # | csv:... | expression
//! vbox    { data = zero }           # optional; zero | benchmark | expression
//! scheme {                          # optional; default imex
//!   method       = imex             # imex | viscous
//!   epsilon      = 1e-3             # viscous only, > 0
//!   implicit_tol = 1e-12            # optional
//!   max_refine   = 4                # optional
//! }
//! iteration {                       # optional; enables the fixed-point
//!   damping    = 0.5                # probe for reflecting variants
//!   slab_tau   = 1.0
//!   max_iters  = 60
//!   defect_tol = 1e-9
//! }
//! diagnostics {                     # optional
//!   probes       = exponents, seminorm, oscillation
//!   alpha        = 0.5              # seminorm exponent (0, 1]
//!   pair_count   = 100000
//!   region       = 0.1 0.9 -2.0 2.0 # optional x0 x1 v0 v1 window
//!   ladder_r0    = 0.25
//!   ladder_ratio = 0.5
//!   ladder_depth = 6
//!   center_x     = 0.5              # default: slab midpoint
//!   center_v     = 0.0
//!   residual_tol = 1e-6             # analytic-residual gate
//! }
//! output {                          # optional; all artifacts on by
//!   fields = fields.csv             # default, `off` disables one
//!   ledger = ledger.json
//!   report = report.json
//!   decay  = decay.csv
//! }
//! ```
//!
//! CSV data tables are two columns `v,value` with strictly increasing
//! v, resolved relative to the config file and loaded (hence
//! existence-checked) at parse time; lookups interpolate linearly and
//! clamp outside the tabulated range.  Unknown keys and blocks are
//! rejected with their `block.key` path and line number.

use std::error::Error;
use std::fmt;
use std::path::Path;

use crate::expr::{Expr, ExprError};
use crate::geometry::DomainGeometry;
use crate::iteration::IterationConfig;
use crate::solver::{Grid, Scheme, SolverConfig, VBox};

pub const DEFAULT_FIELDS_CSV: &str = "fields.csv";
pub const DEFAULT_LEDGER_JSON: &str = "ledger.json";
pub const DEFAULT_REPORT_JSON: &str = "report.json";
pub const DEFAULT_DECAY_CSV: &str = "decay.csv";

#[derive(Debug)]
pub enum ConfigError {
    Io { path: String, err: std::io::Error },
    Syntax { line: usize, msg: String },
    UnknownKey { path: String, line: usize },
    MissingKey { path: String },
    MissingBlock { name: &'static str },
    BadValue { path: String, line: usize, msg: String },
    Expr { path: String, line: usize, err: ExprError },
    MissingFile { path: String, file: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, err } => write!(f, "cannot read `{path}`: {err}"),
            ConfigError::Syntax { line, msg } => write!(f, "line {line}: {msg}"),
            ConfigError::UnknownKey { path, line } => {
                write!(f, "line {line}: unknown key `{path}`")
            }
            ConfigError::MissingKey { path } => write!(f, "missing required key `{path}`"),
            ConfigError::MissingBlock { name } => write!(f, "missing required block `{name}`"),
            ConfigError::BadValue { path, line, msg } => {
                write!(f, "line {line}: bad value for `{path}`: {msg}")
            }
            ConfigError::Expr { path, line, err } => {
                write!(f, "line {line}: expression for `{path}`: {err}")
            }
            ConfigError::MissingFile { path, file } => {
                write!(f, "`{path}` references `{file}`, which does not exist")
            }
        }
    }
}

impl Error for ConfigError {
    fn source(&self) -> Option<&(dyn Error + 'static)> {
        match self {
            ConfigError::Io { err, .. } => Some(err),
            ConfigError::Expr { err, .. } => Some(err),
            _ => None,
        }
    }
}

/// Tabulated one-dimensional profile in v, linear between nodes and
/// clamped outside.
#[derive(Debug, Clone)]
pub struct VProfile {
    vs: Vec<f64>,
    gs: Vec<f64>,
}

impl VProfile {
    pub fn new(vs: Vec<f64>, gs: Vec<f64>) -> Result<VProfile, String> {
        if vs.len() != gs.len() || vs.len() < 2 {
            return Err(format!("need at least two (v, value) rows, got {}", vs.len().min(gs.len())));
        }
        for w in vs.windows(2) {
            if !(w[1] > w[0]) {
                return Err(format!("v column must increase strictly, got {} after {}", w[1], w[0]));
            }
        }
        for &g in &gs {
            if !g.is_finite() {
                return Err(format!("non-finite table value {g}"));
            }
        }
        Ok(VProfile { vs, gs })
    }

    pub fn eval(&self, v: f64) -> f64 {
        let n = self.vs.len();
        if v <= self.vs[0] {
            return self.gs[0];
        }
        if v >= self.vs[n - 1] {
            return self.gs[n - 1];
        }
        let k = self.vs.partition_point(|&w| w <= v);
        let (v0, v1) = (self.vs[k - 1], self.vs[k]);
        let w = (v - v0) / (v1 - v0);
        self.gs[k - 1] * (1.0 - w) + self.gs[k] * w
    }
}

/// Boundary, initial, or velocity-box data: nothing, the steady
/// benchmark trace, a compiled expression in (t, x, v), or a
/// tabulated v-profile.
#[derive(Debug, Clone)]
pub enum DataSpec {
    Zero,
    Benchmark,
    Expression(Expr),
    Table(VProfile),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffPreset {
    /// a = 1, b = 0, c = 0, s = 0, Λ = 2: the operator of the steady
    /// benchmark.
    TransportDiffusion,
    /// a = 1, b = 0, c = −0.3, s = 0, Λ = 2.
    DampedDiffusion,
}

#[derive(Debug, Clone)]
pub enum CoeffSpec {
    Preset(CoeffPreset),
    Expressions { a: Expr, b: Expr, c: Expr, s: Expr, lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryVariant {
    Inflow,
    Absorbing,
    Specular,
    DampedSpecular,
    Diffuse,
}

#[derive(Debug, Clone)]
pub struct GridBlock {
    pub length: f64,
    pub nx: usize,
    pub vmax: f64,
    pub nv: usize,
    pub dt: f64,
    pub t_end: f64,
    pub cfl: Option<f64>,
}

impl GridBlock {
    /// Number of whole time steps to the horizon.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn build(&self) -> Result<Grid, ConfigError> {
        let grid = match self.cfl {
            Some(cfl) => Grid::with_cfl(self.length, self.nx, self.vmax, self.nv, self.dt, cfl),
            None => Grid::new(self.length, self.nx, self.vmax, self.nv, self.dt),
        };
        grid.map_err(|e| ConfigError::BadValue {
            path: "grid".into(),
            line: 0,
            msg: e.to_string(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct BoundaryBlock {
    pub variant: BoundaryVariant,
    pub data: DataSpec,
    pub damping: f64,
    pub theta: f64,
}

#[derive(Debug, Clone)]
pub struct SchemeBlock {
    pub method: Scheme,
    pub epsilon: f64,
    pub implicit_tol: Option<f64>,
    pub max_refine: Option<usize>,
}

impl SchemeBlock {
    /// Solver settings with the velocity-box closure supplied by the
    /// caller.
    pub fn build(&self, vbox: VBox) -> SolverConfig {
        let mut cfg = match self.method {
            Scheme::ImexUpwind => SolverConfig::imex(),
            Scheme::ViscousParabolic => SolverConfig::viscous(self.epsilon),
        };
        if let Some(tol) = self.implicit_tol {
            cfg.implicit_tol = tol;
        }
        if let Some(n) = self.max_refine {
            cfg.max_refine = n;
        }
        cfg.vbox = vbox;
        cfg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Probe {
    Exponents,
    Seminorm,
    Oscillation,
}

#[derive(Debug, Clone)]
pub struct DiagnosticsBlock {
    pub probes: Vec<Probe>,
    pub alpha: f64,
    pub pair_count: usize,
    /// Optional (x0, x1, v0, v1) sampling window; whole grid if absent.
    pub region: Option<(f64, f64, f64, f64)>,
    pub ladder_r0: f64,
    pub ladder_ratio: f64,
    pub ladder_depth: usize,
    pub center: (f64, f64),
    pub residual_tol: f64,
}

#[derive(Debug, Clone)]
pub struct OutputBlock {
    pub fields: Option<String>,
    pub ledger: Option<String>,
    pub report: Option<String>,
    pub decay: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub title: String,
    pub seed: u64,
    pub geometry: DomainGeometry,
    pub grid: GridBlock,
    pub coefficients: CoeffSpec,
    pub boundary: BoundaryBlock,
    pub initial: DataSpec,
    pub vbox: DataSpec,
    pub scheme: SchemeBlock,
    pub iteration: Option<IterationConfig>,
    pub diagnostics: DiagnosticsBlock,
    pub output: OutputBlock,
    /// Raw config text, hashed into every artifact header.
    pub source: String,
}

/// Reads and parses a config file; tables resolve relative to its
/// directory.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|err| ConfigError::Io {
        path: path.display().to_string(),
        err,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, base)
}

struct RawEntry {
    line: usize,
    key: String,
    value: String,
    used: bool,
}

struct Section {
    path: &'static str,
    entries: Vec<RawEntry>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        for e in &mut self.entries {
            if e.key == key {
                e.used = true;
                return Some((e.line, e.value.clone()));
            }
        }
        None
    }

    fn require(&mut self, key: &str) -> Result<(usize, String), ConfigError> {
        self.take(key).ok_or(ConfigError::MissingKey { path: full_path(self.path, key) })
    }

    fn finish(self) -> Result<(), ConfigError> {
        for e in &self.entries {
            if !e.used {
                return Err(ConfigError::UnknownKey {
                    path: full_path(self.path, &e.key),
                    line: e.line,
                });
            }
        }
        Ok(())
    }
}

fn full_path(section: &str, key: &str) -> String {
    if section.is_empty() {
        key.to_string()
    } else {
        format!("{section}.{key}")
    }
}

fn parse_f64(path: &str, line: usize, raw: &str) -> Result<f64, ConfigError> {
    raw.trim().parse::<f64>().map_err(|_| ConfigError::BadValue {
        path: path.into(),
        line,
        msg: format!("expected a number, got `{raw}`"),
    })
}

fn parse_usize(path: &str, line: usize, raw: &str) -> Result<usize, ConfigError> {
    raw.trim().parse::<usize>().map_err(|_| ConfigError::BadValue {
        path: path.into(),
        line,
        msg: format!("expected a non-negative integer, got `{raw}`"),
    })
}

fn check(path: &str, line: usize, ok: bool, msg: &str) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::BadValue { path: path.into(), line, msg: msg.into() })
    }
}

fn compile_expr(path: &str, line: usize, src: &str) -> Result<Expr, ConfigError> {
    let e = Expr::parse(src)
        .map_err(|err| ConfigError::Expr { path: path.into(), line, err })?;
    if e.needs_dim2() {
        return Err(ConfigError::BadValue {
            path: path.into(),
            line,
            msg: "runs are one-dimensional; y and u are not available".into(),
        });
    }
    Ok(e)
}

fn parse_data(
    path: &str,
    line: usize,
    raw: &str,
    base: &Path,
    allow_table: bool,
) -> Result<DataSpec, ConfigError> {
    let raw = raw.trim();
    match raw {
        "zero" => return Ok(DataSpec::Zero),
        "benchmark" => return Ok(DataSpec::Benchmark),
        _ => {}
    }
    if let Some(file) = raw.strip_prefix("csv:") {
        if !allow_table {
            return Err(ConfigError::BadValue {
                path: path.into(),
                line,
                msg: "tabulated data is not supported here".into(),
            });
        }
        let file = file.trim();
        let resolved = base.join(file);
        if !resolved.exists() {
            return Err(ConfigError::MissingFile {
                path: path.into(),
                file: resolved.display().to_string(),
            });
        }
        let text = std::fs::read_to_string(&resolved).map_err(|err| ConfigError::Io {
            path: resolved.display().to_string(),
            err,
        })?;
        let profile = parse_v_profile(&text).map_err(|msg| ConfigError::BadValue {
            path: path.into(),
            line,
            msg: format!("{}: {msg}", resolved.display()),
        })?;
        return Ok(DataSpec::Table(profile));
    }
    Ok(DataSpec::Expression(compile_expr(path, line, raw)?))
}

fn parse_v_profile(text: &str) -> Result<VProfile, String> {
    let mut vs = Vec::new();
    let mut gs = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(p) => &raw_line[..p],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let (a, b) = (cols.next().unwrap_or("").trim(), cols.next().unwrap_or("").trim());
        if cols.next().is_some() {
            return Err(format!("row {}: expected two columns", idx + 1));
        }
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(v), Ok(g)) => {
                vs.push(v);
                gs.push(g);
            }
            _ if vs.is_empty() => continue, // header row
            _ => return Err(format!("row {}: expected two numbers, got `{line}`", idx + 1)),
        }
    }
    VProfile::new(vs, gs)
}

/// Splits the text into the top-level section and named blocks,
/// stripping comments.  Braces never occur in keys or values, so the
/// single-line form `name { key = value }` and the multi-line form
/// are both handled by splitting each line at its braces; one key per
/// line, one level of nesting only.
fn split_blocks(text: &str) -> Result<(Section, Vec<(usize, String, Section)>), ConfigError> {
    let mut top = Section { path: "", entries: Vec::new() };
    let mut blocks: Vec<(usize, String, Section)> = Vec::new();
    let mut open: Option<(usize, String, Vec<RawEntry>)> = None;

    let push_entry = |open: &mut Option<(usize, String, Vec<RawEntry>)>,
                          top: &mut Section,
                          stmt: &str,
                          lineno: usize|
     -> Result<(), ConfigError> {
        let Some(eq) = stmt.find('=') else {
            return Err(ConfigError::Syntax {
                line: lineno,
                msg: format!("expected `key = value` or a block, got `{stmt}`"),
            });
        };
        let key = stmt[..eq].trim().to_string();
        let value = stmt[eq + 1..].trim().to_string();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(ConfigError::Syntax { line: lineno, msg: format!("bad key `{key}`") });
        }
        if value.is_empty() {
            return Err(ConfigError::Syntax {
                line: lineno,
                msg: format!("key `{key}` has no value"),
            });
        }
        let target = match open {
            Some((_, _, entries)) => entries,
            None => &mut top.entries,
        };
        if target.iter().any(|e| e.key == key) {
            return Err(ConfigError::Syntax {
                line: lineno,
                msg: format!("duplicate key `{key}`"),
            });
        }
        target.push(RawEntry { line: lineno, key, value, used: false });
        Ok(())
    };

    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let mut rest = match raw_line.find('#') {
            Some(p) => &raw_line[..p],
            None => raw_line,
        };
        loop {
            rest = rest.trim();
            if rest.is_empty() {
                break;
            }
            match rest.find(['{', '}']) {
                Some(p) if rest.as_bytes()[p] == b'{' => {
                    let name = rest[..p].trim();
                    if open.is_some() {
                        return Err(ConfigError::Syntax {
                            line: lineno,
                            msg: "blocks do not nest".into(),
                        });
                    }
                    if name.is_empty()
                        || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                    {
                        return Err(ConfigError::Syntax {
                            line: lineno,
                            msg: format!("bad block name `{name}`"),
                        });
                    }
                    open = Some((lineno, name.to_string(), Vec::new()));
                    rest = &rest[p + 1..];
                }
                Some(p) => {
                    let stmt = rest[..p].trim();
                    if !stmt.is_empty() {
                        push_entry(&mut open, &mut top, stmt, lineno)?;
                    }
                    match open.take() {
                        Some((at, name, entries)) => {
                            if blocks.iter().any(|(_, n, _)| *n == name) {
                                return Err(ConfigError::Syntax {
                                    line: at,
                                    msg: format!("block `{name}` appears twice"),
                                });
                            }
                            blocks.push((at, name, Section { path: "", entries }));
                        }
                        None => {
                            return Err(ConfigError::Syntax {
                                line: lineno,
                                msg: "stray `}`".into(),
                            })
                        }
                    }
                    rest = &rest[p + 1..];
                }
                None => {
                    push_entry(&mut open, &mut top, rest, lineno)?;
                    break;
                }
            }
        }
    }
    if let Some((at, name, _)) = open {
        return Err(ConfigError::Syntax { line: at, msg: format!("block `{name}` never closed") });
    }
    Ok((top, blocks))
}

pub fn parse_config(text: &str, base: &Path) -> Result<RunConfig, ConfigError> {
    let (mut top, raw_blocks) = split_blocks(text)?;

    let title = top.take("title").map(|(_, v)| v).unwrap_or_default();
    let seed = match top.take("seed") {
        Some((line, v)) => v.trim().parse::<u64>().map_err(|_| ConfigError::BadValue {
            path: "seed".into(),
            line,
            msg: format!("expected a non-negative integer, got `{v}`"),
        })?,
        None => 0,
    };
    top.finish()?;

    let mut geometry_sec = None;
    let mut grid_sec = None;
    let mut coeff_sec = None;
    let mut boundary_sec = None;
    let mut initial_sec = None;
    let mut vbox_sec = None;
    let mut scheme_sec = None;
    let mut iteration_sec = None;
    let mut diagnostics_sec = None;
    let mut output_sec = None;
    for (at, name, mut sec) in raw_blocks {
        let slot = match name.as_str() {
            "geometry" => {
                sec.path = "geometry";
                &mut geometry_sec
            }
            "grid" => {
                sec.path = "grid";
                &mut grid_sec
            }
            "coefficients" => {
                sec.path = "coefficients";
                &mut coeff_sec
            }
            "boundary" => {
                sec.path = "boundary";
                &mut boundary_sec
            }
            "initial" => {
                sec.path = "initial";
                &mut initial_sec
            }
            "vbox" => {
                sec.path = "vbox";
                &mut vbox_sec
            }
            "scheme" => {
                sec.path = "scheme";
                &mut scheme_sec
            }
            "iteration" => {
                sec.path = "iteration";
                &mut iteration_sec
            }
            "diagnostics" => {
                sec.path = "diagnostics";
                &mut diagnostics_sec
            }
            "output" => {
                sec.path = "output";
                &mut output_sec
            }
            _ => return Err(ConfigError::UnknownKey { path: name, line: at }),
        };
        *slot = Some(sec);
    }

    // geometry: only the interval shape is runnable
    let geometry = match geometry_sec {
        None => DomainGeometry::interval(1.0).expect("unit interval"),
        Some(mut sec) => {
            let (line, shape) = sec.require("shape")?;
            let g = match shape.as_str() {
                "interval" => DomainGeometry::interval(1.0).expect("unit interval"),
                "disk" | "epigraph" => {
                    return Err(ConfigError::BadValue {
                        path: "geometry.shape".into(),
                        line,
                        msg: format!("`{shape}` geometry serves chart probes only; runs need `interval`"),
                    })
                }
                other => {
                    return Err(ConfigError::BadValue {
                        path: "geometry.shape".into(),
                        line,
                        msg: format!("unknown shape `{other}`"),
                    })
                }
            };
            sec.finish()?;
            g
        }
    };

    let grid = {
        let mut sec = grid_sec.ok_or(ConfigError::MissingBlock { name: "grid" })?;
        let (l1, length) = sec.require("length")?;
        let length = parse_f64("grid.length", l1, &length)?;
        let (l2, nx) = sec.require("nx")?;
        let nx = parse_usize("grid.nx", l2, &nx)?;
        let (l3, vmax) = sec.require("vmax")?;
        let vmax = parse_f64("grid.vmax", l3, &vmax)?;
        let (l4, nv) = sec.require("nv")?;
        let nv = parse_usize("grid.nv", l4, &nv)?;
        let (l5, dt) = sec.require("dt")?;
        let dt = parse_f64("grid.dt", l5, &dt)?;
        let (l6, t_end) = sec.require("t_end")?;
        let t_end = parse_f64("grid.t_end", l6, &t_end)?;
        let cfl = match sec.take("cfl") {
            Some((line, v)) => {
                let c = parse_f64("grid.cfl", line, &v)?;
                check("grid.cfl", line, c > 0.0 && c <= 1.0, "must lie in (0, 1]")?;
                Some(c)
            }
            None => None,
        };
        sec.finish()?;
        check("grid.t_end", l6, t_end > 0.0 && t_end.is_finite(), "must be positive")?;
        let steps = t_end / dt;
        check(
            "grid.t_end",
            l6,
            steps >= 0.5 && (steps - steps.round()).abs() <= 1e-9 * steps.max(1.0),
            "t_end must be a whole number of time steps",
        )?;
        let block = GridBlock { length, nx, vmax, nv, dt, t_end, cfl };
        // trial construction so grid mistakes exit as config errors
        block.build()?;
        block
    };

    let coefficients = {
        let mut sec = coeff_sec.ok_or(ConfigError::MissingBlock { name: "coefficients" })?;
        let preset = sec.take("preset");
        let spec = match preset {
            Some((line, name)) => {
                let p = match name.as_str() {
                    "transport_diffusion" => CoeffPreset::TransportDiffusion,
                    "damped_diffusion" => CoeffPreset::DampedDiffusion,
                    other => {
                        return Err(ConfigError::BadValue {
                            path: "coefficients.preset".into(),
                            line,
                            msg: format!("unknown preset `{other}`"),
                        })
                    }
                };
                CoeffSpec::Preset(p)
            }
            None => {
                let (la, a) = sec.require("a")?;
                let (lb, b) = sec.require("b")?;
                let (lc, c) = sec.require("c")?;
                let (ls, s) = sec.require("s")?;
                let (ll, lambda) = sec.require("lambda")?;
                let lambda = parse_f64("coefficients.lambda", ll, &lambda)?;
                check("coefficients.lambda", ll, lambda > 1.0 && lambda.is_finite(), "must exceed 1")?;
                CoeffSpec::Expressions {
                    a: compile_expr("coefficients.a", la, &a)?,
                    b: compile_expr("coefficients.b", lb, &b)?,
                    c: compile_expr("coefficients.c", lc, &c)?,
                    s: compile_expr("coefficients.s", ls, &s)?,
                    lambda,
                }
            }
        };
        sec.finish()?;
        spec
    };

    let boundary = {
        let mut sec = boundary_sec.ok_or(ConfigError::MissingBlock { name: "boundary" })?;
        let (lv, variant) = sec.require("variant")?;
        let variant = match variant.as_str() {
            "inflow" => BoundaryVariant::Inflow,
            "absorbing" => BoundaryVariant::Absorbing,
            "specular" => BoundaryVariant::Specular,
            "damped_specular" => BoundaryVariant::DampedSpecular,
            "diffuse" => BoundaryVariant::Diffuse,
            other => {
                return Err(ConfigError::BadValue {
                    path: "boundary.variant".into(),
                    line: lv,
                    msg: format!("unknown variant `{other}`"),
                })
            }
        };
        let data = match sec.take("data") {
            Some((line, v)) => {
                check(
                    "boundary.data",
                    line,
                    variant == BoundaryVariant::Inflow,
                    "only the inflow variant takes boundary data",
                )?;
                parse_data("boundary.data", line, &v, base, true)?
            }
            None => {
                if variant == BoundaryVariant::Inflow {
                    return Err(ConfigError::MissingKey { path: "boundary.data".into() });
                }
                DataSpec::Zero
            }
        };
        let damping = match sec.take("damping") {
            Some((line, v)) => {
                check(
                    "boundary.damping",
                    line,
                    variant == BoundaryVariant::DampedSpecular,
                    "damping applies to the damped_specular variant",
                )?;
                let a = parse_f64("boundary.damping", line, &v)?;
                check("boundary.damping", line, (0.0..=1.0).contains(&a), "must lie in [0, 1]")?;
                a
            }
            None => {
                if variant == BoundaryVariant::DampedSpecular {
                    return Err(ConfigError::MissingKey { path: "boundary.damping".into() });
                }
                1.0
            }
        };
        let theta = match sec.take("theta") {
            Some((line, v)) => {
                check(
                    "boundary.theta",
                    line,
                    variant == BoundaryVariant::Diffuse,
                    "theta applies to the diffuse variant",
                )?;
                let th = parse_f64("boundary.theta", line, &v)?;
                check("boundary.theta", line, th > 0.0 && th.is_finite(), "must be positive")?;
                th
            }
            None => 1.0,
        };
        sec.finish()?;
        BoundaryBlock { variant, data, damping, theta }
    };

    let initial = match initial_sec {
        None => DataSpec::Zero,
        Some(mut sec) => {
            let (line, v) = sec.require("data")?;
            let d = parse_data("initial.data", line, &v, base, true)?;
            sec.finish()?;
            d
        }
    };

    let vbox = match vbox_sec {
        None => DataSpec::Zero,
        Some(mut sec) => {
            let (line, v) = sec.require("data")?;
            let d = parse_data("vbox.data", line, &v, base, false)?;
            sec.finish()?;
            d
        }
    };

    let scheme = match scheme_sec {
        None => SchemeBlock { method: Scheme::ImexUpwind, epsilon: 0.0, implicit_tol: None, max_refine: None },
        Some(mut sec) => {
            let (lm, method) = sec.require("method")?;
            let method = match method.as_str() {
                "imex" => Scheme::ImexUpwind,
                "viscous" => Scheme::ViscousParabolic,
                other => {
                    return Err(ConfigError::BadValue {
                        path: "scheme.method".into(),
                        line: lm,
                        msg: format!("unknown method `{other}`"),
                    })
                }
            };
            let epsilon = match sec.take("epsilon") {
                Some((line, v)) => {
                    check(
                        "scheme.epsilon",
                        line,
                        method == Scheme::ViscousParabolic,
                        "epsilon applies to the viscous method",
                    )?;
                    let e = parse_f64("scheme.epsilon", line, &v)?;
                    check("scheme.epsilon", line, e > 0.0 && e.is_finite(), "must be positive")?;
                    e
                }
                None => {
                    if method == Scheme::ViscousParabolic {
                        return Err(ConfigError::MissingKey { path: "scheme.epsilon".into() });
                    }
                    0.0
                }
            };
            let implicit_tol = match sec.take("implicit_tol") {
                Some((line, v)) => {
                    let t = parse_f64("scheme.implicit_tol", line, &v)?;
                    check("scheme.implicit_tol", line, t > 0.0 && t.is_finite(), "must be positive")?;
                    Some(t)
                }
                None => None,
            };
            let max_refine = match sec.take("max_refine") {
                Some((line, v)) => Some(parse_usize("scheme.max_refine", line, &v)?),
                None => None,
            };
            sec.finish()?;
            SchemeBlock { method, epsilon, implicit_tol, max_refine }
        }
    };

    let iteration = match iteration_sec {
        None => None,
        Some(mut sec) => {
            check(
                "iteration",
                0,
                matches!(
                    boundary.variant,
                    BoundaryVariant::Specular
                        | BoundaryVariant::DampedSpecular
                        | BoundaryVariant::Diffuse
                ),
                "the fixed-point probe needs a reflecting boundary variant",
            )?;
            let mut cfg = IterationConfig::default();
            if boundary.variant == BoundaryVariant::DampedSpecular {
                cfg.damping = boundary.damping;
            }
            if let Some((line, v)) = sec.take("damping") {
                cfg.damping = parse_f64("iteration.damping", line, &v)?;
            }
            if let Some((line, v)) = sec.take("slab_tau") {
                cfg.slab_tau = parse_f64("iteration.slab_tau", line, &v)?;
            }
            if let Some((line, v)) = sec.take("max_iters") {
                cfg.max_iters = parse_usize("iteration.max_iters", line, &v)?;
            }
            if let Some((line, v)) = sec.take("defect_tol") {
                cfg.defect_tol = parse_f64("iteration.defect_tol", line, &v)?;
            }
            sec.finish()?;
            cfg.validate().map_err(|e| ConfigError::BadValue {
                path: "iteration".into(),
                line: 0,
                msg: e.to_string(),
            })?;
            Some(cfg)
        }
    };

    let diagnostics = {
        let defaults = DiagnosticsBlock {
            probes: Vec::new(),
            alpha: 0.5,
            pair_count: crate::diagnostics::DEFAULT_PAIR_COUNT,
            region: None,
            ladder_r0: 0.25,
            ladder_ratio: 0.5,
            ladder_depth: 6,
            center: (grid.length / 2.0, 0.0),
            residual_tol: 1e-6,
        };
        match diagnostics_sec {
            None => defaults,
            Some(mut sec) => {
                let mut d = defaults;
                if let Some((line, v)) = sec.take("probes") {
                    let mut probes = Vec::new();
                    for name in v.split(',') {
                        let p = match name.trim() {
                            "exponents" => Probe::Exponents,
                            "seminorm" => Probe::Seminorm,
                            "oscillation" => Probe::Oscillation,
                            other => {
                                return Err(ConfigError::BadValue {
                                    path: "diagnostics.probes".into(),
                                    line,
                                    msg: format!("unknown probe `{other}`"),
                                })
                            }
                        };
                        if !probes.contains(&p) {
                            probes.push(p);
                        }
                    }
                    d.probes = probes;
                }
                if let Some((line, v)) = sec.take("alpha") {
                    d.alpha = parse_f64("diagnostics.alpha", line, &v)?;
                    check(
                        "diagnostics.alpha",
                        line,
                        d.alpha > 0.0 && d.alpha <= 1.0,
                        "must lie in (0, 1]",
                    )?;
                }
                if let Some((line, v)) = sec.take("pair_count") {
                    d.pair_count = parse_usize("diagnostics.pair_count", line, &v)?;
                    check("diagnostics.pair_count", line, d.pair_count > 0, "must be positive")?;
                }
                if let Some((line, v)) = sec.take("region") {
                    let nums: Result<Vec<f64>, _> = v
                        .split_whitespace()
                        .map(|s| parse_f64("diagnostics.region", line, s))
                        .collect();
                    let nums = nums?;
                    check(
                        "diagnostics.region",
                        line,
                        nums.len() == 4 && nums[0] < nums[1] && nums[2] < nums[3],
                        "expected `x0 x1 v0 v1` with x0 < x1 and v0 < v1",
                    )?;
                    d.region = Some((nums[0], nums[1], nums[2], nums[3]));
                }
                if let Some((line, v)) = sec.take("ladder_r0") {
                    d.ladder_r0 = parse_f64("diagnostics.ladder_r0", line, &v)?;
                    check("diagnostics.ladder_r0", line, d.ladder_r0 > 0.0, "must be positive")?;
                }
                if let Some((line, v)) = sec.take("ladder_ratio") {
                    d.ladder_ratio = parse_f64("diagnostics.ladder_ratio", line, &v)?;
                    check(
                        "diagnostics.ladder_ratio",
                        line,
                        d.ladder_ratio > 0.0 && d.ladder_ratio < 1.0,
                        "must lie in (0, 1)",
                    )?;
                }
                if let Some((line, v)) = sec.take("ladder_depth") {
                    d.ladder_depth = parse_usize("diagnostics.ladder_depth", line, &v)?;
                    check("diagnostics.ladder_depth", line, d.ladder_depth >= 2, "must be at least 2")?;
                }
                if let Some((line, v)) = sec.take("center_x") {
                    d.center.0 = parse_f64("diagnostics.center_x", line, &v)?;
                }
                if let Some((line, v)) = sec.take("center_v") {
                    d.center.1 = parse_f64("diagnostics.center_v", line, &v)?;
                }
                if let Some((line, v)) = sec.take("residual_tol") {
                    d.residual_tol = parse_f64("diagnostics.residual_tol", line, &v)?;
                    check(
                        "diagnostics.residual_tol",
                        line,
                        d.residual_tol > 0.0,
                        "must be positive",
                    )?;
                }
                sec.finish()?;
                d
            }
        }
    };

    let output = {
        let name_or_off = |sec: &mut Section, key: &'static str, default: &str| -> Option<String> {
            match sec.take(key) {
                Some((_, v)) if v == "off" => None,
                Some((_, v)) => Some(v),
                None => Some(default.to_string()),
            }
        };
        match output_sec {
            None => OutputBlock {
                fields: Some(DEFAULT_FIELDS_CSV.into()),
                ledger: Some(DEFAULT_LEDGER_JSON.into()),
                report: Some(DEFAULT_REPORT_JSON.into()),
                decay: Some(DEFAULT_DECAY_CSV.into()),
            },
            Some(mut sec) => {
                let block = OutputBlock {
                    fields: name_or_off(&mut sec, "fields", DEFAULT_FIELDS_CSV),
                    ledger: name_or_off(&mut sec, "ledger", DEFAULT_LEDGER_JSON),
                    report: name_or_off(&mut sec, "report", DEFAULT_REPORT_JSON),
                    decay: name_or_off(&mut sec, "decay", DEFAULT_DECAY_CSV),
                };
                sec.finish()?;
                block
            }
        }
    };

    Ok(RunConfig {
        title,
        seed,
        geometry,
        grid,
        coefficients,
        boundary,
        initial,
        vbox,
        scheme,
        iteration,
        diagnostics,
        output,
        source: text.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
# minimal valid run
title = unit run
seed = 7
grid {
  length = 1.0
  nx = 20
  vmax = 4.0
  nv = 32
  dt = 8e-3
  t_end = 0.4
}
coefficients { preset = transport_diffusion }
boundary { variant = absorbing }
"#;

    fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        parse_config(text, Path::new("."))
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse(BASE).unwrap();
        assert_eq!(cfg.title, "unit run");
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.grid.steps(), 50);
        assert!(matches!(cfg.coefficients, CoeffSpec::Preset(CoeffPreset::TransportDiffusion)));
        assert!(matches!(cfg.initial, DataSpec::Zero));
        assert!(matches!(cfg.scheme.method, Scheme::ImexUpwind));
        assert!(cfg.iteration.is_none());
        assert_eq!(cfg.diagnostics.center, (0.5, 0.0));
        assert_eq!(cfg.output.report.as_deref(), Some(DEFAULT_REPORT_JSON));
        assert!(cfg.source.contains("minimal valid run"));
    }

    #[test]
    fn expressions_compile_and_blocks_parse() {
        let text = r#"
grid { length = 1.0  # inline comment
  nx = 20
  vmax = 4.0
  nv = 32
  dt = 8e-3
  t_end = 0.4
}
coefficients {
  a = 1 + 0.5*cos(v)
  b = 0
  c = -0.1
  s = exp(-v*v)
  lambda = 2.0
}
boundary {
  variant = inflow
  data = exp(-(v-1)*(v-1))
}
initial { data = benchmark }
vbox { data = zero }
scheme {
  method = viscous
  epsilon = 1e-3
}
iteration {
  damping = 0.5
}
"#;
        // iteration with inflow boundary must be rejected
        let err = parse(text).unwrap_err();
        assert!(matches!(err, ConfigError::BadValue { ref path, .. } if path == "iteration"));

        let text = text.replace("variant = inflow", "variant = specular")
            .replace("data = exp(-(v-1)*(v-1))\n", "");
        let cfg = parse(&text).unwrap();
        match &cfg.coefficients {
            CoeffSpec::Expressions { a, lambda, .. } => {
                assert_eq!(*lambda, 2.0);
                assert!((a.eval(0.0, [0.0; 2], [0.0; 2]) - 1.5).abs() < 1e-15);
            }
            other => panic!("expected expressions, got {other:?}"),
        }
        assert!(matches!(cfg.initial, DataSpec::Benchmark));
        assert!(matches!(cfg.scheme.method, Scheme::ViscousParabolic));
        let it = cfg.iteration.unwrap();
        assert_eq!(it.damping, 0.5);
    }

    #[test]
    fn unknown_keys_and_blocks_are_rejected_with_path() {
        let text = format!("{BASE}\nscheme {{ method = imex\n  typo = 1\n}}");
        match parse(&text).unwrap_err() {
            ConfigError::UnknownKey { path, line } => {
                assert_eq!(path, "scheme.typo");
                assert!(line > 0);
            }
            other => panic!("expected unknown key, got {other}"),
        }
        let text = format!("{BASE}\nnot_a_block {{\n}}");
        assert!(matches!(parse(&text).unwrap_err(), ConfigError::UnknownKey { .. }));
        let text = format!("{BASE}\nstray = 1");
        match parse(&text).unwrap_err() {
            ConfigError::UnknownKey { path, .. } => assert_eq!(path, "stray"),
            other => panic!("expected unknown key, got {other}"),
        }
    }

    #[test]
    fn syntax_and_value_errors_carry_lines() {
        assert!(matches!(
            parse("grid {\n").unwrap_err(),
            ConfigError::Syntax { line: 1, .. }
        ));
        assert!(matches!(parse("}").unwrap_err(), ConfigError::Syntax { line: 1, .. }));
        assert!(matches!(
            parse("a {\n b {\n }\n}").unwrap_err(),
            ConfigError::Syntax { line: 2, .. }
        ));
        assert!(matches!(
            parse("seed = -3\n").unwrap_err(),
            ConfigError::BadValue { .. }
        ));
        let text = BASE.replace("t_end = 0.4", "t_end = 0.123");
        match parse(&text).unwrap_err() {
            ConfigError::BadValue { path, msg, .. } => {
                assert_eq!(path, "grid.t_end");
                assert!(msg.contains("whole number"));
            }
            other => panic!("expected bad t_end, got {other}"),
        }
        // grid trial construction catches CFL violations at parse time
        let text = BASE.replace("dt = 8e-3", "dt = 5e-2");
        assert!(matches!(parse(&text).unwrap_err(), ConfigError::BadValue { ref path, .. } if path == "grid"));
        // duplicate keys and blocks
        let text = BASE.replace("seed = 7", "seed = 7\nseed = 8");
        assert!(matches!(parse(&text).unwrap_err(), ConfigError::Syntax { .. }));
        let text = format!("{BASE}\nboundary {{ variant = absorbing }}");
        assert!(matches!(parse(&text).unwrap_err(), ConfigError::Syntax { .. }));
    }

    #[test]
    fn variant_specific_keys_are_guarded() {
        let text = BASE.replace(
            "boundary { variant = absorbing }",
            "boundary { variant = absorbing\n  data = zero\n}",
        );
        assert!(matches!(parse(&text).unwrap_err(), ConfigError::BadValue { ref path, .. } if path == "boundary.data"));
        let text = BASE.replace(
            "boundary { variant = absorbing }",
            "boundary { variant = damped_specular }",
        );
        assert!(matches!(parse(&text).unwrap_err(), ConfigError::MissingKey { ref path } if path == "boundary.damping"));
        let text = BASE.replace(
            "boundary { variant = absorbing }",
            "boundary { variant = inflow }",
        );
        assert!(matches!(parse(&text).unwrap_err(), ConfigError::MissingKey { ref path } if path == "boundary.data"));
        let text = BASE.replace(
            "boundary { variant = absorbing }",
            "boundary { variant = diffuse\n  theta = 0 }",
        );
        assert!(matches!(parse(&text).unwrap_err(), ConfigError::BadValue { ref path, .. } if path == "boundary.theta"));
        // y/u are rejected for one-dimensional runs
        let text = BASE.replace(
            "coefficients { preset = transport_diffusion }",
            "coefficients {\n  a = 1 + y\n  b = 0\n  c = 0\n  s = 0\n  lambda = 2\n}",
        );
        assert!(matches!(parse(&text).unwrap_err(), ConfigError::BadValue { ref path, .. } if path == "coefficients.a"));
    }

    #[test]
    fn csv_tables_load_interpolate_and_require_existence() {
        let dir = std::env::temp_dir().join(format!("kfp-config-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let table = dir.join("profile.csv");
        std::fs::write(&table, "v,value\n-2.0,0.0\n-1.0,1.0\n0.0,0.5\n").unwrap();
        let text = BASE.replace(
            "boundary { variant = absorbing }",
            "boundary {\n  variant = inflow\n  data = csv:profile.csv\n}",
        );
        let cfg = parse_config(&text, &dir).unwrap();
        match &cfg.boundary.data {
            DataSpec::Table(p) => {
                assert_eq!(p.eval(-1.5), 0.5);
                assert_eq!(p.eval(-3.0), 0.0);
                assert_eq!(p.eval(5.0), 0.5);
            }
            other => panic!("expected table, got {other:?}"),
        }
        let text = text.replace("profile.csv", "missing.csv");
        assert!(matches!(parse_config(&text, &dir).unwrap_err(), ConfigError::MissingFile { .. }));
        // malformed table content
        std::fs::write(&table, "v,value\n0.0,1.0\n0.0,2.0\n").unwrap();
        let text = BASE.replace(
            "boundary { variant = absorbing }",
            "boundary {\n  variant = inflow\n  data = csv:profile.csv\n}",
        );
        assert!(matches!(parse_config(&text, &dir).unwrap_err(), ConfigError::BadValue { .. }));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn geometry_and_output_blocks() {
        let text = format!("{BASE}\ngeometry {{ shape = interval }}\noutput {{\n  fields = off\n  report = custom.json\n}}");
        let cfg = parse(&text).unwrap();
        assert_eq!(cfg.geometry.dim(), 1);
        assert_eq!(cfg.output.fields, None);
        assert_eq!(cfg.output.report.as_deref(), Some("custom.json"));
        assert_eq!(cfg.output.ledger.as_deref(), Some(DEFAULT_LEDGER_JSON));
        let text = format!("{BASE}\ngeometry {{ shape = disk }}");
        assert!(matches!(parse(&text).unwrap_err(), ConfigError::BadValue { ref path, .. } if path == "geometry.shape"));
    }

    #[test]
    fn diagnostics_block_round_trips() {
        let text = format!(
            "{BASE}\ndiagnostics {{\n  probes = exponents, seminorm\n  alpha = 0.5\n  region = 0.1 0.9 -2 2\n  ladder_depth = 4\n  residual_tol = 1e-7\n}}"
        );
        let cfg = parse(&text).unwrap();
        assert_eq!(cfg.diagnostics.probes, vec![Probe::Exponents, Probe::Seminorm]);
        assert_eq!(cfg.diagnostics.region, Some((0.1, 0.9, -2.0, 2.0)));
        assert_eq!(cfg.diagnostics.ladder_depth, 4);
        assert_eq!(cfg.diagnostics.residual_tol, 1e-7);
        let text = format!("{BASE}\ndiagnostics {{ probes = exponents, nonsense }}");
        assert!(matches!(parse(&text).unwrap_err(), ConfigError::BadValue { .. }));
    }
}
