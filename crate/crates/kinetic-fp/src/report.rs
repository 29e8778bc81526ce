//! Artifact emission: CSV field dumps and JSON ledgers/reports.
//! Every file starts with the config hash and artifact version so any
//! output can be traced to the exact configuration text that produced
//! it, and identical inputs produce byte-identical files.
//!
//! Floats are written in the shortest decimal form that parses back
//! to the same bits (Rust's default float formatting), switching to
//! exponent notation outside [1e−4, 1e16) so extreme magnitudes stay
//! readable.

use std::error::Error;
use std::fmt;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::diagnostics::{DiagnosticsReport, HolderProbe};
use crate::solver::{LedgerRecord, SolutionField};

/// Bumped when the artifact layout changes shape.
pub const ARTIFACT_VERSION: &str = "1";

#[derive(Debug)]
pub enum ReportError {
    Io(io::Error),
    Json(serde_json::Error),
}

impl fmt::Display for ReportError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportError::Io(e) => write!(f, "artifact io: {e}"),
            ReportError::Json(e) => write!(f, "artifact encoding: {e}"),
        }
    }
}

impl Error for ReportError {
    fn source(&self) -> Option<&(dyn Error + 'static)> {
        match self {
            ReportError::Io(e) => Some(e),
            ReportError::Json(e) => Some(e),
        }
    }
}

impl From<io::Error> for ReportError {
    fn from(e: io::Error) -> Self {
        ReportError::Io(e)
    }
}

impl From<serde_json::Error> for ReportError {
    fn from(e: serde_json::Error) -> Self {
        ReportError::Json(e)
    }
}

/// 64-bit FNV-1a over the raw config text, as 16 hex digits.
pub fn config_hash(source: &str) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in source.as_bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

/// Shortest round-trip decimal; exponent form outside [1e−4, 1e16).
pub fn fmt_shortest(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let a = x.abs();
    if x.is_finite() && (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub(crate) fn stamp(w: &mut impl Write, hash: &str) -> io::Result<()> {
    writeln!(w, "# config_hash={hash}")?;
    writeln!(w, "# artifact_version={ARTIFACT_VERSION}")
}

/// Full node dump of a solution field: one row per (x, v) node.
pub fn write_field_csv(
    w: &mut impl Write,
    field: &SolutionField,
    hash: &str,
) -> Result<(), ReportError> {
    stamp(w, hash)?;
    writeln!(w, "t,x,v,f")?;
    let g = field.grid();
    let t = fmt_shortest(field.t);
    for i in 0..g.nx {
        let x = fmt_shortest(g.x_center(i));
        for j in 0..=g.nv {
            writeln!(
                w,
                "{t},{x},{},{}",
                fmt_shortest(g.v_node(j)),
                fmt_shortest(field.value(i, j))
            )?;
        }
    }
    Ok(())
}

/// Oscillation-decay profile of one probe: one row per ladder level.
pub fn write_decay_csv(
    w: &mut impl Write,
    probe: &HolderProbe,
    hash: &str,
) -> Result<(), ReportError> {
    stamp(w, hash)?;
    writeln!(
        w,
        "# center_x={} center_v={} slope={} residual={}",
        fmt_shortest(probe.center.0),
        fmt_shortest(probe.center.1),
        fmt_shortest(probe.slope),
        fmt_shortest(probe.residual)
    )?;
    writeln!(w, "r,osc")?;
    for (r, o) in probe.radii.iter().zip(&probe.oscillations) {
        writeln!(w, "{},{}", fmt_shortest(*r), fmt_shortest(*o))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Enveloped<'a, T: Serialize> {
    config_hash: &'a str,
    artifact_version: &'a str,
    #[serde(flatten)]
    payload: &'a T,
}

#[derive(Serialize)]
struct LedgerPayload<'a> {
    records: &'a [LedgerRecord],
}

/// Energy/mass ledger as JSON with the stamp in the envelope.
pub fn write_ledger_json(
    w: &mut impl Write,
    records: &[LedgerRecord],
    hash: &str,
) -> Result<(), ReportError> {
    let env = Enveloped {
        config_hash: hash,
        artifact_version: ARTIFACT_VERSION,
        payload: &LedgerPayload { records },
    };
    serde_json::to_writer_pretty(&mut *w, &env)?;
    writeln!(w)?;
    Ok(())
}

/// Diagnostics verdict as JSON with the stamp in the envelope.
pub fn write_report_json(
    w: &mut impl Write,
    report: &DiagnosticsReport,
    hash: &str,
) -> Result<(), ReportError> {
    let env = Enveloped {
        config_hash: hash,
        artifact_version: ARTIFACT_VERSION,
        payload: report,
    };
    serde_json::to_writer_pretty(&mut *w, &env)?;
    writeln!(w)?;
    Ok(())
}

/// Writes one artifact atomically enough for batch runs: straight to
/// the final path, no temp files (runs own their out-dir).
pub fn write_artifact<F>(path: &Path, emit: F) -> Result<(), ReportError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), ReportError>,
{
    let file = std::fs::File::create(path)?;
    let mut buf = io::BufWriter::new(file);
    emit(&mut buf)?;
    buf.flush()?;
    Ok(())
}
