//! Manufactured solutions: smooth fields with the source terms that make
//! them exact solutions of the kinetic Fokker-Planck equation, used for
//! solver order verification and the discrete energy ledger checks.

use std::fmt;
use std::sync::Arc;

/// Closure over (t, x, v).
pub type Field3 = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// A registered manufactured case: the exact field, the matching source
/// s = (∂t + v∂x)f − ∂v(A ∂v f) − B ∂v f − c f, and the (constant)
/// coefficients it was derived for.
#[derive(Clone)]
pub struct ManufacturedCase {
    pub name: &'static str,
    pub f: Field3,
    pub source: Field3,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl fmt::Debug for ManufacturedCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManufacturedCase")
            .field("name", &self.name)
            .field("a", &self.a)
            .field("b", &self.b)
            .field("c", &self.c)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownManufactured(pub String);

impl fmt::Display for UnknownManufactured {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown manufactured solution '{}' (registered: {})",
            self.0,
            REGISTRY_NAMES.join(", ")
        )
    }
}

impl std::error::Error for UnknownManufactured {}

pub const REGISTRY_NAMES: [&str; 3] = ["decaying_sine", "constant", "linear_tv"];

/// Looks up a manufactured solution by name.
pub fn manufactured_solution(id: &str) -> Result<ManufacturedCase, UnknownManufactured> {
    let pi = std::f64::consts::PI;
    match id {
        // f = e^{−t} sin(πx) e^{−v²}, A=1, B=0, c=0:
        //   ∂t f = −f,  v ∂x f = πv cos(πx) e^{−t−v²},  ∂v² f = (4v²−2) f
        //   ⇒ s = (1 − 4v²) f + πv cos(πx) e^{−t−v²}.
        // Vanishes on the spatial boundary of (0,1) and decays in v, so
        // zero inflow data and the velocity-box Dirichlet are exact.
        "decaying_sine" => Ok(ManufacturedCase {
            name: "decaying_sine",
            f: Arc::new(move |t, x, v| (-t - v * v).exp() * (pi * x).sin()),
            source: Arc::new(move |t, x, v| {
                let e = (-t - v * v).exp();
                e * ((1.0 - 4.0 * v * v) * (pi * x).sin() + pi * v * (pi * x).cos())
            }),
            a: 1.0,
            b: 0.0,
            c: 0.0,
        }),
        // constants solve the equation with zero source when c = 0
        "constant" => Ok(ManufacturedCase {
            name: "constant",
            f: Arc::new(|_, _, _| 1.0),
            source: Arc::new(|_, _, _| 0.0),
            a: 1.0,
            b: 0.0,
            c: 0.0,
        }),
        // f = t·v: ∂t f = v, transport and diffusion vanish ⇒ s = v
        "linear_tv" => Ok(ManufacturedCase {
            name: "linear_tv",
            f: Arc::new(|t, _, v| t * v),
            source: Arc::new(|_, _, v| v),
            a: 1.0,
            b: 0.0,
            c: 0.0,
        }),
        other => Err(UnknownManufactured(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Residual (∂t + v∂x)f − A ∂v² f − B ∂v f − c f − s by central
    /// differences; must vanish to differencing accuracy.
    fn residual(case: &ManufacturedCase, t: f64, x: f64, v: f64) -> f64 {
        let h = 1e-5;
        let f = &case.f;
        let ft = (f(t + h, x, v) - f(t - h, x, v)) / (2.0 * h);
        let fx = (f(t, x + h, v) - f(t, x - h, v)) / (2.0 * h);
        let fv = (f(t, x, v + h) - f(t, x, v - h)) / (2.0 * h);
        let fvv = (f(t, x, v + h) - 2.0 * f(t, x, v) + f(t, x, v - h)) / (h * h);
        ft + v * fx - case.a * fvv - case.b * fv - case.c * f(t, x, v) - (case.source)(t, x, v)
    }

    #[test]
    fn registry_sources_match_differencing() {
        for name in REGISTRY_NAMES {
            let case = manufactured_solution(name).unwrap();
            for &(t, x, v) in &[(0.0, 0.3, 1.0), (0.5, 0.71, -2.2), (1.3, 0.11, 0.0)] {
                let r = residual(&case, t, x, v);
                assert!(r.abs() < 1e-6, "{name} residual {r:e} at ({t},{x},{v})");
            }
        }
    }

    #[test]
    fn unknown_id_is_an_error() {
        let err = manufactured_solution("nope").unwrap_err();
        assert!(err.to_string().contains("nope"));
        assert!(err.to_string().contains("decaying_sine"));
    }
}
