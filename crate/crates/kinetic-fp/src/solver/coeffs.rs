//! Coefficient fields (A, B, c, s) and their ellipticity contract.
//!
//! The equation's data enter through pointwise evaluators together with
//! a single constant Λ > 1 bounding everything:
//!
//! ```text
//!   Λ⁻¹|ξ|² ≤ A(z)ξ·ξ ≤ Λ|ξ|²,    |B(z)| + |c(z)| ≤ Λ.
//! ```
//!
//! The bounds are spot-checked on random samples at setup rather than
//! proven; evaluators are black boxes.

use std::error::Error;
use std::fmt;
use std::sync::Arc;

use crate::transforms::PhaseState;

type MatrixFn = Arc<dyn Fn(&PhaseState) -> [[f64; 2]; 2] + Send + Sync>;
type VectorFn = Arc<dyn Fn(&PhaseState) -> [f64; 2] + Send + Sync>;
type ScalarFn = Arc<dyn Fn(&PhaseState) -> f64 + Send + Sync>;

/// Pointwise evaluators for the equation data with their ellipticity
/// constant.  Only the leading `dim × dim` block of A and the leading
/// `dim` entries of B are read in dimension `dim`.
#[derive(Clone)]
pub struct CoefficientField {
    a: MatrixFn,
    b: VectorFn,
    c: ScalarFn,
    s: ScalarFn,
    lambda: f64,
}

impl fmt::Debug for CoefficientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientField").field("lambda", &self.lambda).finish_non_exhaustive()
    }
}

/// How a spot check failed, with the witnessing sample.
#[derive(Debug, Clone)]
pub enum CoefficientError {
    LowerEllipticity { z: PhaseState, quotient: f64, lambda: f64 },
    UpperEllipticity { z: PhaseState, quotient: f64, lambda: f64 },
    DriftBound { z: PhaseState, value: f64, lambda: f64 },
    NonSymmetric { z: PhaseState, skew: f64 },
}

impl fmt::Display for CoefficientError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientError::LowerEllipticity { z, quotient, lambda } => write!(
                f,
                "ellipticity lower bound violated: A xi.xi / |xi|^2 = {quotient} < 1/{lambda} at t={}, x={:?}, v={:?}",
                z.t, z.x, z.v
            ),
            CoefficientError::UpperEllipticity { z, quotient, lambda } => write!(
                f,
                "ellipticity upper bound violated: A xi.xi / |xi|^2 = {quotient} > {lambda} at t={}, x={:?}, v={:?}",
                z.t, z.x, z.v
            ),
            CoefficientError::DriftBound { z, value, lambda } => write!(
                f,
                "drift bound violated: |B| + |c| = {value} > {lambda} at t={}, x={:?}, v={:?}",
                z.t, z.x, z.v
            ),
            CoefficientError::NonSymmetric { z, skew } => write!(
                f,
                "diffusion matrix not symmetric: |A12 - A21| = {skew} at t={}, x={:?}, v={:?}",
                z.t, z.x, z.v
            ),
        }
    }
}

impl Error for CoefficientError {}

/// Axis-aligned sampling region for the spot check.
#[derive(Debug, Clone, Copy)]
pub struct SampleBox {
    pub dim: usize,
    pub t: (f64, f64),
    pub x: [(f64, f64); 2],
    pub v: [(f64, f64); 2],
}

impl SampleBox {
    pub fn new_1d(t: (f64, f64), x: (f64, f64), v: (f64, f64)) -> Self {
        SampleBox { dim: 1, t, x: [x, (0.0, 0.0)], v: [v, (0.0, 0.0)] }
    }

    pub fn new_2d(t: (f64, f64), x: [(f64, f64); 2], v: [(f64, f64); 2]) -> Self {
        SampleBox { dim: 2, t, x, v }
    }
}

impl CoefficientField {
    /// Wraps raw evaluators.  Λ > 1 is required; the ellipticity bounds
    /// themselves are only verified by [`CoefficientField::spot_check`].
    pub fn from_closures<FA, FB, FC, FS>(a: FA, b: FB, c: FC, s: FS, lambda: f64) -> Self
    where
        FA: Fn(&PhaseState) -> [[f64; 2]; 2] + Send + Sync + 'static,
        FB: Fn(&PhaseState) -> [f64; 2] + Send + Sync + 'static,
        FC: Fn(&PhaseState) -> f64 + Send + Sync + 'static,
        FS: Fn(&PhaseState) -> f64 + Send + Sync + 'static,
    {
        assert!(lambda > 1.0, "ellipticity constant must exceed 1, got {lambda}");
        CoefficientField { a: Arc::new(a), b: Arc::new(b), c: Arc::new(c), s: Arc::new(s), lambda }
    }

    /// Constant coefficients.  The matrix must be symmetric.
    pub fn constant(a: [[f64; 2]; 2], b: [f64; 2], c: f64, s: f64, lambda: f64) -> Self {
        assert!(
            (a[0][1] - a[1][0]).abs() <= 1e-14 * (1.0 + a[0][1].abs()),
            "diffusion matrix must be symmetric"
        );
        Self::from_closures(move |_| a, move |_| b, move |_| c, move |_| s, lambda)
    }

    /// A = I, B = 0, c = 0, s = 0: the benchmark's coefficients.
    pub fn isotropic_unit() -> Self {
        Self::constant([[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0], 0.0, 0.0, 2.0)
    }

    pub fn a(&self, z: &PhaseState) -> [[f64; 2]; 2] {
        (self.a)(z)
    }

    pub fn b(&self, z: &PhaseState) -> [f64; 2] {
        (self.b)(z)
    }

    pub fn c(&self, z: &PhaseState) -> f64 {
        (self.c)(z)
    }

    pub fn s(&self, z: &PhaseState) -> f64 {
        (self.s)(z)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Checks the ellipticity and drift bounds on `n` random samples
    /// drawn from `region` (random z, random unit ξ per sample).
    /// Deterministic in `seed`.
    pub fn spot_check(&self, region: &SampleBox, n: usize, seed: u64) -> Result<(), CoefficientError> {
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
        let mut unit = move || {
            state ^= state >> 12;
            state ^= state << 25;
            state ^= state >> 27;
            (state.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64 / (1u64 << 53) as f64
        };
        let dim = region.dim;
        // loose floating-point slack so exact-boundary fields pass
        let slack = 1e-12;
        for _ in 0..n {
            let mut z = PhaseState::origin(dim);
            z.t = region.t.0 + (region.t.1 - region.t.0) * unit();
            for i in 0..dim {
                z.x[i] = region.x[i].0 + (region.x[i].1 - region.x[i].0) * unit();
                z.v[i] = region.v[i].0 + (region.v[i].1 - region.v[i].0) * unit();
            }
            let a = self.a(&z);
            if dim == 2 {
                let skew = (a[0][1] - a[1][0]).abs();
                if skew > 1e-10 * (1.0 + a[0][1].abs()) {
                    return Err(CoefficientError::NonSymmetric { z, skew });
                }
            }
            // random direction on the sphere (rejection-free: normalize a
            // cube sample away from the origin)
            let mut xi = [0.0; 2];
            loop {
                let mut norm2 = 0.0;
                for x in xi.iter_mut().take(dim) {
                    *x = 2.0 * unit() - 1.0;
                    norm2 += *x * *x;
                }
                if norm2 > 1e-4 {
                    let norm = norm2.sqrt();
                    for x in xi.iter_mut().take(dim) {
                        *x /= norm;
                    }
                    break;
                }
            }
            let mut quad = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    quad += a[i][j] * xi[i] * xi[j];
                }
            }
            if quad < 1.0 / self.lambda - slack {
                return Err(CoefficientError::LowerEllipticity { z, quotient: quad, lambda: self.lambda });
            }
            if quad > self.lambda + slack {
                return Err(CoefficientError::UpperEllipticity { z, quotient: quad, lambda: self.lambda });
            }
            let b = self.b(&z);
            let bnorm = b[..dim].iter().map(|x| x * x).sum::<f64>().sqrt();
            let total = bnorm + self.c(&z).abs();
            if total > self.lambda + slack {
                return Err(CoefficientError::DriftBound { z, value: total, lambda: self.lambda });
            }
        }
        Ok(())
    }
}
