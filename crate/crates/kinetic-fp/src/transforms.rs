//! The kinetic scaling group, kinetic cylinders, and the velocity-weight
//! coefficient transform.
//!
//! The equation is invariant in form under the two-parameter family
//!
//! ```text
//!   T_{z0,r}(t̃, x̃, ṽ) = (t0 + r² t̃,  x0 + r³ x̃ + r² t̃ v0,  v0 + r ṽ),
//! ```
//!
//! provided the coefficients rescale as (A, rB, r²c, r²s).  Kinetic
//! cylinders are the images Q_r(z0) = T_{z0,r}(Q_1(0)) of the unit
//! backward cylinder; they look backward in time and shear in x along
//! the transported velocity v0.  The t³ ↔ x ↔ v³ anisotropy of these
//! cylinders is what the Hölder diagnostics measure against.

use crate::solver::CoefficientField;

/// A point z = (t, x, v) in time × position × velocity.  `x` and `v`
/// use fixed 2-arrays; only the first `dim` entries are meaningful
/// (dim = 1 keeps index 0 and zeros index 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub t: f64,
    pub x: [f64; 2],
    pub v: [f64; 2],
    pub dim: usize,
}

impl PhaseState {
    pub fn new_1d(t: f64, x: f64, v: f64) -> Self {
        PhaseState { t, x: [x, 0.0], v: [v, 0.0], dim: 1 }
    }

    pub fn new_2d(t: f64, x: [f64; 2], v: [f64; 2]) -> Self {
        PhaseState { t, x, v, dim: 2 }
    }

    /// Origin of phase space in the given dimension.
    pub fn origin(dim: usize) -> Self {
        assert!(dim == 1 || dim == 2, "dim must be 1 or 2, got {dim}");
        PhaseState { t: 0.0, x: [0.0; 2], v: [0.0; 2], dim }
    }

    /// |v|² over the active components.
    pub fn speed_squared(&self) -> f64 {
        self.v[..self.dim].iter().map(|c| c * c).sum()
    }
}

fn norm(w: &[f64]) -> f64 {
    w.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Applies T_{z0,r} to z̃: (t0 + r²t̃, x0 + r³x̃ + r²t̃ v0, v0 + rṽ).
///
/// The three exponents (2, 3, 1) are forced by the transport operator:
/// ∂t + v·∇x commutes with the map exactly.
pub fn scale_map(z0: &PhaseState, r: f64, z_tilde: &PhaseState) -> PhaseState {
    assert!(r > 0.0, "scale r must be positive, got {r}");
    assert_eq!(z0.dim, z_tilde.dim, "dimension mismatch");
    let r2 = r * r;
    let r3 = r2 * r;
    let mut x = [0.0; 2];
    let mut v = [0.0; 2];
    for i in 0..z0.dim {
        x[i] = z0.x[i] + r3 * z_tilde.x[i] + r2 * z_tilde.t * z0.v[i];
        v[i] = z0.v[i] + r * z_tilde.v[i];
    }
    PhaseState { t: z0.t + r2 * z_tilde.t, x, v, dim: z0.dim }
}

/// Inverse of [`scale_map`]: recovers z̃ with T_{z0,r}(z̃) = z.
pub fn scale_map_inverse(z0: &PhaseState, r: f64, z: &PhaseState) -> PhaseState {
    assert!(r > 0.0, "scale r must be positive, got {r}");
    assert_eq!(z0.dim, z.dim, "dimension mismatch");
    let r2 = r * r;
    let r3 = r2 * r;
    let dt = z.t - z0.t;
    let mut x = [0.0; 2];
    let mut v = [0.0; 2];
    for i in 0..z0.dim {
        x[i] = (z.x[i] - z0.x[i] - dt * z0.v[i]) / r3;
        v[i] = (z.v[i] - z0.v[i]) / r;
    }
    PhaseState { t: dt / r2, x, v, dim: z0.dim }
}

/// Backward kinetic cylinder Q_r(z0), the image of the unit cylinder
/// under T_{z0,r}.
#[derive(Debug, Clone, Copy)]
pub struct KineticCylinder {
    pub center: PhaseState,
    pub radius: f64,
}

impl KineticCylinder {
    pub fn new(center: PhaseState, radius: f64) -> Self {
        assert!(radius > 0.0, "cylinder radius must be positive, got {radius}");
        KineticCylinder { center, radius }
    }

    /// Membership by the explicit inequalities
    /// t0 − r² < t ≤ t0,  |x − x0 − (t−t0) v0| < r³,  |v − v0| < r:
    /// half-open backward in time, strict in the sheared position and in
    /// velocity.
    pub fn contains(&self, z: &PhaseState) -> bool {
        assert_eq!(self.center.dim, z.dim, "dimension mismatch");
        let z0 = &self.center;
        let r = self.radius;
        let dt = z.t - z0.t;
        if !(dt > -r * r && dt <= 0.0) {
            return false;
        }
        let d = z.dim;
        let mut dx = [0.0; 2];
        let mut dv = [0.0; 2];
        for i in 0..d {
            dx[i] = z.x[i] - z0.x[i] - dt * z0.v[i];
            dv[i] = z.v[i] - z0.v[i];
        }
        norm(&dx[..d]) < r * r * r && norm(&dv[..d]) < r
    }
}

/// Velocity weight ⟨v⟩^q with ⟨v⟩ = (1 + |v|²)^{1/2}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    pub q: f64,
}

impl WeightSpec {
    pub fn new(q: f64) -> Self {
        assert!(q >= 0.0 && q.is_finite(), "weight exponent must be finite and >= 0, got {q}");
        WeightSpec { q }
    }

    /// ⟨v⟩ = (1 + |v|²)^{1/2} over the active components.
    pub fn bracket(z: &PhaseState) -> f64 {
        (1.0 + z.speed_squared()).sqrt()
    }

    /// ⟨v⟩^q ≥ 1.
    pub fn weight(&self, z: &PhaseState) -> f64 {
        (1.0 + z.speed_squared()).powf(self.q / 2.0)
    }
}

/// Coefficients of the equation satisfied by F = ⟨v⟩^q f when f solves
/// the base equation:
///
/// ```text
///   (∂t + v·∇x) F = ∇v·(A ∇v F + B′ F) + (B + B′)·∇v F + c′ F + ⟨v⟩^q s,
///   B′ = −q A v / ⟨v⟩²,
///   c′ = c + q² (Av·v)/⟨v⟩⁴ − q (B·v)/⟨v⟩².
/// ```
///
/// A is unchanged, so the ellipticity constant carries over; |B′| ≤ qΛ
/// and |c′ − c| ≤ q²Λ + qΛ uniformly in v, which is why moment gain
/// costs no regularity.
#[derive(Clone)]
pub struct WeightedCoefficients {
    base: CoefficientField,
    q: f64,
}

/// Builds the weighted-transform view of a coefficient field (q ≥ 0).
pub fn weighted_coefficients(coeffs: &CoefficientField, q: f64) -> WeightedCoefficients {
    assert!(q >= 0.0 && q.is_finite(), "weight exponent must be finite and >= 0, got {q}");
    WeightedCoefficients { base: coeffs.clone(), q }
}

impl WeightedCoefficients {
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Diffusion matrix (unchanged by the transform).
    pub fn a(&self, z: &PhaseState) -> [[f64; 2]; 2] {
        self.base.a(z)
    }

    /// Divergence-form drift B′ = −q A v/⟨v⟩².
    pub fn b_prime(&self, z: &PhaseState) -> [f64; 2] {
        let a = self.base.a(z);
        let br2 = 1.0 + z.speed_squared();
        let mut out = [0.0; 2];
        for i in 0..z.dim {
            let mut av = 0.0;
            for j in 0..z.dim {
                av += a[i][j] * z.v[j];
            }
            out[i] = -self.q * av / br2;
        }
        out
    }

    /// Effective first-order drift B + B′.
    pub fn b_effective(&self, z: &PhaseState) -> [f64; 2] {
        let b = self.base.b(z);
        let bp = self.b_prime(z);
        let mut out = [0.0; 2];
        for i in 0..z.dim {
            out[i] = b[i] + bp[i];
        }
        out
    }

    /// Zeroth-order coefficient c′ = c + q²(Av·v)/⟨v⟩⁴ − q(B·v)/⟨v⟩².
    pub fn c_prime(&self, z: &PhaseState) -> f64 {
        let a = self.base.a(z);
        let b = self.base.b(z);
        let br2 = 1.0 + z.speed_squared();
        let mut avv = 0.0;
        let mut bv = 0.0;
        for i in 0..z.dim {
            bv += b[i] * z.v[i];
            for j in 0..z.dim {
                avv += a[i][j] * z.v[i] * z.v[j];
            }
        }
        self.base.c(z) + self.q * self.q * avv / (br2 * br2) - self.q * bv / br2
    }

    /// Weighted source ⟨v⟩^q s.
    pub fn source(&self, z: &PhaseState) -> f64 {
        WeightSpec::new(self.q).weight(z) * self.base.s(z)
    }
}

/// Coefficient field seen through T_{z0,r}: (A∘T, rB∘T, r²c∘T, r²s∘T).
/// If f solves the base equation, f∘T solves the equation with these
/// coefficients on the preimage.
pub fn scaled_coefficients(coeffs: &CoefficientField, z0: &PhaseState, r: f64) -> CoefficientField {
    assert!(r > 0.0, "scale r must be positive, got {r}");
    let z0 = *z0;
    let (ca, cb, cc, cs) = (coeffs.clone(), coeffs.clone(), coeffs.clone(), coeffs.clone());
    CoefficientField::from_closures(
        move |z| ca.a(&scale_map(&z0, r, z)),
        move |z| {
            let b = cb.b(&scale_map(&z0, r, z));
            [r * b[0], r * b[1]]
        },
        move |z| r * r * cc.c(&scale_map(&z0, r, z)),
        move |z| r * r * cs.s(&scale_map(&z0, r, z)),
        coeffs.lambda(),
    )
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

    fn random_state(rng: &mut u64, dim: usize) -> PhaseState {
        let mut draw = || 4.0 * xorshift(rng) - 2.0;
        let mut z = PhaseState::origin(dim);
        z.t = draw();
        for i in 0..dim {
            z.x[i] = draw();
            z.v[i] = draw();
        }
        z
    }

    #[test]
    fn scale_map_examples() {
        let origin = PhaseState::origin(2);
        let z = PhaseState::new_2d(0.7, [1.0, -2.0], [0.25, 3.0]);
        assert_eq!(scale_map(&origin, 1.0, &z), z);

        let zt = PhaseState::new_2d(-1.0, [0.0, 0.0], [1.0, 0.0]);
        let got = scale_map(&origin, 2.0, &zt);
        assert_eq!(got, PhaseState::new_2d(-4.0, [0.0, 0.0], [2.0, 0.0]));
    }

    #[test]
    fn composition_is_exact_on_dyadics() {
        // both maps are affine with dyadic coefficients, so the group law
        // scale(z0,r) ∘ scale(0,ρ) = scale(z0,rρ) holds bit for bit
        let z0 = PhaseState::new_2d(0.5, [1.25, -0.75], [2.0, 0.5]);
        let zt = PhaseState::new_2d(-0.5, [0.25, 1.5], [-1.0, 0.75]);
        let (r, rho) = (2.0, 0.25);
        let lhs = scale_map(&z0, r, &scale_map(&PhaseState::origin(2), rho, &zt));
        let rhs = scale_map(&z0, r * rho, &zt);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn composition_on_random_inputs() {
        let mut rng = 0x9E3779B97F4A7C15u64;
        for _ in 0..100 {
            let z0 = random_state(&mut rng, 2);
            let zt = random_state(&mut rng, 2);
            let r = 0.1 + 2.0 * xorshift(&mut rng);
            let rho = 0.1 + 2.0 * xorshift(&mut rng);
            let lhs = scale_map(&z0, r, &scale_map(&PhaseState::origin(2), rho, &zt));
            let rhs = scale_map(&z0, r * rho, &zt);
            assert!((lhs.t - rhs.t).abs() < 1e-12);
            for i in 0..2 {
                assert!((lhs.x[i] - rhs.x[i]).abs() < 1e-12);
                assert!((lhs.v[i] - rhs.v[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn inverse_round_trips() {
        let mut rng = 123456789u64;
        for _ in 0..100 {
            let z0 = random_state(&mut rng, 2);
            let z = random_state(&mut rng, 2);
            let r = 0.1 + 2.0 * xorshift(&mut rng);
            let back = scale_map(&z0, r, &scale_map_inverse(&z0, r, &z));
            assert!((back.t - z.t).abs() < 1e-12);
            for i in 0..2 {
                assert!((back.x[i] - z.x[i]).abs() < 1e-12);
                assert!((back.v[i] - z.v[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cylinder_membership_rules() {
        let q = KineticCylinder::new(PhaseState::origin(2), 1.0);
        assert!(q.contains(&PhaseState::new_2d(-0.5, [0.0, 0.0], [0.0, 0.0])));
        // cylinders look backward: the center's own time is included,
        // any later time is not
        assert!(q.contains(&PhaseState::origin(2)));
        assert!(!q.contains(&PhaseState::new_2d(1e-12, [0.0, 0.0], [0.0, 0.0])));
        // strict and half-open edges
        assert!(!q.contains(&PhaseState::new_2d(-1.0, [0.0, 0.0], [0.0, 0.0])));
        assert!(!q.contains(&PhaseState::new_2d(0.0, [1.0, 0.0], [0.0, 0.0])));
        assert!(!q.contains(&PhaseState::new_2d(0.0, [0.0, 0.0], [1.0, 0.0])));
    }

    #[test]
    fn scaled_cylinder_is_image_of_unit_cylinder() {
        let z0 = PhaseState::new_2d(1.0, [0.5, -0.25], [2.0, -1.0]);
        let r = 0.75;
        let unit = KineticCylinder::new(PhaseState::origin(2), 1.0);
        let scaled = KineticCylinder::new(z0, r);
        let mut rng = 42u64;
        let mut inside = 0;
        for _ in 0..1000 {
            // sample near the unit cylinder so both membership outcomes
            // occur often
            let mut zt = PhaseState::origin(2);
            zt.t = 0.15 - 1.3 * xorshift(&mut rng);
            for i in 0..2 {
                zt.x[i] = 1.1 * (2.0 * xorshift(&mut rng) - 1.0);
                zt.v[i] = 1.1 * (2.0 * xorshift(&mut rng) - 1.0);
            }
            let z = scale_map(&z0, r, &zt);
            assert_eq!(unit.contains(&zt), scaled.contains(&z), "at {zt:?}");
            if unit.contains(&zt) {
                inside += 1;
            }
        }
        // the sampling box straddles the membership boundary both ways
        assert!(inside > 50 && inside < 950, "degenerate sample: {inside}");
    }

    #[test]
    fn weight_bracket_basics() {
        let w = WeightSpec::new(3.0);
        assert_eq!(w.weight(&PhaseState::origin(2)), 1.0);
        let mut rng = 7u64;
        for _ in 0..50 {
            let z = random_state(&mut rng, 2);
            assert!(w.weight(&z) >= 1.0);
            let br = WeightSpec::bracket(&z);
            assert!((br * br - 1.0 - z.speed_squared()).abs() < 1e-14);
        }
    }

    #[test]
    fn weighted_coefficients_match_stated_example() {
        // A = I, B = 0, c = 0, q = 2, v = e1: B' = -e1, c' = 1
        let base = CoefficientField::isotropic_unit();
        let wc = weighted_coefficients(&base, 2.0);
        let z = PhaseState::new_2d(0.0, [0.0, 0.0], [1.0, 0.0]);
        let bp = wc.b_prime(&z);
        assert!((bp[0] + 1.0).abs() < 1e-15 && bp[1].abs() < 1e-15);
        assert!((wc.c_prime(&z) - 1.0).abs() < 1e-15);
        // at v = 0 the weight gradient vanishes
        let z0 = PhaseState::origin(2);
        assert_eq!(wc.b_prime(&z0), [0.0, 0.0]);
        assert_eq!(wc.c_prime(&z0), 0.0);
    }

    #[test]
    fn weighted_coefficients_q_zero_is_identity() {
        let base = CoefficientField::constant(
            [[2.0, 0.3], [0.3, 1.5]],
            [0.5, -0.2],
            0.7,
            0.1,
            4.0,
        );
        let wc = weighted_coefficients(&base, 0.0);
        let mut rng = 99u64;
        for _ in 0..20 {
            let z = random_state(&mut rng, 2);
            assert_eq!(wc.b_prime(&z), [0.0, 0.0]);
            assert_eq!(wc.b_effective(&z), base.b(&z));
            assert_eq!(wc.c_prime(&z), base.c(&z));
            assert_eq!(wc.source(&z), base.s(&z));
        }
    }

    /// 5-point 4th-order first and second derivative in one coordinate of
    /// a closure; exact (to roundoff) on polynomials of degree ≤ 4.
    fn diff5(f: &dyn Fn(f64) -> f64, at: f64, h: f64) -> (f64, f64) {
        let v = [f(at - 2.0 * h), f(at - h), f(at), f(at + h), f(at + 2.0 * h)];
        let d1 = (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / (12.0 * h);
        let d2 = (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (12.0 * h * h);
        (d1, d2)
    }

    #[test]
    fn weighted_identity_on_polynomials() {
        // For F = ⟨v⟩^q f, the weighted-equation residual of F equals
        // ⟨v⟩^q times the base residual of f.  With q = 2 and f of degree
        // ≤ 2 in v both are polynomials, so 4th-order stencils are exact.
        let a = [[2.0, 0.3], [0.3, 1.5]];
        let b = [0.5, -0.2];
        let c = 0.7;
        let base = CoefficientField::constant(a, b, c, 0.0, 4.0);
        let q = 2.0;
        let wc = weighted_coefficients(&base, q);

        let f = |z: &PhaseState| {
            1.0 + 0.3 * z.t - 0.2 * z.x[0] + 0.1 * z.x[1] + z.v[0] - 0.5 * z.v[1]
                + 0.25 * z.v[0] * z.v[1]
                + z.v[1] * z.v[1]
        };
        let cap_f = |z: &PhaseState| (1.0 + z.speed_squared()) * f(z);

        // ∇v·B′ for constant A in closed form:
        // ∂vi( −q Σj A_ij vj / ⟨v⟩² ) summed over i
        //   = −q [ tr A / ⟨v⟩² − 2 (Av·v)/⟨v⟩⁴ ].
        let div_b_prime = |z: &PhaseState| {
            let br2 = 1.0 + z.speed_squared();
            let mut avv = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    avv += a[i][j] * z.v[i] * z.v[j];
                }
            }
            -q * ((a[0][0] + a[1][1]) / br2 - 2.0 * avv / (br2 * br2))
        };

        let residual = |g: &dyn Fn(&PhaseState) -> f64,
                        z: &PhaseState,
                        drift: [f64; 2],
                        zeroth: f64,
                        source: f64| {
            let h = 1e-2;
            let (gt, _) = diff5(&|t| g(&PhaseState { t, ..*z }), z.t, h);
            let mut transport = gt;
            for i in 0..2 {
                let (gx, _) = diff5(
                    &|xi| {
                        let mut zz = *z;
                        zz.x[i] = xi;
                        g(&zz)
                    },
                    z.x[i],
                    h,
                );
                transport += z.v[i] * gx;
            }
            let mut diffusion = 0.0;
            let mut drift_term = 0.0;
            for i in 0..2 {
                let (gvi, gvii) = diff5(
                    &|vi| {
                        let mut zz = *z;
                        zz.v[i] = vi;
                        g(&zz)
                    },
                    z.v[i],
                    h,
                );
                diffusion += a[i][i] * gvii;
                drift_term += drift[i] * gvi;
            }
            // mixed second derivatives by nested stencils
            let mixed = {
                let gv0 = |v1: f64| {
                    let (d, _) = diff5(
                        &|v0| {
                            let mut zz = *z;
                            zz.v[0] = v0;
                            zz.v[1] = v1;
                            g(&zz)
                        },
                        z.v[0],
                        h,
                    );
                    d
                };
                let (d01, _) = diff5(&gv0, z.v[1], h);
                d01
            };
            diffusion += (a[0][1] + a[1][0]) * mixed;
            transport - diffusion - drift_term - zeroth * g(z) - source
        };

        let mut rng = 0xDEADBEEFu64;
        for _ in 0..10 {
            let z = random_state(&mut rng, 2);
            let r_base = residual(&f, &z, b, c, 0.0);
            // divergence form expanded: ∇v·(B′F) = B′·∇vF + (∇v·B′)F,
            // so total drift is B + 2B′ and zeroth order is c′ + ∇v·B′
            let bp = wc.b_prime(&z);
            let drift = [b[0] + 2.0 * bp[0], b[1] + 2.0 * bp[1]];
            let zeroth = wc.c_prime(&z) + div_b_prime(&z);
            let r_weighted = residual(&cap_f, &z, drift, zeroth, wc.source(&z));
            let w = WeightSpec::new(q).weight(&z);
            assert!(
                (r_weighted - w * r_base).abs() < 1e-8,
                "identity off by {:e} at {z:?}",
                r_weighted - w * r_base
            );
        }
    }

    #[test]
    fn scaled_coefficients_follow_the_group() {
        let base = CoefficientField::constant([[1.0, 0.0], [0.0, 1.0]], [1.0, -2.0], 3.0, 5.0, 2.0);
        let z0 = PhaseState::new_2d(1.0, [0.5, 0.0], [1.0, 0.0]);
        let r = 0.5;
        let scaled = scaled_coefficients(&base, &z0, r);
        let z = PhaseState::new_2d(-0.25, [0.1, 0.2], [0.3, 0.4]);
        assert_eq!(scaled.b(&z), [0.5, -1.0]);
        assert_eq!(scaled.c(&z), 0.75);
        assert_eq!(scaled.s(&z), 1.25);
        assert_eq!(scaled.a(&z), base.a(&z));
    }
}
