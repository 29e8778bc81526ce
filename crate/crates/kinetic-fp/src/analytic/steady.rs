//! The explicit steady boundary-layer benchmark on the half line:
//! f(x,v) = x^{1/6} Ψ(τ) with τ = −v³/(9x) solves
//!
//! ```text
//!   v ∂x f = ∂v² f   on x > 0, v ∈ ℝ,     f(0, v) = 0 for v > 0,
//! ```
//!
//! the characteristic-boundary model whose optimal Hölder exponents are
//! 1/6 in x (at v = 0) and 1/2 in v (at x = 0⁺).
//!
//! Derivatives use the smooth similarity form rather than Ψ-chain rules:
//! with u = v x^{−1/3} (so τ = −u³/9),
//!
//! ```text
//!   f = x^{1/6} g(u),   g(u) = c₁ M(−1/6,2/3,τ) − c₂ 9^{−1/3} u M(1/6,4/3,τ),
//!   f_x = x^{−5/6} (g/6 − u g′/3),   f_v = x^{−1/6} g′,   f_vv = x^{−1/2} g″,
//! ```
//!
//! which keeps everything single-valued across v = 0 (the τ^{1/3} branch
//! point cancels against v's sign).  g, g′, g″ are assembled in
//! double-double from six contiguous Kummer series; for τ < 0 each series
//! is transformed to a positive argument first, so the e^{|τ|}-sized
//! cancellation happens between clean double-double quantities.  Beyond
//! |τ| = 30 the asymptotic Ψ, Ψ′, Ψ″ expansions take over in plain f64
//! (no cancellation survives there).

use super::dd::Dd;
use super::kummer::{
    kummer_series_sixths_dd, psi_asym_pos_derivs, psi_sub_neg_derivs, SpecialError, PSI_C1, PSI_C2,
};

/// 9^{−1/3} as a double-double constant (tools/oracle_tables.py).
const CBRT9_INV: Dd = Dd::new(0.4807498567691361, 8.345991843293013e-18);

const SERIES_RADIUS: f64 = 30.0;

/// Value and first derivatives of the steady benchmark at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyDerivatives {
    pub f: f64,
    pub f_x: f64,
    pub f_v: f64,
    pub f_vv: f64,
}

/// The explicit steady solution; all evaluators are pure.
#[derive(Debug, Clone, Copy, Default)]
pub struct SteadyBenchmark;

/// g, g′, g″ at u, each in double-double.  `scaled` selects the τ < 0
/// path where every Kummer value carries a deferred e^τ factor.
fn g_derivs(u: Dd) -> (Dd, Dd, Dd, f64) {
    let u2 = u.mul(u);
    let u3 = u2.mul(u);
    let tau = u3.div(Dd::from_f64(-9.0));
    let t = tau.to_f64();
    // Contiguous ladder: M′(a,b,·) = (a/b) M(a+1,b+1,·) applied to the
    // two base families M₁ = M(−1/6,2/3,τ), M₂ = M(1/6,4/3,τ):
    //   M₁′ = −(1/4) M(5/6,5/3,τ)    M₁″ = −(1/8) M(11/6,8/3,τ)
    //   M₂′ =  (1/8) M(7/6,7/3,τ)    M₂″ =  (1/16) M(13/6,10/3,τ)
    let (m1, d1, dd1, m2, d2, dd2, log_scale);
    if t >= 0.0 {
        m1 = kummer_series_sixths_dd(-1, 4, tau);
        d1 = kummer_series_sixths_dd(5, 10, tau).mul_f64(-0.25);
        dd1 = kummer_series_sixths_dd(11, 16, tau).mul_f64(-0.125);
        m2 = kummer_series_sixths_dd(1, 8, tau);
        d2 = kummer_series_sixths_dd(7, 14, tau).mul_f64(0.125);
        dd2 = kummer_series_sixths_dd(13, 20, tau).mul_f64(0.0625);
        log_scale = 0.0;
    } else {
        // Kummer transform M(a,b,τ) = e^τ M(b−a,b,−τ); the common e^τ is
        // returned separately and applied after the combination.
        let x = tau.neg();
        m1 = kummer_series_sixths_dd(5, 4, x);
        d1 = kummer_series_sixths_dd(5, 10, x).mul_f64(-0.25);
        dd1 = kummer_series_sixths_dd(5, 16, x).mul_f64(-0.125);
        m2 = kummer_series_sixths_dd(7, 8, x);
        d2 = kummer_series_sixths_dd(7, 14, x).mul_f64(0.125);
        dd2 = kummer_series_sixths_dd(7, 20, x).mul_f64(0.0625);
        log_scale = t;
    }
    let k = PSI_C2.mul(CBRT9_INV);
    // g   = c₁ M₁ − K u M₂
    // g′  = −(c₁/3) u² M₁′ − K M₂ + (K/3) u³ M₂′
    // g″  = −(2c₁/3) u M₁′ + (c₁/9) u⁴ M₁″ + (4K/3) u² M₂′ − (K/9) u⁵ M₂″
    let g = PSI_C1.mul(m1).sub(k.mul(u).mul(m2));
    let gp = PSI_C1
        .mul(u2)
        .mul(d1)
        .div(Dd::from_f64(-3.0))
        .sub(k.mul(m2))
        .add(k.mul(u3).mul(d2).div(Dd::from_f64(3.0)));
    // scalar factors that are not exact in f64 (2/3, 4/3) stay as exact
    // integer multiply + double-double divide: a rounded factor here
    // would ride on the e^τ-sized intermediates and survive cancellation
    let u4 = u2.mul(u2);
    let three = Dd::from_f64(3.0);
    let gpp = PSI_C1
        .mul(u)
        .mul(d1)
        .mul_f64(-2.0)
        .div(three)
        .add(PSI_C1.mul(u4).mul(dd1).div(Dd::from_f64(9.0)))
        .add(k.mul(u2).mul(d2).mul_f64(4.0).div(three))
        .sub(k.mul(u4).mul(u).mul(dd2).div(Dd::from_f64(9.0)));
    (g, gp, gpp, log_scale)
}

impl SteadyBenchmark {
    /// f(x,v); x > 0 required.
    pub fn value(&self, x: f64, v: f64) -> Result<f64, SpecialError> {
        Ok(self.derivatives(x, v)?.f)
    }

    /// f and its partials ∂x f, ∂v f, ∂v² f.
    pub fn derivatives(&self, x: f64, v: f64) -> Result<SteadyDerivatives, SpecialError> {
        if !x.is_finite() || !v.is_finite() {
            return Err(SpecialError::NonFinite);
        }
        if x <= 0.0 {
            return Err(SpecialError::Domain { what: "x", value: x });
        }
        let tau = -v * v * v / (9.0 * x);
        if tau.abs() <= SERIES_RADIUS {
            let cbrt_x = Dd::cbrt(x);
            let u = Dd::from_f64(v).div(cbrt_x);
            let (g, gp, gpp, log_scale) = g_derivs(u);
            let scale = log_scale.exp();
            let (g, gp, gpp) = (g.to_f64() * scale, gp.to_f64() * scale, gpp.to_f64() * scale);
            let uf = u.to_f64();
            let x16 = x.powf(1.0 / 6.0);
            Ok(SteadyDerivatives {
                f: x16 * g,
                f_x: (g / 6.0 - uf * gp / 3.0) / (x16 * x.powf(2.0 / 3.0)),
                f_v: gp / x.powf(1.0 / 6.0),
                f_vv: gpp / x.sqrt(),
            })
        } else {
            // asymptotic region: chain rule on f = x^{1/6} Ψ(τ) with
            // τ_x = −τ/x, τ_v = −v²/(3x), τ_vv = −2v/(3x).
            let (psi, dpsi, ddpsi) = if tau > 0.0 {
                psi_asym_pos_derivs(tau)
            } else {
                psi_sub_neg_derivs(tau)
            };
            let x16 = x.powf(1.0 / 6.0);
            let tau_v = -v * v / (3.0 * x);
            let tau_vv = -2.0 * v / (3.0 * x);
            Ok(SteadyDerivatives {
                f: x16 * psi,
                f_x: (psi / 6.0 - tau * dpsi) / x.powf(5.0 / 6.0),
                f_v: x16 * dpsi * tau_v,
                f_vv: x16 * (ddpsi * tau_v * tau_v + dpsi * tau_vv),
            })
        }
    }

    /// Pointwise PDE residual v ∂x f − ∂v² f (zero up to roundoff).
    pub fn residual(&self, x: f64, v: f64) -> Result<f64, SpecialError> {
        let d = self.derivatives(x, v)?;
        Ok(v * d.f_x - d.f_vv)
    }
}

/// f(x,v) and partial derivatives of the steady benchmark (free-function
/// form of [`SteadyBenchmark::derivatives`]).
pub fn steady_solution(x: f64, v: f64) -> Result<SteadyDerivatives, SpecialError> {
    SteadyBenchmark.derivatives(x, v)
}
