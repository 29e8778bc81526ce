//! Kummer's confluent hypergeometric function M(a,b,τ) and the Tricomi
//! combination Ψ(τ) behind the steady boundary-layer benchmark.
//!
//! Evaluation strategy (switchover |τ| = 30, DLMF 13.2 / 13.7):
//!
//! * |τ| ≤ 30 — power series in double-double arithmetic.  Negative
//!   arguments go through the Kummer transform M(a,b,τ) = e^τ M(b−a,b,−τ)
//!   so every series has nonnegative terms and no internal cancellation.
//! * τ > 30 — the full asymptotic expansion, dominant e^τ branch plus the
//!   algebraic cos(πa) branch, each truncated at its smallest term.
//! * τ < −30 — Kummer transform of the above; the would-be exponential
//!   branch carries e^{−|τ|} and underflows gracefully, so arbitrarily
//!   negative arguments are fine.
//!
//! Ψ(τ) = c₁ M(−1/6,2/3,τ) + c₂ τ^{1/3} M(1/6,4/3,τ) with
//! c₁ = Γ(1/3)/Γ(1/6) and c₂ = Γ(−1/3)/Γ(−1/6) needs more care: as
//! τ → −∞ the two algebraic asymptotic series cancel *to all orders*
//! (the gamma products Γ(1/3)Γ(2/3) = −Γ(−1/3)Γ(4/3), Γ(1/6)Γ(5/6) =
//! −Γ(−1/6)Γ(7/6) make their coefficients identical), leaving only the
//! exponentially small reflection of the dominant branch,
//!
//! ```text
//!   Ψ(−x) = (1/6) e^{−x} x^{−5/6} Σ_s (5/6)_s (7/6)_s / (s! (−x)^s).
//! ```
//!
//! On −30 ≤ τ < 0 that cancellation reaches sixteen digits, so the
//! combination is assembled in double-double from the transformed series
//! and scaled by e^τ at the end.  Everything the cancellation amplifies
//! by ~e^{30} must be better than f64: the coefficients c₁, c₂ are
//! embedded as double-double constants (generated by
//! `tools/oracle_tables.py`), and the series parameters — all exact
//! sixths — enter as integer ratios (na+6k)/(nb+6k) rather than rounded
//! f64 values.

use super::dd::Dd;
use super::gamma::gamma;
use std::fmt;

/// Series/asymptotic switchover point.
const SERIES_RADIUS: f64 = 30.0;
/// Overflow guard for M: e^τ exceeds f64 range shortly past this.
const M_OVERFLOW_TAU: f64 = 700.0;
const MAX_SERIES_TERMS: usize = 600;
/// Double-double series convergence target.
const DD_EPS: f64 = 1e-33;

/// c₁ = Γ(1/3)/Γ(1/6) as a double-double constant.
pub(crate) const PSI_C1: Dd = Dd::new(0.4812767607607908, -2.55784156748405e-17);
/// c₂ = Γ(−1/3)/Γ(−1/6) = 1/(2√3 c₁) as a double-double constant.
pub(crate) const PSI_C2: Dd = Dd::new(0.5998110819614106, -1.5554149671610446e-17);

/// Errors from the confluent hypergeometric evaluators.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecialError {
    /// b is a nonpositive integer: the series coefficients hit a pole.
    ParameterPole { b: f64 },
    /// e^τ would overflow: M(a,b,τ) is not representable in f64.
    Overflow { tau: f64 },
    /// Argument or parameter is NaN/infinite.
    NonFinite,
    /// The asymptotic expansion bottomed out above the accuracy target.
    AccuracyUnreachable { achieved: f64, requested: f64 },
    /// Argument outside an evaluator's domain (e.g. x ≤ 0 for the steady
    /// benchmark).
    Domain { what: &'static str, value: f64 },
}

impl fmt::Display for SpecialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecialError::ParameterPole { b } => {
                write!(f, "kummer parameter b={b} is a nonpositive integer (series pole)")
            }
            SpecialError::Overflow { tau } => {
                write!(f, "kummer argument tau={tau} overflows f64 (guard at {M_OVERFLOW_TAU})")
            }
            SpecialError::NonFinite => write!(f, "non-finite argument"),
            SpecialError::AccuracyUnreachable { achieved, requested } => write!(
                f,
                "asymptotic expansion bottomed out at {achieved:.2e} relative (requested {requested:.2e})"
            ),
            SpecialError::Domain { what, value } => {
                write!(f, "argument {what}={value} outside the evaluator domain")
            }
        }
    }
}

impl std::error::Error for SpecialError {}

/// Parameter pair (a,b) of M(a,b,·) with the series-pole check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KummerParams {
    pub a: f64,
    pub b: f64,
}

impl KummerParams {
    pub fn new(a: f64, b: f64) -> Result<Self, SpecialError> {
        if !a.is_finite() || !b.is_finite() {
            return Err(SpecialError::NonFinite);
        }
        if b <= 0.0 && b == b.floor() {
            return Err(SpecialError::ParameterPole { b });
        }
        Ok(KummerParams { a, b })
    }
}

/// Power series Σ_k (a)_k/(b)_k x^k/k! in double-double.  The term
/// recurrence stays in double-double so accumulated rounding is ~1e-31
/// of the largest term, not of the sum.  The argument is double-double
/// too: callers derive it from similarity variables whose last bits
/// survive the later cancellation.
pub(crate) fn kummer_series_dd(a: f64, b: f64, x: Dd) -> Dd {
    let xa = x.to_f64().abs();
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    for k in 0..MAX_SERIES_TERMS {
        let kf = k as f64;
        let num = Dd::from_f64(a).add_f64(kf);
        let den = Dd::from_f64(b).add_f64(kf);
        term = term.mul(num).div(den).mul(x).div(Dd::from_f64(kf + 1.0));
        sum = sum.add(term);
        if term.abs().to_f64() <= DD_EPS * sum.abs().to_f64() && kf > xa {
            break;
        }
    }
    sum
}

/// Same series with parameters given as exact sixths: a = na6/6,
/// b = nb6/6.  The benchmark's whole parameter set lives on that
/// lattice, and the Pochhammer ratio (a+k)/(b+k) = (na6+6k)/(nb6+6k)
/// is then a quotient of exactly representable integers.  This matters:
/// rounding 5/6 to f64 perturbs each transformed series by ~2e-16
/// relative, which the e^{|τ|} cancellation in Ψ near |τ| = 30 would
/// amplify to ~1e-2.
pub(crate) fn kummer_series_sixths_dd(na6: i64, nb6: i64, x: Dd) -> Dd {
    let xa = x.to_f64().abs();
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    for k in 0..MAX_SERIES_TERMS {
        let kf = k as f64;
        let num = (na6 + 6 * k as i64) as f64;
        let den = (nb6 + 6 * k as i64) as f64;
        term = term.mul_f64(num).div(Dd::from_f64(den)).mul(x).div(Dd::from_f64(kf + 1.0));
        sum = sum.add(term);
        if term.abs().to_f64() <= DD_EPS * sum.abs().to_f64() && kf > xa {
            break;
        }
    }
    sum
}

/// M(a,b,τ) in double-double for |τ| ≤ ~35 (series region plus the
/// cross-validation band).  Negative arguments use the Kummer transform;
/// the e^τ factor is applied in f64 at the end (1 ulp).
pub(crate) fn kummer_m_dd(p: KummerParams, tau: f64) -> Dd {
    if tau >= 0.0 {
        kummer_series_dd(p.a, p.b, Dd::from_f64(tau))
    } else {
        kummer_series_dd(p.b - p.a, p.b, Dd::from_f64(-tau)).mul_f64(tau.exp())
    }
}

/// One asymptotic tail Σ_s (p)_s (q)_s w^s / s!, truncated at its
/// smallest term.  Returns (sum, smallest |term|/|sum| reached).
fn asym_tail(p: f64, q: f64, w: f64) -> (f64, f64) {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut best = f64::INFINITY;
    for s in 0..200 {
        let sf = s as f64;
        let next = term * (p + sf) * (q + sf) * w / (sf + 1.0);
        if next.abs() >= term.abs() && s > 0 {
            break; // divergent tail: stop at the smallest term
        }
        term = next;
        sum += term;
        best = best.min(term.abs());
        if term.abs() <= f64::EPSILON * sum.abs() {
            break;
        }
    }
    let scale = sum.abs().max(f64::MIN_POSITIVE);
    (sum, best / scale)
}

/// 1/Γ(x), zero at the poles.
fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// Asymptotic M(a,b,x) for x > SERIES_RADIUS: dominant branch
/// Γ(b)/Γ(a) e^x x^{a−b} Σ (b−a)_s(1−a)_s/(s! x^s) plus the algebraic
/// branch Γ(b)cos(πa)/Γ(b−a) x^{−a} Σ (a)_s(a−b+1)_s/(s!(−x)^s)
/// (A&S 13.5.1 with the real-axis Stokes average).
/// Returns (value, achieved relative accuracy estimate).
fn kummer_asym_pos(p: KummerParams, x: f64) -> (f64, f64) {
    let (a, b) = (p.a, p.b);
    let gb = gamma(b);
    let (s_dom, acc_dom) = asym_tail(b - a, 1.0 - a, 1.0 / x);
    let dominant = gb * recip_gamma(a) * x.exp() * x.powf(a - b) * s_dom;
    let (s_alg, acc_alg) = asym_tail(a, a - b + 1.0, -1.0 / x);
    let algebraic = gb * (std::f64::consts::PI * a).cos() * recip_gamma(b - a) * x.powf(-a) * s_alg;
    let value = dominant + algebraic;
    // the recessive branch's truncation error is negligible against the
    // dominant one unless the dominant prefactor vanishes
    let acc = if dominant != 0.0 { acc_dom } else { acc_alg };
    (value, acc)
}

/// Asymptotic M(a,b,τ) for τ < −SERIES_RADIUS via the Kummer transform;
/// the exponential branch carries e^{−|τ|} and underflows cleanly.
fn kummer_asym_neg(p: KummerParams, tau: f64) -> (f64, f64) {
    let (a, b) = (p.a, p.b);
    let y = -tau;
    let (s_alg, acc_alg) = asym_tail(a, a - b + 1.0, 1.0 / y);
    let algebraic = gamma(b) * recip_gamma(b - a) * y.powf(-a) * s_alg;
    let (s_exp, _) = asym_tail(b - a, 1.0 - a, -1.0 / y);
    let exponential =
        (-y).exp() * gamma(b) * (std::f64::consts::PI * (b - a)).cos() * recip_gamma(a) * y.powf(a - b) * s_exp;
    (algebraic + exponential, acc_alg)
}

/// Kummer's function M(a,b,τ) = Σ_k (a)_k/(b)_k τ^k/k!.
///
/// Accuracy ~1e-13 relative or better for the parameter families used by
/// the benchmark (pinned by the oracle-table tests).  τ > 700 is
/// rejected (e^τ overflows); arbitrarily negative τ is fine.
pub fn kummer_m(a: f64, b: f64, tau: f64) -> Result<f64, SpecialError> {
    let p = KummerParams::new(a, b)?;
    if !tau.is_finite() {
        return Err(SpecialError::NonFinite);
    }
    if tau > M_OVERFLOW_TAU {
        return Err(SpecialError::Overflow { tau });
    }
    if tau.abs() <= SERIES_RADIUS {
        return Ok(kummer_m_dd(p, tau).to_f64());
    }
    let (value, achieved) = if tau > 0.0 {
        kummer_asym_pos(p, tau)
    } else {
        kummer_asym_neg(p, tau)
    };
    const REQUESTED: f64 = 1e-12;
    if achieved > REQUESTED {
        return Err(SpecialError::AccuracyUnreachable { achieved, requested: REQUESTED });
    }
    Ok(value)
}

/// Ψ, Ψ′, Ψ″ for τ > SERIES_RADIUS from the asymptotic expansions
/// U(a, 2/3+a+1/6, τ) ≈ τ^{−a} Σ (a)_s (1/6)_s/(s!(−τ)^s) of the three
/// contiguous families a = −1/6, 5/6, 11/6:
/// Ψ = U(−1/6,2/3,τ), Ψ′ = (1/6)U(5/6,5/3,τ), Ψ″ = −(5/36)U(11/6,8/3,τ).
pub(crate) fn psi_asym_pos_derivs(tau: f64) -> (f64, f64, f64) {
    let w = -1.0 / tau;
    let (s0, _) = asym_tail(-1.0 / 6.0, 1.0 / 6.0, w);
    let (s1, _) = asym_tail(5.0 / 6.0, 1.0 / 6.0, w);
    let (s2, _) = asym_tail(11.0 / 6.0, 1.0 / 6.0, w);
    let psi = tau.powf(1.0 / 6.0) * s0;
    let dpsi = (1.0 / 6.0) * tau.powf(-5.0 / 6.0) * s1;
    let ddpsi = -(5.0 / 36.0) * tau.powf(-11.0 / 6.0) * s2;
    (psi, dpsi, ddpsi)
}

/// Ψ, Ψ′, Ψ″ for τ < −SERIES_RADIUS.  With x = −τ and
/// P(x) = x^{−5/6} S̃(x), S̃(x) = Σ (5/6)_s(7/6)_s/(s!(−x)^s):
/// Ψ(τ) = (1/6) e^{−x} P(x); the τ-derivatives follow from the chain
/// rule, Ψ′(τ) = (1/6)e^{−x}(P−P′), Ψ″(τ) = (1/6)e^{−x}(P−2P′+P″).
pub(crate) fn psi_sub_neg_derivs(tau: f64) -> (f64, f64, f64) {
    let x = -tau;
    // S̃ and its first two x-derivatives from one term recurrence:
    // d/dx t_s = −(s/x) t_s.
    let mut term = 1.0f64;
    let mut s0 = 1.0f64;
    let mut s1 = 0.0f64; // Σ s·t_s
    let mut s2 = 0.0f64; // Σ s(s+1)·t_s
    for s in 0..200 {
        let sf = s as f64;
        let next = term * (5.0 / 6.0 + sf) * (7.0 / 6.0 + sf) / ((sf + 1.0) * -x);
        if next.abs() >= term.abs() && s > 0 {
            break;
        }
        term = next;
        s0 += term;
        s1 += (sf + 1.0) * term;
        s2 += (sf + 1.0) * (sf + 2.0) * term;
        if term.abs() <= f64::EPSILON * s0.abs() {
            break;
        }
    }
    // t_k ∝ x^{−k}: S̃′ = −Σ k t_k / x, S̃″ = Σ k(k+1) t_k / x²
    let st = s0;
    let st_d = -s1 / x;
    let st_dd = s2 / (x * x);
    let xp = x.powf(-5.0 / 6.0);
    let p0 = xp * st;
    let p1 = -(5.0 / 6.0) * xp / x * st + xp * st_d;
    let p2 = (55.0 / 36.0) * xp / (x * x) * st - (5.0 / 3.0) * xp / x * st_d + xp * st_dd;
    let e = (1.0 / 6.0) * (-x).exp();
    (e * p0, e * (p0 - p1), e * (p0 - 2.0 * p1 + p2))
}

/// Tricomi's function Ψ(τ) = c₁M(−1/6,2/3,τ) + c₂ τ^{1/3} M(1/6,4/3,τ)
/// with the real cube root for τ < 0.
///
/// Any finite τ is accepted: beyond the series region the asymptotic
/// expansions take over (algebraic growth for τ → +∞, exponential decay
/// for τ → −∞, underflowing to 0 near τ ≈ −745).
pub fn tricomi_psi(tau: f64) -> Result<f64, SpecialError> {
    if !tau.is_finite() {
        return Err(SpecialError::NonFinite);
    }
    if tau > SERIES_RADIUS {
        return Ok(psi_asym_pos_derivs(tau).0);
    }
    if tau < -SERIES_RADIUS {
        return Ok(psi_sub_neg_derivs(tau).0);
    }
    if tau >= 0.0 {
        // c₁M₁ and c₂τ^{1/3}M₂ grow like ±e^τ with opposite signs for
        // large τ, so this sum cancels too: exact-sixths parameters and
        // double-double keep ~16 digits through |τ| = 30.
        let m1 = kummer_series_sixths_dd(-1, 4, Dd::from_f64(tau));
        let m2 = kummer_series_sixths_dd(1, 8, Dd::from_f64(tau));
        Ok(PSI_C1.mul(m1).add(PSI_C2.mul(Dd::cbrt(tau)).mul(m2)).to_f64())
    } else {
        // transformed difference: Ψ(τ) = e^τ [c₁ M(5/6,2/3,x) − c₂ x^{1/3} M(7/6,4/3,x)],
        // x = −τ; both series have nonnegative terms, the double-double
        // subtraction absorbs the e^x cancellation.
        let x = -tau;
        let m1 = kummer_series_sixths_dd(5, 4, Dd::from_f64(x));
        let m2 = kummer_series_sixths_dd(7, 8, Dd::from_f64(x));
        let bracket = PSI_C1.mul(m1).sub(PSI_C2.mul(Dd::cbrt(x)).mul(m2));
        Ok(bracket.to_f64() * tau.exp())
    }
}
