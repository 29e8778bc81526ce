#!/usr/bin/env python3
"""Generate high-precision reference tables for the special-function layer.

Computes, at 60 significant digits via mpmath:
  * the Tricomi-type combination Psi(tau) = c1*M(-1/6,2/3,tau) + c2*tau^(1/3)*M(1/6,4/3,tau)
    with c1 = Gamma(1/3)/Gamma(1/6), c2 = Gamma(-1/3)/Gamma(-1/6),
  * Kummer M values for the parameter families used by the steady benchmark,
  * the benchmark field f(x,v) = x^(1/6) Psi(-v^3/(9x)) and its derivatives,
  * assorted Gamma values for validating the Lanczos implementation.

Reference values are rounded to nearest f64 and emitted as Rust source
(`tests/data/reference_tables.rs` in the library crate).  Double-double (hi, lo)
pairs for the two combination constants are printed to stdout for embedding
in `src/special/mod.rs`.  Re-run after any change to the sampled points.
"""

import random

import mpmath as mp

mp.mp.dps = 60

C1 = mp.gamma(mp.mpf(1) / 3) / mp.gamma(mp.mpf(1) / 6)
C2 = mp.gamma(-mp.mpf(1) / 3) / mp.gamma(-mp.mpf(1) / 6)


def cbrt(x):
    return mp.sign(x) * mp.power(abs(x), mp.mpf(1) / 3)


def psi(tau):
    """Tricomi combination, with working precision raised to absorb the
    e^|tau| cancellation between the two Kummer terms."""
    tau = mp.mpf(tau)
    ambient = mp.mp.dps
    mp.mp.dps = ambient + int(mp.ceil(abs(tau) * 0.4343)) + 20
    try:
        c1 = mp.gamma(mp.mpf(1) / 3) / mp.gamma(mp.mpf(1) / 6)
        c2 = mp.gamma(-mp.mpf(1) / 3) / mp.gamma(-mp.mpf(1) / 6)
        out = c1 * mp.hyp1f1(-mp.mpf(1) / 6, mp.mpf(2) / 3, tau) + c2 * cbrt(
            tau
        ) * mp.hyp1f1(mp.mpf(1) / 6, mp.mpf(4) / 3, tau)
    finally:
        mp.mp.dps = ambient
    return +out


def steady_f(x, v):
    x, v = mp.mpf(x), mp.mpf(v)
    return mp.power(x, mp.mpf(1) / 6) * psi(-(v**3) / (9 * x))


def dd_pair(value):
    hi = float(value)
    lo = float(value - mp.mpf(hi))
    return hi, lo


def fmt(x):
    """Shortest f64 literal that round-trips the correctly rounded value."""
    return repr(float(x))


def main():
    # --- sanity: behaviour of Psi on the negative axis ------------------
    print("# Psi on the negative axis (all-orders cancellation check)")
    for x in [5, 10, 24, 30, 100]:
        x = mp.mpf(x)
        exact = psi(-x)
        # subdominant model: (1/6) e^{-x} x^{-5/6} * S(x),
        # S(x) = sum_s (5/6)_s (7/6)_s / (s! (-x)^s), truncated at min term
        s_val, term, k = mp.mpf(1), mp.mpf(1), 0
        while True:
            term_next = (
                term
                * (mp.mpf(5) / 6 + k)
                * (mp.mpf(7) / 6 + k)
                / ((k + 1) * (-x))
            )
            if abs(term_next) > abs(term):
                break
            s_val += term_next
            term = term_next
            k += 1
            if k > 400:
                break
        model = mp.exp(-x) * mp.power(x, -mp.mpf(5) / 6) * s_val / 6
        print(f"  x={float(x):6.1f}  Psi(-x)={mp.nstr(exact, 12):>20}"
              f"  model={mp.nstr(model, 12):>20}  rel={float(abs(exact-model)/abs(exact)):.3e}")

    print("\n# Psi(0) = Gamma(1/3)/Gamma(1/6) =", mp.nstr(C1, 25))
    print("# c2 =", mp.nstr(C2, 25), " (check 1/(2*sqrt(3)*c1) =",
          mp.nstr(1 / (2 * mp.sqrt(3) * C1), 25), ")")
    # For tau > 0 the combination equals the classical U(-1/6, 2/3, tau);
    # agreement with mp.hyperu cross-validates the adaptive-precision route.
    for t in [1, 10, 30, 100, 1000]:
        rel = abs(psi(t) - mp.hyperu(-mp.mpf(1) / 6, mp.mpf(2) / 3, t)) / psi(t)
        assert rel < mp.mpf(10) ** (-40), (t, rel)
    print("# Psi(tau>0) == hyperu(-1/6,2/3,tau) to 40 digits: ok")
    print("# Psi(1000)/1000^(1/6) - 1 =",
          mp.nstr(psi(1000) / mp.power(1000, mp.mpf(1) / 6) - 1, 8))
    print("# Psi(-1000)*1000^(5/6)   =", mp.nstr(psi(-1000) * mp.power(1000, mp.mpf(5) / 6), 8))
    m_neg4 = mp.hyp1f1(-mp.mpf(1) / 6, mp.mpf(2) / 3, mp.mpf(-10000))
    lead = mp.gamma(mp.mpf(2) / 3) / mp.gamma(mp.mpf(5) / 6) * mp.power(10000, mp.mpf(1) / 6)
    print("# M(-1/6,2/3,-1e4)/leading - 1 =", mp.nstr(m_neg4 / lead - 1, 8))
    print("# 3^(-1/3) =", mp.nstr(mp.power(3, -mp.mpf(1) / 3), 25))

    print("\n# double-double constants")
    for name, val in [
        ("PSI_C1", C1),
        ("PSI_C2", C2),
        ("CBRT9_INV", mp.power(9, -mp.mpf(1) / 3)),
    ]:
        hi, lo = dd_pair(val)
        print(f"  {name}: hi = {fmt(hi)}, lo = {fmt(lo)}")

    # --- frozen tables ---------------------------------------------------
    rng = random.Random(20260816)
    taus = sorted(rng.uniform(-30.0, 30.0) for _ in range(50))

    lines = []
    lines.append("// Generated by tools/oracle_tables.py (mpmath 1.3.0, 60 digits).")
    lines.append("// Values are correctly rounded to nearest f64. Do not edit by hand.")
    lines.append("")
    lines.append("/// (tau, M(-1/6,2/3,tau), M(1/6,4/3,tau), Psi(tau)) at 50 seeded")
    lines.append("/// uniform draws from [-30, 30] (seed 20260816).")
    lines.append("pub const KUMMER_PSI_REFERENCE: [(f64, f64, f64, f64); 50] = [")
    for t in taus:
        t = mp.mpf(repr(t))
        m1 = mp.hyp1f1(-mp.mpf(1) / 6, mp.mpf(2) / 3, t)
        m2 = mp.hyp1f1(mp.mpf(1) / 6, mp.mpf(4) / 3, t)
        lines.append(f"    ({fmt(t)}, {fmt(m1)}, {fmt(m2)}, {fmt(psi(t))}),")
    lines.append("];")
    lines.append("")

    ext = [-200.0, -100.0, -50.0, -35.0, -31.0, -30.5, -29.5, -25.0,
           25.0, 29.5, 30.5, 31.0, 35.0, 50.0, 100.0, 200.0, 1000.0]
    lines.append("/// (tau, Psi(tau)) across and beyond the series/asymptotic switchover.")
    lines.append(f"pub const PSI_EXTENDED_REFERENCE: [(f64, f64); {len(ext)}] = [")
    for t in ext:
        val = (mp.hyperu(-mp.mpf(1) / 6, mp.mpf(2) / 3, mp.mpf(repr(t)))
               if t > 500 else psi(repr(t)))
        lines.append(f"    ({fmt(mp.mpf(repr(t)))}, {fmt(val)}),")
    lines.append("];")
    lines.append("")

    gen = [(0.5, 1.5, 8.0), (0.5, 1.5, -8.0), (2.0, 3.0, 12.5), (1.25, 0.75, -20.0),
           (5.0 / 6, 2.0 / 3, 15.0), (7.0 / 6, 4.0 / 3, -4.0)]
    lines.append("/// (a, b, tau, M(a,b,tau)) for assorted parameters.")
    lines.append(f"pub const KUMMER_GENERAL_REFERENCE: [(f64, f64, f64, f64); {len(gen)}] = [")
    for a, b, t in gen:
        val = mp.hyp1f1(mp.mpf(repr(a)), mp.mpf(repr(b)), mp.mpf(repr(t)))
        lines.append(f"    ({fmt(a)}, {fmt(b)}, {fmt(t)}, {fmt(val)}),")
    lines.append("];")
    lines.append("")

    gammas = [0.1, 1.0 / 6, 1.0 / 3, 0.5, 2.0 / 3, 5.0 / 6, 1.0, 7.0 / 6,
              4.0 / 3, 1.5, 5.0 / 3, 11.0 / 6, 2.5, 3.75, 6.5, 10.0, 20.5,
              -1.0 / 6, -1.0 / 3, -0.5, -5.0 / 6, -1.5, -2.25, -6.3]
    lines.append("/// (z, Gamma(z)) on a spread of positive and negative arguments.")
    lines.append(f"pub const GAMMA_REFERENCE: [(f64, f64); {len(gammas)}] = [")
    for z in gammas:
        z = mp.mpf(repr(z))
        lines.append(f"    ({fmt(z)}, {fmt(mp.gamma(z))}),")
    lines.append("];")
    lines.append("")

    pts = [(0.01, 0.0), (0.01, 1.0), (0.01, -1.0), (0.1, 0.5), (0.5, -2.0),
           (1.0, 0.3), (1.0, -1.0), (2.0, 2.0), (5.0, -3.0), (10.0, 4.0),
           (10.0, -5.0), (0.01, 5.0), (0.01, -5.0), (3.0, 0.0), (1e-6, -0.01),
           (1e-8, -0.05)]
    lines.append("/// (x, v, f, df/dx, df/dv, d2f/dv2) for the steady half-space")
    lines.append("/// benchmark f(x,v) = x^(1/6) Psi(-v^3/(9x)).")
    lines.append(f"pub const STEADY_REFERENCE: [(f64, f64, f64, f64, f64, f64); {len(pts)}] = [")
    mp.mp.dps = 80
    for x, v in pts:
        f = steady_f(x, v)
        fx = mp.diff(lambda xx: steady_f(xx, v), mp.mpf(repr(x)))
        fv = mp.diff(lambda vv: steady_f(x, vv), mp.mpf(repr(v)))
        fvv = mp.diff(lambda vv: steady_f(x, vv), mp.mpf(repr(v)), 2)
        lines.append(f"    ({fmt(mp.mpf(repr(x)))}, {fmt(mp.mpf(repr(v)))}, "
                     f"{fmt(f)}, {fmt(fx)}, {fmt(fv)}, {fmt(fvv)}),")
    lines.append("];")

    out = "crates/kinetic-fp/tests/data/reference_tables.rs"
    with open(out, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"\nwrote {out}")


if __name__ == "__main__":
    main()
