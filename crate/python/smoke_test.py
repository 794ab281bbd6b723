#!/usr/bin/env python3
"""Smoke test for the Python bindings.

Expects the compiled extension next to this file as ``leofade.so``:

    cargo build --release -p leofade-py
    cp target/release/libleofade_py.so python/leofade.so
    python3 python/smoke_test.py

Checks a few frozen values, the internal dual-route agreement, and the
calibration of the bundled reference scenario. Uses only the standard
library so it runs in a bare interpreter.
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import leofade  # noqa: E402


def check(name: str, ok: bool, detail: str = "") -> None:
    print(f"  {'ok' if ok else 'FAIL'}  {name}" + (f" ({detail})" if detail else ""))
    if not ok:
        raise SystemExit(f"smoke test failed at: {name}")


def rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def main() -> None:
    print("special functions:")
    # Frozen references (50-digit arithmetic, rounded to double).
    check(
        "reg_lower_gamma(2.5, 1.0)",
        rel(leofade.reg_lower_gamma(2.5, 1.0), 0.15085496391539036) < 1e-13,
    )
    check(
        "upper_gamma_ext(-0.75, 2.0)",
        rel(leofade.upper_gamma_ext(-0.75, 2.0), 0.023731339995251629) < 1e-12,
    )
    check("ln_gamma(7.25)", rel(leofade.ln_gamma(7.25), math.lgamma(7.25)) < 1e-14)
    # Complementarity and the recurrence, spot-checked through the bindings.
    a, x = 3.75, 2.2
    q = math.exp(math.log(leofade.upper_gamma_ext(a, x)) - leofade.ln_gamma(a))
    check("P + Q = 1", abs(leofade.reg_lower_gamma(a, x) + q - 1.0) < 1e-12)
    lhs = leofade.upper_gamma_ext(a + 1.0, x)
    rhs = a * leofade.upper_gamma_ext(a, x) + x**a * math.exp(-x)
    check("recurrence", rel(lhs, rhs) < 1e-12)

    print("outage law:")
    for m, q, nu in [(5.0, 20.0, 0.5), (20.0, 5.0, 0.1), (7.0, 7.0, 0.9)]:
        closed = leofade.outage_closed(m, q, nu)
        numeric = leofade.outage_numeric(m, q, nu)
        check(f"closed vs numeric (m={m}, q={q}, nu={nu})", rel(closed, numeric) < 1e-8)
    mix = leofade.outage_mixture([0.4, 0.6], [(5.0, 20.0), (10.0, 8.0)], 0.5)
    lo = min(leofade.outage_closed(5.0, 20.0, 0.5), leofade.outage_closed(10.0, 8.0, 0.5))
    hi = max(leofade.outage_closed(5.0, 20.0, 0.5), leofade.outage_closed(10.0, 8.0, 0.5))
    check("mixture between state extremes", lo <= mix <= hi)

    print("reference scenario:")
    sc = leofade.Scenario()
    check("case names", sc.case_names() == ["bl-dominant", "fa-dominant", "nominal"])
    check("eta_tt", sc.eta_tt == 0.2)

    cal = sc.calibrate()
    check(
        "calibrated nu_ref",
        rel(cal["nu_ref"], 0.5086922181178) < 1e-10,
        f"nu_ref = {cal['nu_ref']:.13e}",
    )
    check("achieved target", rel(cal["achieved_outage"], 1e-2) < 1e-11)
    check("nu round-trip", rel(sc.nu_at(cal["p_th_w"], 25.0), cal["nu_ref"]) < 1e-12)

    sigma, beta = sc.case_average_stats("bl-dominant", 25.0)
    check("bl-dominant sigma_a2 @25deg", rel(sigma, 6.72e-2) < 2e-2, f"{sigma:.4e}")
    check("bl-dominant beta_rms2 @25deg", rel(beta, 4.04e-11) < 2e-2, f"{beta:.4e}")

    p = sc.coupled_outage("bl-dominant", 25.0, sc.eta_tt, cal["nu_ref"])
    check("bl-dominant outage @25deg", rel(p, 2.85e-2) < 3e-2, f"{p:.4e}")
    base = sc.baseline_outage(25.0, 0.2, cal["nu_ref"])
    check("baseline outage @25deg", rel(base, 1e-2) < 1e-9, f"{base:.6e}")

    params = sc.case_params("nominal", 25.0, sc.eta_tt)
    check("three states", len(params) == 3)
    check("m, q positive", all(m > 0 and q > 0 for m, q in params))

    print("monte carlo:")
    est, se = sc.mc_outage("bl-dominant", 25.0, cal["nu_ref"], 200000, 4)
    check(
        "estimate within 4 standard errors",
        abs(est - p) <= 4.0 * se,
        f"est = {est:.4e}, analytic = {p:.4e}, se = {se:.1e}",
    )
    est2, _ = sc.mc_outage("bl-dominant", 25.0, cal["nu_ref"], 200000, 4)
    check("deterministic for a fixed seed", est == est2)

    pairs = sc.sample("nominal", 25.0, 50000, 4)
    mean_a = sum(a for a, _ in pairs) / len(pairs)
    check("scintillation factor is unit mean", abs(mean_a - 1.0) < 5e-3, f"{mean_a:.4f}")
    check("pointing factor in (0, 1]", all(0.0 < hp <= 1.0 for _, hp in pairs))

    print("smoke test passed")


if __name__ == "__main__":
    main()
