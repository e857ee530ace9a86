"""Acceptance gate: one test per criterion, each printing a verdict line.

Run with ``pytest -s tests/test_acceptance.py`` to see the verdict lines
for passing criteria as well.
"""

import math
import time
from fractions import Fraction

import numpy as np

from hermult._accel import phi_table
from hermult.hermite_core import eval_phi_1d
from hermult.nuclearity import (
    classify_regime,
    compare_sr_kappa,
    gl_condition,
    kappa_sum,
)
from hermult.quadrature import (
    fit_norm_exponent,
    fit_norm_exponent_p4,
    gauss_hermite_rule,
)
from hermult.spectral_ops import (
    analyze,
    apply_multiplier,
    constant_symbol,
    effective_weights,
    heat_symbol,
    kernel_series,
    mehler_kernel,
    power_symbol,
    synthesize,
)
from hermult.trace_lab import (
    spectral_trace_check,
    trace_diagonal_quadrature,
    trace_symbol_sum,
)


def _verdict(index, name, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {index}/8 {name}: {status} ({detail})", flush=True)
    assert ok, f"acceptance {index}/8 {name}: {detail}"


def _phi(k, x):
    return eval_phi_1d(k, x).to_float()


def test_1_semigroup_trace_identity():
    start = time.perf_counter()
    worst = 0.0
    for n in (1, 2, 3):
        for t in (0.5, 1.0, 2.0):
            m = heat_symbol(t, n=n)
            closed = (math.exp(t) - math.exp(-t)) ** -n
            sym = trace_symbol_sum(m, N=40).value
            diag = trace_diagonal_quadrature(m, N=40)
            worst = max(worst, abs(sym - closed), abs(diag - closed))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-8 and elapsed < 10.0
    _verdict(1, "semigroup trace identity", ok,
             f"max abs err {worst:.3e}, {elapsed:.2f}s")


def test_2_mehler_agreement():
    start = time.perf_counter()
    rng = np.random.default_rng(20260816)
    worst_err = 0.0
    worst_tail = 0.0
    for n in (1, 2):
        for t in (0.5, 1.0, 2.0):
            m = heat_symbol(t, n=n)
            for _ in range(10):
                x = tuple(rng.uniform(-1.5, 1.5, size=n))
                y = tuple(rng.uniform(-1.5, 1.5, size=n))
                kv = kernel_series(m, x, y, 64)
                worst_tail = max(worst_tail, kv.tail_bound)
                worst_err = max(worst_err, abs(kv.value - mehler_kernel(t, x, y)))
    elapsed = time.perf_counter() - start
    ok = worst_tail < 1e-9 and worst_err < 1e-8 and elapsed < 30.0
    _verdict(2, "Mehler agreement", ok,
             f"max abs err {worst_err:.3e}, max tail {worst_tail:.3e}, {elapsed:.2f}s")


def test_3_norm_asymptotics():
    start = time.perf_counter()
    targets = (
        (1.0, 0.25, 0.02),
        (2.0, 0.0, 0.01),
        (6.0, -1.0 / 9.0, 0.02),
        (math.inf, -1.0 / 12.0, 0.02),
    )
    ok = True
    parts = []
    for p, expected, band in targets:
        slope = fit_norm_exponent(p, (200, 2000))
        ok = ok and abs(slope - expected) <= band
        parts.append(f"p={p:g}: {slope:+.4f} (want {expected:+.4f}+-{band})")
    power, log_power = fit_norm_exponent_p4((200, 2000))
    ok = ok and abs(power - (-0.125)) <= 0.03
    parts.append(f"p=4: {power:+.4f} (want -0.1250+-0.03, log power {log_power:+.3f})")
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 300.0
    _verdict(3, "norm asymptotics", ok, "; ".join(parts) + f"; {elapsed:.1f}s")


_NINE_PAIRS = (
    (2, 2), (Fraction(4, 3), 2), (1.2, 2),
    (2, 4), (Fraction(4, 3), 4), (1.2, 4),
    (2, 6), (Fraction(4, 3), 6), (1.2, 6),
)


def test_4_criterion_consistency():
    start = time.perf_counter()
    all_finite = True
    max_drift = 0.0
    anomaly = False
    for t in (0.5, 1.0):
        m = heat_symbol(t)
        for p1, p2 in _NINE_PAIRS:
            case = classify_regime(p1, p2, 1)
            report = kappa_sum(m, case, tol=1e-8)
            all_finite = all_finite and report.verdict == "finite"
            ratio = compare_sr_kappa(m, case, N=80)
            anomaly = anomaly or ratio.anomaly
            max_drift = max(max_drift, ratio.drift)
    divergent = kappa_sum(constant_symbol(1.0), classify_regime(2, 2, 1), N=200)
    elapsed = time.perf_counter() - start
    ok = (all_finite and not anomaly and max_drift < 0.05
          and divergent.verdict == "divergent" and elapsed < 300.0)
    _verdict(4, "criterion consistency", ok,
             f"all finite {all_finite}, max ratio drift {max_drift:.3%}, "
             f"constant symbol {divergent.verdict}, {elapsed:.1f}s")


def test_5_exact_special_case():
    exact = True
    for p in (Fraction(3, 2), 2, 3):
        for m, n in ((heat_symbol(1.0), 1), (heat_symbol(0.5, n=2), 2)):
            case = classify_regime(p, p, 1)
            report = kappa_sum(m, case, N=100)
            plain = math.fsum(
                math.comb(K + n - 1, n - 1) * abs(m.level_value(K))
                for K in range(101)
            )
            exact = exact and report.partial_sum == plain
    _verdict(5, "exact special case", exact,
             "kappa partial sums equal plain |m|^r sums bit-for-bit"
             if exact else "bitwise mismatch")


def test_6_orthonormality_and_eigenfunction_action():
    rule = gauss_hermite_rule(60)
    T = phi_table(rule.nodes, 50)
    G = (T * effective_weights(rule)) @ T.T
    gram_err = float(np.max(np.abs(G - np.eye(51))))

    rule64 = gauss_hermite_rule(64)
    grid = np.linspace(-4.0, 4.0, 21)
    action_err = 0.0
    for m in (heat_symbol(1.0), power_symbol(1.0)):
        for nu in range(21):
            c = analyze(lambda x, k=nu: _phi(k, x), 24, rule64)
            out = apply_multiplier(m, c)
            for x in grid:
                want = m((nu,)) * _phi(nu, x)
                action_err = max(action_err, abs(synthesize(out, x) - want))
    ok = gram_err < 1e-12 and action_err < 1e-8
    _verdict(6, "orthonormality and eigenfunction action", ok,
             f"max Gram defect {gram_err:.3e}, max action err {action_err:.3e}")


def test_7_gl_exponent():
    ok = (
        gl_condition(2) == Fraction(1)
        and gl_condition(1) == Fraction(2, 3)
        and gl_condition(Fraction(4, 3)) == Fraction(4, 5)
        and gl_condition(4) == Fraction(4, 5)
    )
    _verdict(7, "GL exponent", ok,
             f"r(2)={gl_condition(2)}, r(1)={gl_condition(1)}, "
             f"r(4/3)={gl_condition(Fraction(4, 3))}, r(4)={gl_condition(4)}")


def test_8_spectral_vs_nuclear_trace():
    report = spectral_trace_check(heat_symbol(1.0), 2, truncation=60)
    ok = report.discrepancy < 1e-10
    _verdict(8, "spectral vs nuclear trace", ok,
             f"discrepancy {report.discrepancy:.3e}, "
             f"max off-diagonal {report.max_offdiagonal:.3e}")
