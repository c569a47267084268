"""Acceptance suite: every check prints one PASS/FAIL line.

The checks are oracle-based: closed special values, independently computed
eigenvalue sums, contour-independence, cross-representation agreement, and
asymptotic slope fits.  `run_all` is what the command line `selftest`
subcommand executes; the pytest acceptance module asserts the same results.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import mpmath as mp

from .determinants import (det_check_massive, det_check_massless,
                           det_check_rose, det_massive, det_massless_chain,
                           det_rose)
from .graphs import (DiracParams, MetricGraph, RoseGraph, circle_conditions,
                     expand_spin_conditions, rose_spin_conditions)
from .secular import (evolution_secular, gamma, reduced_tr_secular,
                      rose_secular, secular_massive_imag, secular_massive_neg,
                      secular_massive_pos, secular_massless, transition_matrix)
from .special import (epstein, epstein_continuation, epstein_deriv0,
                      epstein_series)
from .spectrum import count_zeros_box, find_roots
from .zeta import (MassiveZetaEngine, massless_engine, rose_engine,
                   zeta_massless, zeta_rose, _dlog_theta)


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: list[str] = field(default_factory=list)
    seconds: float = 0.0


class _Recorder:
    def __init__(self, name):
        self.result = CheckResult(name=name, passed=True)

    def check(self, label: str, measured: float, tol: float):
        ok = bool(measured <= tol)
        self.result.passed &= ok
        self.result.details.append(
            f"{'ok' if ok else 'FAIL'}  {label}: {measured:.3g} (tol {tol:g})")
        return ok


def _rose_b2_generic() -> RoseGraph:
    return RoseGraph((1.0, np.sqrt(2.0)), (0.4, 1.1))


def _rose_b2_neumann() -> RoseGraph:
    return RoseGraph((1.0, np.sqrt(2.0)), (0.0, 0.0))


def _as_general(rose: RoseGraph):
    vc = expand_spin_conditions(rose_spin_conditions(rose))
    return vc, rose.metric_graph()


# ---------------------------------------------------------------------------

def criterion_1(seed: int = 0) -> CheckResult:
    """Closed lattice-sum values and series/continuation consistency."""
    rec = _Recorder("epstein closed values")
    for c in (0.5, 1.0, 2.7):
        rec.check(f"E(0, {c}) = -1/2", abs(epstein(0.0, c) + 0.5), 1e-8)
        h = 1e-4
        d1 = (epstein(h, c) - epstein(-h, c)) / (2 * h)
        d2 = (epstein(h / 2, c) - epstein(-h / 2, c)) / h
        fd = (4 * d2 - d1) / 3
        rec.check(f"E'(0, {c}) finite differences vs closed form",
                  abs(fd - epstein_deriv0(c)), 1e-7)
    for a in (1.1, 1.3, 2.0):
        for c in (0.3, 2.7, 10.0):
            s1 = epstein_series(a, c)
            s2 = epstein_continuation(a, c)
            rec.check(f"series vs continuation at ({a}, {c})",
                      abs(s1 - s2) / abs(s1), 1e-10)
    return rec.result


def _hurwitz_tail(s: complex, slope: float, offset: float, n_from: int) -> complex:
    """sum_{j > n_from} (slope*j + offset)^(-s) via the Hurwitz zeta."""
    with mp.workdps(30):
        val = mp.power(slope, -s) * mp.zeta(s, n_from + 1 + offset / slope)
        return complex(val)


def _eigenvalue_sum_oracle(rose: RoseGraph, s: float, n_roots: int = 2000):
    """2 (1 + e^{-i pi s}) [sum over computed roots + Hurwitz tail]."""
    density = np.sum(rose.lengths) / (2.0 * np.pi)   # roots per unit k
    if any(t > 1e-9 for t in rose.thetas):
        density *= 2.0
    k_max = (n_roots + 60) / density
    spec = find_roots(rose_secular(rose), k_max)
    roots = np.repeat(spec.positive_roots, spec.multiplicities)
    head = np.sum(roots ** (-s))
    # asymptotic linear fit of the high roots indexes the tail
    j = np.arange(1, len(roots) + 1, dtype=float)
    fit = np.polyfit(j[-400:], roots[-400:], 1)
    tail = _hurwitz_tail(s, fit[0], fit[1], len(roots))
    return 2.0 * (1.0 + np.exp(-1j * np.pi * s)) * (head + tail), len(roots)


def criterion_2(seed: int = 0) -> CheckResult:
    """Massless zeta vs direct eigenvalue sums on the two-loop rose."""
    rec = _Recorder("massless eigenvalue-sum oracle")
    rose = _rose_b2_neumann()
    s = 1.5
    oracle, found = _eigenvalue_sum_oracle(rose, s)
    rec.result.details.append(f"     roots used: {found}")
    zr = zeta_rose(s, rose).value
    rec.check("rose representation vs eigenvalue sum",
              abs(zr - oracle) / abs(oracle), 1e-5)
    vc, graph = _as_general(rose)
    zg = zeta_massless(s, vc, graph).value
    rec.check("determinant representation vs eigenvalue sum",
              abs(zg - oracle) / abs(oracle), 1e-5)
    rec.check("two representations agree", abs(zg - zr) / abs(zr), 1e-7)
    return rec.result


def criterion_3(seed: int = 0) -> CheckResult:
    """Independence of the branch-ray angle."""
    rec = _Recorder("branch-angle independence")
    angles = (np.pi / 3, np.pi / 2, 2 * np.pi / 3)
    ss = (0.25, 0.5 + 0.3j)
    rose = _rose_b2_generic()
    engines = [rose_engine(rose, DiracParams(alpha=a)) for a in angles]
    for s in ss:
        vals = [e.value(s).value for e in engines]
        rec.check(f"rose zeta({s}) spread", float(np.ptp(np.abs(
            np.asarray(vals) - vals[0]))), 1e-8)
    primes = [e.prime0() for e in engines]
    rec.check("rose zeta'(0) spread",
              max(abs(p - primes[0]) for p in primes), 1e-8)
    vc = circle_conditions(1.0)
    graph = MetricGraph((1.0,))
    engines = [massless_engine(vc, graph, DiracParams(alpha=a)) for a in angles]
    for s in ss:
        vals = [e.value(s).value for e in engines]
        rec.check(f"circle zeta({s}) spread", float(np.ptp(np.abs(
            np.asarray(vals) - vals[0]))), 1e-8)
    primes = [e.prime0() for e in engines]
    rec.check("circle zeta'(0) spread",
              max(abs(p - primes[0]) for p in primes), 1e-8)
    return rec.result


def criterion_4(seed: int = 0) -> CheckResult:
    """Closed-form determinants vs exp(-zeta'(0))."""
    rec = _Recorder("determinant cross-checks")
    one_loop = RoseGraph((1.0,), (np.pi,))
    closed = det_rose(one_loop)
    rec.check("one-loop closed form equals 16", abs(closed - 16.0), 1e-10)
    rec.check("one-loop rose det vs zeta",
              det_check_rose(one_loop).rel_discrepancy, 1e-6)

    circle_vc = circle_conditions(1.0)
    circle_graph = MetricGraph((1.0,))
    rec.check("circle massless det vs zeta",
              det_check_massless(circle_vc, circle_graph).rel_discrepancy, 1e-6)
    rec.check("circle massive det vs zeta (m=1)",
              det_check_massive(circle_vc, circle_graph, 1.0).rel_discrepancy, 1e-6)

    rose = _rose_b2_generic()
    rec.check("two-loop rose det vs zeta",
              det_check_rose(rose).rel_discrepancy, 1e-6)
    vc, graph = _as_general(rose)
    rec.check("two-loop determinant-form chain equals rose closed form",
              abs(det_massless_chain(vc, graph) - det_rose(rose))
              / abs(det_rose(rose)), 1e-8)

    half_turn = RoseGraph((1.0,), (np.pi / 2,))
    vc1, graph1 = _as_general(half_turn)
    rec.check("one-loop massive det vs zeta (theta=pi/2, m=1)",
              det_check_massive(vc1, graph1, 1.0).rel_discrepancy, 1e-6)
    return rec.result


def criterion_5(seed: int = 0) -> CheckResult:
    """Spectrum correctness on the circle and root interlacing on the rose."""
    rec = _Recorder("spectrum correctness")
    vc = circle_conditions(1.0)
    graph = MetricGraph((1.0,))
    k_max = 20.5 * np.pi
    expected = 2 * np.pi * np.arange(1, 11)

    spec_det = find_roots(secular_massless(vc, graph), k_max)
    rec.check("circle roots (determinant form) = 2 pi n",
              float(np.max(np.abs(spec_det.positive_roots[:10] - expected))), 1e-10)
    spec_ev = find_roots(evolution_secular(vc, graph), k_max)
    rec.check("circle roots (evolution form) = 2 pi n",
              float(np.max(np.abs(spec_ev.positive_roots[:10] - expected))), 1e-10)
    rec.check("circle: winding totals match listed roots (both forms)",
              float(abs(sum(d.winding for d in spec_det.diagnostics)
                        - spec_det.total_count)
                    + abs(sum(d.winding for d in spec_ev.diagnostics)
                          - spec_ev.total_count)), 0.0)

    rose = _rose_b2_generic()
    ev = rose_secular(rose)
    density = np.sum(rose.lengths) / np.pi
    spec = find_roots(ev, 104 / density)
    diags = spec.diagnostics[:100]
    ok = all(d.n_roots == 1 for d in diags)
    rec.check("one root per inter-pole interval (100 intervals)",
              0.0 if ok and len(diags) == 100 else 1.0, 0.0)
    rec.check("rose: winding totals match listed roots",
              float(abs(sum(d.winding for d in spec.diagnostics) - spec.total_count)),
              0.0)
    return rec.result


def criterion_6(seed: int = 0) -> CheckResult:
    """Structural identities of the secular machinery."""
    rec = _Recorder("structural identities")
    rng = np.random.default_rng(seed or 20260810)

    graphs = [(circle_conditions(1.0), MetricGraph((1.0,))),
              _as_general(RoseGraph((1.0,), (np.pi / 2,))),
              _as_general(_rose_b2_generic())]
    worst = 0.0
    for vc, g in graphs:
        t = transition_matrix(vc, 1.0)
        worst = max(worst, float(np.max(np.abs(
            t.conj().T @ t - np.eye(t.shape[0])))))
    rec.check("transition matrix unitarity residual (3 graphs)", worst, 1e-12)

    rose = _rose_b2_generic()
    vc, graph = _as_general(rose)
    m = 1.0
    f_pos = secular_massive_pos(vc, graph, m)
    f_hat = secular_massive_imag(vc, graph, m, "f")
    t_grid = np.linspace(1.02, 9.0, 200)
    lhs = f_pos(1j * t_grid)
    rhs = f_hat(t_grid)
    rec.check("f(i t) equals the hyperbolic-form continuation (200 points)",
              float(np.max(np.abs(lhs - rhs) / np.abs(rhs))), 1e-10)

    f0 = secular_massive_pos(vc, graph, 0.0)
    g0 = secular_massive_neg(vc, graph, 0.0)
    ks = rng.uniform(0.3, 25.0, size=50)
    lhs = f0(ks.astype(complex))
    rhs = g0(-ks.astype(complex))
    rec.check("positive/negative secular agreement under k -> -k (50 points)",
              float(np.max(np.abs(lhs - rhs) / np.abs(rhs))), 1e-10)

    red = reduced_tr_secular(rose_spin_conditions(rose), graph, 0.0)
    full = secular_massless(vc, graph)
    boxes_ok = True
    details = []
    for i in range(20):
        lo = 0.4 + 29.0 * i / 20.0
        hi = lo + 29.0 / 20.0 * 0.9
        rect = (complex(lo, -0.6), complex(hi, 0.6))
        w1 = count_zeros_box(red, rect)
        w2 = count_zeros_box(full, rect)
        if w1 != w2:
            boxes_ok = False
            details.append(f"box {i}: reduced {w1} vs full {w2}")
    rec.check("time-reversal reduced zero set matches 4B form (20 boxes)",
              0.0 if boxes_ok else 1.0, 0.0)
    rec.result.details.extend(details)
    return rec.result


def criterion_7(seed: int = 0) -> CheckResult:
    """Asymptotic slopes of the massive imaginary-axis integrand."""
    rec = _Recorder("asymptotic slope checks")
    vc = circle_conditions(1.0)
    graph = MetricGraph((1.0,))
    m = 1.0
    f_hat = secular_massive_imag(vc, graph, m, "f")
    s = 0.5

    thetas = np.geomspace(3e-4, 3e-3, 12)
    t = m * np.cosh(thetas)
    psi = _dlog_theta(f_hat, thetas) / (m * np.sinh(thetas))
    integrand = (t * t - m * m) ** (-s / 2) * psi
    slope = np.polyfit(np.log(t * t - m * m), np.log(np.abs(integrand)), 1)[0]
    rec.check("threshold exponent -(s+1)/2 at s = 1/2",
              abs(slope - (-(s + 1) / 2)), 0.05)

    thetas = np.linspace(2.5, 4.5, 14)
    t = m * np.cosh(thetas)
    psi = _dlog_theta(f_hat, thetas) / (m * np.sinh(thetas))
    slope = np.polyfit(np.log(t), np.log(np.abs(psi)), 1)[0]
    rec.check("decay exponent of dlog f_hat at large t", abs(slope - (-2.0)), 0.2)
    return rec.result


ALL_CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4,
                criterion_5, criterion_6, criterion_7)


def run_all(seed: int = 0, out=print) -> bool:
    all_ok = True
    for i, crit in enumerate(ALL_CRITERIA, start=1):
        t0 = time.perf_counter()
        try:
            result = crit(seed)
        except Exception as exc:   # a crashed criterion is a failed criterion
            result = CheckResult(name=crit.__doc__.strip().rstrip("."),
                                 passed=False, details=[f"error: {exc!r}"])
        result.seconds = time.perf_counter() - t0
        status = "PASS" if result.passed else "FAIL"
        out(f"[{status}] criterion {i}: {result.name} ({result.seconds:.1f} s)")
        for line in result.details:
            out(f"        {line}")
        all_ok &= result.passed
    return all_ok
