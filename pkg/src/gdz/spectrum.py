"""Real-axis root location for secular evaluators.

Strategy: bracket candidate roots between consecutive lattice points
(the poles of the trigonometric secular forms), refine them with a
sign-change search on the phase-aligned values, and verify every interval
against an argument-principle winding count, which is authoritative.
Even-order roots (time-reversal doubling, lattice coincidences) produce no
sign change; they are detected as deep minima of |f| and refined through
the logarithmic derivative, whose zero is simple regardless of the order.

Double precision limits how closely a high-order root of a determinant can
be pinned down (the function value underflows into rounding noise), so the
final polish of roots with order >= 2 runs a short Newton iteration in
extended precision when the evaluator provides an exact scalar form.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import mpmath as mp
from scipy.optimize import brentq

from .errors import RootFindingError, ValidationError
from .secular import SecularEvaluator


def worker_count() -> int:
    """Worker cap from the GDZ_THREADS environment variable (default 1)."""
    try:
        n = int(os.environ.get("GDZ_THREADS", "1"))
    except ValueError:
        return 1
    return max(1, n)


def pole_lattice(lengths, k_max: float, dedup_tol: float = 1e-12) -> np.ndarray:
    """All points n pi / L_b in (0, k_max], sorted and deduplicated."""
    if k_max <= 0:
        raise ValidationError("k_max must be positive")
    pts = []
    for lb in np.asarray(lengths, dtype=float):
        n = int(np.floor(k_max * lb / np.pi + 1e-12))
        if n >= 1:
            pts.append(np.arange(1, n + 1) * (np.pi / lb))
    if not pts:
        return np.empty(0)
    allp = np.sort(np.concatenate(pts))
    keep = [allp[0]]
    for x in allp[1:]:
        if x - keep[-1] > dedup_tol * max(1.0, x):
            keep.append(x)
    return np.asarray(keep)


@dataclass(frozen=True)
class IntervalDiagnostic:
    lo: float
    hi: float
    winding: int
    n_roots: int
    total_order: int


@dataclass(frozen=True)
class Spectrum:
    positive_roots: np.ndarray
    multiplicities: np.ndarray
    k_max: float
    diagnostics: tuple[IntervalDiagnostic, ...] = field(default_factory=tuple)
    negative_energy_roots: np.ndarray | None = None

    @property
    def total_count(self) -> int:
        return int(np.sum(self.multiplicities))


@dataclass(frozen=True)
class RootOptions:
    samples_per_gap: int = 8
    refine_rel_tol: float = 1e-12
    max_retries: int = 4
    min_modulus_ratio: float = 1e-3
    polish_high_order: bool = True


# ---------------------------------------------------------------------------
# winding counts

def count_zeros_box(evaluator, rect: tuple[complex, complex],
                    max_points_per_side: int = 8192) -> int:
    """Winding number of the evaluator around a rectangle (zeros - poles).

    The boundary is sampled adaptively until every phase step is below
    pi/2; if the minimum modulus on the boundary is suspiciously small the
    rectangle is perturbed (up to five attempts).
    """
    lo, hi = complex(rect[0]), complex(rect[1])
    if not (hi.real > lo.real and hi.imag > lo.imag):
        raise ValidationError("rectangle corners must satisfy lo < hi componentwise")
    for attempt in range(5):
        res = _winding_once(evaluator, lo, hi, max_points_per_side)
        if res is not None:
            return res
        w = hi.real - lo.real
        h = hi.imag - lo.imag
        lo = lo - 0.017 * w - 0.031j * h
        hi = hi + 0.013 * w + 0.027j * h
    raise RootFindingError(
        f"could not separate the boundary of {rect} from zeros/poles "
        "after 5 perturbation attempts")


def _winding_once(evaluator, lo, hi, max_pts) -> int | None:
    n = 64
    while n <= max_pts:
        zs = _rect_boundary(lo, hi, n)
        vals = evaluator(zs)
        av = np.abs(vals)
        if np.any(av == 0.0) or np.median(av) == 0.0:
            return None
        if np.min(av) < 1e-9 * np.median(av):
            return None
        ratios = vals[1:] / vals[:-1]
        dphi = np.angle(ratios)
        if np.max(np.abs(dphi)) < 0.5 * np.pi:
            total = np.sum(dphi) / (2.0 * np.pi)
            w = int(np.round(total))
            if abs(total - w) < 0.25:
                return w
        n *= 2
    return None


def _rect_boundary(lo: complex, hi: complex, n_per_side: int) -> np.ndarray:
    a, b = lo, complex(hi.real, lo.imag)
    c, d = hi, complex(lo.real, hi.imag)
    t = np.linspace(0.0, 1.0, n_per_side, endpoint=False)
    seg = [a + (b - a) * t, b + (c - b) * t, c + (d - c) * t, d + (a - d) * t]
    pts = np.concatenate(seg)
    return np.append(pts, pts[0])


def root_order(evaluator, k0: float, radius: float) -> int:
    """Order of the zero at k0 (counted by a small winding box)."""
    rect = (complex(k0 - radius, -radius), complex(k0 + radius, radius))
    return count_zeros_box(evaluator, rect)


# ---------------------------------------------------------------------------
# refinement helpers

def _aligned_real(evaluator, phase: float):
    rot = np.exp(-1j * phase)

    def h(k):
        return float(np.real(rot * evaluator(complex(k))))

    return h


def _logderiv_real(evaluator):
    """Re(f/f') as a scalar function; simple zero at a root of any order."""

    def w(k):
        h = 1e-7 * max(1.0, abs(k))
        pts = np.array([k + h, k - h, k + h / 2, k - h / 2], dtype=complex)
        v = evaluator(pts)
        d1 = (v[0] - v[1]) / (2 * h)
        d2 = (v[2] - v[3]) / h
        der = (4 * d2 - d1) / 3
        f0 = evaluator(complex(k))
        if der == 0:
            return 0.0
        return float(np.real(f0 / der))

    return w


def _polish_mp(evaluator: SecularEvaluator, k0: float, order: int,
               tol: float) -> float:
    """Modified Newton in extended precision for roots of order >= 2."""
    if evaluator.mp_fn is None:
        return k0
    with mp.workdps(40):
        k = mp.mpf(k0)
        hstep = mp.mpf("1e-12") * max(1.0, abs(k0))
        for _ in range(12):
            f0 = evaluator.mp_fn(k)
            der = (evaluator.mp_fn(k + hstep) - evaluator.mp_fn(k - hstep)) / (2 * hstep)
            if der == 0:
                break
            step = order * f0 / der
            k = k - mp.re(step)
            if abs(mp.re(step)) < tol * 0.01:
                break
        return float(k)


# ---------------------------------------------------------------------------
# main driver

def find_roots(evaluator: SecularEvaluator, k_max: float,
               opts: RootOptions | None = None) -> Spectrum:
    """All roots of the evaluator in (0, k_max], winding-verified.

    Every inter-pole interval is scanned with a sign test on phase-aligned
    values plus a |f|-minimum test for even-order roots, and its root count
    (with orders) is checked against the interval winding number.  On
    mismatch the scan density is doubled, then the interval subdivided.
    """
    opts = opts or RootOptions()
    if k_max <= 0:
        raise ValidationError("k_max must be positive")
    breaks = _scan_breakpoints(evaluator, k_max)
    intervals = [(breaks[i], breaks[i + 1]) for i in range(len(breaks) - 1)
                 if breaks[i + 1] - breaks[i] > 1e-12]

    nw = worker_count()
    if nw > 1:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            results = list(pool.map(
                lambda iv: _process_interval(evaluator, iv[0], iv[1], opts),
                intervals))
    else:
        results = [_process_interval(evaluator, lo, hi, opts)
                   for lo, hi in intervals]

    roots, mults, diags = [], [], []
    for (lo, hi), (rr, mm, wind) in zip(intervals, results):
        roots.extend(rr)
        mults.extend(mm)
        diags.append(IntervalDiagnostic(lo=lo, hi=hi, winding=wind,
                                        n_roots=len(rr), total_order=sum(mm)))
    order = np.argsort(roots) if roots else []
    pos = np.asarray([roots[i] for i in order])
    mul = np.asarray([mults[i] for i in order], dtype=int)
    return Spectrum(positive_roots=pos, multiplicities=mul, k_max=k_max,
                    diagnostics=tuple(diags))


def massive_spectrum(vc, graph, mass: float, k_max: float,
                     opts: RootOptions | None = None) -> Spectrum:
    """Positive and negative-energy root lists of the massive operator."""
    from .secular import secular_massive_neg, secular_massive_pos

    pos = find_roots(secular_massive_pos(vc, graph, mass), k_max, opts)
    if mass == 0.0:
        return pos
    neg = find_roots(secular_massive_neg(vc, graph, mass), k_max, opts)
    neg_list = np.repeat(neg.positive_roots, neg.multiplicities)
    return Spectrum(positive_roots=pos.positive_roots,
                    multiplicities=pos.multiplicities, k_max=k_max,
                    diagnostics=pos.diagnostics,
                    negative_energy_roots=neg_list)


def _scan_breakpoints(evaluator, k_max: float) -> list[float]:
    lat = pole_lattice(evaluator.lengths, k_max)
    if evaluator.has_lattice_poles:
        # keep only lattice points where the evaluator actually blows up;
        # removable points may carry roots and must stay interior
        pts = [x for x in lat if x < k_max * (1 - 1e-12)]
        if pts:
            arr = np.asarray(pts)
            gaps = np.diff(np.concatenate([[0.0], arr, [k_max]]))
            local = np.minimum(gaps[:-1], gaps[1:])
            eps = 1e-6 * local
            ref = np.median(np.abs(evaluator(
                np.linspace(0.37 * k_max, 0.83 * k_max, 101).astype(complex))))
            va = np.abs(evaluator((arr + eps).astype(complex)))
            vb = np.abs(evaluator((arr - eps).astype(complex)))
            pts = [x for x, fa, fb in zip(arr, va, vb)
                   if min(fa, fb) > 100.0 * ref]
        return [0.0] + pts + [k_max]
    # entire evaluators: roots may sit on lattice points, so scan between
    # midpoints instead
    mids = []
    prev = 0.0
    for x in list(lat) + [k_max]:
        mids.append(0.5 * (prev + x))
        prev = x
    pts = [0.0] + [m for m in mids if 0 < m < k_max] + [k_max]
    return sorted(set(pts))


def _process_interval(evaluator, lo, hi, opts: RootOptions):
    gap = hi - lo
    margin = max(1e-9 * gap, 1e-13 * max(1.0, hi))
    a, b = lo + margin, hi - margin
    n = max(8, opts.samples_per_gap)
    for attempt in range(opts.max_retries):
        found = _scan_candidates(evaluator, a, b, n, opts)
        wind = _interval_winding(evaluator, lo, hi, [r for r, _ in found])
        total = sum(m for _, m in found)
        if total == wind:
            roots = [r for r, _ in found]
            mults = [m for _, m in found]
            return roots, mults, wind
        n *= 2
    raise RootFindingError(
        f"interval ({lo:.6g}, {hi:.6g}): winding count {wind} does not match "
        f"located roots {found} after {opts.max_retries} densifications")


def _interval_winding(evaluator, lo, hi, roots) -> int:
    """Winding box over the open interval, edges clear of endpoint poles."""
    gap = hi - lo
    edge = 0.02 * gap
    for r in roots:
        d = min(r - lo, hi - r)
        if d < 2.0 * edge:
            edge = max(0.4 * d, 1e-7 * gap)
    height = 0.35 * min(gap, 1.0)
    rect = (complex(lo + edge, -height), complex(hi - edge, height))
    return count_zeros_box(evaluator, rect)


def _scan_candidates(evaluator, a, b, n, opts: RootOptions):
    ks = np.linspace(a, b, n)
    vals = evaluator(ks.astype(complex))
    av = np.abs(vals)
    med = np.median(av)
    candidates = []

    # sign changes of the locally aligned real part
    flip = np.real(vals[:-1] * np.conj(vals[1:])) < 0.0
    for i in np.where(flip)[0]:
        phase = float(np.angle(vals[i]))
        h = _aligned_real(evaluator, phase)
        try:
            r = brentq(h, ks[i], ks[i + 1], xtol=1e-15, rtol=8.9e-16)
        except ValueError:
            continue
        candidates.append(r)

    # interior minima of |f| without a sign flip: possible even-order roots
    for i in range(1, n - 1):
        if av[i] < av[i - 1] and av[i] < av[i + 1] and av[i] < opts.min_modulus_ratio * med:
            if i > 0 and (flip[i - 1] or (i < n - 1 and flip[i])):
                continue
            w = _logderiv_real(evaluator)
            lo_b, hi_b = ks[i - 1], ks[i + 1]
            try:
                if w(lo_b) * w(hi_b) < 0:
                    r = brentq(w, lo_b, hi_b, xtol=1e-13, rtol=8.9e-16)
                    candidates.append(r)
            except ValueError:
                continue

    roots = _dedupe(sorted(candidates), 1e-9 * max(1.0, b))
    out = []
    for r in roots:
        # the order box must clear the interval endpoints (poles) and the
        # neighboring roots
        radius = min(0.25 * (b - a), _neighbor_gap(roots, r),
                     5e-3 * max(1.0, r), 0.45 * (r - a), 0.45 * (b - r))
        try:
            order = root_order(evaluator, r, max(radius, 1e-8))
        except RootFindingError:
            order = 1
        if order <= 0:
            continue
        if order >= 2 and opts.polish_high_order:
            r = _polish_mp(evaluator, r, order, opts.refine_rel_tol * max(1.0, r))
        out.append((r, order))
    return out


def _neighbor_gap(roots, r) -> float:
    ds = [abs(x - r) for x in roots if x != r]
    return 0.45 * min(ds) if ds else np.inf


def _dedupe(sorted_vals, tol):
    out = []
    for v in sorted_vals:
        if not out or v - out[-1] > tol:
            out.append(v)
    return out
