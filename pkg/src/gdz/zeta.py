"""Contour-integral representations of the spectral zeta function.

Massless case.  With f the secular function (scalar rose form or the
prefactored determinant form), the zeta function over nonzero real roots,
with the convention (-k)^(-s) = e^(-i pi s) k^(-s) and a two-fold spin
degeneracy factor, is evaluated as

    zeta(s) = 2 (1 + e^(-i pi s)) zeta_R(s)
                  sum_b [w_b^odd (1 - 2^-s) + w_b^even 2^-s] (pi / L_b)^(-s)
            + (1/g) K(s) [ I_in + I_mid + I_out
                           + (nu_nom - nu_0) / s ],                 (*)

    K(s) = e^(-i (pi - alpha) s) * 2 sin(pi s) / pi,

where the three I's make up the analytic continuation of
int_0^inf u^(-s) (d/du) log f(u e^(-i alpha)) du: on (0, delta] the
vanishing order nu_0 of f at the origin is divided out and the integral is
summed as a power series (Taylor data extracted by FFT on a circle, which
stays accurate where direct small-z evaluation of a determinant cancels
catastrophically); on [delta, 1] and [1, U] the logarithmic derivative is
formed по finite differences of f itself and integrated by tanh-sinh
quadrature, subtracting nu_nom/u on the outer leg where
f ~ c_inf z^nu_nom.  The branch ray sits in the lower half-plane at angle
-alpha so that the e^(-i pi s) phase convention of the pole sum is realized
by the same contour.

The per-bond, per-parity lattice weights w handle the degenerate cases the
generic formula misses: a weight drops to zero when the would-be pole at
n pi / L_b is a regular nonzero point of f (removable numerator zero), and
lattice points carrying actual zeros of f gain the structural sin-power so
that such eigenvalues are counted with their full multiplicity.  g is the
generic root order of the representation (2 for the Kramers-doubled
determinant forms, 1 for scalar forms); weights and g are detected by
argument-principle counts.  In the generic case w = 1, g = 1, nu_0 = 0 the
formula (*) is the standard one.

Massive case (0 < |Re s| < 1).  The representation is

    zeta(s) = 2 (1 + e^(-i pi s)) sum_b (pi/L_b)^(-s) E(s/2, (m L_b/pi)^2)
       + (2/pi) sin(pi s/2) [ int_m^inf (t^2-m^2)^(-s/2) dlog f_hat
                 + e^(-i pi s) int_m^inf (t^2-m^2)^(-s/2) dlog g_hat ],

with f_hat(t) = f(i t), g_hat(t) = g(i t) the imaginary-axis continuations.
The substitution t = m cosh(theta) removes the inverse-square-root branch
point at t = m; integrands are differentiated in theta.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StripError, ValidationError
from .graphs import DiracParams, MetricGraph, RoseGraph, VertexConditions
from .quadrature import QuadratureSettings, tanh_sinh
from .secular import (SecularEvaluator, rose_secular, secular_massive_imag,
                      secular_massless)
from .special import epstein, riemann_zeta
from .spectrum import count_zeros_box


@dataclass(frozen=True)
class ZetaResult:
    value: complex
    err_estimate: float
    parts: tuple[complex, complex, complex]   # (pole sum, branch, line)
    alpha_used: float
    s: complex


@dataclass(frozen=True)
class SmallZExpansion:
    c0: complex                 # leading Taylor coefficient of f at 0
    M_estimate: int             # gap to the next non-negligible coefficient
    residual: float             # relative noise floor of the extraction
    order_at_zero: int          # vanishing order nu_0 of f at the origin
    radius: float               # extraction circle radius
    degenerate: bool = False    # True when no coefficient rose above noise


@dataclass
class _SeriesData:
    """Taylor data of h0 = f / z^nu_0 around the origin."""
    nu: int
    c_lead: complex
    b: np.ndarray          # normalized h0 coefficients, b[0] = 1
    g: np.ndarray          # coefficients of h0'/h0
    radius: float
    noise: float
    m_gap: int


def log_derivative(evaluator, u: float, direction: complex = 1.0) -> complex:
    """f'(u)/f(u) along the given ray direction, by central differences.

    Step 1e-5 max(1, |u|) with one Richardson level; no logarithm is taken,
    so no branch tracking is needed.
    """
    h = 1e-5 * max(1.0, abs(u))
    pts = np.array([u + h, u - h, u + h / 2, u - h / 2], dtype=float)
    vals = np.asarray(evaluator(pts * direction))
    f0 = complex(evaluator(complex(u * direction)))
    if abs(f0) < 1e-290:
        raise ValidationError("value underflow in log_derivative; "
                              "use the log-magnitude evaluator form")
    d1 = (vals[0] - vals[1]) / (2 * h)
    d2 = (vals[2] - vals[3]) / h
    return complex(((4 * d2 - d1) / 3) / f0)


def _dlog_batch(fn, u: np.ndarray, direction: complex) -> np.ndarray:
    """Vectorized (d/du) log fn(u * direction) with one Richardson level."""
    u = np.asarray(u, dtype=float)
    h = 1e-5 * np.maximum(1.0, u)
    f0 = fn(u * direction)
    vp = fn((u + h) * direction)
    vm = fn((u - h) * direction)
    vp2 = fn((u + h / 2) * direction)
    vm2 = fn((u - h / 2) * direction)
    d1 = (vp - vm) / (2 * h)
    d2 = (vp2 - vm2) / h
    return ((4 * d2 - d1) / 3) / f0


def small_z_expansion(fn, radius: float, n_fft: int = 512,
                      max_terms: int = 100) -> _SeriesData:
    """Taylor structure of f at the origin from an FFT on |z| = radius.

    Stable where direct evaluation of f near zero would cancel: the
    function is only ever sampled on the circle.
    """
    zs = radius * np.exp(2j * np.pi * np.arange(n_fft) / n_fft)
    fv = np.asarray(fn(zs))
    coef = np.fft.fft(fv) / n_fft        # coef[k] ~ a_k radius^k
    mags = np.abs(coef[:n_fft // 2])
    scale = float(np.max(np.abs(fv)))
    noise = 64.0 * np.finfo(float).eps * max(scale, 1e-300)
    top = float(np.max(mags))
    if top <= noise:
        return _SeriesData(nu=0, c_lead=0.0, b=np.array([1.0 + 0j]),
                           g=np.zeros(0, complex), radius=radius,
                           noise=1.0, m_gap=1)
    thresh = max(noise, 1e-13 * top)
    nz = np.where(mags > thresh)[0]
    nu = int(nz[0])
    # usable coefficient window for the h0 = f/z^nu series
    k_use = min(max_terms, n_fft // 2 - nu)
    b = coef[nu:nu + k_use] / coef[nu]
    # scale out the radius so b[j] multiplies z^j
    b = b / radius ** np.arange(k_use)
    gap = int(nz[1] - nz[0]) if len(nz) > 1 else k_use
    # series of h0'/h0 via the Cauchy-product recurrence h0' = g * h0
    g = np.zeros(k_use - 1, dtype=complex)
    for j in range(k_use - 1):
        acc = (j + 1) * b[j + 1]
        for i in range(j):
            acc -= g[i] * b[j - i]
        g[j] = acc
    return _SeriesData(nu=nu, c_lead=complex(coef[nu] / radius ** nu), b=b, g=g,
                       radius=radius, noise=float(noise / (abs(coef[nu]) + 1e-300)),
                       m_gap=gap)


def c0_extract(evaluator, alpha: float = np.pi / 2,
               radius: float | None = None) -> SmallZExpansion:
    """Leading small-z data of a prefactored massless secular function."""
    r = radius if radius is not None else _default_radius(evaluator.lengths)
    data = small_z_expansion(evaluator.fn, r)
    degenerate = data.noise >= 0.5
    c0 = data.c_lead if data.nu == 0 else 0.0
    return SmallZExpansion(c0=c0, M_estimate=max(1, data.m_gap),
                           residual=data.noise, order_at_zero=data.nu,
                           radius=r, degenerate=degenerate)


def _default_radius(lengths) -> float:
    return 0.3 * np.pi / float(np.max(np.asarray(lengths, dtype=float)))


# ---------------------------------------------------------------------------
# lattice weights

def _sample_lattice_points(lengths, bond: int, parity: str, count: int = 2):
    """Lattice points n pi / L_b of one parity, preferring isolated ones."""
    ls = np.asarray(lengths, dtype=float)
    base = np.pi / ls[bond]
    others = [np.pi / l for i, l in enumerate(ls) if i != bond]
    picks = []
    n = 1 if parity == "odd" else 2
    while len(picks) < count and n < 200:
        z0 = n * base
        ok = True
        for ob in others:
            frac = z0 / ob
            if abs(frac - round(frac)) * ob < 0.2 * base:
                ok = False
                break
        if ok:
            picks.append(z0)
        n += 2
    return picks


def detect_lattice_weights(evaluator: SecularEvaluator, g: int,
                           sin_power: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-bond odd/even lattice weights from argument-principle counts.

    weight = (pole order + sin_power if zeros of f sit on the points) / g;
    a regular nonzero lattice point gets weight zero.
    """
    ls = np.asarray(evaluator.lengths, dtype=float)
    nb = len(ls)
    w_odd = np.zeros(nb)
    w_even = np.zeros(nb)
    for b in range(nb):
        gap = np.pi / ls[b]
        for parity, target in (("odd", w_odd), ("even", w_even)):
            readings = []
            for z0 in _sample_lattice_points(ls, b, parity):
                r = 0.02 * gap
                rect = (complex(z0 - r, -r), complex(z0 + r, r))
                readings.append(count_zeros_box(evaluator, rect))
            if not readings:
                target[b] = 1.0
                continue
            pole_order = max(0, -min(readings))
            zero_here = all(m > 0 for m in readings)
            target[b] = (pole_order + (sin_power if zero_here else 0)) / g
    return w_odd, w_even


def generic_root_order(evaluator: SecularEvaluator) -> int:
    """Order of the first located positive root (winding count).

    Roots are spotted as deep minima of |f| on a scan grid; a root sitting
    on a lattice point still registers because the winding box measures
    zeros minus poles and a removable point carries no pole.
    """
    ls = np.asarray(evaluator.lengths, dtype=float)
    gap = np.pi / float(np.max(ls))
    k = np.linspace(1e-3, 6 * gap, 600)
    vals = np.abs(evaluator(k.astype(complex)))
    med = float(np.median(vals))
    for i in range(1, len(k) - 1):
        if vals[i] < vals[i - 1] and vals[i] < vals[i + 1] and vals[i] < 1e-2 * med:
            r = 0.04 * gap
            rect = (complex(k[i] - r, -r), complex(k[i] + r, r))
            try:
                m = count_zeros_box(evaluator, rect)
            except Exception:
                continue
            if m > 0:
                return m
    return 1


# ---------------------------------------------------------------------------
# massless engine

class MasslessZetaEngine:
    """Evaluates the branch-integral representation for one graph.

    Structure detection (vanishing order at zero, generic root order,
    lattice weights) runs once at construction and is reused for every s.
    """

    def __init__(self, evaluator: SecularEvaluator, alpha: float = np.pi / 2,
                 quad: QuadratureSettings | None = None, *,
                 g: int | None = None,
                 weights: tuple[np.ndarray, np.ndarray] | None = None,
                 sin_power: int = 2):
        if not (0.0 < alpha < np.pi):
            raise ValidationError("alpha must lie in (0, pi)")
        self.ev = evaluator
        self.alpha = float(alpha)
        self.quad = quad or QuadratureSettings()
        self.lengths = np.asarray(evaluator.lengths, dtype=float)
        self.nu_nom = evaluator.prefactor_power
        self.ray = np.exp(-1j * self.alpha)
        self.g = g if g is not None else generic_root_order(evaluator)
        if weights is not None:
            self.w_odd, self.w_even = weights
        else:
            self.w_odd, self.w_even = detect_lattice_weights(
                evaluator, self.g, sin_power)
        self._build_series()
        # the slowest exponential decay of dlog f on the ray comes from the
        # off-diagonal csc terms, rate L_min sin(alpha)
        lmin = float(np.min(self.lengths))
        self.u_cut = 40.0 / (lmin * np.sin(self.alpha))
        big = self.u_cut * self.ray
        self.c_inf = complex(self.ev(big) / big ** self.nu_nom)
        self.m_bound = max(1, self._series.m_gap) if self._series else 1

    def _build_series(self):
        r = _default_radius(self.lengths)
        for _ in range(4):
            data = small_z_expansion(self.ev.fn, r)
            if data.noise >= 0.5:
                raise ValidationError(
                    "small-z structure of the secular function is entirely "
                    "below noise; a perturbation of the edge lengths may help")
            delta = r * 0.75
            terms = np.abs(data.g) * delta ** (np.arange(1, len(data.g) + 1))
            if terms.size >= 8 and np.all(terms[-4:] < 1e-12 * max(1.0, np.max(terms))):
                self._series = data
                self.delta = delta
                self.nu_act = data.nu
                self.c_lead = data.c_lead
                return
            r *= 0.5
        raise ValidationError(
            "logarithmic-derivative series did not converge; the first root "
            "may be too close to the origin (near-degenerate conditions)")

    # -- pieces -------------------------------------------------------------

    def pole_sum(self, s: complex) -> complex:
        zr = riemann_zeta(s)
        tot = 0.0 + 0.0j
        for wo, we, lb in zip(self.w_odd, self.w_even, self.lengths):
            wbar = wo * (1.0 - 2.0 ** (-s)) + we * 2.0 ** (-s)
            tot += wbar * (np.pi / lb) ** (-s)
        return 2.0 * (1.0 + np.exp(-1j * np.pi * s)) * zr * tot

    def _inner_series(self, s: complex) -> complex:
        g = self._series.g
        j = np.arange(1, len(g) + 1, dtype=float)
        return complex(np.sum(
            g * np.exp(-1j * j * self.alpha) * self.delta ** (j - s) / (j - s)))

    def branch(self, s: complex) -> tuple[complex, float]:
        sfl = complex(s)
        i_in = self._inner_series(sfl)

        def mid_integrand(u):
            return u ** (-sfl) * _dlog_batch(self.ev.fn, u, self.ray)

        i_mid, e_mid = tanh_sinh(mid_integrand, self.delta, 1.0, self.quad)

        def outer_integrand(u):
            return u ** (-sfl) * (_dlog_batch(self.ev.fn, u, self.ray)
                                  - self.nu_nom / u)

        i_out, e_out = tanh_sinh(outer_integrand, 1.0, self.u_cut, self.quad)
        j_total = (i_in - (self.nu_act / sfl) * self.delta ** (-sfl)
                   + i_mid + i_out + self.nu_nom / sfl)
        kfac = np.exp(-1j * (np.pi - self.alpha) * sfl) * 2.0 * np.sin(np.pi * sfl) / np.pi
        err = abs(kfac) * (e_mid + e_out + 1e-14 * abs(j_total)) / self.g
        return kfac * j_total / self.g, err

    # -- public -------------------------------------------------------------

    def value(self, s) -> ZetaResult:
        s = complex(s)
        if s.real >= min(2.0, float(self.m_bound)) + 1e-12:
            raise StripError(
                f"representation valid for Re(s) < {min(2, self.m_bound)}, got {s}")
        if s.real <= -2.0:
            raise StripError("pole sum needs Re(s) > -2")
        if s == 0:
            pole = self.pole_sum(0.0)
            val = pole + 2.0 * (self.nu_nom - self.nu_act) / self.g
            return ZetaResult(value=val, err_estimate=1e-13, alpha_used=self.alpha,
                              parts=(pole, val - pole, 0.0), s=s)
        pole = self.pole_sum(s)
        br, err = self.branch(s)
        return ZetaResult(value=pole + br, err_estimate=err,
                          parts=(pole, br, 0.0), alpha_used=self.alpha, s=s)

    def prime0(self, h: float = 1e-4) -> complex:
        """zeta'(0) by central differences with two Richardson levels."""
        def d(step):
            return (self.value(step).value - self.value(-step).value) / (2 * step)

        d1, d2, d3 = d(h), d(h / 2), d(h / 4)
        r1 = (4 * d2 - d1) / 3
        r2 = (4 * d3 - d2) / 3
        return (16 * r2 - r1) / 15

    def prime0_analytic(self) -> complex:
        """Closed-form zeta'(0) assembled from the detected structure."""
        tot = 0.0 + 0.0j
        for wo, we, lb in zip(self.w_odd, self.w_even, self.lengths):
            tot += 1j * np.pi * we - 2.0 * we * np.log(lb) - 2.0 * wo * np.log(2.0)
        tot += (2.0 / self.g) * (np.log(self.c_inf / self.c_lead)
                                 - 1j * np.pi * (self.nu_nom - self.nu_act))
        return complex(tot)


def _rose_weights(rose: RoseGraph) -> tuple[np.ndarray, np.ndarray]:
    """Analytic lattice weights of the scalar rose secular function.

    A loop angle of 0 (resp. pi) makes the even (resp. odd) lattice points
    of that loop removable; with several loops the function is then regular
    and nonzero there and the weight drops.  With a single loop the zero of
    the numerator survives as a zero of f and keeps full weight.
    """
    nb = rose.bond_count
    w_odd = np.ones(nb)
    w_even = np.ones(nb)
    if nb >= 2:
        for b, th in enumerate(rose.thetas):
            if abs(th) < 1e-12:
                w_even[b] = 0.0
            if abs(th - np.pi) < 1e-12:
                w_odd[b] = 0.0
    return w_odd, w_even


def rose_engine(rose: RoseGraph, params: DiracParams | None = None,
                quad: QuadratureSettings | None = None) -> MasslessZetaEngine:
    params = params or DiracParams()
    ev = rose_secular(rose)
    return MasslessZetaEngine(ev, alpha=params.alpha, quad=quad, g=1,
                              weights=_rose_weights(rose), sin_power=1)


def massless_engine(vc: VertexConditions, graph: MetricGraph,
                    params: DiracParams | None = None,
                    quad: QuadratureSettings | None = None) -> MasslessZetaEngine:
    params = params or DiracParams()
    ev = secular_massless(vc, graph)
    return MasslessZetaEngine(ev, alpha=params.alpha, quad=quad, sin_power=2)


def zeta_rose(s, rose: RoseGraph, params: DiracParams | None = None,
              quad: QuadratureSettings | None = None) -> ZetaResult:
    return rose_engine(rose, params, quad).value(s)


def zeta_massless(s, vc: VertexConditions, graph: MetricGraph,
                  params: DiracParams | None = None,
                  quad: QuadratureSettings | None = None) -> ZetaResult:
    return massless_engine(vc, graph, params, quad).value(s)


# ---------------------------------------------------------------------------
# massive engine

class MassiveZetaEngine:
    """Imaginary-axis representation for positive mass."""

    def __init__(self, vc: VertexConditions, graph: MetricGraph, mass: float,
                 quad: QuadratureSettings | None = None):
        if mass <= 0:
            raise ValidationError("massive representation requires m > 0")
        self.vc = vc
        self.graph = graph
        self.mass = float(mass)
        self.quad = quad or QuadratureSettings()
        self.lengths = graph.lengths_array
        self.f_hat = secular_massive_imag(vc, graph, mass, "f")
        self.g_hat = secular_massive_imag(vc, graph, mass, "g")
        lmin = float(np.min(self.lengths))
        # dlog decays like e^{-theta} once t L ~ 1; absolute floor 1e-14
        self.theta_max = 34.0 + max(0.0, np.log(2.0 / (self.mass * lmin)))

    def pole_sum(self, s: complex) -> complex:
        tot = 0.0 + 0.0j
        for lb in self.lengths:
            c = (self.mass * lb / np.pi) ** 2
            tot += (np.pi / lb) ** (-s) * epstein(s / 2.0, c)
        return 2.0 * (1.0 + np.exp(-1j * np.pi * s)) * tot

    def _axis_integral(self, s: complex, which: SecularEvaluator) -> tuple[complex, float]:
        m = self.mass

        def integrand(theta):
            return (m * np.sinh(theta)) ** (-s) * _dlog_theta(which, theta)

        v1, e1 = tanh_sinh(integrand, 0.0, 1.0, self.quad)
        v2, e2 = tanh_sinh(integrand, 1.0, self.theta_max, self.quad)
        return v1 + v2, e1 + e2

    def value(self, s) -> ZetaResult:
        s = complex(s)
        if abs(s.real) >= 1.0 - 1e-12 and s != 0:
            raise StripError(f"massive representation needs -1 < Re(s) < 1, got {s}")
        pole = self.pole_sum(s) if s != 0 else -2.0 * len(self.lengths) + 0.0j
        if s == 0:
            return ZetaResult(value=pole, err_estimate=1e-13,
                              parts=(pole, 0.0, 0.0), alpha_used=np.pi / 2, s=s)
        i_f, e_f = self._axis_integral(s, self.f_hat)
        i_g, e_g = self._axis_integral(s, self.g_hat)
        branch = (2.0 / np.pi) * np.sin(np.pi * s / 2.0) * (
            i_f + np.exp(-1j * np.pi * s) * i_g)
        err = abs((2.0 / np.pi) * np.sin(np.pi * s / 2.0)) * (e_f + e_g) + 1e-13
        return ZetaResult(value=pole + branch, err_estimate=err,
                          parts=(pole, branch, 0.0), alpha_used=np.pi / 2, s=s)

    def prime0(self, h: float = 1e-4) -> complex:
        def d(step):
            return (self.value(step).value - self.value(-step).value) / (2 * step)

        d1, d2, d3 = d(h), d(h / 2), d(h / 4)
        r1 = (4 * d2 - d1) / 3
        r2 = (4 * d3 - d2) / 3
        return (16 * r2 - r1) / 15


def _dlog_theta(evaluator: SecularEvaluator, theta: np.ndarray) -> np.ndarray:
    """(d/dtheta) log f_hat(m cosh theta), differenced in theta."""
    theta = np.asarray(theta, dtype=float)
    h = 1e-6 * np.maximum(1.0, theta)
    f0 = evaluator.at_angle(theta)
    d1 = (evaluator.at_angle(theta + h) - evaluator.at_angle(theta - h)) / (2 * h)
    d2 = (evaluator.at_angle(theta + h / 2) - evaluator.at_angle(theta - h / 2)) / h
    return ((4 * d2 - d1) / 3) / f0


def massive_engine(vc: VertexConditions, graph: MetricGraph, mass: float,
                   quad: QuadratureSettings | None = None) -> MassiveZetaEngine:
    return MassiveZetaEngine(vc, graph, mass, quad)


def zeta_massive(s, vc: VertexConditions, graph: MetricGraph, mass: float,
                 quad: QuadratureSettings | None = None) -> ZetaResult:
    return MassiveZetaEngine(vc, graph, mass, quad).value(s)


def zeta_prime_zero(kind: str, *, rose: RoseGraph | None = None,
                    vc: VertexConditions | None = None,
                    graph: MetricGraph | None = None, mass: float = 0.0,
                    params: DiracParams | None = None,
                    quad: QuadratureSettings | None = None) -> complex:
    """zeta'(0) for one of the three representations (numeric path)."""
    if kind == "rose":
        if rose is None:
            raise ValidationError("rose graph required")
        return rose_engine(rose, params, quad).prime0()
    if kind == "massless":
        if vc is None or graph is None:
            raise ValidationError("conditions and graph required")
        return massless_engine(vc, graph, params, quad).prime0()
    if kind == "massive":
        if vc is None or graph is None:
            raise ValidationError("conditions and graph required")
        return MassiveZetaEngine(vc, graph, mass, quad).prime0()
    raise ValidationError(f"unknown zeta kind {kind!r}")
