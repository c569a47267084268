"""Secular functions of the Dirac operator on a metric graph.

All evaluators are vectorized callables mapping complex arrays to complex
arrays.  The massive positive/negative energy forms are

    f(z) = det(A + gamma(z) B M(z)),      g(z) = det(gamma(z) A - B M(z)),

with the 2x2-block matrix M(z) = [[cot zL, -csc zL], [-csc zL, cot zL]]
(each bond length appearing twice on the diagonal).  The massless form
carries the prefactor z^(4B-1) that removes the structural zero of the
determinant at the origin:

    f(z) = z^(4B-1) det(A + B M(z)).

On the positive imaginary axis, z = i t, the principal square root gives
gamma(i t) = (sqrt(t^2 - m^2) + i m) / t and the trigonometric blocks turn
hyperbolic with a factor -i, since cot(ix) = -i coth(x) and
csc(ix) = -i csch(x).  The imaginary-axis evaluator implemented here is the
exact continuation f(i t), i.e. the coth/csch block matrix multiplied by -i.

Trigonometric entries are computed through exponentially stable forms so
that evaluation far from the real axis (needed by the contour integrals)
neither overflows nor loses accuracy.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import mpmath as mp

from . import linalg
from .errors import SingularMatrixError, ValidationError
from .graphs import (MetricGraph, RoseGraph, SpinVertexConditions,
                     VertexConditions, theta_from_su2)

POLE_PROXIMITY_TOL = 1e-13
_IM_SWITCH = 200.0   # switch to exponential forms beyond this |Im z|


# ---------------------------------------------------------------------------
# stable elementary functions

def stable_cot(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    im = z.imag
    near = np.abs(im) <= _IM_SWITCH
    zn = z[near]
    out[near] = np.cos(zn) / np.sin(zn)
    lo = im < -_IM_SWITCH
    q = np.exp(-2j * z[lo])
    out[lo] = 1j * (1 + q) / (1 - q)
    hi = im > _IM_SWITCH
    q = np.exp(2j * z[hi])
    out[hi] = -1j * (1 + q) / (1 - q)
    return out


def stable_csc(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    im = z.imag
    near = np.abs(im) <= _IM_SWITCH
    out[near] = 1.0 / np.sin(z[near])
    lo = im < -_IM_SWITCH
    out[lo] = 2j * np.exp(-1j * z[lo]) / (1 - np.exp(-2j * z[lo]))
    hi = im > _IM_SWITCH
    out[hi] = -2j * np.exp(1j * z[hi]) / (1 - np.exp(2j * z[hi]))
    return out


def stable_coth(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    e = np.exp(-2.0 * t)
    return (1.0 + e) / (1.0 - e)


def stable_csch(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return 2.0 * np.exp(-t) / (1.0 - np.exp(-2.0 * t))


def gamma(z, m: float):
    """gamma(z) = (sqrt(z^2 + m^2) - m)/z, principal branch.

    Computed as z / (sqrt(z^2 + m^2) + m), which is the same function but
    free of cancellation for small |z| when m > 0.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ValidationError("gamma is undefined at z = 0")
    return z / (np.sqrt(z * z + m * m) + m)


def gamma_hat(t, m: float):
    """gamma at i t for t > m: (sqrt(t^2 - m^2) + i m)/t."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= m):
        raise ValidationError("imaginary-axis form requires t > m")
    return (np.sqrt(t * t - m * m) + 1j * m) / t


def gamma_hat_angle(theta):
    """gamma_hat at t = m cosh(theta): (sinh + i)/cosh, mass independent."""
    theta = np.asarray(theta, dtype=float)
    return (np.sinh(theta) + 1j) / np.cosh(theta)


# ---------------------------------------------------------------------------
# block matrices

def _doubled(lengths: np.ndarray) -> np.ndarray:
    return np.repeat(np.asarray(lengths, dtype=float), 2)


def trig_block(z: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """M(z): stacked (N, 4B, 4B) cot/-csc block matrices."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    ld = _doubled(lengths)
    x = z[:, None] * ld[None, :]
    cot = stable_cot(x)
    csc = stable_csc(x)
    n2 = ld.size
    out = np.zeros((z.size, 2 * n2, 2 * n2), dtype=complex)
    idx = np.arange(n2)
    out[:, idx, idx] = cot
    out[:, idx, n2 + idx] = -csc
    out[:, n2 + idx, idx] = -csc
    out[:, n2 + idx, n2 + idx] = cot
    return out


def hyper_block(t: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """coth/-csch block matrix at real argument t > 0, shape (N, 4B, 4B)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    ld = _doubled(lengths)
    x = t[:, None] * ld[None, :]
    coth = stable_coth(x)
    csch = stable_csch(x)
    n2 = ld.size
    out = np.zeros((t.size, 2 * n2, 2 * n2), dtype=complex)
    idx = np.arange(n2)
    out[:, idx, idx] = coth
    out[:, idx, n2 + idx] = -csch
    out[:, n2 + idx, idx] = -csch
    out[:, n2 + idx, n2 + idx] = coth
    return out


def phase_block(z: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """Bond-propagation matrix [[0, e^{izL}], [e^{izL}, 0]], shape (N, 4B, 4B)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    ld = _doubled(lengths)
    ph = np.exp(1j * z[:, None] * ld[None, :])
    n2 = ld.size
    out = np.zeros((z.size, 2 * n2, 2 * n2), dtype=complex)
    idx = np.arange(n2)
    out[:, idx, n2 + idx] = ph
    out[:, n2 + idx, idx] = ph
    return out


# ---------------------------------------------------------------------------
# evaluator object

@dataclass
class SecularEvaluator:
    """A vectorized secular function together with its structural metadata."""

    kind: str
    lengths: np.ndarray
    fn: Callable[[np.ndarray], np.ndarray]
    mass: float = 0.0
    prefactor_power: int = 0
    has_lattice_poles: bool = True
    log_fn: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]] | None = None
    mp_fn: Callable[[complex], "mp.mpc"] | None = None
    angle_fn: Callable[[np.ndarray], np.ndarray] | None = None
    meta: dict = field(default_factory=dict)

    def __call__(self, z):
        scalar = np.isscalar(z) or (np.asarray(z).ndim == 0)
        vals = self.fn(np.atleast_1d(np.asarray(z, dtype=complex)))
        return complex(vals[0]) if scalar else vals

    def near_pole(self, z, tol: float = POLE_PROXIMITY_TOL):
        """True where some |sin(z L_b)| falls below tol (flag, not an error)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        ls = np.asarray(self.lengths, dtype=float)
        m = np.min(np.abs(np.sin(z[:, None] * ls[None, :])), axis=1)
        return m < tol

    def at_angle(self, theta):
        """Hyperbolic-angle parameterization t = m cosh(theta) (massive only)."""
        if self.angle_fn is None:
            raise ValidationError(f"evaluator kind {self.kind!r} has no angle form")
        return self.angle_fn(np.atleast_1d(np.asarray(theta, dtype=float)))

    @property
    def bond_count(self) -> int:
        return len(self.lengths)


def _det_batch(mats: np.ndarray) -> np.ndarray:
    return np.linalg.det(mats)


def _logdet_batch(mats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    sign, logabs = np.linalg.slogdet(mats)
    return logabs, np.angle(sign)


def _mp_trig_block(z, lengths):
    ld = [float(x) for x in np.repeat(np.asarray(lengths, float), 2)]
    n2 = len(ld)
    out = mp.zeros(2 * n2, 2 * n2)
    for i, lb in enumerate(ld):
        x = mp.mpc(z) * lb
        c = mp.cos(x) / mp.sin(x)
        s = 1 / mp.sin(x)
        out[i, i] = c
        out[i, n2 + i] = -s
        out[n2 + i, i] = -s
        out[n2 + i, n2 + i] = c
    return out


def _mp_phase_block(z, lengths):
    ld = [float(x) for x in np.repeat(np.asarray(lengths, float), 2)]
    n2 = len(ld)
    out = mp.zeros(2 * n2, 2 * n2)
    for i, lb in enumerate(ld):
        ph = mp.exp(1j * mp.mpc(z) * lb)
        out[i, n2 + i] = ph
        out[n2 + i, i] = ph
    return out


def _to_mp(a: np.ndarray):
    m_ = mp.zeros(a.shape[0], a.shape[1])
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            m_[i, j] = mp.mpc(a[i, j])
    return m_


def _mp_gamma(z, mass):
    z = mp.mpc(z)
    return z / (mp.sqrt(z * z + mass * mass) + mass)


# ---------------------------------------------------------------------------
# factories

def secular_massless(vc: VertexConditions, graph: MetricGraph) -> SecularEvaluator:
    """f(z) = z^(4B-1) det(A + B M(z))."""
    _check_sizes(vc, graph)
    a, b = vc.a, vc.b
    ls = graph.lengths_array
    power = 4 * graph.bond_count - 1

    def fn(z):
        mats = a + np.matmul(b, trig_block(z, ls))
        return z ** power * _det_batch(mats)

    def log_fn(z):
        logmag, phase = _logdet_batch(a + np.matmul(b, trig_block(z, ls)))
        return logmag + power * np.log(np.abs(z)), phase + power * np.angle(z)

    am, bm = _to_mp(a), _to_mp(b)

    def mp_fn(z):
        z = mp.mpc(z)
        return z ** power * mp.det(am + bm * _mp_trig_block(z, ls))

    return SecularEvaluator(kind="massless-general", lengths=ls, fn=fn,
                            prefactor_power=power, log_fn=log_fn, mp_fn=mp_fn)


def secular_massive_pos(vc: VertexConditions, graph: MetricGraph,
                        mass: float) -> SecularEvaluator:
    """f(z) = det(A + gamma(z) B M(z)); massless limit drops the prefactor."""
    _check_sizes(vc, graph)
    a, b = vc.a, vc.b
    ls = graph.lengths_array

    def fn(z):
        g = gamma(z, mass)
        mats = a + g[:, None, None] * np.matmul(b, trig_block(z, ls))
        return _det_batch(mats)

    am, bm = _to_mp(a), _to_mp(b)

    def mp_fn(z):
        return mp.det(am + _mp_gamma(z, mass) * (bm * _mp_trig_block(z, ls)))

    return SecularEvaluator(kind="massive-positive", lengths=ls, fn=fn,
                            mass=mass, mp_fn=mp_fn)


def secular_massive_neg(vc: VertexConditions, graph: MetricGraph,
                        mass: float) -> SecularEvaluator:
    """g(z) = det(gamma(z) A - B M(z))."""
    _check_sizes(vc, graph)
    a, b = vc.a, vc.b
    ls = graph.lengths_array

    def fn(z):
        g = gamma(z, mass)
        mats = g[:, None, None] * a - np.matmul(b, trig_block(z, ls))
        return _det_batch(mats)

    am, bm = _to_mp(a), _to_mp(b)

    def mp_fn(z):
        return mp.det(_mp_gamma(z, mass) * am - bm * _mp_trig_block(z, ls))

    return SecularEvaluator(kind="massive-negative", lengths=ls, fn=fn,
                            mass=mass, mp_fn=mp_fn)


def secular_massive_imag(vc: VertexConditions, graph: MetricGraph, mass: float,
                         variant: str = "f") -> SecularEvaluator:
    """Imaginary-axis continuations f_hat(t) = f(i t), g_hat(t) = g(i t).

    t > m.  The coth/csch block enters with a factor -i, which is exactly
    M(i t); with the principal branch of gamma this makes f(i t) = f_hat(t)
    an identity rather than an approximation.
    """
    _check_sizes(vc, graph)
    if variant not in ("f", "g"):
        raise ValidationError("variant must be 'f' or 'g'")
    a, b = vc.a, vc.b
    ls = graph.lengths_array

    def _value(t, gh):
        blocks = -1j * hyper_block(t, ls)
        if variant == "f":
            mats = a + gh[:, None, None] * np.matmul(b, blocks)
        else:
            mats = gh[:, None, None] * a - np.matmul(b, blocks)
        return _det_batch(mats)

    def fn(t):
        t = np.atleast_1d(np.asarray(t)).real.astype(float)
        return _value(t, gamma_hat(t, mass))

    def angle_fn(theta):
        t = mass * np.cosh(theta)
        return _value(t, gamma_hat_angle(theta))

    return SecularEvaluator(kind=f"massive-imag-{variant}", lengths=ls, fn=fn,
                            mass=mass, has_lattice_poles=False,
                            angle_fn=angle_fn)


def rose_secular(rose: RoseGraph) -> SecularEvaluator:
    """f(z) = z sum_b (cos theta_b - cos(L_b z)) / sin(L_b z).

    Each term is computed as ((cos theta_b - 1) + 2 sin^2(L_b z / 2)) / sin(L_b z)
    near the origin, which avoids the cancellation of the naive difference,
    and as cos(theta_b) csc - cot far from it.
    """
    ls = np.asarray(rose.lengths, dtype=float)
    th = np.asarray(rose.thetas, dtype=float)
    cth = np.cos(th)

    def fn(z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        x = z[:, None] * ls[None, :]
        small = np.abs(x) < 1.0
        term = np.empty_like(x)
        xs = x[small]
        # broadcast theta over the flattened small set
        cth_s = np.broadcast_to(cth, x.shape)[small]
        term[small] = ((cth_s - 1.0) + 2.0 * np.sin(xs / 2) ** 2) / np.sin(xs)
        xb = x[~small]
        cth_b = np.broadcast_to(cth, x.shape)[~small]
        term[~small] = cth_b * stable_csc(xb) - stable_cot(xb)
        return z * np.sum(term, axis=1)

    return SecularEvaluator(kind="rose", lengths=ls, fn=fn, prefactor_power=1,
                            meta={"thetas": th})


def transition_matrix(vc: VertexConditions, gamma_value: complex) -> np.ndarray:
    """T = -(A - i gamma B)^{-1} (A + i gamma B)."""
    a, b = vc.a, vc.b
    lhs = a - 1j * gamma_value * b
    try:
        inv = linalg.inverse(lhs)
    except SingularMatrixError as exc:
        raise SingularMatrixError(
            f"A - i gamma B is singular at gamma = {gamma_value}",
            cond_estimate=exc.cond_estimate) from exc
    return -inv @ (a + 1j * gamma_value * b)


def evolution_secular(vc: VertexConditions, graph: MetricGraph,
                      mass: float = 0.0) -> SecularEvaluator:
    """det(I - T(z) S(z)) with S the bond-phase propagation matrix.

    Entire in z (no lattice poles): its zeros are exactly the spectrum,
    including any eigenvalue that happens to sit on the trigonometric
    lattice of the determinant form.
    """
    _check_sizes(vc, graph)
    a, b = vc.a, vc.b
    ls = graph.lengths_array
    n = vc.size
    eye = np.eye(n)

    def fn(z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        g = gamma(z, mass)
        lhs = a[None, :, :] - 1j * g[:, None, None] * b[None, :, :]
        rhs = a[None, :, :] + 1j * g[:, None, None] * b[None, :, :]
        t = -np.linalg.solve(lhs, rhs)
        return _det_batch(eye - np.matmul(t, phase_block(z, ls)))

    am, bm = _to_mp(a), _to_mp(b)

    def mp_fn(z):
        g = _mp_gamma(z, mass)
        lhs = am - 1j * g * bm
        rhs = am + 1j * g * bm
        t = -(lhs ** -1) * rhs
        return mp.det(mp.eye(n) - t * _mp_phase_block(z, ls))

    return SecularEvaluator(kind="evolution", lengths=ls, fn=fn, mass=mass,
                            has_lattice_poles=False, mp_fn=mp_fn)


def reduced_tr_secular(svc: SpinVertexConditions, graph: MetricGraph,
                       mass: float = 0.0) -> SecularEvaluator:
    """Product of the two half-size determinants of the time-reversal form.

    Each factor is det(A~ + gamma(z) B~ K(z, +/-)) where K carries
    e^{+/- i theta_b} phases on the csc blocks; for real A~, B~ the product
    is |first factor|^2 on the real axis.
    """
    if svc.bond_count != graph.bond_count:
        raise ValidationError("bond count mismatch between conditions and graph")
    at, bt = svc.a_tilde, svc.b_tilde
    ls = graph.lengths_array
    thetas = np.array([theta_from_su2(svc.u_origin[b], svc.u_terminus[b])
                       for b in range(svc.bond_count)])
    nb = svc.bond_count
    idx = np.arange(nb)

    def _factor(z, sign):
        x = z[:, None] * ls[None, :]
        cot = stable_cot(x)
        csc = stable_csc(x)
        ph = np.exp(1j * sign * thetas)[None, :]
        k = np.zeros((z.size, 2 * nb, 2 * nb), dtype=complex)
        k[:, idx, idx] = cot
        k[:, idx, nb + idx] = -csc * ph
        k[:, nb + idx, idx] = -csc / ph
        k[:, nb + idx, nb + idx] = cot
        g = gamma(z, mass)
        return _det_batch(at + g[:, None, None] * np.matmul(bt, k))

    def fn(z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return _factor(z, +1) * _factor(z, -1)

    return SecularEvaluator(kind="reduced-TR", lengths=ls, fn=fn, mass=mass,
                            meta={"thetas": thetas})


def _check_sizes(vc: VertexConditions, graph: MetricGraph) -> None:
    if vc.size != 4 * graph.bond_count:
        raise ValidationError(
            f"conditions are {vc.size}x{vc.size} but the graph has "
            f"{graph.bond_count} bonds (need {4 * graph.bond_count})")
