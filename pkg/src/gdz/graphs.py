"""Metric graph and vertex-condition data model.

A metric graph is described only by its bond lengths; all connectivity is
carried by the matching-condition matrices (A, B) acting on boundary traces.
The boundary trace vectors are ordered bond origins first, then bond termini,
with two spin components per endpoint, so the matrices are 4B x 4B.

The operator defined by ``A psi_plus + B psi_minus = 0`` is self-adjoint
exactly when rank([A|B]) = 4B and A B^dagger is Hermitian.  Spin-reduced
conditions use half-size matrices (A~, B~) together with one SU(2) rotation
per bond endpoint; expanding them by a Kronecker product with the 2x2
identity reproduces the full-size pair.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import ValidationError

SU2_TOL = 1e-10


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MetricGraph:
    """Bond lengths of a finite metric graph (hbar = c = 1 units)."""

    lengths: tuple[float, ...]

    def __post_init__(self):
        ls = tuple(float(x) for x in self.lengths)
        if len(ls) < 1:
            raise ValidationError("a graph needs at least one bond")
        if any(not np.isfinite(x) or x <= 0.0 for x in ls):
            raise ValidationError("bond lengths must be positive and finite")
        object.__setattr__(self, "lengths", ls)

    @property
    def bond_count(self) -> int:
        return len(self.lengths)

    @property
    def lengths_array(self) -> np.ndarray:
        return np.asarray(self.lengths, dtype=float)


@dataclass(frozen=True)
class VertexConditions:
    """Full 4B x 4B matching-condition pair (A, B)."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = linalg.as_matrix(self.a)
        b = linalg.as_matrix(self.b)
        if a.shape != b.shape or a.shape[0] != a.shape[1]:
            raise ValidationError(
                f"A and B must be square with equal shapes, got {a.shape}, {b.shape}")
        if a.shape[0] % 4 != 0:
            raise ValidationError("matching matrices must be 4B x 4B")
        object.__setattr__(self, "a", _freeze(a))
        object.__setattr__(self, "b", _freeze(b))

    @property
    def bond_count(self) -> int:
        return self.a.shape[0] // 4

    @property
    def size(self) -> int:
        return self.a.shape[0]


@dataclass(frozen=True)
class SpinVertexConditions:
    """Spin-reduced conditions: 2B x 2B pair plus SU(2) endpoint rotations."""

    a_tilde: np.ndarray
    b_tilde: np.ndarray
    u_origin: tuple[np.ndarray, ...]
    u_terminus: tuple[np.ndarray, ...]

    def __post_init__(self):
        at = linalg.as_matrix(self.a_tilde)
        bt = linalg.as_matrix(self.b_tilde)
        if at.shape != bt.shape or at.shape[0] != at.shape[1]:
            raise ValidationError("A~ and B~ must be square with equal shapes")
        if at.shape[0] % 2 != 0:
            raise ValidationError("reduced matrices must be 2B x 2B")
        nb = at.shape[0] // 2
        uo = tuple(linalg.as_matrix(u) for u in self.u_origin)
        ut = tuple(linalg.as_matrix(u) for u in self.u_terminus)
        if len(uo) != nb or len(ut) != nb:
            raise ValidationError(f"need {nb} SU(2) matrices per endpoint list")
        for u in (*uo, *ut):
            _check_su2(u)
        object.__setattr__(self, "a_tilde", _freeze(at))
        object.__setattr__(self, "b_tilde", _freeze(bt))
        object.__setattr__(self, "u_origin", tuple(_freeze(u) for u in uo))
        object.__setattr__(self, "u_terminus", tuple(_freeze(u) for u in ut))

    @property
    def bond_count(self) -> int:
        return self.a_tilde.shape[0] // 2


@dataclass(frozen=True)
class RoseGraph:
    """Single-vertex graph of B loops with one spin-rotation angle per loop."""

    lengths: tuple[float, ...]
    thetas: tuple[float, ...]

    def __post_init__(self):
        ls = tuple(float(x) for x in self.lengths)
        th = tuple(float(x) for x in self.thetas)
        if len(ls) != len(th) or len(ls) < 1:
            raise ValidationError("need one angle per loop and at least one loop")
        if any(not np.isfinite(x) or x <= 0.0 for x in ls):
            raise ValidationError("loop lengths must be positive and finite")
        if any(t < -1e-12 or t > np.pi + 1e-12 for t in th):
            raise ValidationError("angles must lie in [0, pi]")
        object.__setattr__(self, "lengths", ls)
        object.__setattr__(self, "thetas", tuple(min(max(t, 0.0), np.pi) for t in th))

    @property
    def bond_count(self) -> int:
        return len(self.lengths)

    def metric_graph(self) -> MetricGraph:
        return MetricGraph(self.lengths)


@dataclass(frozen=True)
class DiracParams:
    """Mass and branch-ray angle used by the zeta machinery."""

    mass: float = 0.0
    alpha: float = np.pi / 2

    def __post_init__(self):
        if not np.isfinite(self.mass) or self.mass < 0.0:
            raise ValidationError("mass must be a non-negative real")
        if not (0.0 < self.alpha < np.pi):
            raise ValidationError("branch angle must lie in the open interval (0, pi)")


@dataclass(frozen=True)
class ValidationReport:
    size: int
    rank_ab: int
    hermiticity_residual: float
    passed: bool
    messages: tuple[str, ...] = field(default_factory=tuple)


def _check_su2(u: np.ndarray) -> None:
    if u.shape != (2, 2):
        raise ValidationError("spin rotations must be 2x2")
    if not linalg.is_unitary(u, SU2_TOL):
        raise ValidationError("spin rotation is not unitary to 1e-10")
    if abs(linalg.determinant(u) - 1.0) > SU2_TOL:
        raise ValidationError("spin rotation determinant differs from 1")


def validate(vc: VertexConditions, tol: float = 1e-10) -> ValidationReport:
    """Self-adjointness report: rank of [A|B] and Hermiticity of A B^dagger."""
    n = vc.size
    stacked = np.hstack([vc.a, vc.b])
    r = linalg.rank(stacked, tol)
    ab = vc.a @ vc.b.conj().T
    scale = max(1.0, float(np.max(np.abs(ab))))
    resid = float(np.max(np.abs(ab - ab.conj().T))) / scale if ab.size else 0.0
    messages = []
    if r != n:
        messages.append(f"rank([A|B]) = {r}, expected {n}")
    if resid > tol:
        messages.append(f"A B^dagger Hermiticity residual {resid:.3g} exceeds {tol:g}")
    return ValidationReport(size=n, rank_ab=r, hermiticity_residual=resid,
                            passed=not messages, messages=tuple(messages))


def expand_spin_conditions(svc: SpinVertexConditions) -> VertexConditions:
    """Expand reduced conditions to the full pair A = (A~ (x) I2) U etc."""
    nb = svc.bond_count
    u = np.zeros((4 * nb, 4 * nb), dtype=complex)
    for b in range(nb):
        u[2 * b:2 * b + 2, 2 * b:2 * b + 2] = svc.u_origin[b]
        j = 2 * nb + 2 * b
        u[j:j + 2, j:j + 2] = svc.u_terminus[b]
    a = np.kron(svc.a_tilde, np.eye(2)) @ u
    bm = np.kron(svc.b_tilde, np.eye(2)) @ u
    return VertexConditions(a, bm)


def rose_conditions(bond_count: int) -> SpinVertexConditions:
    """Reduced matrices of the rose graph with trivial spin rotations.

    A~ chains all 2B endpoint values into a single common value (difference
    rows, zero last row); B~ is zero except for a final row of ones that
    balances the outgoing components.
    """
    if bond_count < 1:
        raise ValidationError("need at least one loop")
    n = 2 * bond_count
    at = np.zeros((n, n), dtype=complex)
    bt = np.zeros((n, n), dtype=complex)
    for i in range(n - 1):
        at[i, i] = 1.0
        at[i, i + 1] = -1.0
    bt[n - 1, :] = 1.0
    eye = np.eye(2)
    return SpinVertexConditions(at, bt,
                                tuple(eye for _ in range(bond_count)),
                                tuple(eye for _ in range(bond_count)))


def rose_spin_conditions(rose: RoseGraph) -> SpinVertexConditions:
    """Rose conditions with per-loop angles realized as diagonal SU(2) pairs.

    The terminus rotations are trivial and the origin rotation of loop b is
    diag(e^{i theta_b}, e^{-i theta_b}), so the invariant angle of each loop
    equals theta_b.
    """
    base = rose_conditions(rose.bond_count)
    uo = tuple(np.diag([np.exp(1j * t), np.exp(-1j * t)]) for t in rose.thetas)
    return SpinVertexConditions(base.a_tilde, base.b_tilde, uo, base.u_terminus)


def circle_conditions(length: float = 1.0) -> VertexConditions:
    """Periodic matching for a single loop: v(0) = v(L) and w(0) = w(L).

    Returns the full 4x4 pair for the one-bond graph; the massless spectrum
    is {2 pi n / L}.
    """
    if not np.isfinite(length) or length <= 0:
        raise ValidationError("circumference must be positive")
    return expand_spin_conditions(rose_conditions(1))


def theta_from_su2(u_o, u_t) -> float:
    """Invariant angle of an endpoint pair: arccos(tr(u_o u_t^{-1}) / 2)."""
    uo = linalg.as_matrix(u_o)
    ut = linalg.as_matrix(u_t)
    _check_su2(uo)
    _check_su2(ut)
    w = uo @ ut.conj().T
    half_trace = complex(np.trace(w)) / 2.0
    if abs(half_trace.imag) > 1e-9:
        raise ValidationError("trace of u_o u_t^{-1} is not real; inputs not SU(2)?")
    return float(np.arccos(min(1.0, max(-1.0, half_trace.real))))
