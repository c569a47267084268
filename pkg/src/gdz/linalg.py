"""Dense complex matrix kernel.

Every other module performs its linear algebra through these wrappers, so
tolerances and error behaviour are fixed in one place.  Determinants use
LAPACK's partially pivoted LU (via numpy); numerical rank uses a column
pivoted QR so that pivot magnitudes are trustworthy.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import SingularMatrixError, ValidationError

DEFAULT_TOL = 1e-10


def as_matrix(m) -> np.ndarray:
    """Coerce to a 2-d complex ndarray and check entries are finite."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValidationError(f"expected a 2-d matrix, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix contains non-finite entries")
    return a


def _require_square(a: np.ndarray) -> np.ndarray:
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    return a


def determinant(m) -> complex:
    """det(M) for a square complex matrix."""
    a = _require_square(as_matrix(m))
    if a.size == 0:
        return 1.0 + 0.0j
    d = complex(np.linalg.det(a))
    if not np.isfinite(d):
        raise ValidationError("determinant overflowed double range; "
                              "use determinant_log instead")
    return d


def determinant_log(m) -> tuple[float, float]:
    """Return (log magnitude, phase) of det(M); safe for large matrices."""
    a = _require_square(as_matrix(m))
    sign, logabs = np.linalg.slogdet(a)
    if sign == 0:
        return -np.inf, 0.0
    return float(logabs), float(np.angle(sign))


def rank(m, tol: float = DEFAULT_TOL) -> int:
    """Numerical rank via column-pivoted QR.

    Counts diagonal entries of R above tol times the leading (largest) one.
    """
    if tol <= 0:
        raise ValidationError("rank tolerance must be positive")
    a = as_matrix(m)
    if a.size == 0:
        return 0
    r = scipy.linalg.qr(a, mode="r", pivoting=True)[0]
    d = np.abs(np.diag(r))
    if d.size == 0 or d[0] == 0.0:
        return 0
    return int(np.count_nonzero(d > tol * d[0]))


def inverse(m) -> np.ndarray:
    """Matrix inverse with a residual check; raises on singular input."""
    a = _require_square(as_matrix(m))
    try:
        cond = np.linalg.cond(a)
    except np.linalg.LinAlgError:
        cond = np.inf
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularMatrixError(
            f"matrix is singular to working precision (cond ~ {cond:.3g})",
            cond_estimate=float(cond))
    inv = np.linalg.inv(a)
    resid = np.max(np.abs(a @ inv - np.eye(a.shape[0])))
    scale = max(1.0, float(np.max(np.abs(a))))
    if resid > 1e-10 * scale * max(1.0, cond * 1e-3):
        raise SingularMatrixError(
            f"inverse residual {resid:.3g} too large (cond ~ {cond:.3g})",
            cond_estimate=float(cond))
    return inv


def is_hermitian(m, tol: float = DEFAULT_TOL) -> bool:
    a = _require_square(as_matrix(m))
    if a.size == 0:
        return True
    scale = max(1.0, float(np.max(np.abs(a))))
    return bool(np.max(np.abs(a - a.conj().T)) <= tol * scale)


def is_unitary(m, tol: float = DEFAULT_TOL) -> bool:
    a = _require_square(as_matrix(m))
    if a.size == 0:
        return True
    return bool(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))) <= tol)
