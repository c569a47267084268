"""Riemann zeta, Gamma, modified Bessel K with complex order, and the
lattice sum E(alpha, c) = sum_{n>=1} (n^2 + c)^(-alpha) with its analytic
continuation

    E(alpha, c) = -c^(-alpha)/2
        + sqrt(pi) / (2 c^(alpha-1/2) Gamma(alpha)) * [ Gamma(alpha - 1/2)
        + 4 sum_{l>=1} (pi l sqrt(c))^(alpha-1/2) K_{1/2-alpha}(2 pi l sqrt(c)) ],

which converges for every alpha away from the pole at alpha = 1/2 and gives
the closed values E(0, c) = -1/2 and
E'(0, c) = log(c)/2 - pi sqrt(c) - log(1 - exp(-2 pi sqrt(c))).
"""
from __future__ import annotations

import numpy as np
import scipy.special

from .errors import StripError, ValidationError

_EM_N = 100          # split point of the direct series
_ETA_TERMS = 120     # Euler-transformed eta series length

_GL_X, _GL_W = np.polynomial.legendre.leggauss(48)


def _eta_coefficients(n_terms: int) -> np.ndarray:
    """Weights e_k of the Euler-transformed alternating zeta series.

    eta(s) = sum_k e_k (-1)^k (k+1)^(-s) with e_k = sum_{n>=k} 2^-(n+1) C(n,k)
    truncated at n < n_terms; e_k -> 1 away from the truncation edge.
    """
    e = np.zeros(n_terms)
    row = np.zeros(n_terms + 1)
    row[0] = 1.0
    for n in range(n_terms):
        scale = 0.5 ** (n + 1)
        e[:n + 1] += scale * row[:n + 1]
        # binomial recursion C(n+1,k) = C(n,k) + C(n,k-1)
        row[1:n + 2] = row[1:n + 2] + row[0:n + 1]
    return e


_ETA_E = _eta_coefficients(_ETA_TERMS)
_ETA_K = np.arange(1, _ETA_TERMS + 1, dtype=float)
_ETA_SIGN = np.where(np.arange(_ETA_TERMS) % 2 == 0, 1.0, -1.0)


def riemann_zeta(s) -> complex:
    """zeta(s) on Re(s) > -2 via the accelerated eta series."""
    s = complex(s)
    if s == 1:
        raise ValidationError("zeta has a pole at s = 1")
    if s.real <= -2.0:
        raise StripError("riemann_zeta is restricted to Re(s) > -2")
    if s == 0:
        return complex(-0.5)
    denom = 1.0 - 2.0 ** (1.0 - s)
    if abs(denom) < 1e-10:
        raise ValidationError(f"eta-to-zeta factor vanishes at s = {s}")
    eta = np.sum(_ETA_E * _ETA_SIGN * _ETA_K ** (-s))
    return complex(eta / denom)


def gamma_fn(z) -> complex:
    """Gamma(z) for complex z away from the nonpositive integers."""
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == int(z.real):
        raise ValidationError(f"Gamma has a pole at z = {z}")
    out = complex(scipy.special.gamma(z))
    if not np.isfinite(out.real) or not np.isfinite(out.imag):
        raise ValidationError(f"Gamma evaluation failed at z = {z}")
    return out


def bessel_k(nu, x: float) -> complex:
    """K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt, complex order.

    The integrand is even and analytic with double-exponential decay, so the
    trapezoid rule over a symmetric window is spectrally accurate.
    """
    nu = complex(nu)
    if not (np.isreal(x) and x > 0):
        raise ValidationError("bessel_k requires real x > 0")
    x = float(x)
    # window: e^{-x cosh T + |Re nu| T} below 1e-22 relative to e^{-x}
    t_max = 1.0
    for _ in range(40):
        t_new = np.arccosh(1.0 + (52.0 + abs(nu.real) * t_max) / x)
        if abs(t_new - t_max) < 1e-9:
            break
        t_max = t_new
    h = 1.0 / 24.0
    t = np.arange(0.0, t_max + h, h)
    vals = np.exp(-x * np.cosh(t)) * np.cosh(nu * t)
    total = h * (np.sum(vals) - 0.5 * vals[0])
    return complex(total)


def _direct_tail_integral(alpha: complex, c: float, n0: float) -> complex:
    """int_{n0}^inf (x^2+c)^(-alpha) dx via x = n0/u on (0, 1].

    The substituted integrand carries a u^(2 alpha - 2) endpoint, which the
    tanh-sinh rule absorbs.
    """
    from .quadrature import QuadratureSettings, tanh_sinh

    def integrand(u):
        return u ** (2 * alpha - 2) * (1.0 + c * u * u / (n0 * n0)) ** (-alpha)

    val, _ = tanh_sinh(integrand, 0.0, 1.0,
                       QuadratureSettings(rel_tol=1e-13, abs_tol=1e-16))
    return complex(n0 ** (1 - 2 * alpha) * val)


def epstein_series(alpha, c: float) -> complex:
    """Direct series with Euler-Maclaurin tail; requires Re(alpha) > 3/4."""
    alpha = complex(alpha)
    if alpha.real <= 0.75:
        raise StripError("direct series needs Re(alpha) > 3/4")
    n = np.arange(1.0, _EM_N)
    head = np.sum((n * n + c) ** (-alpha))
    n0 = float(_EM_N)
    f0 = (n0 * n0 + c) ** (-alpha)
    base = n0 * n0 + c
    f1 = -2 * alpha * n0 * base ** (-alpha - 1)
    f3 = (12 * alpha * (alpha + 1) * n0 * base ** (-alpha - 2)
          - 8 * alpha * (alpha + 1) * (alpha + 2) * n0 ** 3 * base ** (-alpha - 3))
    tail = _direct_tail_integral(alpha, c, n0) + 0.5 * f0 - f1 / 12.0 + f3 / 720.0
    return complex(head + tail)


def epstein_continuation(alpha, c: float) -> complex:
    """Bessel-sum analytic continuation; valid away from alpha = 1/2."""
    alpha = complex(alpha)
    if c <= 0:
        raise ValidationError("continuation requires c > 0")
    if abs(alpha - 0.5) < 1e-9:
        raise ValidationError("E(alpha, c) has a pole at alpha = 1/2")
    sc = np.sqrt(c)
    out = -0.5 * c ** (-alpha)
    # 1/Gamma is entire; at nonpositive integer alpha the whole bracket
    # term vanishes and the closed value E(0, c) = -1/2 appears exactly.
    rgamma = complex(scipy.special.rgamma(alpha))
    if rgamma == 0.0:
        return complex(out)
    pref = np.sqrt(np.pi) / (2.0 * c ** (alpha - 0.5)) * rgamma
    bracket = gamma_fn(alpha - 0.5) if abs(rgamma) > 0 else 0.0
    acc = 0.0 + 0.0j
    for ell in range(1, 400):
        arg = np.pi * ell * sc
        term = arg ** (alpha - 0.5) * bessel_k(0.5 - alpha, 2.0 * arg)
        acc += term
        if abs(term) < 1e-16 * max(1.0, abs(acc)):
            break
    return complex(out + pref * (bracket + 4.0 * acc))


def epstein(alpha, c: float) -> complex:
    """E(alpha, c) = sum_{n>=1} (n^2 + c)^(-alpha), continued in alpha."""
    alpha = complex(alpha)
    if c < 0 or not np.isfinite(c):
        raise ValidationError("c must be a non-negative real")
    if abs(alpha - 0.5) < 1e-9:
        raise ValidationError("E(alpha, c) has a pole at alpha = 1/2")
    if c == 0.0:
        return riemann_zeta(2 * alpha)
    if alpha.real > 0.75:
        return epstein_series(alpha, c)
    return epstein_continuation(alpha, c)


def epstein_deriv0(c: float) -> float:
    """d/dalpha E(alpha, c) at alpha = 0, closed form."""
    if c <= 0:
        raise ValidationError("epstein_deriv0 requires c > 0")
    sc = np.sqrt(c)
    return float(0.5 * np.log(c) - np.pi * sc - np.log1p(-np.exp(-2.0 * np.pi * sc)))
