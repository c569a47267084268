"""Spectra, zeta functions and regularized determinants of the Dirac
operator on finite metric graphs."""

from .errors import (ConfigError, GdzError, QuadratureError, RootFindingError,
                     SingularMatrixError, StripError, ValidationError)
from .graphs import (DiracParams, MetricGraph, RoseGraph, SpinVertexConditions,
                     ValidationReport, VertexConditions, circle_conditions,
                     expand_spin_conditions, rose_conditions,
                     rose_spin_conditions, theta_from_su2, validate)
from .secular import (SecularEvaluator, evolution_secular, gamma, gamma_hat,
                      reduced_tr_secular, rose_secular, secular_massive_imag,
                      secular_massive_neg, secular_massive_pos,
                      secular_massless, transition_matrix)
from .spectrum import (RootOptions, Spectrum, count_zeros_box, find_roots,
                       massive_spectrum, pole_lattice)
from .special import (bessel_k, epstein, epstein_continuation, epstein_deriv0,
                      epstein_series, gamma_fn, riemann_zeta)
from .quadrature import QuadratureSettings, tanh_sinh
from .zeta import (MassiveZetaEngine, MasslessZetaEngine, SmallZExpansion,
                   ZetaResult, c0_extract, log_derivative, massive_engine,
                   massless_engine, rose_engine, zeta_massive, zeta_massless,
                   zeta_prime_zero, zeta_rose)
from .determinants import (DetResult, det_check_massive, det_check_massless,
                           det_check_rose, det_massive, det_massless,
                           det_massless_chain, det_rose, det_rose_chain)

__version__ = "0.1.0"
