import logging
import math

import numpy as np
from numpy.polynomial import Polynomial

from charpoly.models import EnsembleConfig, Potential, QuadratureSpec

log = logging.getLogger(__name__)


def potential_eval(potential: Potential, x):
    """V(x) and V'(x) by Horner's rule; x may be a scalar or a numpy array."""
    value = 0.0 * x
    derivative = 0.0 * x
    for coeff in reversed(potential.coeffs):
        derivative = derivative * x + value
        value = value * x + coeff
    # the loop above evaluates V(x)/x; shift by one power
    derivative = derivative * x + value
    value = value * x
    return value, derivative


def potential_polynomial(potential: Potential) -> Polynomial:
    return Polynomial((0.0, *potential.coeffs))


def confinement_radius(potential: Potential) -> float:
    """Bound on the roots of V' and V''; beyond it V is increasing and convex
    in |x|, so log_weight is decreasing and concave there."""
    poly = potential_polynomial(potential)
    roots = np.concatenate([poly.deriv(1).roots(), poly.deriv(2).roots()])
    return float(np.max(np.abs(roots), initial=0.0))


def log_weight(cfg: EnsembleConfig, x):
    value, _ = potential_eval(cfg.potential, x)
    return -cfg.n * value


def truncation_radius(cfg: EnsembleConfig, q: QuadratureSpec, k_max: int) -> float:
    """Smallest T with log_weight(+-T) + 2 k_max log(1 + T) < log(tol) + log_floor."""
    target = math.log(q.tol) + q.log_floor

    def excess(t: float) -> float:
        worst = max(float(log_weight(cfg, t)), float(log_weight(cfg, -t)))
        return worst + 2 * k_max * math.log1p(t) - target

    start = max(1.0, confinement_radius(cfg.potential))
    hi = start
    while excess(hi) >= 0:
        hi *= 2.0
    lo = hi / 2.0 if hi > start else 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if excess(mid) >= 0:
            lo = mid
        else:
            hi = mid
    log.debug("Truncation radius %.6g for N=%d k_max=%d", hi, cfg.n, k_max)
    return hi
