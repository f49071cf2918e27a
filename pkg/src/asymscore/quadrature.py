"""Numerical integration helpers.

Adaptive quadrature is delegated to scipy's QUADPACK (Gauss-Kronrod
subdivision).  Pair expectations E phi(X, X') are computed with a tensor
Gauss-Legendre rule in probability space, which makes scale and swap
identities hold to machine precision by construction.
"""

import warnings
from functools import lru_cache

import numpy as np
from scipy.integrate import IntegrationWarning, quad

DEFAULT_ABS_TOL = 1e-10
PAIR_NODES = 256
_CLIP = 1e-9  # quantile clipping for probability-space rules


def integrate(fn, lo, hi, points=None, tol=DEFAULT_ABS_TOL, limit=400):
    """Adaptive integral of ``fn`` on [lo, hi]; ``points`` marks breakpoints.

    QUADPACK rejects ``points`` on infinite ranges, so those are split off
    and integrated separately.
    """
    if points is not None:
        pts = sorted(p for p in points if lo < p < hi)
        if not pts:
            points = None
        elif not (np.isfinite(lo) and np.isfinite(hi)):
            total = 0.0
            edges = [lo] + pts + [hi]
            for a, b in zip(edges[:-1], edges[1:]):
                total += integrate(fn, a, b, tol=tol, limit=limit)
            return total
        else:
            points = pts
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(fn, lo, hi, points=points, epsabs=tol, epsrel=tol, limit=limit)
    return val


@lru_cache(maxsize=8)
def gauss_legendre_01(n: int = PAIR_NODES):
    """Nodes/weights on (0, 1), endpoints clipped away from 0 and 1."""
    x, w = np.polynomial.legendre.leggauss(n)
    u = 0.5 * (x + 1.0)
    w = 0.5 * w
    u = np.clip(u, _CLIP, 1.0 - _CLIP)
    return u, w


def pair_expectation(quantile_f, quantile_g, phi, n: int = PAIR_NODES) -> float:
    """E phi(X, Y) for independent X with quantile ``quantile_f`` and Y with
    quantile ``quantile_g``, via a tensor Gauss-Legendre rule on (0,1)^2."""
    u, w = gauss_legendre_01(n)
    xf = np.asarray(quantile_f(u), dtype=float)
    xg = np.asarray(quantile_g(u), dtype=float)
    vals = phi(xf[:, None], xg[None, :])
    return float(w @ vals @ w)


def single_expectation(quantile_f, phi, n: int = PAIR_NODES) -> float:
    """E phi(X) via Gauss-Legendre in probability space."""
    u, w = gauss_legendre_01(n)
    return float(w @ np.asarray(phi(np.asarray(quantile_f(u), dtype=float))))
