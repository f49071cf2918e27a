"""Special functions: digamma/trigamma by series with Euler-Maclaurin tail.

Log-gamma is delegated to scipy (Lanczos-quality, well under 1e-13 relative).
The psi functions are written out explicitly because downstream monotonicity
arguments rely on their series representations, and the series-plus-tail form
doubles as its own accuracy certificate.
"""

import math

from scipy.special import gammaln as _gammaln

from .errors import ParameterError

# Bernoulli numbers B_2, B_4, ... B_12
_BERNOULLI = (1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730)

_SHIFT = 16.0


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    if x <= 0:
        raise ParameterError(f"log_gamma requires x > 0, got {x}")
    return float(_gammaln(x))


def digamma(x: float) -> float:
    """psi(x) for x > 0, relative accuracy ~1e-13.

    Recurrence lifts x above a cutoff, then the asymptotic (Euler-Maclaurin)
    expansion  psi(x) ~ log x - 1/(2x) - sum B_2k / (2k x^{2k})  is applied.
    """
    if x <= 0:
        raise ParameterError(f"digamma requires x > 0, got {x}")
    acc = 0.0
    while x < _SHIFT:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = 0.0
    term = inv2
    for k, b in enumerate(_BERNOULLI, start=1):
        tail += b / (2 * k) * term
        term *= inv2
    return acc + math.log(x) - 0.5 / x - tail


def trigamma(x: float) -> float:
    """psi'(x) = sum_{n>=0} 1/(x+n)^2 for x > 0, relative accuracy <=1e-12.

    Finite series up to the shift point plus the Euler-Maclaurin tail
    correction 1/x + 1/(2x^2) + sum B_2k / x^{2k+1}.
    """
    if x <= 0:
        raise ParameterError(f"trigamma requires x > 0, got {x}")
    acc = 0.0
    while x < _SHIFT:
        acc += 1.0 / (x * x)
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = 1.0 / x + 0.5 * inv2
    term = inv2 / x
    for b in _BERNOULLI:
        tail += b * term
        term *= inv2
    return acc + tail
