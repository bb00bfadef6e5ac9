"""Self-contained special functions: log-gamma and the regularized
incomplete beta function.

Implemented in-repo (rather than delegating to scipy) so every theorem
constant in the package is reproducible from first principles:

* ``log_gamma`` uses the 15-term Lanczos approximation with g = 607/128
  (Godfrey's coefficient set).  Relative error is below 1e-13 for all
  x > 0; verified against ``math.lgamma`` in the test suite.
* ``regularized_incomplete_beta`` evaluates J_z(a, b) with the standard
  continued fraction (modified Lentz algorithm), switching to the
  symmetric tail 1 - J_{1-z}(b, a) where the fraction converges faster.
  Absolute error is below 1e-12 on [0, 1].
"""

from __future__ import annotations

import math

from .errors import DomainError

_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)

_LOG_SQRT_2PI = 0.91893853320467274178
_BETA_MAX_ITER = 400
_BETA_EPS = 1e-16
_BETA_FPMIN = 1e-300


def log_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0."""
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise DomainError("log_gamma requires x > 0")
    if x < 0.5:
        # reflection keeps the Lanczos sum in its accurate range
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    acc = _LANCZOS_C[0]
    for k in range(1, len(_LANCZOS_C)):
        acc += _LANCZOS_C[k] / (x - 1.0 + k)
    t = x + _LANCZOS_G - 0.5
    return _LOG_SQRT_2PI + (x - 0.5) * math.log(t) - t + math.log(acc)


def log_beta(a: float, b: float) -> float:
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


def _beta_continued_fraction(a: float, b: float, z: float) -> float:
    # Modified Lentz evaluation of the incomplete-beta continued fraction;
    # converges quickly for z < (a+1)/(a+b+2).
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * z / qap
    if abs(d) < _BETA_FPMIN:
        d = _BETA_FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * z / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_FPMIN:
            d = _BETA_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETA_FPMIN:
            c = _BETA_FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * z / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_FPMIN:
            d = _BETA_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETA_FPMIN:
            c = _BETA_FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_EPS:
            return h
    raise DomainError(
        f"incomplete beta continued fraction failed to converge (a={a}, b={b}, z={z})"
    )


def regularized_incomplete_beta(z: float, a: float, b: float) -> float:
    """Regularized incomplete beta function J_z(a, b) for z in [0, 1]."""
    z = float(z)
    if not (a > 0.0 and b > 0.0):
        raise DomainError("shape parameters must be positive")
    if z < 0.0 or z > 1.0:
        raise DomainError("z must lie in [0, 1]")
    if z == 0.0:
        return 0.0
    if z == 1.0:
        return 1.0
    front = math.exp(
        a * math.log(z) + b * math.log1p(-z) - log_beta(a, b)
    )
    if z < (a + 1.0) / (a + b + 2.0):
        return min(max(front * _beta_continued_fraction(a, b, z) / a, 0.0), 1.0)
    return min(max(1.0 - front * _beta_continued_fraction(b, a, 1.0 - z) / b, 0.0), 1.0)
