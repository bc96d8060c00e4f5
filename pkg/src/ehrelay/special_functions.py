"""Scalar special functions used by the closed-form link expressions.

``bessel_k`` gives the integer-order modified Bessel function of the second
kind, ``upper_incomplete_gamma`` the ordinary upper incomplete gamma and
``gen_incomplete_gamma`` the generalized incomplete gamma

    Gamma(a, x; b) = int_x^inf t^(a-1) exp(-t - b/t) dt.

The ``log_*`` variants return natural logarithms so that callers can combine
very large and very small factors without overflow.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

from scipy import integrate, special

from .errors import DomainError, QuadratureError

# log-drop below the integrand peak at which the tails are cut off
_TAIL_LOG_DROP = 50.0


@dataclass(frozen=True)
class QuadratureSettings:
    relative_tolerance: float = 1e-8
    absolute_tolerance: float = 0.0
    max_subdivisions: int = 200

    def __post_init__(self):
        if not self.relative_tolerance > 0:
            raise DomainError("relative_tolerance must be > 0")
        if self.absolute_tolerance < 0:
            raise DomainError("absolute_tolerance must be >= 0")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureSettings()
# used internally where a quadrature result feeds an alternating sum
TIGHT_QUADRATURE = QuadratureSettings(relative_tolerance=1e-12, max_subdivisions=400)


def integrate_interval(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
    points: Sequence[float] | None = None,
    noise_floor: float = 0.0,
) -> tuple[float, float]:
    """Adaptive Gauss-Kronrod quadrature of ``f`` over ``[lo, hi]``.

    Returns ``(value, error_estimate)`` and raises :class:`QuadratureError`
    when the error estimate is well beyond both the requested tolerance and
    ``noise_floor``, the absolute roundoff level of the integral itself.
    """
    kwargs = dict(epsabs=q.absolute_tolerance, epsrel=q.relative_tolerance,
                  limit=q.max_subdivisions, full_output=1)
    if points is not None and math.isfinite(hi):
        pts = sorted(p for p in points if lo < p < hi)
        if pts:
            kwargs["points"] = pts
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(f, lo, hi, **kwargs)
    value, err = out[0], out[1]
    target = max(q.absolute_tolerance, q.relative_tolerance * abs(value), noise_floor)
    if len(out) > 3 and err > 100 * target and err > 1e-300:
        raise QuadratureError(
            f"quadrature on [{lo:g}, {hi:g}] stalled: value={value:g}, error={err:g}"
        )
    return value, err


# --------------------------------------------------------------------------
# Bessel K


def _scaled_bessel_k(order: int, x: float) -> float:
    # exp(x) * K_order(x), built by forward recurrence from orders 0 and 1
    k_prev = special.k0e(x)
    if order == 0:
        return float(k_prev)
    k_cur = special.k1e(x)
    for j in range(1, order):
        k_prev, k_cur = k_cur, k_prev + (2.0 * j / x) * k_cur
    return float(k_cur)


def _check_bessel_args(order: int, x: float) -> None:
    if order < 0 or int(order) != order:
        raise DomainError(f"Bessel order must be a non-negative integer, got {order}")
    if not x > 0:
        raise DomainError(f"Bessel K requires x > 0, got {x}")


def bessel_k(order: int, x: float) -> float:
    """Modified Bessel function of the second kind ``K_order(x)``.

    Underflows to 0 for large ``x``.
    """
    _check_bessel_args(order, x)
    return _scaled_bessel_k(int(order), x) * math.exp(-x)


def log_bessel_k(order: int, x: float) -> float:
    _check_bessel_args(order, x)
    return math.log(_scaled_bessel_k(int(order), x)) - x


# --------------------------------------------------------------------------
# incomplete gamma functions


def _log_gamma_quadrature(a: float, x: float, b: float, q: QuadratureSettings) -> float:
    """log of int_x^inf t^(a-1) exp(-t - b/t) dt by scaled quadrature.

    The integration variable is the offset ``s = t - t0`` from ``t0 = max(x, mode)``
    and the integrand is divided by its value at ``t0``.  The log-ratio is
    formed directly, so it stays accurate when ``t0`` is huge and the peak narrow.
    Both tails are cut where the integrand has dropped by ``exp(-_TAIL_LOG_DROP)``.
    """
    am1 = a - 1.0
    mode = 0.5 * (am1 + math.sqrt(am1 * am1 + 4.0 * b))
    t0 = max(x, mode)
    if t0 <= 0.0:
        # x == 0 and b == 0 with a >= 1: plain gamma function
        return math.lgamma(a)
    peak = am1 * math.log(t0) - t0 - b / t0

    def log_ratio(s: float) -> float:
        # log of integrand(t0 + s) / integrand(t0)
        return am1 * math.log1p(s / t0) - s + b * s / (t0 * (t0 + s))

    slope = abs(1.0 - am1 / t0 - b / (t0 * t0))
    curvature = abs(am1 / (t0 * t0) + 2.0 * b / t0**3)
    width = 1.0 / max(slope + math.sqrt(curvature), 1e-300)

    w = width
    while log_ratio(w) > -_TAIL_LOG_DROP:
        w *= 2.0

    def f(s: float) -> float:
        return math.exp(log_ratio(s)) if t0 + s > 0.0 else 0.0

    total, _ = integrate_interval(f, 0.0, w, q, points=[width, 4 * width])
    if x < t0:
        w = min(width, t0 - x)
        while w < t0 - x and log_ratio(-w) > -_TAIL_LOG_DROP:
            w = min(2.0 * w, t0 - x)
        left, _ = integrate_interval(f, -w, 0.0, q, points=[-width, -4 * width])
        total += left
    return peak + math.log(total)


def _check_gamma_args(a: float, x: float, b: float = 0.0) -> None:
    if not a > 0:
        raise DomainError(f"incomplete gamma requires a > 0, got {a}")
    if x < 0 or b < 0 or math.isnan(x) or math.isnan(b):
        raise DomainError(f"incomplete gamma requires x >= 0 and b >= 0, got x={x}, b={b}")


def log_upper_incomplete_gamma(a: float, x: float) -> float:
    _check_gamma_args(a, x)
    tail = special.gammaincc(a, x)
    if tail > 1e-280:
        return float(special.gammaln(a) + math.log(tail))
    return _log_gamma_quadrature(a, x, 0.0, TIGHT_QUADRATURE)


def upper_incomplete_gamma(a: float, x: float) -> float:
    """``int_x^inf t^(a-1) e^-t dt``; underflows to 0 for very large ``x``."""
    return math.exp(log_upper_incomplete_gamma(a, x))


def log_gen_incomplete_gamma(
    a: float, x: float, b: float, q: QuadratureSettings = DEFAULT_QUADRATURE
) -> float:
    _check_gamma_args(a, x, b)
    if b == 0.0:
        return log_upper_incomplete_gamma(a, x)
    return _log_gamma_quadrature(a, x, b, q)


def gen_incomplete_gamma(
    a: float, x: float, b: float, q: QuadratureSettings = DEFAULT_QUADRATURE
) -> float:
    """Generalized incomplete gamma ``int_x^inf t^(a-1) exp(-t - b/t) dt``.

    For ``b == 0`` this is exactly :func:`upper_incomplete_gamma`.
    """
    return math.exp(log_gen_incomplete_gamma(a, x, b, q))
