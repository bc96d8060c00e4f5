"""Density of a sum of independent exponential variables.

The aggregate interference ``I_R = sum_i mu_i * w_i`` (``w_i`` unit-mean
exponentials) has Laplace transform ``prod_k (1 + mu_k s)^-1``.  Grouping equal
means and expanding in partial fractions gives

    f(y) = sum_i sum_j chi[i][j] * mu_i^-j / (j-1)! * y^(j-1) * exp(-y / mu_i)

i.e. a signed mixture of Erlang densities.  ``chi`` are the characteristic
coefficients held by :class:`CharDecomp`.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Sequence

from scipy import special

from .errors import ConditioningError, DomainError

DEFAULT_MERGE_TOLERANCE = 1e-9
MAX_COEFFICIENT = 1e12
SUM_TOLERANCE = 1e-9
EPS = sys.float_info.epsilon


@dataclass(frozen=True)
class CharDecomp:
    distinct_means: tuple[float, ...]
    multiplicities: tuple[int, ...]
    coefficients: tuple[tuple[float, ...], ...]
    source_means: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.distinct_means)

    def terms(self):
        """Yield ``(mean, j, chi)`` for every Erlang component, ``j`` 1-based."""
        for mean, row in zip(self.distinct_means, self.coefficients):
            for j, chi in enumerate(row, start=1):
                yield mean, j, chi

    @property
    def coefficient_sum(self) -> float:
        return math.fsum(c for row in self.coefficients for c in row)


def _group_means(means: Sequence[float], tol: float) -> list[list[float]]:
    groups: list[list[float]] = []
    for m in sorted(means, reverse=True):
        if groups and groups[-1][0] - m <= tol * groups[-1][0]:
            groups[-1].append(m)
        else:
            groups.append([m])
    return groups


def _deflated_series(center: float, others: Sequence[tuple[float, int]], order: int) -> list[float]:
    """Taylor coefficients in ``w = 1 + center*s`` of prod (1 + m s)^-tau.

    With ``s = (w - 1)/center`` each factor becomes ``(c + d w)^-tau`` where
    ``c = 1 - m/center`` and ``d = m/center``.
    """
    series = [1.0] + [0.0] * (order - 1)
    for m, tau in others:
        c = (center - m) / center
        r = (m / center) / c
        scale = c ** (-tau)
        # (1 + r w)^-tau = sum_n (-1)^n C(tau+n-1, n) r^n w^n
        factor = [scale * (-r) ** n * math.comb(tau + n - 1, n) for n in range(order)]
        series = [
            math.fsum(series[k] * factor[n - k] for k in range(n + 1)) for n in range(order)
        ]
    return series


def characteristic_decomposition(
    means: Sequence[float], merge_tolerance: float = DEFAULT_MERGE_TOLERANCE
) -> CharDecomp:
    """Group the means and compute the characteristic coefficients.

    Raises :class:`ConditioningError` if a coefficient exceeds ``1e12`` in
    magnitude or the coefficients fail to sum to one, which happens when two
    distinct means are nearly equal; widen ``merge_tolerance`` in that case.
    """
    means = tuple(float(m) for m in means)
    if any(not m > 0 or not math.isfinite(m) for m in means):
        raise DomainError(f"all means must be positive and finite, got {means}")
    if not 0 < merge_tolerance <= 1e-3:
        raise DomainError(f"merge_tolerance must lie in (0, 1e-3], got {merge_tolerance}")

    groups = _group_means(means, merge_tolerance)
    centers = [math.fsum(g) / len(g) for g in groups]
    taus = [len(g) for g in groups]

    coefficients = []
    for i, (center, tau) in enumerate(zip(centers, taus)):
        others = [(centers[k], taus[k]) for k in range(len(groups)) if k != i]
        g = _deflated_series(center, others, tau)
        # chi[i][j] is the coefficient of w^(tau - j)
        coefficients.append(tuple(g[tau - j] for j in range(1, tau + 1)))

    decomp = CharDecomp(tuple(centers), tuple(taus), tuple(coefficients), means)
    biggest = max((abs(c) for row in coefficients for c in row), default=0.0)
    if biggest > MAX_COEFFICIENT:
        raise ConditioningError(
            f"characteristic coefficient {biggest:.3g} for means {means}; widen merge_tolerance"
        )
    # coefficients carry relative roundoff, so their sum may drift by ~eps * sum|chi|
    magnitude = math.fsum(abs(c) for row in coefficients for c in row)
    if means and abs(decomp.coefficient_sum - 1.0) > SUM_TOLERANCE + 64 * EPS * magnitude:
        raise ConditioningError(
            f"coefficients sum to {decomp.coefficient_sum!r} for means {means}"
        )
    return decomp


def mixture_pdf(decomp: CharDecomp, y: float) -> float:
    if y < 0:
        return 0.0
    total = []
    for mean, j, chi in decomp.terms():
        if chi == 0.0:
            continue
        if y == 0.0:
            if j == 1:
                total.append(chi / mean)
            continue
        log_mag = -j * math.log(mean) - math.lgamma(j) + (j - 1) * math.log(y) - y / mean
        total.append(chi * math.exp(log_mag))
    return max(math.fsum(total), 0.0)


def mixture_cdf(decomp: CharDecomp, y: float) -> float:
    if y <= 0:
        return 0.0
    lower = math.fsum(chi * special.gammainc(j, y / mean) for mean, j, chi in decomp.terms())
    if lower < 0.5:
        value = lower
    else:
        upper = math.fsum(chi * special.gammaincc(j, y / mean) for mean, j, chi in decomp.terms())
        value = 1.0 - upper
    return min(max(value, 0.0), 1.0)
