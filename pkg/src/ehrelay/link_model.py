"""Channel configuration, protocol resolution and the closed-form link laws.

Everything here works with linear SNRs.  A configuration plus a protocol
resolves to :class:`EffectiveParams` (mean first-hop SNR, second-hop scale and
the per-interferer mean INRs), which is all the analytic formulas need.
"""

from __future__ import annotations

import enum
import functools
import math
import sys
import warnings
from dataclasses import dataclass, field
from typing import Sequence

from scipy import special

from .errors import ConditioningError, DomainError
from .interference_mixture import CharDecomp, characteristic_decomposition
from .special_functions import (
    TIGHT_QUADRATURE,
    QuadratureSettings,
    integrate_interval,
    log_bessel_k,
    log_gen_incomplete_gamma,
)

EPS = sys.float_info.epsilon
DEGENERACY_TOLERANCE = 1e-9
# interferers weaker than this fraction of gbar_h shift probabilities by ~1e-12 and are dropped
NEGLIGIBLE_MEAN = 1e-12
# The closed-form outage sum is rejected once sum|terms| / |sum terms| exceeds
# this, i.e. once the alternating sum has lost more than 8 significant digits.
MAX_CANCELLATION = 1e8
INTEGRAL_QUADRATURE = QuadratureSettings(relative_tolerance=1e-10, absolute_tolerance=1e-13)


class Variant(str, enum.Enum):
    TS = "ts"
    PS = "ps"


class OutageMethod(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    INTEGRAL = "integral"


class DegeneracyWarning(UserWarning):
    """An interferer mean INR coincides with the mean first-hop SNR."""


@dataclass(frozen=True)
class ChannelConfig:
    """Physical parameters of the source-relay-destination link.

    Interferer powers may be zero; such interferers contribute nothing.
    """

    source_power: float
    interferer_powers: tuple[float, ...] = ()
    relay_noise_var: float = 1.0
    dest_noise_var: float = 1.0
    mean_gain_sr: float = 1.0
    mean_gain_rd: float = 1.0
    mean_gain_interferers: tuple[float, ...] | None = None
    efficiency: float = 1.0

    def __post_init__(self):
        powers = tuple(float(p) for p in self.interferer_powers)
        gains = self.mean_gain_interferers
        gains = (1.0,) * len(powers) if gains is None else tuple(float(g) for g in gains)
        object.__setattr__(self, "interferer_powers", powers)
        object.__setattr__(self, "mean_gain_interferers", gains)
        if len(powers) != len(gains):
            raise DomainError("interferer_powers and mean_gain_interferers differ in length")
        for name in ("source_power", "relay_noise_var", "dest_noise_var",
                     "mean_gain_sr", "mean_gain_rd"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0")
        if any(p < 0 for p in powers) or any(g < 0 for g in gains):
            raise DomainError("interferer powers and gains must be >= 0")
        if not 0.0 <= self.efficiency <= 1.0:
            raise DomainError(f"efficiency must lie in [0, 1], got {self.efficiency}")

    @property
    def num_interferers(self) -> int:
        return len(self.interferer_powers)


@dataclass(frozen=True)
class Protocol:
    variant: Variant
    ratio: float

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if not 0.0 <= self.ratio <= 1.0:
            raise DomainError(f"harvesting ratio must lie in [0, 1], got {self.ratio}")

    @classmethod
    def ts(cls, alpha: float) -> "Protocol":
        return cls(Variant.TS, alpha)

    @classmethod
    def ps(cls, theta: float) -> "Protocol":
        return cls(Variant.PS, theta)


@dataclass(frozen=True)
class EffectiveParams:
    gbar_h: float
    gbar_g: float
    mu: tuple[float, ...]
    decomp_a: CharDecomp = field(repr=False)

    @classmethod
    def from_values(cls, gbar_h: float, gbar_g: float, mu: Sequence[float] = ()) -> "EffectiveParams":
        """Build params directly from linear (gbar_h, gbar_g, mu), dropping negligible means."""
        if not gbar_h > 0 or not gbar_g >= 0:
            raise DomainError(f"need gbar_h > 0 and gbar_g >= 0, got {gbar_h}, {gbar_g}")
        if any(m < 0 for m in mu):
            raise DomainError("interferer means must be >= 0")
        mu = [float(m) for m in mu if m > NEGLIGIBLE_MEAN * gbar_h]
        snapped = False
        for i, m in enumerate(mu):
            if m != gbar_h and abs(m - gbar_h) <= DEGENERACY_TOLERANCE * gbar_h:
                mu[i] = gbar_h
                snapped = True
        if snapped or gbar_h in mu:
            warnings.warn(
                f"interferer mean INR coincides with gbar_h={gbar_h:g}; the outage closed "
                "form is singular there and will defer to quadrature",
                DegeneracyWarning, stacklevel=2,
            )
        mu = tuple(mu)
        return cls(gbar_h, gbar_g, mu, characteristic_decomposition(mu))

    @functools.cached_property
    def decomp_b(self) -> CharDecomp:
        """Decomposition of ``gamma_h + I_R``; built on first use since it can be ill-conditioned."""
        return characteristic_decomposition(self.mu + (self.gbar_h,))

    @property
    def num_interferers(self) -> int:
        return len(self.mu)


def harvest_scale(cfg: ChannelConfig, proto: Protocol) -> float:
    """Factor multiplying ``|g|^2`` in the second-hop variable ``W``."""
    r = proto.ratio
    if proto.variant is Variant.TS:
        gain = 2.0 * r / (1.0 - r) if r < 1.0 else math.inf
    else:
        gain = r / (1.0 - r) if r < 1.0 else math.inf
    return cfg.efficiency * gain * cfg.relay_noise_var / cfg.dest_noise_var


def first_hop_scale(cfg: ChannelConfig, proto: Protocol) -> float:
    """Factor converting received powers into first-hop SNR units."""
    share = 1.0 - proto.ratio if proto.variant is Variant.PS else 1.0
    return share / cfg.relay_noise_var


def effective_params(cfg: ChannelConfig, proto: Protocol) -> EffectiveParams:
    if not 0.0 < proto.ratio < 1.0:
        raise DomainError(f"analytic paths need a ratio inside (0, 1), got {proto.ratio}")
    s = first_hop_scale(cfg, proto)
    gbar_h = s * cfg.source_power * cfg.mean_gain_sr
    mu = [s * p * g for p, g in zip(cfg.interferer_powers, cfg.mean_gain_interferers)]
    gbar_g = harvest_scale(cfg, proto) * cfg.mean_gain_rd
    return EffectiveParams.from_values(gbar_h, gbar_g, mu)


# --------------------------------------------------------------------------
# first and second hop CDFs


def cdf_gamma_sr(p: EffectiveParams, gamma: float) -> float:
    """CDF of the first-hop SINR ``gamma_h / (1 + I_R)``."""
    if gamma <= 0:
        return 0.0
    if math.isinf(gamma):
        return 1.0
    survival = 1.0
    if p.mu:
        survival = math.fsum(
            chi * (1.0 + mean * gamma / p.gbar_h) ** (-j) for mean, j, chi in p.decomp_a.terms()
        )
    return min(max(1.0 - math.exp(-gamma / p.gbar_h) * survival, 0.0), 1.0)


def cdf_gamma_rd(p: EffectiveParams, gamma: float) -> float:
    """CDF of the second-hop SNR ``W (gamma_h + I_R)``.

    Uses the Bessel series over the decomposition of ``gamma_h + I_R``; when that
    decomposition is ill-conditioned, integrates the density of ``gamma_h + I_R``.
    """
    if p.gbar_g == 0.0:
        return 1.0
    if gamma <= 0:
        return 0.0
    if math.isinf(gamma):
        return 1.0
    try:
        decomp = p.decomp_b
    except ConditioningError:
        return _cdf_gamma_rd_quadrature(p, gamma)
    terms = []
    for mean, j, chi in decomp.terms():
        if chi == 0.0:
            continue
        s = gamma / (p.gbar_g * mean)
        x = 2.0 * math.sqrt(s)
        if x > 1400.0:
            continue
        log_mag = math.log(2.0) + 0.5 * j * math.log(s) + log_bessel_k(j, x) - math.lgamma(j)
        terms.append(chi * math.exp(log_mag))
    return min(max(1.0 - math.fsum(terms), 0.0), 1.0)


def _noise_floor(decomp: CharDecomp) -> float:
    # absolute roundoff of an integral of the unit-mass density sum, which cancels sum |chi|
    return 64.0 * EPS * math.fsum(abs(c) for row in decomp.coefficients for c in row)


def _feature_points(widths: Sequence[float], upper: float) -> list[float]:
    # breakpoints at a few multiples of each feature width so quad sees narrow ramps
    pts = {c * w for w in widths if w > 0 for c in (1.0, 5.0, 20.0)}
    return sorted(x for x in pts | {1.0, 5.0, 20.0} if 0 < x < upper)


def _cdf_gamma_rd_quadrature(p: EffectiveParams, gamma: float) -> float:
    # 1 - E[exp(-gamma / (gbar_g Y))] with Y = gamma_h + I_R, on the scale of the slowest mean
    scale = max(p.mu + (p.gbar_h,))

    def integrand(s: float) -> float:
        y = s * scale
        return math.exp(-gamma / (p.gbar_g * y)) * _energy_density(p, 0.0, y) * scale

    upper = 80.0 + 10.0 * max(p.decomp_a.multiplicities, default=1)
    widths = [m / scale for m in p.decomp_a.distinct_means] + [gamma / (p.gbar_g * scale)]
    value, _ = integrate_interval(integrand, 0.0, upper, INTEGRAL_QUADRATURE,
                                  points=_feature_points(widths, upper),
                                  noise_floor=_noise_floor(p.decomp_a))
    return min(max(1.0 - value, 0.0), 1.0)


# --------------------------------------------------------------------------
# density of Z = (gamma_h + I_R) * 1{gamma_SR > gamma_th}


def _log_erlang_partial(j: int, a: float, x: float) -> float:
    """log of int_0^x t^(j-1) exp(-a t) dt / (j-1)!  for any sign of ``a``."""
    base = j * math.log(x) - math.lgamma(j + 1)
    if a >= 0:
        return base + math.log(special.hyp1f1(j, j + 1, -a * x))
    c = -a * x
    return base + c + math.log(special.hyp1f1(1, j + 1, -c))


def _energy_density(p: EffectiveParams, gamma_th: float, z: float) -> float:
    # density of (gamma_h + I_R) on {gamma_SR > gamma_th}; gamma_th = 0 gives the full density
    if z <= gamma_th:
        return 0.0
    lead = -z / p.gbar_h - math.log(p.gbar_h)
    if not p.mu:
        return math.exp(lead)
    x = (z - gamma_th) / (1.0 + gamma_th)
    terms = []
    for mean, j, chi in p.decomp_a.terms():
        if chi == 0.0:
            continue
        a = 1.0 / mean - 1.0 / p.gbar_h
        terms.append(chi * math.exp(lead - j * math.log(mean) + _log_erlang_partial(j, a, x)))
    return max(math.fsum(terms), 0.0)


def pdf_z(p: EffectiveParams, gamma_th: float, z: float) -> float:
    """Density of the decoded-energy variable ``Z`` on ``z > gamma_th``.

    Evaluated as ``exp(-z/gbar_h)/gbar_h * sum chi mu^-j E_j(a, x)`` with
    ``E_j`` the partial Erlang integral; this equals the textbook bracket form
    ``chi (1 - mu/gbar_h)^-j [1 - e^{-a x} sum_k (a x)^k / k!]`` but has no
    cancellation when ``mu`` approaches ``gbar_h``.
    """
    if not gamma_th > 0:
        raise DomainError(f"gamma_th must be > 0, got {gamma_th}")
    return _energy_density(p, gamma_th, z)


def pdf_z_bracket_form(p: EffectiveParams, gamma_th: float, z: float) -> float:
    """Literal bracket form of the ``Z`` density; loses precision near degeneracy."""
    if z <= gamma_th:
        return 0.0
    lead = math.exp(-z / p.gbar_h) / p.gbar_h
    if not p.mu:
        return lead
    x = (z - gamma_th) / (1.0 + gamma_th)
    total = 0.0
    for mean, j, chi in p.decomp_a.terms():
        a = 1.0 / mean - 1.0 / p.gbar_h
        partial = sum((a * x) ** k / math.factorial(k) for k in range(j))
        total += chi * (1.0 - mean / p.gbar_h) ** (-j) * (1.0 - math.exp(-a * x) * partial)
    return lead * total


# --------------------------------------------------------------------------
# outage probability


def _check_threshold(gamma_th: float) -> None:
    if gamma_th < 0 or math.isnan(gamma_th):
        raise DomainError(f"gamma_th must be > 0, got {gamma_th}")


def _log_direct_link_gamma(p: EffectiveParams, gamma_th: float) -> float:
    # Gamma(1, gth/gbar_h; gth/(gbar_h gbar_g))
    return log_gen_incomplete_gamma(
        1.0, gamma_th / p.gbar_h, gamma_th / (p.gbar_h * p.gbar_g), TIGHT_QUADRATURE
    )


def _summed_outage(terms: list[float]) -> float:
    terms.sort(key=abs, reverse=True)
    total = math.fsum(terms)
    magnitude = math.fsum(abs(t) for t in terms)
    if magnitude > MAX_CANCELLATION * abs(total):
        raise ConditioningError(
            f"outage closed form lost more than 8 digits: terms of size {magnitude:.3g} "
            f"sum to {total:.3g}"
        )
    return min(max(1.0 - total, 0.0), 1.0)


def outage_general(p: EffectiveParams, gamma_th: float) -> float:
    """Closed-form outage for arbitrary (grouped) interferer means."""
    log_g0 = _log_direct_link_gamma(p, gamma_th)
    if not p.mu:
        return min(max(1.0 - math.exp(log_g0), 0.0), 1.0)
    g0 = math.exp(log_g0)
    u = gamma_th / (1.0 + gamma_th)
    terms = []
    for mean, tau, row in zip(p.decomp_a.distinct_means, p.decomp_a.multiplicities,
                              p.decomp_a.coefficients):
        c = (p.gbar_h - mean) / p.gbar_h
        a = 1.0 / mean - 1.0 / p.gbar_h
        b = 1.0 / p.gbar_h + a / (1.0 + gamma_th)
        bx = b * gamma_th
        log_gammas = [log_gen_incomplete_gamma(m + 1.0, bx, bx / p.gbar_g, TIGHT_QUADRATURE)
                      for m in range(tau)]
        for j, chi in enumerate(row, start=1):
            if chi == 0.0:
                continue
            pre_sign = math.copysign(1.0, chi) * math.copysign(1.0, c) ** j
            log_pre = math.log(abs(chi)) - j * math.log(abs(c))
            terms.append(pre_sign * math.exp(log_pre + log_g0))
            for k in range(j):
                if k > 0 and a == 0.0:
                    break
                log_k = log_pre - math.log(p.gbar_h) + a * u - math.lgamma(k + 1)
                sign_k = pre_sign * (math.copysign(1.0, -a) ** k if k else 1.0)
                if k:
                    log_k += k * math.log(abs(a) * u)
                for m in range(k + 1):
                    log_t = (log_k + math.log(math.comb(k, m)) - math.log(b)
                             - m * math.log(bx) + log_gammas[m])
                    terms.append(-sign_k * (-1.0) ** m * math.exp(log_t))
    return _summed_outage(terms)


def _signed_exp(sign: float, log_mag: float) -> float:
    return sign * math.exp(log_mag)


def outage_iid(gbar_h: float, gbar_g: float, mu: float, count: int, gamma_th: float) -> float:
    """Closed-form outage for ``count`` interferers sharing mean INR ``mu``."""
    c = (gbar_h - mu) / gbar_h
    a = 1.0 / mu - 1.0 / gbar_h
    b = 1.0 / gbar_h + a / (1.0 + gamma_th)
    bx = b * gamma_th
    u = gamma_th / (1.0 + gamma_th)
    sign_lead = math.copysign(1.0, c) ** count
    log_lead = -count * math.log(abs(c))
    log_g0 = log_gen_incomplete_gamma(
        1.0, gamma_th / gbar_h, gamma_th / (gbar_h * gbar_g), TIGHT_QUADRATURE)
    log_gammas = [log_gen_incomplete_gamma(m + 1.0, bx, bx / gbar_g, TIGHT_QUADRATURE)
                  for m in range(count)]
    terms = [_signed_exp(sign_lead, log_lead + log_g0)]
    base = log_lead + a * u - math.log(gbar_h) - math.log(b)
    for k in range(count):
        if k > 0 and a == 0.0:
            break
        log_k = base - math.lgamma(k + 1) + (k * math.log(abs(a) * u) if k else 0.0)
        sign_k = sign_lead * (math.copysign(1.0, -a) ** k if k else 1.0)
        for m in range(k + 1):
            log_t = log_k + math.log(math.comb(k, m)) - m * math.log(bx) + log_gammas[m]
            terms.append(_signed_exp(-sign_k * (-1.0) ** m, log_t))
    return _summed_outage(terms)


def outage_single(gbar_h: float, gbar_g: float, mu: float, gamma_th: float) -> float:
    """Closed-form outage with exactly one interferer."""
    a = 1.0 / mu - 1.0 / gbar_h
    b = 1.0 / gbar_h + a / (1.0 + gamma_th)
    bx = b * gamma_th
    log_g0 = log_gen_incomplete_gamma(
        1.0, gamma_th / gbar_h, gamma_th / (gbar_h * gbar_g), TIGHT_QUADRATURE)
    log_g1 = log_gen_incomplete_gamma(1.0, bx, bx / gbar_g, TIGHT_QUADRATURE)
    sign = math.copysign(1.0, gbar_h - mu)
    log_gap = math.log(abs(gbar_h - mu))
    first = _signed_exp(sign, math.log(gbar_h) - log_gap + log_g0)
    second = _signed_exp(sign, a * gamma_th / (1.0 + gamma_th) + log_g1 - math.log(b) - log_gap)
    return _summed_outage([first, -second])


def outage_integral(
    p: EffectiveParams, gamma_th: float, q: QuadratureSettings = INTEGRAL_QUADRATURE
) -> float:
    """Outage as ``1 - int exp(-gth/(gbar_g z)) f_Z(z) dz`` by quadrature."""
    rate = 1.0 / p.gbar_h
    for mean in p.decomp_a.distinct_means:
        a = 1.0 / mean - 1.0 / p.gbar_h
        rate = min(rate, 1.0 / p.gbar_h + a / (1.0 + gamma_th))
    tau_max = max(p.decomp_a.multiplicities, default=1)

    def integrand(s: float) -> float:
        z = gamma_th + s / rate
        return math.exp(-gamma_th / (p.gbar_g * z)) * pdf_z(p, gamma_th, z) / rate

    upper = 80.0 + 10.0 * tau_max
    widths = [rate * (1.0 + gamma_th) * m for m in p.decomp_a.distinct_means]
    floor = _noise_floor(p.decomp_a) if p.mu else 0.0
    value, _ = integrate_interval(integrand, 0.0, upper, q, points=_feature_points(widths, upper),
                                  noise_floor=floor)
    return min(max(1.0 - value, 0.0), 1.0)


def outage_probability(
    p: EffectiveParams,
    gamma_th: float,
    method: OutageMethod | str = OutageMethod.CLOSED_FORM,
) -> float:
    """Probability that the destination fails to reach ``gamma_th``.

    ``closed_form`` uses the single-interferer and equal-means reductions where
    they apply.  It raises :class:`ConditioningError` when the alternating sum
    is untrustworthy; ``integral`` is always safe but slower.
    """
    _check_threshold(gamma_th)
    method = OutageMethod(method)
    if gamma_th == 0.0:
        return 0.0
    if math.isinf(gamma_th) or p.gbar_g == 0.0:
        return 1.0
    if method is OutageMethod.INTEGRAL:
        return outage_integral(p, gamma_th)
    if p.gbar_h in p.mu:
        raise ConditioningError("an interferer mean equals gbar_h; use the integral method")
    if p.num_interferers == 1:
        return outage_single(p.gbar_h, p.gbar_g, p.mu[0], gamma_th)
    if len(p.decomp_a) == 1:
        return outage_iid(p.gbar_h, p.gbar_g, p.decomp_a.distinct_means[0],
                          p.decomp_a.multiplicities[0], gamma_th)
    return outage_general(p, gamma_th)


def outage_probability_auto(p: EffectiveParams, gamma_th: float) -> float:
    """Closed form when well conditioned, quadrature otherwise."""
    try:
        return outage_probability(p, gamma_th, OutageMethod.CLOSED_FORM)
    except (ConditioningError, OverflowError, ZeroDivisionError):
        return outage_probability(p, gamma_th, OutageMethod.INTEGRAL)


def with_mu(p: EffectiveParams, mu: Sequence[float]) -> EffectiveParams:
    """Same link with a different interferer mean vector."""
    return EffectiveParams.from_values(p.gbar_h, p.gbar_g, mu)

