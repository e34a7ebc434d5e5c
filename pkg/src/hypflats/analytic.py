"""Closed-form quantities: Crofton constants, intersection probabilities,
distance CDF/density, atom mass, moments, Euclidean baselines and the
critical phase constant.

Every hyperbolic evaluation first rescales to unit curvature (K = -1 with
ball radius v = sqrt(-K) u), which fixes the outer integration interval at
[0, 1].  Inner integrals use the substitution z = sin(theta), which removes
the (1 - z^2)^(-1/2) endpoint singularity of the d - q = 1 case entirely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _backend
from .errors import DomainError, ProbabilityRangeError
from .quadrature import (
    DEFAULT_TOLERANCE,
    QuadResult,
    Tolerance,
    integrate_adaptive,
    integrate_iterated_2d,
)
from .special import (
    Curvature,
    FlatConfig,
    log_constant_D,
    log_sphere_surface,
)

__all__ = [
    "MomentResult",
    "PhaseMode",
    "crofton_constant",
    "log_crofton_constant",
    "intersection_probability",
    "euclidean_intersection_probability",
    "distance_cdf",
    "distance_cdf_grid",
    "distance_density",
    "atom_mass",
    "moment",
    "euclidean_distance_cdf",
    "reduce_to_unit_curvature",
    "critical_constant_rho",
    "phase_limit",
]


@dataclass(frozen=True)
class MomentResult:
    """Moment of the distance law; value is None when the moment diverges."""

    alpha: float
    conditional: bool
    value: float | None

    @property
    def divergent(self) -> bool:
        return self.value is None


@dataclass(frozen=True)
class PhaseMode:
    """Curvature schedule regime for the d -> infinity limit."""

    regime: str  # "subcritical" | "supercritical" | "critical"
    kappa: float | None = None

    def __post_init__(self):
        if self.regime not in ("subcritical", "supercritical", "critical"):
            raise DomainError(f"unknown phase regime {self.regime!r}")
        if self.regime == "critical":
            if self.kappa is None or not self.kappa > 0:
                raise DomainError("critical regime requires kappa > 0")
        elif self.kappa is not None:
            raise DomainError("kappa only applies to the critical regime")

    @classmethod
    def subcritical(cls):
        return cls("subcritical")

    @classmethod
    def supercritical(cls):
        return cls("supercritical")

    @classmethod
    def critical(cls, kappa: float):
        return cls("critical", kappa)


def _log_cosh(x):
    x = np.asarray(x, dtype=float)
    return x + np.log1p(np.exp(-2.0 * x)) - math.log(2.0)


def _log_sinh(x):
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape, -np.inf)
    pos = x > 0.0
    xp = x[pos]
    out[pos] = xp + np.log1p(-np.exp(-2.0 * xp)) - math.log(2.0)
    return out


def log_crofton_constant(d: int, k: int, u: float, K: Curvature,
                         tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """log of the total invariant measure of k-flats hitting the radius-u ball."""
    if not 0 <= k <= d - 1:
        raise DomainError(f"need 0 <= k <= d-1, got k={k}, d={d}")
    if not u > 0:
        raise DomainError(f"need u > 0, got {u}")
    n = d - k
    if K.is_flat:
        return log_sphere_surface(n) + n * math.log(u) - math.log(n)
    s = K.scale
    e = n - 1

    def logint(r):
        val = k * _log_cosh(s * np.asarray(r, dtype=float))
        if e:
            val = val + e * _log_sinh(s * r)
        return val

    shift = float(logint(np.array([u]))[0])
    res = integrate_adaptive(logint, 0.0, u, tol, log_form=True,
                             log_offset=-shift)
    return (log_sphere_surface(n) + (k + 1 - d) * math.log(s)
            + shift + math.log(res.value))


def crofton_constant(d: int, k: int, u: float, K: Curvature,
                     tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    return math.exp(log_crofton_constant(d, k, u, K, tol))


def reduce_to_unit_curvature(cfg: FlatConfig, K: Curvature):
    """Rescale to K = -1: ball radius becomes v = sqrt(-K) u.

    Probabilities are invariant; distances shrink by sqrt(-K) and densities
    gain a factor sqrt(-K).
    """
    K.require_hyperbolic()
    return replace(cfg, u=K.scale * cfg.u), Curvature(-1.0)


def _as_probability(res: QuadResult) -> float:
    slack = res.error_estimate + 1e-12
    v = res.value
    if v < 0.0:
        if v < -slack:
            raise ProbabilityRangeError(
                f"probability {v} below 0 beyond error estimate {res.error_estimate}"
            )
        return 0.0
    if v > 1.0:
        if v > 1.0 + slack:
            raise ProbabilityRangeError(
                f"probability {v} above 1 beyond error estimate {res.error_estimate}"
            )
        return 1.0
    return v


def _log_prefactor(cfg1: FlatConfig, tol: Tolerance) -> float:
    """log(D omega_{d-gamma} / C) at unit curvature with ball radius cfg1.u."""
    return (
        log_constant_D(cfg1)
        + log_sphere_surface(cfg1.d - cfg1.gamma)
        - log_crofton_constant(cfg1.d, cfg1.k, cfg1.u, Curvature(-1.0), tol)
    )


def _integrand_parts(cfg1: FlatConfig, tol: Tolerance):
    """Shared pieces of the unit-curvature double integral."""
    d, q = cfg1.d, cfg1.q
    c = q - cfg1.gamma - 1
    Ru = math.tanh(cfg1.u)
    pref = _log_prefactor(cfg1, tol)

    def logg(r, theta):
        val = _backend.log_kernel_theta(float(d), float(q), -1.0, r, theta)
        if c:
            val = val + c * math.log(r)
        return val

    def inner_upper(r):
        return math.asin(min(1.0, Ru / r))

    return logg, inner_upper, _peak_break_points, pref, Ru


def _peak_break_points(r, theta_max):
    """Panel seeds resolving the (1 + K r^2 sin^2)^(-(d+1)/2) boundary layer.

    For r near the ball boundary the kernel peaks at theta_max over an
    angular scale sqrt(1 - r^2); pre-splitting there saves the adaptive
    rule thousands of bisections.
    """
    if r < 0.99:
        return ()
    w = math.sqrt(max(1.0 - r * r, 0.0))
    if w <= 0.0 or w >= 0.1:
        return ()
    return tuple(
        p for p in (theta_max - k * w for k in (300.0, 30.0, 3.0, 1.0))
        if 0.0 < p < theta_max
    )


def _hyper_double_integral(cfg1: FlatConfig, outer_hi: float,
                           tol: Tolerance, outer_lo: float = 0.0) -> QuadResult:
    """The radial-angular double integral at unit curvature, prefactor included.

    Integrates r^(q-gamma-1) times the kernel over r in (outer_lo, outer_hi),
    theta in (0, arcsin(min(1, R(u)/r))).
    """
    logg, inner_upper, inner_breaks, pref, Ru = _integrand_parts(cfg1, tol)
    return integrate_iterated_2d(
        logg, outer_lo, outer_hi, inner_upper, tol,
        log_form=True, log_offset=pref,
        outer_break_points=(Ru,) if outer_lo < Ru < outer_hi else (),
        inner_break_points=lambda r: inner_breaks(r, inner_upper(r)),
    )


def intersection_probability(cfg: FlatConfig, K: Curvature,
                             tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Probability that the moving flat meets the central q-flat."""
    cfg1, _ = reduce_to_unit_curvature(cfg, K)
    return _as_probability(_hyper_double_integral(cfg1, 1.0, tol))


def euclidean_intersection_probability(cfg: FlatConfig) -> float:
    """In flat space the two flats meet almost surely."""
    return 1.0


def atom_mass(cfg: FlatConfig, K: Curvature,
              tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Mass of the atom at +infinity: the probability the flats miss."""
    return 1.0 - intersection_probability(cfg, K, tol)


def distance_cdf(cfg: FlatConfig, K: Curvature, delta: float,
                 tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """P(distance of the intersection to the origin <= delta)."""
    if delta < 0:
        raise DomainError(f"need delta >= 0, got {delta}")
    if delta == 0:
        return 0.0
    cfg1, _ = reduce_to_unit_curvature(cfg, K)
    outer_hi = math.tanh(K.scale * delta)
    return _as_probability(_hyper_double_integral(cfg1, outer_hi, tol))


def distance_cdf_grid(cfg: FlatConfig, K: Curvature, deltas,
                      tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """distance_cdf on an ascending grid, via cumulative segment integrals.

    One outer sweep instead of len(deltas) independent double integrals.
    """
    deltas = np.asarray(deltas, dtype=float)
    if deltas.size and (np.any(deltas < 0) or np.any(np.diff(deltas) < 0)):
        raise DomainError("deltas must be ascending and >= 0")
    cfg1, _ = reduce_to_unit_curvature(cfg, K)
    bounds = np.tanh(K.scale * deltas)
    out = np.empty(deltas.shape)
    acc = 0.0
    lo = 0.0
    for i, hi in enumerate(bounds):
        if hi > lo:
            acc += _hyper_double_integral(cfg1, hi, tol, outer_lo=lo).value
            lo = hi
        out[i] = min(max(acc, 0.0), 1.0)
    return out


def distance_density(cfg: FlatConfig, K: Curvature, delta: float,
                     tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Density of the absolutely continuous part of the distance law."""
    if not delta > 0:
        raise DomainError(f"need delta > 0, got {delta}")
    cfg1, _ = reduce_to_unit_curvature(cfg, K)
    return K.scale * _density_reduced(cfg1, K.scale * delta, tol)


def _density_reduced(cfg1: FlatConfig, dv: float, tol: Tolerance) -> float:
    """Density at unit curvature, evaluated at reduced distance dv > 0."""
    d, q = cfg1.d, cfg1.q
    c = q - cfg1.gamma - 1
    Ru = math.tanh(cfg1.u)
    Rd = math.tanh(dv)
    theta_max = math.asin(min(1.0, Ru / Rd))
    offset = _log_prefactor(cfg1, tol) - 2.0 * float(_log_cosh(dv))
    if c:
        offset += c * math.log(Rd)

    def logf(theta):
        return _backend.log_kernel_theta(float(d), float(q), -1.0, Rd, theta)

    res = integrate_adaptive(logf, 0.0, theta_max, tol,
                             log_form=True, log_offset=offset,
                             break_points=_peak_break_points(Rd, theta_max))
    return max(res.value, 0.0)


def moment(cfg: FlatConfig, K: Curvature, alpha: float, conditional: bool,
           tol: Tolerance = DEFAULT_TOLERANCE) -> MomentResult:
    """Moment of order alpha of the distance to the origin.

    Divergence is decided by the analytic criterion: the unconditional
    moment is finite iff alpha in (gamma - q, 0]; the conditional one iff
    alpha > gamma - q.  Quadrature only runs on the finite branch.
    """
    K.require_hyperbolic()
    lo = cfg.gamma - cfg.q
    if alpha <= lo or (not conditional and alpha > 0):
        return MomentResult(alpha, conditional, None)
    if alpha == 0:
        return MomentResult(alpha, conditional, 1.0)

    cfg1, _ = reduce_to_unit_curvature(cfg, K)

    def integrand(dv):
        out = np.empty(dv.shape)
        for i, x in enumerate(dv):
            out[i] = x ** alpha * _density_reduced(cfg1, x, tol)
        return out

    total = integrate_adaptive(integrand, 0.0, 10.0, tol).value
    t_lo, t_hi = 10.0, 20.0
    while True:
        seg = integrate_adaptive(integrand, t_lo, t_hi, tol).value
        total += seg
        if abs(seg) < tol.rel_tol * abs(total):
            break
        t_lo, t_hi = t_hi, 2.0 * t_hi
    value = K.scale ** (-alpha) * total
    if conditional:
        value /= intersection_probability(cfg, K, tol)
    return MomentResult(alpha, conditional, value)


def euclidean_distance_cdf(cfg: FlatConfig, delta: float,
                           tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Flat-space distance CDF (the K -> 0 limit of distance_cdf)."""
    if delta < 0:
        raise DomainError(f"need delta >= 0, got {delta}")
    if delta == 0:
        return 0.0
    d, q, u = cfg.d, cfg.q, cfg.u
    c = q - cfg.gamma - 1
    pref = (
        log_constant_D(cfg)
        + log_sphere_surface(d - cfg.gamma)
        - log_crofton_constant(d, cfg.k, u, Curvature(0.0), tol)
    )

    def logg(r, theta):
        val = _backend.log_kernel_theta(float(d), float(q), 0.0, r, theta)
        if c:
            val = val + c * math.log(r)
        return val

    def inner_upper(r):
        return math.asin(min(1.0, u / r))

    res = integrate_iterated_2d(
        logg, 0.0, delta, inner_upper, tol,
        log_form=True, log_offset=pref,
        outer_break_points=(u,) if u < delta else (),
    )
    return _as_probability(res)


def critical_constant_rho(u: float, q: int, gamma: int, kappa: float,
                          tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Limit of the intersection probability in the critical regime -K d -> kappa."""
    if not 0 <= gamma <= q - 1:
        raise DomainError(f"need 0 <= gamma <= q-1, got gamma={gamma}, q={q}")
    if not u > 0:
        raise DomainError(f"need u > 0, got {u}")
    if not kappa > 0:
        raise DomainError(f"need kappa > 0, got {kappa}")
    c = q - gamma - 1

    # normalizer: integral of exp(kappa s^2 / 2) s^(q-gamma-1) over (0, u)
    def log_norm(s):
        s = np.asarray(s, dtype=float)
        val = 0.5 * kappa * s * s
        if c:
            with np.errstate(divide="ignore"):
                val = val + c * np.log(s)
        return val

    shift = 0.5 * kappa * u * u + (c * math.log(u) if c else 0.0)
    norm = integrate_adaptive(log_norm, 0.0, u, tol, log_form=True,
                              log_offset=-shift)
    log_a = shift + math.log(norm.value)

    pref = (
        log_sphere_surface(gamma + 1)
        - 0.5 * (gamma + 1) * math.log(2.0 * math.pi)
        + (1 + q) * math.log(u)
        + 0.5 * (gamma + 1) * math.log(kappa)
        - log_a
    )

    # inner variable w = r v maps the (0, 1/r) range onto (0, 1)
    half_uk = 0.5 * u * u * kappa

    def logg(r, w):
        w = np.asarray(w, dtype=float)
        out = np.full(w.shape, -np.inf)
        pos = w > 0.0
        wp = w[pos]
        out[pos] = (
            q * np.log(wp)
            - (gamma + 2) * math.log(r)
            - half_uk * (wp / r) ** 2 * (1.0 - r * r)
        )
        return out

    res = integrate_iterated_2d(logg, 0.0, 1.0, lambda r: 1.0, tol,
                                log_form=True, log_offset=pref)
    return _as_probability(res)


def phase_limit(mode: PhaseMode, u: float, q: int, gamma: int,
                tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """d -> infinity limit of the intersection probability under a curvature schedule."""
    if mode.regime == "subcritical":
        return 1.0
    if mode.regime == "supercritical":
        return 0.0
    return critical_constant_rho(u, q, gamma, mode.kappa, tol)
