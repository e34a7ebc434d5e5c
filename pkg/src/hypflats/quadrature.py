"""Adaptive one- and two-dimensional quadrature with log-space integrands.

The base rule is a nested Gauss-Kronrod 7/15 pair with bisection of the
worst panel.  Panels that keep stagnating (typically because an endpoint
carries an integrable power singularity) are finished off with a
double-exponential (tanh-sinh) rule, whose node clustering absorbs such
singularities.  Integrands may be supplied in log form; panel sums are
then exponentiated with a per-panel max shift so that kernels which
underflow pointwise still integrate correctly.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import DomainError, QuadratureError
from .special import Curvature

__all__ = [
    "Tolerance",
    "QuadResult",
    "integrate_adaptive",
    "integrate_iterated_2d",
    "log_kernel",
    "DEFAULT_TOLERANCE",
]


@dataclass(frozen=True)
class Tolerance:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise DomainError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")

    def target(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


DEFAULT_TOLERANCE = Tolerance()


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    evaluations: int
    converged: bool

    def __post_init__(self):
        if self.error_estimate < 0:
            raise DomainError("error_estimate must be >= 0")


# Kronrod-15 abscissae on [-1, 1] and the nested Gauss-7 / Kronrod-15 weights.
_XK = np.array(
    [
        -0.991455371120813, -0.949107912342759, -0.864864423359769,
        -0.741531185599394, -0.586087235467691, -0.405845151377397,
        -0.207784955007898, 0.0, 0.207784955007898, 0.405845151377397,
        0.586087235467691, 0.741531185599394, 0.864864423359769,
        0.949107912342759, 0.991455371120813,
    ]
)
_WK = np.array(
    [
        0.022935322010529, 0.063092092629979, 0.104790010322250,
        0.140653259715525, 0.169004726639267, 0.190350578064785,
        0.204432940075298, 0.209482141084728, 0.204432940075298,
        0.190350578064785, 0.169004726639267, 0.140653259715525,
        0.104790010322250, 0.063092092629979, 0.022935322010529,
    ]
)
_WG = np.array(
    [
        0.0, 0.129484966168870, 0.0, 0.279705391489277, 0.0,
        0.381830050505119, 0.0, 0.417959183673469, 0.0,
        0.381830050505119, 0.0, 0.279705391489277, 0.0,
        0.129484966168870, 0.0,
    ]
)

# Bisection depth at which a panel touching an original endpoint is handed
# to tanh-sinh; interior panels get a larger budget before the hand-off.
_TS_ENDPOINT_DEPTH = 12
_TS_INTERIOR_DEPTH = 40
_TS_TMAX = 6.1
_TS_MAX_LEVEL = 11


def _gk_panel(f, a, b, log_form, log_offset):
    """One Gauss-Kronrod 7/15 evaluation on [a, b].

    Returns (value, error, n_evals).  In log form the 15 node values are
    exponentiated after subtracting their maximum, so panels whose values
    underflow in direct form are still summed accurately.
    """
    h = 0.5 * (b - a)
    x = 0.5 * (a + b) + h * _XK
    y = np.asarray(f(x), dtype=float)
    if log_form:
        m = float(np.max(y))
        if m == -math.inf:
            return 0.0, 0.0, 15
        if not math.isfinite(m):
            raise QuadratureError(f"non-finite log-integrand on [{a}, {b}]")
        scale = math.exp(min(m + log_offset, 709.0))
        vals = np.exp(y - m)
    else:
        if not np.all(np.isfinite(y)):
            raise QuadratureError(f"non-finite integrand value on [{a}, {b}]")
        scale = 1.0
        vals = y
    k15 = h * scale * float(_WK @ vals)
    g7 = h * scale * float(_WG @ vals)
    raw = abs(k15 - g7)
    # QUADPACK-style sharpening of the raw Gauss/Kronrod difference
    mean = float(_WK @ vals) / 2.0
    resasc = h * scale * float(_WK @ np.abs(vals - mean))
    if resasc > 0.0 and raw > 0.0:
        err = resasc * min(1.0, (200.0 * raw / resasc) ** 1.5)
    else:
        err = raw
    return k15, err, 15


def _tanh_sinh_panel(f, a, b, target, log_form, log_offset):
    """Double-exponential rule on [a, b], refined until |S_h - S_2h| <= target."""
    c = 0.5 * (a + b)
    hw = 0.5 * (b - a)
    if hw == 0.0:
        return 0.0, 0.0, 0
    evals = 0
    prev = None
    diff = math.inf
    value = 0.0
    for level in range(2, _TS_MAX_LEVEL + 1):
        h = 2.0 ** (-level)
        t = np.arange(-_TS_TMAX, _TS_TMAX + h, h)
        u = 0.5 * math.pi * np.sinh(t)
        x = c + hw * np.tanh(u)
        with np.errstate(over="ignore"):  # cosh overflow -> weight 0, dropped
            w = hw * h * 0.5 * math.pi * np.cosh(t) / np.cosh(u) ** 2
        keep = (x > a) & (x < b) & (w > 0.0)
        x, w = x[keep], w[keep]
        y = np.asarray(f(x), dtype=float)
        evals += x.size
        if log_form:
            logc = y + np.log(w)
            m = float(np.max(logc))
            if m == -math.inf:
                s = 0.0
            else:
                s = math.exp(min(m + log_offset, 709.0)) * float(
                    np.sum(np.exp(logc - m))
                )
        else:
            s = float(w @ y)
        if prev is not None:
            diff = abs(s - prev)
            value = s
            if diff <= target:
                break
        prev = s
        value = s
    err = diff if math.isfinite(diff) else abs(value)
    return value, err, evals


def _endpoint_tail_panel(f, a, b, at_left, target, log_form, log_offset):
    """Finish a panel with an integrable power singularity at one endpoint.

    Bisects geometrically toward the singular endpoint.  The slab integrals
    of a (x - endpoint)^(-alpha) singularity form a geometric series, so
    once the slab ratio stabilizes the remaining tail is summed in closed
    form.  This captures mass closer to the endpoint than machine epsilon,
    which no node-sampling rule can reach.
    """
    total = 0.0
    total_err = 0.0
    evals = 0
    prev = None
    est_prev = None
    tail = 0.0
    tail_err = math.inf
    lo, hi = a, b
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if at_left:
            s, e, n = _gk_panel(f, mid, hi, log_form, log_offset)
            lo, hi = lo, mid
        else:
            s, e, n = _gk_panel(f, lo, mid, log_form, log_offset)
            lo, hi = mid, hi
        total += s
        total_err += e
        evals += n
        if prev is not None and prev != 0.0:
            ratio = s / prev
            if 0.0 < ratio < 0.97:
                tail = s * ratio / (1.0 - ratio)
                est = total + tail
                if est_prev is not None:
                    tail_err = abs(est - est_prev)
                    if tail_err <= target:
                        return est, tail_err + total_err, evals
                est_prev = est
        prev = s
    return total + tail, (tail_err if math.isfinite(tail_err) else abs(tail)) + total_err, evals


def integrate_adaptive(f, a, b, tol: Tolerance = DEFAULT_TOLERANCE, *,
                       log_form=False, log_offset=0.0, break_points=()):
    """Adaptively integrate f over [a, b].

    f must accept a 1-d NumPy array of interior nodes and return the
    (log-)values elementwise; endpoints are never evaluated.  break_points
    are interior abscissae (e.g. kinks) used as initial panel boundaries.

    Raises QuadratureError with the partial result attached when the
    subdivision budget is exhausted.
    """
    if not (math.isfinite(a) and math.isfinite(b)) or a > b:
        raise DomainError(f"invalid interval [{a}, {b}]")

    pts = sorted({a, b, *(p for p in break_points if a < p < b)})
    heap = []
    counter = 0
    evals = 0
    final_value = 0.0  # panels finished by tanh-sinh
    final_err = 0.0
    total = 0.0
    total_err = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        v, e, n = _gk_panel(f, lo, hi, log_form, log_offset)
        heapq.heappush(heap, (-e, counter, lo, hi, v, e, 0))
        counter += 1
        evals += n
        total += v
        total_err += e
    nsub = len(heap)

    def _result(converged):
        # re-sum in deterministic order to shed accumulated cancellation
        value = final_value + math.fsum(item[4] for item in heap)
        err = final_err + math.fsum(item[5] for item in heap)
        return QuadResult(value, err, evals, converged)

    while True:
        if total_err + final_err <= tol.target(total + final_value):
            return _result(True)
        if not heap:
            res = _result(False)
            raise QuadratureError(
                "tanh-sinh fallback exhausted without convergence", partial=res
            )
        if nsub >= tol.max_subdivisions:
            res = _result(False)
            raise QuadratureError(
                f"exceeded {tol.max_subdivisions} subdivisions", partial=res
            )
        _, _, lo, hi, v, e, depth = heapq.heappop(heap)
        total -= v
        total_err -= e
        at_end = lo == a or hi == b
        if (depth >= _TS_ENDPOINT_DEPTH and at_end) or depth >= _TS_INTERIOR_DEPTH:
            target = 0.25 * tol.target(total + final_value + v)
            if at_end and not (lo == a and hi == b):
                tv, te, n = _endpoint_tail_panel(
                    f, lo, hi, lo == a, target, log_form, log_offset
                )
            else:
                tv, te, n = _tanh_sinh_panel(f, lo, hi, target, log_form, log_offset)
            evals += n
            final_value += tv
            final_err += te
            continue
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # interval no longer splittable in doubles
            final_value += v
            final_err += e
            continue
        for plo, phi in ((lo, mid), (mid, hi)):
            pv, pe, n = _gk_panel(f, plo, phi, log_form, log_offset)
            heapq.heappush(heap, (-pe, counter, plo, phi, pv, pe, depth + 1))
            counter += 1
            evals += n
            total += pv
            total_err += pe
        nsub += 1


def integrate_iterated_2d(g, a, b, inner_upper, tol: Tolerance = DEFAULT_TOLERANCE, *,
                          log_form=False, log_offset=0.0, outer_break_points=(),
                          inner_break_points=None):
    """Iterated integral of g(r, z) over r in [a, b], z in [0, inner_upper(r)].

    The inner integral runs at tolerance tol/50 so the iterated error stays
    dominated by the outer rule.  inner_break_points, if given, maps r to a
    sequence of interior inner abscissae.
    """
    inner_tol = Tolerance(
        rel_tol=tol.rel_tol / 50.0,
        abs_tol=tol.abs_tol / 50.0,
        max_subdivisions=tol.max_subdivisions,
    )
    inner_evals = 0
    inner_err_max = 0.0

    def outer_f(rs):
        nonlocal inner_evals, inner_err_max
        out = np.empty(rs.shape)
        for i, r in enumerate(rs):
            zu = inner_upper(r)
            if zu <= 0.0:
                out[i] = 0.0
                continue
            bp = inner_break_points(r) if inner_break_points is not None else ()
            try:
                res = integrate_adaptive(
                    lambda z: g(r, z), 0.0, zu, inner_tol,
                    log_form=log_form, log_offset=log_offset, break_points=bp,
                )
            except QuadratureError as exc:
                raise QuadratureError(
                    f"inner integral failed at r={r}: {exc}", partial=exc.partial
                ) from exc
            inner_evals += res.evaluations
            inner_err_max = max(inner_err_max, res.error_estimate)
            out[i] = res.value
        return out

    outer = integrate_adaptive(
        outer_f, a, b, tol, break_points=outer_break_points
    )
    return QuadResult(
        outer.value,
        outer.error_estimate + inner_err_max * (b - a),
        outer.evaluations + inner_evals,
        outer.converged,
    )


def log_kernel(d: int, q: int, K: Curvature, r: float, z):
    """Log of the radial-angular integrand z^q (1-z^2)^((d-q)/2-1) (1+K r^2 z^2)^(-(d+1)/2).

    Accepts a scalar or array z with 0 <= z < 1 (z = 0 maps to -inf for
    q >= 1); requires r z inside the Klein ball when K < 0.
    """
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any((z_arr < 0.0) | (z_arr >= 1.0)):
        raise DomainError("need 0 <= z < 1")
    if r < 0.0:
        raise DomainError("need r >= 0")
    if K.K < 0.0 and r * float(np.max(z_arr, initial=0.0)) >= K.ball_radius:
        raise DomainError("r z must lie inside the open Klein ball")
    out = _backend.log_kernel(float(d), float(q), K.K, float(r), z_arr)
    return float(out[0]) if np.isscalar(z) or np.asarray(z).ndim == 0 else out
