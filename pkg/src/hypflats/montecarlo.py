"""Monte Carlo sampler for the two random flats and the distance law.

Randomness is counter-based: trial i of a run with seed s uses its own
Philox stream keyed by (s, i), so results are bit-identical for any thread
count and a run over [0, N) equals the concatenation of [0, N/2) and
[N/2, N).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError
from .klein import AffineFlat, intersect_with_central_subspace
from .linalg import Basis
from .special import Curvature, FlatConfig, klein_radius

__all__ = [
    "SimEstimate",
    "DistributionSummary",
    "sample_central_subspace",
    "sample_hitting_flat",
    "HittingFlatSampler",
    "estimate_intersection_probability",
    "simulate_distance_distribution",
    "ks_statistic",
]

_TRIAL_CHUNK = 2048
_INVERSE_CDF_POINTS = 1024


@dataclass(frozen=True)
class SimEstimate:
    trials: int
    hits: int
    p_hat: float
    std_err: float
    seed: int

    @classmethod
    def from_counts(cls, trials, hits, seed):
        p = hits / trials
        return cls(trials, hits, p, math.sqrt(p * (1.0 - p) / trials), seed)


@dataclass(frozen=True)
class DistributionSummary:
    """Empirical distance law: sorted finite distances plus the miss count."""

    finite_samples: np.ndarray
    empty_count: int
    trials: int
    seed: int

    def __post_init__(self):
        if len(self.finite_samples) + self.empty_count != self.trials:
            raise DomainError("sample count and empty count must sum to trials")


def _check_seed(seed):
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise DomainError("seed must be an unsigned 64-bit integer")
    return seed


def _trial_rng(seed, index):
    key = np.array([seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_central_subspace(d: int, q: int, rng) -> Basis:
    """Haar-distributed q-dimensional subspace of R^d.

    QR of a Gaussian matrix with the R-diagonal signs fixed; degenerate
    draws (never seen in practice) are silently resampled.
    """
    if not 1 <= q <= d - 1:
        raise DomainError(f"need 1 <= q <= d-1, got q={q}, d={d}")
    while True:
        A = rng.standard_normal((d, q))
        Q, R = np.linalg.qr(A)
        diag = np.diagonal(R)
        if np.min(np.abs(diag)) <= 1e-10 * np.max(np.abs(diag)):
            continue
        return Basis(Q * np.sign(diag))


class HittingFlatSampler:
    """Samples flats of dimension d - q + gamma conditioned to hit the ball.

    The normal space is Haar, the offset direction uniform on its unit
    sphere, and the offset radius follows the invariant-measure density
    r^(m-1) (1 + K r^2)^(-(d+1)/2) on [0, R(u)], m = q - gamma.  Radii come
    from rejection against the r^(m-1) envelope (the density ratio is
    maximal at r = R(u), where acceptance is exactly 1); when the a priori
    acceptance rate falls below 5% the sampler switches to inverse-CDF
    lookup from a tabulated quadrature of the radial density.  The switch
    depends only on (cfg, K), keeping runs deterministic.

    proposals/accepted count rejection traffic for diagnostics; under
    threads they are best-effort.
    """

    def __init__(self, cfg: FlatConfig, K: Curvature,
                 inverse_threshold: float = 0.05):
        K.require_hyperbolic()
        self.cfg = cfg
        self.K = K
        self.m = cfg.q - cfg.gamma
        self.R = klein_radius(K, cfg.u)
        self.log_ratio_at_R = math.log1p(K.K * self.R * self.R)
        self.proposals = 0
        self.accepted = 0
        rate = self._acceptance_rate_estimate()
        self.mode = "rejection" if rate >= inverse_threshold else "inverse"
        self._inv_cdf = self._build_inverse_cdf() if self.mode == "inverse" else None

    def _log_accept(self, r):
        # target/envelope ratio, normalized to 1 at r = R
        return -0.5 * (self.cfg.d + 1) * (
            np.log1p(self.K.K * r * r) - self.log_ratio_at_R
        )

    def _acceptance_rate_estimate(self):
        r = np.linspace(0.0, self.R, 8193)[1:]
        pdf = self.m * r ** (self.m - 1) / self.R**self.m
        return float(np.trapezoid(pdf * np.exp(self._log_accept(r)), r))

    def _build_inverse_cdf(self):
        r = np.linspace(0.0, self.R, _INVERSE_CDF_POINTS + 1)
        logd = np.full(r.shape, -np.inf)
        logd[1:] = (self.m - 1) * np.log(r[1:]) - 0.5 * (self.cfg.d + 1) * np.log1p(
            self.K.K * r[1:] ** 2
        )
        w = np.exp(logd - np.max(logd))
        cdf = np.concatenate(([0.0], np.cumsum(0.5 * (w[1:] + w[:-1]) * np.diff(r))))
        cdf /= cdf[-1]
        keep = np.concatenate(([True], np.diff(cdf) > 0))
        return PchipInterpolator(cdf[keep], r[keep])

    def _sample_radius(self, rng):
        if self.mode == "inverse":
            return float(self._inv_cdf(rng.random()))
        while True:
            self.proposals += 1
            r = self.R * rng.random() ** (1.0 / self.m)
            if math.log(rng.random()) < self._log_accept(r):
                self.accepted += 1
                return r

    def sample(self, rng) -> AffineFlat:
        W = sample_central_subspace(self.cfg.d, self.m, rng)
        r = self._sample_radius(rng)
        g = rng.standard_normal(self.m)
        direction = W.columns @ (g / np.linalg.norm(g))
        return AffineFlat(W, r * direction)


@lru_cache(maxsize=32)
def _get_sampler(cfg: FlatConfig, K: Curvature) -> HittingFlatSampler:
    return HittingFlatSampler(cfg, K)


def sample_hitting_flat(cfg: FlatConfig, K: Curvature, rng) -> AffineFlat:
    """One flat from the ball-hitting invariant law (see HittingFlatSampler)."""
    return _get_sampler(cfg, K).sample(rng)


def _run_trials(cfg, K, trials, seed, threads=None):
    """Hyperbolic intersection distance per trial; +inf marks a miss."""
    if trials < 1:
        raise DomainError("need trials >= 1")
    seed = _check_seed(seed)
    sampler = _get_sampler(cfg, K)

    def run_chunk(bounds):
        lo, hi = bounds
        out = np.empty(hi - lo)
        for i in range(lo, hi):
            rng = _trial_rng(seed, i)
            L = sample_central_subspace(cfg.d, cfg.q, rng)
            E = sampler.sample(rng)
            hit = intersect_with_central_subspace(E, L, K)
            out[i - lo] = hit.hyper_dist if hit.meets else math.inf
        return out

    chunks = [(lo, min(lo + _TRIAL_CHUNK, trials))
              for lo in range(0, trials, _TRIAL_CHUNK)]
    if threads is not None and threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run_chunk, chunks))
    else:
        parts = [run_chunk(c) for c in chunks]
    return np.concatenate(parts)


def estimate_intersection_probability(cfg: FlatConfig, K: Curvature,
                                      trials: int, seed: int,
                                      threads: int | None = None) -> SimEstimate:
    """Binomial estimate of the intersection probability."""
    distances = _run_trials(cfg, K, trials, seed, threads)
    hits = int(np.count_nonzero(np.isfinite(distances)))
    return SimEstimate.from_counts(trials, hits, _check_seed(seed))


def simulate_distance_distribution(cfg: FlatConfig, K: Curvature,
                                   trials: int, seed: int,
                                   threads: int | None = None) -> DistributionSummary:
    """Empirical law of the intersection distance (misses counted separately)."""
    distances = _run_trials(cfg, K, trials, seed, threads)
    finite = np.sort(distances[np.isfinite(distances)])
    return DistributionSummary(finite, int(distances.size - finite.size),
                               int(trials), _check_seed(seed))


def ks_statistic(samples, cdf_values) -> float:
    """One-sample Kolmogorov-Smirnov statistic.

    cdf_values must be the model CDF evaluated at the sorted samples.
    """
    F = np.asarray(cdf_values, dtype=float)
    n = F.size
    if n == 0:
        raise DomainError("need at least one sample")
    if np.any(np.diff(np.asarray(samples, dtype=float)) < 0):
        raise DomainError("samples must be sorted ascending")
    steps = np.arange(1, n + 1) / n
    return float(max(np.max(steps - F), np.max(F - (steps - 1.0 / n))))
