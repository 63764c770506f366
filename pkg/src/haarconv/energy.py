"""Particle resampling and the energy-distance permutation test."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, UnsupportedError

MIN_PARTICLES = 100


def rng_for(seed, *tags) -> np.random.Generator:
    """Generator keyed by ``(seed, *tags)``; independent streams per tag."""
    entropy = [0 if seed is None else int(seed) & 0xFFFFFFFFFFFFFFFF, *[int(t) for t in tags]]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def multinomial_indices(weights, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` i.i.d. draws from the categorical distribution ``weights``."""
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    return np.minimum(np.searchsorted(cdf, rng.random(n), side="right"), len(cdf) - 1)


def systematic_indices(weights, n: int, u: float) -> np.ndarray:
    """Systematic resampling with offset ``u`` in [0, 1)."""
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    positions = (u + np.arange(n)) / n
    return np.minimum(np.searchsorted(cdf, positions, side="right"), len(cdf) - 1)


def _pairwise(metric: str, X: np.ndarray) -> np.ndarray:
    if metric == "geodesic":
        gram = np.abs(X @ X.T)
        return 2.0 * np.arccos(np.clip(gram, 0.0, 1.0))
    if metric == "chordal":
        sq = np.sum(X * X, axis=1)
        d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
        return np.sqrt(np.maximum(d2, 0.0))
    raise ValueError(f"unknown metric {metric!r}")


def metric_for(carrier) -> str:
    return "geodesic" if getattr(carrier, "name", carrier) == "SO3" else "chordal"


@dataclass(frozen=True)
class EnergyTestResult:
    statistic: float
    p_value: float
    threshold: float
    passed: bool
    n_a: int
    n_b: int


def energy_distance_test(A, B, permutations: int = 199, level: float = 0.01, seed=0,
                         max_points: int = 1000) -> EnergyTestResult:
    """Two-sample energy-distance test between empirical measures.

    The statistic is ``2 E d(X,Y) - E d(X,X') - E d(Y,Y')`` with the geodesic
    angle on SO(3) and the chordal distance on S^2. Weighted or oversized
    ensembles are first reduced to at most ``max_points`` equally weighted
    particles per side by systematic resampling with a shared offset, so
    identical ensembles give identical subsamples. The test passes when the
    permutation p-value exceeds ``level``.
    """
    if A.carrier != B.carrier:
        raise DomainError(f"carrier mismatch: {A.carrier} vs {B.carrier}")
    if len(A) < MIN_PARTICLES or len(B) < MIN_PARTICLES:
        raise UnsupportedError(f"energy test needs at least {MIN_PARTICLES} particles per side")
    rng = rng_for(seed, 0xE7)
    u = rng.random()
    Xa = _reduce(A, max_points, u)
    Xb = _reduce(B, max_points, u)
    na, nb = len(Xa), len(Xb)
    D = _pairwise(metric_for(A.carrier), np.concatenate([Xa, Xb]))
    N = na + nb
    rowsum = D.sum(axis=1)
    total = rowsum.sum()

    def stat(labels):
        # labels: (N, P) indicator of side A
        aDa = np.einsum("ip,ip->p", labels, D @ labels)
        aDr = labels.T @ rowsum
        aDb = aDr - aDa
        bDb = total - 2 * aDr + aDa
        return 2 * aDb / (na * nb) - aDa / na**2 - bDb / nb**2

    if Xa.shape == Xb.shape and np.array_equal(Xa, Xb):
        obs = 0.0
    else:
        obs = float(2 * D[:na, na:].mean() - D[:na, :na].mean() - D[na:, na:].mean())
    perm_labels = np.zeros((N, permutations))
    for p in range(permutations):
        perm_labels[rng.permutation(N)[:na], p] = 1.0
    null = stat(perm_labels)
    p_value = (1 + np.count_nonzero(null >= obs - 1e-12 * max(1.0, abs(obs)))) / (permutations + 1)
    threshold = float(np.quantile(null, 1 - level))
    return EnergyTestResult(obs, float(p_value), threshold, bool(p_value > level), na, nb)


def _reduce(M, max_points: int, u: float) -> np.ndarray:
    w = M.weights
    n = len(w)
    uniform = np.allclose(w, 1.0 / n, rtol=0, atol=1e-15)
    if uniform and n <= max_points:
        return M.points
    m = min(n, max_points)
    return M.points[systematic_indices(w, m, u)]
