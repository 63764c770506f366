"""One-parameter convolution semigroups and their structural checks.

A *family* is any object with a ``carrier`` and either an ``at(t)`` method
returning a :class:`DenseMeasure` (exact families) or a ``sample(t, n, seed)``
method returning an :class:`EmpiricalMeasure` (Monte Carlo families).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from . import so3
from .energy import energy_distance_test, multinomial_indices, rng_for
from .exceptions import DomainError, InvarianceError, PreconditionError, StructureError
from .groups import FiniteGroup, Subgroup
from .homogeneous import FiniteHomogeneousSpace, SphereSpace
from .measures import (
    DENSE_TOL,
    DenseMeasure,
    convolve,
    haar_dense,
    identity_measure,
    is_invariant,
    lift_measure,
    project_measure,
    tv_distance,
)

POISSON_TAIL = 1e-14
SEMIGROUP_TOL = 1e-10
DEFAULT_GRID = tuple(k / 10 for k in range(21))


def parse_grid(spec: str) -> tuple:
    """``"start:stop:step"`` (stop inclusive) or a comma list of times."""
    if ":" in spec:
        start, stop, step = (float(v) for v in spec.split(":"))
        if step <= 0:
            raise ValueError("grid step must be positive")
        if stop < start:
            raise ValueError("grid stop precedes start")
        count = int(round((stop - start) / step))
        grid = tuple(round(start + k * step, 12) for k in range(count + 1))
    else:
        grid = tuple(float(v) for v in spec.split(",") if v.strip())
    if not grid or min(grid) < 0:
        raise ValueError("grid times must be nonnegative and at least one is needed")
    return grid


def _is_dense_family(family) -> bool:
    return hasattr(family, "at")


# ---------------------------------------------------------------------------
# families

class CompoundPoissonSemigroup:
    """``mu_t = mu_0 * exp(-t rate) sum_n (t rate)^n / n! jump^{*n}`` on a finite carrier.

    ``initial`` must be idempotent and commute with ``jump``; on a coset
    space the jump must also be K-invariant. Both are checked here so that
    every constructed family is a genuine semigroup.
    """

    def __init__(self, carrier, rate: float, jump: DenseMeasure, initial: DenseMeasure | None = None):
        if rate < 0:
            raise ValueError("rate must be nonnegative")
        if jump.carrier != carrier:
            raise DomainError("jump measure lives on a different carrier")
        initial = initial if initial is not None else identity_measure(carrier)
        if initial.carrier != carrier:
            raise DomainError("initial measure lives on a different carrier")
        dev = tv_distance(convolve(initial, initial), initial)
        if dev > DENSE_TOL:
            raise StructureError(f"initial measure is not idempotent (deviation {dev:.3e})")
        if isinstance(carrier, FiniteHomogeneousSpace):
            report = is_invariant(jump, "action")
            if not report.ok:
                raise InvarianceError("jump on a coset space must be K-invariant", report.deviation)
        dev = tv_distance(convolve(initial, jump), convolve(jump, initial))
        if dev > DENSE_TOL:
            raise StructureError(f"jump does not commute with the initial measure (deviation {dev:.3e})")
        self.carrier = carrier
        self.rate = float(rate)
        self.jump = jump
        self.initial = initial
        self._powers = [identity_measure(carrier).weights]

    def __repr__(self):
        return f"CompoundPoissonSemigroup({self.carrier.name}, rate={self.rate})"

    def _power(self, n: int) -> np.ndarray:
        while len(self._powers) <= n:
            prev = DenseMeasure(self.carrier, self._powers[-1])
            self._powers.append(convolve(prev, self.jump).weights)
        return self._powers[n]

    def terms(self, t: float) -> int:
        """Number of series terms N + 1 with Poisson tail mass below 1e-14."""
        lam = self.rate * t
        if lam == 0:
            return 1
        N = int(np.ceil(lam))
        while stats.poisson.sf(N, lam) >= POISSON_TAIL:
            N += 1
        return N + 1

    @functools.lru_cache(maxsize=512)
    def at(self, t: float) -> DenseMeasure:
        if t < 0:
            raise ValueError("t must be nonnegative")
        lam = self.rate * t
        n_terms = self.terms(t)
        coeffs = stats.poisson.pmf(np.arange(n_terms), lam)
        w = sum(c * self._power(n) for n, c in enumerate(coeffs))
        series = DenseMeasure(self.carrier, w)  # renormalises away the dropped tail
        return convolve(self.initial, series)

    def with_rate(self, rate: float) -> "CompoundPoissonSemigroup":
        return CompoundPoissonSemigroup(self.carrier, rate, self.jump, self.initial)

    def to_json(self) -> dict:
        return {"carrier": self.carrier.name, "rate": self.rate,
                "jump": self.jump.weights.tolist(), "initial": self.initial.weights.tolist()}


def cp_measure_at(sg: CompoundPoissonSemigroup, t: float) -> DenseMeasure:
    """The compound Poisson measure at time ``t``, exact up to a 1e-14 tail."""
    return sg.at(t)


class TabulatedFamily:
    """A dense family given by explicit measures at listed times."""

    def __init__(self, carrier, table: Mapping[float, DenseMeasure]):
        self.carrier = carrier
        self.table = {round(float(t), 12): m for t, m in table.items()}

    def at(self, t: float) -> DenseMeasure:
        try:
            return self.table[round(float(t), 12)]
        except KeyError:
            raise KeyError(f"time {t} not tabulated") from None

    @classmethod
    def from_family(cls, family, times) -> "TabulatedFamily":
        return cls(family.carrier, {t: family.at(t) for t in times})

    def replaced(self, t: float, measure: DenseMeasure) -> "TabulatedFamily":
        table = dict(self.table)
        table[round(float(t), 12)] = measure
        return TabulatedFamily(self.carrier, table)


class ProjectedFamily:
    """``nu_t = pi(mu_t)`` for an exact family on G."""

    def __init__(self, base, space):
        self.base = base
        self.space = space
        self.carrier = space

    def at(self, t: float) -> DenseMeasure:
        return project_measure(self.base.at(t), self.space)


class SampledProjectedFamily:
    """``nu_t = pi(mu_t)`` for a sampled family on SO(3)."""

    def __init__(self, base, space):
        self.base = base
        self.space = space
        self.carrier = space

    def sample(self, t: float, n: int, seed=None):
        return project_measure(self.base.sample(t, n, seed), self.space)


class LiftedFamily:
    """``mu_t = lift(nu_t)``: the K-right invariant family above a family on G/K."""

    def __init__(self, base, space, report=None):
        self.base = base
        self.space = space
        self.carrier = space.G
        self.report = report or []

    def at(self, t: float) -> DenseMeasure:
        return lift_measure(self.base.at(t))


# ---------------------------------------------------------------------------
# checks

@dataclass(frozen=True)
class CheckRow:
    """One line of a verification report."""

    test: str
    t: float
    s: float
    deviation: float
    tol: float
    passed: bool


def semigroup_check(family, s: float, t: float, tol: float = SEMIGROUP_TOL, *, particles: int = 10_000,
                    seed=0, level: float = 0.01, **test_kwargs) -> CheckRow:
    """Compare ``mu_s * mu_t`` with ``mu_{s+t}``.

    Exact families report the TV deviation against ``tol``; sampled families
    run the energy test at ``level`` and report its statistic.
    """
    if s < 0 or t < 0:
        raise ValueError("times must be nonnegative")
    if _is_dense_family(family):
        dev = tv_distance(convolve(family.at(s), family.at(t)), family.at(s + t))
        return CheckRow("semigroup", t, s, dev, tol, dev <= tol)
    a = family.sample(s, particles, seed=int(rng_for(seed, 11).integers(2**62)))
    b = family.sample(t, particles, seed=int(rng_for(seed, 12).integers(2**62)))
    c = family.sample(s + t, particles, seed=int(rng_for(seed, 13).integers(2**62)))
    ab = convolve(a, b, particles=particles, seed=int(rng_for(seed, 14).integers(2**62)))
    res = energy_distance_test(ab, c, level=level, seed=seed, **test_kwargs)
    return CheckRow("semigroup", t, s, res.statistic, level, res.passed)


def semigroup_grid_check(family, grid: Sequence[float] = DEFAULT_GRID, tol: float = SEMIGROUP_TOL,
                         include_zero: bool = True) -> list[CheckRow]:
    times = [g for g in grid if include_zero or g > 0]
    return [semigroup_check(family, s, t, tol) for s in times for t in times]


def continuity_check(family, t: float = 1e-6, tol: float = 1e-6) -> CheckRow:
    """TV distance between ``mu_t`` and ``mu_0`` at a small time."""
    dev = tv_distance(family.at(t), family.at(0.0))
    return CheckRow("continuity", t, 0.0, dev, tol, dev <= tol)


@dataclass
class DecompositionReport:
    H: Subgroup | None
    rows: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def max_deviation(self) -> float:
        return max((r.deviation for r in self.rows), default=0.0)


def idempotent_subgroup(mu: DenseMeasure, tol: float = DENSE_TOL) -> Subgroup:
    """Subgroup H with ``mu == rho_H``; raises :class:`StructureError` otherwise."""
    G = mu.carrier
    supp = mu.support(tol)
    try:
        H = Subgroup(G, tuple(supp.tolist()))
    except ValueError as exc:
        raise StructureError(f"support of the measure is not a subgroup: {exc}") from None
    dev = tv_distance(mu, haar_dense(H))
    if dev > tol:
        raise StructureError(f"measure is not uniform on its support subgroup (deviation {dev:.3e})")
    return H


def decompose_semigroup(family, grid: Sequence[float] = DEFAULT_GRID, tol: float = DENSE_TOL) -> DecompositionReport:
    """Recover H from ``mu_0 = rho_H`` and check the decomposition consequences.

    For every grid time, ``mu_t`` must be H-bi-invariant and absorb ``rho_H``
    on both sides. The factor with identity initial measure is not
    constructed; it is not unique.
    """
    if not isinstance(family.carrier, FiniteGroup):
        raise DomainError("decompose_semigroup expects a dense family on a finite group")
    mu0 = family.at(0.0)
    H = idempotent_subgroup(mu0, tol)
    rho = haar_dense(H)
    report = DecompositionReport(H)
    report.rows.append(CheckRow("initial-is-haar", 0.0, 0.0, tv_distance(mu0, rho), tol, True))
    for t in grid:
        mt = family.at(t)
        inv = is_invariant(mt, "bi", H, tol)
        report.rows.append(CheckRow("bi-invariance", t, 0.0, inv.deviation, tol, inv.ok))
        d_left = tv_distance(convolve(rho, mt), mt)
        d_right = tv_distance(convolve(mt, rho), mt)
        report.rows.append(CheckRow("left-absorption", t, 0.0, d_left, tol, d_left <= tol))
        report.rows.append(CheckRow("right-absorption", t, 0.0, d_right, tol, d_right <= tol))
    return report


def decompose_homogeneous(family, grid: Sequence[float] = DEFAULT_GRID, tol: float = DENSE_TOL) -> DecompositionReport:
    """Coset-space analogue: ``nu_0 = pi(rho_H)`` with H containing K.

    Checks that every ``nu_t`` is H-invariant under the action on G/K and that
    ``nu_0 * nu_t = nu_t * nu_0 = nu_t``.
    """
    X = family.carrier
    if not isinstance(X, FiniteHomogeneousSpace):
        raise DomainError("decompose_homogeneous expects a dense family on a finite coset space")
    nu0 = family.at(0.0)
    H = idempotent_subgroup(lift_measure(nu0), tol)
    if not set(X.K.members) <= set(H.members):
        raise StructureError("recovered subgroup does not contain K")
    report = DecompositionReport(H)
    for t in grid:
        nt = family.at(t)
        inv = is_invariant(nt, "action", H, tol)
        report.rows.append(CheckRow("H-invariance", t, 0.0, inv.deviation, tol, inv.ok))
        d_left = tv_distance(convolve(nu0, nt), nt)
        d_right = tv_distance(convolve(nt, nu0), nt)
        report.rows.append(CheckRow("left-absorption", t, 0.0, d_left, tol, d_left <= tol))
        report.rows.append(CheckRow("right-absorption", t, 0.0, d_right, tol, d_right <= tol))
    return report


def project_semigroup(family, space, grid: Sequence[float] = DEFAULT_GRID, tol: float = SEMIGROUP_TOL,
                      *, particles: int = 10_000, seed=0, level: float = 0.01):
    """Family ``nu_t = pi(mu_t)`` on ``space`` for a K-conjugate invariant family on G.

    Dense families are checked for K-conjugate invariance exactly at each
    grid time. Sampled families either declare ``conjugate_invariant`` or are
    checked with the energy test.
    """
    if _is_dense_family(family):
        if not isinstance(space, FiniteHomogeneousSpace) or space.G != family.carrier:
            raise DomainError("space must be a coset space of the family's group")
        for t in grid:
            rep = is_invariant(family.at(t), "conjugate", space.K, tol)
            if not rep.ok:
                raise PreconditionError(f"mu_{t} is not K-conjugate invariant", rep.deviation)
        return ProjectedFamily(family, space)
    if not isinstance(space, SphereSpace):
        raise DomainError("sampled families project onto S2")
    if not getattr(family, "conjugate_invariant", False):
        for i, t in enumerate(g for g in grid if g > 0):
            rep = is_invariant(family.sample(t, particles, seed=i), "conjugate", seed=seed, level=level)
            if not rep.ok:
                raise PreconditionError(f"mu_{t} is not K-conjugate invariant", rep.deviation)
    return SampledProjectedFamily(family, space)


def lift_semigroup(family, grid: Sequence[float] = DEFAULT_GRID, tol: float = SEMIGROUP_TOL) -> LiftedFamily:
    """Lift a semigroup on G/K to the K-bi-invariant semigroup above it.

    The input must satisfy the semigroup law on all grid pairs. The returned
    family carries a ``report`` with K-invariance of each ``nu_t``,
    K-bi-invariance of each lift, and the semigroup law of the lifted family.
    """
    X = family.carrier
    if not isinstance(X, FiniteHomogeneousSpace):
        raise DomainError("lift_semigroup expects a dense family on a finite coset space")
    for row in semigroup_grid_check(family, grid, tol):
        if not row.passed:
            raise PreconditionError(f"input fails the semigroup law at (s={row.s}, t={row.t})", row.deviation)
    lifted = LiftedFamily(family, X)
    rows = []
    for t in grid:
        inv = is_invariant(family.at(t), "action", X.K, DENSE_TOL)
        rows.append(CheckRow("K-invariance", t, 0.0, inv.deviation, DENSE_TOL, inv.ok))
        bi = is_invariant(lifted.at(t), "bi", X.K, DENSE_TOL)
        rows.append(CheckRow("K-bi-invariance", t, 0.0, bi.deviation, DENSE_TOL, bi.ok))
    rows.extend(semigroup_grid_check(lifted, grid, tol))
    lifted.report = rows
    return lifted


# ---------------------------------------------------------------------------
# Markov skeletons

@dataclass(frozen=True)
class SkeletonPath:
    times: tuple
    elements: np.ndarray  # (n_paths, len(times)) indices, or (n_paths, len(times), 4) quaternions
    points: np.ndarray | None = None


def markov_skeleton(family, times: Sequence[float], start=None, seed=0, *, n_paths: int = 1,
                    space=None) -> SkeletonPath:
    """Sample ``g_{t_{i+1}} = g_{t_i} h_i`` with independent ``h_i ~ mu_{t_{i+1} - t_i}``.

    ``family`` must have identity initial measure. With ``space`` the path is
    also projected, ``x_t = pi(g_t)``.
    """
    times = tuple(float(t) for t in times)
    if len(times) < 1 or any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("times must be strictly increasing")
    G = family.carrier
    if _is_dense_family(family):
        start = G.identity if start is None else G.index_of(start)
        path = np.empty((n_paths, len(times)), dtype=np.int64)
        path[:, 0] = start
        for i, (a, b) in enumerate(zip(times, times[1:])):
            h = multinomial_indices(family.at(b - a).weights, n_paths, rng_for(seed, 21, i))
            path[:, i + 1] = G.table[path[:, i], h]
        points = space.coset_of[path] if space is not None else None
        return SkeletonPath(times, path, points)
    q0 = np.array([1.0, 0, 0, 0]) if start is None else np.asarray(getattr(start, "q", start), dtype=float)
    path = np.empty((n_paths, len(times), 4))
    path[:, 0] = q0
    for i, (a, b) in enumerate(zip(times, times[1:])):
        h = family.sample(b - a, n_paths, seed=int(rng_for(seed, 22, i).integers(2**62))).points
        path[:, i + 1] = so3.normalize(so3.qmul(path[:, i], h))
    points = space.project(path) if space is not None else None
    return SkeletonPath(times, path, points)


# ---------------------------------------------------------------------------
# idempotents

def find_idempotent(mu: DenseMeasure, tol: float = 1e-14, max_iter: int = 200) -> DenseMeasure:
    """Fixed point of repeated squaring of the lazy measure ``(delta_e + mu)/2``."""
    G = mu.carrier
    lazy = DenseMeasure(G, 0.5 * (identity_measure(G).weights + mu.weights))
    for _ in range(max_iter):
        nxt = convolve(lazy, lazy)
        if tv_distance(nxt, lazy) <= tol:
            return nxt
        lazy = nxt
    return lazy
