"""Convolution roots and certified embeddings into convolution semigroups.

Embedding is certified only on instances that can be constructed: compound
Poisson families on a finite group, and families on G/K obtained by lifting a
target to G, embedding there with a supplied compound Poisson hint, and
projecting back.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import DomainError, UnsupportedError
from .groups import FiniteGroup
from .homogeneous import FiniteHomogeneousSpace
from .measures import (
    DENSE_TOL,
    DenseMeasure,
    convolve_power,
    identity_measure,
    is_invariant,
    lift_measure,
    tv_distance,
)
from .semigroup import (
    DEFAULT_GRID,
    SEMIGROUP_TOL,
    CheckRow,
    CompoundPoissonSemigroup,
    ProjectedFamily,
    semigroup_grid_check,
)

DFT_MAX_ORDER = 8
DFT_MAX_ROOT = 4
CLIP_TOL = 1e-12


@dataclass(frozen=True)
class RootCheck:
    passed: bool
    deviation: float


def verify_root(mu: DenseMeasure, nu: DenseMeasure, n: int, tol: float = SEMIGROUP_TOL) -> RootCheck:
    """Is ``nu`` an ``n``-th convolution root of ``mu``?"""
    if n < 1:
        raise ValueError("n must be at least 1")
    dev = tv_distance(convolve_power(nu, n), mu)
    return RootCheck(dev <= tol, dev)


def cp_root(sg: CompoundPoissonSemigroup, n: int) -> DenseMeasure:
    """Canonical ``n``-th root of ``sg.at(1)``: the same jump law at rate/n."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if tv_distance(sg.initial, identity_measure(sg.carrier)) > 0:
        raise UnsupportedError("cp_root needs a family started at the identity")
    return sg.with_rate(sg.rate / n).at(1.0)


@dataclass
class RootMap:
    """A choice of ``n``-th roots ``r(n)`` of ``base``."""

    base: DenseMeasure
    entries: dict = field(default_factory=dict)

    @classmethod
    def from_compound_poisson(cls, sg: CompoundPoissonSemigroup, ns: Sequence[int]) -> "RootMap":
        return cls(sg.at(1.0), {n: cp_root(sg, n) for n in ns})

    def __getitem__(self, n: int) -> DenseMeasure:
        return self.entries[n]

    def __setitem__(self, n: int, root: DenseMeasure):
        self.entries[n] = root

    def check(self, tol: float = SEMIGROUP_TOL) -> dict:
        return {n: verify_root(self.base, r, n, tol) for n, r in self.entries.items()}


@dataclass
class DFTRootResult:
    """Outcome of the branch search; ``root`` is None when none qualified."""

    root: DenseMeasure | None
    branch: tuple | None
    branches_tried: int
    branches_total: int
    deviation: float = float("nan")
    roots: list = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.root is not None


def _is_standard_cyclic(G: FiniteGroup) -> bool:
    idx = np.arange(G.order)
    return np.array_equal(G.table, (idx[:, None] + idx[None, :]) % G.order)


def nth_root_abelian_dft(mu: DenseMeasure, n: int, *, tol: float = 1e-8, all_roots: bool = False) -> DFTRootResult:
    """Search ``n``-th roots of a measure on Z_m through its Fourier coefficients.

    Every coefficient has ``n`` complex ``n``-th roots; branch tuples are
    enumerated lexicographically with the principal branch (index 0) first.
    A candidate is kept when its inverse transform is real, has no weight
    below -1e-12 (small negatives are clipped) and passes ``verify_root`` at
    ``tol``. With ``all_roots`` every distinct qualifying root is collected.
    Limited to m <= 8 and n <= 4.
    """
    G = mu.carrier
    if not isinstance(G, FiniteGroup) or not _is_standard_cyclic(G):
        raise UnsupportedError("DFT roots need a measure on a built-in cyclic group Z_m")
    m = G.order
    if m > DFT_MAX_ORDER or n > DFT_MAX_ROOT or n < 1:
        raise UnsupportedError(f"DFT root search supports m <= {DFT_MAX_ORDER}, 1 <= n <= {DFT_MAX_ROOT}")
    coeffs = np.fft.fft(mu.weights)
    principal = np.abs(coeffs) ** (1.0 / n) * np.exp(1j * np.angle(coeffs) / n)
    rotations = np.exp(2j * np.pi * np.arange(n) / n)
    total = n ** m
    result = DFTRootResult(None, None, 0, total)
    for branch in itertools.product(range(n), repeat=m):
        result.branches_tried += 1
        cand = np.fft.ifft(principal * rotations[list(branch)])
        if np.abs(cand.imag).max() > 1e-9:
            continue
        w = cand.real
        if w.min() < -CLIP_TOL:
            continue
        nu = DenseMeasure(G, np.clip(w, 0.0, None))
        check = verify_root(mu, nu, n, tol)
        if not check.passed:
            continue
        if result.root is None:
            result.root, result.branch, result.deviation = nu, branch, check.deviation
            if not all_roots:
                break
        # branches differing only at zero coefficients give the same measure
        if all(tv_distance(nu, r) > tol for r in result.roots):
            result.roots.append(nu)
    return result


# ---------------------------------------------------------------------------
# embedding certificates

@dataclass
class EmbeddingCertificate:
    """Evidence that ``target`` is the time-one measure of a convolution semigroup."""

    target: DenseMeasure
    family: object
    rows: list = field(default_factory=list)
    invariance: list = field(default_factory=list)
    reason: str = ""
    lifted_family: object = None
    space: object = None

    @property
    def passed(self) -> bool:
        return not self.reason and all(r.passed for r in self.rows + self.invariance)

    @property
    def max_deviation(self) -> float:
        return max((r.deviation for r in self.rows), default=0.0)

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "reason": self.reason,
            "carrier": self.target.carrier.name,
            "target": self.target.weights.tolist(),
            "max_deviation": self.max_deviation,
            "checks": [dict(test=r.test, t=r.t, s=r.s, deviation=r.deviation, tol=r.tol, passed=r.passed)
                       for r in self.rows + self.invariance],
        }


def embed_compound_poisson(sg: CompoundPoissonSemigroup, grid: Sequence[float] = DEFAULT_GRID,
                           tol: float = SEMIGROUP_TOL) -> EmbeddingCertificate:
    """Certificate for ``sg.at(1)`` embedded in ``t -> sg.at(t)``."""
    target = sg.at(1.0)
    cert = EmbeddingCertificate(target, sg)
    cert.rows.extend(semigroup_grid_check(sg, grid, tol))
    dev = tv_distance(sg.at(1.0), target)
    cert.rows.append(CheckRow("time-one", 1.0, 0.0, dev, tol, dev <= tol))
    return cert


def embed_homogeneous(alpha: DenseMeasure, space: FiniteHomogeneousSpace, hint: CompoundPoissonSemigroup,
                      grid: Sequence[float] = DEFAULT_GRID, tol: float = SEMIGROUP_TOL) -> EmbeddingCertificate:
    """Embed ``alpha`` on G/K by lifting, embedding on G with ``hint``, and projecting.

    The lift of ``alpha`` must match ``hint.at(1)``; every ``hint.at(t)`` must
    be K-right invariant so the projected family is a semigroup on G/K.
    A mismatch gives a certificate with ``reason`` set and ``passed`` false.
    """
    if alpha.carrier != space:
        raise DomainError("target measure does not live on the given space")
    if hint.carrier != space.G:
        raise DomainError("hint family must live on the space's group")
    family = ProjectedFamily(hint, space)
    cert = EmbeddingCertificate(alpha, family, lifted_family=hint, space=space)
    lifted = lift_measure(alpha)
    dev = tv_distance(lifted, hint.at(1.0))
    cert.rows.append(CheckRow("lift-matches-hint", 1.0, 0.0, dev, tol, dev <= tol))
    if dev > tol:
        cert.reason = f"lift of the target differs from the hint at t=1 by {dev:.3e}"
        return cert
    for t in grid:
        inv = is_invariant(hint.at(t), "right", space.K, DENSE_TOL)
        cert.rows.append(CheckRow("K-right-invariance", t, 0.0, inv.deviation, DENSE_TOL, inv.ok))
    cert.rows.extend(semigroup_grid_check(family, grid, tol))
    dev = tv_distance(family.at(1.0), alpha)
    cert.rows.append(CheckRow("time-one", 1.0, 0.0, dev, tol, dev <= tol))
    return cert


def invariance_of_embedded(cert: EmbeddingCertificate, grid: Sequence[float] | None = None,
                           tol: float = DENSE_TOL) -> list[CheckRow]:
    """Invariance consequences for a passing certificate.

    On G/K: the embedded K-right invariant measure on G is K-bi-invariant and
    the target on G/K is K-invariant. On G the certificate has no K and the
    check is vacuous. With ``grid`` every family member is checked too.
    """
    if not cert.passed:
        raise ValueError("certificate did not pass; invariance consequences do not apply")
    rows = []
    space = cert.space
    if space is None:
        cert.invariance = rows
        return rows
    times = [1.0] + list(grid or [])
    for t in times:
        mu_t = lift_measure(cert.family.at(t))
        bi = is_invariant(mu_t, "bi", space.K, tol)
        rows.append(CheckRow("K-bi-invariance", t, 0.0, bi.deviation, tol, bi.ok))
        a_t = cert.target if t == 1.0 else cert.family.at(t)
        inv = is_invariant(a_t, "action", space.K, tol)
        rows.append(CheckRow("K-invariance", t, 0.0, inv.deviation, tol, inv.ok))
    cert.invariance = rows
    return rows

