"""Coset spaces X = G/K with projection, section maps and the G-action.

Two carriers are supported: finite coset spaces of a :class:`FiniteGroup`
(points are coset indices) and the unit sphere ``SO3/SO2`` (points are unit
3-vectors, K is the group of rotations about the z-axis).
"""

from __future__ import annotations

import numpy as np

from . import so3
from .exceptions import DomainError
from .groups import Element, Subgroup
from .so3 import SO3, Rotation

NORTH = np.array([0.0, 0.0, 1.0])
POINT_TOL = 1e-9


class FiniteHomogeneousSpace:
    """``G/K`` for a finite group G and subgroup K.

    Cosets are numbered by their smallest member index. Each coset's
    canonical representative is its smallest member, except the origin
    ``eK`` whose representative is the identity.
    """

    def __init__(self, K: Subgroup, name: str | None = None):
        G = K.parent
        self.G = G
        self.K = K
        n = G.order
        kin = K.array()
        # coset of g is {g k : k in K}; label it by the minimum member
        cosets = G.table[np.arange(n)[:, None], kin[None, :]]
        key = cosets.min(axis=1)
        uniq = np.unique(key)
        self.coset_of = np.searchsorted(uniq, key)
        self.size = len(uniq)
        self.origin = int(self.coset_of[G.identity])
        reps = uniq.copy()
        reps[self.origin] = G.identity
        self.members = [np.sort(cosets[r]) for r in reps]
        self.name = name or f"{G.name}/{{{','.join(K.labels())}}}"
        self.default_section = FiniteSection(self, reps)
        # action_table[g, x] = coset of g . S(x); independent of the section
        self.action_table = self.coset_of[G.table[:, reps]]
        for arr in (self.coset_of, self.action_table):
            arr.setflags(write=False)

    def __repr__(self):
        return f"FiniteHomogeneousSpace({self.name!r}, size={self.size})"

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FiniteHomogeneousSpace):
            return NotImplemented
        return self.G == other.G and self.K.members == other.K.members

    def __hash__(self):
        return hash((self.G, self.K.members))

    def project(self, g):
        return self.coset_of[g]

    def act(self, g, x):
        return self.action_table[g, x]

    def random_section(self, seed=None) -> "FiniteSection":
        """A section choosing a uniformly random member of every coset."""
        rng = np.random.default_rng(seed)
        reps = np.array([rng.choice(m) for m in self.members])
        return FiniteSection(self, reps)

    def point_label(self, x: int) -> str:
        return self.G.labels[self.default_section.reps[x]] + "K"


class FiniteSection:
    """Section map ``x -> S(x)`` stored as one representative per coset."""

    def __init__(self, space: FiniteHomogeneousSpace, reps):
        reps = np.asarray(reps, dtype=np.int64)
        if reps.shape != (space.size,):
            raise ValueError("need exactly one representative per coset")
        if not (space.coset_of[reps] == np.arange(space.size)).all():
            raise ValueError("representatives do not project back to their cosets")
        reps.setflags(write=False)
        self.space = space
        self.reps = reps

    def __call__(self, x):
        return self.reps[x]


class SphereSpace:
    """S^2 = SO(3)/SO(2) with origin at the north pole."""

    name = "SO3/SO2"
    G = SO3
    origin = NORTH

    def __repr__(self):
        return "SphereSpace()"

    def __eq__(self, other):
        return isinstance(other, SphereSpace)

    def __hash__(self):
        return hash("SO3/SO2")

    @property
    def default_section(self) -> "SphereSection":
        return SphereSection()

    def random_section(self, seed=None) -> "SphereSection":
        rng = np.random.default_rng(seed)
        return SphereSection(twist=rng.standard_normal(3) * 7.0 + 1.0)

    def project(self, quats):
        """Image of the north pole under each rotation."""
        return renormalize_points(so3.rotate(quats, NORTH))

    def act(self, quats, points):
        return renormalize_points(so3.rotate(quats, points))


SPHERE = SphereSpace()


class SphereSection:
    """Geodesic section of S^2: rotation about ``z x p`` by ``arccos(z . p)``.

    The south pole maps to the rotation by pi about the x-axis. With a
    ``twist`` vector the section is post-multiplied by a z-rotation whose
    angle is a fixed pseudo-random function of the point, giving a different
    (still deterministic) section map.
    """

    def __init__(self, twist=None):
        self.twist = None if twist is None else np.asarray(twist, dtype=float)

    def __call__(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        x, y, z = np.moveaxis(p, -1, 0)
        q = np.stack([1.0 + z, -y, x, np.zeros_like(z)], axis=-1)
        norm = np.linalg.norm(q, axis=-1, keepdims=True)
        south = norm[..., 0] < 1e-12
        q = np.where(south[..., None], np.array([0.0, 1.0, 0.0, 0.0]), q / np.where(norm == 0, 1.0, norm))
        if self.twist is not None:
            phase = np.sin(p @ self.twist) * 43758.5453
            phi = 2 * np.pi * (phase - np.floor(phase))
            q = so3.qmul(q, so3.z_rotation(phi))
        return q


def renormalize_points(p):
    p = np.asarray(p, dtype=float)
    return p / np.linalg.norm(p, axis=-1, keepdims=True)


def homogeneous_space(G, K=None):
    """Build ``G/K``; ``K`` may be a Subgroup, element refs, or None (trivial)."""
    if G == SO3:
        return SPHERE
    if K is None:
        K = Subgroup.trivial(G)
    elif not isinstance(K, Subgroup):
        K = Subgroup.generated_by(G, K)
    return FiniteHomogeneousSpace(K)


# ---------------------------------------------------------------------------
# element-level API

def project(g, space):
    """Natural projection of a group element onto ``space``."""
    if isinstance(space, SphereSpace):
        if not isinstance(g, Rotation):
            raise DomainError("S^2 projection needs a Rotation")
        return space.project(g.q)
    if isinstance(g, Element):
        if g.group != space.G:
            raise DomainError(f"element of {g.group.name} projected onto {space.name}")
        g = g.index
    return int(space.project(g))


def section(x, space, section_map=None):
    """Group element ``S(x)`` with ``project(S(x)) == x``."""
    s = section_map or space.default_section
    if isinstance(space, SphereSpace):
        return Rotation(s(np.asarray(x, dtype=float)))
    return Element(space.G, int(s(int(x))))


def action(g, x, space):
    """The G-action ``g . x`` on ``space``."""
    if isinstance(space, SphereSpace):
        if not isinstance(g, Rotation):
            raise DomainError("S^2 action needs a Rotation")
        return space.act(g.q, np.asarray(x, dtype=float))
    if isinstance(g, Element):
        if g.group != space.G:
            raise DomainError(f"element of {g.group.name} acting on {space.name}")
        g = g.index
    return int(space.act(g, int(x)))


def points_equal(x, y, tol: float = POINT_TOL) -> bool:
    return bool(np.all(np.linalg.norm(np.asarray(x) - np.asarray(y), axis=-1) <= tol))
