"""SO(3) as unit quaternions ``(w, x, y, z)`` with ``q`` and ``-q`` identified.

The array kernels (``qmul``, ``rotate`` ...) work on ``(..., 4)`` arrays and
are what the Monte Carlo code uses; :class:`Rotation` is the single-element
wrapper for the generic group API.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError

NORM_TOL = 1e-12


def normalize(q):
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def qmul(p, q):
    """Hamilton product, broadcasting over leading axes."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    pw, px, py, pz = np.moveaxis(p, -1, 0)
    qw, qx, qy, qz = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            pw * qw - px * qx - py * qy - pz * qz,
            pw * qx + px * qw + py * qz - pz * qy,
            pw * qy - px * qz + py * qw + pz * qx,
            pw * qz + px * qy - py * qx + pz * qw,
        ],
        axis=-1,
    )


def qconj(q):
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def rotate(q, v):
    """Apply the rotation ``q`` to 3-vectors ``v`` (broadcasting)."""
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    w = q[..., :1]
    u = q[..., 1:]
    t = 2.0 * np.cross(u, v)
    return v + w * t + np.cross(u, t)


def to_matrix(q):
    q = normalize(q)
    w, x, y, z = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            np.stack([1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)], axis=-1),
            np.stack([2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)], axis=-1),
            np.stack([2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)], axis=-1),
        ],
        axis=-2,
    )


def from_axis_angle(axis, angle):
    axis = normalize(axis)
    angle = np.asarray(angle, dtype=float)[..., None]
    return np.concatenate([np.cos(angle / 2), np.sin(angle / 2) * axis], axis=-1)


def z_rotation(phi):
    """Quaternions of rotations by ``phi`` about the z-axis."""
    phi = np.asarray(phi, dtype=float)
    zero = np.zeros_like(phi)
    return np.stack([np.cos(phi / 2), zero, zero, np.sin(phi / 2)], axis=-1)


def rotation_angle(q):
    """Rotation angle in [0, pi]."""
    w = np.abs(np.asarray(q, dtype=float)[..., 0])
    return 2.0 * np.arccos(np.clip(w, 0.0, 1.0))


def geodesic_distance(p, q):
    """Angle of ``p^-1 q``, i.e. the Riemannian distance on SO(3)."""
    dot = np.abs(np.sum(np.asarray(p) * np.asarray(q), axis=-1))
    return 2.0 * np.arccos(np.clip(dot, 0.0, 1.0))


def quat_distance(p, q):
    """Euclidean distance between quaternions modulo sign."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return np.minimum(np.linalg.norm(p - q, axis=-1), np.linalg.norm(p + q, axis=-1))


def canonical_sign(q):
    """Representative with nonnegative first nonzero coordinate."""
    q = np.array(q, dtype=float)
    flat = q.reshape(-1, 4)
    for row in flat:
        nz = np.flatnonzero(np.abs(row) > 1e-15)
        if nz.size and row[nz[0]] < 0:
            row *= -1
    return flat.reshape(q.shape)


class SpecialOrthogonal3:
    """Handle for the group SO(3); elements are :class:`Rotation`."""

    name = "SO3"

    def identity(self) -> "Rotation":
        return Rotation(np.array([1.0, 0.0, 0.0, 0.0]))

    def __repr__(self):
        return "SO3"

    def __eq__(self, other):
        return isinstance(other, SpecialOrthogonal3)

    def __hash__(self):
        return hash("SO3")


SO3 = SpecialOrthogonal3()


@dataclass(frozen=True, eq=False)
class Rotation:
    """A rotation stored as a unit quaternion, renormalised on construction."""

    q: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float).reshape(4)
        norm = np.linalg.norm(q)
        if norm == 0:
            raise ValueError("zero quaternion is not a rotation")
        q = q / norm
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    group = SO3

    @classmethod
    def from_axis_angle(cls, axis, angle) -> "Rotation":
        return cls(from_axis_angle(axis, angle))

    def __mul__(self, other):
        if not isinstance(other, Rotation):
            raise DomainError(f"cannot multiply a rotation by {type(other).__name__}")
        return Rotation(qmul(self.q, other.q))

    def inverse(self) -> "Rotation":
        return Rotation(qconj(self.q))

    def apply(self, v):
        return rotate(self.q, v)

    def matrix(self):
        return to_matrix(self.q)

    @property
    def angle(self) -> float:
        return float(rotation_angle(self.q))

    def distance(self, other: "Rotation") -> float:
        return float(quat_distance(self.q, other.q))

    def isclose(self, other: "Rotation", tol: float = 1e-12) -> bool:
        return self.distance(other) <= tol

    def __eq__(self, other):
        return isinstance(other, Rotation) and self.isclose(other, 1e-12)

    def __hash__(self):
        return hash(tuple(np.round(canonical_sign(self.q), 10)))

    def __repr__(self):
        return f"Rotation({np.array2string(self.q, precision=6)})"


def haar_quaternions(n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` Haar-uniform unit quaternions (normalised 4D Gaussians)."""
    g = rng.standard_normal((n, 4))
    return normalize(g)


def haar_sample_so3(n: int, seed=None) -> list[Rotation]:
    """I.i.d. Haar-uniform rotations, deterministic given ``seed``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    rng = np.random.default_rng(seed)
    return [Rotation(q) for q in haar_quaternions(n, rng)]


def haar_angle_cdf(theta):
    """CDF of the rotation angle of a Haar-random rotation."""
    theta = np.asarray(theta, dtype=float)
    return (theta - np.sin(theta)) / np.pi
