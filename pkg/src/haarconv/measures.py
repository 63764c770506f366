"""Probability measures and the convolution calculus on groups and G/K.

Dense measures carry a weight vector over a finite carrier (a
:class:`FiniteGroup` or a :class:`FiniteHomogeneousSpace`); all operations on
them are exact up to floating point. Empirical measures are weighted particle
ensembles on SO(3) or S^2 and their operations are Monte Carlo.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import so3
from .energy import energy_distance_test, multinomial_indices, rng_for
from .exceptions import DomainError, InvarianceError
from .groups import Element, FiniteGroup, Subgroup
from .homogeneous import SPHERE, FiniteHomogeneousSpace, SphereSpace, renormalize_points
from .so3 import SO3, Rotation, SpecialOrthogonal3

DENSE_TOL = 1e-12
DRIFT_TOL = 1e-9
DEFAULT_PARTICLES = 10_000


def _renorm(w: np.ndarray) -> np.ndarray:
    s = w.sum()
    if abs(s - 1.0) > DRIFT_TOL:
        raise AssertionError(f"normalisation drift {abs(s - 1.0):.3e} exceeds {DRIFT_TOL}")
    return w / s


class DenseMeasure:
    """Probability weights over a finite group or finite coset space."""

    __slots__ = ("carrier", "weights")

    def __init__(self, carrier, weights):
        w = np.array(weights, dtype=float).reshape(-1)
        if w.shape != (carrier.size,):
            raise ValueError(f"{carrier.name} needs {carrier.size} weights, got {w.size}")
        if not np.isfinite(w).all() or (w < -DENSE_TOL).any():
            raise ValueError("weights must be finite and nonnegative")
        w = np.clip(w, 0.0, None)
        total = w.sum()
        if total <= 0:
            raise ValueError("empty measure")
        w /= total
        w.setflags(write=False)
        self.carrier = carrier
        self.weights = w

    @classmethod
    def point(cls, carrier, x) -> "DenseMeasure":
        if isinstance(x, Element):
            x = carrier.index_of(x)
        w = np.zeros(carrier.size)
        w[int(x)] = 1.0
        return cls(carrier, w)

    @classmethod
    def uniform(cls, carrier) -> "DenseMeasure":
        return cls(carrier, np.full(carrier.size, 1.0 / carrier.size))

    @classmethod
    def random(cls, carrier, rng: np.random.Generator, sparsity: float = 0.0) -> "DenseMeasure":
        """Dirichlet(1) weights; each point is zeroed with probability ``sparsity``."""
        w = rng.dirichlet(np.ones(carrier.size))
        if sparsity:
            keep = rng.random(carrier.size) >= sparsity
            keep[rng.integers(carrier.size)] = True
            w = w * keep
        return cls(carrier, w)

    def _derived(self, w, carrier=None) -> "DenseMeasure":
        return DenseMeasure(carrier or self.carrier, _renorm(np.asarray(w, dtype=float)))

    def support(self, tol: float = 0.0) -> np.ndarray:
        return np.flatnonzero(self.weights > tol)

    def __len__(self):
        return self.carrier.size

    def __repr__(self):
        return f"DenseMeasure({self.carrier.name}, {np.array2string(self.weights, precision=4)})"

    def to_json(self) -> dict:
        return {"carrier": self.carrier.name, "weights": self.weights.tolist()}


class EmpiricalMeasure:
    """Weighted particle ensemble on SO(3) (quaternions) or S^2 (unit vectors).

    Zero-weight particles are dropped. ``seed`` records provenance.
    """

    __slots__ = ("carrier", "points", "weights", "seed")

    def __init__(self, carrier, points, weights=None, seed=None):
        pts = np.array(points, dtype=float)
        dim = 4 if isinstance(carrier, SpecialOrthogonal3) else 3
        if not isinstance(carrier, (SpecialOrthogonal3, SphereSpace)):
            raise DomainError(f"empirical measures live on SO3 or S2, not {carrier!r}")
        if pts.ndim != 2 or pts.shape[1] != dim:
            raise ValueError(f"{carrier.name} particles must have shape (n, {dim})")
        w = np.full(len(pts), 1.0 / max(len(pts), 1)) if weights is None else np.array(weights, dtype=float)
        if w.shape != (len(pts),) or (w < 0).any() or not np.isfinite(w).all():
            raise ValueError("weights must be nonnegative, one per particle")
        keep = w > 0
        pts, w = pts[keep], w[keep]
        if len(w) == 0:
            raise ValueError("empty measure")
        pts = renormalize_points(pts)
        w = w / w.sum()
        pts.setflags(write=False)
        w.setflags(write=False)
        self.carrier = carrier
        self.points = pts
        self.weights = w
        self.seed = seed

    def __len__(self):
        return len(self.weights)

    def __repr__(self):
        return f"EmpiricalMeasure({self.carrier.name}, n={len(self)}, seed={self.seed})"

    def resample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return self.points[multinomial_indices(self.weights, n, rng)]

    def to_json(self) -> dict:
        return {
            "carrier": self.carrier.name,
            "seed": self.seed,
            "particles": [[p.tolist(), float(w)] for p, w in zip(self.points, self.weights)],
        }


def _group_of(carrier):
    return carrier if isinstance(carrier, (FiniteGroup, SpecialOrthogonal3)) else carrier.G


def _same_carrier(mu, nu):
    if type(mu) is not type(nu) or mu.carrier != nu.carrier:
        raise DomainError(f"carrier mismatch: {mu.carrier!r} vs {nu.carrier!r}")


def _subgroup_array(K, G: FiniteGroup) -> np.ndarray:
    if isinstance(K, FiniteGroup):
        K = Subgroup.whole(K)
    if K.parent != G:
        raise DomainError(f"subgroup of {K.parent.name} used on {G.name}")
    return K.array()


# ---------------------------------------------------------------------------
# Haar measures

def haar_dense(K) -> DenseMeasure:
    """Normalised Haar measure of a finite group or subgroup, on the parent group."""
    if isinstance(K, FiniteGroup):
        return DenseMeasure.uniform(K)
    w = np.zeros(K.parent.order)
    w[K.array()] = 1.0 / K.order
    return DenseMeasure(K.parent, w)


def haar_empirical(n: int, seed=None) -> EmpiricalMeasure:
    return EmpiricalMeasure(SO3, so3.haar_quaternions(n, rng_for(seed, 0x4A)), seed=seed)


# ---------------------------------------------------------------------------
# convolution

def convolve_group(mu, nu, *, particles: int = DEFAULT_PARTICLES, seed=0):
    """Convolution on the group: the law of ``x y`` with ``x ~ mu``, ``y ~ nu`` independent."""
    _same_carrier(mu, nu)
    if isinstance(mu, DenseMeasure):
        G = mu.carrier
        if not isinstance(G, FiniteGroup):
            raise DomainError("convolve_group needs measures on a group; use convolve_homog on G/K")
        a, b = mu.support(), nu.support()
        out = np.bincount(G.table[np.ix_(a, b)].ravel(),
                          weights=np.outer(mu.weights[a], nu.weights[b]).ravel(),
                          minlength=G.order)
        return mu._derived(out)
    if not isinstance(mu.carrier, SpecialOrthogonal3):
        raise DomainError("convolve_group needs measures on SO3")
    x = mu.resample(particles, rng_for(seed, 1))
    y = nu.resample(particles, rng_for(seed, 2))
    return EmpiricalMeasure(SO3, so3.qmul(x, y), seed=seed)


def convolve_homog(mu, nu, section=None, *, particles: int = DEFAULT_PARTICLES, seed=0):
    """Convolution on G/K: the law of ``S(x) k . y`` with ``k`` Haar on K.

    Exact triple sum for dense measures; for S^2 one Haar z-rotation is drawn
    per particle pair.
    """
    _same_carrier(mu, nu)
    X = mu.carrier
    if isinstance(mu, DenseMeasure):
        if not isinstance(X, FiniteHomogeneousSpace):
            raise DomainError("convolve_homog needs measures on a finite coset space")
        G = X.G
        reps = (section or X.default_section).reps
        kin = X.K.array()
        a, b = mu.support(), nu.support()
        gk = G.table[reps[a][:, None], kin[None, :]]  # (|a|, |K|)
        targets = X.action_table[gk][:, :, b]  # (|a|, |K|, |b|)
        w = mu.weights[a][:, None, None] * nu.weights[b][None, None, :] / len(kin)
        out = np.bincount(targets.ravel(), weights=np.broadcast_to(w, targets.shape).ravel(), minlength=X.size)
        return mu._derived(out)
    if not isinstance(X, SphereSpace):
        raise DomainError("empirical convolve_homog needs measures on S2")
    s = section or X.default_section
    x = mu.resample(particles, rng_for(seed, 1))
    y = nu.resample(particles, rng_for(seed, 2))
    phi = rng_for(seed, 3).uniform(0, 2 * np.pi, particles)
    g = so3.qmul(s(x), so3.z_rotation(phi))
    return EmpiricalMeasure(SPHERE, so3.rotate(g, y), seed=seed)


def convolve_homog_kinv(mu, nu, section=None, *, tol: float = DENSE_TOL,
                        particles: int = DEFAULT_PARTICLES, seed=0):
    """Convolution on G/K without the K-average, valid when ``nu`` is K-invariant."""
    _same_carrier(mu, nu)
    X = mu.carrier
    if isinstance(mu, DenseMeasure):
        report = is_invariant(nu, "action", tol=tol)
        if not report.ok:
            raise InvarianceError("right operand is not K-invariant", report.deviation)
        reps = (section or X.default_section).reps
        a, b = mu.support(), nu.support()
        targets = X.action_table[reps[a][:, None], b[None, :]]
        out = np.bincount(targets.ravel(), weights=np.outer(mu.weights[a], nu.weights[b]).ravel(),
                          minlength=X.size)
        return mu._derived(out)
    s = section or X.default_section
    x = mu.resample(particles, rng_for(seed, 1))
    y = nu.resample(particles, rng_for(seed, 2))
    return EmpiricalMeasure(SPHERE, so3.rotate(s(x), y), seed=seed)


def convolve(mu, nu, section=None, **kwargs):
    """Dispatch to the group or coset-space convolution by carrier."""
    if isinstance(mu.carrier, (FiniteGroup, SpecialOrthogonal3)):
        return convolve_group(mu, nu, **kwargs)
    return convolve_homog(mu, nu, section, **kwargs)


def identity_measure(carrier):
    """The unit point mass at the identity of G or the origin of G/K."""
    if isinstance(carrier, FiniteGroup):
        return DenseMeasure.point(carrier, carrier.identity)
    if isinstance(carrier, FiniteHomogeneousSpace):
        return DenseMeasure.point(carrier, carrier.origin)
    raise DomainError("identity_measure is defined for finite carriers")


def convolve_power(mu, n: int, **kwargs):
    """``n``-fold convolution power; ``n == 0`` gives the identity point mass.

    Dense measures use repeated squaring; empirical ones convolve sequentially.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if isinstance(mu, DenseMeasure):
        result = identity_measure(mu.carrier)
        if n == 0:
            return result
        base, first = mu, True
        while n:
            if n & 1:
                result = base if first else convolve(result, base)
                first = False
            n >>= 1
            if n:
                base = convolve(base, base)
        return result
    if n == 0:
        raise ValueError("empirical power 0 is not represented")
    seed = kwargs.pop("seed", 0)
    result = mu
    for i in range(1, n):
        step_seed = int(rng_for(seed, 8, i).integers(2**62))
        result = convolve(result, mu, seed=step_seed, **kwargs)
    return result


# ---------------------------------------------------------------------------
# push-forwards, lift, projection

def pushforward(mu, kind: str, g=None, space=None, *, seed=0):
    """Image of ``mu`` under a map.

    ``kind`` is one of ``"left"`` (x -> gx), ``"right"`` (x -> xg),
    ``"conjugate"`` (x -> g x g^-1), ``"project"`` (G -> space) or
    ``"action"`` (x -> g.x on a coset space).
    """
    if kind == "project":
        return project_measure(mu, space)
    if isinstance(mu, DenseMeasure):
        C = mu.carrier
        G = _group_of(C)
        gi = G.index_of(g)
        idx = np.arange(C.size)
        if kind == "action":
            if not isinstance(C, FiniteHomogeneousSpace):
                raise DomainError("action push-forward needs a coset-space measure")
            image = C.act(gi, idx)
        elif not isinstance(C, FiniteGroup):
            raise DomainError(f"{kind} push-forward needs a group measure")
        elif kind == "left":
            image = G.table[gi, idx]
        elif kind == "right":
            image = G.table[idx, gi]
        elif kind == "conjugate":
            image = G.conj(gi, idx)
        else:
            raise ValueError(f"unknown map kind {kind!r}")
        return mu._derived(np.bincount(image, weights=mu.weights, minlength=C.size))
    q = g.q if isinstance(g, Rotation) else np.asarray(g, dtype=float)
    P = mu.points
    if kind == "action" or (kind == "left" and isinstance(mu.carrier, SphereSpace)):
        return EmpiricalMeasure(mu.carrier, so3.rotate(q, P), mu.weights, mu.seed)
    if not isinstance(mu.carrier, SpecialOrthogonal3):
        raise DomainError(f"{kind} push-forward needs an SO3 measure")
    if kind == "left":
        out = so3.qmul(q, P)
    elif kind == "right":
        out = so3.qmul(P, q)
    elif kind == "conjugate":
        out = so3.qmul(so3.qmul(q, P), so3.qconj(q))
    else:
        raise ValueError(f"unknown map kind {kind!r}")
    return EmpiricalMeasure(SO3, out, mu.weights, mu.seed)


def project_measure(mu, space):
    """Push ``mu`` on G forward along the projection G -> G/K."""
    if isinstance(mu, DenseMeasure):
        if not isinstance(space, FiniteHomogeneousSpace) or mu.carrier != space.G:
            raise DomainError(f"cannot project a measure on {mu.carrier.name} onto {space!r}")
        return mu._derived(np.bincount(space.coset_of, weights=mu.weights, minlength=space.size), space)
    if not isinstance(space, SphereSpace) or not isinstance(mu.carrier, SpecialOrthogonal3):
        raise DomainError("empirical projection goes from SO3 to S2")
    return EmpiricalMeasure(SPHERE, space.project(mu.points), mu.weights, mu.seed)


def lift_measure(nu, section=None, *, particles: int | None = None, seed=0):
    """The unique K-right invariant measure on G projecting to ``nu``.

    Mass ``nu(x)`` is spread uniformly over ``S(x) K``; on S^2 each particle
    is lifted to ``S(x)`` times a Haar-random z-rotation.
    """
    X = nu.carrier
    if isinstance(nu, DenseMeasure):
        if not isinstance(X, FiniteHomogeneousSpace):
            raise DomainError("lift_measure needs a measure on a coset space")
        reps = (section or X.default_section).reps
        kin = X.K.array()
        targets = X.G.table[reps[:, None], kin[None, :]]
        w = np.repeat(nu.weights / len(kin), len(kin))
        return nu._derived(np.bincount(targets.ravel(), weights=w, minlength=X.G.order), X.G)
    s = section or X.default_section
    if particles is None:
        pts, w = nu.points, nu.weights
    else:
        pts, w = nu.resample(particles, rng_for(seed, 1)), None
    phi = rng_for(seed, 4).uniform(0, 2 * np.pi, len(pts))
    return EmpiricalMeasure(SO3, so3.qmul(s(pts), so3.z_rotation(phi)), w, seed)


# ---------------------------------------------------------------------------
# K-averaging and invariance

def average_k(mu, K, mode: str = "right", *, seed=0):
    """Average the push-forwards of ``mu`` over k in K.

    ``mode`` is ``"left"``, ``"right"``, ``"conjugate"`` or ``"bi"``. Right
    mode equals ``mu * rho_K`` and left mode ``rho_K * mu``. For SO(3) the
    subgroup is the z-rotations (pass ``K="SO2"``) and one Haar-random k is
    drawn per particle.
    """
    if isinstance(mu, DenseMeasure):
        G = mu.carrier
        kin = _subgroup_array(K, G)
        idx = np.arange(G.order)
        if mode == "left":
            images = G.table[kin[:, None], idx[None, :]]
        elif mode == "right":
            images = G.table[idx[None, :], kin[:, None]]
        elif mode == "conjugate":
            images = G.conj(kin[:, None], idx[None, :])
        elif mode == "bi":
            return average_k(average_k(mu, K, "left"), K, "right")
        else:
            raise ValueError(f"unknown averaging mode {mode!r}")
        w = np.broadcast_to(mu.weights / len(kin), images.shape)
        return mu._derived(np.bincount(images.ravel(), weights=w.ravel(), minlength=G.order))
    n = len(mu)
    k1 = so3.z_rotation(rng_for(seed, 5).uniform(0, 2 * np.pi, n))
    k2 = so3.z_rotation(rng_for(seed, 6).uniform(0, 2 * np.pi, n))
    P = mu.points
    if mode == "left":
        out = so3.qmul(k1, P)
    elif mode == "right":
        out = so3.qmul(P, k1)
    elif mode == "conjugate":
        out = so3.qmul(so3.qmul(k1, P), so3.qconj(k1))
    elif mode == "bi":
        out = so3.qmul(so3.qmul(k1, P), k2)
    else:
        raise ValueError(f"unknown averaging mode {mode!r}")
    return EmpiricalMeasure(SO3, out, mu.weights, seed)


@dataclass(frozen=True)
class InvarianceReport:
    ok: bool
    deviation: float

    def __bool__(self):
        return self.ok


def is_invariant(mu, kind: str, K=None, tol: float = DENSE_TOL, *, seed=0, level: float = 0.01,
                 **test_kwargs) -> InvarianceReport:
    """Check invariance of ``mu`` under K.

    ``kind`` is ``"left"``, ``"right"``, ``"conjugate"``, ``"bi"`` (measures
    on G) or ``"action"`` (measures on G/K, with K the space's subgroup by
    default). Dense measures report the exact maximum total-variation
    deviation over k in K. Empirical measures compare the ensemble against
    its Haar-averaged transport with the energy test; the deviation is the
    energy statistic.
    """
    if isinstance(mu, DenseMeasure):
        C = mu.carrier
        if kind == "action":
            if not isinstance(C, FiniteHomogeneousSpace):
                raise DomainError("action invariance applies to coset-space measures")
            K = K or C.K
            if K.parent != C.G:
                raise DomainError("subgroup must belong to the space's group")
            kin = K.array()
            images = C.act(kin[:, None], np.arange(C.size)[None, :])
        else:
            kin = _subgroup_array(K, C)
            idx = np.arange(C.order)
            if kind == "bi":
                left = is_invariant(mu, "left", K, tol)
                right = is_invariant(mu, "right", K, tol)
                dev = max(left.deviation, right.deviation)
                return InvarianceReport(dev <= tol, dev)
            if kind == "left":
                images = C.table[kin[:, None], idx[None, :]]
            elif kind == "right":
                images = C.table[idx[None, :], kin[:, None]]
            elif kind == "conjugate":
                images = C.conj(kin[:, None], idx[None, :])
            else:
                raise ValueError(f"unknown invariance kind {kind!r}")
        dev = 0.0
        for row in images:
            moved = np.bincount(row, weights=mu.weights, minlength=C.size)
            dev = max(dev, 0.5 * float(np.abs(moved - mu.weights).sum()))
        return InvarianceReport(dev <= tol, dev)
    if kind == "action":
        transported = EmpiricalMeasure(
            mu.carrier,
            so3.rotate(so3.z_rotation(rng_for(seed, 7).uniform(0, 2 * np.pi, len(mu))), mu.points),
            mu.weights)
    else:
        transported = average_k(mu, "SO2", kind, seed=seed)
    res = energy_distance_test(mu, transported, level=level, seed=seed, **test_kwargs)
    return InvarianceReport(res.passed, res.statistic)


# ---------------------------------------------------------------------------
# densities and distances

def density_of(mu: DenseMeasure) -> np.ndarray:
    """Density of a coset-space measure w.r.t. the projected counting measure.

    Each coset has mass |K| under the projected counting measure on G, so the
    density is ``weights / |K|``.
    """
    return mu.weights / mu.carrier.K.order


def measure_from_density(f, space: FiniteHomogeneousSpace) -> DenseMeasure:
    return DenseMeasure(space, np.asarray(f, dtype=float) * space.K.order)


def density_convolve(f1, f2, space: FiniteHomogeneousSpace) -> np.ndarray:
    """``(f1 * f2)(gK) = sum_h f1(hK) f2(h^-1 g K)`` with counting measure on G."""
    G = space.G
    f1 = np.asarray(f1, dtype=float)
    f2 = np.asarray(f2, dtype=float)
    out = np.zeros(space.size)
    reps = space.default_section.reps
    for x in range(space.size):
        g = reps[x]
        total = 0.0
        for h in range(G.order):
            total += f1[space.coset_of[h]] * f2[space.coset_of[G.table[G.inverses[h], g]]]
        out[x] = total
    return out


def tv_distance(mu: DenseMeasure, nu: DenseMeasure) -> float:
    """Total variation distance ``0.5 * sum |mu - nu|``."""
    _same_carrier(mu, nu)
    if not isinstance(mu, DenseMeasure):
        raise DomainError("tv_distance is defined for dense measures")
    return 0.5 * float(np.abs(mu.weights - nu.weights).sum())
