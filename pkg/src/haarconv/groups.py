"""Finite groups given by multiplication tables.

Elements are integer indices into the table. ``FiniteGroup.element`` wraps an
index into an :class:`Element` so that ``g * h`` and ``g.inverse()`` work and
mixing groups raises :class:`DomainError`.
"""

from __future__ import annotations

import functools
import itertools
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .exceptions import DomainError, UnsupportedError

MAX_CHECKED_ORDER = 64


class FiniteGroup:
    """A finite group defined by its Cayley table.

    ``table[i, j]`` is the index of the product of element ``i`` with element
    ``j``. Identity and inverses are derived from the table. Associativity is
    checked for orders up to 64.
    """

    def __init__(self, table, name: str = "G", labels: Sequence[str] | None = None):
        table = np.array(table, dtype=np.int64)
        if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
            raise ValueError("multiplication table must be a nonempty square array")
        n = table.shape[0]
        if table.min() < 0 or table.max() >= n:
            raise ValueError("table entries must be element indices in [0, order)")
        expected = np.arange(n)
        if not (np.sort(table, axis=1) == expected).all() or not (np.sort(table, axis=0) == expected[:, None]).all():
            raise ValueError("table is not a Latin square")

        ids = [e for e in range(n) if (table[e] == expected).all() and (table[:, e] == expected).all()]
        if not ids:
            raise ValueError("table has no identity element")
        identity = ids[0]
        inverses = np.argmax(table == identity, axis=1)
        if not (table[expected, inverses] == identity).all():
            raise ValueError("some element has no inverse")
        if n <= MAX_CHECKED_ORDER:
            left = table[table]  # (ab)c
            right = table[expected[:, None, None], table[None, :, :]]  # a(bc)
            if not (left == right).all():
                raise ValueError("table is not associative")

        table.setflags(write=False)
        inverses.setflags(write=False)
        self.table = table
        self.order = n
        self.identity = int(identity)
        self.inverses = inverses
        self.name = name
        if labels is None:
            labels = [str(i) for i in range(n)]
        if len(labels) != n:
            raise ValueError("need one label per element")
        self.labels = list(labels)
        self._label_index = {lab: i for i, lab in enumerate(self.labels)}

    @property
    def size(self) -> int:
        return self.order

    def __repr__(self):
        return f"FiniteGroup({self.name!r}, order={self.order})"

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return self.name == other.name and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.name, self.order))

    # index-level arithmetic, vectorised over numpy arrays
    def mul(self, g, h):
        return self.table[g, h]

    def inv(self, g):
        return self.inverses[g]

    def conj(self, g, x):
        """Index of g x g^-1."""
        return self.table[self.table[g, x], self.inverses[g]]

    def is_abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    def index_of(self, ref) -> int:
        """Resolve an element reference: an index, a label, ``"e"`` or an Element."""
        if isinstance(ref, Element):
            if ref.group != self:
                raise DomainError(f"element of {ref.group.name} used in {self.name}")
            return ref.index
        if isinstance(ref, (int, np.integer)):
            if not 0 <= ref < self.order:
                raise IndexError(f"element index {ref} out of range for {self.name}")
            return int(ref)
        ref = str(ref).strip()
        if ref in self._label_index:
            return self._label_index[ref]
        if ref == "e":
            return self.identity
        if ref.lstrip("-").isdigit():
            return self.index_of(int(ref))
        raise KeyError(f"unknown element {ref!r} in {self.name}")

    def element(self, ref) -> "Element":
        return Element(self, self.index_of(ref))

    def elements(self) -> list["Element"]:
        return [Element(self, i) for i in range(self.order)]

    def power(self, g: int, n: int) -> int:
        x = self.identity
        for _ in range(n):
            x = int(self.table[x, g])
        return x

    def to_json(self) -> dict:
        return {"name": self.name, "order": self.order, "table": self.table.tolist()}


@dataclass(frozen=True)
class Element:
    group: FiniteGroup
    index: int

    def __mul__(self, other):
        if not isinstance(other, Element):
            raise DomainError(f"cannot multiply an element of {self.group.name} by {type(other).__name__}")
        if other.group != self.group:
            raise DomainError(f"mixed groups: {self.group.name} and {other.group.name}")
        return Element(self.group, int(self.group.table[self.index, other.index]))

    def inverse(self) -> "Element":
        return Element(self.group, int(self.group.inverses[self.index]))

    @property
    def label(self) -> str:
        return self.group.labels[self.index]

    def __repr__(self):
        return f"<{self.group.name}:{self.label}>"


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of a finite group, stored as its sorted member indices."""

    parent: FiniteGroup
    members: tuple

    def __post_init__(self):
        members = tuple(sorted(int(m) for m in set(self.members)))
        object.__setattr__(self, "members", members)
        G = self.parent
        if G.identity not in members:
            raise ValueError("subgroup must contain the identity")
        mset = set(members)
        arr = np.array(members)
        if not set(G.table[np.ix_(arr, arr)].ravel().tolist()) <= mset:
            raise ValueError("member set is not closed under multiplication")
        if not set(G.inverses[arr].tolist()) <= mset:
            raise ValueError("member set is not closed under inverses")

    @classmethod
    def generated_by(cls, G: FiniteGroup, generators: Iterable) -> "Subgroup":
        gens = [G.index_of(g) for g in generators]
        return cls(G, tuple(_closure_mask_to_list(_closure(G, _mask(gens)), G.order)))

    @classmethod
    def trivial(cls, G: FiniteGroup) -> "Subgroup":
        return cls(G, (G.identity,))

    @classmethod
    def whole(cls, G: FiniteGroup) -> "Subgroup":
        return cls(G, tuple(range(G.order)))

    @property
    def order(self) -> int:
        return len(self.members)

    def array(self) -> np.ndarray:
        return np.array(self.members, dtype=np.int64)

    def __contains__(self, g) -> bool:
        return self.parent.index_of(g) in set(self.members)

    def is_normal(self) -> bool:
        G = self.parent
        arr = self.array()
        mset = set(self.members)
        conj = G.conj(np.arange(G.order)[:, None], arr[None, :])
        return set(conj.ravel().tolist()) <= mset

    def labels(self) -> list[str]:
        return [self.parent.labels[m] for m in self.members]

    def __repr__(self):
        return f"Subgroup({self.parent.name}, {{{', '.join(self.labels())}}})"


def _mask(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << int(i)
    return m


def _closure_mask_to_list(mask: int, n: int) -> list[int]:
    return [i for i in range(n) if mask >> i & 1]


def _closure(G: FiniteGroup, mask: int) -> int:
    """Bitmask of the subgroup generated by the elements in ``mask``."""
    gens = _closure_mask_to_list(mask, G.order)
    members = {G.identity}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = int(G.table[x, g])
                if y not in members:
                    members.add(y)
                    nxt.append(y)
        frontier = nxt
    return _mask(members)


def subgroups(G: FiniteGroup) -> list[Subgroup]:
    """All subgroups of ``G``, sorted by order then members.

    Starts from cyclic subgroups and pairs of generators, then joins found
    subgroups with single extra elements until nothing new appears, which
    makes the enumeration exhaustive.
    """
    n = G.order
    if n > MAX_CHECKED_ORDER:
        raise UnsupportedError(f"subgroup enumeration supports order <= {MAX_CHECKED_ORDER}, got {n}")
    found = {_mask([G.identity]), (1 << n) - 1}
    cyclic = [_closure(G, 1 << g) for g in range(n)]
    found.update(cyclic)
    for a, b in itertools.combinations(range(n), 2):
        found.add(_closure(G, (1 << a) | (1 << b)))
    frontier = list(found)
    while frontier:
        nxt = []
        for S in frontier:
            for g in range(n):
                if S >> g & 1:
                    continue
                T = _closure(G, S | cyclic[g])
                if T not in found:
                    found.add(T)
                    nxt.append(T)
        frontier = nxt
    subs = [tuple(_closure_mask_to_list(m, n)) for m in found]
    subs.sort(key=lambda s: (len(s), s))
    return [Subgroup(G, s) for s in subs]


# ---------------------------------------------------------------------------
# built-in groups

def _cycle_label(p: tuple) -> str:
    seen = set()
    cycles = []
    for start in range(len(p)):
        if start in seen or p[start] == start:
            continue
        cyc = [start]
        seen.add(start)
        j = p[start]
        while j != start:
            cyc.append(j)
            seen.add(j)
            j = p[j]
        cycles.append("(" + "".join(str(c + 1) for c in cyc) + ")")
    return "".join(cycles) or "e"


def permutation_group(perms: Iterable[tuple], name: str) -> FiniteGroup:
    """Group of permutations under composition, ``(g h)(i) = g(h(i))``.

    Elements are sorted lexicographically so the identity gets index 0 and
    labels use 1-based cycle notation.
    """
    perms = sorted(set(tuple(p) for p in perms))
    index = {p: i for i, p in enumerate(perms)}
    n = len(perms)
    table = np.empty((n, n), dtype=np.int64)
    for i, g in enumerate(perms):
        for j, h in enumerate(perms):
            table[i, j] = index[tuple(g[h[k]] for k in range(len(h)))]
    return FiniteGroup(table, name=name, labels=[_cycle_label(p) for p in perms])


def _generate_perms(gens: list[tuple]) -> set[tuple]:
    ident = tuple(range(len(gens[0])))
    out = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple(x[g[k]] for k in range(len(g)))
                if y not in out:
                    out.add(y)
                    nxt.append(y)
        frontier = nxt
    return out


def cyclic_group(m: int) -> FiniteGroup:
    if not 1 <= m <= MAX_CHECKED_ORDER:
        raise UnsupportedError(f"Z_m is built in for 1 <= m <= {MAX_CHECKED_ORDER}")
    idx = np.arange(m)
    return FiniteGroup((idx[:, None] + idx[None, :]) % m, name=f"Z{m}")


def symmetric_group(k: int) -> FiniteGroup:
    return permutation_group(itertools.permutations(range(k)), name=f"S{k}")


def dihedral_group_d4() -> FiniteGroup:
    # symmetries of a square with vertices 1..4 in cyclic order
    rotation = (1, 2, 3, 0)
    reflection = (0, 3, 2, 1)
    return permutation_group(_generate_perms([rotation, reflection]), name="D4")


@functools.lru_cache(maxsize=None)
def builtin_group(name: str) -> FiniteGroup:
    """Built-in finite groups: ``Z<m>`` (m <= 64), ``D4``, ``S3``, ``S4``."""
    m = re.fullmatch(r"Z(\d+)", name)
    if m:
        return cyclic_group(int(m.group(1)))
    if name == "D4":
        return dihedral_group_d4()
    if name in ("S3", "S4"):
        return symmetric_group(int(name[1]))
    if name == "S1":
        return symmetric_group(1)
    raise KeyError(f"no built-in finite group named {name!r}")


def load_group_json(path) -> FiniteGroup:
    """Read ``{"name": str, "order": n, "table": [[int]]}``."""
    data = json.loads(Path(path).read_text())
    table = data["table"]
    if len(table) != data.get("order", len(table)):
        raise ValueError("declared order does not match table size")
    return FiniteGroup(table, name=data.get("name", Path(path).stem), labels=data.get("labels"))
