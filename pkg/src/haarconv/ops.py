"""Group-agnostic element operations for finite groups and SO(3)."""

from .exceptions import DomainError
from .groups import Element, FiniteGroup
from .so3 import Rotation, SpecialOrthogonal3


def _check_element(g):
    if not isinstance(g, (Element, Rotation)):
        raise DomainError(f"{g!r} is not an element of a registered group")


def multiply(g, h):
    """Product ``g h``; operands must belong to the same group."""
    _check_element(g)
    _check_element(h)
    if type(g) is not type(h):
        raise DomainError(f"mixed groups: {g!r} and {h!r}")
    return g * h


def inverse(g):
    _check_element(g)
    return g.inverse()


def identity(G):
    if isinstance(G, FiniteGroup):
        return G.element(G.identity)
    if isinstance(G, SpecialOrthogonal3):
        return G.identity()
    raise DomainError(f"{G!r} is not a registered group")


def conjugate(g, x):
    """``g x g^-1``."""
    return multiply(multiply(g, x), inverse(g))
