"""Parsing of group/space descriptors and JSON measure and family files."""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .groups import FiniteGroup, Subgroup, builtin_group, load_group_json, subgroups
from .homogeneous import SPHERE, FiniteHomogeneousSpace, SphereSpace
from .measures import DenseMeasure, EmpiricalMeasure, haar_dense
from .semigroup import CompoundPoissonSemigroup
from .so3 import SO3


def parse_group(name: str):
    """Built-in group name (``Z12``, ``D4``, ``S3``, ``S4``, ``SO3``) or a JSON table path."""
    name = name.strip()
    if name == "SO3":
        return SO3
    if name.endswith(".json") or Path(name).is_file():
        return load_group_json(name)
    return builtin_group(name)


def parse_subgroup(G: FiniteGroup, spec: str) -> Subgroup:
    """``{a,b,...}`` generators by label/index, or ``K<i>`` indexing ``subgroups(G)``."""
    spec = spec.strip()
    m = re.fullmatch(r"K(\d+)", spec)
    if m:
        subs = subgroups(G)
        i = int(m.group(1))
        if i >= len(subs):
            raise ValueError(f"{G.name} has only {len(subs)} subgroups")
        return subs[i]
    if spec.startswith("{") and spec.endswith("}"):
        refs = [r for r in spec[1:-1].split(",") if r.strip()]
        return Subgroup.generated_by(G, refs)
    raise ValueError(f"cannot parse subgroup {spec!r}")


def parse_space(desc: str):
    """``G/K`` descriptor, e.g. ``S3/{e,(12)}``, ``D4/K3`` or ``SO3/SO2``."""
    desc = desc.strip()
    if desc in ("SO3/SO2", "S2"):
        return SPHERE
    if "/" not in desc:
        raise ValueError(f"space descriptor {desc!r} must look like G/K")
    gname, kspec = desc.split("/", 1)
    G = parse_group(gname)
    return FiniteHomogeneousSpace(parse_subgroup(G, kspec), name=desc)


def parse_carrier(name: str):
    name = name.strip()
    if name in ("SO3/SO2", "S2") or "/" in name:
        return parse_space(name)
    return parse_group(name)


def measure_from_json(data: dict, carrier=None):
    carrier = carrier if carrier is not None else parse_carrier(data["carrier"])
    if "weights" in data:
        return DenseMeasure(carrier, data["weights"])
    particles = data["particles"]
    points = np.array([p[0] for p in particles], dtype=float)
    weights = np.array([p[1] for p in particles], dtype=float)
    return EmpiricalMeasure(carrier, points, weights, seed=data.get("seed"))


def load_measure(path, carrier=None):
    return measure_from_json(json.loads(Path(path).read_text()), carrier)


def dump_json(obj: dict, path=None, **extra) -> str:
    data = dict(obj)
    data.update(extra)
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def _weights_or_haar(value, G: FiniteGroup):
    if isinstance(value, str):
        if not value.startswith("haar:"):
            raise ValueError(f"cannot parse measure {value!r}")
        return haar_dense(parse_subgroup(G, value[len("haar:"):]))
    if isinstance(value, dict):
        value = value["weights"]
    return DenseMeasure(G, value)


def family_from_json(data: dict, carrier=None) -> CompoundPoissonSemigroup:
    """Compound Poisson family from ``{"group": .., "rate": .., "jump": [...], "initial": ...}``.

    ``jump`` and ``initial`` are weight lists, ``{"weights": [...]}`` objects,
    or ``"haar:<subgroup>"`` strings. ``initial`` defaults to the identity.
    """
    G = carrier if carrier is not None else parse_carrier(data.get("group") or data["carrier"])
    if isinstance(G, (SphereSpace,)) or G == SO3:
        raise ValueError("compound Poisson specs need a finite carrier")
    jump = _weights_or_haar(data["jump"], G)
    initial = _weights_or_haar(data["initial"], G) if data.get("initial") is not None else None
    return CompoundPoissonSemigroup(G, float(data["rate"]), jump, initial)


def load_family(path, carrier=None) -> CompoundPoissonSemigroup:
    return family_from_json(json.loads(Path(path).read_text()), carrier)
