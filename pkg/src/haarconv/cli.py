"""Command-line driver: ``haarconv {verify,convolve,semigroup,embed,root}``.

Exit codes: 0 success, 1 a check failed or a wrapped operation raised,
2 usage error, 3 I/O failure. The seed comes from ``--seed``, else the
``HAARCONV_SEED`` environment variable, else 7. Reports are byte-identical
for identical arguments and seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import verify as V
from .divisibility import (
    cp_root,
    embed_compound_poisson,
    embed_homogeneous,
    nth_root_abelian_dft,
    verify_root,
)
from .energy import rng_for
from .exceptions import HaarconvError
from .groups import FiniteGroup
from .heat import HeatSemigroupSO3
from .homogeneous import FiniteHomogeneousSpace
from .io import dump_json, family_from_json, load_family, load_measure, parse_group, parse_space
from .measures import DEFAULT_PARTICLES, convolve, tv_distance
from .semigroup import (
    DEFAULT_GRID,
    SEMIGROUP_TOL,
    CheckRow,
    decompose_semigroup,
    parse_grid,
    semigroup_check,
)

DEFAULT_SEED = 7
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def resolve_seed(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get("HAARCONV_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"HAARCONV_SEED must be an integer, got {env!r}") from None
    return DEFAULT_SEED


def _emit(text: str, out) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _grid(spec):
    if spec is None:
        return DEFAULT_GRID
    try:
        return parse_grid(spec)
    except ValueError as exc:
        raise UsageError(f"bad --grid/--times {spec!r}: {exc}") from None


def _rows_csv(rows: list[CheckRow], seed: int, command: str) -> str:
    buf = io.StringIO()
    buf.write(f"# haarconv {command} seed={seed}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "s", "deviation", "test", "pass"])
    for r in rows:
        w.writerow([f"{r.t:g}", f"{r.s:g}", V.format_value(r.deviation), r.test, "true" if r.passed else "false"])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands

def cmd_verify(args) -> int:
    name = V.ALIASES.get(args.suite, args.suite)
    if name != "all" and name not in V.SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(['all', *V.SUITES])}")
    seed = resolve_seed(args.seed)
    cfg = V.VerifyConfig(seed=seed, particles=args.particles, tol=args.tol, grid=_grid(args.grid))
    if args.runs is not None:
        cfg = replace(cfg, runs=args.runs)
    rows = V.run_suite(name, cfg)
    _emit(V.report_csv(rows, seed), args.out)
    return EXIT_OK if all(r.passed for r in rows) else EXIT_FAIL


def cmd_convolve(args) -> int:
    seed = resolve_seed(args.seed)
    carrier = None
    if args.space:
        carrier = parse_space(args.space)
    elif args.group:
        carrier = parse_group(args.group)
    mu = load_measure(args.lhs, carrier)
    nu = load_measure(args.rhs, carrier)
    out = convolve(mu, nu, particles=args.particles, seed=seed)
    _emit(dump_json(out.to_json(), seed=seed), args.out)
    return EXIT_OK


def cmd_semigroup(args) -> int:
    seed = resolve_seed(args.seed)
    times = _grid(args.times)
    checks = [c.strip() for c in args.check.split(",") if c.strip()]
    for c in checks:
        if c not in ("semigroup", "decompose"):
            raise UsageError(f"unknown check {c!r}")
    tol = SEMIGROUP_TOL if args.tol is None else args.tol
    rows: list[CheckRow] = []
    if args.kind == "heat":
        if "decompose" in checks:
            raise UsageError("decompose applies to compound Poisson families only")
        family = HeatSemigroupSO3()
        pos = [t for t in times if t > 0]
        for i, s in enumerate(pos):
            for j, t in enumerate(pos):
                rows.append(semigroup_check(family, s, t, particles=args.particles,
                                            seed=int(rng_for(seed, 120, i, j).integers(2**62))))
    else:
        if args.jump is None:
            raise UsageError("--jump is required for --kind cp")
        G = parse_group(args.group) if args.group else None
        path = Path(args.jump)
        data = json.loads(path.read_text())
        if "rate" not in data:
            # a bare measure file: rate comes from --rate, initial is the identity
            data = {"carrier": data.get("carrier"), "jump": data["weights"], "rate": args.rate}
        elif args.rate is not None:
            data["rate"] = args.rate
        family = family_from_json(data, G)
        if "semigroup" in checks:
            rows += [semigroup_check(family, s, t, tol) for s in times for t in times]
        if "decompose" in checks:
            rows += decompose_semigroup(family, times, min(tol, 1e-12)).rows
    _emit(_rows_csv(rows, seed, "semigroup"), args.out)
    return EXIT_OK if all(r.passed for r in rows) else EXIT_FAIL


def cmd_embed(args) -> int:
    seed = resolve_seed(args.seed)
    grid = _grid(args.grid)
    tol = SEMIGROUP_TOL if args.tol is None else args.tol
    if not args.space and not args.group:
        raise UsageError("embed needs --space or --group")
    carrier = parse_space(args.space) if args.space else parse_group(args.group)
    target = load_measure(args.target, carrier)
    if isinstance(carrier, FiniteHomogeneousSpace):
        hint = load_family(args.hint, carrier.G)
        cert = embed_homogeneous(target, carrier, hint, grid, tol)
    elif isinstance(carrier, FiniteGroup):
        hint = load_family(args.hint, carrier)
        cert = embed_compound_poisson(hint, grid, tol)
        dev = tv_distance(hint.at(1.0), target)
        cert.rows.append(CheckRow("target-matches-family", 1.0, 0.0, dev, tol, dev <= tol))
    else:
        raise UsageError("embedding certificates need a finite group or coset space")
    _emit(dump_json(cert.to_json(), seed=seed), args.out)
    return EXIT_OK if cert.passed else EXIT_FAIL


def cmd_root(args) -> int:
    seed = resolve_seed(args.seed)
    G = parse_group(args.group)
    mu = load_measure(args.measure, G)
    tol = args.tol
    if args.method == "dft":
        res = nth_root_abelian_dft(mu, args.n, tol=tol if tol is not None else 1e-8)
        report = {
            "method": "dft", "n": args.n, "found": res.found,
            "branch": list(res.branch) if res.found else None,
            "branches_tried": res.branches_tried, "branches_total": res.branches_total,
            "root": res.root.weights.tolist() if res.found else None,
            "deviation": res.deviation if res.found else None,
        }
        ok = res.found
    else:
        if args.hint is None:
            raise UsageError("--method cp needs --hint with the compound Poisson family")
        sg = load_family(args.hint, G)
        tol = SEMIGROUP_TOL if tol is None else tol
        match = tv_distance(sg.at(1.0), mu)
        root = cp_root(sg, args.n)
        chk = verify_root(mu, root, args.n, tol)
        report = {"method": "cp", "n": args.n, "found": chk.passed, "root": root.weights.tolist(),
                  "deviation": chk.deviation, "family_matches_measure": match}
        ok = chk.passed
    _emit(dump_json(report, seed=seed), args.out)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="haarconv", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, particles=True):
        sp.add_argument("--seed", type=int, default=None, help="seed (default: $HAARCONV_SEED or 7)")
        if particles:
            sp.add_argument("--particles", type=int, default=DEFAULT_PARTICLES, help="particle budget")
        sp.add_argument("--tol", type=float, default=None, help="tolerance override for exact checks")
        sp.add_argument("--out", default=None, help="output path (default: stdout)")

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--suite", default="all", help="suite name or 'all'")
    v.add_argument("--grid", default=None, help="time grid, 'start:stop:step' or comma list")
    v.add_argument("--runs", type=int, default=None, help="repetitions for statistical checks (default 100)")
    common(v)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("convolve", help="convolve two measures from JSON files")
    c.add_argument("--space", default=None)
    c.add_argument("--group", default=None)
    c.add_argument("--lhs", required=True)
    c.add_argument("--rhs", required=True)
    common(c)
    c.set_defaults(func=cmd_convolve)

    s = sub.add_parser("semigroup", help="check a convolution semigroup on a time grid")
    s.add_argument("--kind", choices=["cp", "heat"], default="cp")
    s.add_argument("--group", default=None)
    s.add_argument("--rate", type=float, default=None)
    s.add_argument("--jump", default=None, help="jump measure or family JSON")
    s.add_argument("--times", default=None, help="time grid (default 0:2:0.1)")
    s.add_argument("--check", default="semigroup", help="comma list of semigroup, decompose")
    common(s)
    s.set_defaults(func=cmd_semigroup)

    e = sub.add_parser("embed", help="certify an embedding into a convolution semigroup")
    e.add_argument("--space", default=None)
    e.add_argument("--group", default=None)
    e.add_argument("--target", required=True)
    e.add_argument("--hint", required=True, help="compound Poisson family JSON on the group")
    e.add_argument("--grid", default=None)
    common(e, particles=False)
    e.set_defaults(func=cmd_embed)

    r = sub.add_parser("root", help="n-th convolution root of a measure")
    r.add_argument("--group", required=True)
    r.add_argument("--measure", required=True)
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--method", choices=["dft", "cp"], default="dft")
    r.add_argument("--hint", default=None, help="family JSON for --method cp")
    common(r, particles=False)
    r.set_defaults(func=cmd_root)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"haarconv: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except json.JSONDecodeError as exc:
        print(f"haarconv: cannot parse JSON: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"haarconv: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (HaarconvError, ValueError, KeyError) as exc:
        print(f"haarconv: error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
