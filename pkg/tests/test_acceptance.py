"""Acceptance criteria, each at its stated tolerance and runtime budget.

Every test prints one ``PASS``/``FAIL`` line; the lines are repeated in the
terminal summary.
"""

import time

from haarconv import verify as V

from .conftest import ACCEPTANCE_LINES

CFG = V.VerifyConfig(seed=7, particles=10_000, cases=200, runs=100, level=0.01)


def _judge(number, title, rows, elapsed, budget=None):
    failing = [r for r in rows if not r.passed]
    in_time = budget is None or elapsed < budget
    ok = not failing and in_time
    detail = "; ".join(f"{r.case}/{r.metric}={r.value:.3e} (tol {r.tol:.1e})" for r in failing[:3])
    timing = f"{elapsed:.1f}s" + (f" < {budget}s" if budget else "")
    if not in_time:
        detail = (detail + "; " if detail else "") + f"over time budget {budget}s"
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {title} [{len(rows)} checks, {timing}]"
    if detail:
        line += f" {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def _run(fn, *args, **kwargs):
    t0 = time.perf_counter()
    rows = fn(*args, **kwargs)
    return rows, time.perf_counter() - t0


def test_criterion_01_associativity():
    rows, dt = _run(V.suite_associativity, CFG)
    assert {r.case for r in rows} == {"S3", "D4", "S3/{e,(12)}", "D4/{e,(24)}"}
    _judge(1, "associativity on S3, D4, S3/K, D4/K, 200 triples, TV <= 1e-12", rows, dt, 5)


def test_criterion_02_bijection():
    rows, dt = _run(V.suite_bijection, CFG)
    _judge(2, "project/lift bijection, 200 measures per space, TV <= 1e-12", rows, dt, 5)


def test_criterion_03_preservation():
    rows, dt = _run(V.suite_preservation, CFG, cases=100)
    assert any("pinned-counterexample" in r.case for r in rows)
    _judge(3, "projection preserves convolution under each condition alone; pinned counterexample", rows, dt, 10)


def test_criterion_04_section_independence():
    rows, dt = _run(V.suite_section, CFG, runs=100)
    _judge(4, "section independence: dense TV <= 1e-12, empirical >= 95/100 energy passes", rows, dt)


def test_criterion_05_semigroup_law():
    rows, dt = _run(V.suite_semigroup, CFG)
    _judge(5, "semigroup law: CP on Z12, D4, S4 grid TV <= 1e-10; heat >= 95/100 passes", rows, dt, 180)


def test_criterion_06_decomposition():
    rows, dt = _run(V.suite_decompose, CFG)
    assert any("fault-injected" in r.case for r in rows)
    _judge(6, "H recovery, H-bi-invariance, rho_H absorption; fault detected", rows, dt)


def test_criterion_07_projection():
    rows, dt = _run(V.suite_project, CFG)
    _judge(7, "projected semigroups: heat on S2 >= 95/100, finite exact <= 1e-10", rows, dt)


def test_criterion_08_heat_numerics():
    rows, dt = _run(V.suite_heat, CFG)
    _judge(8, "heat kernel normalisation, Chapman-Kolmogorov quadrature, Haar limit", rows, dt)


def test_criterion_09_embedding():
    rows, dt = _run(V.suite_embed, CFG)
    _judge(9, "embedding certificates, cp roots n=2,3,6, DFT square root on Z4", rows, dt, 30)


def test_criterion_10_corollary():
    rows, dt = _run(V.suite_corollary, CFG)
    assert len(rows) == 2
    _judge(10, "embedded K-right invariant measures are K-bi-invariant, TV <= 1e-12", rows, dt)
