import numpy as np
import pytest
from scipy import stats

from haarconv import (
    CompoundPoissonSemigroup,
    DenseMeasure,
    FiniteHomogeneousSpace,
    InvarianceError,
    PreconditionError,
    StructureError,
    Subgroup,
    TabulatedFamily,
    average_k,
    builtin_group,
    convolve,
    decompose_homogeneous,
    decompose_semigroup,
    find_idempotent,
    haar_dense,
    idempotent_subgroup,
    lift_semigroup,
    markov_skeleton,
    project_measure,
    project_semigroup,
    semigroup_check,
    tv_distance,
)
from haarconv.semigroup import ProjectedFamily, continuity_check, parse_grid


def wrapped_poisson(m, lam, n_max=400):
    out = np.zeros(m)
    np.add.at(out, np.arange(n_max) % m, stats.poisson.pmf(np.arange(n_max), lam))
    return out


@pytest.fixture
def Z12():
    return builtin_group("Z12")


def test_wrapped_poisson(Z12):
    sg = CompoundPoissonSemigroup(Z12, 2.0, DenseMeasure.point(Z12, 1))
    for t in (0.1, 1.0, 3.7):
        assert np.allclose(sg.at(t).weights, wrapped_poisson(12, 2.0 * t), atol=1e-14)


def test_time_zero_and_rate_zero(Z12):
    sg = CompoundPoissonSemigroup(Z12, 1.5, DenseMeasure.point(Z12, 5))
    assert sg.at(0.0).weights[0] == 1.0
    still = CompoundPoissonSemigroup(Z12, 0.0, DenseMeasure.point(Z12, 5))
    assert still.at(4.0).weights[0] == 1.0


def test_semigroup_law(rng, D4):
    sg = CompoundPoissonSemigroup(D4, 1.3, DenseMeasure.random(D4, rng))
    for s, t in [(0.1, 0.2), (0.7, 1.3), (2.0, 2.0)]:
        assert semigroup_check(sg, s, t).passed
    # TV(mu_t, mu_0) is about rate * t for small t
    assert continuity_check(sg, 1e-7).passed
    assert not continuity_check(sg, 1e-5).passed


def test_negative_rate_rejected(Z12):
    with pytest.raises(ValueError):
        CompoundPoissonSemigroup(Z12, -1.0, DenseMeasure.point(Z12, 1))


def test_initial_must_be_idempotent(D4):
    with pytest.raises(StructureError):
        CompoundPoissonSemigroup(D4, 1.0, DenseMeasure.uniform(D4), DenseMeasure.point(D4, 1))


def test_initial_must_commute_with_jump(D4):
    K = Subgroup.generated_by(D4, ["(24)"])
    with pytest.raises(StructureError):
        CompoundPoissonSemigroup(D4, 1.0, DenseMeasure.point(D4, D4.index_of("(1234)")), haar_dense(K))


def test_coset_family_needs_invariant_jump(X_S3):
    with pytest.raises(InvarianceError):
        CompoundPoissonSemigroup(X_S3, 1.0, DenseMeasure.point(X_S3, 1))
    sg = CompoundPoissonSemigroup(X_S3, 1.0, convolve(DenseMeasure.point(X_S3, X_S3.origin),
                                                      DenseMeasure.point(X_S3, 1)))
    assert semigroup_check(sg, 0.4, 0.9).passed


def test_parse_grid():
    assert len(parse_grid("0:2:0.1")) == 21
    assert parse_grid("0:2:0.1")[-1] == 2.0
    assert parse_grid("0.5, 1") == (0.5, 1.0)
    with pytest.raises(ValueError):
        parse_grid("1:0:0.1")
    with pytest.raises(ValueError):
        parse_grid("-1,2")


def test_decompose_recovers_h(rng, D4):
    H = Subgroup.generated_by(D4, ["(13)(24)"])
    sg = CompoundPoissonSemigroup(D4, 1.0, DenseMeasure.random(D4, rng), haar_dense(H))
    rep = decompose_semigroup(sg)
    assert rep.H.members == H.members and rep.passed


def test_decompose_flags_fault(rng, D4):
    H = Subgroup.generated_by(D4, ["(13)(24)"])
    sg = CompoundPoissonSemigroup(D4, 1.0, DenseMeasure.random(D4, rng), haar_dense(H))
    tab = TabulatedFamily.from_family(sg, [0.0, 0.5, 1.0])
    assert decompose_semigroup(tab, [0.0, 0.5, 1.0]).passed
    bad = tab.replaced(0.5, DenseMeasure.point(D4, 1))
    rep = decompose_semigroup(bad, [0.0, 0.5, 1.0])
    assert not rep.passed and rep.max_deviation > 0.1


def test_decompose_homogeneous(rng, X_D4, D4):
    H = Subgroup.generated_by(D4, ["(24)", "(13)"])
    jump = average_k(DenseMeasure.random(D4, rng), H, "conjugate")
    fam = ProjectedFamily(CompoundPoissonSemigroup(D4, 0.9, jump, haar_dense(H)), X_D4)
    rep = decompose_homogeneous(fam)
    assert rep.passed and rep.H.members == H.members


def test_project_and_lift(rng):
    S4 = builtin_group("S4")
    K = Subgroup.generated_by(S4, ["(12)"])
    X = FiniteHomogeneousSpace(K)
    jump = average_k(DenseMeasure.random(S4, rng), K, "conjugate")
    nu = project_semigroup(CompoundPoissonSemigroup(S4, 1.0, jump), X)
    assert semigroup_check(nu, 0.3, 0.6).passed
    with pytest.raises(PreconditionError):
        project_semigroup(CompoundPoissonSemigroup(S4, 1.0, DenseMeasure.random(S4, rng)), X)
    # lifting needs the K-bi-invariant version started at rho_K
    bi = CompoundPoissonSemigroup(S4, 1.0, jump, haar_dense(K))
    lifted = lift_semigroup(ProjectedFamily(bi, X))
    assert all(r.passed for r in lifted.report)
    assert tv_distance(lifted.at(0.8), bi.at(0.8)) < 1e-12


def test_lift_rejects_non_semigroup(X_S3):
    tab = TabulatedFamily(X_S3, {0.0: DenseMeasure.point(X_S3, X_S3.origin), 1.0: DenseMeasure.uniform(X_S3),
                                 2.0: DenseMeasure.point(X_S3, 1)})
    with pytest.raises(PreconditionError):
        lift_semigroup(tab, [0.0, 1.0])


def test_projection_of_family_matches_measurewise(rng, X_S3, S3):
    K = X_S3.K
    jump = average_k(DenseMeasure.random(S3, rng), K, "conjugate")
    sg = CompoundPoissonSemigroup(S3, 1.0, jump)
    assert tv_distance(ProjectedFamily(sg, X_S3).at(0.7), project_measure(sg.at(0.7), X_S3)) == 0.0


def test_markov_skeleton_marginals(Z12):
    sg = CompoundPoissonSemigroup(Z12, 1.0, DenseMeasure(Z12, [0, 0.6, 0.4] + [0] * 9))
    times = (0.0, 0.5, 1.5)
    path = markov_skeleton(sg, times, seed=3, n_paths=40_000)
    for i, t in enumerate(times):
        freq = np.bincount(path.elements[:, i], minlength=12) / 40_000
        assert tv_distance(DenseMeasure(Z12, freq), sg.at(t)) < 0.02


def test_markov_skeleton_rejects_bad_times(Z12):
    sg = CompoundPoissonSemigroup(Z12, 1.0, DenseMeasure.point(Z12, 1))
    with pytest.raises(ValueError):
        markov_skeleton(sg, (0.0, 0.0))


@pytest.mark.parametrize("gens", [["(24)"], ["(1234)"], ["(13)(24)"], ["(24)", "(13)"]])
def test_find_idempotent_generates_subgroup(D4, gens):
    w = np.zeros(8)
    for g in gens:
        w[D4.index_of(g)] = 1.0
    P = find_idempotent(DenseMeasure(D4, w))
    H = idempotent_subgroup(P, 1e-9)
    assert H.members == Subgroup.generated_by(D4, gens).members


def test_idempotent_subgroup_rejects_non_idempotent(D4):
    with pytest.raises(StructureError):
        idempotent_subgroup(DenseMeasure(D4, [0.7, 0.3, 0, 0, 0, 0, 0, 0]))
