import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from haarconv import (
    SO3,
    SPHERE,
    DenseMeasure,
    DomainError,
    EmpiricalMeasure,
    FiniteHomogeneousSpace,
    InvarianceError,
    Rotation,
    Subgroup,
    average_k,
    builtin_group,
    convolve,
    convolve_homog,
    convolve_homog_kinv,
    convolve_power,
    density_convolve,
    density_of,
    energy_distance_test,
    haar_dense,
    haar_empirical,
    is_invariant,
    lift_measure,
    measure_from_density,
    project_measure,
    pushforward,
    tv_distance,
)
from haarconv.measures import identity_measure


def naive_group_conv(mu, nu):
    G = mu.carrier
    out = np.zeros(G.order)
    for g in range(G.order):
        for h in range(G.order):
            out[G.mul(g, h)] += mu.weights[g] * nu.weights[h]
    return out


def naive_homog_conv(mu, nu):
    """Average over k of the law of S(x) k S(y) K, by explicit loops."""
    X = mu.carrier
    G, reps = X.G, X.default_section.reps
    out = np.zeros(X.size)
    for x in range(X.size):
        for y in range(X.size):
            for k in X.K.members:
                g = G.mul(G.mul(reps[x], k), reps[y])
                out[X.coset_of[g]] += mu.weights[x] * nu.weights[y] / X.K.order
    return out


def test_z4_example():
    Z4 = builtin_group("Z4")
    u = DenseMeasure(Z4, [0.5, 0.5, 0, 0])
    assert np.allclose(convolve(u, u).weights, [0.25, 0.5, 0.25, 0.0], atol=1e-15)


def test_z12_binomial():
    Z12 = builtin_group("Z12")
    u = DenseMeasure(Z12, [0.5, 0.5] + [0] * 10)
    w = convolve_power(u, 4).weights
    assert np.allclose(w[:5], stats.binom.pmf(np.arange(5), 4, 0.5), atol=1e-15)
    assert np.all(w[5:] == 0)


def test_point_masses_multiply():
    Z12 = builtin_group("Z12")
    out = convolve(DenseMeasure.point(Z12, 3), DenseMeasure.point(Z12, 5))
    assert tv_distance(out, DenseMeasure.point(Z12, 8)) == 0.0


def test_tv_examples():
    Z2 = builtin_group("Z2")
    assert tv_distance(DenseMeasure.point(Z2, 0), DenseMeasure.point(Z2, 1)) == 1.0
    assert tv_distance(DenseMeasure.uniform(Z2), DenseMeasure.point(Z2, 0)) == 0.5


def test_group_conv_matches_naive(rng, S3, D4):
    for G in (S3, D4, builtin_group("S4")):
        for _ in range(20):
            mu, nu = DenseMeasure.random(G, rng, 0.3), DenseMeasure.random(G, rng)
            assert np.allclose(convolve(mu, nu).weights, naive_group_conv(mu, nu), atol=1e-15)


def test_homog_conv_matches_naive(rng, X_S3, X_D4):
    for X in (X_S3, X_D4):
        for _ in range(20):
            mu, nu = DenseMeasure.random(X, rng), DenseMeasure.random(X, rng, 0.3)
            assert np.allclose(convolve(mu, nu).weights, naive_homog_conv(mu, nu), atol=1e-15)


def test_point_mass_examples_on_coset_space(X_S3, S3):
    x123 = X_S3.project(S3.index_of("(123)"))
    o = X_S3.origin
    d_x, d_o = DenseMeasure.point(X_S3, x123), DenseMeasure.point(X_S3, o)
    # delta_o is a right identity
    assert tv_distance(convolve(d_x, d_o), d_x) == 0.0
    # on the left it averages over K: half (123)K, half (12)(123)K
    other = X_S3.project(S3.mul(S3.index_of("(12)"), S3.index_of("(123)")))
    assert other != x123
    expected = np.zeros(3)
    expected[[x123, other]] = 0.5
    assert np.allclose(convolve(d_o, d_x).weights, expected)


def test_density_convolution_agrees(rng, X_S3, X_D4):
    for X in (X_S3, X_D4):
        mu, nu = DenseMeasure.random(X, rng), DenseMeasure.random(X, rng)
        f = density_convolve(density_of(mu), density_of(nu), X)
        assert tv_distance(measure_from_density(f, X), convolve(mu, nu)) < 1e-14


def test_kinv_fast_path(rng, X_D4):
    mu = DenseMeasure.random(X_D4, rng)
    nu = convolve(identity_measure(X_D4), DenseMeasure.random(X_D4, rng))
    assert tv_distance(convolve_homog_kinv(mu, nu), convolve_homog(mu, nu)) < 1e-14
    with pytest.raises(InvarianceError):
        convolve_homog_kinv(mu, DenseMeasure.point(X_D4, 1))


def test_pushforward_left_translate(S3):
    g, h = S3.index_of("(12)"), S3.index_of("(123)")
    out = pushforward(DenseMeasure.point(S3, h), "left", g)
    assert out.weights[S3.mul(g, h)] == 1.0


def test_right_average_is_convolution_with_haar(rng, D4):
    K = Subgroup.generated_by(D4, ["(24)"])
    mu = DenseMeasure.random(D4, rng)
    assert tv_distance(average_k(mu, K, "right"), convolve(mu, haar_dense(K))) < 1e-15
    assert tv_distance(average_k(mu, K, "left"), convolve(haar_dense(K), mu)) < 1e-15


def test_lift_project(rng, X_S3):
    nu = DenseMeasure.random(X_S3, rng)
    mu = lift_measure(nu)
    assert tv_distance(project_measure(mu, X_S3), nu) < 1e-15
    assert is_invariant(mu, "right", X_S3.K).ok
    assert not is_invariant(DenseMeasure.point(X_S3.G, 1), "right", X_S3.K).ok


def test_convolve_power_zero_and_identity(rng, D4):
    mu = DenseMeasure.random(D4, rng)
    assert tv_distance(convolve_power(mu, 0), identity_measure(D4)) == 0
    three = naive_group_conv(DenseMeasure(D4, naive_group_conv(mu, mu)), mu)
    assert np.allclose(convolve_power(mu, 3).weights, three, atol=1e-15)


def test_carrier_mismatch(S3, D4):
    with pytest.raises(DomainError):
        convolve(DenseMeasure.uniform(S3), DenseMeasure.uniform(D4))


def test_negative_weights_rejected(S3):
    with pytest.raises(ValueError):
        DenseMeasure(S3, [1.5, -0.5, 0, 0, 0, 0])


def weight_vectors(n):
    return st.lists(st.floats(0, 1), min_size=n, max_size=n).filter(lambda w: sum(w) > 1e-3)


@settings(max_examples=60)
@given(weight_vectors(8), weight_vectors(8), weight_vectors(8))
def test_group_convolution_properties(a, b, c):
    D4 = builtin_group("D4")
    mu, nu, la = DenseMeasure(D4, a), DenseMeasure(D4, b), DenseMeasure(D4, c)
    out = convolve(mu, nu)
    assert abs(out.weights.sum() - 1) < 1e-12 and out.weights.min() >= 0
    assert tv_distance(convolve(convolve(mu, nu), la), convolve(mu, convolve(nu, la))) < 1e-12
    e = identity_measure(D4)
    assert tv_distance(convolve(e, mu), mu) < 1e-15
    assert tv_distance(convolve(mu, haar_dense(Subgroup.whole(D4))), DenseMeasure.uniform(D4)) < 1e-15


@settings(max_examples=60)
@given(weight_vectors(4), weight_vectors(4), st.integers(0, 2**31))
def test_coset_convolution_properties(a, b, seed):
    D4 = builtin_group("D4")
    X = FiniteHomogeneousSpace(Subgroup.generated_by(D4, ["(24)"]))
    mu, nu = DenseMeasure(X, a), DenseMeasure(X, b)
    out = convolve(mu, nu)
    assert tv_distance(out, convolve(mu, nu, X.random_section(seed))) < 1e-12
    # projection of lifts: mu * nu = pi(lift(mu) * lift(nu))
    assert tv_distance(out, project_measure(convolve(lift_measure(mu), lift_measure(nu)), X)) < 1e-12
    # K-invariance of the output's right factor is inherited
    assert is_invariant(convolve(identity_measure(X), nu), "action").ok


# empirical

def test_haar_absorbs_on_so3():
    haar = haar_empirical(5000, 1)
    R = Rotation.from_axis_angle([1, 2, 3], 0.7)
    point_cloud = EmpiricalMeasure(SO3, np.tile(R.q, (200, 1)))
    out = convolve(point_cloud, haar, particles=5000, seed=2)
    assert energy_distance_test(out, haar_empirical(5000, 3), seed=4).passed


def test_empirical_point_convolution_is_product():
    A = Rotation.from_axis_angle([0, 0, 1], 0.3)
    B = Rotation.from_axis_angle([1, 0, 0], 1.1)
    out = convolve(EmpiricalMeasure(SO3, [A.q]), EmpiricalMeasure(SO3, [B.q]), particles=3)
    assert all(Rotation(q).isclose(A * B) for q in out.points)


def test_empirical_zero_weights_dropped():
    m = EmpiricalMeasure(SPHERE, [[0, 0, 1], [1, 0, 0]], [1.0, 0.0])
    assert len(m) == 1


def test_haar_is_conjugation_invariant_statistically():
    assert is_invariant(haar_empirical(3000, 5), "conjugate", seed=1).ok
    tilted = EmpiricalMeasure(SO3, np.tile(Rotation.from_axis_angle([1, 0, 0], 1.0).q, (500, 1)))
    assert not is_invariant(tilted, "conjugate", seed=1).ok
