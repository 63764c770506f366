import math

import numpy as np
import pytest
from scipy import integrate, stats

from haarconv import (
    SPHERE,
    EmpiricalMeasure,
    HeatSemigroupSO3,
    Rotation,
    UnsupportedError,
    energy_distance_test,
    haar_empirical,
    heat_angle_cdf,
    heat_density,
    heat_sample,
    heat_truncation_bound,
)
from haarconv import so3
from haarconv.heat import heat_angle_density, required_l_max
from haarconv.so3 import haar_angle_cdf, haar_quaternions
from haarconv.verify import chapman_kolmogorov_quadrature


def direct_kernel(theta, t, l_max):
    """Character sum with U_2l(cos a) = sin((2l+1)a)/sin(a), away from theta = 0."""
    a = theta / 2
    return sum((2 * l + 1) * math.exp(-l * (l + 1) * t) * np.sin((2 * l + 1) * a) / np.sin(a)
               for l in range(l_max + 1))


def test_rotation_basics():
    R = Rotation.from_axis_angle([0, 0, 1], np.pi / 2)
    assert np.allclose(R.apply([1, 0, 0]), [0, 1, 0])
    assert np.isclose(R.angle, np.pi / 2)
    assert (R * R.inverse()).isclose(Rotation(np.array([1.0, 0, 0, 0])))
    assert R == Rotation(-R.q)
    assert np.allclose(R.matrix() @ R.matrix().T, np.eye(3))


def test_quaternion_product_matches_matrices(rng):
    p, q = haar_quaternions(50, rng), haar_quaternions(50, rng)
    pq = so3.qmul(p, q)
    for i in range(50):
        assert np.allclose(so3.to_matrix(pq[i]), so3.to_matrix(p[i]) @ so3.to_matrix(q[i]))


def test_haar_angle_ks():
    q = haar_quaternions(100_000, np.random.default_rng(2024))
    res = stats.kstest(so3.rotation_angle(q), haar_angle_cdf)
    assert res.pvalue > 0.01


def test_heat_density_at_identity():
    expected = sum((2 * l + 1) ** 2 * math.exp(-l * (l + 1)) for l in range(11))
    assert heat_density(0.0, 1.0, l_max=10) == pytest.approx(expected, rel=1e-14)
    assert heat_density(0.0, 1.0, l_max=10) == pytest.approx(2.280287586916253, rel=1e-14)


def test_heat_density_matches_direct_sum():
    theta = np.linspace(0.1, np.pi - 0.1, 50)
    for t in (0.1, 0.5, 2.0):
        assert np.allclose(heat_density(theta, t), direct_kernel(theta, t, 30), rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("t", [0.1, 0.5, 1.0, 10.0])
def test_angle_density_normalised(t):
    total, _ = integrate.quad(heat_angle_density, 0, np.pi, args=(t,), limit=200)
    assert abs(total - 1) < 1e-8
    assert heat_angle_cdf(np.pi, t) == pytest.approx(1.0, abs=1e-12)


def test_angle_cdf_matches_quadrature():
    for th in (0.3, 1.0, 2.5):
        val, _ = integrate.quad(heat_angle_density, 0, th, args=(0.4,))
        assert heat_angle_cdf(th, 0.4) == pytest.approx(val, abs=1e-12)


def test_large_time_is_haar():
    theta = np.linspace(0, np.pi, 100)
    assert np.allclose(heat_angle_cdf(theta, 50.0), haar_angle_cdf(theta), atol=1e-12)


def test_truncation_bound_small():
    assert heat_truncation_bound(0.05, 30) < 1e-6
    assert heat_truncation_bound(0.5) < 1e-100
    assert required_l_max(0.01) > 30


def test_small_time_rejected_for_density():
    with pytest.raises(UnsupportedError):
        heat_density(0.0, 0.01)
    with pytest.raises(UnsupportedError):
        heat_density(0.0, 1.0, l_max=5)


def test_heat_sampler_ks():
    q = heat_sample(0.5, 100_000, seed=11).points
    res = stats.kstest(so3.rotation_angle(q), lambda th: heat_angle_cdf(th, 0.5))
    assert res.pvalue > 0.01


def test_heat_sampler_small_time_and_zero():
    assert np.allclose(heat_sample(0.0, 5, seed=1).points, [1, 0, 0, 0])
    q = heat_sample(0.01, 20_000, seed=3).points
    # small-time angle scale: E[theta^2] ~ 6t for a 3-dimensional Brownian motion
    assert np.mean(so3.rotation_angle(q) ** 2) == pytest.approx(0.06, rel=0.1)


def test_heat_sampler_deterministic():
    assert np.array_equal(heat_sample(0.3, 100, seed=5).points, heat_sample(0.3, 100, seed=5).points)


def test_chapman_kolmogorov_oracle():
    theta = np.linspace(0, np.pi, 512)
    conv = chapman_kolmogorov_quadrature(0.5, 0.5, theta)
    assert np.max(np.abs(conv - heat_density(theta, 1.0))) < 1e-6
    # a different split of the same total time
    conv2 = chapman_kolmogorov_quadrature(0.3, 0.7, theta[::16])
    assert np.max(np.abs(conv2 - heat_density(theta[::16], 1.0))) < 1e-6


def test_large_time_sample_is_haar():
    res = energy_distance_test(HeatSemigroupSO3().sample(10.0, 10_000, 1), haar_empirical(10_000, 2))
    assert res.passed


# energy test

def test_energy_identical_ensembles():
    h = haar_empirical(2000, 1)
    res = energy_distance_test(h, h)
    assert res.statistic == 0.0 and res.passed


def test_energy_detects_shift():
    a = heat_sample(0.3, 5000, seed=1)
    b = heat_sample(0.45, 5000, seed=2)
    assert not energy_distance_test(a, b).passed


def test_energy_null_calibration():
    fails = sum(not energy_distance_test(haar_empirical(500, 2 * s), haar_empirical(500, 2 * s + 1), seed=s).passed
                for s in range(100))
    # expected 1 failure at level 0.01; 5 or more has probability below 0.004
    assert fails <= 4


def test_energy_needs_particles():
    with pytest.raises(UnsupportedError):
        energy_distance_test(haar_empirical(50, 1), haar_empirical(500, 2))


def test_energy_metric_on_sphere():
    pts = np.random.default_rng(0).standard_normal((400, 3))
    a = EmpiricalMeasure(SPHERE, pts)
    b = EmpiricalMeasure(SPHERE, np.abs(pts))
    assert energy_distance_test(a, a).passed
    assert not energy_distance_test(a, b).passed
