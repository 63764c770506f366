import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from haarconv import SPHERE, DomainError, Rotation, action, homogeneous_space, project, section
from haarconv.homogeneous import FiniteSection, SphereSection


def test_s3_cosets(X_S3, S3):
    assert X_S3.size == 3
    assert [X_S3.point_label(x) for x in range(3)] == ["eK", "(23)K", "(123)K"]
    # cosets g{e,(12)} computed by hand
    expected = {frozenset({"e", "(12)"}), frozenset({"(23)", "(132)"}), frozenset({"(123)", "(13)"})}
    got = {frozenset(S3.labels[i] for i in m) for m in X_S3.members}
    assert got == expected


def test_project_section_roundtrip(X_S3, X_D4):
    for X in (X_S3, X_D4):
        for x in range(X.size):
            assert project(section(x, X), X) == x
        for seed in range(5):
            sec = X.random_section(seed)
            assert all(X.project(sec(x)) == x for x in range(X.size))


def test_invalid_section_rejected(X_S3):
    with pytest.raises(ValueError):
        FiniteSection(X_S3, [0, 0, 0])


def test_action_is_a_group_action(X_D4):
    G = X_D4.G
    for g in range(G.order):
        for h in range(G.order):
            assert np.array_equal(X_D4.act(G.mul(g, h), np.arange(X_D4.size)),
                                  X_D4.act(g, X_D4.act(h, np.arange(X_D4.size))))
    assert all(X_D4.act(G.identity, x) == x for x in range(X_D4.size))


def test_action_matches_projection(X_S3):
    G = X_S3.G
    for g in range(G.order):
        for h in range(G.order):
            assert action(G.element(g), project(G.element(h), X_S3), X_S3) == X_S3.project(G.mul(g, h))


def test_wrong_group_element(X_S3, D4):
    with pytest.raises(DomainError):
        project(D4.element("(24)"), X_S3)


def test_trivial_subgroup_space(D4):
    X = homogeneous_space(D4)
    assert X.size == 8


# sphere

def test_sphere_section_on_x_axis():
    q = SphereSection()(np.array([1.0, 0, 0]))
    expected = Rotation.from_axis_angle([0, 1, 0], np.pi / 2)
    assert Rotation(q).isclose(expected)


def test_sphere_section_south_pole():
    q = SphereSection()(np.array([0.0, 0, -1]))
    assert np.allclose(SPHERE.project(q), [0, 0, -1])
    assert np.allclose(np.abs(q), [0, 1, 0, 0])


def test_rotation_about_x_moves_pole():
    R = Rotation.from_axis_angle([1, 0, 0], np.pi / 2)
    assert np.allclose(project(R, SPHERE), [0, -1, 0])


unit = st.tuples(*[st.floats(-1, 1, allow_nan=False)] * 3).filter(lambda v: np.linalg.norm(v) > 1e-3)


@settings(max_examples=200)
@given(unit, st.integers(0, 2**31))
def test_sphere_sections_are_right_inverses(v, seed):
    p = np.asarray(v) / np.linalg.norm(v)
    for sec in (SPHERE.default_section, SPHERE.random_section(seed)):
        q = sec(p)
        assert np.isclose(np.linalg.norm(q), 1.0)
        assert np.allclose(SPHERE.project(q), p, atol=1e-12)


def test_random_section_differs_from_default():
    p = np.array([0.3, -0.4, np.sqrt(1 - 0.25)])
    a, b = SPHERE.default_section(p), SPHERE.random_section(3)(p)
    assert not Rotation(a).isclose(Rotation(b), 1e-6)
