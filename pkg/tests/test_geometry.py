import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from cba.problems.core.enumerations import GeometryKind
from cba.problems.core.exceptions import DimensionMismatchError, InvalidParameterError, NonFiniteError
from cba.problems.core.geometry import (ConeGeometry, LiftedVector, cone_membership, ellipsoid_containment,
                                        hyperplane_basis, polar_membership, project_cone, project_simplex,
                                        simplex_cone_root)
from cba.problems.core.minimizers import project_onto

BUILDERS = {
    GeometryKind.SIMPLEX: ConeGeometry.simplex,
    GeometryKind.L1_BALL: ConeGeometry.l1_ball,
    GeometryKind.L2_BALL: ConeGeometry.l2_ball,
    GeometryKind.LINF_BALL: ConeGeometry.linf_ball,
}

def close(u, v, tol):
    return (u - v).norm() <= tol

def random_lifted(rng, n):
    return LiftedVector(rng.uniform(-10, 10), rng.uniform(-10, 10, n))

@pytest.mark.parametrize("u, cone, polar", [
    (LiftedVector(1.0, [0.5, 0.5]), LiftedVector(1.0, [0.5, 0.5]), LiftedVector(0.0, [0.0, 0.0])),
    (LiftedVector(-1.0, [-2.0, -3.0]), LiftedVector(0.0, [0.0, 0.0]), LiftedVector(-1.0, [-2.0, -3.0])),
    (LiftedVector(0.0, [1.0, -1.0]), LiftedVector(0.5, [0.5, 0.0]), LiftedVector(-0.5, [0.5, -1.0])),
])
def test_project_simplex_cone_examples(u, cone, polar):
    pair = project_cone(ConeGeometry.simplex(2), u)
    assert close(pair.onto_cone, cone, 1e-12)
    assert close(pair.onto_polar, polar, 1e-12)

def test_project_l2_cone_examples():
    geometry = ConeGeometry.l2_ball(2)
    pair = project_cone(geometry, LiftedVector(0.0, [3.0, 4.0]))
    assert close(pair.onto_cone, LiftedVector(2.5, [1.5, 2.0]), 1e-12)
    assert close(pair.onto_polar, LiftedVector(-2.5, [1.5, 2.0]), 1e-12)

    inside = LiftedVector(5.0, [3.0, 4.0])
    assert close(project_cone(geometry, inside).onto_cone, inside, 0.0)

def test_project_l2_cone_zero_hat():
    geometry = ConeGeometry.l2_ball(3)
    pair = project_cone(geometry, LiftedVector(-2.0, [0.0, 0.0, 0.0]))
    assert close(pair.onto_polar, LiftedVector(-2.0, [0.0, 0.0, 0.0]), 0.0)
    assert close(pair.onto_cone, LiftedVector.zeros(3), 0.0)

def test_project_linf_cone_in_dimension_one():
    pair = project_cone(ConeGeometry.linf_ball(1), LiftedVector(0.0, [2.0]))
    assert close(pair.onto_cone, LiftedVector(1.0, [1.0]), 1e-12)

def test_ball_hyperplane_uses_reference_dimension():
    geometry = ConeGeometry.ball_hyperplane(4, radius=0.1)
    assert geometry.reference_dimension == 3
    pair = project_cone(geometry, LiftedVector(0.0, [3.0, 4.0, 0.0]))
    assert close(pair.onto_cone, LiftedVector(2.5, [1.5, 2.0, 0.0]), 1e-12)
    with pytest.raises(DimensionMismatchError):
        project_cone(geometry, LiftedVector(0.0, [1.0, 2.0, 3.0, 4.0]))

def test_project_cone_rejects_non_finite():
    with pytest.raises(NonFiniteError):
        project_cone(ConeGeometry.simplex(2), LiftedVector(math.nan, [0.0, 1.0]))

@pytest.mark.parametrize("geometry, u, expected", [
    (ConeGeometry.simplex(2), LiftedVector(-1.0, [-2.0, -3.0]), True),
    (ConeGeometry.simplex(2), LiftedVector(0.0, [1.0, -1.0]), False),
    (ConeGeometry.l2_ball(2), LiftedVector(-2.5, [1.5, 2.0]), True),
])
def test_polar_membership(geometry, u, expected):
    assert polar_membership(geometry, u) is expected

@pytest.mark.parametrize("geometry, u, expected", [
    (ConeGeometry.simplex(2), LiftedVector(2.0, [1.0, 1.0]), True),
    (ConeGeometry.simplex(2), LiftedVector(0.0, [0.0, 0.0]), True),
    (ConeGeometry.l2_ball(2), LiftedVector(1.0, [0.8, 0.8]), False),
])
def test_cone_membership(geometry, u, expected):
    assert cone_membership(geometry, u) is expected

@pytest.mark.parametrize("tilde, hat, root", [
    (0.0, [1.0, -1.0], -0.5),
    (0.5, [-1.0, 0.0], 0.25),
    (1.0, [0.0, 0.0], 1.0 / 3.0),
])
def test_simplex_cone_root(tilde, hat, root):
    value = simplex_cone_root(LiftedVector(tilde, hat))
    assert value == pytest.approx(root, abs=1e-12)
    residual = value + np.maximum(np.asarray(hat) + value, 0.0).sum() - tilde
    assert abs(residual) <= 1e-10

@pytest.mark.parametrize("v, expected", [
    ([0.6, 0.6], [0.5, 0.5]),
    ([2.0, -1.0], [1.0, 0.0]),
    ([0.2, 0.3, 0.5], [0.2, 0.3, 0.5]),
])
def test_project_simplex(v, expected):
    assert np.allclose(project_simplex(np.array(v)), expected, atol=1e-12)

def test_project_simplex_rejects_empty():
    with pytest.raises(InvalidParameterError):
        project_simplex(np.array([]))

def test_hyperplane_basis():
    assert np.allclose(hyperplane_basis(2)[:, 0], math.sqrt(0.5) * np.array([1.0, -1.0]))
    basis = hyperplane_basis(3)
    assert np.allclose(basis[:, 1], math.sqrt(2.0 / 3.0) * np.array([0.5, 0.5, -1.0]))
    for m in (2, 5, 17):
        basis = hyperplane_basis(m)
        assert basis.shape == (m, m - 1)
        assert np.allclose(basis.T @ basis, np.eye(m - 1), atol=1e-12)
        assert np.allclose(basis.T @ np.ones(m), 0.0, atol=1e-12)
    with pytest.raises(InvalidParameterError):
        hyperplane_basis(1)

def test_ellipsoid_containment():
    assert ellipsoid_containment(np.full(4, 0.25), 0.1)
    # 1 / (2m) squared radius leaves the simplex for m = 50
    assert not ellipsoid_containment(np.full(50, 0.02), math.sqrt(1.0 / 100.0))

def test_ball_hyperplane_rejects_center_off_the_hyperplane():
    with pytest.raises(InvalidParameterError):
        ConeGeometry.ball_hyperplane(3, center=[0.5, 0.5, 0.5], radius=0.1)

@pytest.mark.parametrize("geometry, c, expected", [
    (ConeGeometry.simplex(3), [3.0, -1.0, 2.0], -1.0),
    (ConeGeometry.l2_ball(2), [3.0, 4.0], -5.0),
    (ConeGeometry.l1_ball(2, radius=2.0), [3.0, -4.0], -8.0),
    (ConeGeometry.linf_ball(2, center=[1.0, 1.0]), [3.0, -4.0], -8.0),
])
def test_linear_minimum(geometry, c, expected):
    assert geometry.linear_minimum(np.array(c)) == pytest.approx(expected)

def test_reference_maps_preserve_the_linear_objective():
    rng = np.random.default_rng(3)
    geometry = ConeGeometry.ball_hyperplane(6, radius=0.2)
    f = rng.normal(size=6)
    z = rng.normal(size=5)
    x = geometry.to_decision(z)
    assert x.sum() == pytest.approx(1.0)
    assert f @ (x - geometry.center) == pytest.approx(geometry.reference_loss(f) @ z)
    assert np.allclose(geometry.from_decision(x), z)

lifted = st.integers(min_value=1, max_value=12).flatmap(lambda n: st.tuples(
    st.floats(-10, 10), arrays(np.float64, n, elements=st.floats(-10, 10))))

@pytest.mark.parametrize("kind", list(BUILDERS))
@settings(max_examples=150, deadline=None)
@given(data=lifted)
def test_moreau_decomposition(kind, data):
    tilde, hat = data
    geometry = BUILDERS[kind](hat.shape[0])
    u = LiftedVector(tilde, hat)
    pair = project_cone(geometry, u)
    scale = 1.0 + u.norm()
    assert ((pair.onto_cone + pair.onto_polar) - u).norm() <= 1e-8 * scale
    assert abs(pair.onto_cone.dot(pair.onto_polar)) <= 1e-8 * (1.0 + u.norm() ** 2)
    assert cone_membership(geometry, pair.onto_cone, 1e-8)
    assert polar_membership(geometry, pair.onto_polar, 1e-8)
    assert pair.onto_cone.norm() <= u.norm() + 1e-12

@pytest.mark.parametrize("kind", list(BUILDERS))
def test_projection_is_idempotent_and_positively_homogeneous(kind):
    rng = np.random.default_rng(11)
    for _ in range(200):
        n = int(rng.integers(2, 20))
        geometry = BUILDERS[kind](n)
        u = random_lifted(rng, n)
        onto_cone = project_cone(geometry, u).onto_cone
        assert close(project_cone(geometry, onto_cone).onto_cone, onto_cone, 1e-9 * (1.0 + u.norm()))
        for c in (0.5, 2.0, 100.0):
            scaled = project_cone(geometry, u.scaled(c)).onto_cone
            assert close(scaled, onto_cone.scaled(c), 1e-8 * c * (1.0 + u.norm()))

def test_cone_points_of_the_simplex():
    rng = np.random.default_rng(5)
    geometry = ConeGeometry.simplex(6)
    for _ in range(100):
        x = rng.dirichlet(np.ones(6))
        u = LiftedVector(1.0, x).scaled(rng.uniform(0.1, 10.0))
        assert polar_membership(geometry, -u)
        assert (u - project_cone(geometry, u).onto_polar).norm() == pytest.approx(u.norm(), abs=1e-9)

def _simplex_cone_oracle(u, iterations=5000):
    # cone(1 x simplex) = {(sum z, z) : z >= 0}
    z = np.zeros(u.dimension)
    step = 1.0 / (2.0 * (u.dimension + 1))
    for _ in range(iterations):
        gradient = 2.0 * (z.sum() - u.tilde) + 2.0 * (z - u.hat)
        z = np.maximum(z - step * gradient, 0.0)
    return LiftedVector(z.sum(), z)

def _lifted_ball_oracle(geometry, u, iterations=5000):
    # projected gradient on alpha >= 0 for min over alpha >= 0 and z in X of ||alpha (kappa, z) - u||^2,
    # the inner minimum is z = ball projection of hat / alpha
    kappa = geometry.kappa
    step = 1.0 / (4.0 * kappa ** 2)
    alpha = 1.0
    for _ in range(iterations):
        z = project_onto(geometry, u.hat / max(alpha, 1e-12))
        gradient = 2.0 * kappa * (kappa * alpha - u.tilde) + 2.0 * float(z @ (alpha * z - u.hat))
        updated = max(alpha - step * gradient, 0.0)
        if abs(updated - alpha) <= 1e-15 * (1.0 + alpha):
            alpha = updated
            break
        alpha = updated
    z = project_onto(geometry, u.hat / max(alpha, 1e-12))
    return LiftedVector(kappa * alpha, alpha * z)

@pytest.mark.parametrize("kind", list(BUILDERS))
def test_projection_matches_independent_oracle(kind):
    rng = np.random.default_rng(2024)
    for _ in range(100):
        n = int(rng.integers(2, 21))
        geometry = BUILDERS[kind](n)
        u = random_lifted(rng, n)
        if kind == GeometryKind.SIMPLEX:
            expected = _simplex_cone_oracle(u)
        else:
            expected = _lifted_ball_oracle(geometry, u)
        assert close(project_cone(geometry, u).onto_cone, expected, 1e-4)

@pytest.mark.slow
@pytest.mark.parametrize("kind", list(BUILDERS))
def test_moreau_identity_on_many_random_vectors(kind):
    rng = np.random.default_rng(7)
    for _ in range(10000):
        n = int(rng.integers(2, 51))
        u = random_lifted(rng, n)
        pair = project_cone(BUILDERS[kind](n), u)
        assert ((pair.onto_cone + pair.onto_polar) - u).norm() <= 1e-8 * (1.0 + u.norm())
        assert abs(pair.onto_cone.dot(pair.onto_polar)) <= 1e-8 * (1.0 + u.norm() ** 2)
