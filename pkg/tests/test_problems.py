import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cba.problems.core.data_io import generate_matrix
from cba.problems.core.exceptions import DimensionMismatchError, InfeasiblePointError, InvalidParameterError, NonFiniteError
from cba.problems.core.geometry import ellipsoid_containment
from cba.problems.dro_internal import DroInstance, dro_bounds, dro_losses, dro_worst_case_loss, dro_x_subgradient
from cba.problems.matrix_game_internal import matrix_bounds, matrix_duality_gap, matrix_gradients

from conftest import defaults, dro_instance, matrix_game

def small_dro(features, labels, **kwargs):
    return DroInstance(np.array(features, dtype=float), np.array(labels, dtype=float), config=defaults(), **kwargs)

def random_dro(rng, n, m):
    features = rng.normal(size=(m, n))
    labels = rng.choice([-1.0, 1.0], size=m)
    return small_dro(features, labels)

def sample_ambiguity_set(instance, rng, count):
    """Uniform points of the slice y0 + epsilon * B s with ||s|| <= 1."""
    geometry = instance.y_geometry
    directions = rng.normal(size=(count, geometry.dimension - 1))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = rng.uniform(size=(count, 1)) ** (1.0 / (geometry.dimension - 1))
    return geometry.center + instance.epsilon * (radii * directions) @ geometry.basis.T

class RecordingDro(DroInstance):

    def __init__(self, *args, scale=1.0, **kwargs):
        super().__init__(*args, **kwargs)
        self.scale = scale
        self.xs, self.ys = [], []
        self.x_norms, self.y_norms = [], []

    def x_subgradient(self, x, y):
        self.xs.append(x.copy())
        self.ys.append(y.copy())
        loss = self.scale * super().x_subgradient(x, y)
        self.x_norms.append(float(np.linalg.norm(loss)))
        return loss

    def y_subgradient(self, x, y):
        loss = self.scale * super().y_subgradient(x, y)
        self.y_norms.append(float(np.linalg.norm(loss)))
        return loss

def recording_dro(scale=1.0, n=50, m=50, seed=0):
    base = dro_instance(n, m, seed)
    return RecordingDro(base.dataset.features, base.dataset.labels, scale=scale, config=defaults())

def test_matrix_gradients():
    identity = matrix_game(np.eye(2))
    f, g = matrix_gradients(identity, [0.5, 0.5], [0.5, 0.5])
    assert np.array_equal(f, [0.5, 0.5]) and np.array_equal(g, [0.5, 0.5])
    f, g = matrix_gradients(matrix_game(np.zeros((2, 3))), [0.5, 0.5], [0.2, 0.3, 0.5])
    assert not f.any() and not g.any()
    f, _ = matrix_gradients(matrix_game([[1.0, 2.0], [3.0, 4.0]]), [0.5, 0.5], [1.0, 0.0])
    assert np.array_equal(f, [1.0, 3.0])
    with pytest.raises(DimensionMismatchError):
        matrix_gradients(identity, [1.0, 0.0, 0.0], [0.5, 0.5])

def test_matrix_game_rejects_bad_payoffs():
    with pytest.raises(NonFiniteError):
        matrix_game([[1.0, np.inf]])
    with pytest.raises(InvalidParameterError):
        matrix_game([1.0, 2.0])

def test_matrix_duality_gap(pennies):
    assert matrix_duality_gap(pennies, [0.5, 0.5], [0.5, 0.5]) == 0.0
    assert matrix_duality_gap(matrix_game([[1.0, 0.0], [0.0, 0.0]]), [1.0, 0.0], [1.0, 0.0]) == 1.0
    with pytest.raises(InfeasiblePointError):
        matrix_duality_gap(pennies, [0.7, 0.7], [0.5, 0.5])

def test_duality_gap_at_a_symmetric_equilibrium():
    rock_paper_scissors = matrix_game([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])
    uniform = np.full(3, 1.0 / 3.0)
    assert abs(matrix_duality_gap(rock_paper_scissors, uniform, uniform)) <= 1e-12

@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_duality_gap_is_nonnegative(seed):
    rng = np.random.default_rng(seed)
    game = matrix_game(rng.normal(size=(4, 6)))
    assert matrix_duality_gap(game, rng.dirichlet(np.ones(4)), rng.dirichlet(np.ones(6))) >= -1e-12

def test_matrix_bounds():
    loss_x, loss_y, diameter_x, diameter_y = matrix_bounds(matrix_game([[3.0, 0.0], [4.0, 0.0]]))
    assert (loss_x, loss_y) == (5.0, 4.0)
    assert diameter_x == diameter_y == pytest.approx(math.sqrt(2.0))

def test_dro_losses():
    instance = small_dro([[1.0, 0.0], [0.0, 1.0]], [1.0, 1.0])
    assert np.allclose(dro_losses(instance, np.zeros(2)), math.log(2.0))
    assert dro_losses(instance, [1.0, 0.0])[0] == pytest.approx(0.313262, abs=1e-6)
    flipped = small_dro([[1.0, 0.0], [0.0, 1.0]], [-1.0, 1.0])
    losses = dro_losses(flipped, [1000.0, 0.0])
    assert np.all(np.isfinite(losses))
    assert losses[0] == pytest.approx(1000.0)
    with pytest.raises(NonFiniteError):
        dro_losses(instance, [np.nan, 0.0])
    with pytest.raises(DimensionMismatchError):
        dro_losses(instance, np.zeros(3))

def test_dro_subgradient_examples():
    rng = np.random.default_rng(3)
    instance = random_dro(rng, 4, 6)
    y = rng.dirichlet(np.ones(6))
    features, labels = instance.dataset.features, instance.dataset.labels
    expected = -0.5 * (y * labels) @ features
    assert np.allclose(dro_x_subgradient(instance, np.zeros(4), y), expected)

    x = rng.normal(size=4)
    margin = labels[2] * features[2] @ x
    gradient = -labels[2] * features[2] / (1.0 + math.exp(margin))
    assert np.allclose(dro_x_subgradient(instance, x, np.eye(6)[2]), gradient)
    with pytest.raises(DimensionMismatchError):
        dro_x_subgradient(instance, x, np.ones(5) / 5.0)

def test_dro_subgradient_matches_finite_differences():
    rng = np.random.default_rng(11)
    step = 1e-5
    for _ in range(100):
        instance = random_dro(rng, 5, 8)
        x = rng.normal(size=5)
        y = rng.dirichlet(np.ones(8))
        gradient = dro_x_subgradient(instance, x, y)
        differences = np.empty(5)
        for j in range(5):
            offset = np.zeros(5)
            offset[j] = step
            differences[j] = (dro_losses(instance, x + offset) @ y - dro_losses(instance, x - offset) @ y) / (2.0 * step)
        assert np.allclose(gradient, differences, rtol=1e-5, atol=1e-7)

def test_worst_case_loss_of_constant_losses():
    instance = dro_instance(5, 20, seed=2)
    assert dro_worst_case_loss(instance, np.zeros(5)) == pytest.approx(math.log(2.0), abs=1e-12)

def test_worst_case_loss_two_samples():
    instance = small_dro([[1.0, 0.0], [0.0, 1.0]], [1.0, -1.0], lambda_=0.01)
    assert instance.epsilon == pytest.approx(0.1)
    # the same closed form, read off the decision set of the maximizing player
    assert -instance.y_geometry.linear_minimum(-np.array([1.0, 0.0])) == pytest.approx(0.570711, abs=1e-6)
    x = np.array([0.3, -2.0])
    losses = dro_losses(instance, x)
    expected = losses.mean() + 0.1 * abs(losses[0] - losses[1]) / math.sqrt(2.0)
    assert dro_worst_case_loss(instance, x) == pytest.approx(expected, rel=1e-12)

def test_worst_case_loss_matches_a_grid_on_the_circle():
    rng = np.random.default_rng(5)
    instance = random_dro(rng, 3, 3)
    x = rng.normal(size=3)
    losses = dro_losses(instance, x)
    angles = np.linspace(0.0, 2.0 * math.pi, 100000, endpoint=False)
    circle = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    points = instance.y_geometry.center + instance.epsilon * circle @ instance.y_geometry.basis.T
    brute_force = float((points @ losses).max())
    closed_form = dro_worst_case_loss(instance, x)
    assert brute_force <= closed_form + 1e-12
    assert closed_form - brute_force <= 1e-6

def test_worst_case_loss_dominates_sampled_weights():
    rng = np.random.default_rng(8)
    instance = random_dro(rng, 6, 12)
    x = rng.normal(size=6)
    worst_case = dro_worst_case_loss(instance, x)
    samples = sample_ambiguity_set(instance, rng, 1000)
    assert np.all(samples @ dro_losses(instance, x) <= worst_case + 1e-9)

def test_dro_bounds_with_one_informative_sample():
    instance = small_dro([[1.0, 0.0], [0.0, 0.0]], [1.0, 1.0], radius=10.0)
    loss_x, loss_y, diameter_x, diameter_y = dro_bounds(instance)
    assert loss_x == 1.0
    assert math.sqrt(loss_y ** 2 - math.log(2.0) ** 2) == pytest.approx(10.0000454, abs=1e-7)
    assert diameter_x == 20.0
    assert diameter_y == pytest.approx(2.0 * math.sqrt(0.25))

def test_dro_bounds_with_zero_features():
    instance = small_dro(np.zeros((7, 3)), np.ones(7))
    loss_x, loss_y, _, _ = dro_bounds(instance, 5.0)
    assert loss_x == 0.0
    assert loss_y == pytest.approx(math.sqrt(7.0) * math.log(2.0))
    with pytest.raises(InvalidParameterError):
        dro_bounds(instance, 0.0)

def test_dro_bounds_frobenius_norm():
    instance = dro_instance(8, 20, seed=4)
    assert dro_bounds(instance)[0] == pytest.approx(float(np.sqrt((instance.dataset.features ** 2).sum())))

def test_dro_bounds_cover_observed_subgradients():
    instance = recording_dro(n=20, m=30, seed=6)
    instance.solve("cba+", steps=200, mode="alternation", averaging="linear")
    loss_x, loss_y, _, _ = instance.bounds()
    assert max(instance.x_norms) <= loss_x
    assert max(instance.y_norms) <= loss_y * (1.0 + 1e-9)

def test_dro_instance_validation():
    with pytest.raises(InvalidParameterError):
        small_dro([[1.0, 0.0]], [1.0])
    with pytest.raises(InvalidParameterError):
        small_dro([[1.0], [2.0]], [1.0, -1.0], lambda_=0.0)
    with pytest.raises(InvalidParameterError):
        small_dro([[1.0], [2.0], [3.0]], [1.0, -1.0, 1.0], y_center=[1.2, -0.1, -0.1])

def test_dro_defaults():
    instance = dro_instance(5, 40)
    assert instance.lambda_ == pytest.approx(1.0 / 80.0)
    assert instance.epsilon == pytest.approx(math.sqrt(1.0 / 80.0))
    assert instance.radius == 10.0
    assert np.allclose(instance.y_geometry.center, 1.0 / 40.0)

def test_containment_warning(capsys):
    dro_instance(5, 50)
    assert "Warning" in capsys.readouterr().err
    small_dro([[1.0, 0.0], [0.0, 1.0]], [1.0, -1.0], lambda_=0.01)
    assert capsys.readouterr().err == ""

@pytest.mark.slow
def test_cba_plus_beats_the_proximal_baselines_on_dro():
    instance = dro_instance(50, 50, seed=0)
    cba_plus = instance.solve("cba+", steps=1000, mode="alternation", averaging="linear").final.metric
    for algorithm in ("omd", "ftrl", "oomd", "oftrl"):
        baseline = instance.solve(algorithm, steps=1000, mode="simultaneous", averaging="uniform", step_mode="theory").final.metric
        assert cba_plus < baseline, algorithm

@pytest.mark.slow
def test_large_step_multipliers_hurt_mirror_descent_only():
    instance = dro_instance(50, 50, seed=0)
    guard = instance.config.divergence_guard
    degraded = []
    for algorithm in ("omd", "oomd"):
        tuned = instance.solve(algorithm, steps=1000, mode="simultaneous", averaging="uniform", step_mode="theory").final.metric
        inflated = instance.solve(algorithm, steps=1000, mode="simultaneous", averaging="uniform", step_mode="multiplier:10000").final.metric
        degraded.append(not math.isfinite(inflated) or inflated > guard or inflated > 10.0 * tuned)
    assert any(degraded)
    tuned = instance.solve("cba+", steps=1000, step_mode="theory").metrics
    inflated = instance.solve("cba+", steps=1000, step_mode="multiplier:10000").metrics
    assert tuned == inflated

def test_cba_plus_is_scale_free_on_dro():
    plain = recording_dro(1.0, n=50, m=50, seed=9)
    scaled = recording_dro(100.0, n=50, m=50, seed=9)
    plain.solve("cba+", steps=500, mode="alternation", averaging="linear")
    scaled.solve("cba+", steps=500, mode="alternation", averaging="linear")
    assert len(plain.xs) == len(scaled.xs) == 500
    for left, right in zip(plain.xs + plain.ys, scaled.xs + scaled.ys):
        assert np.max(np.abs(left - right)) <= 1e-9 * (1.0 + np.max(np.abs(left)))

@pytest.mark.parametrize("algorithm", ["omd", "oftrl"])
def test_baselines_play_on_the_same_ambiguity_set_as_cba(algorithm):
    instance = recording_dro(1.0, n=20, m=50, seed=4)
    assert not ellipsoid_containment(instance.y_geometry.center, instance.epsilon)
    instance.solve(algorithm, steps=64, mode="simultaneous", averaging="uniform", step_mode="theory")
    assert all(instance.y_geometry.contains(y) for y in instance.ys)
