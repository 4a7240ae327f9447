import numpy as np

from cba.problems.core.base import SaddleProblem
from cba.problems.core.exceptions import DimensionMismatchError, InfeasiblePointError, InvalidParameterError, NonFiniteError
from cba.problems.core.geometry import ConeGeometry

FEASIBILITY_TOLERANCE = 1e-6

class MatrixGameInternal(SaddleProblem):
    """
    Internal implementation of the bilinear game min over x in the n-simplex, max over y in the m-simplex of <x, A y>.

    :param payoff: The n x m payoff matrix A.
    :type payoff: numpy.ndarray
    :param config_path: The path to the config file. - **Default:** "" (empty string)
    :type config_path: str
    """
    def __init__(self, payoff, config_path="", config=None):
        super().__init__(config_path, config)
        payoff = np.array(payoff, dtype=float)
        if payoff.ndim != 2 or payoff.size == 0:
            raise InvalidParameterError(f"Payoff must be a nonempty matrix, got shape {payoff.shape}")
        if not np.all(np.isfinite(payoff)):
            raise NonFiniteError("Payoff matrix has non-finite entries")
        self.payoff = payoff
        self.x_geometry = ConeGeometry.simplex(payoff.shape[0])
        self.y_geometry = ConeGeometry.simplex(payoff.shape[1])

    def x_subgradient(self, x, y):
        return matrix_gradients(self, x, y)[0]

    def y_subgradient(self, x, y):
        return matrix_gradients(self, x, y)[1]

    def metric(self, x_average, y_average):
        return matrix_duality_gap(self, x_average, y_average)

    def bounds(self):
        return matrix_bounds(self)

def matrix_gradients(game, x, y):
    """
    Returns f = A y and g = A^T x.

    Usage:

    >>> matrix_gradients(MatrixGameInternal([[1.0, 2.0], [3.0, 4.0]]), [0.5, 0.5], [1.0, 0.0])[0]
    array([1., 3.])
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    n, m = game.payoff.shape
    if x.shape[0] != n or y.shape[0] != m:
        raise DimensionMismatchError(f"Expected x of dimension {n} and y of dimension {m}, got {x.shape[0]} and {y.shape[0]}")
    return game.payoff @ y, game.payoff.T @ x

def matrix_duality_gap(game, x_average, y_average):
    """
    Returns max_j (A^T x)_j - min_i (A y)_i, which is nonnegative for simplex points.

    :raises InfeasiblePointError: When a point is off its simplex by more than 1e-6.
    """
    for point, geometry, name in ((x_average, game.x_geometry, "x"), (y_average, game.y_geometry, "y")):
        if not geometry.contains(point, FEASIBILITY_TOLERANCE):
            raise InfeasiblePointError(f"The {name} point is not in the simplex")
    f, g = matrix_gradients(game, x_average, y_average)
    return float(g.max() - f.min())

def matrix_bounds(game):
    """
    Returns (L_x, L_y, Omega_x, Omega_y). Over the simplex ||A y|| is at most the largest column norm
    and ||A^T x|| the largest row norm.
    """
    column_bound = float(np.linalg.norm(game.payoff, axis=0).max())
    row_bound = float(np.linalg.norm(game.payoff, axis=1).max())
    return column_bound, row_bound, game.x_geometry.diameter, game.y_geometry.diameter
