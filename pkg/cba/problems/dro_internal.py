import math

import numpy as np
from scipy.special import expit

from cba.problems.core.base import SaddleProblem
from cba.problems.core.data_io import Dataset
from cba.problems.core.exceptions import DimensionMismatchError, InvalidParameterError, NonFiniteError
from cba.problems.core.geometry import ConeGeometry, ellipsoid_containment

class DroInstance(SaddleProblem):
    """
    Internal implementation of distributionally robust logistic regression:

    min over ||x - x0|| <= R of max over y of sum_i y_i log(1 + exp(-b_i a_i . x)),

    where y ranges over the slice {sum(y) = 1, ||y - y0|| <= sqrt(lambda)}.

    :param features: The m x n matrix of samples a_i.
    :type features: numpy.ndarray
    :param labels: The m labels b_i in {-1, +1}.
    :type labels: numpy.ndarray
    :param radius: Radius R of the x-ball. - **Default:** 10.0
    :type radius: float
    :param lambda_: Squared radius of the ambiguity set. - **Default:** 1 / (2m)
    :type lambda_: float
    :param x_center: Center x0 of the x-ball. - **Default:** origin
    :type x_center: numpy.ndarray
    :param y_center: Center y0 of the ambiguity set, a point of the simplex. - **Default:** uniform weights
    :type y_center: numpy.ndarray
    :param provenance: Where the data came from. - **Default:** "" (empty string)
    :type provenance: str

    Usage:

    >>> instance = DroInstance(dataset.features, dataset.labels, radius=10.0)
    >>> instance.bounds()
    """
    def __init__(self, features, labels, radius=10.0, lambda_=None, x_center=None, y_center=None, provenance="", config_path="", config=None):
        super().__init__(config_path, config)
        dataset = Dataset(features, labels, provenance)
        m, n = dataset.features.shape
        if m < 2:
            raise InvalidParameterError("The ambiguity set needs at least two samples")
        lambda_ = 1.0 / (2.0 * m) if lambda_ is None else float(lambda_)
        if not (math.isfinite(lambda_) and lambda_ > 0):
            raise InvalidParameterError(f"Lambda must be positive, got {lambda_}")

        self.dataset = dataset
        self.radius = float(radius)
        self.lambda_ = lambda_
        self.epsilon = math.sqrt(lambda_)
        self.signed_features = dataset.labels[:, None] * dataset.features
        self.x_geometry = ConeGeometry.l2_ball(n, x_center, self.radius)
        self.y_geometry = ConeGeometry.ball_hyperplane(m, y_center, self.epsilon)
        if self.y_geometry.center.min() < 0:
            raise InvalidParameterError("Ambiguity center must lie in the simplex")

        if not ellipsoid_containment(self.y_geometry.center, self.epsilon, self.config.tolerance):
            self.log.warning(f"The ambiguity set with lambda={lambda_} leaves the simplex, some weights y_i can be negative")

    def x_subgradient(self, x, y):
        return dro_x_subgradient(self, x, y)

    def y_subgradient(self, x, y):
        return dro_losses(self, x)

    def metric(self, x_average, y_average):
        return dro_worst_case_loss(self, x_average)

    def bounds(self):
        return dro_bounds(self)

def _margins(inst, x):
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != inst.x_geometry.dimension:
        raise DimensionMismatchError(f"Expected x of dimension {inst.x_geometry.dimension}, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteError("x has non-finite entries")
    return inst.signed_features @ x

def dro_losses(inst, x):
    """
    Returns the logistic losses log(1 + exp(-b_i a_i . x)), evaluated without overflow.

    Usage:

    >>> dro_losses(instance, np.zeros(n))
    array([0.69314718, ...])
    """
    return np.logaddexp(0.0, -_margins(inst, x))

def dro_x_subgradient(inst, x, y):
    """
    Returns sum_i y_i * (-b_i / (1 + exp(b_i a_i . x))) * a_i.
    """
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != inst.y_geometry.dimension:
        raise DimensionMismatchError(f"Expected y of dimension {inst.y_geometry.dimension}, got {y.shape[0]}")
    return inst.signed_features.T @ (y * -expit(-_margins(inst, x)))

def dro_worst_case_loss(inst, x):
    """
    Returns max over the ambiguity set of <loss(x), y>, which is <loss(x), y0> + epsilon * ||B^T loss(x)||.
    """
    losses = dro_losses(inst, x)
    return float(losses @ inst.y_geometry.center) + inst.epsilon * float(np.linalg.norm(inst.y_geometry.basis.T @ losses))

def dro_bounds(inst, radius=None):
    """
    Returns (L_x, L_y, Omega_x, Omega_y) for the x-ball of the given radius.

    L_y = sqrt(sum_i log(1 + exp(|b_i| (||x0|| + R) ||a_i||))^2) and L_x is the Frobenius norm of the
    matrix with rows b_i a_i.

    :param radius: Radius R. - **Default:** the instance radius
    :type radius: float
    :rtype: tuple
    """
    radius = inst.radius if radius is None else float(radius)
    if not radius > 0:
        raise InvalidParameterError(f"Radius must be positive, got {radius}")
    reach = radius + float(np.linalg.norm(inst.x_geometry.center))
    sample_norms = np.abs(inst.dataset.labels) * np.linalg.norm(inst.dataset.features, axis=1)
    loss_y = float(np.linalg.norm(np.logaddexp(0.0, reach * sample_norms)))
    loss_x = float(np.linalg.norm(inst.signed_features))
    return loss_x, loss_y, 2.0 * radius, 2.0 * inst.epsilon
