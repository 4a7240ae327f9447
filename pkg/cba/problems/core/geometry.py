import math
from dataclasses import dataclass

import numpy as np

from cba.problems.core.enumerations import GeometryKind
from cba.problems.core.exceptions import DimensionMismatchError, NonFiniteError, InvalidParameterError

DEFAULT_TOLERANCE = 1e-9

@dataclass(frozen=True, eq=False)
class LiftedVector:
    """
    A point (tilde, hat) of the lifted payoff space R x R^n.

    :param tilde: First lifted coordinate.
    :type tilde: float
    :param hat: The remaining n coordinates.
    :type hat: numpy.ndarray

    Usage:

    >>> u = LiftedVector(0.5, [-1.0, 0.0])
    >>> u.norm()
    1.118033988749895
    """
    tilde: float
    hat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "tilde", float(self.tilde))
        object.__setattr__(self, "hat", np.array(self.hat, dtype=float).ravel())

    @classmethod
    def zeros(cls, dimension):
        return cls(0.0, np.zeros(dimension))

    @property
    def dimension(self):
        return self.hat.shape[0]

    def as_array(self):
        return np.concatenate(([self.tilde], self.hat))

    def dot(self, other):
        return self.tilde * other.tilde + float(self.hat @ other.hat)

    def norm(self):
        return math.sqrt(self.tilde ** 2 + float(self.hat @ self.hat))

    def scaled(self, factor):
        return LiftedVector(factor * self.tilde, factor * self.hat)

    def is_finite(self):
        return math.isfinite(self.tilde) and bool(np.all(np.isfinite(self.hat)))

    def __add__(self, other):
        return LiftedVector(self.tilde + other.tilde, self.hat + other.hat)

    def __sub__(self, other):
        return LiftedVector(self.tilde - other.tilde, self.hat - other.hat)

    def __neg__(self):
        return LiftedVector(-self.tilde, -self.hat)

@dataclass(frozen=True, eq=False)
class ProjectionPair:
    """
    The Moreau decomposition of a lifted vector: onto_cone + onto_polar = u.
    """
    onto_cone: LiftedVector
    onto_polar: LiftedVector

@dataclass(frozen=True, eq=False)
class ConeGeometry:
    """
    Describes a decision set X and the lifted cone C = cone({kappa} x X') of its reference set X'.

    Ball kinds describe X = center + radius * B_p, the ball-in-hyperplane kind describes
    X = center + radius * basis * B_2. Cone projections always act on the reference set, which is the
    unit ball (or the simplex itself), so lifted vectors have :attr:`reference_dimension` hat entries.

    Use the class constructors rather than the raw initializer.

    Usage:

    >>> geometry = ConeGeometry.simplex(3)
    >>> geometry.kappa
    1.0
    >>> ball = ConeGeometry.l2_ball(5, radius=10.0)
    """
    kind: GeometryKind
    dimension: int
    kappa: float
    center: np.ndarray = None
    radius: float = 1.0
    basis: np.ndarray = None

    @classmethod
    def simplex(cls, n):
        cls._check_dimension(n, 1)
        return cls(GeometryKind.SIMPLEX, n, 1.0)

    @classmethod
    def l1_ball(cls, n, center=None, radius=1.0):
        return cls._ball(GeometryKind.L1_BALL, n, 1.0, center, radius)

    @classmethod
    def l2_ball(cls, n, center=None, radius=1.0):
        return cls._ball(GeometryKind.L2_BALL, n, 1.0, center, radius)

    @classmethod
    def linf_ball(cls, n, center=None, radius=1.0):
        return cls._ball(GeometryKind.LINF_BALL, n, math.sqrt(n), center, radius)

    @classmethod
    def ball_hyperplane(cls, m, center=None, radius=1.0):
        """
        The slice {x : sum(x) = 1, ||x - center||_2 <= radius}, handled through an orthonormal basis
        of the hyperplane {sum(x) = 0}.

        :param m: Ambient dimension, at least 2.
        :type m: int
        :param center: Center of the slice, must sum to one. - **Default:** uniform point
        :type center: numpy.ndarray
        :param radius: Radius of the slice. - **Default:** 1.0
        :type radius: float
        """
        cls._check_dimension(m, 2)
        center = np.full(m, 1.0 / m) if center is None else np.array(center, dtype=float).ravel()
        if center.shape[0] != m:
            raise DimensionMismatchError(f"Center has dimension {center.shape[0]}, expected {m}")
        if abs(center.sum() - 1.0) > 1e-9:
            raise InvalidParameterError(f"Center must lie on the hyperplane sum(x) = 1, got sum {center.sum()}")
        cls._check_radius(radius)
        return cls(GeometryKind.BALL_HYPERPLANE, m, 1.0, center, float(radius), hyperplane_basis(m))

    @classmethod
    def _ball(cls, kind, n, kappa, center, radius):
        cls._check_dimension(n, 1)
        cls._check_radius(radius)
        center = np.zeros(n) if center is None else np.array(center, dtype=float).ravel()
        if center.shape[0] != n:
            raise DimensionMismatchError(f"Center has dimension {center.shape[0]}, expected {n}")
        return cls(kind, n, kappa, center, float(radius))

    @staticmethod
    def _check_dimension(n, minimum):
        if int(n) != n or n < minimum:
            raise InvalidParameterError(f"Dimension must be an integer >= {minimum}, got {n}")

    @staticmethod
    def _check_radius(radius):
        if not (math.isfinite(radius) and radius > 0):
            raise InvalidParameterError(f"Radius must be positive and finite, got {radius}")

    @property
    def reference_dimension(self):
        if self.kind == GeometryKind.BALL_HYPERPLANE:
            return self.dimension - 1
        return self.dimension

    def check_point(self, x):
        x = np.asarray(x, dtype=float).ravel()
        if x.shape[0] != self.dimension:
            raise DimensionMismatchError(f"Point has dimension {x.shape[0]}, expected {self.dimension}")
        if not np.all(np.isfinite(x)):
            raise NonFiniteError("Point has non-finite entries")
        return x

    def reference_loss(self, f):
        """
        Maps a loss on X to the loss on the reference set, so that <f, x - center> = <reference_loss(f), z>.

        :param f: Loss vector on X.
        :type f: numpy.ndarray
        :return: The reference loss.
        :rtype: numpy.ndarray
        """
        f = self.check_point(f)
        if self.kind == GeometryKind.SIMPLEX:
            return f
        if self.kind == GeometryKind.BALL_HYPERPLANE:
            return self.radius * (self.basis.T @ f)
        return self.radius * f

    def to_decision(self, z):
        z = np.asarray(z, dtype=float).ravel()
        if self.kind == GeometryKind.SIMPLEX:
            return z
        if self.kind == GeometryKind.BALL_HYPERPLANE:
            return self.center + self.radius * (self.basis @ z)
        return self.center + self.radius * z

    def from_decision(self, x):
        x = self.check_point(x)
        if self.kind == GeometryKind.SIMPLEX:
            return x
        if self.kind == GeometryKind.BALL_HYPERPLANE:
            return self.basis.T @ (x - self.center) / self.radius
        return (x - self.center) / self.radius

    def default_decision(self):
        if self.kind == GeometryKind.SIMPLEX:
            return np.full(self.dimension, 1.0 / self.dimension)
        return self.center.copy()

    @property
    def diameter(self):
        """
        Returns Omega = max ||x - x'||_2 over X.
        """
        if self.kind == GeometryKind.SIMPLEX:
            return math.sqrt(2.0) if self.dimension > 1 else 0.0
        if self.kind == GeometryKind.LINF_BALL:
            return 2.0 * self.radius * math.sqrt(self.dimension)
        return 2.0 * self.radius

    def contains(self, x, tol=DEFAULT_TOLERANCE):
        """
        Checks whether x belongs to X, within an absolute tolerance.

        :param x: Candidate point.
        :type x: numpy.ndarray
        :param tol: Tolerance. - **Default:** 1e-9
        :type tol: float
        :rtype: bool
        """
        x = self.check_point(x)
        if self.kind == GeometryKind.SIMPLEX:
            return bool(np.all(x >= -tol)) and abs(x.sum() - 1.0) <= tol * max(1.0, self.dimension ** 0.5)
        offset = x - self.center
        bound = self.radius + tol * (1.0 + self.radius)
        if self.kind == GeometryKind.L1_BALL:
            return float(np.abs(offset).sum()) <= bound
        if self.kind == GeometryKind.LINF_BALL:
            return float(np.abs(offset).max()) <= bound
        if self.kind == GeometryKind.BALL_HYPERPLANE and abs(x.sum() - 1.0) > tol * max(1.0, self.dimension ** 0.5):
            return False
        return float(np.linalg.norm(offset)) <= bound

    def linear_minimum(self, c):
        """
        Returns min over X of <c, x> in closed form.

        :param c: Linear objective.
        :type c: numpy.ndarray
        :rtype: float

        Usage:

        >>> ConeGeometry.l2_ball(2).linear_minimum(np.array([3.0, 4.0]))
        -5.0
        """
        c = self.check_point(c)
        if self.kind == GeometryKind.SIMPLEX:
            return float(c.min())
        anchor = float(c @ self.center)
        if self.kind == GeometryKind.L1_BALL:
            return anchor - self.radius * float(np.abs(c).max())
        if self.kind == GeometryKind.LINF_BALL:
            return anchor - self.radius * float(np.abs(c).sum())
        if self.kind == GeometryKind.BALL_HYPERPLANE:
            return anchor - self.radius * float(np.linalg.norm(self.basis.T @ c))
        return anchor - self.radius * float(np.linalg.norm(c))

def _check_lifted(geom, u):
    if u.dimension != geom.reference_dimension:
        raise DimensionMismatchError(f"Lifted vector has {u.dimension} hat entries, geometry expects {geom.reference_dimension}")
    if not u.is_finite():
        raise NonFiniteError("Lifted vector has non-finite entries")

def _breakpoint_root(a, c, w):
    """
    [Internal]

    Solves c * (c * s - w) = sum_i max(a_i - s, 0) for s, the stationarity condition of
    (c * s - w)^2 + sum_i max(a_i - s, 0)^2.

    The left side minus the right side is increasing in s, so after sorting a in decreasing order the
    active set is a prefix and the root is read off the last valid segment.
    """
    ordered = np.sort(a)[::-1]
    candidates = (c * w + np.cumsum(ordered)) / (c * c + np.arange(1, ordered.shape[0] + 1))
    active = np.nonzero(ordered - candidates > 0)[0]
    if active.shape[0] == 0:
        return w / c
    return float(candidates[active[-1]])

def simplex_cone_root(u):
    """
    Returns the root y of y + sum_i max(hat_i + y, 0) = tilde, by sorting hat and scanning its segments.

    :param u: The lifted vector.
    :type u: LiftedVector
    :return: The first coordinate of the projection of u onto the polar of the simplex cone.
    :rtype: float

    Usage:

    >>> simplex_cone_root(LiftedVector(0.0, [1.0, -1.0]))
    -0.5
    """
    if not u.is_finite():
        raise NonFiniteError("Lifted vector has non-finite entries")
    return -_breakpoint_root(u.hat, 1.0, -u.tilde)

def _project_simplex_cone(u):
    root = simplex_cone_root(u)
    onto_cone = LiftedVector(u.tilde - root, np.maximum(u.hat + root, 0.0))
    onto_polar = LiftedVector(root, np.minimum(u.hat, -root))
    return ProjectionPair(onto_cone, onto_polar)

def _project_l1_cone(u):
    # polar is {||y_hat||_inf <= -y_tilde}; s = -y_tilde is the clamp radius
    s = max(_breakpoint_root(np.abs(u.hat), 1.0, -u.tilde), 0.0)
    onto_polar = LiftedVector(-s, np.clip(u.hat, -s, s))
    return ProjectionPair(u - onto_polar, onto_polar)

def _project_linf_cone(u, kappa):
    # cone is {||y_hat||_inf <= y_tilde / kappa}; s = y_tilde / kappa is the clamp radius
    s = max(_breakpoint_root(np.abs(u.hat), kappa, u.tilde), 0.0)
    onto_cone = LiftedVector(kappa * s, np.clip(u.hat, -s, s))
    return ProjectionPair(onto_cone, u - onto_cone)

def _project_l2_cone(u):
    hat_norm = float(np.linalg.norm(u.hat))
    if hat_norm <= u.tilde:
        return ProjectionPair(u, LiftedVector.zeros(u.dimension))
    if hat_norm <= -u.tilde:
        return ProjectionPair(LiftedVector.zeros(u.dimension), u)
    scale = 0.5 * (u.tilde + hat_norm)
    onto_cone = LiftedVector(scale, (scale / hat_norm) * u.hat)
    return ProjectionPair(onto_cone, u - onto_cone)

def project_cone(geom, u):
    """
    Computes the orthogonal projections of u onto the lifted cone C and onto its polar.

    :param geom: The decision set descriptor.
    :type geom: ConeGeometry
    :param u: A lifted vector with geom.reference_dimension hat entries.
    :type u: LiftedVector
    :return: Both projections.
    :rtype: ProjectionPair

    Usage:

    >>> pair = project_cone(ConeGeometry.l2_ball(2), LiftedVector(0.0, [3.0, 4.0]))
    >>> pair.onto_cone.tilde
    2.5
    """
    _check_lifted(geom, u)
    if geom.kind == GeometryKind.SIMPLEX:
        return _project_simplex_cone(u)
    if geom.kind == GeometryKind.L1_BALL:
        return _project_l1_cone(u)
    if geom.kind == GeometryKind.LINF_BALL:
        return _project_linf_cone(u, geom.kappa)
    return _project_l2_cone(u)

def _dual_norm(geom, hat):
    if geom.kind == GeometryKind.SIMPLEX:
        return float(hat.max())
    if geom.kind == GeometryKind.L1_BALL:
        return float(np.abs(hat).max())
    if geom.kind == GeometryKind.LINF_BALL:
        return float(np.abs(hat).sum())
    return float(np.linalg.norm(hat))

def _primal_norm(geom, hat):
    if geom.kind == GeometryKind.L1_BALL:
        return float(np.abs(hat).sum())
    if geom.kind == GeometryKind.LINF_BALL:
        return float(np.abs(hat).max())
    return float(np.linalg.norm(hat))

def polar_membership(geom, u, tol=DEFAULT_TOLERANCE):
    """
    Checks the polar inequality support_X(hat) <= -kappa * tilde, with the tolerance relative to ||u||.

    :rtype: bool
    """
    if u.dimension != geom.reference_dimension:
        raise DimensionMismatchError(f"Lifted vector has {u.dimension} hat entries, geometry expects {geom.reference_dimension}")
    slack = tol * (1.0 + u.norm())
    return _dual_norm(geom, u.hat) <= -geom.kappa * u.tilde + slack

def cone_membership(geom, u, tol=DEFAULT_TOLERANCE):
    """
    Checks whether u = alpha * (kappa, x) for some alpha >= 0 and x in the reference set.

    :rtype: bool
    """
    if u.dimension != geom.reference_dimension:
        raise DimensionMismatchError(f"Lifted vector has {u.dimension} hat entries, geometry expects {geom.reference_dimension}")
    slack = tol * (1.0 + u.norm())
    if u.tilde < -slack:
        return False
    if geom.kind == GeometryKind.SIMPLEX:
        return bool(np.all(u.hat >= -slack)) and abs(float(u.hat.sum()) - u.tilde) <= slack
    return _primal_norm(geom, u.hat) <= u.tilde / geom.kappa + slack

def project_simplex(v):
    """
    Euclidean projection onto the probability simplex. Ties in the sort are broken by index.

    :param v: Point to project.
    :type v: numpy.ndarray
    :return: argmin over the simplex of ||y - v||_2.
    :rtype: numpy.ndarray

    Usage:

    >>> project_simplex(np.array([0.6, 0.6]))
    array([0.5, 0.5])
    """
    v = np.asarray(v, dtype=float).ravel()
    if v.shape[0] == 0:
        raise InvalidParameterError("Cannot project an empty vector onto the simplex")
    if not np.all(np.isfinite(v)):
        raise NonFiniteError("Vector has non-finite entries")
    ordered = v[np.argsort(-v, kind="stable")]
    cssv = np.cumsum(ordered) - 1.0
    cond = ordered - cssv / np.arange(1, v.shape[0] + 1) > 0
    rho = np.nonzero(cond)[0][-1] + 1
    theta = cssv[rho - 1] / rho
    return np.maximum(v - theta, 0.0)

def hyperplane_basis(m):
    """
    Orthonormal basis of {x : sum(x) = 0}. Column i (1-based) is sqrt(i / (i + 1)) * (1/i, ..., 1/i, -1, 0, ..., 0).

    :param m: Ambient dimension, at least 2.
    :type m: int
    :return: An m x (m - 1) matrix.
    :rtype: numpy.ndarray
    """
    if int(m) != m or m < 2:
        raise InvalidParameterError(f"Basis dimension must be an integer >= 2, got {m}")
    basis = np.zeros((m, m - 1))
    for i in range(1, m):
        basis[:i, i - 1] = 1.0 / i
        basis[i, i - 1] = -1.0
        basis[:, i - 1] *= math.sqrt(i / (i + 1.0))
    return basis

def ellipsoid_containment(center, radius, tol=DEFAULT_TOLERANCE):
    """
    Returns whether {sum(x) = 1} intersected with the ball B(center, radius) lies inside the simplex.

    The smallest coordinate over the slice is center_i - radius * sqrt((m - 1) / m).
    """
    center = np.asarray(center, dtype=float).ravel()
    m = center.shape[0]
    return float(center.min()) >= radius * math.sqrt((m - 1.0) / m) - tol
