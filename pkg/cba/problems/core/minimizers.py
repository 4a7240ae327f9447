import math
from dataclasses import dataclass

import numpy as np

from cba.problems.core.enumerations import Algorithm, GeometryKind, StepMode
from cba.problems.core.exceptions import DimensionMismatchError, InvalidParameterError, NonFiniteError
from cba.problems.core.geometry import ConeGeometry, LiftedVector, ellipsoid_containment, project_cone, project_simplex

DEFAULT_PROX_PRECISION = 1e-3

def _as_vector(values, dimension, name):
    values = np.asarray(values, dtype=float).ravel()
    if values.shape[0] != dimension:
        raise DimensionMismatchError(f"{name} has dimension {values.shape[0]}, expected {dimension}")
    if not np.all(np.isfinite(values)):
        raise NonFiniteError(f"{name} has non-finite entries")
    return values

def _check_positive(value, name):
    if not (math.isfinite(value) and value > 0):
        raise InvalidParameterError(f"{name} must be positive and finite, got {value}")

# Conic Blackwell

@dataclass
class CbaState:
    """
    State of CBA / CBA+ on the reference set of a geometry.

    :param geometry: The decision set descriptor.
    :type geometry: ConeGeometry
    :param plus_variant: Projects the aggregate onto the cone after every update (CBA+). - **Default:** True
    :type plus_variant: bool
    :param initial_decision: Fallback decision x0 in reference coordinates, played while the aggregate has a zero first coordinate. - **Default:** the reference image of geometry.default_decision()
    :type initial_decision: numpy.ndarray
    """
    geometry: ConeGeometry
    plus_variant: bool = True
    initial_decision: np.ndarray = None
    aggregate: LiftedVector = None
    weight_sum: float = 0.0

    def __post_init__(self):
        if self.initial_decision is None:
            self.initial_decision = self.geometry.from_decision(self.geometry.default_decision())
        self.initial_decision = _as_vector(self.initial_decision, self.geometry.reference_dimension, "Initial decision")

def cba_choose(state):
    """
    Returns (kappa / tilde) * hat of the aggregate, projected onto the cone first for plain CBA.

    On the simplex the decision is hat normalized by its sum. Falls back to the initial decision before the
    first update and whenever tilde is zero.

    :param state: The CBA state.
    :type state: CbaState
    :return: A decision in reference coordinates.
    :rtype: numpy.ndarray

    Usage:

    >>> state = CbaState(ConeGeometry.simplex(2))
    >>> cba_choose(state)
    array([0.5, 0.5])
    """
    if state.aggregate is None:
        return state.initial_decision.copy()
    payoff = state.aggregate if state.plus_variant else project_cone(state.geometry, state.aggregate).onto_cone
    if payoff.tilde <= 0.0:
        return state.initial_decision.copy()
    if state.geometry.kind == GeometryKind.SIMPLEX:
        # tilde and sum(hat) agree only up to cancellation near the polar cone
        total = float(payoff.hat.sum())
        if total <= 0.0:
            return state.initial_decision.copy()
        return payoff.hat / total
    return (state.geometry.kappa / payoff.tilde) * payoff.hat

def cba_update(state, x, f, weight=1.0):
    """
    Folds the payoff (<f, x> / kappa, -f) into the aggregate with weight omega against the past weight sum S.

    :param state: The CBA state, updated in place.
    :type state: CbaState
    :param x: The decision that was played, in reference coordinates.
    :type x: numpy.ndarray
    :param f: The observed loss, in reference coordinates.
    :type f: numpy.ndarray
    :param weight: Payoff weight omega. - **Default:** 1.0
    :type weight: float
    :return: The updated state.
    :rtype: CbaState
    """
    _check_positive(weight, "Payoff weight")
    dimension = state.geometry.reference_dimension
    x = _as_vector(x, dimension, "Decision")
    f = _as_vector(f, dimension, "Loss")
    payoff = LiftedVector(float(f @ x) / state.geometry.kappa, -f)

    if state.aggregate is None or state.weight_sum == 0.0:
        aggregate = payoff
    else:
        total = state.weight_sum + weight
        aggregate = state.aggregate.scaled(state.weight_sum / total) + payoff.scaled(weight / total)

    if state.plus_variant:
        aggregate = project_cone(state.geometry, aggregate).onto_cone

    state.aggregate = aggregate
    state.weight_sum += weight
    return state

# Regret matching

@dataclass
class RmState:
    regret: np.ndarray
    plus_variant: bool = True

    @classmethod
    def zeros(cls, n, plus_variant=True):
        return cls(np.zeros(n), plus_variant)

def rm_choose(state, fallback=None):
    """
    Plays proportionally to the positive part of the regrets, or the fallback (uniform by default)
    when no regret is positive.
    """
    positive = np.maximum(state.regret, 0.0)
    total = positive.sum()
    if total > 0.0:
        return positive / total
    if fallback is None:
        return np.full(state.regret.shape[0], 1.0 / state.regret.shape[0])
    return np.asarray(fallback, dtype=float).copy()

def rm_update(state, x, f, weight=1.0):
    """
    Adds the loss-convention increment weight * (<f, x> e - f) to the regrets; RM+ thresholds at zero.

    Usage:

    >>> state = RmState.zeros(2)
    >>> rm_update(state, np.array([0.5, 0.5]), np.array([1.0, 0.0])).regret
    array([0. , 0.5])
    """
    n = state.regret.shape[0]
    x = _as_vector(x, n, "Decision")
    f = _as_vector(f, n, "Loss")
    regret = state.regret + weight * (float(f @ x) - f)
    state.regret = np.maximum(regret, 0.0) if state.plus_variant else regret
    return state

# Proximal baselines

@dataclass(frozen=True)
class StepPolicy:
    """
    Fixed step size eta, or adaptive 1 / sqrt(sum of squared loss norms) starting from eta.
    """
    mode: StepMode
    eta: float

    def __post_init__(self):
        _check_positive(self.eta, "Step size")
        if self.mode not in (StepMode.FIXED, StepMode.ADAPTIVE):
            raise InvalidParameterError(f"Step policy must be fixed or adaptive, got {self.mode}")

    @classmethod
    def fixed(cls, eta):
        return cls(StepMode.FIXED, float(eta))

    @classmethod
    def adaptive(cls, initial=1.0):
        return cls(StepMode.ADAPTIVE, float(initial))

@dataclass
class ProxState:
    """
    State of the OMD / FTRL family.

    iterate is the OMD anchor x_t, cumulative the FTRL sum G_t and last_loss the optimistic predictor.
    """
    iterate: np.ndarray
    cumulative: np.ndarray
    last_loss: np.ndarray
    step_policy: StepPolicy
    squared_norm_sum: float = 0.0

    @classmethod
    def start(cls, geometry, step_policy):
        return cls(geometry.default_decision(), np.zeros(geometry.dimension), np.zeros(geometry.dimension), step_policy)

def current_step_size(state):
    if state.step_policy.mode == StepMode.FIXED or state.squared_norm_sum == 0.0:
        return state.step_policy.eta
    return 1.0 / math.sqrt(state.squared_norm_sum)

def adaptive_step_size(state, new_loss_norm):
    """
    Accumulates ||f||^2 and returns 1 / sqrt(sum), or the initial step while every loss so far was zero.

    :param state: The proximal state, updated in place.
    :type state: ProxState
    :param new_loss_norm: Euclidean norm of the loss just observed.
    :type new_loss_norm: float
    :rtype: float

    Usage:

    >>> adaptive_step_size(state, 3.0); adaptive_step_size(state, 4.0)
    0.2
    """
    if not new_loss_norm >= 0.0:
        raise InvalidParameterError(f"Loss norm must be nonnegative, got {new_loss_norm}")
    state.squared_norm_sum += new_loss_norm ** 2
    if state.squared_norm_sum == 0.0:
        return state.step_policy.eta
    return 1.0 / math.sqrt(state.squared_norm_sum)

def theoretical_step_size(diameter, loss_bound, horizon):
    """
    Returns sqrt(2) * Omega / (L * sqrt(T)).

    Usage:

    >>> theoretical_step_size(math.sqrt(2), 1.0, 1)
    2.0000000000000004
    """
    for value, name in ((diameter, "Diameter"), (loss_bound, "Loss bound"), (horizon, "Horizon")):
        _check_positive(value, name)
    return math.sqrt(2.0) * diameter / (loss_bound * math.sqrt(horizon))

def prox_ball(center, radius, anchor, c, eta):
    """
    Solves min over ||x - center|| <= radius of <c, x> + ||x - anchor||^2 / (2 eta) in closed form:
    center + radius * (anchor - eta c - center) / max(radius, ||anchor - eta c - center||).

    Usage:

    >>> prox_ball(np.zeros(2), 1.0, np.zeros(2), np.array([1.0, 0.0]), 2.0)
    array([-1.,  0.])
    """
    _check_positive(radius, "Radius")
    _check_positive(eta, "Step size")
    center = np.asarray(center, dtype=float)
    offset = np.asarray(anchor, dtype=float) - eta * np.asarray(c, dtype=float) - center
    return center + radius * offset / max(radius, float(np.linalg.norm(offset)))

def prox_ball_simplex(center, radius, anchor, c, eta, tol=DEFAULT_PROX_PRECISION):
    """
    Solves min over {y in simplex, ||y - center|| <= radius} of <c, y> + ||y - anchor||^2 / (2 eta).

    The ball constraint is dualized with a multiplier mu >= 0. For a fixed mu the inner problem is a
    simplex projection, and the concave dual is maximized by bisection on mu over [0, mu_bar] until the
    bracket is within a relative precision tol.

    :param center: Ball center, a point of the simplex.
    :type center: numpy.ndarray
    :param radius: Ball radius.
    :type radius: float
    :param anchor: Previous point y'.
    :type anchor: numpy.ndarray
    :param c: Linear term.
    :type c: numpy.ndarray
    :param eta: Step size.
    :type eta: float
    :param tol: Bisection precision. - **Default:** 0.001
    :type tol: float
    :return: A feasible point.
    :rtype: numpy.ndarray
    """
    _check_positive(radius, "Radius")
    _check_positive(eta, "Step size")
    _check_positive(tol, "Precision")
    center = np.asarray(center, dtype=float).ravel()
    if abs(center.sum() - 1.0) > 1e-9 or center.min() < -1e-12:
        raise InvalidParameterError("Ball center must lie in the simplex")
    anchor = _as_vector(anchor, center.shape[0], "Anchor")
    c = _as_vector(c, center.shape[0], "Linear term")

    def point(mu):
        return project_simplex((eta / (eta * mu + 1.0)) * (anchor / eta + mu * center - c))

    def outside(y):
        return float(np.linalg.norm(y - center)) > radius

    unconstrained = point(0.0)
    if not outside(unconstrained):
        return unconstrained

    dual_at_zero = float(c @ unconstrained) + float(np.sum((unconstrained - anchor) ** 2)) / (2.0 * eta)
    upper = (2.0 / radius ** 2) * (float(c @ center) + float(np.sum((center - anchor) ** 2)) / (2.0 * eta) - dual_at_zero)
    upper = max(upper, tol)
    for _ in range(64):
        if not outside(point(upper)):
            break
        upper *= 2.0

    lower = 0.0
    for _ in range(200):
        if upper - lower <= tol * upper:
            break
        middle = 0.5 * (lower + upper)
        if outside(point(middle)):
            lower = middle
        else:
            upper = middle
    return point(upper)

def _project_l1_ball(center, radius, v):
    offset = v - center
    if np.abs(offset).sum() <= radius:
        return v.copy()
    return center + radius * np.sign(offset) * project_simplex(np.abs(offset) / radius)

def prox_step(geometry, anchor, c, eta, precision=DEFAULT_PROX_PRECISION):
    """
    [Internal]

    Euclidean prox point argmin over X of <c, x> + ||x - anchor||^2 / (2 eta), dispatched on the geometry.
    The ball-in-hyperplane kind uses the ball-in-simplex solver when the slice lies inside the simplex, and
    the closed-form ball prox in basis coordinates otherwise.
    """
    _check_positive(eta, "Step size")
    anchor = np.asarray(anchor, dtype=float)
    c = np.asarray(c, dtype=float)
    if geometry.kind == GeometryKind.SIMPLEX:
        return project_simplex(anchor - eta * c)
    if geometry.kind == GeometryKind.L2_BALL:
        return prox_ball(geometry.center, geometry.radius, anchor, c, eta)
    if geometry.kind == GeometryKind.L1_BALL:
        return _project_l1_ball(geometry.center, geometry.radius, anchor - eta * c)
    if geometry.kind == GeometryKind.LINF_BALL:
        return geometry.center + np.clip(anchor - eta * c - geometry.center, -geometry.radius, geometry.radius)
    if ellipsoid_containment(geometry.center, geometry.radius):
        return prox_ball_simplex(geometry.center, geometry.radius, anchor, c, eta, precision)
    radius, basis = geometry.radius, geometry.basis
    z = prox_ball(np.zeros(basis.shape[1]), 1.0, basis.T @ (anchor - geometry.center) / radius,
                  radius * (basis.T @ c), eta / radius ** 2)
    return geometry.to_decision(z)

def project_onto(geometry, v, precision=DEFAULT_PROX_PRECISION):
    return prox_step(geometry, v, np.zeros_like(np.asarray(v, dtype=float)), 1.0, precision)

def omd_step(state, geometry, f, eta, precision=DEFAULT_PROX_PRECISION):
    """
    Moves the anchor to the prox point of f from the current anchor and returns it.
    """
    _check_positive(eta, "Step size")
    f = _as_vector(f, geometry.dimension, "Loss")
    state.iterate = prox_step(geometry, state.iterate, f, eta, precision)
    return state.iterate

def ftrl_step(state, geometry, cumulative, eta, precision=DEFAULT_PROX_PRECISION):
    """
    argmin over X of <G, x> + ||x||^2 / eta, i.e. the projection of -eta G / 2 onto X.

    Usage:

    >>> ftrl_step(state, ConeGeometry.simplex(2), np.array([1.0, -1.0]), 2.0)
    array([0., 1.])
    """
    _check_positive(eta, "Step size")
    cumulative = _as_vector(cumulative, geometry.dimension, "Cumulative loss")
    return project_onto(geometry, -0.5 * eta * cumulative, precision)

def optimistic_ftrl_step(state, geometry, cumulative, predictor, eta, precision=DEFAULT_PROX_PRECISION):
    predictor = _as_vector(predictor, geometry.dimension, "Predictor")
    return ftrl_step(state, geometry, np.asarray(cumulative, dtype=float) + predictor, eta, precision)

def optimistic_omd_decision(state, geometry, predictor, eta, precision=DEFAULT_PROX_PRECISION):
    _check_positive(eta, "Step size")
    predictor = _as_vector(predictor, geometry.dimension, "Predictor")
    return prox_step(geometry, state.iterate, predictor, eta, precision)

def optimistic_omd_step(state, geometry, predictor, f, eta, precision=DEFAULT_PROX_PRECISION):
    """
    Plays z = prox(x_t, m), then after the loss f is observed moves the anchor to x_{t+1} = prox(x_t, f).

    :return: The pair (z, x_{t+1}).
    :rtype: tuple
    """
    decision = optimistic_omd_decision(state, geometry, predictor, eta, precision)
    anchor = omd_step(state, geometry, f, eta, precision)
    state.last_loss = np.asarray(f, dtype=float).copy()
    return decision, anchor

# Players used by the repeated game loop

class RegretMinimizer:
    """
    Common interface of the players: next_decision() then observe(loss, weight) once per round.
    The loss is always evaluated at the last decision returned.
    """
    algorithm = None

    def __init__(self, geometry):
        self.geometry = geometry

    def next_decision(self):
        raise NotImplementedError

    def observe(self, loss, weight=1.0):
        raise NotImplementedError

class ConicBlackwell(RegretMinimizer):
    """
    CBA / CBA+ on any geometry, run in reference coordinates and mapped back to X.
    """
    def __init__(self, geometry, plus_variant=True, initial_decision=None):
        super().__init__(geometry)
        self.algorithm = Algorithm.CBA_PLUS if plus_variant else Algorithm.CBA
        reference = None if initial_decision is None else geometry.from_decision(initial_decision)
        self.state = CbaState(geometry, plus_variant, reference)
        self.last_reference = None

    def next_decision(self):
        self.last_reference = cba_choose(self.state)
        return self.geometry.to_decision(self.last_reference)

    def observe(self, loss, weight=1.0):
        cba_update(self.state, self.last_reference, self.geometry.reference_loss(loss), weight)

class RegretMatching(RegretMinimizer):

    def __init__(self, geometry, plus_variant=True):
        if geometry.kind != GeometryKind.SIMPLEX:
            raise InvalidParameterError(f"Regret matching needs a simplex, got {geometry.kind.name}")
        super().__init__(geometry)
        self.algorithm = Algorithm.RM_PLUS if plus_variant else Algorithm.RM
        self.state = RmState.zeros(geometry.dimension, plus_variant)
        self.last_decision = None

    def next_decision(self):
        self.last_decision = rm_choose(self.state)
        return self.last_decision

    def observe(self, loss, weight=1.0):
        rm_update(self.state, self.last_decision, loss, weight)

class _ProxPlayer(RegretMinimizer):

    def __init__(self, geometry, step_policy, precision=DEFAULT_PROX_PRECISION):
        super().__init__(geometry)
        self.state = ProxState.start(geometry, step_policy)
        self.precision = precision

    def _weighted(self, loss, weight):
        return weight * _as_vector(loss, self.geometry.dimension, "Loss")

    def _step_after(self, f):
        # the step used after observing f counts f among the losses seen so far
        if self.state.step_policy.mode == StepMode.ADAPTIVE:
            return adaptive_step_size(self.state, float(np.linalg.norm(f)))
        return self.state.step_policy.eta

class OnlineMirrorDescent(_ProxPlayer):
    algorithm = Algorithm.OMD

    def next_decision(self):
        return self.state.iterate.copy()

    def observe(self, loss, weight=1.0):
        f = self._weighted(loss, weight)
        omd_step(self.state, self.geometry, f, self._step_after(f), self.precision)

class FollowTheRegularizedLeader(_ProxPlayer):
    algorithm = Algorithm.FTRL

    def next_decision(self):
        return ftrl_step(self.state, self.geometry, self.state.cumulative, current_step_size(self.state), self.precision)

    def observe(self, loss, weight=1.0):
        f = self._weighted(loss, weight)
        self.state.cumulative = self.state.cumulative + f
        self._step_after(f)

class OptimisticFtrl(_ProxPlayer):
    algorithm = Algorithm.OPTIMISTIC_FTRL

    def next_decision(self):
        return optimistic_ftrl_step(self.state, self.geometry, self.state.cumulative, self.state.last_loss,
                                    current_step_size(self.state), self.precision)

    def observe(self, loss, weight=1.0):
        f = self._weighted(loss, weight)
        self.state.cumulative = self.state.cumulative + f
        self.state.last_loss = f
        self._step_after(f)

class OptimisticOmd(_ProxPlayer):
    algorithm = Algorithm.OPTIMISTIC_OMD

    def next_decision(self):
        return optimistic_omd_decision(self.state, self.geometry, self.state.last_loss,
                                       current_step_size(self.state), self.precision)

    def observe(self, loss, weight=1.0):
        f = self._weighted(loss, weight)
        omd_step(self.state, self.geometry, f, self._step_after(f), self.precision)
        self.state.last_loss = f

_PROX_PLAYERS = {
    Algorithm.OMD: OnlineMirrorDescent,
    Algorithm.FTRL: FollowTheRegularizedLeader,
    Algorithm.OPTIMISTIC_OMD: OptimisticOmd,
    Algorithm.OPTIMISTIC_FTRL: OptimisticFtrl,
}

def build_minimizer(algorithm, geometry, step_policy=None, precision=DEFAULT_PROX_PRECISION):
    """
    Instantiates the player for an algorithm on a geometry.

    :param algorithm: The algorithm, or its command-line name.
    :type algorithm: Algorithm or str
    :param geometry: The decision set.
    :type geometry: ConeGeometry
    :param step_policy: Required by the OMD / FTRL family.
    :type step_policy: StepPolicy
    :rtype: RegretMinimizer

    Usage:

    >>> player = build_minimizer("cba+", ConeGeometry.simplex(3))
    """
    algorithm = Algorithm(algorithm)
    if algorithm in (Algorithm.CBA, Algorithm.CBA_PLUS):
        return ConicBlackwell(geometry, plus_variant=algorithm == Algorithm.CBA_PLUS)
    if algorithm in (Algorithm.RM, Algorithm.RM_PLUS):
        return RegretMatching(geometry, plus_variant=algorithm == Algorithm.RM_PLUS)
    if step_policy is None:
        raise InvalidParameterError(f"{algorithm.value} needs a step policy")
    return _PROX_PLAYERS[algorithm](geometry, step_policy, precision)
