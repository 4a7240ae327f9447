import time
from dataclasses import dataclass, field

import numpy as np

from cba.problems.core.enumerations import Mode
from cba.problems.core.exceptions import DimensionMismatchError, InvalidParameterError, NonFiniteError

MAX_DECISION_EXPONENT = 2

@dataclass(frozen=True)
class AveragingScheme:
    """
    Weights of the repeated game: decision t enters the reported average with weight t^p and the
    minimizers receive the payoff of round t with weight t^q.

    :param decision_exponent: The exponent p, between 0 and 2.
    :type decision_exponent: int
    :param payoff_exponent: The exponent q, nonnegative.
    :type payoff_exponent: int

    Usage:

    >>> scheme = AveragingScheme.from_name("linear")
    >>> scheme.decision_weight(3)
    3.0
    """
    decision_exponent: int = 1
    payoff_exponent: int = 0

    def __post_init__(self):
        if not 0 <= self.decision_exponent <= MAX_DECISION_EXPONENT:
            raise InvalidParameterError(f"Decision exponent must be between 0 and {MAX_DECISION_EXPONENT}, got {self.decision_exponent}")
        if self.payoff_exponent < 0:
            raise InvalidParameterError(f"Payoff exponent must be nonnegative, got {self.payoff_exponent}")

    @classmethod
    def uniform(cls):
        return cls(0, 0)

    @classmethod
    def linear(cls):
        return cls(1, 0)

    @classmethod
    def quadratic(cls):
        return cls(2, 0)

    @classmethod
    def linear_both(cls):
        return cls(1, 1)

    @classmethod
    def from_name(cls, name):
        presets = {"uniform": cls.uniform, "linear": cls.linear, "quadratic": cls.quadratic, "linear-both": cls.linear_both}
        if name not in presets:
            raise InvalidParameterError(f"Unknown averaging scheme: {name}. Expected one of {', '.join(presets)}")
        return presets[name]()

    @property
    def name(self):
        names = {(0, 0): "uniform", (1, 0): "linear", (2, 0): "quadratic", (1, 1): "linear-both"}
        return names.get((self.decision_exponent, self.payoff_exponent), f"p={self.decision_exponent},q={self.payoff_exponent}")

    def decision_weight(self, t):
        return float(t) ** self.decision_exponent

    def payoff_weight(self, t):
        return float(t) ** self.payoff_exponent

@dataclass(frozen=True, eq=False)
class Checkpoint:
    iteration: int
    metric: float
    x_average: np.ndarray
    y_average: np.ndarray
    elapsed: float
    regret_x: float
    regret_y: float
    weight_sum: float

@dataclass(eq=False)
class RunRecord:
    """
    Result of :func:`run`: the checkpoints in increasing iteration order and the run settings.
    """
    algorithm_x: str
    algorithm_y: str
    scheme: AveragingScheme
    mode: Mode
    seed: int = None
    checkpoints: list = field(default_factory=list)

    @property
    def iterations(self):
        return [checkpoint.iteration for checkpoint in self.checkpoints]

    @property
    def metrics(self):
        return [checkpoint.metric for checkpoint in self.checkpoints]

    @property
    def final(self):
        return self.checkpoints[-1]

    def echo(self):
        return {
            "algorithm_x": self.algorithm_x,
            "algorithm_y": self.algorithm_y,
            "averaging": self.scheme.name,
            "mode": self.mode.value,
            "seed": self.seed,
        }

class _RunningAverage:
    """
    [Internal]

    Weighted mean updated in place as x_bar += (w / (S + w)) * (x - x_bar), which keeps the
    average inside any convex set holding the iterates.
    """
    def __init__(self):
        self.value = None
        self.weight_sum = 0.0

    def add(self, point, weight):
        self.weight_sum += weight
        if self.value is None:
            self.value = np.array(point, dtype=float)
        else:
            self.value = self.value + (weight / self.weight_sum) * (point - self.value)

class _RegretTracker:
    """
    [Internal]

    Keeps sum(w_t <f_t, x_t>) and sum(w_t f_t) so that the regret is available at any round.
    """
    def __init__(self, geometry):
        self.geometry = geometry
        self.played = 0.0
        self.loss_sum = np.zeros(geometry.dimension)

    def add(self, loss, decision, weight):
        self.played += weight * float(loss @ decision)
        self.loss_sum = self.loss_sum + weight * loss

    def value(self):
        return self.played - self.geometry.linear_minimum(self.loss_sum)

def checkpoint_schedule(horizon):
    """
    Returns the powers of two up to the horizon, plus the horizon itself.

    Usage:

    >>> checkpoint_schedule(6)
    [1, 2, 4, 6]
    """
    if int(horizon) != horizon or horizon < 1:
        raise InvalidParameterError(f"Horizon must be an integer >= 1, got {horizon}")
    schedule = []
    power = 1
    while power <= horizon:
        schedule.append(power)
        power *= 2
    if schedule[-1] != horizon:
        schedule.append(int(horizon))
    return schedule

def weighted_average(iterates, exponent):
    """
    Returns sum(t^p x_t) / sum(t^p) with t counted from 1.

    :param iterates: The sequence x_1, ..., x_T.
    :type iterates: list
    :param exponent: The exponent p.
    :type exponent: int
    :rtype: numpy.ndarray

    Usage:

    >>> weighted_average([np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([0.0, 1.0])], 1)
    array([0.16666667, 0.83333333])
    """
    if len(iterates) == 0:
        raise InvalidParameterError("Cannot average an empty list of iterates")
    weights = np.arange(1, len(iterates) + 1, dtype=float) ** exponent
    return np.average(np.asarray(iterates, dtype=float), axis=0, weights=weights)

def regret_to_date(loss_history, decision_history, weights, geometry):
    """
    Weighted regret sum(w_t <f_t, x_t>) - min over X of <sum(w_t f_t), x>, with the minimum
    in closed form from the geometry.

    :param loss_history: Losses f_1, ..., f_T.
    :type loss_history: list
    :param decision_history: Decisions x_1, ..., x_T.
    :type decision_history: list
    :param weights: Weights w_1, ..., w_T, or None for unit weights.
    :type weights: list
    :param geometry: The decision set.
    :type geometry: ConeGeometry
    :rtype: float
    """
    if len(loss_history) != len(decision_history):
        raise DimensionMismatchError(f"Got {len(loss_history)} losses for {len(decision_history)} decisions")
    if weights is None:
        weights = np.ones(len(loss_history))
    if len(weights) != len(loss_history):
        raise DimensionMismatchError(f"Got {len(weights)} weights for {len(loss_history)} losses")
    tracker = _RegretTracker(geometry)
    for loss, decision, weight in zip(loss_history, decision_history, weights):
        tracker.add(geometry.check_point(loss), geometry.check_point(decision), float(weight))
    return tracker.value()

def _checked(values, dimension, name):
    values = np.asarray(values, dtype=float).ravel()
    if values.shape[0] != dimension:
        raise DimensionMismatchError(f"{name} has dimension {values.shape[0]}, expected {dimension}")
    if not np.all(np.isfinite(values)):
        raise NonFiniteError(f"{name} returned non-finite values")
    return values

def run(problem, algo_x, algo_y, horizon, scheme=None, mode=Mode.ALTERNATION, checkpoints=None, seed=None):
    """
    Plays the two regret minimizers against each other on a saddle problem for a number of rounds.

    The y-player maximizes, so it is fed the negated y-subgradient. In alternation mode the round t is:
    x chooses; y observes g at (x_t, y_{t-1}) when t >= 2; y chooses; x observes f at (x_t, y_t).
    Regrets use the decision weights. In alternation the y-regret only covers the decisions whose
    loss was already observed, so it lags by one round.

    :param problem: Object exposing x_geometry, y_geometry, x_subgradient, y_subgradient and metric.
    :type problem: SaddleProblem
    :param algo_x: The minimizing player.
    :type algo_x: RegretMinimizer
    :param algo_y: The maximizing player.
    :type algo_y: RegretMinimizer
    :param horizon: Number of rounds T.
    :type horizon: int
    :param scheme: Decision and payoff weights. - **Default:** AveragingScheme.linear()
    :type scheme: AveragingScheme
    :param mode: Update order. - **Default:** Mode.ALTERNATION
    :type mode: Mode
    :param checkpoints: Iterations at which the metric is recorded. - **Default:** checkpoint_schedule(horizon)
    :type checkpoints: list
    :param seed: Recorded in the result only.
    :type seed: int
    :rtype: RunRecord

    Usage:

    >>> record = run(game, build_minimizer("cba+", game.x_geometry), build_minimizer("cba+", game.y_geometry), 1000)
    >>> record.final.metric
    """
    scheme = AveragingScheme.linear() if scheme is None else scheme
    mode = Mode(mode)
    schedule = set(checkpoint_schedule(horizon) if checkpoints is None else checkpoints)
    if not schedule or min(schedule) < 1 or max(schedule) > horizon:
        raise InvalidParameterError(f"Checkpoints must lie between 1 and {horizon}")

    x_geometry, y_geometry = problem.x_geometry, problem.y_geometry
    for player, geometry, name in ((algo_x, x_geometry, "x"), (algo_y, y_geometry, "y")):
        if player.geometry.dimension != geometry.dimension:
            raise DimensionMismatchError(f"The {name}-player plays in dimension {player.geometry.dimension}, the problem expects {geometry.dimension}")
    n, m = x_geometry.dimension, y_geometry.dimension

    record = RunRecord(algo_x.algorithm.value, algo_y.algorithm.value, scheme, mode, seed)
    x_average, y_average = _RunningAverage(), _RunningAverage()
    regret_x, regret_y = _RegretTracker(x_geometry), _RegretTracker(y_geometry)
    previous_y = None
    start = time.perf_counter()

    for t in range(1, horizon + 1):
        weight = scheme.decision_weight(t)
        x = _checked(algo_x.next_decision(), n, "x-player")

        if mode == Mode.SIMULTANEOUS:
            y = _checked(algo_y.next_decision(), m, "y-player")
            f = _checked(problem.x_subgradient(x, y), n, "x-subgradient")
            g = _checked(problem.y_subgradient(x, y), m, "y-subgradient")
            algo_x.observe(f, scheme.payoff_weight(t))
            algo_y.observe(-g, scheme.payoff_weight(t))
            regret_y.add(-g, y, weight)
        else:
            if previous_y is not None:
                g = _checked(problem.y_subgradient(x, previous_y), m, "y-subgradient")
                algo_y.observe(-g, scheme.payoff_weight(t - 1))
                regret_y.add(-g, previous_y, scheme.decision_weight(t - 1))
            y = _checked(algo_y.next_decision(), m, "y-player")
            f = _checked(problem.x_subgradient(x, y), n, "x-subgradient")
            algo_x.observe(f, scheme.payoff_weight(t))
            previous_y = y

        regret_x.add(f, x, weight)
        x_average.add(x, weight)
        y_average.add(y, weight)

        if t in schedule:
            record.checkpoints.append(Checkpoint(
                iteration=t,
                metric=float(problem.metric(x_average.value, y_average.value)),
                x_average=x_average.value.copy(),
                y_average=y_average.value.copy(),
                elapsed=time.perf_counter() - start,
                regret_x=regret_x.value(),
                regret_y=regret_y.value(),
                weight_sum=x_average.weight_sum,
            ))

    return record
