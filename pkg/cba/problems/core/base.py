import os
import sys

from cba.problems.core import framework
from cba.problems.core.config import ConfigLoader
from cba.problems.core.enumerations import Algorithm, Mode, StepMode
from cba.problems.core.exceptions import ConfigError
from cba.problems.core.log import Log
from cba.problems.core.minimizers import StepPolicy, build_minimizer, theoretical_step_size

def resolve_step_mode(step_mode, alpha=1.0):
    """
    Reads a step-mode string: "theory", "adaptive", "fixed:<eta>", "multiplier:<alpha>" or "multiplier"
    (which takes alpha).

    :return: The step mode and its value (eta, alpha, or None for adaptive).
    :rtype: tuple

    Usage:

    >>> resolve_step_mode("multiplier:100")
    (<StepMode.MULTIPLIER: 'multiplier'>, 100.0)
    """
    name, _, argument = str(step_mode).partition(":")
    try:
        mode = StepMode(name)
    except ValueError:
        raise ConfigError(f"Unknown step mode: {step_mode}")

    if mode == StepMode.ADAPTIVE:
        return mode, None
    if mode == StepMode.THEORY:
        value = 1.0
    elif argument:
        try:
            value = float(argument)
        except ValueError:
            raise ConfigError(f"Cannot read the value of step mode {step_mode}")
    elif mode == StepMode.MULTIPLIER:
        value = float(alpha)
    else:
        raise ConfigError("Fixed step mode needs a value, as in fixed:0.1")

    if not value > 0:
        raise ConfigError(f"Step mode {step_mode} needs a positive value, got {value}")
    return mode, value

class SaddleProblem:
    """
    Base class of the saddle problems min over x in X, max over y in Y of F(x, y).

    This class reads the config file and prepares the log. Subclasses set x_geometry and y_geometry
    and implement the oracles.

    If no config_path is passed, it will read the config.json file that exists in the same
    folder as the file that would execute this module.

    :param config_path: The path to the config file. - **Default:** "" (empty string)
    :type config_path: str
    :param config: An already resolved configuration, used instead of reading config_path. - **Default:** None
    :type config: ConfigLoader
    """
    x_geometry = None
    y_geometry = None

    def __init__(self, config_path="", config=None):
        if config is None:
            if config_path == "":
                config_path = os.path.join(sys.path[0], r"config.json")
            config = ConfigLoader(config_path)
        self.config = config
        self.log = Log(self.config.divergence_guard, self.config.debug_log)

    def x_subgradient(self, x, y):
        raise NotImplementedError

    def y_subgradient(self, x, y):
        raise NotImplementedError

    def metric(self, x_average, y_average):
        raise NotImplementedError

    def bounds(self):
        """
        Returns (L_x, L_y, Omega_x, Omega_y): subgradient norm bounds and set diameters.
        """
        raise NotImplementedError

    def step_policies(self, horizon, step_mode="theory", alpha=1.0):
        """
        Builds the step policy of each player for the proximal baselines.

        Theory and multiplier modes use alpha * sqrt(2) * Omega / (L * sqrt(T)). A player whose loss bound
        or diameter is zero falls back on the configured initial step.

        :rtype: tuple
        """
        mode, value = resolve_step_mode(step_mode, alpha)
        if mode == StepMode.ADAPTIVE:
            policy = StepPolicy.adaptive(self.config.initial_step)
            return policy, policy
        if mode == StepMode.FIXED:
            policy = StepPolicy.fixed(value)
            return policy, policy

        loss_x, loss_y, diameter_x, diameter_y = self.bounds()
        policies = []
        for loss_bound, diameter in ((loss_x, diameter_x), (loss_y, diameter_y)):
            if loss_bound > 0 and diameter > 0:
                policies.append(StepPolicy.fixed(value * theoretical_step_size(diameter, loss_bound, horizon)))
            else:
                self.log.debug("Zero loss bound or diameter, using the initial step size")
                policies.append(StepPolicy.fixed(self.config.initial_step))
        return tuple(policies)

    def players(self, algorithm, horizon, step_mode="theory", alpha=1.0):
        algorithm = Algorithm(algorithm)
        policy_x, policy_y = (None, None)
        if algorithm not in (Algorithm.CBA, Algorithm.CBA_PLUS, Algorithm.RM, Algorithm.RM_PLUS):
            policy_x, policy_y = self.step_policies(horizon, step_mode, alpha)
        precision = self.config.prox_precision
        return (build_minimizer(algorithm, self.x_geometry, policy_x, precision),
                build_minimizer(algorithm, self.y_geometry, policy_y, precision))

    def solve(self, algorithm=None, steps=None, mode=None, averaging=None, step_mode=None, alpha=None, seed=None, checkpoints=None):
        """
        Runs self-play of one algorithm on this problem. Arguments left as None take their config value.

        :param algorithm: Algorithm name, as "cba+".
        :type algorithm: str
        :param steps: Horizon T.
        :type steps: int
        :param mode: "simultaneous" or "alternation".
        :type mode: str
        :param averaging: "uniform", "linear", "quadratic" or "linear-both".
        :type averaging: str
        :param step_mode: Step policy of the proximal baselines.
        :type step_mode: str
        :param alpha: Multiplier of the theoretical step size.
        :type alpha: float
        :param seed: Recorded in the result.
        :type seed: int
        :rtype: RunRecord
        """
        algorithm = self.config.algorithm if algorithm is None else algorithm
        steps = self.config.steps if steps is None else steps
        mode = Mode(self.config.mode if mode is None else mode)
        scheme = framework.AveragingScheme.from_name(self.config.averaging if averaging is None else averaging)
        step_mode = self.config.step_mode if step_mode is None else step_mode
        alpha = self.config.alpha if alpha is None else alpha

        algo_x, algo_y = self.players(algorithm, steps, step_mode, alpha)
        self.log.debug(f"Running {algorithm} for {steps} steps in {mode.value} mode with {scheme.name} averaging")
        return framework.run(self, algo_x, algo_y, steps, scheme, mode, checkpoints, seed)
