import os
import sys

from cba.cli import describe, run_experiment
from cba.problems.core.config import ConfigLoader
from cba.problems.core.data_io import generate_matrix, generate_synthetic_dro, load_libsvm
from cba.problems.dro_internal import DroInstance, dro_bounds, dro_losses, dro_worst_case_loss, dro_x_subgradient
from cba.problems.matrix_game_internal import MatrixGameInternal, matrix_bounds, matrix_duality_gap, matrix_gradients
"""
This file must contain the definition of all User Classes.

These classes will contain only calls to the Internal classes.
"""

def _load_config(config_path):
    if config_path == "":
        config_path = os.path.join(sys.path[0], r"config.json")
    return ConfigLoader(config_path)

class MatrixGame():
    """
    Instantiates a bilinear matrix game min over x, max over y of <x, A y> on two simplexes.

    If no payoff is passed, one is sampled from the N, M, Dist and Seed config values.

    :param payoff: The payoff matrix A. - **Default:** None
    :type payoff: numpy.ndarray
    :param config_path: The path to the config file. - **Default:** "" (empty string)
    :type config_path: str

    Usage:

    >>> game = MatrixGame([[0.0, 1.0], [1.0, 0.0]])
    >>> record = game.Solve("cba+", steps=1000)
    """
    def __init__(self, payoff=None, config_path=""):
        config = _load_config(config_path)
        if payoff is None:
            payoff = generate_matrix(config.n, config.m, config.dist or "uniform01", config.seed)
        self.__game = MatrixGameInternal(payoff, config=config)

    def Gradients(self, x, y):
        """
        Returns the subgradients (A y, A^T x).

        :param x: A point of the x-simplex.
        :type x: numpy.ndarray
        :param y: A point of the y-simplex.
        :type y: numpy.ndarray
        :rtype: tuple

        Usage:

        >>> f, g = game.Gradients([0.5, 0.5], [1.0, 0.0])
        """
        return matrix_gradients(self.__game, x, y)

    def DualityGap(self, x, y):
        """
        Returns the duality gap of the pair (x, y).

        Usage:

        >>> game.DualityGap([0.5, 0.5], [0.5, 0.5])
        0.0
        """
        return matrix_duality_gap(self.__game, x, y)

    def Bounds(self):
        """
        Returns (L_x, L_y, Omega_x, Omega_y).
        """
        return matrix_bounds(self.__game)

    def Solve(self, algorithm=None, steps=None, mode=None, averaging=None, step_mode=None, alpha=None):
        """
        Runs self-play of an algorithm and returns the run record. Arguments left as None take their config value.

        :param algorithm: One of cba, cba+, rm, rm+, omd, ftrl, oomd, oftrl.
        :type algorithm: str
        :param steps: Horizon T.
        :type steps: int
        :param mode: "simultaneous" or "alternation".
        :type mode: str
        :param averaging: "uniform", "linear", "quadratic" or "linear-both".
        :type averaging: str
        :param step_mode: "theory", "fixed:<eta>", "multiplier:<alpha>" or "adaptive".
        :type step_mode: str
        :param alpha: Multiplier of the theoretical step size.
        :type alpha: float
        :rtype: RunRecord

        Usage:

        >>> record = game.Solve("rm+", steps=2000, mode="alternation", averaging="linear")
        >>> record.final.metric
        """
        return self.__game.solve(algorithm, steps, mode, averaging, step_mode, alpha)

class Dro():
    """
    Instantiates a distributionally robust logistic regression problem.

    If no features are passed, the dataset comes from the Data config value when set,
    otherwise a synthetic instance is sampled from the N, M, Dist, Flip and Seed config values.

    :param features: The m x n sample matrix. - **Default:** None
    :type features: numpy.ndarray
    :param labels: The m labels in {-1, +1}. - **Default:** None
    :type labels: numpy.ndarray
    :param config_path: The path to the config file. - **Default:** "" (empty string)
    :type config_path: str

    Usage:

    >>> problem = Dro(dataset.features, dataset.labels)
    >>> record = problem.Solve("cba+", steps=1000)
    """
    def __init__(self, features=None, labels=None, config_path=""):
        config = _load_config(config_path)
        provenance = ""
        if features is None:
            if config.data:
                dataset = load_libsvm(config.data)
            else:
                dataset = generate_synthetic_dro(config.n, config.m, config.dist or "normal", config.flip, config.seed)
            features, labels, provenance = dataset.features, dataset.labels, dataset.provenance
        self.__problem = DroInstance(features, labels, config.radius, config.lambda_, provenance=provenance, config=config)

    def Losses(self, x):
        """
        Returns the logistic loss of every sample at x.
        """
        return dro_losses(self.__problem, x)

    def Subgradient(self, x, y):
        """
        Returns the x-subgradient of sum_i y_i loss_i(x).
        """
        return dro_x_subgradient(self.__problem, x, y)

    def WorstCaseLoss(self, x):
        """
        Returns the largest reweighted loss at x over the ambiguity set.

        Usage:

        >>> problem.WorstCaseLoss(record.final.x_average)
        """
        return dro_worst_case_loss(self.__problem, x)

    def Bounds(self):
        return dro_bounds(self.__problem)

    def Solve(self, algorithm=None, steps=None, mode=None, averaging=None, step_mode=None, alpha=None):
        """
        Runs self-play of an algorithm and returns the run record. Regret matching is not available here
        because neither decision set is a simplex.

        :rtype: RunRecord
        """
        return self.__problem.solve(algorithm, steps, mode, averaging, step_mode, alpha)

class Experiment():
    """
    Instantiates a batch of instances described by a config file and keyword overrides.

    :param config_path: The path to the config file. - **Default:** "" (empty string)
    :type config_path: str
    :param overrides: Config attributes to override, as steps=2000 or algorithm="cba+".
    :type overrides: dict

    Usage:

    >>> experiment = Experiment("config.json", instances=70, steps=2000)
    >>> log = experiment.Run()
    >>> log.save_file("results.csv")
    """
    def __init__(self, config_path="", **overrides):
        self.config = _load_config(config_path).update(**overrides)

    def Run(self):
        """
        Runs every instance and returns the log with one row per (instance, checkpoint).
        """
        return run_experiment(self.config)

    def Describe(self):
        """
        Returns the resolved parameters of the first instance as text.
        """
        return describe(self.config)
