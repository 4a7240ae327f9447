import argparse
import math
import os
import sys
import time
from multiprocessing import Pool

from cba.problems.core.base import resolve_step_mode
from cba.problems.core.config import ConfigLoader
from cba.problems.core.data_io import generate_matrix, generate_synthetic_dro, load_libsvm
from cba.problems.core.enumerations import Algorithm, Distribution, Mode, Problem
from cba.problems.core.exceptions import CbaError, ConfigError, DatasetError, InvalidParameterError, NonFiniteError
from cba.problems.core.framework import AveragingScheme, checkpoint_schedule
from cba.problems.core.geometry import ellipsoid_containment
from cba.problems.core.log import Log
from cba.problems.core.minimizers import theoretical_step_size
from cba.problems.dro_internal import DroInstance
from cba.problems.matrix_game_internal import MatrixGameInternal

EXIT_CONFIG_ERROR = 2
EXIT_IO_ERROR = 3
EXIT_RUN_ERROR = 4

DEFAULT_DISTRIBUTION = {Problem.MATRIX_GAME: Distribution.UNIFORM01, Problem.DRO: Distribution.NORMAL}
MATRIX_DISTRIBUTIONS = (Distribution.UNIFORM01, Distribution.NORMAL01)
DRO_DISTRIBUTIONS = (Distribution.NORMAL, Distribution.UNIFORM)

def _enum_value(enumeration, value, name):
    try:
        return enumeration(value)
    except ValueError:
        raise ConfigError(f"Unknown {name}: {value}. Expected one of {', '.join(item.value for item in enumeration)}")

def validate_config(config):
    """
    Checks every value of a resolved configuration.

    :param config: The resolved configuration.
    :type config: ConfigLoader
    :raises ConfigError: On the first invalid value.
    """
    problem = _enum_value(Problem, config.problem, "problem")
    algorithm = _enum_value(Algorithm, config.algorithm, "algorithm")
    _enum_value(Mode, config.mode, "mode")
    try:
        AveragingScheme.from_name(config.averaging)
    except InvalidParameterError as error:
        raise ConfigError(str(error))
    if not config.alpha > 0:
        raise ConfigError(f"Alpha must be positive, got {config.alpha}")
    resolve_step_mode(config.step_mode, config.alpha)

    if problem == Problem.DRO and algorithm in (Algorithm.RM, Algorithm.RM_PLUS):
        raise ConfigError(f"{algorithm.value} only runs on simplex decision sets, use it with matrix-game")
    for value, name, minimum in ((config.steps, "steps", 1), (config.instances, "instances", 1), (config.n, "n", 1),
                                 (config.m, "m", 1), (config.workers, "workers", 0)):
        if int(value) != value or value < minimum:
            raise ConfigError(f"{name} must be an integer >= {minimum}, got {value}")
    if config.dist:
        dist = _enum_value(Distribution, config.dist, "distribution")
        allowed = MATRIX_DISTRIBUTIONS if problem == Problem.MATRIX_GAME else DRO_DISTRIBUTIONS
        if dist not in allowed:
            raise ConfigError(f"Distribution {dist.value} does not apply to {problem.value}")
    if not (math.isfinite(config.radius) and config.radius > 0):
        raise ConfigError(f"Radius must be positive, got {config.radius}")
    if config.lambda_ is not None and not (math.isfinite(config.lambda_) and config.lambda_ > 0):
        raise ConfigError(f"Lambda must be positive, got {config.lambda_}")
    if not 0.0 <= config.flip <= 1.0:
        raise ConfigError(f"Flip must lie in [0, 1], got {config.flip}")
    if problem == Problem.DRO and not config.data and config.m < 2:
        raise ConfigError("DRO instances need m >= 2 samples")
    return config

def distribution(config):
    return Distribution(config.dist) if config.dist else DEFAULT_DISTRIBUTION[Problem(config.problem)]

def load_dataset(config):
    """
    Reads the libsvm file of a DRO configuration, or returns None when instances are synthetic.
    OSError and DatasetError propagate.
    """
    if Problem(config.problem) != Problem.DRO or not config.data:
        return None
    return load_libsvm(config.data)

def build_problem(config, instance, dataset=None):
    """
    Builds the saddle problem of an instance, sampled with seed + instance when synthetic.
    """
    seed = config.seed + instance
    if Problem(config.problem) == Problem.MATRIX_GAME:
        return MatrixGameInternal(generate_matrix(config.n, config.m, distribution(config).value, seed), config=config)
    if dataset is None:
        dataset = generate_synthetic_dro(config.n, config.m, distribution(config).value, config.flip, seed)
    return DroInstance(dataset.features, dataset.labels, config.radius, config.lambda_, provenance=dataset.provenance, config=config)

def _run_instance(task):
    config, instance, dataset = task
    problem = build_problem(config, instance, dataset)
    start = time.perf_counter()
    try:
        record = problem.solve(seed=config.seed + instance)
        problem.log.add_record(instance, record)
    except NonFiniteError as error:
        problem.log.debug(f"Instance {instance} stopped: {error}")
        problem.log.add_diverged(instance, config.algorithm, checkpoint_schedule(config.steps), time.perf_counter() - start)
    return problem.log.rows

def run_experiment(config):
    """
    Runs every instance of a configuration and collects one row per (instance, checkpoint).

    Instances run in a process pool when more than one worker is available. Rows keep the instance order.

    :param config: The resolved configuration.
    :type config: ConfigLoader
    :return: The log holding the rows, ready for save_file and save_summary.
    :rtype: Log

    Usage:

    >>> log = run_experiment(config)
    >>> log.save_file("results.csv")
    """
    validate_config(config)
    dataset = load_dataset(config)
    tasks = [(config, instance, dataset) for instance in range(config.instances)]
    workers = min(config.workers or os.cpu_count() or 1, len(tasks))

    log = Log(config.divergence_guard, config.debug_log)
    if workers == 1:
        results = [_run_instance(task) for task in tasks]
    else:
        with Pool(workers) as pool:
            results = pool.map(_run_instance, tasks)
    for rows in results:
        log.extend(rows)
    log.set_seconds()
    log.debug(f"{config.instances} instances finished in {log.seconds} seconds")
    return log

def describe(config):
    """
    Returns the resolved parameters of instance 0 that a fixed-step baseline needs: kappa, Omega,
    the loss bounds and the theoretical step sizes.

    :rtype: str
    """
    validate_config(config)
    dataset = load_dataset(config)
    problem = build_problem(config, 0, dataset)
    loss_x, loss_y, diameter_x, diameter_y = problem.bounds()
    lines = [f"problem: {config.problem}"]

    if isinstance(problem, DroInstance):
        lines.append(f"dataset: {problem.dataset.provenance}")
        lines.append(f"samples m: {problem.dataset.samples}")
        lines.append(f"features n: {problem.dataset.dimension}")
        lines.append(f"radius R: {problem.radius!r}")
        lines.append(f"lambda: {problem.lambda_!r}")
        lines.append(f"epsilon_y: {problem.epsilon!r}")
        lines.append(f"ambiguity set inside simplex: {ellipsoid_containment(problem.y_geometry.center, problem.epsilon, config.tolerance)}")
    else:
        lines.append(f"n: {problem.x_geometry.dimension}")
        lines.append(f"m: {problem.y_geometry.dimension}")
        lines.append(f"distribution: {distribution(config).value}")

    for name, geometry, loss_bound, diameter in (("x", problem.x_geometry, loss_x, diameter_x), ("y", problem.y_geometry, loss_y, diameter_y)):
        lines.append(f"kappa_{name}: {geometry.kappa!r}")
        lines.append(f"omega_{name}: {diameter!r}")
        lines.append(f"L_{name}: {loss_bound!r}")
        if loss_bound > 0 and diameter > 0:
            lines.append(f"eta_th_{name}: {theoretical_step_size(diameter, loss_bound, config.steps)!r}")
        else:
            lines.append(f"eta_th_{name}: undefined")
    lines.append(f"steps T: {config.steps}")
    return "\n".join(lines)

def _add_common_arguments(parser):
    parser.add_argument("--config", default="", help="JSON config file; flags override its values")
    parser.add_argument("--algo", dest="algorithm", help="cba, cba+, rm, rm+, omd, ftrl, oomd or oftrl")
    parser.add_argument("--steps", type=int)
    parser.add_argument("--instances", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--mode", help="simultaneous or alternation")
    parser.add_argument("--averaging", help="uniform, linear, quadratic or linear-both")
    parser.add_argument("--step-mode", dest="step_mode", help="theory, fixed:<eta>, multiplier:<alpha> or adaptive")
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--n", type=int)
    parser.add_argument("--m", type=int)
    parser.add_argument("--dist")
    parser.add_argument("--data", help="libsvm dataset path")
    parser.add_argument("--radius", type=float)
    parser.add_argument("--lambda", dest="lambda_", type=float)
    parser.add_argument("--flip", type=float)
    parser.add_argument("--out", help="CSV path, stdout when omitted")
    parser.add_argument("--summary", help="JSON summary path")
    parser.add_argument("--workers", type=int)
    parser.add_argument("--debug", dest="debug_log", action="store_const", const=True)

def build_parser():
    parser = argparse.ArgumentParser(prog="cba", description="Saddle-point experiments with conic Blackwell algorithms and their baselines.")
    subparsers = parser.add_subparsers(dest="command")
    subparsers.required = True
    for command in ("matrix-game", "dro"):
        _add_common_arguments(subparsers.add_parser(command, help=f"run {command} instances"))
    describe_parser = subparsers.add_parser("describe", help="print the resolved parameters without running")
    _add_common_arguments(describe_parser)
    describe_parser.add_argument("--problem", help="matrix-game or dro")
    return parser

def load_config(args):
    """
    Resolves defaults, then the JSON file, then the command-line flags.
    """
    if args.config and not os.path.isfile(args.config):
        raise ConfigError(f"Config file not found: {args.config}")
    try:
        config = ConfigLoader(args.config)
    except (ValueError, TypeError) as error:
        raise ConfigError(f"Cannot read config file {args.config}: {error}")

    overrides = {key: value for key, value in vars(args).items() if key not in ("command", "config", "problem")}
    if args.command != "describe":
        overrides["problem"] = args.command
    else:
        overrides["problem"] = args.problem
    return config.update(**overrides)

def main(argv=None):
    """
    Entry point of the cba command. Returns 0 on success, 2 on configuration errors, 3 on I/O errors and 4 when a run
    fails its own checks.
    """
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
        if args.command == "describe":
            print(describe(config))
            return 0
        log = run_experiment(config)
        log.save_file(config.out)
        if config.summary:
            log.save_summary(config.summary, config.echo())
    except (ConfigError, InvalidParameterError) as error:
        print(f"Error: {error}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (OSError, DatasetError) as error:
        print(f"Error: {error}", file=sys.stderr)
        return EXIT_IO_ERROR
    except CbaError as error:
        print(f"Error: {error}", file=sys.stderr)
        return EXIT_RUN_ERROR
    return 0
