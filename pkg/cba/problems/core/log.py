import csv
import json
import math
import sys
from datetime import datetime

import numpy as np
import pandas as panda

DIVERGED = "diverged"
GEOMETRIC_FLOOR = 1e-16

class Log:
    """
    This class is instantiated to collect the checkpoint rows of an experiment and to write them out.

    :param divergence_guard: Metrics above this value, or non-finite ones, are written as "diverged". - **Default:** 1e12
    :type divergence_guard: float
    :param debug: Prints debug messages to stderr. - **Default:** False
    :type debug: bool

    Usage:

    >>> # Instanted inside base.py:
    >>> self.log = Log(self.config.divergence_guard, self.config.debug_log)
    """
    def __init__(self, divergence_guard=1e12, debug=False):
        self.divergence_guard = divergence_guard
        self.debug_enabled = debug
        self.initial_time = datetime.today()
        self.seconds = 0
        self.table_rows = []
        self.table_rows.append(self.generate_header())

    def generate_header(self):
        """
        Generates the header line of the CSV file.

        Usage:

        >>> # Calling the method:
        >>> self.log.generate_header()
        """
        return ["instance", "algorithm", "iteration", "metric", "elapsed_s"]

    @property
    def rows(self):
        return self.table_rows[1:]

    def is_diverged(self, metric):
        return not math.isfinite(metric) or metric > self.divergence_guard

    def new_line(self, instance, algorithm, iteration, metric, elapsed):
        """
        Appends a checkpoint row. The metric is written with repr so reruns compare bitwise.

        :param instance: Index of the instance.
        :type instance: int
        :param algorithm: Name of the algorithm.
        :type algorithm: str
        :param iteration: The checkpoint iteration.
        :type iteration: int
        :param metric: The metric value, or None when the run crashed numerically.
        :type metric: float
        :param elapsed: Seconds since the run started.
        :type elapsed: float

        Usage:

        >>> # Calling the method:
        >>> self.log.new_line(0, "cba+", 1024, 0.0013, 0.52)
        """
        metric = float("nan") if metric is None else float(metric)
        value = DIVERGED if self.is_diverged(metric) else repr(metric)
        self.table_rows.append([instance, algorithm, iteration, value, f"{elapsed:.6f}"])

    def add_record(self, instance, record):
        """
        Appends one row per checkpoint of a run record.
        """
        for checkpoint in record.checkpoints:
            self.new_line(instance, record.algorithm_x, checkpoint.iteration, checkpoint.metric, checkpoint.elapsed)

    def add_diverged(self, instance, algorithm, iterations, elapsed):
        """
        Records a run stopped by non-finite oracle output: every checkpoint reads "diverged".
        """
        for iteration in iterations:
            self.new_line(instance, algorithm, iteration, None, elapsed)

    def extend(self, rows):
        self.table_rows.extend(rows)

    def save_file(self, filename=""):
        """
        Writes the CSV file to the file system, or to stdout when filename is empty.

        Usage:

        >>> # Calling the method:
        >>> self.log.save_file("results.csv")
        """
        if filename:
            with open(filename, mode="w", newline="", encoding="utf-8") as csv_file:
                csv.writer(csv_file).writerows(self.table_rows)
            self.debug(f"Log file created successfully: {filename}")
        else:
            csv.writer(sys.stdout, lineterminator="\n").writerows(self.table_rows)

    def set_seconds(self):
        """
        Sets the seconds variable through a calculation of current time minus the execution start time.
        """
        delta = datetime.today() - self.initial_time
        self.seconds = round(delta.total_seconds(), 2)

    def dataframe(self):
        frame = panda.DataFrame(self.rows, columns=self.generate_header())
        frame["diverged"] = frame["metric"] == DIVERGED
        frame["value"] = panda.to_numeric(frame["metric"].where(~frame["diverged"]), errors="coerce")
        return frame

    def summary(self):
        """
        Aggregates the rows across instances, per algorithm and checkpoint iteration.

        The geometric mean clips metrics at 1e-16 so that zero gaps stay finite on a log scale.

        :return: One dict per (algorithm, iteration) pair.
        :rtype: list
        """
        frame = self.dataframe()
        checkpoints = []
        for (algorithm, iteration), group in frame.groupby(["algorithm", "iteration"], sort=True):
            finite = group["value"].dropna()
            entry = {
                "algorithm": algorithm,
                "iteration": int(iteration),
                "instances": int(len(group)),
                "diverged": int(group["diverged"].sum()),
                "geometric_mean": None,
                "arithmetic_mean": None,
                "median": None,
            }
            if len(finite):
                entry["geometric_mean"] = float(np.exp(np.log(np.maximum(finite.to_numpy(), GEOMETRIC_FLOOR)).mean()))
                entry["arithmetic_mean"] = float(finite.mean())
                entry["median"] = float(finite.median())
            checkpoints.append(entry)
        return checkpoints

    def save_summary(self, filename, config_echo):
        """
        Writes the summary and the resolved configuration as JSON.
        """
        with open(filename, mode="w", encoding="utf-8") as json_file:
            json.dump({"config": config_echo, "checkpoints": self.summary()}, json_file, indent=2)
        self.debug(f"Summary file created successfully: {filename}")

    def warning(self, message):
        print(f"Warning: {message}", file=sys.stderr)

    def debug(self, message):
        if self.debug_enabled:
            print(f"Debug: {message}", file=sys.stderr)
