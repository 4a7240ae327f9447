import json
import os

class ConfigLoader:
    """
    This class is instantiated to contain all config information used throughout an experiment.

    Keys missing from the file fall back to their defaults. Command-line flags are applied
    on top of the loaded values with :meth:`update`.

    :param path: The path to the config file. - **Default:** "config.json"
    :type path: str

    Usage:

    >>> config = ConfigLoader("config.json")
    >>> config.steps
    1000
    """
    def __init__(self, path="config.json"):
        valid = bool(path) and os.path.isfile(path)

        if valid:
            with open(path) as json_data_file:
                data = json.load(json_data_file)
        else:
            data = {}

        self.json_data = data
        self.problem = str(data["Problem"]) if "Problem" in data else "matrix-game"
        self.algorithm = str(data["Algorithm"]) if "Algorithm" in data else "cba+"
        self.steps = int(data["Steps"]) if "Steps" in data else 1000
        self.instances = int(data["Instances"]) if "Instances" in data else 1
        self.seed = int(data["Seed"]) if "Seed" in data else 0
        self.mode = str(data["Mode"]) if "Mode" in data else "alternation"
        self.averaging = str(data["Averaging"]) if "Averaging" in data else "linear"
        self.step_mode = str(data["StepMode"]) if "StepMode" in data else "theory"
        self.alpha = float(data["Alpha"]) if "Alpha" in data else 1.0
        self.n = int(data["N"]) if "N" in data else 10
        self.m = int(data["M"]) if "M" in data else 10
        self.dist = str(data["Dist"]) if "Dist" in data else ""
        self.data = str(data["Data"]) if "Data" in data else ""
        self.radius = float(data["Radius"]) if "Radius" in data else 10.0
        self.lambda_ = float(data["Lambda"]) if data.get("Lambda") is not None else None
        self.flip = float(data["Flip"]) if "Flip" in data else 0.1
        self.out = str(data["Out"]) if "Out" in data else ""
        self.summary = str(data["Summary"]) if "Summary" in data else ""
        self.workers = int(data["Workers"]) if "Workers" in data else 0
        self.debug_log = ("DebugLog" in data and bool(data["DebugLog"]))
        self.tolerance = float(data["Tolerance"]) if "Tolerance" in data else 1e-9
        self.prox_precision = float(data["ProxPrecision"]) if "ProxPrecision" in data else 1e-3
        self.initial_step = float(data["InitialStep"]) if "InitialStep" in data else 1.0
        self.divergence_guard = float(data["DivergenceGuard"]) if "DivergenceGuard" in data else 1e12

    def update(self, **overrides):
        """
        Overrides loaded values. Keys whose value is None are ignored, so unset flags keep the file value.

        :param overrides: Attribute names and their new values.
        :type overrides: dict

        Usage:

        >>> config.update(steps=2000, seed=None)
        """
        for key, value in overrides.items():
            if value is None:
                continue
            if not hasattr(self, key):
                raise AttributeError(f"Unknown config key: {key}")
            setattr(self, key, value)
        return self

    def echo(self):
        """
        Returns the resolved values as a plain dict, used for the run summary.
        """
        return {key: value for key, value in vars(self).items() if key != "json_data"}
