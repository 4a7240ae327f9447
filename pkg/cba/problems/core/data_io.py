import io
import math
from dataclasses import dataclass

import numpy as np

from cba.problems.core.enumerations import Distribution
from cba.problems.core.exceptions import (DatasetError, EmptyDatasetError, InvalidParameterError, LabelCountError,
                                          MalformedTokenError, NonIncreasingIndexError)

@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Dense binary classification data: m samples with n features and labels in {-1, +1}.

    :param features: The m x n feature matrix.
    :type features: numpy.ndarray
    :param labels: The m labels.
    :type labels: numpy.ndarray
    :param provenance: Where the data came from. - **Default:** "" (empty string)
    :type provenance: str
    """
    features: np.ndarray
    labels: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        features = np.array(self.features, dtype=float)
        labels = np.array(self.labels, dtype=float).ravel()
        if features.ndim != 2 or features.shape[0] < 1 or features.shape[1] < 1:
            raise InvalidParameterError(f"Features must be a nonempty matrix, got shape {features.shape}")
        if labels.shape[0] != features.shape[0]:
            raise InvalidParameterError(f"Got {labels.shape[0]} labels for {features.shape[0]} samples")
        if not np.all(np.isin(labels, (-1.0, 1.0))):
            raise InvalidParameterError("Labels must be -1 or +1")
        if not np.all(np.isfinite(features)):
            raise InvalidParameterError("Features must be finite")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    @property
    def samples(self):
        return self.features.shape[0]

    @property
    def dimension(self):
        return self.features.shape[1]

def _distribution(dist):
    try:
        return Distribution(dist)
    except ValueError:
        raise InvalidParameterError(f"Unknown distribution: {dist}")

def _parse_entry(token, line):
    index_text, separator, value_text = token.partition(":")
    if not separator:
        raise MalformedTokenError(f"expected <index>:<value>, got '{token}'", line)
    try:
        index = int(index_text)
        value = float(value_text)
    except ValueError:
        raise MalformedTokenError(f"cannot read '{token}'", line)
    if index < 1:
        raise MalformedTokenError(f"indices are 1-based, got {index}", line)
    if not math.isfinite(value):
        raise MalformedTokenError(f"non-finite value in '{token}'", line)
    return index, value

def parse_libsvm(source, provenance="libsvm"):
    """
    Reads the libsvm sparse text format into a dense :class:`Dataset`.

    Every nonempty line reads "<label> <index>:<value> ...", with 1-based strictly increasing indices.
    Anything after '#' is ignored. The numerically larger of the two raw labels becomes +1. When the file
    holds a single raw label, positive values become +1 and the others -1.

    :param source: The text itself, or a readable text stream.
    :type source: str or io.TextIOBase
    :param provenance: Description stored in the dataset. - **Default:** "libsvm"
    :type provenance: str
    :return: The parsed dataset.
    :rtype: Dataset

    Usage:

    >>> dataset = parse_libsvm("+1 1:0.5 3:2\\n-1 2:1")
    >>> dataset.features
    array([[0.5, 0. , 2. ],
           [0. , 1. , 0. ]])
    """
    text = source if isinstance(source, str) else source.read()
    rows = []
    distinct = []
    width = 0

    for number, raw in enumerate(io.StringIO(text, newline=None), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            label = float(tokens[0])
        except ValueError:
            raise MalformedTokenError(f"cannot read label '{tokens[0]}'", number)
        if not math.isfinite(label):
            raise MalformedTokenError(f"non-finite label '{tokens[0]}'", number)
        if label not in distinct:
            if len(distinct) == 2:
                raise LabelCountError(f"third distinct label {tokens[0]}, only binary labels are supported", number)
            distinct.append(label)

        entries = []
        last = 0
        for token in tokens[1:]:
            index, value = _parse_entry(token, number)
            if index <= last:
                raise NonIncreasingIndexError(f"index {index} follows index {last}", number)
            entries.append((index, value))
            last = index
        rows.append((label, entries))
        width = max(width, last)

    if not rows:
        raise EmptyDatasetError("no samples found")
    if width == 0:
        raise EmptyDatasetError("no features found")

    features = np.zeros((len(rows), width))
    labels = np.empty(len(rows))
    positive = max(distinct) if len(distinct) == 2 else None
    for i, (label, entries) in enumerate(rows):
        for index, value in entries:
            features[i, index - 1] = value
        if positive is None:
            labels[i] = 1.0 if label > 0 else -1.0
        else:
            labels[i] = 1.0 if label == positive else -1.0
    return Dataset(features, labels, provenance)

def load_libsvm(path):
    """
    Parses a libsvm file from disk. OSError propagates when the file cannot be read, bytes that are not
    UTF-8 raise DatasetError.
    """
    try:
        with open(path, encoding="utf-8") as libsvm_file:
            return parse_libsvm(libsvm_file, provenance=str(path))
    except UnicodeDecodeError as error:
        raise DatasetError(f"{path} is not UTF-8 text: {error}")

def write_libsvm(dataset):
    """
    Serializes a dataset so that :func:`parse_libsvm` reads it back unchanged.

    Only nonzero entries are written. When the last column is all zero, the first line carries an
    explicit zero entry for it so the width survives.

    :rtype: str
    """
    n = dataset.dimension
    pad_last = not np.any(dataset.features[:, -1])
    lines = []
    for i, (row, label) in enumerate(zip(dataset.features, dataset.labels)):
        tokens = ["+1" if label > 0 else "-1"]
        tokens.extend(f"{j + 1}:{float(row[j])!r}" for j in np.flatnonzero(row))
        if i == 0 and pad_last:
            tokens.append(f"{n}:0")
        lines.append(" ".join(tokens))
    return "\n".join(lines) + "\n"

def generate_synthetic_dro(n, m, dist="normal", flip=0.1, seed=0):
    """
    Samples a classification instance: x* and features are drawn, labels are sign(a_i . x*) with sign(0) = +1,
    and exactly floor(flip * m + 0.5) labels chosen without replacement are flipped.

    The seed is split into three independent streams for x*, the features and the flips.

    :param n: Number of features.
    :type n: int
    :param m: Number of samples.
    :type m: int
    :param dist: "normal" for N(0, 1) features or "uniform" for U[0, 1]. - **Default:** "normal"
    :type dist: str
    :param flip: Fraction of labels to flip. - **Default:** 0.1
    :type flip: float
    :param seed: Seed of the generator. - **Default:** 0
    :type seed: int
    :rtype: Dataset

    Usage:

    >>> dataset = generate_synthetic_dro(50, 50, "normal", 0.1, seed=3)
    """
    if int(n) != n or int(m) != m or n < 1 or m < 1:
        raise InvalidParameterError(f"Dimensions must be integers >= 1, got n={n}, m={m}")
    if not 0.0 <= flip <= 1.0:
        raise InvalidParameterError(f"Flip fraction must lie in [0, 1], got {flip}")
    dist = _distribution(dist)
    if dist not in (Distribution.NORMAL, Distribution.UNIFORM):
        raise InvalidParameterError(f"Synthetic DRO features are normal or uniform, got {dist.value}")

    x_stream, feature_stream, flip_stream = (np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(3))
    x_star = x_stream.standard_normal(n)
    if dist == Distribution.NORMAL:
        features = feature_stream.standard_normal((m, n))
    else:
        features = feature_stream.random((m, n))
    labels = np.where(features @ x_star >= 0.0, 1.0, -1.0)

    count = int(math.floor(flip * m + 0.5))
    flipped = flip_stream.choice(m, size=count, replace=False)
    labels[flipped] = -labels[flipped]
    return Dataset(features, labels, f"synthetic {dist.value} n={n} m={m} flip={flip} seed={seed}")

def generate_matrix(n, m, dist="uniform01", seed=0):
    """
    Samples an n x m payoff matrix with i.i.d. U[0, 1] or N(0, 1) entries.

    Usage:

    >>> generate_matrix(10, 10, "uniform01", seed=7).shape
    (10, 10)
    """
    if int(n) != n or int(m) != m or n < 1 or m < 1:
        raise InvalidParameterError(f"Dimensions must be integers >= 1, got n={n}, m={m}")
    dist = _distribution(dist)
    rng = np.random.default_rng(seed)
    if dist == Distribution.UNIFORM01:
        return rng.random((n, m))
    if dist == Distribution.NORMAL01:
        return rng.standard_normal((n, m))
    raise InvalidParameterError(f"Matrix entries are uniform01 or normal01, got {dist.value}")
