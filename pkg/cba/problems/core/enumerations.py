from enum import Enum

class GeometryKind(Enum):
    '''
    Enumeration that represents the decision sets with an exact cone projection.

    SIMPLEX = 1

    L1_BALL = 2

    L2_BALL = 3

    LINF_BALL = 4

    BALL_HYPERPLANE = 5
    '''
    SIMPLEX = 1
    L1_BALL = 2
    L2_BALL = 3
    LINF_BALL = 4
    BALL_HYPERPLANE = 5

class Algorithm(Enum):
    '''
    Enumeration that represents the regret minimizers, keyed by their command-line name.
    '''
    CBA = "cba"
    CBA_PLUS = "cba+"
    RM = "rm"
    RM_PLUS = "rm+"
    OMD = "omd"
    FTRL = "ftrl"
    OPTIMISTIC_OMD = "oomd"
    OPTIMISTIC_FTRL = "oftrl"

class Mode(Enum):
    '''
    Enumeration that represents the order in which the players update.

    SIMULTANEOUS: both players observe the losses of the same round pair.

    ALTERNATION: the y-player sees the fresh x decision before choosing.
    '''
    SIMULTANEOUS = "simultaneous"
    ALTERNATION = "alternation"

class StepMode(Enum):
    '''
    Enumeration that represents how baselines pick their step size.
    '''
    THEORY = "theory"
    FIXED = "fixed"
    MULTIPLIER = "multiplier"
    ADAPTIVE = "adaptive"

class Distribution(Enum):
    '''
    Enumeration that represents the sampling law of synthetic instances.
    '''
    UNIFORM01 = "uniform01"
    NORMAL01 = "normal01"
    NORMAL = "normal"
    UNIFORM = "uniform"

class Problem(Enum):
    MATRIX_GAME = "matrix-game"
    DRO = "dro"
