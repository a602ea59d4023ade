"""Shared constants for pamfbo.

Algorithm names, CLI exit codes, environment variables, and the numerical
constants shared by the surrogate, the acquisition maximizer and the loop.
"""

from enum import IntEnum, StrEnum


class Algorithm(StrEnum):
    """Optimization algorithms selectable from a run configuration.

    Attributes:
        EGO: Single-fidelity efficient global optimization on the top level
            with plain expected improvement.
        MFBO: Multifidelity optimization with the identity physics bias.
        PA_MFBO: Multifidelity optimization with the configured physics bias.
    """

    EGO = "EGO"
    MFBO = "MFBO"
    PA_MFBO = "PA-MFBO"


class ExitCode(IntEnum):
    SUCCESS = 0
    CONFIG_ERROR = 1
    RUNTIME_FAILURE = 2


class EnvVars(StrEnum):
    """Environment variables read by the CLI.

    Attributes:
        OUTPUT_ROOT: Directory that relative study ``output_dir`` values are
            resolved against (default: the current working directory).
    """

    OUTPUT_ROOT = "PAMFBO_OUTPUT_ROOT"


# Hyperparameter search box: log roughness, log process variance, scaling factor.
LOG_ROUGHNESS_BOUNDS = (-6.0, 6.0)
LOG_VARIANCE_BOUNDS = (-6.0, 6.0)
SCALING_BOUNDS = (-5.0, 5.0)

# Finite stand-in for -inf so simplex searches never compare infinities.
WORST_LOG_LIKELIHOOD = -1e10

JITTER_GROWTH = 10.0

# Posterior variances below this make the cross-level correlation degenerate (reported as 0).
DEGENERATE_VARIANCE = 1e-12

DISCREPANCY_FLOOR = 1e-9

# Relative slack when comparing consumed budget against the maximum.
BUDGET_TOLERANCE = 1e-12
