"""Configuration settings for the rigid model domain toolkit.

Stores constants used throughout the application: the variable alphabet of the
polynomial ring, the formal real parameters adjoined to it, the term cap that
bounds runaway substitutions, search limits for the symmetry detectors, CLI exit
codes and logging settings.
"""

import logging
import os

logger = logging.getLogger(__name__)

# Holomorphic variables and their conjugates, in ring order.
VARIABLE_NAMES = ("z1", "cz1", "z2", "cz2")
# Formal real parameters (self-conjugate indeterminates).
PARAMETER_NAMES = ("s", "t", "n")
IMAGINARY_UNIT_NAME = "i"

MAX_TERMS_ENV_VAR = "MODELKIT_MAX_TERMS"
DEFAULT_MAX_TERMS = 100000

# Largest N searched when the classifier enumerates Z_N rotations.
ZN_MAX_ORDER = 6

# Degree bound of the tangent-field search; None means "degree of P".
DEFAULT_TANGENT_DEGREE: int | None = None

# Gaussian-rational grid (real, imaginary) probed by the complex-line test.
LINE_TEST_CANDIDATES = [
    (0, 0),
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
    (2, 0),
    (-2, 0),
]

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_PARSE_ERROR = 2
EXIT_DEGENERATE = 3
EXIT_INTERNAL_ERROR = 4

LOG_FORMAT = "%(asctime)s [%(levelname)s] [%(name)s] %(message)s"
LOG_FILE_ENV_VAR = "MODELKIT_LOG_FILE"

REPORT_FIELD_NAMES = [
    "finite_type_necessary",
    "torus",
    "translations",
    "zn_rotations",
    "thm3_case",
    "thm2_case",
    "notes",
]


def max_terms() -> int:
    """Term cap for products and substitutions.

    Read from the environment on every call so that a caller can tighten the
    cap for a single run.

    Returns:
        The value of MODELKIT_MAX_TERMS, or DEFAULT_MAX_TERMS when the variable
        is unset or unusable.
    """
    raw = os.environ.get(MAX_TERMS_ENV_VAR)
    if raw is None:
        return DEFAULT_MAX_TERMS
    try:
        value = int(raw)
    except ValueError:
        logger.warning("Ignoring non-integer %s=%r, using %d", MAX_TERMS_ENV_VAR, raw, DEFAULT_MAX_TERMS)
        return DEFAULT_MAX_TERMS
    if value <= 0:
        logger.warning("Ignoring non-positive %s=%d, using %d", MAX_TERMS_ENV_VAR, value, DEFAULT_MAX_TERMS)
        return DEFAULT_MAX_TERMS
    return value
