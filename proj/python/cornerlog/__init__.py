"""Single-log and double-log coordinates on moduli of stable marked disks.

Thin wrappers over the C++ library; results with a JSON form come back as
plain dicts and lists.
"""

import json
import math

from ._cornerlog import (
    DEFAULT_CUTOFF,
    ConvergenceError,
    DomainError,
    NoOverlapError,
    RangeError,
    angular_offset,
    from_double_log,
    from_single_log,
    rescale_corner,
    rescale_corner_double,
    rescale_double_log,
    rescale_single_log,
    run_cli,
    to_double_log,
    to_log,
    to_single_log,
    transition,
)
from . import _cornerlog

__all__ = [
    "DEFAULT_CUTOFF",
    "ConvergenceError",
    "DomainError",
    "NoOverlapError",
    "RangeError",
    "angular_offset",
    "chart_map",
    "classify",
    "from_double_log",
    "from_single_log",
    "rescale_corner",
    "rescale_corner_double",
    "rescale_double_log",
    "rescale_single_log",
    "run_cli",
    "to_double_log",
    "to_log",
    "to_single_log",
    "transition",
    "verify_decay",
]


def classify(map_name, lam=math.e, order=3, presentation="double-log"):
    """Smoothness report of a named map at its corner point."""
    return json.loads(_cornerlog._classify(map_name, complex(lam), order, presentation))


def chart_map(tree, r=(), sigma=(), v=None):
    """Normalized moduli coordinates of the plumbed configuration."""
    return json.loads(_cornerlog._chart_map(tree, list(r), [complex(x) for x in sigma], v))


def verify_decay(pair, max_n=1, families=(), halving=True):
    """Decay fits for the estimate suite of a chart pair."""
    return json.loads(_cornerlog._verify_decay(pair, max_n, list(families), halving))
