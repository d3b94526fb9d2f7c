"""Consistent joint decisions over heterogeneous model outputs.

Calibrated scoring of per-group probabilities, exact 0/1 ILP inference
under declarative constraints, sequential decoding baselines, and
consistency metrics. Everything is implemented in the C++ core and
re-exported here.
"""

from ._consilp import *  # noqa: F401,F403
from ._consilp import __doc__ as _core_doc  # noqa: F401
