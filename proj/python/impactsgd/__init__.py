"""Optimal execution with permanent price impact.

Thin wrapper over the C++ core: market simulation, the closed-form
feedback policy, projected SGD variants and the common-path benchmark.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
