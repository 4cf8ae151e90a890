"""Online, bandit, and differentially private optimization of piecewise-Lipschitz utilities."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__doc__ = _core_doc
__version__ = "0.1.0"
