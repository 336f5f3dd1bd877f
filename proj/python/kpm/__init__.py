"""Point-mass analysis for positive definite kernels on discrete point sets.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from ._core import *  # noqa: F401,F403

__version__ = "0.1.0"
