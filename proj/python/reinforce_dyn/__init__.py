"""Interacting reinforced walks on complete graphs.

Thin re-export of the compiled extension: model/kernel operations, the
mean-field flow, equilibrium solving and classification, and the stochastic
simulator with its stochastic-approximation audit.
"""

try:
    from ._core import *  # noqa: F401,F403  (wheel layout)
    from . import _core as _impl
except ImportError:  # in-tree build: extension sits on sys.path by itself
    from _core import *  # noqa: F401,F403
    import _core as _impl

__all__ = [name for name in dir(_impl) if not name.startswith("_")]
__version__ = "1.0.0"
