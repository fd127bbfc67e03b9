"""Solver for Eulerian directed Laplacian systems via sparsified block elimination."""

try:
    from ._eulsolve import *  # noqa: F401,F403  (installed layout)
    from ._eulsolve import __doc__ as _doc
except ImportError:  # pragma: no cover - in-tree test layout
    from _eulsolve import *  # noqa: F401,F403
    from _eulsolve import __doc__ as _doc

__doc__ = _doc
__version__ = "0.1.0"
