"""Pinned three-determinant MCSCF with occupation-number diagnostics."""

try:
    from pinscf._core import *  # noqa: F401,F403  (installed layout)
except ImportError:
    from _core import *  # noqa: F401,F403  (in-tree build on PYTHONPATH)

__version__ = "0.1.0"
