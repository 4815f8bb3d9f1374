"""Bayesian hierarchical FFQ/DLW regression engine (C++ core bindings)."""

try:
    from ._hiermc import *  # noqa: F401,F403
    from ._hiermc import __doc__ as _core_doc
except ImportError:  # in-build tree: the module sits next to the package
    from _hiermc import *  # noqa: F401,F403
    from _hiermc import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
__doc__ = _core_doc or __doc__
__version__ = "0.1.0"
