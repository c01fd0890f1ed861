"""Wildfire-dynamics workbench: python surface over the C++ core."""

try:
    from embr._core import *  # noqa: F401,F403
    from embr._core import __doc__  # noqa: F401
except ImportError:  # build-tree layout: _core sits on PYTHONPATH
    from _core import *  # noqa: F401,F403
    from _core import __doc__  # noqa: F401
