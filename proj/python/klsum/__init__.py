"""Kloosterman-sum spectra, finite-field transforms, prime sums, and
exact-rational exponent certification, backed by the C++ core."""

try:  # installed wheel layout: extension lives inside the package
    from ._klsum import *  # noqa: F401,F403
    from . import _klsum as _impl
except ImportError:  # build-tree layout: extension on PYTHONPATH
    from _klsum import *  # noqa: F401,F403
    import _klsum as _impl

__version__ = _impl.version()
__all__ = [name for name in dir(_impl) if not name.startswith("_")]
