"""Kernel backend selection.

The compiled core (``eqstop._core``) is preferred when it was built; the
NumPy implementation is the drop-in fallback. Setting ``EQSTOP_PURE=1``
in the environment forces the fallback, which the benchmark and the
backend-equivalence tests rely on.
"""

import os

from . import _kernels_py

if os.environ.get("EQSTOP_PURE"):
    _impl = _kernels_py
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.IMPLEMENTATION
first_entry_bounds = _impl.first_entry_bounds
constrained_sup_bounds = _impl.constrained_sup_bounds
hitting_mass = _impl.hitting_mass


def available_backends():
    """Names of importable kernel implementations."""
    out = ["numpy"]
    try:
        from . import _core  # noqa: F401

        out.insert(0, "cython")
    except ImportError:
        pass
    return out


def get_backend(name: str):
    """Fetch a specific implementation module by name."""
    if name == "numpy":
        return _kernels_py
    if name == "cython":
        from . import _core

        return _core
    raise ValueError(f"unknown backend {name!r}")
