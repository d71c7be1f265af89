"""Selection of the hot-loop backend (numba JIT vs plain numpy).

The default is the numba backend whenever numba imports; setting the
environment variable ``SUBDIFF_NUMBA=0`` (or ``off``/``false``/``no``)
forces the numpy fallback.  ``set_backend`` overrides the choice at
runtime, which the benchmark uses to time both paths in one process.
"""

from __future__ import annotations

import os

from .errors import InvalidArgumentError

ENV_FLAG = "SUBDIFF_NUMBA"

try:
    import numba  # noqa: F401

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


def _resolve_default() -> str:
    flag = os.environ.get(ENV_FLAG, "").strip().lower()
    if flag in ("0", "off", "false", "no"):
        return "numpy"
    if flag in ("1", "on", "true", "yes"):
        if not HAS_NUMBA:
            raise InvalidArgumentError(f"{ENV_FLAG}={flag} requested but numba is not installed")
        return "numba"
    return "numba" if HAS_NUMBA else "numpy"


_backend = _resolve_default()


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise InvalidArgumentError(f"unknown backend {name!r}, expected 'numba' or 'numpy'")
    if name == "numba" and not HAS_NUMBA:
        raise InvalidArgumentError("numba backend requested but numba is not installed")
    _backend = name


def kernels():
    """Return the kernel module for the active backend."""
    if _backend == "numba":
        from . import _kernels_numba

        return _kernels_numba
    from . import _kernels_numpy

    return _kernels_numpy
