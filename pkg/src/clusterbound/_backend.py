"""Backend selection for the numeric kernels.

Set ``CLUSTERBOUND_BACKEND=numpy`` to force the vectorized numpy path.
The default is ``numba`` when it imports, with a silent fallback otherwise.
"""
import os

BACKENDS = ("numba", "numpy")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    numba = None
    HAVE_NUMBA = False


def _resolve_default():
    requested = os.environ.get("CLUSTERBOUND_BACKEND", "").strip().lower() or "numba"
    if requested not in BACKENDS:
        raise ValueError(
            f"CLUSTERBOUND_BACKEND must be one of {BACKENDS}, got {requested!r}"
        )
    if requested == "numba" and not HAVE_NUMBA:
        return "numpy"
    return requested


DEFAULT_BACKEND = _resolve_default()


def resolve(backend=None):
    """Return a concrete backend name, honouring the environment default."""
    if backend is None:
        return DEFAULT_BACKEND
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    return backend


def njit(fn):
    """``numba.njit(cache=True, nogil=True)`` when available, identity otherwise."""
    if HAVE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn
