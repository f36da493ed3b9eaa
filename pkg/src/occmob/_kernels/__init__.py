"""Numeric kernels with a compiled fast path and a pure-Python fallback.

Two hot loops live here: the simplex pivot iteration used by the LP solver
(called ~1000x per bootstrap) and the per-agent transition tally used by the
simulator. The compiled variant is built from _ckernels.pyx with fused
multiply-add disabled, so both backends produce bit-identical results; the
pure backend keeps the package fully functional when no compiler is around.

Set OCCMOB_PURE_PYTHON=1 to skip the compiled extension at import time, or
call set_backend() to switch at runtime (used by the parity tests and the
benchmark script).
"""

from __future__ import annotations

import os

from . import _pykernels

_BACKENDS = {"python": _pykernels}

try:
    from . import _ckernels

    _BACKENDS["c"] = _ckernels
except ImportError:
    _ckernels = None

if os.environ.get("OCCMOB_PURE_PYTHON", "") not in ("", "0"):
    _active = _BACKENDS["python"]
else:
    _active = _BACKENDS.get("c", _pykernels)


def backend() -> str:
    """Name of the backend currently answering kernel calls."""
    return _active.BACKEND_NAME


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def set_backend(name: str) -> None:
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    _active = _BACKENDS[name]


def simplex_iterate(tableau, basis, n_cols, tol, max_iter):
    """Run simplex pivots in place; see _pykernels for the full contract."""
    return _active.simplex_iterate(tableau, basis, n_cols, tol, max_iter)


def tally_transitions(u, fathers, lo, span, cut_mid, cut_up):
    """Tally father->child class transitions; see _pykernels for details."""
    return _active.tally_transitions(u, fathers, lo, span, cut_mid, cut_up)
