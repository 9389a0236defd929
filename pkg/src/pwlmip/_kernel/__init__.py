"""Simplex pivot kernel selection.

Two interchangeable implementations of the phase-1 pivot loop exist: a
compiled Cython extension and a pure-Python twin.  They execute identical
pivot sequences (Bland's rule over exact rationals), so results cannot differ;
only speed does.  The compiled kernel is preferred when importable, the
environment variable ``PWLMIP_PURE_PYTHON=1`` forces the fallback, and
:func:`use` switches explicitly (the benchmark does this).
"""

import os

from . import pure

_KERNELS = {"python": pure.phase1}
try:  # pragma: no cover - exercised only when the extension is built
    from . import _speedups

    _KERNELS["compiled"] = _speedups.phase1
except ImportError:  # pragma: no cover
    _speedups = None

if os.environ.get("PWLMIP_PURE_PYTHON") == "1" or "compiled" not in _KERNELS:
    _active = "python"
else:
    _active = "compiled"


def available_kernels():
    return sorted(_KERNELS)


def active_kernel_name():
    return _active


def use(name):
    """Select the pivot kernel by name ('python' or 'compiled')."""
    global _active
    if name not in _KERNELS:
        raise ValueError(
            "unknown kernel %r (available: %s)" % (name, ", ".join(sorted(_KERNELS)))
        )
    _active = name


def phase1(tableau, basis, nrows, ncols):
    """Run the active kernel; returns the pivot count."""
    return _KERNELS[_active](tableau, basis, nrows, ncols)
