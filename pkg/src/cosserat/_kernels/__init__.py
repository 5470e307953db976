"""Hot-kernel backend selection.

The compiled Cython core is used when it was built; otherwise the
vectorized numpy implementation takes over with identical semantics.
Set ``COSSERAT_FORCE_NUMPY=1`` to skip the compiled core (useful for
benchmarking and for debugging kernel-level discrepancies).
"""

from __future__ import annotations

import os

from . import _numpy

_BACKEND_NAME = "numpy"
_impl = _numpy

if os.environ.get("COSSERAT_FORCE_NUMPY", "") != "1":
    try:
        from . import _core as _compiled

        _impl = _compiled
        _BACKEND_NAME = "compiled"
    except ImportError:
        pass


def backend_name() -> str:
    return _BACKEND_NAME


def numpy_backend():
    """The pure numpy implementation, regardless of selection."""
    return _numpy


def active_backend():
    return _impl


strain_batch = _impl.strain_batch
stretch_batch = _impl.stretch_batch
slices_batch = _impl.slices_batch
dislocation_from_slices = _impl.dislocation_from_slices
measures_batch = _impl.measures_batch
energy_density = _impl.energy_density
energy_derivs = _impl.energy_derivs
exp_so3_batch = _impl.exp_so3_batch
rotate_step_batch = _impl.rotate_step_batch
axl_skew_mat_batch = _impl.axl_skew_mat_batch
