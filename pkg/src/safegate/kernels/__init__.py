"""Hot kernels with selectable backend.

Importing this package binds the active implementations according to
SAFEGATE_BACKEND (see safegate._backend).  Both backend modules stay
importable side by side for equivalence tests and benchmarks via
``get_backend``.
"""

from .._backend import selected_backend
from . import numpy_backend

BACKEND = selected_backend()

if BACKEND == "numba":
    from . import numba_backend as _active
else:
    _active = numpy_backend

lbp_codes = _active.lbp_codes
dilate3 = _active.dilate3
erode3 = _active.erode3
label_components = _active.label_components
gaussian_blur_sep = _active.gaussian_blur_sep
clahe_apply = _active.clahe_apply


def get_backend(name):
    """Return a backend module by name ("numba" or "numpy")."""
    if name == "numpy":
        return numpy_backend
    if name == "numba":
        from . import numba_backend

        return numba_backend
    raise ValueError(f"unknown backend {name!r}")


__all__ = [
    "BACKEND",
    "lbp_codes",
    "dilate3",
    "erode3",
    "label_components",
    "gaussian_blur_sep",
    "clahe_apply",
    "get_backend",
]
