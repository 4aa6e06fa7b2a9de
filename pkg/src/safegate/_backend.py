"""Kernel backend selection.

The hot image kernels ship in two flavors: numba-jitted loops and pure
numpy equivalents.  The environment variable SAFEGATE_BACKEND picks one:

* ``auto`` (default) - numba when it imports cleanly, numpy otherwise
* ``numba``          - require numba, fail loudly if missing
* ``numpy``          - force the pure numpy path

Both flavors produce byte-identical output; see tests/test_kernels.py.
"""

import os

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on host install
    HAVE_NUMBA = False

FLAG = "SAFEGATE_BACKEND"


def selected_backend() -> str:
    """Resolve the backend name from the environment."""
    choice = os.environ.get(FLAG, "auto").strip().lower()
    if choice in ("", "auto"):
        return "numba" if HAVE_NUMBA else "numpy"
    if choice == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError(f"{FLAG}=numba but numba is not importable")
        return "numba"
    if choice == "numpy":
        return "numpy"
    raise RuntimeError(f"unrecognized {FLAG}={choice!r} (use auto, numba or numpy)")
