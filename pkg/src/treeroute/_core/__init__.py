"""Backend selection for the hot kernels.

The same kernel source ships twice: as the importable pure-Python module
``treeroute._core.kernels`` and, when the build succeeded, as the C extension
``treeroute._core._compiled``.  The active backend is picked here at import
time; set TREEROUTE_BACKEND=pure|compiled|auto (default auto) to override.
"""

import os

from . import kernels as _pure

_choice = os.environ.get("TREEROUTE_BACKEND", "auto")
if _choice not in ("auto", "compiled", "pure"):
    raise ImportError(
        f"TREEROUTE_BACKEND must be auto, compiled or pure, got {_choice!r}")

if _choice == "pure":
    kernels = _pure
    BACKEND = "pure"
else:
    try:
        from . import _compiled as kernels  # type: ignore[no-redef]
        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise ImportError(
                "TREEROUTE_BACKEND=compiled but the compiled kernels are not "
                "installed; rebuild the package with Cython and a C compiler")
        kernels = _pure
        BACKEND = "pure"


def get_backend(name):
    """Return the kernel module for an explicit backend name.

    Used by the benchmark to time both implementations side by side
    regardless of which one is active.
    """
    if name == "pure":
        return _pure
    if name == "compiled":
        from . import _compiled
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def available_backends():
    out = ["pure"]
    try:
        from . import _compiled  # noqa: F401
        out.append("compiled")
    except ImportError:
        pass
    return out
