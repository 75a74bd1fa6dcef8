"""Backend selection for the pair-sum kernel.

The compiled extension is used when it imports; otherwise the numpy version.
Setting ``MONDRIAN_KERNEL=python`` forces the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
pair_sums = _kernels_py.pair_sums

if os.environ.get("MONDRIAN_KERNEL", "").lower() != "python":
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        pair_sums = _compiled.pair_sums


def get_backend(name: str):
    """Return the pair-sum function of a named backend (``cython`` or ``python``)."""
    if name == "python":
        return _kernels_py.pair_sums
    if name == "cython":
        from . import _kernels
        return _kernels.pair_sums
    raise ValueError(f"unknown kernel backend {name!r}")
