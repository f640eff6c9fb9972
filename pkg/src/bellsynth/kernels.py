"""Backend selection for the hot kernels.

The compiled extension is used when it was built; otherwise the numpy
fallback. Set ``BELLSYNTH_KERNELS=python`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("BELLSYNTH_KERNELS", "").lower() != "python":
    try:
        from . import _kernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py

interference_sums = _impl.interference_sums
coincidence_pairs = _impl.coincidence_pairs


def backends():
    """Mapping of every importable backend name to its module."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels

        found["cython"] = _kernels
    except ImportError:
        pass
    return found
