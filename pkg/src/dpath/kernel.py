"""Select the compiled search kernel when available, else the Python twin."""

import os

from . import _pykernel

BACKEND = "python"
_impl = _pykernel
if os.environ.get("DPATH_PURE_PYTHON") != "1":
    try:
        from . import _kernel as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernel

FOUND = _pykernel.FOUND
NONE = _pykernel.NONE
BUDGET = _pykernel.BUDGET

pack_valid = _impl.pack_valid
link_pairs = _impl.link_pairs
