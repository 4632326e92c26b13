"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly, unless the environment
variable ``NCDEGREE_DISABLE_NUMBA`` is set to a non-empty value other than
``0``. Both backends stay importable as :data:`numpy_backend` and
:data:`numba_backend` (``None`` when numba is missing) so tests and the
benchmark can compare them directly.
"""

import os
import warnings

import numpy as np
from scipy.special import gammaln

from . import _numpy as numpy_backend

MAX_FOCK = 256

#: ln(n!) for n = 0..MAX_FOCK
LOG_FACTORIAL = gammaln(np.arange(MAX_FOCK + 1, dtype=float) + 1.0)

try:
    from . import _numba as numba_backend
except ImportError:  # pragma: no cover - depends on the environment
    numba_backend = None


def _numba_disabled():
    flag = os.environ.get("NCDEGREE_DISABLE_NUMBA", "")
    return flag not in ("", "0")


if numba_backend is not None and not _numba_disabled():
    backend = numba_backend
    BACKEND_NAME = "numba"
else:
    if numba_backend is None and not _numba_disabled():
        warnings.warn("numba is not available; using the numpy fallback kernels",
                      RuntimeWarning)
    backend = numpy_backend
    BACKEND_NAME = "numpy"

__all__ = ["backend", "BACKEND_NAME", "numpy_backend", "numba_backend",
           "LOG_FACTORIAL", "MAX_FOCK"]
