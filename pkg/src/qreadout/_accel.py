"""Numba availability switch.

The hot kernels in :mod:`qreadout.kernels` come in two flavours: numba
``@njit`` loops and vectorized pure-numpy fallbacks.  Which flavour runs is
decided once, at import time:

* if numba is importable, the compiled kernels are used;
* setting the environment variable ``QREADOUT_NO_NUMBA`` to ``1`` (or
  ``true``/``yes``/``on``) before import forces the numpy fallbacks.

Both paths produce identical results (``tests/test_kernels.py`` pins that);
the fallback simply trades speed for a dependency-free install.
"""

import os

ENV_FLAG = "QREADOUT_NO_NUMBA"


def _disabled_by_env() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in ("1", "true", "yes", "on")


HAS_NUMBA = False
if not _disabled_by_env():
    try:
        import numba  # noqa: F401

        HAS_NUMBA = True
    except ImportError:
        HAS_NUMBA = False
