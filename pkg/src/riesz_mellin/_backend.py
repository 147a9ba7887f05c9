"""Selects the compiled core when available, else the numpy twin.

Set RIESZ_MELLIN_PURE=1 to force the numpy implementation.
"""
import os

import numpy as np

from . import _core_py

try:
    from . import _core as _built
except ImportError:
    _built = None

HAVE_COMPILED = _built is not None
PURE = os.environ.get("RIESZ_MELLIN_PURE", "") in ("1", "true", "yes")
BACKEND = "compiled" if HAVE_COMPILED and not PURE else "numpy"


def _impl(name, backend):
    if backend is None:
        backend = BACKEND
    if backend == "compiled":
        if _built is None:
            raise ImportError("compiled core is not built")
        return getattr(_built, name)
    return getattr(_core_py, name)


def pair_blocks(A, B, K, L, iK, iL, adjacent, rs, rt, rw, kind, backend=None):
    f = _impl("pair_blocks", backend)
    as_f = lambda x: np.ascontiguousarray(x, dtype=float)
    as_i = lambda x: np.ascontiguousarray(x, dtype=np.int64)
    return f(as_f(A), as_f(B), as_i(K), as_i(L), as_i(iK), as_i(iL), bool(adjacent),
             as_f(rs), as_f(rt), as_f(rw), int(kind))


def exp_sum(t, g, xi, sign, backend=None):
    f = _impl("exp_sum", backend)
    return f(np.ascontiguousarray(t, dtype=float), np.ascontiguousarray(g, dtype=complex),
             np.ascontiguousarray(xi, dtype=float), float(sign))
