"""Hot contraction kernels with a compiled backend and a NumPy fallback.

The compiled extension is used when it was built; set ``HCFLOW_KERNELS=python``
to force the fallback.  ``BACKEND`` reports which one is active.

The dense products ``pi_full``, ``act_full`` and ``norm2`` are matrix products
in disguise, and above ``DENSE_CUTOFF`` complex dimensions NumPy's BLAS calls
beat the compiled loops, so they are routed there (see
``benchmarks/bench_kernels.py``).  ``HCFLOW_KERNELS=cython`` disables the
routing.
"""
import os

import numpy as np

from . import _pykernels

_choice = os.environ.get("HCFLOW_KERNELS", "auto").lower()
_ext = None
if _choice != "python":
    try:
        from . import _ckernels as _ext
    except ImportError:
        if _choice == "cython":
            raise
        _ext = None

BACKEND = "cython" if _ext is not None else "python"
_impl = _ext if _ext is not None else _pykernels
DENSE_CUTOFF = 3 if _choice == "auto" else 1 << 30


def _c(x):
    return np.ascontiguousarray(x, dtype=np.complex128)


def _dense(C):
    return _impl if C.shape[0] <= 2 * DENSE_CUTOFF else _pykernels


def pi_full(E, C):
    return _dense(C).pi_full(_c(E), _c(C))


def act_full(F, Finv, C):
    return _dense(C).act_full(_c(F), _c(Finv), _c(C))


def theta_form(C, n):
    return _impl.theta_form(_c(C), n)


def ricci_form(C, n):
    return _impl.ricci_form(_c(C), n)


def norm2(C):
    return _dense(C).norm2(_c(C))


def backends():
    """Map of every importable backend name to its module."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        return out
    out["cython"] = _ckernels
    return out
