"""Numerical tolerances shared across the package.

Every default can be overridden from the environment with a variable named
``HCFLOW_TOL_<FIELD>`` (upper case), e.g. ``HCFLOW_TOL_JACOBI=1e-10``.
"""
from __future__ import annotations

import dataclasses
import os


@dataclasses.dataclass(frozen=True)
class Tolerances:
    jacobi: float = 1e-12          # relative to the largest structure constant
    nijenhuis: float = 1e-12
    reality: float = 1e-9          # absolute, on input documents
    null_space: float = 1e-9       # singular-value cutoff relative to the largest one
    max_condition: float = 1e12
    metric_degenerate: float = 1e-12
    soliton: float = 1e-8
    derivation: float = 1e-8
    balanced: float = 1e-10
    rtol: float = 1e-8
    atol: float = 1e-10
    convergence: float = 1e-9

    @classmethod
    def from_env(cls, environ=None) -> "Tolerances":
        environ = os.environ if environ is None else environ
        kwargs = {}
        for field in dataclasses.fields(cls):
            key = f"HCFLOW_TOL_{field.name.upper()}"
            if key in environ:
                kwargs[field.name] = float(environ[key])
        return cls(**kwargs)


DEFAULT = Tolerances.from_env()
