"""Built-in algebras with complex structure."""
from __future__ import annotations

import re

import numpy as np

from .algebra import BracketTensor, LieAlgebraSpec, from_real_basis
from .errors import SchemaError

NAMES = ("example6", "example6_uv(u,v)", "complex_heisenberg", "abelian(n)", "kodaira_thurston")


def _blocks(n):
    return np.zeros((2 * n, n, n), complex), np.zeros((2 * n, n, n), complex)


def example6_uv(u: complex, v: complex) -> BracketTensor:
    """Family on C^3 with ``mu(W1, W2bar) = u W3bar`` and ``mu(W1, W1bar) = v W3 - conj(v) W3bar``."""
    hh, ha = _blocks(3)
    ha[5, 0, 1] = u
    ha[2, 1, 0] = -np.conj(u)  # mu(W1bar, W2) = conj(u) W3
    ha[2, 0, 0] = v
    ha[5, 0, 0] = -np.conj(v)
    return BracketTensor(hh, ha)


def example6() -> BracketTensor:
    """6-dimensional 2-step algebra with an abelian complex structure."""
    return example6_uv(-np.sqrt(2.0), 0.0)


def example6_real():
    """Real structure constants ``c[k, i, j]`` and ``J`` of :func:`example6`.

    ``[e1,e3] = -e5, [e2,e4] = e5, [e1,e4] = -e6, [e2,e3] = -e6`` with
    ``J e1 = -e2, J e3 = e4, J e5 = e6``.
    """
    c = np.zeros((6, 6, 6))
    for k, i, j, val in [(4, 0, 2, -1), (4, 1, 3, 1), (5, 0, 3, -1), (5, 1, 2, -1)]:
        c[k, i, j] = val
        c[k, j, i] = -val
    J = np.zeros((6, 6))
    for a, b, s in [(0, 1, -1), (2, 3, 1), (4, 5, 1)]:
        J[b, a] = s
        J[a, b] = -s
    return c, J


def complex_heisenberg() -> BracketTensor:
    hh, ha = _blocks(3)
    hh[2, 0, 1], hh[2, 1, 0] = 1.0, -1.0
    return BracketTensor(hh, ha)


def abelian(n: int) -> BracketTensor:
    return BracketTensor.zero(n)


def kodaira_thurston_real():
    """Heisenberg algebra times a line: ``[e1, e2] = e3`` with ``J e1 = e2, J e3 = e4``."""
    c = np.zeros((4, 4, 4))
    c[2, 0, 1], c[2, 1, 0] = 1.0, -1.0
    J = np.zeros((4, 4))
    J[1, 0], J[0, 1] = 1.0, -1.0
    J[3, 2], J[2, 3] = 1.0, -1.0
    return c, J


def kodaira_thurston() -> BracketTensor:
    return from_real_basis(*kodaira_thurston_real())


_NUM = r"\s*([^,()]+?)\s*"


def _complex(s: str) -> complex:
    try:
        return complex(s.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise SchemaError(f"not a number: {s!r}") from exc


def is_catalog_name(name: str) -> bool:
    return bool(
        name in ("example6", "complex_heisenberg", "kodaira_thurston")
        or re.fullmatch(rf"abelian\({_NUM}\)", name)
        or re.fullmatch(rf"example6_uv\({_NUM},{_NUM}\)", name)
    )


def catalog(name: str) -> LieAlgebraSpec:
    """Return a validated built-in spec by name, e.g. ``abelian(3)`` or ``example6_uv(1, 2j)``."""
    name = name.strip()
    if name == "example6":
        mu = example6()
    elif name == "complex_heisenberg":
        mu = complex_heisenberg()
    elif name == "kodaira_thurston":
        mu = kodaira_thurston()
    elif m := re.fullmatch(rf"abelian\({_NUM}\)", name):
        try:
            n = int(m.group(1))
        except ValueError as exc:
            raise SchemaError(f"bad dimension in {name!r}") from exc
        if n < 1:
            raise SchemaError("abelian(n) needs n >= 1")
        mu = abelian(n)
    elif m := re.fullmatch(rf"example6_uv\({_NUM},{_NUM}\)", name):
        mu = example6_uv(_complex(m.group(1)), _complex(m.group(2)))
    else:
        raise SchemaError(f"unknown catalog entry {name!r}; known: {', '.join(NAMES)}")
    return LieAlgebraSpec.build(name, mu)
