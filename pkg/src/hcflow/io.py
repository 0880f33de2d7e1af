"""Algebra documents (JSON Lines) and report serialization.

The first line of a document is a header record::

    {"format": "hcflow-algebra", "version": 1, "name": "...",
     "complex_dimension": 3, "frame": "complex",
     "metric": {"re": [[...]], "im": [[...]]}, "psi": {"re": 1, "im": 0}}

Every further non-blank line is one structure constant.  In the complex frame
``{"i": 1, "j": 2, "k": 3, "re": ..., "im": ..., "kind": "hol-antihol-antihol"}``
is the ``Zbar_3`` coefficient of ``mu(Z_1, Zbar_2)``; the kind names the types
of the two arguments and of the output.  Components implied by antisymmetry
and conjugation may be omitted; if present they must agree to ``1e-9``.

In the real frame the header also carries ``"J"`` (``J[a][b]`` is the
``e_a`` coordinate of ``J e_b``, 1-based records below), an optional real
``"metric"``, and records ``{"i", "j", "k", "value"}`` meaning ``[e_i, e_j]``
has coefficient ``value`` on ``e_k``.
"""
from __future__ import annotations

import json
import math
from typing import Optional

import numpy as np

from .algebra import BracketTensor, HermitianForm, LieAlgebraSpec, conj_perm, from_real_basis
from .config import DEFAULT, Tolerances
from .errors import DimensionError, RealityError, SchemaError

FORMAT = "hcflow-algebra"
KINDS = ("hol-hol-hol", "hol-hol-antihol", "hol-antihol-hol", "hol-antihol-antihol")


# ---------------------------------------------------------------------------
# serialization with 17 significant digits


def dumps(obj) -> str:
    """Compact JSON in which every float is written with 17 significant digits."""
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return dumps({"re": obj.real.tolist(), "im": obj.imag.tolist()})
        return dumps(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        s = "%.17g" % x
        return s if any(ch in s for ch in ".en") else s + ".0"
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps({"re": obj.real, "im": obj.imag})
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def fmt(x: float) -> str:
    return "%.17g" % float(x)


# ---------------------------------------------------------------------------
# parsing


def _number(rec, key, line):
    v = rec.get(key, 0.0)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"line {line}: field {key!r} must be a number")
    if not math.isfinite(v):
        raise SchemaError(f"line {line}: field {key!r} is not finite")
    return float(v)


def _index(rec, key, line, top):
    v = rec.get(key)
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(f"line {line}: field {key!r} must be an integer")
    if not 1 <= v <= top:
        raise SchemaError(f"line {line}: index {key}={v} out of range 1..{top}")
    return v - 1


def _matrix(obj, n, what, line=1, real=False):
    try:
        if isinstance(obj, dict):
            re_ = np.asarray(obj.get("re"), dtype=float)
            im_ = np.asarray(obj.get("im", np.zeros_like(re_)), dtype=float)
            M = re_ + 1j * im_
        else:
            M = np.asarray(obj, dtype=float if real else complex)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"line {line}: {what} is not a numeric matrix") from exc
    if M.shape != (n, n):
        raise SchemaError(f"line {line}: {what} must be {n}x{n}, got {M.shape}")
    if not np.all(np.isfinite(M)):
        raise SchemaError(f"line {line}: {what} has non-finite entries")
    return M


class _Filler:
    """Accumulates components together with the partners they imply."""

    def __init__(self, m, tol):
        self.C = np.zeros((m, m, m), complex)
        self.seen = np.zeros((m, m, m), bool)
        self.tol = tol

    def put(self, c, a, b, val, line):
        if a == b and abs(val) > 0:
            raise RealityError(f"line {line}: bracket of a vector with itself must vanish")
        for (cc, aa, bb), v in self._partners(c, a, b, val):
            if self.seen[cc, aa, bb]:
                if abs(self.C[cc, aa, bb] - v) > self.tol * max(1.0, abs(v)):
                    raise RealityError(
                        f"line {line}: component conflicts with a value implied by "
                        f"antisymmetry/conjugation (difference {abs(self.C[cc, aa, bb] - v):.3g})"
                    )
            else:
                self.C[cc, aa, bb] = v
                self.seen[cc, aa, bb] = True

    def _partners(self, c, a, b, val):
        s = conj_perm(self.C.shape[0] // 2)
        out = [((c, a, b), val), ((c, b, a), -val)]
        out += [((s[c], s[a], s[b]), np.conj(val)), ((s[c], s[b], s[a]), -np.conj(val))]
        return out


def _records(text):
    for no, raw in enumerate(text.splitlines(), start=1):
        if raw.strip():
            try:
                rec = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"line {no}: invalid JSON ({exc.msg})") from exc
            if not isinstance(rec, dict):
                raise SchemaError(f"line {no}: record must be a JSON object")
            yield no, rec


def parse_document(text: str, tol: Tolerances = DEFAULT):
    """Return ``(name, bracket, metric, psi)`` without validating the bracket."""
    recs = list(_records(text))
    if not recs:
        raise SchemaError("empty document")
    line, head = recs[0]
    if head.get("format") != FORMAT:
        raise SchemaError(f"line {line}: header must have format {FORMAT!r}")
    n = head.get("complex_dimension")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise SchemaError(f"line {line}: complex_dimension must be a positive integer")
    name = str(head.get("name", "unnamed"))
    frame = head.get("frame", "complex")
    psi = head.get("psi", 1.0)
    if isinstance(psi, dict):
        psi = complex(_number(psi, "re", line), _number(psi, "im", line))
    elif isinstance(psi, (int, float)) and not isinstance(psi, bool):
        psi = complex(psi)
    else:
        raise SchemaError(f"line {line}: psi must be a number or {{re, im}}")
    m = 2 * n
    if frame == "complex":
        fill = _Filler(m, tol.reality)
        for no, rec in recs[1:]:
            kind = rec.get("kind")
            if kind not in KINDS:
                raise SchemaError(f"line {no}: kind must be one of {', '.join(KINDS)}")
            i, j, k = (_index(rec, key, no, n) for key in "ijk")
            val = complex(_number(rec, "re", no), _number(rec, "im", no))
            _, second, out = kind.split("-")
            b = j if second == "hol" else n + j
            c = k if out == "hol" else n + k
            fill.put(c, i, b, val, no)
        mu = BracketTensor.from_full(fill.C)
        metric = head.get("metric")
        if metric is None:
            g = HermitianForm.identity(n)
        else:
            M = _matrix(metric, n, "metric", line)
            if np.max(np.abs(M - M.conj().T)) > tol.reality * max(1.0, np.max(np.abs(M))):
                raise SchemaError(f"line {line}: metric is not Hermitian")
            g = HermitianForm(M)
            if not g.is_positive_definite():
                raise SchemaError(f"line {line}: metric is not positive definite")
    elif frame == "real":
        if "J" not in head:
            raise SchemaError(f"line {line}: real frame needs a J matrix")
        J = _matrix(head["J"], m, "J", line, real=True).real
        G = None
        if head.get("metric") is not None:
            G = _matrix(head["metric"], m, "metric", line, real=True).real
        c = np.zeros((m, m, m))
        seen = np.zeros((m, m, m), bool)
        for no, rec in recs[1:]:
            i, j, k = (_index(rec, key, no, m) for key in "ijk")
            val = _number(rec, "value", no)
            for (kk, ii, jj), v in (((k, i, j), val), ((k, j, i), -val)):
                if seen[kk, ii, jj] and abs(c[kk, ii, jj] - v) > tol.reality * max(1.0, abs(v)):
                    raise RealityError(f"line {no}: component conflicts with antisymmetry")
                c[kk, ii, jj] = v
                seen[kk, ii, jj] = True
            if i == j and val != 0:
                raise RealityError(f"line {no}: bracket of a vector with itself must vanish")
        try:
            mu = from_real_basis(c, J, G)
        except DimensionError as exc:
            raise SchemaError(str(exc)) from exc
        g = HermitianForm.identity(n)
    else:
        raise SchemaError(f"line {line}: frame must be 'complex' or 'real'")
    return name, mu, g, psi


def load_spec(document: str, tol: Tolerances = DEFAULT) -> LieAlgebraSpec:
    """Parse, symmetrize and validate an algebra document."""
    name, mu, g, psi = parse_document(document, tol)
    return LieAlgebraSpec.build(name, mu, g, psi, tol)


def export_spec(spec: LieAlgebraSpec, atol: float = 0.0) -> str:
    """Complex-frame document listing every independent nonzero component."""
    n = spec.n
    head = {
        "format": FORMAT,
        "version": 1,
        "name": spec.name,
        "complex_dimension": n,
        "frame": "complex",
    }
    if np.max(np.abs(spec.metric.matrix - np.eye(n))) > 0:
        head["metric"] = spec.metric.matrix
    if spec.psi != 1:
        head["psi"] = complex(spec.psi)
    lines = [dumps(head)]
    mu = spec.bracket
    for c in range(2 * n):
        kind = "hol-hol-hol" if c < n else "hol-hol-antihol"
        for i in range(n):
            for j in range(i + 1, n):
                v = mu.hol_hol[c, i, j]
                if abs(v) > atol:
                    lines.append(_rec(i, j, c % n, v, kind))
    for c in range(2 * n):
        kind = "hol-antihol-hol" if c < n else "hol-antihol-antihol"
        for i in range(n):
            for j in range(n):
                v = mu.hol_antihol[c, i, j]
                if abs(v) > atol:
                    lines.append(_rec(i, j, c % n, v, kind))
    return "\n".join(lines) + "\n"


def _rec(i, j, k, v, kind):
    return dumps({"i": i + 1, "j": j + 1, "k": k + 1, "re": float(v.real), "im": float(v.imag), "kind": kind})


def export_real(consts, J, name: str = "unnamed", metric=None) -> str:
    """Real-frame document from ``consts[k, i, j]`` and ``J``."""
    m = J.shape[0]
    head = {"format": FORMAT, "version": 1, "name": name, "complex_dimension": m // 2,
            "frame": "real", "J": np.asarray(J, float)}
    if metric is not None:
        head["metric"] = np.asarray(metric, float)
    lines = [dumps(head)]
    for k in range(m):
        for i in range(m):
            for j in range(i + 1, m):
                if consts[k, i, j] != 0:
                    lines.append(dumps({"i": i + 1, "j": j + 1, "k": k + 1, "value": float(consts[k, i, j])}))
    return "\n".join(lines) + "\n"


def parse_metric(text: str, n: int) -> HermitianForm:
    """``diag(a, b, ...)``, an inline JSON matrix, or ``{"re": ..., "im": ...}``."""
    t = text.strip()
    if t.startswith("diag(") and t.endswith(")"):
        try:
            vals = [float(x) for x in t[5:-1].split(",")]
        except ValueError as exc:
            raise SchemaError(f"bad diagonal metric {text!r}") from exc
        if len(vals) != n:
            raise SchemaError(f"metric needs {n} diagonal entries")
        M = np.diag(vals).astype(complex)
    else:
        try:
            obj = json.loads(t)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"metric is neither diag(...) nor JSON: {text!r}") from exc
        M = _matrix(obj, n, "metric")
    if np.max(np.abs(M - M.conj().T)) > 1e-9 * max(1.0, np.max(np.abs(M))):
        raise SchemaError("metric is not Hermitian")
    g = HermitianForm(M)
    if not g.is_positive_definite():
        raise SchemaError("metric is not positive definite")
    return g
