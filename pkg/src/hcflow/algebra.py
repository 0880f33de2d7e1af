"""Brackets, Hermitian forms and J-commuting endomorphisms in a complex frame.

Conventions
-----------
A Lie algebra ``g`` of real dimension ``2n`` with complex structure ``J`` is
described in a (1,0)-frame ``Z_1..Z_n`` that is unitary for the reference
inner product.  The complexified basis is ``e = (Z_1..Z_n, Zbar_1..Zbar_n)``
and a bracket is stored through its full tensor ``C`` with

    mu(e_a, e_b) = sum_c C[c, a, b] e_c .

Hermitian forms store ``H[j, k] = h(Z_j, Zbar_k)``.  Endomorphisms commuting
with ``J`` store the block ``B[l, j]`` with ``E Z_j = sum_l B[l, j] Z_l``; the
action on ``Zbar`` is the conjugate block.  With respect to the unitary frame
the endomorphism of a form is therefore ``B = H.T``.
"""
from __future__ import annotations

import dataclasses
from functools import cached_property
from typing import Optional

import numpy as np

from . import kernels
from .config import DEFAULT, Tolerances
from .errors import AlgebraError, DimensionError, NumericalError


def conj_perm(n: int) -> np.ndarray:
    """Index permutation sending ``e_a`` to its complex conjugate."""
    return np.r_[np.arange(n, 2 * n), np.arange(n)]


def project_full(C: np.ndarray) -> np.ndarray:
    """Nearest tensor with antisymmetry and the reality symmetry."""
    n = C.shape[0] // 2
    s = conj_perm(n)
    C = 0.5 * (C - C.transpose(0, 2, 1))
    return 0.5 * (C + np.conj(C[s][:, s][:, :, s]))


def symmetry_defect(C: np.ndarray) -> float:
    return float(np.max(np.abs(C - project_full(C)), initial=0.0))


def _readonly(a):
    a = np.array(a, dtype=np.complex128)
    a.flags.writeable = False
    return a


class BracketTensor:
    """Antisymmetric real bracket on ``g``, stored by its independent blocks.

    ``hol_hol[c, i, j]`` is the ``e_c`` coefficient of ``mu(Z_i, Z_j)`` and
    ``hol_antihol[c, i, j]`` that of ``mu(Z_i, Zbar_j)``.  Every other
    component follows from antisymmetry and conjugation.  The blocks are
    projected onto those symmetries on construction, so both orderings of a
    pair must be supplied: giving only ``mu(Z_1, Z_2)`` halves it.
    """

    def __init__(self, hol_hol, hol_antihol):
        hol_hol = np.asarray(hol_hol, dtype=np.complex128)
        hol_antihol = np.asarray(hol_antihol, dtype=np.complex128)
        n = hol_hol.shape[1]
        if hol_hol.shape != (2 * n, n, n) or hol_antihol.shape != (2 * n, n, n):
            raise DimensionError(f"bad block shapes {hol_hol.shape}, {hol_antihol.shape}")
        hh = 0.5 * (hol_hol - hol_hol.transpose(0, 2, 1))
        # mu(Z_i, Zbar_j) on Zbar_k equals -conj(mu(Z_j, Zbar_i) on Z_k)
        low = 0.5 * (hol_antihol[:n] - np.conj(hol_antihol[n:]).transpose(0, 2, 1))
        ha = np.concatenate([low, -np.conj(low).transpose(0, 2, 1)])
        self.n = n
        self.hol_hol = _readonly(hh)
        self.hol_antihol = _readonly(ha)

    @classmethod
    def zero(cls, n: int) -> "BracketTensor":
        z = np.zeros((2 * n, n, n))
        return cls(z, z)

    @classmethod
    def from_full(cls, C) -> "BracketTensor":
        C = project_full(np.asarray(C, dtype=np.complex128))
        n = C.shape[0] // 2
        return cls(C[:, :n, :n], C[:, :n, n:])

    @cached_property
    def full(self) -> np.ndarray:
        n = self.n
        s = conj_perm(n)
        C = np.empty((2 * n,) * 3, dtype=np.complex128)
        C[:, :n, :n] = self.hol_hol
        C[:, :n, n:] = self.hol_antihol
        C[:, n:, :n] = -self.hol_antihol.transpose(0, 2, 1)
        C[:, n:, n:] = np.conj(self.hol_hol[s])
        C.flags.writeable = False
        return C

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.full), initial=0.0))

    def is_zero(self, atol: float = 0.0) -> bool:
        return self.scale <= atol

    def __add__(self, other):
        return BracketTensor(self.hol_hol + other.hol_hol, self.hol_antihol + other.hol_antihol)

    def __sub__(self, other):
        return BracketTensor(self.hol_hol - other.hol_hol, self.hol_antihol - other.hol_antihol)

    def __mul__(self, lam):
        lam = float(lam)
        return BracketTensor(lam * self.hol_hol, lam * self.hol_antihol)

    __rmul__ = __mul__

    def __truediv__(self, lam):
        return self * (1.0 / float(lam))

    def __repr__(self):
        return f"BracketTensor(n={self.n}, scale={self.scale:.3g})"


@dataclasses.dataclass(frozen=True, eq=False)
class HermitianForm:
    """Hermitian form ``H[j, k] = h(Z_j, Zbar_k)``."""

    matrix: np.ndarray

    def __post_init__(self):
        H = np.asarray(self.matrix, dtype=np.complex128)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise DimensionError(f"Hermitian form must be square, got {H.shape}")
        object.__setattr__(self, "matrix", _readonly(0.5 * (H + H.conj().T)))

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n))

    @classmethod
    def diag(cls, *values):
        return cls(np.diag(np.asarray(values, dtype=float)))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    def is_positive_definite(self) -> bool:
        return self.min_eigenvalue > 0.0

    def to_endo(self) -> "EndoJ":
        """Endomorphism obtained by raising an index with the unitary-frame metric."""
        return EndoJ(self.matrix.T)

    def __add__(self, other):
        return HermitianForm(self.matrix + other.matrix)

    def __sub__(self, other):
        return HermitianForm(self.matrix - other.matrix)

    def __mul__(self, lam):
        return HermitianForm(float(lam) * self.matrix)

    __rmul__ = __mul__


@dataclasses.dataclass(frozen=True, eq=False)
class EndoJ:
    """Real endomorphism of ``g`` commuting with ``J``, given by its (1,0) block."""

    block: np.ndarray

    def __post_init__(self):
        B = np.asarray(self.block, dtype=np.complex128)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise DimensionError(f"endomorphism block must be square, got {B.shape}")
        object.__setattr__(self, "block", _readonly(B))

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n))

    @classmethod
    def zero(cls, n):
        return cls(np.zeros((n, n)))

    @property
    def n(self) -> int:
        return self.block.shape[0]

    @cached_property
    def full(self) -> np.ndarray:
        n = self.n
        F = np.zeros((2 * n, 2 * n), dtype=np.complex128)
        F[:n, :n] = self.block
        F[n:, n:] = self.block.conj()
        F.flags.writeable = False
        return F

    def real_matrix(self) -> np.ndarray:
        """Matrix of the real action in the basis ``x_j, J x_j`` of ``g``."""
        Q = real_frame(self.n)
        R = np.linalg.solve(Q, self.full @ Q)
        return R.real

    def transpose(self) -> "EndoJ":
        """Adjoint with respect to the reference inner product."""
        return EndoJ(self.block.conj().T)

    def sym(self) -> "EndoJ":
        return EndoJ(0.5 * (self.block + self.block.conj().T))

    def inverse(self) -> "EndoJ":
        return EndoJ(np.linalg.inv(self.block))

    def condition(self) -> float:
        return float(np.linalg.cond(self.block))

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.block))

    def inner(self, other: "EndoJ") -> float:
        """Trace form ``tr(E F^t)`` of the real endomorphisms."""
        return float(2.0 * np.real(np.vdot(other.block, self.block)))

    @property
    def norm(self) -> float:
        return float(np.sqrt(max(self.inner(self), 0.0)))

    def to_form(self) -> HermitianForm:
        return HermitianForm(self.block.T)

    def __matmul__(self, other):
        return EndoJ(self.block @ other.block)

    def __add__(self, other):
        return EndoJ(self.block + other.block)

    def __sub__(self, other):
        return EndoJ(self.block - other.block)

    def __mul__(self, lam):
        return EndoJ(float(lam) * self.block)

    __rmul__ = __mul__


def real_frame(n: int) -> np.ndarray:
    """Columns: ``x_j = (Z_j + Zbar_j)/sqrt2`` and ``J x_j`` in complex coordinates."""
    Q = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    r = 1.0 / np.sqrt(2.0)
    for j in range(n):
        Q[j, 2 * j] = Q[n + j, 2 * j] = r
        Q[j, 2 * j + 1] = 1j * r
        Q[n + j, 2 * j + 1] = -1j * r
    return Q


def j_matrix_real(n: int) -> np.ndarray:
    """``J`` in the basis returned by :func:`real_frame`."""
    Jr = np.zeros((2 * n, 2 * n))
    for j in range(n):
        Jr[2 * j + 1, 2 * j] = 1.0
        Jr[2 * j, 2 * j + 1] = -1.0
    return Jr


@dataclasses.dataclass(frozen=True, eq=False)
class Subspace:
    """Complex subspace of ``g^C`` with an orthonormal basis in its columns."""

    basis: np.ndarray

    @property
    def ambient(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def residual(self, vectors) -> float:
        """Largest distance of the given columns from the subspace."""
        V = np.asarray(vectors, dtype=np.complex128).reshape(self.ambient, -1)
        if V.size == 0:
            return 0.0
        return float(np.max(np.linalg.norm(V - self.projector @ V, axis=0)))

    def hol_part(self, cutoff: float = 1e-9) -> np.ndarray:
        """Orthonormal basis (n x d) of the subspace intersected with ``g^{1,0}``."""
        n = self.ambient // 2
        if self.dim == 0:
            return np.zeros((n, 0), dtype=np.complex128)
        coeff = null_space(self.basis[n:], cutoff)
        W = self.basis[:n] @ coeff
        if W.shape[1] == 0:
            return W
        q, _ = np.linalg.qr(W)
        return q

    def is_j_invariant(self, tol: float = 1e-9) -> bool:
        n = self.ambient // 2
        J = np.r_[np.full(n, 1j), np.full(n, -1j)]
        return self.residual(J[:, None] * self.basis) < tol


def null_space(M, cutoff: float = 1e-9) -> np.ndarray:
    """Orthonormal null-space basis with a relative singular-value cutoff."""
    M = np.atleast_2d(np.asarray(M))
    cols = M.shape[1]
    if M.size == 0 or not np.any(M):
        return np.eye(cols, dtype=M.dtype if np.iscomplexobj(M) else float)
    _, sv, vh = np.linalg.svd(M)
    rank = int(np.sum(sv > cutoff * sv[0]))
    return vh[rank:].conj().T


def column_space(M, cutoff: float = 1e-9) -> np.ndarray:
    M = np.atleast_2d(np.asarray(M))
    if M.size == 0 or not np.any(M):
        return np.zeros((M.shape[0], 0), dtype=np.complex128)
    u, sv, _ = np.linalg.svd(M, full_matrices=False)
    rank = int(np.sum(sv > cutoff * sv[0]))
    return u[:, :rank]


# ---------------------------------------------------------------------------
# operations


def _check_dims(*objs):
    ns = {o.n for o in objs}
    if len(ns) != 1:
        raise DimensionError(f"dimension mismatch: {sorted(ns)}")


def bracket_inner(mu: BracketTensor, eta: BracketTensor) -> float:
    """Inner product of brackets summed over all ordered pairs of basis vectors.

    On integrable brackets this is
    ``2 Re mu^j_{sr} conj(eta^j_{sr}) + 4 Re mu^j_{s rbar} conj(eta^j_{s rbar})``.
    """
    _check_dims(mu, eta)
    return float(np.real(np.vdot(eta.full, mu.full)))


def bracket_norm2(mu: BracketTensor) -> float:
    return kernels.norm2(mu.full)


def bracket_norm(mu: BracketTensor) -> float:
    return float(np.sqrt(bracket_norm2(mu)))


def pi_apply(E: EndoJ, mu: BracketTensor) -> BracketTensor:
    """Infinitesimal action ``E mu(.,.) - mu(E.,.) - mu(.,E.)``."""
    _check_dims(E, mu)
    return BracketTensor.from_full(kernels.pi_full(E.full, mu.full))


def act(f: EndoJ, mu: BracketTensor, tol: Tolerances = DEFAULT) -> BracketTensor:
    """Push-forward ``f . mu = f mu(f^-1 ., f^-1 .)``."""
    _check_dims(f, mu)
    if not np.all(np.isfinite(f.block)) or f.condition() > tol.max_condition:
        raise NumericalError("endomorphism is singular or ill-conditioned")
    F = f.full
    Finv = f.inverse().full
    return BracketTensor.from_full(kernels.act_full(F, Finv, mu.full))


def unitary_transform(g: HermitianForm) -> EndoJ:
    """Upper-triangular ``A`` with ``g(., .) = g0(A ., A .)``.

    The block satisfies ``A^* A = g.matrix.T``; ``act(A, mu0)`` then gives the
    structure constants of ``mu0`` in the frame ``A^-1 Z_j``, which is
    ``g``-unitary.
    """
    try:
        L = np.linalg.cholesky(g.matrix.T)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("metric is not positive definite") from exc
    return EndoJ(L.conj().T)


def jacobi_residual(mu: BracketTensor):
    """Largest Jacobiator component and the basis triple where it occurs."""
    C = mu.full
    jac = np.einsum("dab,edc->eabc", C, C)
    cyc = jac + jac.transpose(0, 2, 3, 1) + jac.transpose(0, 3, 1, 2)
    a = np.abs(cyc)
    if a.size == 0 or a.max() == 0:
        return 0.0, None
    idx = np.unravel_index(np.argmax(a), a.shape)
    return float(a[idx]), tuple(int(i) for i in idx[1:])


def nijenhuis_residual(mu: BracketTensor):
    """Largest component of ``N`` and the basis pair where it occurs."""
    n = mu.n
    jv = np.r_[np.full(n, 1j), np.full(n, -1j)]
    fac = (
        jv[None, :, None] * jv[None, None, :]
        - jv[:, None, None] * jv[None, :, None]
        - jv[:, None, None] * jv[None, None, :]
        - 1.0
    )
    a = np.abs(fac * mu.full)
    if a.max(initial=0.0) == 0:
        return 0.0, None
    idx = np.unravel_index(np.argmax(a), a.shape)
    return float(a[idx]), (int(idx[1]), int(idx[2]))


def center(mu: BracketTensor, cutoff: float = DEFAULT.null_space) -> Subspace:
    """Kernel of ``x -> mu(x, .)`` as a conjugation-invariant subspace of ``g^C``."""
    m = 2 * mu.n
    A = mu.full.transpose(0, 2, 1).reshape(m * m, m)
    return Subspace(null_space(A, cutoff))


def commutator(mu: BracketTensor, cutoff: float = DEFAULT.null_space) -> Subspace:
    """The derived algebra ``mu(g, g)``."""
    m = 2 * mu.n
    return Subspace(column_space(mu.full.reshape(m, m * m), cutoff))


def nilpotency_step(mu: BracketTensor, cutoff: float = DEFAULT.null_space) -> Optional[int]:
    """Length of the lower central series, or ``None`` if not nilpotent."""
    m = 2 * mu.n
    C = mu.full
    cur = np.eye(m, dtype=np.complex128)
    scale = max(mu.scale, 1.0)
    for k in range(1, m + 2):
        if cur.shape[1] == 0:
            return k - 1
        nxt = np.einsum("cab,bv->cav", C, cur).reshape(m, -1)
        if np.max(np.abs(nxt), initial=0.0) <= cutoff * scale:
            return k
        new = column_space(nxt, cutoff)
        if new.shape[1] >= cur.shape[1]:
            return None
        cur = new
    return None


@dataclasses.dataclass(frozen=True)
class AlgebraMetadata:
    step: Optional[int]
    center_dim: int            # complex dimension of the J-invariant part of the center
    center_real_dim: int
    in_class: bool             # 2-step and J mu(g, g) inside the center
    j_preserves_commutators: bool
    abelian_j: bool
    complex_lie_group: bool
    unimodular: bool


@dataclasses.dataclass(frozen=True, eq=False)
class ValidationReport:
    jacobi_residual: float
    jacobi_triple: Optional[tuple]
    nijenhuis_residual: float
    nijenhuis_pair: Optional[tuple]
    scale: float
    center: Subspace
    metadata: AlgebraMetadata
    tol: Tolerances = DEFAULT

    @property
    def jacobi_ok(self) -> bool:
        return self.jacobi_residual <= self.tol.jacobi * max(self.scale**2, 1e-300)

    @property
    def nijenhuis_ok(self) -> bool:
        return self.nijenhuis_residual <= self.tol.nijenhuis * max(self.scale, 1e-300)

    @property
    def ok(self) -> bool:
        return self.jacobi_ok and self.nijenhuis_ok

    def summary(self) -> dict:
        md = dataclasses.asdict(self.metadata)
        return {
            "valid": self.ok,
            "jacobi_residual": self.jacobi_residual,
            "jacobi_triple": self.jacobi_triple,
            "nijenhuis_residual": self.nijenhuis_residual,
            "nijenhuis_pair": self.nijenhuis_pair,
            "scale": self.scale,
            **md,
        }


def validate(mu: BracketTensor, tol: Tolerances = DEFAULT) -> ValidationReport:
    """Diagnostics of a bracket; failures are reported, not raised."""
    n = mu.n
    cut = tol.null_space
    jac, triple = jacobi_residual(mu)
    nij, pair = nijenhuis_residual(mu)
    scale = mu.scale
    xi = center(mu, cut)
    step = nilpotency_step(mu, cut)
    comm = commutator(mu, cut)
    jv = np.r_[np.full(n, 1j), np.full(n, -1j)]
    thresh = 1e-8
    j_comm_in_center = xi.residual(jv[:, None] * comm.basis) < thresh
    j_pres = comm.residual(jv[:, None] * comm.basis) < thresh
    C = mu.full
    small = tol.nijenhuis * max(scale, 1e-300)
    abelian_j = np.max(np.abs(C[:, :n, :n]), initial=0.0) <= small
    clg = np.max(np.abs(C[:, :n, n:]), initial=0.0) <= small
    ad_trace = trace_ad(mu)
    unimod = np.max(np.abs(ad_trace), initial=0.0) <= 1e-9 * max(scale, 1.0)
    md = AlgebraMetadata(
        step=step,
        center_dim=xi.hol_part(cut).shape[1],
        center_real_dim=xi.dim,
        in_class=bool(step is not None and step <= 2 and j_comm_in_center),
        j_preserves_commutators=bool(j_pres),
        abelian_j=bool(abelian_j),
        complex_lie_group=bool(clg),
        unimodular=bool(unimod),
    )
    return ValidationReport(jac, triple, nij, pair, scale, xi, md, tol)


def trace_ad(mu: BracketTensor) -> np.ndarray:
    """``tr ad(e_a)`` for every complexified basis vector."""
    return np.einsum("cac->a", mu.full)


@dataclasses.dataclass(frozen=True, eq=False)
class LieAlgebraSpec:
    name: str
    bracket: BracketTensor
    metadata: AlgebraMetadata
    metric: HermitianForm
    psi: complex = 1.0

    @property
    def n(self) -> int:
        return self.bracket.n

    @classmethod
    def build(cls, name, bracket, metric=None, psi=1.0, tol: Tolerances = DEFAULT):
        """Validate ``bracket`` and wrap it; raises :class:`AlgebraError` on failure."""
        rep = validate(bracket, tol)
        if not rep.jacobi_ok:
            raise AlgebraError(
                f"{name}: Jacobi identity fails (residual {rep.jacobi_residual:.3g} "
                f"at basis triple {rep.jacobi_triple})",
                rep.jacobi_triple,
            )
        if not rep.nijenhuis_ok:
            raise AlgebraError(
                f"{name}: complex structure not integrable (Nijenhuis residual "
                f"{rep.nijenhuis_residual:.3g} at pair {rep.nijenhuis_pair})",
                rep.nijenhuis_pair,
            )
        metric = HermitianForm.identity(bracket.n) if metric is None else metric
        if metric.n != bracket.n:
            raise DimensionError("metric and bracket dimensions differ")
        if not metric.is_positive_definite():
            raise NumericalError(f"{name}: metric is not positive definite")
        return cls(name, bracket, rep.metadata, metric, complex(psi))

    def unitary_bracket(self, g: Optional[HermitianForm] = None) -> BracketTensor:
        """Structure constants in a unitary frame of ``g`` (default: ``self.metric``)."""
        g = self.metric if g is None else g
        return act(unitary_transform(g), self.bracket)


# ---------------------------------------------------------------------------
# real bases


def from_real_basis(consts, J, metric=None, cutoff: float = 1e-9) -> BracketTensor:
    """Convert real structure constants to a unitary (1,0)-frame bracket.

    ``consts[k, i, j]`` is the ``x_k`` coefficient of ``[x_i, x_j]`` and
    ``J[:, i]`` the coordinates of ``J x_i``.  The frame consists of the vectors
    ``(x_i - i J x_i)/sqrt2`` taken in order and orthonormalized by modified
    Gram-Schmidt against ``metric`` (default: the identity).
    """
    c = np.asarray(consts, dtype=float)
    J = np.asarray(J, dtype=float)
    m = J.shape[0]
    if m % 2 or J.shape != (m, m) or c.shape != (m, m, m):
        raise DimensionError("real data must be (2n, 2n) and (2n, 2n, 2n)")
    if np.max(np.abs(J @ J + np.eye(m))) > 1e-9:
        raise AlgebraError("J does not square to -1")
    G = np.eye(m) if metric is None else np.asarray(metric, dtype=float)
    if np.max(np.abs(J.T @ G @ J - G)) > 1e-9:
        raise AlgebraError("metric is not J-invariant")
    n = m // 2

    def herm(u, v):
        return u @ G @ v.conj()

    frame = []
    for i in range(m):
        w = (np.eye(m)[:, i] - 1j * J[:, i]).astype(complex)
        for z in frame:
            w = w - herm(w, z) * z
        nrm = np.sqrt(abs(herm(w, w)))
        if nrm > cutoff:
            frame.append(w / nrm)
        if len(frame) == n:
            break
    Z = np.array(frame).T
    P = np.concatenate([Z, Z.conj()], axis=1)
    Pinv = np.linalg.inv(P)
    C = np.einsum("kd,dxy,xa,yb->kab", Pinv, c.astype(complex), P, P)
    return BracketTensor.from_full(C)


def to_real_basis(mu: BracketTensor) -> tuple[np.ndarray, np.ndarray]:
    """Real structure constants and ``J`` in the basis of :func:`real_frame`."""
    Q = real_frame(mu.n)
    Qi = np.linalg.inv(Q)
    c = np.einsum("kd,dxy,xa,yb->kab", Qi, mu.full, Q, Q)
    return c.real, j_matrix_real(mu.n)


class ClassProjector:
    """Orthogonal projection onto the 2-step brackets with a fixed central subspace.

    With ``xi`` the center of ``mu0``, the target space consists of integrable
    brackets with ``mu(xi, .) = 0`` and ``mu(g, g)`` inside ``xi``.  These all
    satisfy the Jacobi identity, and the flows driven by endomorphisms supported
    on ``xi`` preserve the space.
    """

    def __init__(self, mu0: BracketTensor, cutoff: float = DEFAULT.null_space):
        n = mu0.n
        xi = center(mu0, cutoff)
        self.n = n
        self.center = xi
        self.P_c = xi.projector
        self.P_perp = np.eye(2 * n) - self.P_c

    def __call__(self, C: np.ndarray) -> np.ndarray:
        n = self.n
        C = np.einsum("cd,dxy,xa,yb->cab", self.P_c, C, self.P_perp, self.P_perp)
        C[n:, :n, :n] = 0.0
        C[:n, n:, n:] = 0.0
        return project_full(C)

    def project(self, mu: BracketTensor) -> BracketTensor:
        return BracketTensor.from_full(self(mu.full))
