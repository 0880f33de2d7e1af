"""Torsion and curvature of left-invariant Hermitian metrics.

Every function takes a bracket written in a unitary frame of the metric (use
:func:`unitary_bracket` or ``act(unitary_transform(g), mu)`` first).  Indices
``j, k`` of a returned form ``H`` refer to ``H(Z_j, Zbar_k)``.

Two evaluation routes exist.  The *general* route contracts the Chern torsion
and the second Chern-Ricci tensor as in their definitions and computes the
Levi-Civita Ricci tensor from Koszul Christoffel symbols; it holds for every
integrable bracket.  The *fast* route uses closed formulas that are valid for
2-step brackets with ``J mu(g, g)`` central.  ``path="auto"`` picks the fast
route exactly when the bracket is in that class.
"""
from __future__ import annotations

import dataclasses
import warnings

import numpy as np

from . import kernels
from .algebra import (
    BracketTensor,
    HermitianForm,
    EndoJ,
    act,
    real_frame,
    trace_ad,
    unitary_transform,
    validate,
)
from .config import DEFAULT
from .errors import AlgebraError, NumericalError


def unitary_bracket(mu0: BracketTensor, g: HermitianForm) -> BracketTensor:
    """Structure constants of ``mu0`` in the upper-triangular ``g``-unitary frame."""
    return act(unitary_transform(g), mu0)


def to_reference(form: HermitianForm, g: HermitianForm) -> HermitianForm:
    """Express a form given in the ``g``-unitary frame in the reference frame."""
    B = unitary_transform(g).block
    return HermitianForm(B.T @ form.matrix @ B.conj())


def in_class(mu: BracketTensor) -> bool:
    return validate(mu).metadata.in_class


def _path(mu, path):
    if path == "auto":
        return "fast" if in_class(mu) else "general"
    if path not in ("fast", "general"):
        raise ValueError(f"unknown evaluation path {path!r}")
    return path


def _blocks(mu):
    n = mu.n
    C = mu.full
    N, B = slice(0, n), slice(n, 2 * n)
    return C, N, B


@dataclasses.dataclass(frozen=True, eq=False)
class TorsionComponents:
    """``t[r, s, k]`` is the Chern torsion component ``T_{rs kbar}``."""

    n: int
    t: np.ndarray


def chern_torsion(mu: BracketTensor) -> TorsionComponents:
    C, N, B = _blocks(mu)
    A = C[B, N, B]  # A[s, r, k] = mu^{sbar}_{r kbar}
    t = -A.transpose(1, 0, 2) + A - C[N, N, N].transpose(1, 2, 0)
    t.flags.writeable = False
    return TorsionComponents(mu.n, t)


def second_chern_ricci(mu: BracketTensor) -> HermitianForm:
    C, N, B = _blocks(mu)
    t1 = -np.einsum("rsj,rsk->jk", C[N, B, N], C[B, N, B])
    t2 = np.einsum("jsr,ksr->jk", C[B, N, B], C[N, B, N])
    t3 = np.einsum("rss,jrk->jk", C[N, N, B], C[B, N, B])
    t4 = -np.einsum("rss,krj->jk", C[B, N, B], C[N, B, N])
    return HermitianForm(t1 + t2 + t3 + t4)


def _q_general(mu):
    T = chern_torsion(mu).t
    Tc = T.conj()
    q1 = np.einsum("jsp,ksp->jk", T, Tc)
    q2 = np.einsum("sqk,sqj->jk", T, Tc)
    tau = np.einsum("qss->q", T)
    q3 = np.outer(tau, tau.conj())
    q4 = 0.5 * (np.einsum("q,qkj->jk", tau, Tc) + np.einsum("qjk,q->jk", T, tau.conj()))
    return q1, q2, q3, q4


def _q_fast(mu):
    C, N, B = _blocks(mu)
    BNB, NBN = C[B, N, B], C[N, B, N]
    NNN, BBB = C[N, N, N], C[B, B, B]
    q1 = (
        np.einsum("rjs,rks->jk", BNB, NBN)
        + np.einsum("jrs,krs->jk", BNB, NBN)
        + np.einsum("sjr,skr->jk", NNN, BBB)
    )
    q2 = 2.0 * np.einsum("srj,srk->jk", NBN, BNB) + np.einsum("krs,jrs->jk", NNN, BBB)
    q3 = np.einsum("jrr,kss->jk", BNB, NBN)
    q4 = 0.5 * (np.einsum("srr,skj->jk", BNB, NBN) + np.einsum("srr,sjk->jk", NBN, BNB))
    return q1, q2, q3, q4


def q_tensors(mu: BracketTensor, path: str = "general"):
    """The four torsion-quadratic forms ``Q1..Q4``."""
    fn = _q_fast if _path(mu, path) == "fast" else _q_general
    return tuple(HermitianForm(q) for q in fn(mu))


def theta(mu: BracketTensor, path: str = "auto") -> HermitianForm:
    """Velocity form of the positive Hermitian curvature flow, ``S + Q2/2``."""
    if _path(mu, path) == "fast":
        return HermitianForm(kernels.theta_form(mu.full, mu.n))
    q2 = _q_general(mu)[1]
    return HermitianForm(second_chern_ricci(mu).matrix + 0.5 * q2)


def theta_endomorphism(mu: BracketTensor, path: str = "auto") -> EndoJ:
    """``Theta_mu`` with its index raised by the unitary-frame metric."""
    return theta(mu, path).to_endo()


def _k_fast(mu):
    C, N, B = _blocks(mu)
    BNB, NBN = C[B, N, B], C[N, B, N]
    NNN, BBB = C[N, N, N], C[B, B, B]
    a1 = np.einsum("jrs,krs->jk", BNB, NBN)
    a2 = np.einsum("rjs,rks->jk", BNB, NBN)
    a3 = np.einsum("sjr,skr->jk", NNN, BBB)
    b1 = np.einsum("krs,jrs->jk", NNN, BBB)
    b2 = np.einsum("srj,srk->jk", NBN, BNB)
    c1 = np.einsum("jrr,kss->jk", BNB, NBN)
    d1 = np.einsum("srr,skj->jk", BNB, NBN)
    d2 = np.einsum("srr,sjk->jk", NBN, BNB)
    return 0.5 * (a1 - a2 - a3) + 0.25 * (b1 - 2.0 * b2) + 0.5 * c1 - 0.5 * (d1 + d2)


def k_tensor(mu: BracketTensor, path: str = "auto") -> HermitianForm:
    """Velocity form of the Hermitian curvature flow, ``S - Q``."""
    if _path(mu, path) == "fast":
        return HermitianForm(_k_fast(mu))
    q1, q2, q3, q4 = _q_general(mu)
    Q = 0.5 * q1 - 0.25 * q2 - 0.5 * q3 + q4
    return HermitianForm(second_chern_ricci(mu).matrix - Q)


def levi_civita(mu: BracketTensor):
    """Koszul Christoffel symbols in the orthonormal real frame ``x_j, J x_j``.

    Returns ``(c, G)`` with ``[x_a, x_b] = c[k, a, b] x_k`` and
    ``nabla_{x_a} x_b = G[k, a, b] x_k``.
    """
    Q = real_frame(mu.n)
    Qi = np.linalg.inv(Q)
    c = np.einsum("kd,dxy,xa,yb->kab", Qi, mu.full, Q, Q).real
    G = 0.5 * (c - c.transpose(2, 0, 1) + c.transpose(1, 2, 0))
    return c, G


def ricci_real(mu: BracketTensor) -> np.ndarray:
    """Riemannian Ricci tensor in the real frame, from the Levi-Civita curvature."""
    c, G = levi_civita(mu)
    NA = np.einsum("dae,ebc->dabc", G, G)
    R = NA - NA.transpose(0, 2, 1, 3) - np.einsum("eab,dec->dabc", c, G)
    return np.einsum("aabc->bc", R)


def ricci_11(mu: BracketTensor, path: str = "auto") -> HermitianForm:
    """J-invariant part of the Riemannian Ricci tensor."""
    if path == "fast" and not in_class(mu):
        warnings.warn("closed Ricci formula used outside its class assumptions", stacklevel=2)
    if _path(mu, path) == "fast":
        return HermitianForm(kernels.ricci_form(mu.full, mu.n))
    n = mu.n
    Qi = np.linalg.inv(real_frame(n))
    RicC = np.einsum("xa,xy,yb->ab", Qi, ricci_real(mu), Qi)
    return HermitianForm(RicC[:n, n:])


def p_endomorphism(mu: BracketTensor, path: str = "auto") -> EndoJ:
    return ricci_11(mu, path).to_endo()


def is_unimodular(mu: BracketTensor, tol: float = 1e-9) -> bool:
    return float(np.max(np.abs(trace_ad(mu)), initial=0.0)) <= tol * max(mu.scale, 1.0)


def balanced_defect(mu: BracketTensor, path: str = "auto"):
    """``sum_l mu(Z_l, Zbar_l)`` in complexified coordinates and ``tr K - tr Ric11``."""
    if not is_unimodular(mu):
        raise AlgebraError("balanced criterion requires a unimodular bracket")
    vec = np.einsum("cll->c", mu.full[:, : mu.n, mu.n :])
    gap = k_tensor(mu, path).trace - ricci_11(mu, path).trace
    return vec, float(gap)


def psi_norm(psi: complex, g: HermitianForm) -> float:
    """Norm of the left-invariant (n,0)-form ``psi Z^1 ^ ... ^ Z^n``."""
    if not g.is_positive_definite():
        raise NumericalError("metric is not positive definite")
    return float(abs(psi) / np.sqrt(np.prod(g.eigenvalues)))


@dataclasses.dataclass(frozen=True, eq=False)
class CurvatureBundle:
    S: HermitianForm
    Q1: HermitianForm
    Q2: HermitianForm
    Q3: HermitianForm
    Q4: HermitianForm
    Theta: HermitianForm
    K: HermitianForm
    Ric11: HermitianForm
    balanced_defect_vector: np.ndarray
    scalar_gap: float

    @property
    def traces(self) -> dict:
        names = ("S", "Q1", "Q2", "Q3", "Q4", "Theta", "K", "Ric11")
        return {k: getattr(self, k).trace for k in names}


def curvature_bundle(mu: BracketTensor) -> CurvatureBundle:
    """Every curvature quantity of a unitary-frame bracket, by the general route.

    The Ricci part uses the closed formula in class and Koszul otherwise.
    """
    S = second_chern_ricci(mu)
    q1, q2, q3, q4 = (HermitianForm(q) for q in _q_general(mu))
    th = HermitianForm(S.matrix + 0.5 * q2.matrix)
    K = HermitianForm(S.matrix - (0.5 * q1.matrix - 0.25 * q2.matrix - 0.5 * q3.matrix + q4.matrix))
    ric = ricci_11(mu)
    vec = np.einsum("cll->c", mu.full[:, : mu.n, mu.n :])
    return CurvatureBundle(S, q1, q2, q3, q4, th, K, ric, vec, K.trace - ric.trace)
