"""Reproducible random metrics, brackets and endomorphisms."""
from __future__ import annotations

import numpy as np

from .algebra import BracketTensor, EndoJ, HermitianForm, act, center, commutator, null_space


def rng_from(seed=None) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _cnormal(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_metric(n: int, rng=None, eps: float = 1e-3) -> HermitianForm:
    """``A^* A + eps I`` with a complex Gaussian ``A``."""
    A = _cnormal(rng_from(rng), (n, n))
    return HermitianForm(A.conj().T @ A + eps * np.eye(n))


def random_unitary(n: int, rng=None) -> np.ndarray:
    q, r = np.linalg.qr(_cnormal(rng_from(rng), (n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_in_class(n: int, q: int | None = None, rng=None, rotate: bool = True) -> BracketTensor:
    """Random 2-step bracket with ``g^{1,0} = V + W`` and ``J mu(g, g)`` inside ``W + Wbar``.

    ``W`` (complex dimension ``q``) is central; the frame is then rotated by a
    random unitary commuting with ``J``.
    """
    rng = rng_from(rng)
    if q is None:
        q = int(rng.integers(1, n))
    p = n - q
    if p < 1 or q < 1:
        raise ValueError("need 1 <= q < n")
    hh = np.zeros((2 * n, n, n), complex)
    ha = np.zeros((2 * n, n, n), complex)
    W = np.arange(p, n)
    hh[np.ix_(W, range(p), range(p))] = _cnormal(rng, (q, p, p))
    ha[np.ix_(W, range(p), range(p))] = _cnormal(rng, (q, p, p))
    ha[np.ix_(n + W, range(p), range(p))] = _cnormal(rng, (q, p, p))
    mu = BracketTensor(hh, ha)
    if rotate:
        mu = act(EndoJ(random_unitary(n, rng)), mu)
    return mu


def random_endo(n: int, rng=None) -> EndoJ:
    return EndoJ(_cnormal(rng_from(rng), (n, n)))


def random_center_hermitian(mu: BracketTensor, rng=None) -> EndoJ:
    """Random Hermitian endomorphism supported on the J-invariant part of the center."""
    rng = rng_from(rng)
    Wq = center(mu).hol_part()
    d = Wq.shape[1]
    h = _cnormal(rng, (d, d))
    h = h + h.conj().T
    return EndoJ(Wq @ h @ Wq.conj().T)


def endo_basis(n: int) -> list:
    """Real basis of the J-commuting endomorphisms: unit blocks and ``i`` times them."""
    out = []
    for l in range(n):
        for j in range(n):
            B = np.zeros((n, n), complex)
            B[l, j] = 1.0
            out.extend([EndoJ(B), EndoJ(1j * B)])
    return out


def preserving_endos(sub, n: int, cutoff: float = 1e-9) -> list:
    """Real basis of J-commuting endomorphisms mapping the subspace into itself."""
    basis = endo_basis(n)
    if sub.dim == 0:
        return basis
    Pc = np.eye(2 * n) - sub.projector
    cols = [(Pc @ E.full @ sub.basis).ravel() for E in basis]
    M = np.array(cols).T
    M = np.concatenate([M.real, M.imag])
    N = null_space(M, cutoff)
    return [EndoJ(sum(c * E.block for c, E in zip(v, basis))) for v in N.T]


def random_commutator_preserving(mu: BracketTensor, rng=None) -> EndoJ:
    """Random J-commuting endomorphism mapping ``mu(g, g)`` into itself."""
    rng = rng_from(rng)
    family = preserving_endos(commutator(mu), mu.n)
    coeff = rng.normal(size=len(family))
    return EndoJ(sum(c * E.block for c, E in zip(coeff, family)))
