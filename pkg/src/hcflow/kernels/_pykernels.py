"""NumPy reference implementation of the hot contractions.

All routines act on the full complexified structure tensor ``C`` of shape
``(2n, 2n, 2n)`` with ``mu(e_a, e_b) = sum_c C[c, a, b] e_c`` in the basis
``(Z_1..Z_n, Zbar_1..Zbar_n)``.
"""
import numpy as np


def pi_full(E, C):
    """``pi(E) mu = E mu(., .) - mu(E ., .) - mu(., E .)``."""
    return np.tensordot(E, C, axes=(1, 0)) - np.matmul(E.T, C) - np.matmul(C, E)


def act_full(F, Finv, C):
    """``f . mu = f mu(f^-1 ., f^-1 .)``."""
    tmp = np.matmul(np.tensordot(F, C, axes=(1, 0)), Finv)
    return np.matmul(Finv.T, tmp)


def theta_form(C, n):
    N, B = slice(0, n), slice(n, 2 * n)
    h1 = np.einsum("jsr,ksr->jk", C[B, N, B], C[N, B, N])
    h2 = np.einsum("jsr,ksr->jk", C[B, B, B], C[N, N, N])
    return h1 + 0.5 * h2


def ricci_form(C, n):
    N, B = slice(0, n), slice(n, 2 * n)
    t1 = np.einsum("rjs,rsk->jk", C[N, N, N], C[B, B, B])
    t2 = np.einsum("jrs,krs->jk", C[B, N, B], C[N, B, N])
    t3 = np.einsum("rsj,rsk->jk", C[B, B, N], C[N, N, B])
    t4 = np.einsum("sjr,skr->jk", C[N, N, B], C[B, B, N])
    t5 = np.einsum("jrs,krs->jk", C[B, B, B], C[N, N, N])
    return 0.5 * (t1 + t2 - t3 - t4) + 0.25 * t5


def norm2(C):
    return float(np.vdot(C, C).real)
