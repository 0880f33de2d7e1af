"""Independent reference computations used only by the tests.

Nothing here calls the closed formulas of the package: the Chern connection is
obtained by solving its defining linear conditions, Levi-Civita data comes from
the Koszul formula in a real orthonormal basis, and algebraic properties are
checked by looping over basis elements.
"""
import itertools

import numpy as np


def sigma(n):
    return np.r_[np.arange(n, 2 * n), np.arange(n)]


def bracket(C, x, y):
    return np.einsum("cab,a,b->c", C, x, y)


def jacobi_bruteforce(C):
    m = C.shape[0]
    E = np.eye(m)
    worst = 0.0
    for a, b, c in itertools.product(range(m), repeat=3):
        x, y, z = E[a], E[b], E[c]
        v = (
            bracket(C, bracket(C, x, y), z)
            + bracket(C, bracket(C, y, z), x)
            + bracket(C, bracket(C, z, x), y)
        )
        worst = max(worst, np.abs(v).max())
    return worst


def nijenhuis_bruteforce(C):
    m = C.shape[0]
    n = m // 2
    J = np.diag(np.r_[np.full(n, 1j), np.full(n, -1j)])
    E = np.eye(m)
    worst = 0.0
    for a, b in itertools.product(range(m), repeat=2):
        x, y = E[a], E[b]
        v = (
            bracket(C, J @ x, J @ y)
            - J @ bracket(C, J @ x, y)
            - J @ bracket(C, x, J @ y)
            - bracket(C, x, y)
        )
        worst = max(worst, np.abs(v).max())
    return worst


def center_bruteforce(C, tol=1e-9):
    """Real dimension of the center from the adjoint matrices of all basis vectors."""
    m = C.shape[0]
    rows = [C[:, :, b] for b in range(m)]  # x -> [x, e_b]
    A = np.concatenate(rows)
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return m, np.eye(m)
    r = int(np.sum(s > tol * s[0]))
    _, _, vh = np.linalg.svd(A)
    return m - r, vh[r:].conj().T


def chern_connection(C):
    """Christoffels ``G[c, a, b]`` of ``nabla_{e_a} e_b`` from the defining conditions.

    Unknowns are solved from: J-compatibility (no mixing of types), metric
    compatibility for the Hermitian frame, and vanishing (1,1) torsion.
    """
    m = C.shape[0]
    n = m // 2
    s = sigma(n)
    typ = np.r_[np.zeros(n, int), np.ones(n, int)]
    idx = lambda c, a, b: (c * m + a) * m + b
    rows, rhs = [], []
    for c, a, b in itertools.product(range(m), repeat=3):
        if typ[c] != typ[b]:
            r = np.zeros(m ** 3, complex)
            r[idx(c, a, b)] = 1
            rows.append(r)
            rhs.append(0)
    for a, b, d in itertools.product(range(m), repeat=3):
        r = np.zeros(m ** 3, complex)
        r[idx(s[d], a, b)] += 1
        r[idx(s[b], a, d)] += 1
        rows.append(r)
        rhs.append(0)
    for a in range(n):
        for b in range(n, m):
            for c in range(m):
                r = np.zeros(m ** 3, complex)
                r[idx(c, a, b)] += 1
                r[idx(c, b, a)] -= 1
                rows.append(r)
                rhs.append(C[c, a, b])
    A = np.array(rows)
    sol, _, rank, _ = np.linalg.lstsq(A, np.array(rhs), rcond=None)
    assert rank == m ** 3
    return sol.reshape(m, m, m)


def curvature_from_connection(G, C):
    NA = np.einsum("dae,ebc->dabc", G, G)
    return NA - NA.transpose(0, 2, 1, 3) - np.einsum("eab,dec->dabc", C, G)


def chern_S_and_torsion(C):
    """Second Chern-Ricci contraction and (2,0) torsion from the solved connection."""
    m = C.shape[0]
    n = m // 2
    G = chern_connection(C)
    R = curvature_from_connection(G, C)
    S = np.zeros((n, n), complex)
    for j, k in itertools.product(range(n), repeat=2):
        S[j, k] = sum(R[k, s, n + s, j] for s in range(n))
    T = np.zeros((n, n, n), complex)
    for r, s in itertools.product(range(n), repeat=2):
        v = G[:, r, s] - G[:, s, r] - C[:, r, s]
        T[r, s, :] = v[:n]
    return S, T


def q_from_torsion(T):
    """Torsion-quadratic forms written out with explicit loops."""
    n = T.shape[0]
    Q = [np.zeros((n, n), complex) for _ in range(4)]
    tau = [sum(T[q, s, s] for s in range(n)) for q in range(n)]
    for j, k in itertools.product(range(n), repeat=2):
        for p, s in itertools.product(range(n), repeat=2):
            Q[0][j, k] += T[j, s, p] * np.conj(T[k, s, p])
            Q[1][j, k] += T[p, s, k] * np.conj(T[p, s, j])
        Q[2][j, k] = tau[j] * np.conj(tau[k])
        Q[3][j, k] = 0.5 * sum(tau[q] * np.conj(T[q, k, j]) + T[q, j, k] * np.conj(tau[q]) for q in range(n))
    return Q


def real_structure(C):
    n = C.shape[0] // 2
    Q = np.zeros((2 * n, 2 * n), complex)
    r = 1 / np.sqrt(2)
    for j in range(n):
        Q[j, 2 * j] = Q[n + j, 2 * j] = r
        Q[j, 2 * j + 1] = 1j * r
        Q[n + j, 2 * j + 1] = -1j * r
    Qi = np.linalg.inv(Q)
    c = np.einsum("kd,dxy,xa,yb->kab", Qi, C, Q, Q)
    assert np.abs(c.imag).max() < 1e-10
    return c.real, Q


def ricci_levi_civita(C):
    """Ric(Z_j, Zbar_k) from a loop-based Koszul formula in the real orthonormal basis."""
    n = C.shape[0] // 2
    c, Q = real_structure(C)
    m = 2 * n
    # <nabla_a b, k> = 1/2 (<[a,b],k> - <[b,k],a> + <[k,a],b>)
    G = np.zeros((m, m, m))
    for k, a, b in itertools.product(range(m), repeat=3):
        G[k, a, b] = 0.5 * (c[k, a, b] - c[a, b, k] + c[b, k, a])
    Ric = np.zeros((m, m))
    for b, d in itertools.product(range(m), repeat=2):
        tot = 0.0
        for a in range(m):
            # <R(x_a, x_b) x_d, x_a>
            v = G[:, a, :] @ G[:, b, d] - G[:, b, :] @ G[:, a, d] - G[:, :, d] @ c[:, a, b]
            tot += v[a]
        Ric[b, d] = tot
    Qi = np.linalg.inv(Q)
    RicC = Qi.T @ Ric @ Qi
    return RicC[:n, n:], Ric


def nilpotent_ricci_real(C):
    """``-1/2 sum <[x, e_i], e_j><[y, e_i], e_j> + 1/4 sum <[e_i, e_j], x><[e_i, e_j], y>``."""
    c, _ = real_structure(C)
    return -0.5 * np.einsum("jxi,jyi->xy", c, c) + 0.25 * np.einsum("xij,yij->xy", c, c)


def derivation_nullity(C, tol=1e-9):
    """Real dimension of J-commuting derivations from the equations on all basis pairs."""
    m = C.shape[0]
    n = m // 2
    cols = []
    for l, j in itertools.product(range(n), repeat=2):
        for w in (1.0, 1j):
            F = np.zeros((m, m), complex)
            F[l, j] = w
            F[n + l, n + j] = np.conj(w)
            D = np.zeros_like(C)
            for a, b in itertools.product(range(m), repeat=2):
                x, y = np.eye(m)[a], np.eye(m)[b]
                D[:, a, b] = F @ bracket(C, x, y) - bracket(C, F @ x, y) - bracket(C, x, F @ y)
            cols.append(D.ravel())
    A = np.array(cols).T
    A = np.concatenate([A.real, A.imag])
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0:
        return 2 * n * n
    return 2 * n * n - int(np.sum(s > tol * s[0]))


def integrate_rk4(f, y0, t_end, steps):
    """Fixed-step classical Runge-Kutta, used to cross-check the adaptive stepper."""
    y = np.array(y0, dtype=float)
    h = t_end / steps
    t = 0.0
    for _ in range(steps):
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return y
