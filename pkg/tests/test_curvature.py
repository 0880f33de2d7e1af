import warnings

import numpy as np
import pytest

import oracles
from hcflow.algebra import (
    BracketTensor,
    EndoJ,
    HermitianForm,
    act,
    bracket_inner,
    bracket_norm2,
    pi_apply,
    unitary_transform,
)

HF = HermitianForm
from hcflow.catalog import catalog, example6, example6_uv
from hcflow.curvature import (
    balanced_defect,
    chern_torsion,
    curvature_bundle,
    k_tensor,
    p_endomorphism,
    psi_norm,
    q_tensors,
    ricci_11,
    second_chern_ricci,
    theta,
    theta_endomorphism,
    to_reference,
    unitary_bracket,
)
from hcflow.errors import AlgebraError
from hcflow.sampling import random_center_hermitian, random_in_class, random_metric, random_unitary

CATALOG = ["example6", "complex_heisenberg", "kodaira_thurston", "abelian(3)"]


def diag(H):
    return np.real(np.diag(H.matrix))


def offdiag(H):
    return np.max(np.abs(H.matrix - np.diag(np.diag(H.matrix))))


# -- frozen values: example6 at the identity metric, hand-contracted --------


def test_example6_forms(ex6):
    mu = ex6.bracket
    assert np.allclose(diag(theta(mu)), [0, 0, 2]) and offdiag(theta(mu)) == 0
    assert np.allclose(diag(second_chern_ricci(mu)), [0, -2, 2])
    q1, q2, q3, q4 = q_tensors(mu)
    assert np.allclose(diag(q1), [2, 0, 2])
    assert np.allclose(diag(q2), [0, 4, 0])
    assert np.allclose(q3.matrix, 0) and np.allclose(q4.matrix, 0)
    assert np.allclose(diag(k_tensor(mu)), [-1, -1, 1])
    assert np.allclose(diag(ricci_11(mu)), [-1, -1, 1])
    assert np.allclose(theta_endomorphism(mu).block, np.diag([0, 0, 2]))


def test_heisenberg_forms(heis):
    mu = heis.bracket
    T = chern_torsion(mu).t
    assert T[0, 1, 2] == pytest.approx(-1) and T[1, 0, 2] == pytest.approx(1)
    assert np.count_nonzero(np.abs(T) > 1e-14) == 2
    assert np.allclose(diag(theta(mu)), [0, 0, 1])
    assert np.allclose(second_chern_ricci(mu).matrix, 0)
    assert np.allclose(diag(q_tensors(mu)[1]), [0, 0, 2])
    assert np.allclose(diag(k_tensor(mu)), [-0.5, -0.5, 0.5])


def test_abelian_everything_zero():
    mu = catalog("abelian(3)").bracket
    b = curvature_bundle(mu)
    for H in (b.S, b.Q1, b.Q2, b.Q3, b.Q4, b.Theta, b.K, b.Ric11):
        assert np.all(H.matrix == 0)
    assert np.all(chern_torsion(mu).t == 0)


def test_theta_diagonal_metric_example6():
    for a, b, c in [(1, 1, 1), (2, 3, 5), (0.5, 4, 0.1)]:
        g = HF.diag(a, b, c)
        T = to_reference(theta(unitary_bracket(example6(), g)), g)
        assert np.allclose(T.matrix, np.diag([0, 0, 2 * c * c / (a * b)]), atol=1e-13)


# -- independent oracles ----------------------------------------------------


@pytest.mark.parametrize("seed", range(4))
def test_chern_connection_oracle(seed):
    rng = np.random.default_rng(seed)
    mu = random_in_class(3, 1, rng)
    S, T = oracles.chern_S_and_torsion(mu.full)
    assert np.max(np.abs(S - second_chern_ricci(mu).matrix)) < 1e-12
    assert np.max(np.abs(T - chern_torsion(mu).t)) < 1e-12
    Q = oracles.q_from_torsion(T)
    for a, b in zip(Q, q_tensors(mu, "general")):
        assert np.max(np.abs(a - b.matrix)) < 1e-12


def test_chern_oracle_catalog():
    for name in ["example6", "complex_heisenberg", "kodaira_thurston"]:
        mu = catalog(name).bracket
        S, T = oracles.chern_S_and_torsion(mu.full)
        assert np.max(np.abs(S - second_chern_ricci(mu).matrix)) < 1e-12
        assert np.max(np.abs(T - chern_torsion(mu).t)) < 1e-12


@pytest.mark.parametrize("seed", range(4))
def test_levi_civita_oracle(seed):
    rng = np.random.default_rng(100 + seed)
    mu = random_in_class(3, 1, rng)
    ric, R = oracles.ricci_levi_civita(mu.full)
    assert np.max(np.abs(R - oracles.nilpotent_ricci_real(mu.full))) < 1e-12
    assert np.max(np.abs(ric - ricci_11(mu, "fast").matrix)) < 1e-12
    assert np.max(np.abs(ric - ricci_11(mu, "general").matrix)) < 1e-12


def test_fast_general_agreement_random(rng):
    for _ in range(20):
        n = int(rng.integers(2, 5))
        mu = act(EndoJ(np.linalg.cholesky(random_metric(n, rng).matrix)), random_in_class(n, None, rng))
        sc = bracket_norm2(mu)
        for f in (theta, k_tensor, ricci_11):
            a, b = f(mu, "fast").matrix, f(mu, "general").matrix
            assert np.max(np.abs(a - b)) < 1e-12 * sc
        for a, b in zip(q_tensors(mu, "fast"), q_tensors(mu, "general")):
            assert np.max(np.abs(a.matrix - b.matrix)) < 1e-12 * sc


def test_auto_path_outside_class():
    # 3-step bracket: the closed Ricci formula is not valid, auto picks the Koszul route
    hh = np.zeros((8, 4, 4), complex)
    ha = np.zeros((8, 4, 4), complex)
    hh[2, 0, 1], hh[2, 1, 0] = 1, -1
    hh[3, 0, 2], hh[3, 2, 0] = 1, -1
    mu = BracketTensor(hh, ha)
    ric, _ = oracles.ricci_levi_civita(mu.full)
    assert np.max(np.abs(ricci_11(mu).matrix - ric)) < 1e-12
    S, T = oracles.chern_S_and_torsion(mu.full)
    Q2 = oracles.q_from_torsion(T)[1]
    assert np.max(np.abs(theta(mu).matrix - (S + 0.5 * Q2))) < 1e-12
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        ricci_11(mu, "fast")
    assert any("class" in str(x.message) for x in w)


# -- identities ------------------------------------------------------------


def test_hermitian_outputs(rng):
    mu = random_in_class(4, 2, rng)
    b = curvature_bundle(mu)
    for H in (b.S, b.Q1, b.Q2, b.Q3, b.Q4, b.Theta, b.K, b.Ric11):
        assert np.array_equal(H.matrix, H.matrix.conj().T)


def test_trace_law_and_psd(rng):
    for _ in range(20):
        mu = random_in_class(4, None, rng)
        T = theta(mu)
        assert T.trace == pytest.approx(bracket_norm2(mu) / 4, rel=1e-12)
        assert T.min_eigenvalue > -1e-12 * bracket_norm2(mu)


def test_moment_identities(rng):
    for _ in range(10):
        mu = random_in_class(4, 2, rng)
        E = random_center_hermitian(mu, rng)
        lhs = theta_endomorphism(mu).inner(E)
        assert lhs == pytest.approx(0.5 * bracket_inner(pi_apply(E, mu), mu), rel=1e-10, abs=1e-12)
        F = EndoJ(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
        lhs = p_endomorphism(mu).inner(F)
        assert lhs == pytest.approx(0.25 * bracket_inner(pi_apply(F, mu), mu), rel=1e-10, abs=1e-12)


def test_theta_block_structure(rng):
    mu = random_in_class(4, 2, rng)
    from hcflow.algebra import center, commutator
    W = center(mu).hol_part()
    P = W @ W.conj().T
    T = theta_endomorphism(mu).block
    assert np.max(np.abs(T @ (np.eye(4) - P))) < 1e-12      # vanishes on the complement
    assert np.max(np.abs((np.eye(4) - P) @ T)) < 1e-12      # lands in the center
    # static obstruction: Theta(Z, Zbar) = 0 off the center
    v = (np.eye(4) - P) @ rng.normal(size=4)
    assert abs(v @ theta(mu).matrix @ v.conj()) < 1e-12


def test_p_block_lower_triangular(rng):
    from hcflow.algebra import commutator
    mu = random_in_class(4, 2, rng)
    comm = commutator(mu).basis
    # the derived algebra here is J-invariant: its (1,0) part spans W
    n = 4
    U, _ = np.linalg.qr(comm[:n] @ np.linalg.svd(comm[n:])[2][np.linalg.matrix_rank(comm[n:]):].conj().T)
    P = U @ U.conj().T
    Pb = p_endomorphism(mu).block
    # P maps the derived algebra into itself
    assert np.max(np.abs((np.eye(n) - P) @ Pb @ P)) < 1e-12


def test_equivariance(rng):
    mu0 = random_in_class(3, 1, rng)
    g = random_metric(3, rng)
    A = unitary_transform(g)
    Tg = to_reference(theta(act(A, mu0)), g)
    # same metric via another unitary frame: A' = U A
    U = EndoJ(random_unitary(3, rng))
    mu_u = act(U @ A, mu0)
    B = (U @ A).block
    Tg2 = HermitianForm(B.T @ theta(mu_u).matrix @ B.conj())
    assert np.max(np.abs(Tg.matrix - Tg2.matrix)) < 1e-10 * np.max(np.abs(Tg.matrix))
    # endomorphism form: Theta_mu = A Theta_g A^-1 with Theta_g raised by g
    Theta_g = np.linalg.solve(g.matrix.T, Tg.matrix.T)  # g^{-1} Theta as an endomorphism
    lhs = theta_endomorphism(act(A, mu0)).block
    rhs = A.block @ Theta_g @ np.linalg.inv(A.block)
    assert np.max(np.abs(lhs - rhs)) < 1e-10 * np.max(np.abs(lhs))


# -- balanced criterion ----------------------------------------------------


def test_balanced_example6_diagonal_metrics():
    for d in [(1, 1, 1), (2, 0.5, 3), (7, 1, 0.2)]:
        mu = unitary_bracket(example6(), HF.diag(*d))
        vec, gap = balanced_defect(mu)
        assert np.linalg.norm(vec) < 1e-12 and abs(gap) < 1e-12
        assert np.max(np.abs(k_tensor(mu).matrix - ricci_11(mu).matrix)) < 1e-12


def test_perturbed_example_gap():
    mu = example6_uv(-np.sqrt(2), 1.0)
    vec, gap = balanced_defect(mu)
    expect = np.zeros(6)
    expect[2], expect[5] = 1, -1
    assert np.allclose(vec, expect)
    assert gap == pytest.approx(-0.5, abs=1e-12)
    C = mu.full
    n = 3
    formula = -0.5 * np.einsum("srr,sll->", C[:n, n:, :n], C[n:, :n, n:]).real
    assert gap == pytest.approx(formula)
    assert np.max(np.abs(k_tensor(mu).matrix - ricci_11(mu).matrix)) > 0.1


def test_balanced_rejects_non_unimodular():
    hh = np.zeros((4, 2, 2), complex)
    ha = np.zeros((4, 2, 2), complex)
    # [Z1, Z2] = Z2 : not unimodular
    hh[1, 0, 1], hh[1, 1, 0] = 1, -1
    with pytest.raises(AlgebraError):
        balanced_defect(BracketTensor(hh, ha))


def test_psi_norm_values():
    assert psi_norm(1, HF.identity(3)) == 1
    assert psi_norm(1, HF.diag(2, 3, 5)) == pytest.approx(30 ** -0.5)
    assert psi_norm(2, HF.identity(3) * 4) == pytest.approx(0.25)
