import numpy as np
import pytest

import oracles
from hcflow.algebra import BracketTensor, ClassProjector, EndoJ, HermitianForm, LieAlgebraSpec, bracket_inner, bracket_norm2
from hcflow.catalog import catalog, example6
from hcflow.curvature import p_endomorphism, theta_endomorphism, unitary_bracket
from hcflow.errors import HCFlowError, NumericalError
from hcflow.flows import (
    Driver,
    FlowConfig,
    bracket_flow,
    equivalence_check,
    functional_F,
    metric_flow,
    normalized_bracket_flow,
    recover_conformal,
)
from hcflow.integrate import dopri5
from hcflow.sampling import random_in_class, random_metric


def g33(series):
    return np.array([s.g.matrix[2, 2].real for s in series.states])


def test_example6_closed_form(ex6):
    ts = metric_flow(ex6, None, "hcf_plus", FlowConfig(t_max=1.0, samples=11))
    assert g33(ts)[-1] == pytest.approx(1 / 3, abs=1e-6)
    assert np.max(np.abs(g33(ts) - 1 / (2 * ts.times + 1))) < 1e-7
    for s in ts.states:
        assert np.allclose(s.g.matrix[:2, :2], np.eye(2))


@pytest.mark.parametrize("a,b,c", [(2.0, 0.5, 1.0), (1.0, 3.0, 2.0)])
def test_example6_diagonal_ode(ex6, a, b, c):
    ts = metric_flow(ex6, HermitianForm.diag(a, b, c), "hcf+", FlowConfig(t_max=3.0, samples=31))
    exact = c / (1 + 2 * c * ts.times / (a * b))
    assert np.max(np.abs(g33(ts) - exact)) < 1e-7
    assert all(abs(s.g.matrix[0, 0] - a) < 1e-12 and abs(s.g.matrix[1, 1] - b) < 1e-12 for s in ts.states)


@pytest.mark.parametrize("driver", ["hcf_plus", "hcf", "ric11", "hcf_plus_conformal"])
def test_abelian_stationary(driver, rng):
    spec = catalog("abelian(3)")
    g0 = random_metric(3, rng)
    ts = metric_flow(spec, g0, driver, FlowConfig(t_max=2.0, samples=5))
    gconst = ts.states[0].g.matrix
    assert all(np.array_equal(s.g.matrix, gconst) for s in ts.states)
    bs = bracket_flow(spec, driver, FlowConfig(t_max=2.0, samples=5))
    assert all(s.diagnostics["norm2"] == 0 for s in bs.states)


def test_bracket_example6_closed_form(ex6):
    # uniform scaling mu_t = mu_0 / sqrt(4t + 1)
    ts = bracket_flow(ex6, "hcf+", FlowConfig(t_max=2.0, samples=21))
    exact = 8 / (4 * ts.times + 1)
    assert np.max(np.abs(ts.column("norm2") - exact) / exact) < 1e-6


def _decay_check(spec, driver, factor, endo):
    h = 1e-3
    t = np.arange(0, 2.0 + h / 2, h)
    ts = bracket_flow(spec, driver, FlowConfig(t_eval=t))
    n2 = ts.column("norm2")
    fd = (n2[2:] - n2[:-2]) / (2 * h)
    pred = np.array([-factor * endo(s.mu).inner(endo(s.mu)) for s in ts.states[1:-1]])
    return np.max(np.abs(fd - pred) / np.abs(pred))


@pytest.mark.parametrize("name", ["example6", "complex_heisenberg"])
def test_decay_laws(name):
    spec = catalog(name)
    assert _decay_check(spec, "hcf+", 4.0, theta_endomorphism) < 1e-4
    assert _decay_check(spec, "ric11", 8.0, p_endomorphism) < 1e-4


def test_norm_non_increasing_random(rng):
    mu = random_in_class(4, 2, rng)
    spec = LieAlgebraSpec.build("r", mu)
    ts = bracket_flow(spec, "hcf+", FlowConfig(t_max=5.0, samples=51))
    assert np.all(np.diff(ts.column("norm2")) <= 1e-12)
    assert ts.stats["max_drift"] < 1e-10


def test_normalized_example6_stationary(ex6):
    ts = normalized_bracket_flow(ex6, FlowConfig(t_max=500.0, samples=3))
    L = ts.limit
    assert ts.reason == "converged" and L.converged
    assert np.allclose(L.theta_spectrum, [0, 0, 0.25], atol=1e-14)
    assert L.r == pytest.approx(0.25) and L.r_pairing == pytest.approx(0.25)
    assert L.velocity < 1e-12 and L.derivation_residual < 1e-12


def test_normalized_rejects_zero():
    with pytest.raises(HCFlowError):
        normalized_bracket_flow(catalog("abelian(2)"))


def test_normalized_heisenberg_from_random_metric(heis, rng):
    ts = normalized_bracket_flow(heis, FlowConfig(t_max=500.0, samples=51), g0=random_metric(3, rng))
    L = ts.limit
    assert L.converged and L.derivation_residual < 1e-6
    assert np.all(np.abs(ts.column("norm2") - 1) < 1e-8)
    assert np.all(np.diff(ts.column("F")) <= 1e-12)
    assert L.r == pytest.approx(L.r_pairing, rel=1e-10)


def test_normalized_random_class_bracket(rng):
    mu = random_in_class(4, 2, rng)
    spec = LieAlgebraSpec.build("r", mu)
    ts = normalized_bracket_flow(spec, FlowConfig(t_max=200.0, samples=41))
    F = ts.column("F")
    assert np.all(np.diff(F) <= 1e-12) and F[-1] < F[0]
    assert np.all(np.abs(ts.column("norm2") - 1) < 1e-8)
    assert ts.limit.velocity < 1e-6
    assert ts.limit.derivation_residual < 1e-5


def test_functional_F_values(ex6, heis):
    assert functional_F(ex6.bracket) == pytest.approx(1 / 8)
    assert functional_F(heis.bracket) == pytest.approx(1 / 8)
    assert functional_F(ex6.bracket * 3.0) == pytest.approx(1 / 8)
    with pytest.raises(HCFlowError):
        functional_F(BracketTensor.zero(2))


def test_gradient_direction(rng):
    """The normalized velocity is minus half the sphere gradient of F within the class."""
    for _ in range(3):
        mu = random_in_class(4, 2, rng)
        nu = mu / np.sqrt(bracket_norm2(mu))
        P = ClassProjector(nu)
        th = theta_endomorphism(nu)
        r = 2 * th.inner(th)
        from hcflow.algebra import pi_apply
        vel = -pi_apply(th, nu).full + r * nu.full
        # orthonormal-ish sampling of tangent directions inside the class
        h = 1e-5
        grad = np.zeros_like(nu.full)
        dirs = []
        for _ in range(40):
            X = P(rng.normal(size=nu.full.shape) + 1j * rng.normal(size=nu.full.shape))
            X = X - np.real(np.vdot(nu.full, X)) * nu.full
            X = X / np.sqrt(np.real(np.vdot(X, X)))
            dirs.append(X)
        # least squares fit of the gradient from directional derivatives
        D = np.array([np.concatenate([X.real.ravel(), X.imag.ravel()]) for X in dirs])
        dd = []
        for X in dirs:
            fp = functional_F(BracketTensor.from_full(nu.full + h * X))
            fm = functional_F(BracketTensor.from_full(nu.full - h * X))
            dd.append((fp - fm) / (2 * h))
        v = np.concatenate([vel.real.ravel(), vel.imag.ravel()])
        pred = D @ v
        dd = np.array(dd)
        assert np.dot(pred, dd) <= 0
        assert np.max(np.abs(dd + 2 * pred)) < 1e-3 * np.max(np.abs(dd))


def test_asymptotics_and_immortality(ex6, heis, kt, rng):
    for spec in (ex6, heis, kt):
        ts = bracket_flow(spec, "hcf+", FlowConfig(t_eval=np.linspace(0, 100, 101)))
        assert ts.reason == "t_max"
        late = ts.times >= 10
        tn = ts.times[late] * ts.column("norm2")[late]
        assert np.all((tn > 0.01) & (tn < 100))
        ms = metric_flow(spec, random_metric(spec.n, rng), "hcf+", FlowConfig(t_max=100.0, samples=11))
        assert ms.reason == "t_max" and all(s.g.min_eigenvalue > 0 for s in ms.states)


@pytest.mark.parametrize("driver", ["hcf+", "hcf", "ric11", "iib"])
def test_equivalence(ex6, driver):
    rep = equivalence_check(ex6, None, driver, FlowConfig(t_max=5.0, samples=26))
    assert rep.max_discrepancy < 1e-6


def test_equivalence_random_metric(heis, rng):
    rep = equivalence_check(heis, random_metric(3, rng), "hcf+", FlowConfig(t_max=2.0, samples=11))
    assert rep.max_discrepancy < 1e-6


def test_equivalence_abelian():
    rep = equivalence_check(catalog("abelian(2)"), None, "hcf+", FlowConfig(t_max=1.0, samples=5))
    assert rep.max_discrepancy == 0


def test_conformal_recovery(ex6, rng):
    spec = LieAlgebraSpec.build("ex6psi", ex6.bracket, psi=2.0 + 1.0j)
    g0 = random_metric(3, rng)
    ts = metric_flow(spec, g0, "iib", FlowConfig(t_max=1.0, samples=3))
    from hcflow.curvature import psi_norm
    g_orig = ts.states[0].diagnostics["g_original"]
    assert np.max(np.abs(g_orig.matrix - g0.matrix)) < 1e-12
    for s in ts.states:
        go = s.diagnostics["g_original"]
        assert np.max(np.abs(go.matrix * psi_norm(spec.psi, go) - s.g.matrix)) < 1e-12
    assert recover_conformal(HermitianForm.identity(2), 1.0) is None
    assert Driver.make("iib", 3).scale == 0.5


def test_metric_flow_rejects_indefinite(ex6):
    with pytest.raises(NumericalError):
        metric_flow(ex6, HermitianForm.diag(1, -1, 1))


def test_unknown_driver():
    with pytest.raises(ValueError):
        Driver.make("bismut", 3)


def test_dopri5_against_rk4():
    A = np.array([[-0.3, 1.0], [-1.0, -0.1]])
    f = lambda t, y: A @ y + np.sin(t) * np.array([0.0, 1.0])
    r = dopri5(f, 0.0, np.array([1.0, 0.0]), 5.0, np.array([0.0, 5.0]))
    ref = oracles.integrate_rk4(f, [1.0, 0.0], 5.0, 20000)
    assert np.max(np.abs(r.y[-1] - ref)) < 1e-7


def test_dopri5_monitor_and_rejection():
    calls = []

    def f(t, y):
        if y[0] < 0.05:
            raise NumericalError("left the domain")
        return -y

    r = dopri5(f, 0.0, np.array([1.0]), 10.0, monitor=lambda t, y, dy: (calls.append(t) or y[0] < 0.1) and {"t": t})
    assert r.status == "stopped" and r.y_final[0] < 0.1
    assert r.stop_info["t"] == calls[-1]
