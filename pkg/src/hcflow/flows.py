"""Metric flow, bracket flow and normalized bracket flow.

A metric flow ``g' = -q(g)`` and the bracket flow ``mu' = -pi(q_mu) mu`` are
related through ``g_t = f_t^* g_0`` and ``mu_t = f_t . mu_0``; matching the two
forces ``f' = -(1/2) f q_g``, so the metric at time ``t`` corresponds to the
bracket at time ``t/2``.  :func:`bracket_flow` integrates the bracket equation
as written (which is what yields the decay rates ``-4|Theta|^2`` and
``-8|P|^2``) and :func:`equivalence_check` applies the time map.
"""
from __future__ import annotations

import dataclasses
import time
from typing import Optional

import numpy as np

from . import kernels
from .algebra import (
    BracketTensor,
    ClassProjector,
    EndoJ,
    HermitianForm,
    LieAlgebraSpec,
    bracket_norm2,
    center,
    project_full,
)
from .config import DEFAULT, Tolerances
from .curvature import (
    in_class,
    k_tensor,
    psi_norm,
    ricci_11,
    theta,
    to_reference,
    unitary_bracket,
)
from .errors import HCFlowError, NumericalError
from .integrate import dopri5

DRIVER_KINDS = ("hcf_plus", "hcf", "ric11", "hcf_plus_conformal")
_ALIASES = {"hcf+": "hcf_plus", "iib": "hcf_plus_conformal", "ric": "ric11"}


@dataclasses.dataclass(frozen=True)
class Driver:
    """Which curvature form drives a flow and with what constant factor."""

    kind: str
    scale: float = 1.0

    @classmethod
    def make(cls, kind: str, n: int) -> "Driver":
        kind = _ALIASES.get(kind, kind)
        if kind not in DRIVER_KINDS:
            raise ValueError(f"unknown driver {kind!r}")
        if kind == "hcf_plus_conformal":
            if n < 2:
                raise ValueError("the conformal driver needs n >= 2")
            return cls(kind, 1.0 / (n - 1))
        return cls(kind, 1.0)

    def form(self, mu: BracketTensor, path: str = "auto") -> HermitianForm:
        """Unscaled driving form of a unitary-frame bracket."""
        if self.kind == "hcf":
            return k_tensor(mu, path)
        if self.kind == "ric11":
            return ricci_11(mu, path)
        return theta(mu, path)


@dataclasses.dataclass
class FlowConfig:
    t_max: float = 10.0
    samples: int = 101
    t_eval: Optional[np.ndarray] = None
    tol: Tolerances = DEFAULT
    max_steps: int = 2_000_000
    consecutive: int = 10
    path: str = "auto"

    def times(self) -> np.ndarray:
        if self.t_eval is not None:
            return np.asarray(self.t_eval, dtype=float)
        return np.linspace(0.0, self.t_max, max(int(self.samples), 2))


@dataclasses.dataclass(frozen=True, eq=False)
class FlowState:
    t: float
    g: Optional[HermitianForm] = None
    mu: Optional[BracketTensor] = None
    diagnostics: dict = dataclasses.field(default_factory=dict)


@dataclasses.dataclass(eq=False)
class TimeSeries:
    mode: str
    driver: Driver
    states: list
    reason: str
    stats: dict = dataclasses.field(default_factory=dict)
    limit: Optional["NormalizedLimit"] = None

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    def column(self, key: str) -> np.ndarray:
        return np.array([s.diagnostics[key] for s in self.states])

    @property
    def final(self) -> FlowState:
        return self.states[-1]


# ---------------------------------------------------------------------------
# packing


def _pack_bracket(mu: BracketTensor) -> np.ndarray:
    C = mu.full
    return np.concatenate([C.real.ravel(), C.imag.ravel()])


def _unpack_full(y: np.ndarray, n: int) -> np.ndarray:
    m = 2 * n
    h = m ** 3
    return (y[:h] + 1j * y[h:]).reshape(m, m, m)


def _pack_form(H: np.ndarray) -> np.ndarray:
    return np.concatenate([H.real.ravel(), H.imag.ravel()])


def _unpack_form(y: np.ndarray, n: int) -> np.ndarray:
    return (y[: n * n] + 1j * y[n * n :]).reshape(n, n)


def _endo_full(H: np.ndarray) -> np.ndarray:
    n = H.shape[0]
    F = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    F[:n, :n] = H.T
    F[n:, n:] = H.conj().T
    return F


def _driver_matrix(driver: Driver, C: np.ndarray, n: int, path: str) -> np.ndarray:
    if path == "fast" and driver.kind != "hcf":
        if driver.kind == "ric11":
            return kernels.ricci_form(C, n)
        return kernels.theta_form(C, n)
    return driver.form(BracketTensor.from_full(C), path).matrix


# ---------------------------------------------------------------------------
# diagnostics


def functional_F(nu: BracketTensor) -> float:
    """Scale-invariant functional ``|Theta_nu|^2 / |nu|^4``."""
    n2 = bracket_norm2(nu)
    if n2 == 0.0:
        raise HCFlowError("F is undefined at the zero bracket")
    th = theta(nu).to_endo()
    return th.inner(th) / n2 ** 2


def bracket_diagnostics(mu: BracketTensor, driver: Driver, path: str = "auto") -> dict:
    n2 = bracket_norm2(mu)
    th = theta(mu, path)
    d = {
        "norm2": n2,
        "trace_theta": th.trace,
        "F": th.to_endo().inner(th.to_endo()) / n2 ** 2 if n2 > 0 else 0.0,
    }
    xi = center(mu)
    d["center_dim"] = xi.hol_part().shape[1]
    d["center_real_dim"] = xi.dim
    if driver.kind != "hcf_plus" and driver.kind != "hcf_plus_conformal":
        d["trace_driver"] = driver.form(mu, path).trace
    else:
        d["trace_driver"] = d["trace_theta"]
    return d


def _resolve_path(mu, path):
    if path == "auto":
        return "fast" if in_class(mu) else "general"
    return path


# ---------------------------------------------------------------------------
# flows


def metric_flow(
    spec: LieAlgebraSpec,
    g0: Optional[HermitianForm] = None,
    driver: Driver | str = "hcf_plus",
    config: Optional[FlowConfig] = None,
) -> TimeSeries:
    """Integrate ``g' = -scale * q(g)`` on Hermitian matrices in the reference frame.

    For the conformal driver ``g0`` is the metric of the original flow; the
    rescaled metric ``|Psi|_g0 g0`` is integrated and each sample also carries
    the recovered original metric (``None`` when ``n = 2``, where the conformal
    factor cannot be recovered from the rescaled metric alone).
    """
    config = config or FlowConfig()
    n = spec.n
    driver = Driver.make(driver, n) if isinstance(driver, str) else driver
    g0 = spec.metric if g0 is None else g0
    if not g0.is_positive_definite():
        raise NumericalError("initial metric is not positive definite")
    conformal = driver.kind == "hcf_plus_conformal"
    if conformal:
        g0 = g0 * psi_norm(spec.psi, g0)
    mu0 = spec.bracket
    path = _resolve_path(mu0, config.path)
    tol = config.tol
    wall = time.perf_counter()

    def rhs(t, y):
        H = _unpack_form(y, n)
        g = HermitianForm(H)
        mu = unitary_bracket(mu0, g)
        q = to_reference(HermitianForm(_driver_matrix(driver, mu.full, n, path)), g)
        return _pack_form(-driver.scale * q.matrix)

    def project(y):
        H = _unpack_form(y, n)
        return _pack_form(0.5 * (H + H.conj().T))

    def monitor(t, y, dy):
        lam = np.linalg.eigvalsh(_unpack_form(y, n))[0]
        if lam < tol.metric_degenerate:
            return {"reason": "metric_degenerate", "t": t}
        return None

    res = dopri5(
        rhs, 0.0, _pack_form(g0.matrix), config.times()[-1], config.times(),
        rtol=tol.rtol, atol=tol.atol, project=project, monitor=monitor,
        max_steps=config.max_steps,
    )
    states = []
    for t, y in zip(res.t, res.y):
        g = HermitianForm(_unpack_form(y, n))
        states.append(_metric_state(t, g, spec, driver, path, conformal))
    if res.status == "stopped":
        reason = "metric_degenerate"
        g = HermitianForm(_unpack_form(res.y_final, n))
        if not states or states[-1].t < res.t_final:
            states.append(FlowState(res.t_final, g, None, {"min_eig": g.min_eigenvalue}))
    else:
        reason = "t_max" if res.status == "t_max" else "step_underflow"
    stats = _stats(res, wall)
    return TimeSeries("metric", driver, states, reason, stats)


def recover_conformal(gt: HermitianForm, psi: complex) -> Optional[HermitianForm]:
    """Solve ``gt = |Psi|_g g`` for ``g``; ``None`` when ``n = 2``."""
    n = gt.n
    if n == 2:
        return None
    s = (abs(psi) / np.sqrt(np.prod(gt.eigenvalues))) ** (1.0 / (1.0 - n / 2.0))
    return gt * (1.0 / s)


def _metric_state(t, g, spec, driver, path, conformal):
    d = {"min_eig": g.min_eigenvalue}
    if g.min_eigenvalue > 0:
        mu = unitary_bracket(spec.bracket, g)
        d.update(bracket_diagnostics(mu, driver, path))
    if conformal:
        d["g_original"] = recover_conformal(g, spec.psi)
    return FlowState(float(t), g, None, d)


def _stats(res, wall):
    return {
        "accepted": res.n_accepted,
        "rejected": res.n_rejected,
        "evaluations": res.n_evals,
        "max_drift": res.max_drift,
        "t_final": res.t_final,
        "wall_clock": time.perf_counter() - wall,
    }


def bracket_flow(
    spec: LieAlgebraSpec,
    driver: Driver | str = "hcf_plus",
    config: Optional[FlowConfig] = None,
    mu0: Optional[BracketTensor] = None,
) -> TimeSeries:
    """Integrate ``mu' = -scale * pi(q_mu) mu`` from the unitary-frame bracket.

    The start is ``mu0`` when given, otherwise the bracket in a unitary frame
    of ``spec.metric`` (rescaled by ``|Psi|`` for the conformal driver).
    """
    config = config or FlowConfig()
    n = spec.n
    driver = Driver.make(driver, n) if isinstance(driver, str) else driver
    if mu0 is None:
        g = spec.metric
        if driver.kind == "hcf_plus_conformal":
            g = g * psi_norm(spec.psi, g)
        mu0 = unitary_bracket(spec.bracket, g)
    path = _resolve_path(mu0, config.path)
    tol = config.tol
    wall = time.perf_counter()

    def rhs(t, y):
        C = _unpack_full(y, n)
        E = _endo_full(_driver_matrix(driver, C, n, path))
        return _pack_bracket_full(-driver.scale * kernels.pi_full(E, C))

    proj = ClassProjector(mu0) if path == "fast" else project_full

    def project(y):
        return _pack_bracket_full(proj(_unpack_full(y, n)))

    res = dopri5(
        rhs, 0.0, _pack_bracket(mu0), config.times()[-1], config.times(),
        rtol=tol.rtol, atol=tol.atol, project=project, max_steps=config.max_steps,
    )
    states = []
    for t, y in zip(res.t, res.y):
        mu = BracketTensor.from_full(_unpack_full(y, n))
        states.append(FlowState(float(t), None, mu, bracket_diagnostics(mu, driver, path)))
    reason = "t_max" if res.status == "t_max" else "step_underflow"
    return TimeSeries("bracket", driver, states, reason, _stats(res, wall))


def _pack_bracket_full(C):
    return np.concatenate([C.real.ravel(), C.imag.ravel()])


@dataclasses.dataclass(frozen=True, eq=False)
class NormalizedLimit:
    converged: bool
    t: float
    nu: BracketTensor
    r: float
    r_pairing: float
    velocity: float
    derivation_residual: float
    theta_spectrum: np.ndarray
    F: float


def derivation_residual(E: EndoJ, mu: BracketTensor) -> float:
    """``|pi(E) mu| / (|E| |mu|)``: zero exactly when ``E`` is a derivation."""
    num = np.sqrt(max(bracket_norm2(BracketTensor.from_full(kernels.pi_full(E.full, mu.full))), 0.0))
    den = E.norm * np.sqrt(bracket_norm2(mu))
    return float(num / den) if den > 0 else float(num)


def normalization_rate(nu: BracketTensor, path: str = "fast"):
    """``2 |Theta_nu|^2`` and the pairing ``<pi(Theta_nu) nu, nu>`` at unit norm."""
    th = theta(nu, path).to_endo()
    r = 2.0 * th.inner(th)
    C = nu.full
    pairing = float(np.real(np.vdot(C, kernels.pi_full(th.full, C))))
    return r, pairing


def normalized_bracket_flow(
    spec: LieAlgebraSpec,
    config: Optional[FlowConfig] = None,
    mu0: Optional[BracketTensor] = None,
    g0: Optional[HermitianForm] = None,
) -> TimeSeries:
    """Unit-norm bracket flow ``nu' = -pi(Theta_nu + r_nu Id) nu``, run to a limit.

    Stops once ``|nu'|`` stays below the convergence threshold for
    ``config.consecutive`` accepted steps, or at ``config.t_max``.
    """
    config = config or FlowConfig(t_max=500.0)
    n = spec.n
    if mu0 is None:
        mu0 = unitary_bracket(spec.bracket, spec.metric if g0 is None else g0)
    norm0 = np.sqrt(bracket_norm2(mu0))
    if norm0 <= 0.0:
        raise HCFlowError("the normalized flow is undefined for the zero bracket")
    nu0 = mu0 / norm0
    path = _resolve_path(nu0, config.path)
    tol = config.tol
    driver = Driver("hcf_plus")
    wall = time.perf_counter()
    streak = [0]
    r_gap = [0.0]

    def rhs(t, y):
        C = _unpack_full(y, n)
        H = kernels.theta_form(C, n) if path == "fast" else theta(BracketTensor.from_full(C), path).matrix
        E = _endo_full(H)
        th = EndoJ(H.T)
        r = 2.0 * th.inner(th)
        return _pack_bracket_full(-kernels.pi_full(E, C) + r * C)

    proj = ClassProjector(nu0) if path == "fast" else project_full

    def project(y):
        C = proj(_unpack_full(y, n))
        return _pack_bracket_full(C / np.sqrt(kernels.norm2(C)))

    def monitor(t, y, dy):
        v = float(np.sqrt(np.sum(dy * dy)))
        if v < tol.convergence:
            streak[0] += 1
        else:
            streak[0] = 0
        if streak[0] >= config.consecutive:
            return {"t": t, "velocity": v}
        return None

    times = config.times()
    res = dopri5(
        rhs, 0.0, _pack_bracket(nu0), times[-1], times,
        rtol=tol.rtol, atol=tol.atol, project=project, monitor=monitor,
        max_steps=config.max_steps,
    )
    states = []
    for t, y in zip(res.t, res.y):
        nu = BracketTensor.from_full(_unpack_full(y, n))
        states.append(FlowState(float(t), None, nu, bracket_diagnostics(nu, driver, path)))
    nu_f = BracketTensor.from_full(_unpack_full(res.y_final, n))
    if not states or states[-1].t < res.t_final:
        states.append(FlowState(res.t_final, None, nu_f, bracket_diagnostics(nu_f, driver, path)))
    r, pairing = normalization_rate(nu_f, path)
    th = theta(nu_f, path)
    dy = rhs(res.t_final, res.y_final)
    limit = NormalizedLimit(
        converged=res.status == "stopped",
        t=res.t_final,
        nu=nu_f,
        r=r,
        r_pairing=pairing,
        velocity=float(np.sqrt(np.sum(dy * dy))),
        derivation_residual=derivation_residual(th.to_endo() + EndoJ.identity(n) * r, nu_f),
        theta_spectrum=np.sort(th.eigenvalues),
        F=functional_F(nu_f),
    )
    reason = {"stopped": "converged", "t_max": "t_max"}.get(res.status, "step_underflow")
    return TimeSeries("normalized", driver, states, reason, _stats(res, wall), limit)


@dataclasses.dataclass(frozen=True)
class EquivalenceReport:
    driver: str
    times: np.ndarray
    norm_discrepancy: float
    spectrum_discrepancy: float
    max_discrepancy: float
    metric_reason: str
    bracket_reason: str


def equivalence_check(
    spec: LieAlgebraSpec,
    g0: Optional[HermitianForm] = None,
    driver: Driver | str = "hcf_plus",
    config: Optional[FlowConfig] = None,
) -> EquivalenceReport:
    """Compare gauge-invariant data of the metric flow at ``t`` and the bracket flow at ``t/2``."""
    config = config or FlowConfig(t_max=5.0, samples=51)
    n = spec.n
    driver = Driver.make(driver, n) if isinstance(driver, str) else driver
    g0 = spec.metric if g0 is None else g0
    times = config.times()
    mcfg = dataclasses.replace(config, t_eval=times)
    bcfg = dataclasses.replace(config, t_eval=times / 2.0)
    ms = metric_flow(spec, g0, driver, mcfg)
    g_start = g0 * psi_norm(spec.psi, g0) if driver.kind == "hcf_plus_conformal" else g0
    bs = bracket_flow(spec, driver, bcfg, mu0=unitary_bracket(spec.bracket, g_start))
    path = _resolve_path(spec.bracket, config.path)
    dn = ds = 0.0
    for sm, sb in zip(ms.states, bs.states):
        mu_m = unitary_bracket(spec.bracket, sm.g)
        dn = max(dn, abs(np.sqrt(bracket_norm2(mu_m)) - np.sqrt(bracket_norm2(sb.mu))))
        em = np.linalg.eigvalsh(driver.form(mu_m, path).matrix)
        eb = np.linalg.eigvalsh(driver.form(sb.mu, path).matrix)
        ds = max(ds, float(np.max(np.abs(em - eb), initial=0.0)))
    if len(ms.states) != len(bs.states):
        dn = ds = float("inf")
    return EquivalenceReport(driver.kind, times, dn, ds, max(dn, ds), ms.reason, bs.reason)
