"""Derivations, soliton fitting and uniqueness checks."""
from __future__ import annotations

import dataclasses
import itertools
from typing import Optional

import numpy as np

from . import kernels
from .algebra import BracketTensor, EndoJ, HermitianForm, LieAlgebraSpec, null_space
from .config import DEFAULT, Tolerances
from .curvature import psi_norm, theta, unitary_bracket
from .flows import FlowConfig, derivation_residual, normalized_bracket_flow
from .sampling import endo_basis, random_metric, rng_from


def _pi_columns(mu: BracketTensor, family) -> np.ndarray:
    cols = [kernels.pi_full(E.full, mu.full).ravel() for E in family]
    M = np.array(cols).T
    return np.concatenate([M.real, M.imag])


def _combine(coeff, family) -> EndoJ:
    n = family[0].n
    B = np.zeros((n, n), complex)
    for c, E in zip(coeff, family):
        B = B + c * E.block
    return EndoJ(B)


def derivation_space(mu: BracketTensor, cutoff: float = DEFAULT.null_space) -> list:
    """Basis of the J-commuting derivations, orthonormal for the trace form."""
    family = endo_basis(mu.n)
    N = null_space(_pi_columns(mu, family), cutoff)
    # unit blocks have trace-form norm sqrt(2)
    return [_combine(v / np.sqrt(2.0), family) for v in N.T]


def hermitian_basis(n: int) -> list:
    out = []
    for l in range(n):
        B = np.zeros((n, n), complex)
        B[l, l] = 1.0
        out.append(EndoJ(B))
        for j in range(l + 1, n):
            B = np.zeros((n, n), complex)
            B[l, j] = B[j, l] = 1.0
            out.append(EndoJ(B))
            B = np.zeros((n, n), complex)
            B[l, j], B[j, l] = 1j, -1j
            out.append(EndoJ(B))
    return out


def symmetric_derivations(mu: BracketTensor, cutoff: float = DEFAULT.null_space) -> list:
    family = hermitian_basis(mu.n)
    N = null_space(_pi_columns(mu, family), cutoff)
    return [_combine(v, family) for v in N.T]


def _vec(E: EndoJ) -> np.ndarray:
    # coordinates in which the Euclidean norm is the trace-form norm
    b = np.sqrt(2.0) * E.block.ravel()
    return np.concatenate([b.real, b.imag])


@dataclasses.dataclass(frozen=True, eq=False)
class IIBData:
    """Soliton constants of the rescaled metric ``|Psi| g`` under the conformal flow."""

    psi_norm: float
    c: float
    D: EndoJ


@dataclasses.dataclass(frozen=True, eq=False)
class SolitonReport:
    c: float
    D: EndoJ
    residual: float
    derivation_residual_of_Dt: float
    classification: str
    algebraic: bool
    c_algebraic: Optional[float]
    D_symmetric: Optional[EndoJ]
    theta: EndoJ
    iib: Optional[IIBData] = None

    def summary(self) -> dict:
        out = {
            "c": self.c,
            "residual": self.residual,
            "derivation_residual_of_Dt": self.derivation_residual_of_Dt,
            "classification": self.classification,
            "algebraic": self.algebraic,
            "c_algebraic": self.c_algebraic,
            "D": self.D.block,
            "theta_trace": self.theta.trace.real,
        }
        if self.iib is not None:
            out["iib"] = {"psi_norm": self.iib.psi_norm, "c": self.iib.c, "D": self.iib.D.block}
        return out


def _fit(T: EndoJ, family):
    """Least squares ``T ~ c Id + sum a_i F_i``; returns ``(c, a, residual vector)``."""
    n = T.n
    cols = [_vec(EndoJ.identity(n))] + [_vec(F) for F in family]
    A = np.array(cols).T
    y = _vec(T)
    x, *_ = np.linalg.lstsq(A, y, rcond=None)
    return x[0], x[1:], y - A @ x


def fit_bracket(mu: BracketTensor, tol: Tolerances = DEFAULT) -> SolitonReport:
    """Fit ``Theta = c Id + (D + D^t)/2`` for a bracket in a unitary frame."""
    n = mu.n
    T = theta(mu).to_endo()
    tnorm = T.norm
    scale = tnorm if tnorm > 0 else 1.0
    ders = derivation_space(mu, tol.null_space)
    c, a, r = _fit(T, [D.sym() for D in ders])
    D = _combine(a, ders) if ders else EndoJ.zero(n)
    residual = float(np.linalg.norm(r)) / scale
    dres = derivation_residual(D.transpose(), mu) if D.norm > 0 else 0.0
    syms = symmetric_derivations(mu, tol.null_space)
    c_alg, a_alg, r_alg = _fit(T, syms)
    alg_ok = float(np.linalg.norm(r_alg)) / scale < tol.soliton
    D_sym = _combine(a_alg, syms) if syms else EndoJ.zero(n)
    if residual >= tol.soliton:
        cls = "none"
    elif abs(c) <= tol.soliton * scale:
        cls = "steady"
    else:
        cls = "expanding" if c < 0 else "shrinking"
    return SolitonReport(
        float(c), D, residual, float(dres), cls, bool(alg_ok),
        float(c_alg) if alg_ok else None, D_sym if alg_ok else None, T,
    )


def soliton_fit(spec: LieAlgebraSpec, g: Optional[HermitianForm] = None, tol: Tolerances = DEFAULT) -> SolitonReport:
    """Semi-algebraic soliton fit at ``g``; ``D`` is returned in the ``g``-unitary frame.

    The report also carries the data for the rescaled metric ``|Psi|_g g`` with
    the conformal rate ``1/(n-1)``: there ``c`` becomes ``c / (|Psi| (n-1))``.
    """
    g = spec.metric if g is None else g
    rep = fit_bracket(unitary_bracket(spec.bracket, g), tol)
    if spec.n >= 2:
        s = psi_norm(spec.psi, g)
        k = 1.0 / (s * (spec.n - 1))
        rep = dataclasses.replace(rep, iib=IIBData(s, rep.c * k, rep.D * k))
    return rep


def static_residual(spec: LieAlgebraSpec, g: Optional[HermitianForm] = None) -> float:
    """``min_c |Theta_g - c g| / |Theta_g|`` (0 when ``Theta_g`` vanishes)."""
    g = spec.metric if g is None else g
    T = theta(unitary_bracket(spec.bracket, g)).to_endo()
    if T.norm == 0.0:
        return 0.0
    c = T.trace.real / T.n
    return (T - EndoJ.identity(T.n) * c).norm / T.norm


def algebraic_promotion_check(report: SolitonReport, spec=None, g=None, tol: Tolerances = DEFAULT) -> bool:
    """``D^t`` is a derivation and a symmetric-derivation fit gives the same ``c``."""
    if report.residual >= tol.soliton:
        return False
    if report.derivation_residual_of_Dt >= tol.derivation:
        return False
    if not report.algebraic:
        return False
    scale = max(report.theta.norm, 1.0)
    return abs(report.c_algebraic - report.c) < tol.soliton * scale


@dataclasses.dataclass(frozen=True, eq=False)
class MultistartReport:
    limits: list
    spectra: np.ndarray
    max_discrepancy: float
    all_converged: bool
    reports: list


def multistart(
    spec: LieAlgebraSpec, k: int = 5, seed=0, config: Optional[FlowConfig] = None,
    tol: Tolerances = DEFAULT,
) -> MultistartReport:
    """Normalized-flow limits from ``k`` random metrics and their soliton fits."""
    rng = rng_from(seed)
    config = config or FlowConfig(t_max=500.0, samples=2)
    limits, reports = [], []
    for _ in range(k):
        g = random_metric(spec.n, rng)
        lim = normalized_bracket_flow(spec, config, g0=g).limit
        limits.append(lim)
        reports.append(fit_bracket(lim.nu, tol))
    spectra = np.array([lim.theta_spectrum for lim in limits])
    disc = max(
        (float(np.max(np.abs(a - b))) for a, b in itertools.combinations(spectra, 2)),
        default=0.0,
    )
    return MultistartReport(limits, spectra, disc, all(l.converged for l in limits), reports)
