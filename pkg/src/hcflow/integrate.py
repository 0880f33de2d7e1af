"""Dormand-Prince 5(4) integrator with dense output and manifold projection.

SciPy's ``solve_ivp`` does not allow modifying the state between accepted
steps, which the flows need to remove drift off their invariant sets, so the
stepper is implemented here.
"""
from __future__ import annotations

import dataclasses
from typing import Callable, Optional

import numpy as np

from .errors import NumericalError

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)
# continuous extension: y(t + s h) = y + h * K^T P [s, s^2, s^3, s^4]
_P = np.array(
    [
        [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0, 0, 0, 0],
        [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)


@dataclasses.dataclass
class IntegrationResult:
    t: np.ndarray
    y: np.ndarray            # one row per entry of t
    status: str              # "t_max", "stopped" or "step_underflow"
    t_final: float
    y_final: np.ndarray
    n_accepted: int = 0
    n_rejected: int = 0
    n_evals: int = 0
    max_drift: float = 0.0
    stop_info: object = None


def _rms(x):
    return float(np.sqrt(np.mean(x * x))) if x.size else 0.0


def dopri5(
    f: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    y0: np.ndarray,
    t_end: float,
    t_eval: Optional[np.ndarray] = None,
    *,
    rtol: float = 1e-8,
    atol: float = 1e-10,
    project: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    monitor: Optional[Callable[[float, np.ndarray, np.ndarray], object]] = None,
    h0: Optional[float] = None,
    max_steps: int = 1_000_000,
) -> IntegrationResult:
    """Integrate ``y' = f(t, y)`` from ``t0`` to ``t_end``.

    ``project`` maps an accepted state back onto the invariant set; the size
    of that correction is reported as ``max_drift``.  ``monitor(t, y, dy)`` is
    called after every accepted step with the projected state and its
    derivative; a truthy return value stops the integration and is stored in
    ``stop_info``.  ``f`` may raise :class:`NumericalError`, which rejects the
    current trial step.
    """
    y = np.array(y0, dtype=float)
    if project is not None:
        y = project(y)
    t = float(t0)
    t_eval = np.array([t] if t_eval is None else t_eval, dtype=float)
    if np.any(np.diff(t_eval) <= 0):
        raise ValueError("sample times must be strictly increasing")
    out_t, out_y = [], []
    idx = 0
    while idx < len(t_eval) and t_eval[idx] <= t:
        out_t.append(t_eval[idx])
        out_y.append(y.copy())
        idx += 1

    res = IntegrationResult(np.array([]), np.array([]), "t_max", t, y)
    k1 = f(t, y)
    res.n_evals += 1
    span = t_end - t
    if span <= 0:
        res.t, res.y = np.array(out_t), np.array(out_y).reshape(len(out_t), -1)
        return res
    if h0 is None:
        sc = atol + rtol * np.abs(y)
        d0, d1 = _rms(y / sc), _rms(k1 / sc)
        h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h = min(h, span)
    else:
        h = min(h0, span)
    err_prev = 1e-4
    K = np.empty((7, y.size))
    rejected_last = False
    for _ in range(max_steps):
        if t >= t_end:
            break
        hmin = 1e-14 * max(1.0, abs(t))
        if h < hmin:
            res.status = "step_underflow"
            break
        h = min(h, t_end - t)
        K[0] = k1
        ok = True
        try:
            for s in range(1, 7):
                ys = y + h * (np.asarray(_A[s]) @ K[:s])
                K[s] = f(t + _C[s] * h, ys)
            res.n_evals += 6
            ok = bool(np.all(np.isfinite(K)))
        except NumericalError:
            ok = False
        if ok:
            y_new = y + h * (_B @ K)
            sc = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err = _rms(h * (_E @ K) / sc)
        if not ok or not np.isfinite(err):
            res.n_rejected += 1
            h *= 0.25
            rejected_last = True
            continue
        if err > 1.0:
            res.n_rejected += 1
            h *= max(0.2, 0.9 * err ** -0.2)
            rejected_last = True
            continue
        # accepted
        t_new = t + h
        while idx < len(t_eval) and t_eval[idx] <= t_new + 1e-15 * max(1.0, abs(t_new)):
            s = (t_eval[idx] - t) / h
            ys = y + h * (K.T @ (_P @ np.array([s, s * s, s ** 3, s ** 4])))
            out_t.append(t_eval[idx])
            out_y.append(project(ys) if project is not None else ys)
            idx += 1
        if project is not None:
            y_proj = project(y_new)
            res.max_drift = max(res.max_drift, float(np.max(np.abs(y_proj - y_new), initial=0.0)))
            y_new = y_proj
            k1 = f(t_new, y_new)
            res.n_evals += 1
        else:
            k1 = K[6].copy()
        t, y = t_new, y_new
        res.n_accepted += 1
        if monitor is not None:
            info = monitor(t, y, k1)
            if info:
                res.status = "stopped"
                res.stop_info = info
                break
        fac = 0.9 * max(err, 1e-10) ** -0.17 * err_prev ** 0.04
        fac = min(10.0, max(0.2, fac))
        if rejected_last:
            fac = min(fac, 1.0)
        h *= fac
        err_prev = max(err, 1e-4)
        rejected_last = False
    else:
        res.status = "step_underflow"
    res.t = np.array(out_t)
    res.y = np.array(out_y).reshape(len(out_t), -1)
    res.t_final, res.y_final = t, y
    return res
