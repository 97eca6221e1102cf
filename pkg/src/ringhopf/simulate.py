"""Fixed-step integration of ring-network ODEs.

Classical RK4 on a uniform grid; phase extraction downstream needs the
uniform sampling, so there is no adaptive stepping. Fields with a
polynomial kernel form run through the compiled inner loops of
``_kernels``; everything else (expressions, multidimensional nodes) falls
back to the generic evaluator. A divergence guard aborts runaway
trajectories.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import IO

import numpy as np

from . import _kernels
from ._kernels import DIVERGENCE_GUARD, STATUS_DIVERGED, STATUS_NONFINITE
from .errors import ConfigError, Diverged, NonFinite, WindowTooShort
from .ring_model import RingNetwork, VectorField


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled solution: row i of states is x(times[i])."""

    times: np.ndarray
    states: np.ndarray
    network: RingNetwork
    params: dict

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0])

    def channel(self, j: int) -> np.ndarray:
        return self.states[:, j]


def _raise_for_status(status: int, step: int, h: float):
    if status == STATUS_NONFINITE:
        raise NonFinite(f"NaN/Inf at t = {step * h:.6g}")
    if status == STATUS_DIVERGED:
        raise Diverged(f"|x| exceeded {DIVERGENCE_GUARD:g} at t = {step * h:.6g}")


def _check_state(x: np.ndarray, t: float):
    if not np.all(np.isfinite(x)):
        raise NonFinite(f"NaN/Inf at t = {t:.6g}")
    if np.max(np.abs(x)) > DIVERGENCE_GUARD:
        raise Diverged(f"|x| exceeded {DIVERGENCE_GUARD:g} at t = {t:.6g}")


def _generic_rk4(vf: VectorField, x: np.ndarray, lam: float, h: float,
                 nsteps: int, out: np.ndarray | None):
    if out is not None:
        out[0] = x
    for step in range(nsteps):
        k1 = vf.evaluate(x, lam)
        k2 = vf.evaluate(x + 0.5 * h * k1, lam)
        k3 = vf.evaluate(x + 0.5 * h * k2, lam)
        k4 = vf.evaluate(x + h * k3, lam)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if out is not None:
            out[step + 1] = x
        _check_state(x, (step + 1) * h)
    return x


def _run(vf: VectorField, x: np.ndarray, lam: float, h: float,
         nsteps: int, out: np.ndarray | None) -> np.ndarray:
    kernel = vf.kernel_arrays(lam)
    if kernel is None:
        return _generic_rk4(vf, x, lam, h, nsteps, out)
    offsets, weights, quad, cubic = kernel
    x = x.copy()
    if out is None:
        status, steps = _kernels.rk4_transient(offsets, weights, quad, cubic,
                                               x, h, nsteps)
    else:
        status, steps = _kernels.rk4_record(offsets, weights, quad, cubic,
                                            x, h, nsteps, out)
    _raise_for_status(status, steps, h)
    return x


def integrate(vf: VectorField, x0, lam: float, t_end: float, h: float) -> Trajectory:
    """Integrate dx/dt = f(x, lam) over [0, t_end] with step h.

    t_end is rounded to a whole number of steps. The global error is
    O(h^4); see the step-halving checks in the test suite.
    """
    x0 = np.asarray(x0, dtype=float)
    if h <= 0.0 or t_end <= 0.0:
        raise ConfigError(f"need h > 0 and t_end > 0, got h={h}, t_end={t_end}")
    if not np.all(np.isfinite(x0)):
        raise ConfigError("initial state must be finite")
    if x0.shape != (vf.dim,):
        x0 = x0.reshape(vf.dim)
    nsteps = max(1, int(round(t_end / h)))
    out = np.empty((nsteps + 1, vf.dim))
    _run(vf, x0, lam, h, nsteps, out)
    times = np.arange(nsteps + 1) * h
    return Trajectory(times, out, vf.network, _param_snapshot(vf, lam))


def settle_and_sample(
    vf: VectorField,
    x0,
    lam: float,
    transient: float,
    window: float,
    h: float,
    expected_period: float | None = None,
) -> Trajectory:
    """Integrate through a transient, then return only the final window.

    When the limiting period is known, the window must cover at least five
    of them so that downstream period estimation has enough cycles.
    """
    if window <= 0.0 or transient < 0.0 or h <= 0.0:
        raise ConfigError(
            f"need window > 0, transient >= 0, h > 0; got {window}, {transient}, {h}")
    if expected_period is not None and window < 5.0 * expected_period:
        raise WindowTooShort(
            f"window {window:g} shorter than 5 periods ({5.0 * expected_period:g})")
    x = np.asarray(x0, dtype=float).reshape(vf.dim)
    if not np.all(np.isfinite(x)):
        raise ConfigError("initial state must be finite")
    t0 = 0.0
    n_trans = int(round(transient / h))
    if n_trans > 0:
        x = _run(vf, x, lam, h, n_trans, None)
        t0 = n_trans * h
    n_win = max(1, int(round(window / h)))
    out = np.empty((n_win + 1, vf.dim))
    _run(vf, x, lam, h, n_win, out)
    times = t0 + np.arange(n_win + 1) * h
    return Trajectory(times, out, vf.network, _param_snapshot(vf, lam))


def time_mirrored(tr: Trajectory) -> Trajectory:
    """The window read backwards: a trajectory of the negated field."""
    return Trajectory(tr.times.copy(), tr.states[::-1].copy(),
                      tr.network, dict(tr.params))


def _param_snapshot(vf: VectorField, lam: float) -> dict:
    snap = dict(vf.params)
    snap[vf.bifurcation_param] = float(lam)
    return snap


def trajectory_to_csv(tr: Trajectory, fh: IO[str]) -> None:
    """Write `t,x0,x1,...` rows with full round-trip precision."""
    dim = tr.states.shape[1]
    fh.write("t," + ",".join(f"x{j}" for j in range(dim)) + "\n")
    for t, row in zip(tr.times, tr.states):
        fh.write(format(t, ".17g") + ","
                 + ",".join(format(v, ".17g") for v in row) + "\n")
