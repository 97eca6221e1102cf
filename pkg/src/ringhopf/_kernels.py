"""RK4 inner loops for scalar ring fields.

The right-hand side is rhs_c = quad*x_c^2 + cubic*x_c^3 + sum_t w_t *
x_{c+off_t}, the polynomial kernel form shared by every built-in model.
Numba-compiled loops are used when available; a pure-numpy fallback steps
with identical arithmetic. Select explicitly with RINGHOPF_BACKEND=numpy
or RINGHOPF_BACKEND=numba (default: numba when importable).
"""
from __future__ import annotations

import os

import numpy as np

STATUS_OK = 0
STATUS_DIVERGED = 1
STATUS_NONFINITE = 2

DIVERGENCE_GUARD = 1e6


# ------------------------------------------------------------------
# pure-numpy path
# ------------------------------------------------------------------

def _rhs_np(offsets, weights, quad, cubic, x):
    acc = quad * x * x + cubic * x * x * x
    for t in range(offsets.shape[0]):
        acc = acc + weights[t] * np.roll(x, -int(offsets[t]))
    return acc


def _check_np(x):
    if not np.all(np.isfinite(x)):
        return STATUS_NONFINITE
    if np.max(np.abs(x)) > DIVERGENCE_GUARD:
        return STATUS_DIVERGED
    return STATUS_OK


def rk4_transient_np(offsets, weights, quad, cubic, x, h, nsteps):
    """Advance x in place by nsteps without recording. Returns (status, steps)."""
    for step in range(nsteps):
        k1 = _rhs_np(offsets, weights, quad, cubic, x)
        k2 = _rhs_np(offsets, weights, quad, cubic, x + 0.5 * h * k1)
        k3 = _rhs_np(offsets, weights, quad, cubic, x + 0.5 * h * k2)
        k4 = _rhs_np(offsets, weights, quad, cubic, x + h * k3)
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        status = _check_np(x)
        if status != STATUS_OK:
            return status, step + 1
    return STATUS_OK, nsteps


def rk4_record_np(offsets, weights, quad, cubic, x, h, nsteps, out):
    """As rk4_transient_np but recording each state into out (nsteps+1 rows)."""
    out[0] = x
    for step in range(nsteps):
        k1 = _rhs_np(offsets, weights, quad, cubic, x)
        k2 = _rhs_np(offsets, weights, quad, cubic, x + 0.5 * h * k1)
        k3 = _rhs_np(offsets, weights, quad, cubic, x + 0.5 * h * k2)
        k4 = _rhs_np(offsets, weights, quad, cubic, x + h * k3)
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[step + 1] = x
        status = _check_np(x)
        if status != STATUS_OK:
            return status, step + 1
    return STATUS_OK, nsteps


# ------------------------------------------------------------------
# numba path
# ------------------------------------------------------------------

try:
    from numba import njit

    NUMBA_AVAILABLE = True

    @njit(cache=True)
    def _rhs_nb(offsets, weights, quad, cubic, x, acc):
        n = x.shape[0]
        for c in range(n):
            acc[c] = quad * x[c] * x[c] + cubic * x[c] * x[c] * x[c]
        for t in range(offsets.shape[0]):
            j = offsets[t]
            w = weights[t]
            for c in range(n):
                acc[c] = acc[c] + w * x[(c + j) % n]

    @njit(cache=True)
    def _step_nb(offsets, weights, quad, cubic, x, h, k1, k2, k3, k4, tmp):
        n = x.shape[0]
        _rhs_nb(offsets, weights, quad, cubic, x, k1)
        for c in range(n):
            tmp[c] = x[c] + 0.5 * h * k1[c]
        _rhs_nb(offsets, weights, quad, cubic, tmp, k2)
        for c in range(n):
            tmp[c] = x[c] + 0.5 * h * k2[c]
        _rhs_nb(offsets, weights, quad, cubic, tmp, k3)
        for c in range(n):
            tmp[c] = x[c] + h * k3[c]
        _rhs_nb(offsets, weights, quad, cubic, tmp, k4)
        status = STATUS_OK
        for c in range(n):
            x[c] = x[c] + (h / 6.0) * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c])
            if not np.isfinite(x[c]):
                status = STATUS_NONFINITE
            elif status == STATUS_OK and abs(x[c]) > DIVERGENCE_GUARD:
                status = STATUS_DIVERGED
        return status

    @njit(cache=True)
    def rk4_transient_nb(offsets, weights, quad, cubic, x, h, nsteps):
        n = x.shape[0]
        k1 = np.empty(n)
        k2 = np.empty(n)
        k3 = np.empty(n)
        k4 = np.empty(n)
        tmp = np.empty(n)
        for step in range(nsteps):
            status = _step_nb(offsets, weights, quad, cubic, x, h,
                              k1, k2, k3, k4, tmp)
            if status != STATUS_OK:
                return status, step + 1
        return STATUS_OK, nsteps

    @njit(cache=True)
    def rk4_record_nb(offsets, weights, quad, cubic, x, h, nsteps, out):
        n = x.shape[0]
        k1 = np.empty(n)
        k2 = np.empty(n)
        k3 = np.empty(n)
        k4 = np.empty(n)
        tmp = np.empty(n)
        out[0] = x
        for step in range(nsteps):
            status = _step_nb(offsets, weights, quad, cubic, x, h,
                              k1, k2, k3, k4, tmp)
            out[step + 1] = x
            if status != STATUS_OK:
                return status, step + 1
        return STATUS_OK, nsteps

except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False
    rk4_transient_nb = None
    rk4_record_nb = None


def _resolve_backend() -> str:
    requested = os.environ.get("RINGHOPF_BACKEND", "").strip().lower()
    if requested == "numpy":
        return "numpy"
    if requested == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("RINGHOPF_BACKEND=numba but numba is not importable")
    return "numba" if NUMBA_AVAILABLE else "numpy"


_BACKEND = _resolve_backend()


def active_backend() -> str:
    """Which integrator path is in use: 'numba' or 'numpy'."""
    return _BACKEND


def rk4_transient(offsets, weights, quad, cubic, x, h, nsteps):
    if _BACKEND == "numba":
        return rk4_transient_nb(offsets, weights, quad, cubic, x, h, nsteps)
    return rk4_transient_np(offsets, weights, quad, cubic, x, h, nsteps)


def rk4_record(offsets, weights, quad, cubic, x, h, nsteps, out):
    if _BACKEND == "numba":
        return rk4_record_nb(offsets, weights, quad, cubic, x, h, nsteps, out)
    return rk4_record_np(offsets, weights, quad, cubic, x, h, nsteps, out)
