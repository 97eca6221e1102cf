"""Dense complex eigensolver for small matrices.

Hessenberg reduction followed by explicitly shifted QR iteration with
Givens rotations and Wilkinson shifts. Sized for the per-mode blocks
P + zeta^k Q (l <= 8); closed forms handle l = 1 and l = 2.
"""
from __future__ import annotations

import cmath

import numpy as np

from .errors import EigensolverNoConvergence

# Subdiagonal entries below tol * (|neighbour diag| + |neighbour diag|)
# are deflated to zero.
DEFLATION_TOL = 1e-12


def eigvals_2x2(m: np.ndarray) -> np.ndarray:
    """Roots of the characteristic quadratic of a complex 2x2 matrix.

    Uses the larger root of trace/determinant form, then divides through
    for the smaller one to avoid cancellation.
    """
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    disc = cmath.sqrt(tr * tr - 4.0 * det)
    if abs(tr + disc) >= abs(tr - disc):
        big = 0.5 * (tr + disc)
    else:
        big = 0.5 * (tr - disc)
    if big == 0.0:
        return np.array([0.0j, 0.0j])
    return np.array([big, det / big])


def _hessenberg(a: np.ndarray) -> np.ndarray:
    """Unitary reduction to upper Hessenberg form via Householder reflectors."""
    h = a.astype(np.complex128, copy=True)
    l = h.shape[0]
    for col in range(l - 2):
        x = h[col + 1:, col]
        norm_x = np.linalg.norm(x)
        if norm_x == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0.0 else 1.0
        v = x.copy()
        v[0] += phase * norm_x
        vnorm = np.linalg.norm(v)
        if vnorm == 0.0:
            continue
        v /= vnorm
        # H = I - 2 v v^H applied from both sides
        h[col + 1:, col:] -= 2.0 * np.outer(v, v.conj() @ h[col + 1:, col:])
        h[:, col + 1:] -= 2.0 * np.outer(h[:, col + 1:] @ v, v.conj())
        h[col + 2:, col] = 0.0
    return h


def _wilkinson_shift(h: np.ndarray, hi: int) -> complex:
    block = h[hi - 1:hi + 1, hi - 1:hi + 1]
    w = eigvals_2x2(block)
    if abs(w[0] - h[hi, hi]) <= abs(w[1] - h[hi, hi]):
        return w[0]
    return w[1]


def _givens(a: complex, b: complex) -> tuple[float, complex]:
    """Rotation [[c, s], [-conj(s), c]] (c real) sending (a, b) to (r, 0)."""
    if b == 0.0:
        return 1.0, 0.0 + 0.0j
    if a == 0.0:
        return 0.0, 1.0 + 0.0j
    r = abs(a) * cmath.sqrt(1.0 + abs(b / a) ** 2).real
    c = abs(a) / r
    s = a * b.conjugate() / (r * abs(a))
    return c, s


def _qr_sweep(h: np.ndarray, lo: int, hi: int, shift: complex) -> None:
    """One explicit QR step on the active block: H <- R Q + shift I."""
    for i in range(lo, hi + 1):
        h[i, i] -= shift
    rot = []
    for i in range(lo, hi):
        c, s = _givens(h[i, i], h[i + 1, i])
        rot.append((c, s))
        row_i = h[i, lo:hi + 1].copy()
        row_j = h[i + 1, lo:hi + 1].copy()
        h[i, lo:hi + 1] = c * row_i + s * row_j
        h[i + 1, lo:hi + 1] = -s.conjugate() * row_i + c * row_j
    for i in range(lo, hi):
        c, s = rot[i - lo]
        col_i = h[lo:hi + 1, i].copy()
        col_j = h[lo:hi + 1, i + 1].copy()
        h[lo:hi + 1, i] = c * col_i + s.conjugate() * col_j
        h[lo:hi + 1, i + 1] = -s * col_i + c * col_j
    for i in range(lo, hi + 1):
        h[i, i] += shift


def eigvals_dense(a: np.ndarray, max_sweeps: int | None = None) -> np.ndarray:
    """All eigenvalues of a dense complex (or real) square matrix.

    Parameters
    ----------
    a : (l, l) array_like
    max_sweeps : int, optional
        Total QR sweep budget; defaults to 100 * l**2.

    Returns
    -------
    (l,) complex ndarray, unordered.

    Raises
    ------
    EigensolverNoConvergence
        If the sweep budget is exhausted before full deflation.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    l = a.shape[0]
    if l == 0:
        return np.empty(0, dtype=np.complex128)
    if l == 1:
        return a[0, 0:1].copy()
    if l == 2:
        return eigvals_2x2(a)

    cap = 100 * l * l if max_sweeps is None else max_sweeps
    h = _hessenberg(a)
    eigs: list[complex] = []
    hi = l - 1
    sweeps = 0
    stagnant = 0
    while hi >= 0:
        for i in range(hi):
            if abs(h[i + 1, i]) <= DEFLATION_TOL * (abs(h[i, i]) + abs(h[i + 1, i + 1])):
                h[i + 1, i] = 0.0
        lo = hi
        while lo > 0 and h[lo, lo - 1] != 0.0:
            lo -= 1
        if lo == hi:
            eigs.append(h[hi, hi])
            hi -= 1
            stagnant = 0
            continue
        if hi - lo == 1:
            eigs.extend(eigvals_2x2(h[lo:hi + 1, lo:hi + 1]))
            hi = lo - 1
            stagnant = 0
            continue
        if sweeps >= cap:
            raise EigensolverNoConvergence(
                f"QR iteration did not deflate within {cap} sweeps "
                f"(matrix size {l}, active block {hi - lo + 1})")
        if stagnant > 0 and stagnant % 16 == 0:
            # exceptional shift to break rare symmetric stagnation
            shift = h[hi, hi] + 0.75 * abs(h[hi, hi - 1])
        else:
            shift = _wilkinson_shift(h, hi)
        _qr_sweep(h, lo, hi, shift)
        sweeps += 1
        stagnant += 1
    return np.array(eigs[::-1], dtype=np.complex128)


def sort_complex(values: np.ndarray) -> np.ndarray:
    """Canonical (real, imag) lexicographic sort used for spectrum output."""
    values = np.asarray(values, dtype=np.complex128)
    order = np.lexsort((values.imag, values.real))
    return values[order]


def spectrum_mismatch(a: np.ndarray, b: np.ndarray) -> float:
    """Largest pair distance under a greedy multiset matching of two spectra.

    Sorting by (real, imag) alone is unstable when conjugate pairs tie in
    the real part to rounding only, so after the canonical sort each value
    is matched to its nearest unused counterpart.
    """
    a = sort_complex(a)
    b = sort_complex(b).tolist()
    if len(a) != len(b):
        return np.inf
    worst = 0.0
    for z in a:
        dists = [abs(z - w) for w in b]
        i = int(np.argmin(dists))
        worst = max(worst, dists[i])
        b.pop(i)
    return worst
