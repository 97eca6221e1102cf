"""Closed-form spectral analysis of ring-network Jacobians.

A cyclic ring linearizes to a circulant matrix L = sum_j a_j A^j where A
is the one-step cyclic shift (row c picks up x_{c+j} with weight a_j).
Its eigenvectors are the Fourier vectors v_k = (1, zeta^k, zeta^{2k}, ...)
with zeta = exp(2*pi*i/n), and the eigenvalues are the polynomial values

    mu_k = sum_j a_j zeta^{j k},   k = 0, ..., n-1.

Everything in this module is a function of those coefficient vectors:
first-bifurcation classification, rotation direction of the bifurcating
wave, the inverse problem of prescribing the real-part ordering, and the
block generalisation P (x) I + Q (x) A for multidimensional nodes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .eigensolver import eigvals_dense, spectrum_mismatch
from .errors import AllDecoupled, InternalConsistency, InvalidMode

# Scale-aware floor below which an imaginary part counts as zero.
ZERO_IMAG_REL = 1e-9
# Real-part ties tighter than this (times scale) are degenerate.
TIE_REL = 1e-9


# ------------------------------------------------------------------
# coefficient containers
# ------------------------------------------------------------------

@dataclass(frozen=True)
class CouplingCoefficients:
    """Circulant first row (a_0, ..., a_{n-1}) of a ring linearization.

    Coefficient a_j weights the input x_{c+j} into node c; a_0 is the
    diagonal term. Dihedral rings satisfy a_j = a_{n-j}.
    """

    n: int
    a: np.ndarray
    dihedral: bool = False

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.shape != (self.n,):
            raise ValueError(f"need {self.n} coefficients, got shape {a.shape}")
        object.__setattr__(self, "a", a)
        if self.dihedral:
            for j in range(1, self.n):
                if a[j] != a[(self.n - j) % self.n]:
                    raise ValueError(
                        f"dihedral coefficients require a[{j}] == a[{self.n - j}]")

    @property
    def scale(self) -> float:
        return 1.0 + float(np.sum(np.abs(self.a)))

    def shifted(self, delta: float) -> "CouplingCoefficients":
        """Same coefficients with the diagonal term moved by delta."""
        a = self.a.copy()
        a[0] += delta
        return CouplingCoefficients(self.n, a, self.dihedral)


@dataclass(frozen=True)
class BlockCoefficients:
    """Jacobian data P (x) I + Q (x) A for rings of l-dimensional nodes."""

    n: int
    l: int
    P: np.ndarray
    Q: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.P, dtype=float)
        q = np.asarray(self.Q, dtype=float)
        if p.shape != (self.l, self.l) or q.shape != (self.l, self.l):
            raise ValueError(f"P and Q must be {self.l}x{self.l}")
        object.__setattr__(self, "P", p)
        object.__setattr__(self, "Q", q)

    def dense(self) -> np.ndarray:
        """The full n*l x n*l Jacobian (nodes blocked consecutively)."""
        shift = np.zeros((self.n, self.n))
        for c in range(self.n):
            shift[c, (c + 1) % self.n] = 1.0
        return np.kron(np.eye(self.n), self.P) + np.kron(shift, self.Q)


@dataclass(frozen=True)
class SpectralMode:
    """One Fourier mode of a circulant linearization."""

    k: int
    mu: complex
    eigenvector: np.ndarray
    algebraic_multiplicity: int

    @property
    def rho(self) -> float:
        return self.mu.real

    @property
    def sigma(self) -> float:
        return self.mu.imag


class BifurcationKind(Enum):
    STEADY_STATE = "SteadyState"
    HOPF = "Hopf"
    DEGENERATE = "Degenerate"


class Direction(Enum):
    CLOCKWISE = "Clockwise"
    ANTICLOCKWISE = "Anticlockwise"
    NOT_ROTATING = "NotRotating"


class Sweep(Enum):
    SHIFT_A0 = "ShiftA0"


@dataclass(frozen=True)
class FirstBifurcation:
    """Which mode first loses stability as the diagonal term increases."""

    critical_modes: frozenset[int]
    kind: BifurcationKind
    crossing_value: float
    omega: float
    max_real_part: float = field(default=0.0)


# ------------------------------------------------------------------
# spectra
# ------------------------------------------------------------------

def fourier_vector(n: int, k: int) -> np.ndarray:
    j = np.arange(n)
    return np.exp(2j * np.pi * ((j * k) % n) / n)


def mode_values(c: CouplingCoefficients) -> np.ndarray:
    """The n values mu_k = sum_j a_j zeta^{jk}, in mode order."""
    n = c.n
    j = np.arange(n)
    k = np.arange(n)
    phases = np.exp(2j * np.pi * ((np.outer(k, j) % n)) / n)
    return phases @ c.a.astype(complex)


def circulant_matrix(c: CouplingCoefficients) -> np.ndarray:
    """Dense circulant with first row (a_0, ..., a_{n-1})."""
    n = c.n
    m = np.empty((n, n))
    for row in range(n):
        m[row] = np.roll(c.a, row)
    return m


def circulant_spectrum(c: CouplingCoefficients) -> list[SpectralMode]:
    """All n modes of the circulant linearization.

    One entry per wavenumber k; coincident eigenvalues are reported per k
    with the shared algebraic multiplicity (dihedral rings double every
    mode outside {0, n/2}).
    """
    mu = mode_values(c)
    tol = TIE_REL * c.scale
    modes = []
    for k in range(c.n):
        mult = int(np.sum(np.abs(mu - mu[k]) <= tol))
        modes.append(SpectralMode(k, complex(mu[k]), fourier_vector(c.n, k), mult))
    return modes


def block_spectrum(b: BlockCoefficients) -> list[tuple[int, np.ndarray]]:
    """Per-mode eigenvalues of the l x l blocks P + zeta^k Q.

    Their multiset union over k equals the spectrum of the dense
    n*l x n*l Jacobian.
    """
    zeta = np.exp(2j * np.pi / b.n)
    out = []
    for k in range(b.n):
        m = b.P.astype(complex) + zeta ** k * b.Q
        out.append((k, eigvals_dense(m)))
    return out


def sigma_k(c: CouplingCoefficients, k: int) -> float:
    """Imaginary part of mu_k as the explicit sine sum."""
    j = np.arange(c.n)
    return float(np.dot(c.a, np.sin(2.0 * np.pi * k * j / c.n)))


def rho_k(c: CouplingCoefficients, k: int) -> float:
    """Real part of mu_k as the explicit cosine sum."""
    j = np.arange(c.n)
    return float(np.dot(c.a, np.cos(2.0 * np.pi * k * j / c.n)))


# ------------------------------------------------------------------
# first bifurcation
# ------------------------------------------------------------------

def _fold(n: int, k: int) -> int:
    return min(k % n, (n - k) % n)


def classify_first_bifurcation(
    c: CouplingCoefficients, sweep: Sweep = Sweep.SHIFT_A0
) -> FirstBifurcation:
    """Identify the first instability under an upward shift of a_0.

    The mode(s) with the largest real part cross first. A strictly complex
    conjugate pair gives a Hopf point, a real mode a steady-state point;
    real-part ties across distinct mode pairs are surfaced as degenerate
    rather than silently broken.
    """
    if not np.any(c.a[1:] != 0.0):
        raise AllDecoupled("all off-diagonal coefficients vanish")
    assert sweep is Sweep.SHIFT_A0

    mu = mode_values(c)
    rho = mu.real
    tie_tol = TIE_REL * c.scale
    max_rho = float(np.max(rho))
    critical = {k for k in range(c.n) if rho[k] >= max_rho - tie_tol}
    folded = {_fold(c.n, k) for k in critical}

    crossing = c.a[0] - max_rho
    if len(folded) > 1:
        return FirstBifurcation(frozenset(critical), BifurcationKind.DEGENERATE,
                                crossing, 0.0, max_rho)
    (k,) = folded
    sigma = mu[k].imag
    if abs(sigma) <= ZERO_IMAG_REL * c.scale:
        kind = BifurcationKind.STEADY_STATE
        omega = 0.0
    else:
        kind = BifurcationKind.HOPF
        omega = abs(sigma)
    return FirstBifurcation(frozenset(critical), kind, crossing, omega, max_rho)


def rotation_direction(c: CouplingCoefficients, k: int) -> Direction:
    """Rotation sense of the wave on mode k, from the sign of sigma_k.

    Negative imaginary part rotates clockwise, positive anticlockwise.
    Only strictly complex modes (1 <= k < n/2) carry an orientation.
    """
    if k <= 0 or 2 * k >= c.n:
        raise InvalidMode(f"k={k} is not a rotating mode for n={c.n}")
    s = sigma_k(c, k)
    if abs(s) <= ZERO_IMAG_REL * c.scale:
        return Direction.NOT_ROTATING
    return Direction.CLOCKWISE if s < 0.0 else Direction.ANTICLOCKWISE


# ------------------------------------------------------------------
# non-degeneracy report
# ------------------------------------------------------------------

@dataclass(frozen=True)
class NondegeneracyReport:
    simple: bool
    no_other_imaginary: bool
    crossing: bool


def hopf_nondegeneracy(c: CouplingCoefficients, k: int) -> NondegeneracyReport:
    """Check the classical side conditions for mode k.

    simple: mu_k occurs once (fails for dihedral doubles). no_other_imaginary:
    at the a_0 shift that makes rho_k vanish, no mode outside the conjugate
    pair sits on the axis, i.e. no foreign mode shares the real part.
    crossing: d(rho_k)/d(a_0) = 1, always nonzero under this sweep.
    """
    mu = mode_values(c)
    tol = TIE_REL * c.scale
    simple = int(np.sum(np.abs(mu - mu[k]) <= tol)) == 1
    partner = (c.n - k) % c.n
    others = [j for j in range(c.n) if j not in (k, partner)]
    no_other = all(abs(mu[j].real - mu[k].real) > tol for j in others)
    return NondegeneracyReport(simple=simple, no_other_imaginary=no_other,
                               crossing=True)


# ------------------------------------------------------------------
# inverse ordering design
# ------------------------------------------------------------------

def design_ordering(n: int, desired: list[int]) -> CouplingCoefficients:
    """Coefficients whose real parts realize a prescribed ranking.

    ``desired[j]`` is the rank (0 = largest) that rho_j must take among
    the distinct real parts rho_0, ..., rho_N, N = floor(n/2). The target
    values -desired[j] are interpolated at the unit roots: evaluation of a
    real coefficient polynomial at zeta^k is exactly mu_k, and a polynomial
    taking value alpha_j at both zeta^j and its conjugate root has real
    coefficients, so the interpolant is the inverse discrete Fourier
    transform of the folded target vector. Integer targets leave a ranking
    gap of 1 between consecutive real parts.
    """
    half = n // 2
    if sorted(desired) != list(range(half + 1)):
        raise ValueError(f"desired must be a permutation of 0..{half}")
    targets = np.array([-float(desired[_fold(n, k)]) for k in range(n)])
    # psi(zeta^k) = targets_k / 2 for all n roots; phi = psi + conj(psi)
    psi = np.fft.fft(targets / 2.0) / n
    a = 2.0 * psi.real
    c = CouplingCoefficients(n, a)

    realized = np.array([m.rho for m in circulant_spectrum(c)[: half + 1]])
    ranks = np.empty(half + 1, dtype=int)
    ranks[np.argsort(-realized)] = np.arange(half + 1)
    if list(ranks) != list(desired):
        raise InternalConsistency(
            f"designed ranking {list(ranks)} does not match request {desired}")
    if np.max(np.abs(realized - (-np.asarray(desired, dtype=float)))) > 1e-9:
        raise InternalConsistency("designed real parts drifted from targets")
    return c


# ------------------------------------------------------------------
# oracles for the block decomposition
# ------------------------------------------------------------------

def block_union_mismatch(b: BlockCoefficients) -> float:
    """Distance between the block-spectrum union and the dense spectrum.

    The dense side uses LAPACK on the assembled n*l matrix, independent of
    the per-block solver.
    """
    union = np.concatenate([w for _, w in block_spectrum(b)])
    dense = np.linalg.eigvals(b.dense())
    return spectrum_mismatch(union, dense)


def nn_ring(n: int, a1: float, a0: float = 0.0) -> CouplingCoefficients:
    """Nearest-neighbour coefficients (a_0, a_1, 0, ..., 0)."""
    a = np.zeros(n)
    a[0] = a0
    if n > 1:
        a[1] = a1
    return CouplingCoefficients(n, a)


def ordering_token(c: CouplingCoefficients) -> str:
    """Distinct-mode ranking string, e.g. '1>0>2' (largest real part first).

    Empty string when any two distinct mode pairs tie within tolerance.
    """
    half = c.n // 2
    rho = np.array([rho_k(c, k) for k in range(half + 1)])
    order = np.argsort(-rho, kind="stable")
    tol = TIE_REL * c.scale
    for i in range(len(order) - 1):
        if rho[order[i]] - rho[order[i + 1]] <= tol:
            return ""
    return ">".join(str(int(k)) for k in order)


def classify_batch(
    n: int, a_matrix: np.ndarray
) -> list[tuple[FirstBifurcation | None, str]]:
    """Vectorized (classify_first_bifurcation, ordering_token) over rows.

    One phase-matrix product classifies every coefficient row at once;
    parameter sweeps call this on grid chunks. Rows with all couplings
    zero yield (None, ""). Semantics match the scalar functions entry for
    entry (see the consistency tests).
    """
    a_matrix = np.asarray(a_matrix, dtype=float)
    rows, width = a_matrix.shape
    if width != n:
        raise ValueError(f"coefficient rows must have length {n}")
    j = np.arange(n)
    k = np.arange(n)
    phases = np.exp(2j * np.pi * ((np.outer(j, k) % n)) / n)
    mu = a_matrix @ phases
    rho, sigma = mu.real, mu.imag
    scale = 1.0 + np.sum(np.abs(a_matrix), axis=1)
    tie_tol = TIE_REL * scale
    zero_tol = ZERO_IMAG_REL * scale
    max_rho = np.max(rho, axis=1)
    tied = rho >= (max_rho - tie_tol)[:, None]
    fold = np.minimum(k, (n - k) % n)
    half = n // 2

    rho_half = rho[:, : half + 1]
    order = np.argsort(-rho_half, axis=1, kind="stable")
    sorted_rho = np.take_along_axis(rho_half, order, axis=1)
    gaps = -np.diff(sorted_rho, axis=1)
    if gaps.size:
        has_tie = np.any(gaps <= tie_tol[:, None], axis=1)
    else:
        has_tie = np.zeros(rows, dtype=bool)

    out: list[tuple[FirstBifurcation | None, str]] = []
    for r in range(rows):
        if not np.any(a_matrix[r, 1:] != 0.0):
            out.append((None, ""))
            continue
        critical = frozenset(int(i) for i in np.nonzero(tied[r])[0])
        folded = {int(fold[i]) for i in critical}
        crossing = float(a_matrix[r, 0] - max_rho[r])
        if len(folded) > 1:
            fb = FirstBifurcation(critical, BifurcationKind.DEGENERATE,
                                  crossing, 0.0, float(max_rho[r]))
        else:
            (kc,) = folded
            s = sigma[r, kc]
            if abs(s) <= zero_tol[r]:
                fb = FirstBifurcation(critical, BifurcationKind.STEADY_STATE,
                                      crossing, 0.0, float(max_rho[r]))
            else:
                fb = FirstBifurcation(critical, BifurcationKind.HOPF,
                                      crossing, float(abs(s)), float(max_rho[r]))
        token = "" if has_tie[r] else ">".join(str(int(i)) for i in order[r])
        out.append((fb, token))
    return out
