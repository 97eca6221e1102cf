"""Phase-pattern predictions for Hopf bifurcations on rings.

On the critical mode k the bifurcating branch is a discrete rotating wave:
near the bifurcation point x_j(t) ~ Re(exp(i*sigma_k*t) * zeta^{jk}), so
node j peaks at time -sign(sigma_k) * j*k*T/n (mod T). Phase shifts follow
the right-shift convention, x_j(t) = x_0(t - theta_j): a clockwise wave
(sigma_k < 0) steps the shift by +k/n per node, an anticlockwise wave by
-k/n. The wavenumber is reported canonically as min(k, n-k); the direction
enum carries the orientation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DoubleEigenvalue, NotHopfMode
from .spectral import (
    ZERO_IMAG_REL,
    CouplingCoefficients,
    Direction,
    sigma_k,
)


@dataclass(frozen=True)
class HopfPrediction:
    """Limiting pattern of the periodic branch born at mode k."""

    k: int
    omega: float
    period_limit: float
    phase_fraction: np.ndarray
    direction: Direction
    spatial_K: str
    spatiotemporal_H: str
    twist_order: int

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "omega": self.omega,
            "period": self.period_limit,
            "fractions": [float(f) for f in self.phase_fraction],
            "direction": self.direction.value,
            "H": self.spatiotemporal_H,
            "K": self.spatial_K,
            "twist_order": self.twist_order,
        }


def symmetry_pair(n: int, k: int) -> tuple[str, str, int]:
    """Spatiotemporal pair (H, K) and twist order for the mode-k wave.

    The full rotation group acts by phase shifts; the spatial kernel is
    the subgroup of rotations that fix the pattern pointwise.
    """
    if not 0 <= k < n:
        raise ValueError(f"k={k} outside [0, {n})")
    g = math.gcd(n, k)
    h_name = f"Z{n}"
    k_name = "trivial" if g == 1 else f"Z{g}"
    return h_name, k_name, n // g


def _fractions(n: int, k: int, direction: Direction) -> np.ndarray:
    if direction is Direction.CLOCKWISE:
        step = k / n
    elif direction is Direction.ANTICLOCKWISE:
        step = -k / n
    else:
        step = k / n  # synchronous (k=0) or alternating (k=n/2) patterns
    return (np.arange(n) * step) % 1.0


def predict_from_sigma(n: int, k: int, sigma: float,
                       zero_tol: float = 0.0) -> HopfPrediction:
    """Prediction from a mode index and the signed imaginary part.

    Accepts k = 0 (synchronous) and k = n/2 (alternating), which arise for
    multidimensional nodes where the block eigenvalue supplies sigma.
    """
    k = k % n
    kc = min(k, n - k)
    if abs(sigma) <= zero_tol:
        raise NotHopfMode(f"mode {k} has no imaginary part (sigma={sigma:g})")
    if kc == 0 or 2 * kc == n:
        direction = Direction.NOT_ROTATING
    elif sigma < 0.0:
        direction = Direction.CLOCKWISE
    else:
        direction = Direction.ANTICLOCKWISE
    omega = abs(sigma)
    h_name, k_name, twist = symmetry_pair(n, kc)
    return HopfPrediction(kc, omega, 2.0 * math.pi / omega,
                          _fractions(n, kc, direction), direction,
                          k_name, h_name, twist)


def predict(c: CouplingCoefficients, k: int) -> HopfPrediction:
    """Prediction for mode k of a scalar ring linearization.

    The mode must carry a nonzero imaginary part; dihedral rings double
    every strictly complex mode, where branch enumeration needs data this
    module does not compute.
    """
    k = k % c.n
    kc = min(k, c.n - k)
    if c.dihedral and kc != 0 and 2 * kc != c.n:
        raise DoubleEigenvalue(
            f"mode {kc} of a dihedral ring is double; only flagged, not predicted")
    sigma = sigma_k(c, kc) if kc > 0 else 0.0
    return predict_from_sigma(c.n, kc, sigma, zero_tol=ZERO_IMAG_REL * c.scale)


def time_reverse(p: HopfPrediction) -> HopfPrediction:
    """The same branch run backwards: shifts negate, orientation flips."""
    if p.direction is Direction.CLOCKWISE:
        direction = Direction.ANTICLOCKWISE
    elif p.direction is Direction.ANTICLOCKWISE:
        direction = Direction.CLOCKWISE
    else:
        direction = Direction.NOT_ROTATING
    return replace(p, phase_fraction=(1.0 - p.phase_fraction) % 1.0,
                   direction=direction)


@dataclass(frozen=True)
class DihedralMode:
    k: int
    mu: complex
    multiplicity: int
    c_axial_analysis_required: bool


def dihedral_modes(c: CouplingCoefficients) -> list[DihedralMode]:
    """Distinct modes of a dihedral ring, k = 0, ..., floor(n/2).

    Mirror symmetry forces every mode outside {0, n/2} to be a double
    eigenvalue; those are flagged because several branch types (rotating
    and reflection-fixed) coexist and are not enumerated here.
    """
    if not c.dihedral:
        raise ValueError("dihedral_modes needs dihedral coefficients")
    j = np.arange(c.n)
    out = []
    for k in range(c.n // 2 + 1):
        mu = complex(np.dot(c.a, np.cos(2.0 * np.pi * k * j / c.n)), 0.0)
        double = k != 0 and 2 * k != c.n
        out.append(DihedralMode(k, mu, 2 if double else 1, double))
    return out
