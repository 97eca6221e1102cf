"""Pattern extraction from trajectories and combinatorial synchrony checks.

Periods come from upward mean-crossings of a node trace. Per-node phase
fractions come from the lag that maximizes the normalized circular
cross-correlation with node 0, so fraction f_j means x_j(t) ~ x_0(t - f_j*T)
(shift to the right). Rotation direction is the sign of the common
circular step between consecutive fractions. Balanced colourings are
checked directly against the definition: same-coloured nodes must see
colour-identical input multisets per arrow type.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousLag, IrregularPeriod, NoOscillation
from .hopf_predict import HopfPrediction, time_reverse
from .ring_model import RingNetwork, Symmetry
from .simulate import Trajectory
from .spectral import Direction

AMPLITUDE_FLOOR = 1e-8
SPREAD_LIMIT = 0.05
PEAK_UNIQUENESS = 1e-6


@dataclass(frozen=True)
class PhasePattern:
    """Measured period and per-node phase fractions (node 0 pinned to 0)."""

    period: float
    fractions: np.ndarray
    direction: Direction
    waveform_mismatch: np.ndarray

    def to_json_dict(self) -> dict:
        return {
            "period": self.period,
            "fractions": [float(f) for f in self.fractions],
            "direction": self.direction.value,
            "residuals": [float(r) for r in self.waveform_mismatch],
        }


@dataclass(frozen=True)
class Colouring:
    """Per-node integer labels, contiguous from 0."""

    colour: tuple[int, ...]

    def __post_init__(self):
        labels = set(self.colour)
        if labels != set(range(len(labels))):
            raise ValueError(f"labels must be contiguous from 0, got {sorted(labels)}")


@dataclass(frozen=True)
class VerifyReport:
    match: bool
    max_fraction_error: float
    period_error: float
    direction_agrees: bool
    time_reversed: bool = False

    def to_json_dict(self) -> dict:
        return {
            "match": self.match,
            "max_fraction_error": self.max_fraction_error,
            "period_error": self.period_error,
            "direction_agrees": self.direction_agrees,
            "time_reversed": self.time_reversed,
        }


# ------------------------------------------------------------------
# period
# ------------------------------------------------------------------

def _upward_crossings(trace: np.ndarray, times: np.ndarray) -> np.ndarray:
    z = trace - trace.mean()
    neg = z[:-1] <= 0.0
    pos = z[1:] > 0.0
    idx = np.where(neg & pos)[0]
    if idx.size == 0:
        return np.empty(0)
    t0, t1 = times[idx], times[idx + 1]
    y0, y1 = z[idx], z[idx + 1]
    return t0 - y0 * (t1 - t0) / (y1 - y0)


def estimate_period(tr: Trajectory, node: int = 0) -> float:
    """Dominant period of one channel from refined upward crossings.

    Requires a visible oscillation (amplitude above 1e-8) and consistent
    cycle lengths (interval spread at most 5%).
    """
    trace = tr.channel(node)
    amplitude = 0.5 * (np.max(trace) - np.min(trace))
    if amplitude < AMPLITUDE_FLOOR:
        raise NoOscillation(f"node {node} amplitude {amplitude:.3g} below floor")
    crossings = _upward_crossings(trace, tr.times)
    if crossings.size < 3:
        raise IrregularPeriod(
            f"node {node}: {crossings.size} upward crossings, need >= 3 "
            "(window must cover at least 3 periods)")
    intervals = np.diff(crossings)
    mean = float(np.mean(intervals))
    spread = float((np.max(intervals) - np.min(intervals)) / mean)
    if spread > SPREAD_LIMIT:
        raise IrregularPeriod(f"node {node}: interval spread {spread:.3%}")
    return mean


# ------------------------------------------------------------------
# phase fractions
# ------------------------------------------------------------------

def _circular_lag(sig: np.ndarray, ref: np.ndarray, span: int) -> tuple[float, float]:
    """Best lag in [0, span) samples aligning sig(t + lag) with ref(t).

    Returns (refined lag, peak correlation). The correlation is circular
    over the whole trimmed window and normalized, so waveform agreement
    shows up as a peak value near 1.
    """
    m = len(ref)
    a = sig - sig.mean()
    b = ref - ref.mean()
    denom = np.sqrt(np.dot(a, a) * np.dot(b, b))
    if denom == 0.0:
        return 0.0, 0.0
    corr = np.fft.irfft(np.fft.rfft(a) * np.conj(np.fft.rfft(b)), n=m) / denom
    window = corr[:span]
    peak = int(np.argmax(window))
    best = float(window[peak])

    interior = np.ones(span, dtype=bool)
    for d in range(-span // 8, span // 8 + 1):
        interior[(peak + d) % span] = False
    rivals = window[interior]
    if rivals.size and np.max(rivals) >= best - PEAK_UNIQUENESS:
        raise AmbiguousLag(
            f"correlation peak not unique: {best:.8f} vs {np.max(rivals):.8f}")

    left = corr[(peak - 1) % m]
    right = corr[(peak + 1) % m]
    denom2 = left - 2.0 * best + right
    delta = 0.0 if denom2 == 0.0 else 0.5 * (left - right) / denom2
    delta = float(np.clip(delta, -0.5, 0.5))
    return peak + delta, best


def _direction_from_fractions(fractions: np.ndarray) -> Direction:
    n = len(fractions)
    steps = (np.roll(fractions, -1) - fractions) % 1.0
    z = np.exp(2j * np.pi * steps).sum()
    if abs(z) < 0.5 * n:
        raise AmbiguousLag("consecutive fraction steps are inconsistent")
    mean_step = float(np.angle(z) / (2.0 * np.pi))  # in (-1/2, 1/2]
    tol = 1.0 / (4.0 * n)
    if abs(mean_step) <= tol or abs(mean_step) >= 0.5 - tol:
        return Direction.NOT_ROTATING
    return Direction.CLOCKWISE if mean_step > 0.0 else Direction.ANTICLOCKWISE


def extract_pattern(tr: Trajectory) -> PhasePattern:
    """Per-node phase fractions relative to node 0, plus direction.

    The window is trimmed to a whole number of periods so lags wrap
    cleanly; each fraction is the correlation-optimal right-shift of the
    node relative to node 0, as a fraction of the period. The waveform
    mismatch is the per-node RMS residual after undoing that shift,
    relative to the node-0 RMS.
    """
    period = estimate_period(tr, node=0)
    h = tr.step
    per_samples = period / h
    n_periods = int(np.floor((len(tr.times) - 1) / per_samples))
    if n_periods < 1:
        raise IrregularPeriod("window shorter than one period")
    m = int(round(n_periods * per_samples))
    states = tr.states[:m]
    ref = states[:, 0]
    span = max(2, int(np.ceil(per_samples)))

    nch = states.shape[1]
    fractions = np.zeros(nch)
    mismatch = np.zeros(nch)
    ref_rms = float(np.sqrt(np.mean((ref - ref.mean()) ** 2)))
    for j in range(1, nch):
        sig = states[:, j]
        if np.max(sig) - np.min(sig) < AMPLITUDE_FLOOR:
            fractions[j] = 0.0
            mismatch[j] = 1.0
            continue
        lag, _ = _circular_lag(sig, ref, span)
        fractions[j] = (lag * h / period) % 1.0
        aligned = np.roll(sig - sig.mean(), -int(round(lag)))
        mismatch[j] = float(np.sqrt(np.mean((aligned - (ref - ref.mean())) ** 2)))
        mismatch[j] /= ref_rms if ref_rms > 0 else 1.0
    direction = _direction_from_fractions(fractions)
    return PhasePattern(period, fractions, direction, mismatch)


# ------------------------------------------------------------------
# verification against predictions
# ------------------------------------------------------------------

def circle_distance(a: float, b: float) -> float:
    d = abs((a - b) % 1.0)
    return min(d, 1.0 - d)


def _compare(p: HopfPrediction, pat: PhasePattern, tol: float) -> VerifyReport:
    errs = [circle_distance(f, g) for f, g in zip(pat.fractions, p.phase_fraction)]
    max_err = float(np.max(errs))
    dir_ok = pat.direction is p.direction
    period_err = abs(pat.period - p.period_limit) / p.period_limit
    return VerifyReport(match=bool(max_err <= tol and dir_ok),
                        max_fraction_error=max_err,
                        period_error=float(period_err),
                        direction_agrees=dir_ok)


def verify_prediction(
    p: HopfPrediction,
    pat: PhasePattern,
    tol: float = 0.03,
    allow_time_reversed: bool = False,
) -> VerifyReport:
    """Check a measured pattern against a prediction.

    Matching requires every fraction within tol in the circle metric and
    agreeing directions; the period error is reported but not gated (the
    prediction is the limit at the bifurcation point). The time-reversed
    pattern is accepted only when explicitly allowed.
    """
    if len(pat.fractions) != len(p.phase_fraction):
        raise ValueError("prediction and pattern have different node counts")
    report = _compare(p, pat, tol)
    if report.match or not allow_time_reversed:
        return report
    reversed_report = _compare(time_reverse(p), pat, tol)
    if reversed_report.match:
        return VerifyReport(match=True,
                            max_fraction_error=reversed_report.max_fraction_error,
                            period_error=reversed_report.period_error,
                            direction_agrees=reversed_report.direction_agrees,
                            time_reversed=True)
    return report


def glide_residual(tr: Trajectory, period: float) -> np.ndarray:
    """Per-node relative RMS of x_j(t) + x_j(t - T/2) on whole periods.

    Small values certify the half-period sign symmetry of odd-field
    rotating waves, x_j(t) = -x_j(t - T/2).
    """
    h = tr.step
    per_samples = period / h
    n_periods = int(np.floor((len(tr.times) - 1) / per_samples))
    if n_periods < 1:
        raise IrregularPeriod("window shorter than one period")
    m = int(round(n_periods * per_samples))
    states = tr.states[:m]
    shift = int(round(0.5 * per_samples))
    out = np.empty(states.shape[1])
    for j in range(states.shape[1]):
        x = states[:, j]
        rms = np.sqrt(np.mean(x * x))
        res = np.sqrt(np.mean((x + np.roll(x, shift)) ** 2))
        out[j] = res / rms if rms > 0 else 0.0
    return out


# ------------------------------------------------------------------
# balanced colourings
# ------------------------------------------------------------------

def colouring_from_config(cfg) -> Colouring:
    """Colouring from a config document: key ``colouring``, integer list."""
    try:
        labels = [int(v) for v in cfg["colouring"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"config needs a 'colouring' integer list: {exc}") from exc
    return Colouring(tuple(labels))


def _arrow_types(net: RingNetwork, merge_ranges: bool) -> list[frozenset[int]]:
    if merge_ranges:
        return [frozenset(net.ranges)]
    if net.symmetry is Symmetry.DIHEDRAL:
        groups = {}
        for r in net.ranges:
            key = frozenset({r, net.n - r})
            groups[key] = key
        return list(groups.values())
    return [frozenset({r}) for r in sorted(net.ranges)]


def check_balanced(net: RingNetwork, col: Colouring,
                   merge_ranges: bool = False) -> bool:
    """Whether same-coloured nodes receive identical input colour multisets.

    Inputs are grouped per arrow type: each range separately on cyclic
    rings, mirror pairs {r, n-r} jointly on dihedral rings, or the whole
    range set as one type with ``merge_ranges=True``. Balanced colourings
    induce flow-invariant synchrony subspaces.
    """
    if len(col.colour) != net.n:
        raise ValueError(f"colouring has {len(col.colour)} labels, need {net.n}")
    types = _arrow_types(net, merge_ranges)

    def signature(c: int):
        sig = []
        for group in types:
            colours = sorted(col.colour[(c - r) % net.n] for r in group)
            sig.append(tuple(colours))
        return tuple(sig)

    by_colour: dict[int, tuple] = {}
    for c in range(net.n):
        sig = signature(c)
        label = col.colour[c]
        if label in by_colour:
            if by_colour[label] != sig:
                return False
        else:
            by_colour[label] = sig
    return True
