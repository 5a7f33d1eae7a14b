"""Two-photon conditional interference patterns under dephasing and
least-squares estimation of the dephasing parameter.

All lengths are in millimetres.  The pattern at idler position x_i with the
signal detector at x_s is

    P = A sinc^2(k a x_i / f) sinc^2(k a x_s / (f beta))
        * [1 + sum_{l>m} (1-p) |rho_lm| sinc(n k d b / f) sinc(n k d b / (f beta))
               cos(n k d x_i / f - n k d x_s / (f beta) + arg rho_lm)]

with n = l - m, rho the pair-basis density of the initial state, and
sinc(x) = sin(x)/x.  The normalization A is a free scale; p enters only
through the fringe visibilities, which is what the fit exploits.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .qcore import DensityMatrix
from .rng import derive_rng

MIN_SCAN_SAMPLES = 8
SIGMA_FLOOR = 1e-6
_GRID_POINTS = 101
_REFINE_TOL = 1e-9


class DegenerateScanError(ValueError):
    """The scan carries no fringe information, so p is unidentifiable."""


@dataclass(frozen=True)
class OpticalGeometry:
    """Bench constants, lengths in mm."""

    wavelength: float = 7.10e-4
    half_slit_width: float = 0.05
    slit_separation: float = 0.25
    focal_length: float = 200.0
    half_detector_width: float = 0.05
    beta: float = 0.62

    def __post_init__(self):
        for name in ("wavelength", "half_slit_width", "slit_separation",
                     "focal_length", "half_detector_width", "beta"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if 2.0 * self.half_slit_width >= self.slit_separation:
            raise ValueError("slit width must be smaller than the slit separation")

    @property
    def wave_number(self) -> float:
        return 2.0 * math.pi / self.wavelength


def _sinc(x):
    """Unnormalized sinc: sin(x)/x with sinc(0) = 1."""
    return np.sinc(np.asarray(x) / np.pi)


def x_pi(geom: OpticalGeometry) -> float:
    """Signal position where k d x / (f beta) = pi (the anti-fringe point)."""
    return math.pi * geom.focal_length * geom.beta / (geom.wave_number * geom.slit_separation)


def fringe_period(geom: OpticalGeometry, arm: str = "idler") -> float:
    """Nearest-neighbour fringe period in the given arm's coordinate."""
    period = 2.0 * math.pi * geom.focal_length / (geom.wave_number * geom.slit_separation)
    if arm == "idler":
        return period
    if arm == "signal":
        return period * geom.beta
    raise ValueError(f"arm must be 'signal' or 'idler', got {arm!r}")


def _pair_terms(geom: OpticalGeometry, rho0: DensityMatrix):
    """(difference n, modulus, phase, detector sinc factor) per pair l > m."""
    k, d, f = geom.wave_number, geom.slit_separation, geom.focal_length
    b, beta = geom.half_detector_width, geom.beta
    terms = []
    for l in range(rho0.dim):
        for m in range(l):
            elem = rho0.matrix[l, m]
            n = l - m
            det = float(_sinc(n * k * d * b / f) * _sinc(n * k * d * b / (f * beta)))
            terms.append((n, abs(elem), float(np.angle(elem)), det))
    return terms


def _envelope_and_fringe(geom: OpticalGeometry, rho0: DensityMatrix, x_i, x_s):
    """Envelope E and fringe sum G with P = scale * E * (1 + (1-p) G)."""
    k, a, d, f = geom.wave_number, geom.half_slit_width, geom.slit_separation, geom.focal_length
    beta = geom.beta
    x_i = np.asarray(x_i, dtype=float)
    x_s = np.asarray(x_s, dtype=float)
    env = _sinc(k * a * x_i / f) ** 2 * _sinc(k * a * x_s / (f * beta)) ** 2
    fringe = np.zeros(np.broadcast(x_i, x_s).shape)
    for n, mod, phase, det in _pair_terms(geom, rho0):
        if mod == 0.0:
            continue
        fringe = fringe + mod * det * np.cos(
            n * k * d * x_i / f - n * k * d * x_s / (f * beta) + phase
        )
    return env, fringe


def pattern_intensity(
    geom: OpticalGeometry,
    rho0: DensityMatrix,
    p: float,
    x_i,
    x_s,
    scale: float = 1.0,
):
    """Conditional coincidence rate at (x_i, x_s); clamped at zero.

    ``rho0`` is the initial pair-basis density over anti-correlated slit
    pairs; ``p`` is the dephasing parameter.  Scalar or array positions.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    env, fringe = _envelope_and_fringe(geom, rho0, x_i, x_s)
    out = scale * env * (1.0 + (1.0 - p) * fringe)
    clipped = np.minimum(out, 0.0)
    if np.any(clipped < -1e-9 * abs(scale)):
        warnings.warn(
            "pattern model went negative beyond rounding and was clamped; "
            "the supplied pair density drives the bracket below zero",
            stacklevel=2,
        )
    result = np.maximum(out, 0.0)
    return float(result) if np.ndim(x_i) == 0 and np.ndim(x_s) == 0 else result


@dataclass(frozen=True)
class PatternScan:
    """Sampled coincidence counts along one detector, the other held fixed."""

    fixed_arm: str
    fixed_position: float
    positions: np.ndarray
    counts: np.ndarray
    p_true: float | None = None

    def __post_init__(self):
        if self.fixed_arm not in ("signal", "idler"):
            raise ValueError(f"fixed_arm must be 'signal' or 'idler', got {self.fixed_arm!r}")
        pos = np.array(self.positions, dtype=float)
        cts = np.array(self.counts, dtype=float)
        if pos.ndim != 1 or pos.shape != cts.shape:
            raise ValueError("positions and counts must be matching 1-d arrays")
        if len(np.unique(pos)) < MIN_SCAN_SAMPLES:
            raise ValueError(f"need at least {MIN_SCAN_SAMPLES} distinct sample positions")
        if not np.all(np.isfinite(pos)) or not np.all(np.isfinite(cts)):
            raise ValueError("scan contains non-finite values")
        if np.any(cts < 0):
            raise ValueError("counts must be non-negative")
        pos.setflags(write=False)
        cts.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "counts", cts)

    @property
    def scanned_arm(self) -> str:
        return "idler" if self.fixed_arm == "signal" else "signal"

    def span(self) -> float:
        return float(self.positions.max() - self.positions.min())


def _scan_axes(scan: PatternScan):
    """Map a scan onto (x_i, x_s) arrays for the pattern model."""
    if scan.fixed_arm == "signal":
        return scan.positions, scan.fixed_position
    return scan.fixed_position, scan.positions


def synthesize_scan(
    geom: OpticalGeometry,
    rho0: DensityMatrix,
    p: float,
    fixed_arm: str,
    fixed_position: float,
    positions,
    peak_counts: float,
    seed: int,
    noiseless: bool = False,
) -> PatternScan:
    """Poisson counts with mean peak_counts * P / max(P) over the positions.

    With ``noiseless`` the exact means are recorded instead of draws.
    """
    if peak_counts <= 0:
        raise ValueError("peak_counts must be positive")
    positions = np.asarray(positions, dtype=float)
    if fixed_arm == "signal":
        mean = pattern_intensity(geom, rho0, p, positions, fixed_position)
    elif fixed_arm == "idler":
        mean = pattern_intensity(geom, rho0, p, fixed_position, positions)
    else:
        raise ValueError(f"fixed_arm must be 'signal' or 'idler', got {fixed_arm!r}")
    top = mean.max()
    if top <= 0:
        raise ValueError("pattern vanishes over the requested positions")
    mean = peak_counts * mean / top
    counts = mean if noiseless else derive_rng(seed).poisson(mean).astype(float)
    return PatternScan(fixed_arm, float(fixed_position), positions, counts, p_true=float(p))


class FitResult(NamedTuple):
    p_hat: float
    sigma_p: float
    scale_hat: float


def _profiled(counts: np.ndarray, model: np.ndarray) -> tuple[float, float]:
    """Residual sum of squares with the scale profiled out, plus that scale."""
    mm = float(np.dot(model, model))
    if mm == 0.0:
        return float(np.dot(counts, counts)), 0.0
    amp = float(np.dot(counts, model)) / mm
    resid = counts - amp * model
    return float(np.dot(resid, resid)), amp


def fit_p(scan: PatternScan, geom: OpticalGeometry, rho0: DensityMatrix) -> FitResult:
    """Least-squares estimate of p with the overall scale profiled out.

    Coarse grid over [0, 1] followed by local parabolic refinement of the
    unimodal profiled objective; geometry and the pair density stay fixed.
    sigma_p scales the Gauss-approximation curvature of the objective at
    the minimum by the counting noise of the fitted rates, so idealized
    noiseless scans still quote the counting-noise floor of their count
    level rather than zero.
    """
    period = fringe_period(geom, scan.scanned_arm)
    if scan.span() < period * (1.0 - 1e-9):
        raise ValueError(
            f"scan spans {scan.span():.4g} mm, below one fringe period {period:.4g} mm"
        )
    x_i, x_s = _scan_axes(scan)
    env, fringe = _envelope_and_fringe(geom, rho0, x_i, x_s)
    if np.max(np.abs(env * fringe)) <= 1e-12 * max(np.max(np.abs(env)), 1e-300):
        raise DegenerateScanError("pattern model carries no fringe term; p is unidentifiable")

    top = float(scan.counts.max())
    if top <= 0.0:
        raise ValueError("scan contains no counts")
    # normalizing makes the fit exactly invariant under count rescaling
    counts = scan.counts / top

    def objective(p: float) -> float:
        model = np.maximum(env * (1.0 + (1.0 - p) * fringe), 0.0)
        return _profiled(counts, model)[0]

    grid = np.linspace(0.0, 1.0, _GRID_POINTS)
    values = [objective(p) for p in grid]
    best = int(np.argmin(values))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, _GRID_POINTS - 1)]
    p_hat = _parabolic_min(objective, lo, hi)

    model = np.maximum(env * (1.0 + (1.0 - p_hat) * fringe), 0.0)
    _, amp = _profiled(counts, model)
    scale_hat = amp * top

    # expected Poisson variance of the normalized counts at the fitted rates
    fitted = np.maximum(amp * model, 0.0)
    s2 = float(np.mean(fitted)) / top
    deriv = -env * fringe
    mm = float(np.dot(model, model))
    if mm > 0.0:
        perp = deriv - (float(np.dot(deriv, model)) / mm) * model
    else:
        perp = deriv
    curvature = amp * amp * float(np.dot(perp, perp))
    sigma = math.sqrt(s2 / curvature) if curvature > 0.0 and s2 > 0.0 else math.inf
    return FitResult(p_hat, max(sigma, SIGMA_FLOOR), scale_hat)


def _parabolic_min(fun, lo: float, hi: float) -> float:
    """Minimum of a unimodal function on [lo, hi] by quadratic interpolation.

    Each step fits a parabola through the bracket endpoints and an interior
    point and jumps to its vertex; whenever the vertex degenerates, leaves
    the bracket, or fails to shrink it, the step falls back to bisecting
    the larger half.
    """
    a, b = float(lo), float(hi)
    if b <= a:
        return min(max(a, 0.0), 1.0)
    m = 0.5 * (a + b)
    fa, fm, fb = fun(a), fun(m), fun(b)

    def absorb(x: float, fx: float):
        nonlocal a, fa, m, fm, b, fb
        if x < m:
            u, fu, v, fv = x, fx, m, fm
        else:
            u, fu, v, fv = m, fm, x, fx
        if fu <= fv:
            b, fb = v, fv
            m, fm = u, fu
        else:
            a, fa = u, fu
            m, fm = v, fv

    def bisect_larger_half() -> float:
        return 0.5 * (a + m) if (m - a) > (b - m) else 0.5 * (m + b)

    for _ in range(120):
        width = b - a
        if width < _REFINE_TOL:
            break
        num = (m - a) ** 2 * (fm - fb) - (m - b) ** 2 * (fm - fa)
        den = (m - a) * (fm - fb) - (m - b) * (fm - fa)
        x = m - 0.5 * num / den if den != 0.0 else math.nan
        margin = 1e-3 * width
        if not (a + margin < x < b - margin) or abs(x - m) < 1e-3 * _REFINE_TOL:
            x = bisect_larger_half()
        absorb(x, fun(x))
        if (b - a) > 0.95 * width:
            # force shrinkage when interpolation stalls near one endpoint
            x = bisect_larger_half()
            absorb(x, fun(x))
    return min(max(m, 0.0), 1.0)


def fit_p_joint(
    scan_at_zero: PatternScan,
    scan_at_xpi: PatternScan,
    geom: OpticalGeometry,
    rho0: DensityMatrix,
) -> tuple[FitResult, FitResult]:
    """Independent fits of the two standard fixed positions."""
    return fit_p(scan_at_zero, geom, rho0), fit_p(scan_at_xpi, geom, rho0)
