"""Compiling dephasing channels into frame schedules and back.

An acquisition window is split into n_frames equal time slices; each slice
shows one phase mask realizing one dephasing operator.  Running the film
for the whole window applies the weighted channel whose weights are the
frame fractions, so a target parameter p is representable exactly iff
p * n_frames / d is an integer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .channels import WeightedKrausSet, dephasing_kraus

DEFAULT_FRAMES = 32


class NonRepresentableP(ValueError):
    """Requested p does not sit on the frame grid; carries the two nearest values."""

    def __init__(self, p: float, below: float, above: float):
        self.p = p
        self.below = below
        self.above = above
        super().__init__(
            f"p = {p:.6g} is not representable with this frame count; "
            f"nearest representable values are {below:.6g} and {above:.6g}"
        )


@dataclass(frozen=True)
class FilmSchedule:
    """Ordered operator indices per frame; index d means the identity."""

    d: int
    n_frames: int
    frames: tuple[int, ...]

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"dimension must be >= 2, got {self.d}")
        if self.n_frames < 1:
            raise ValueError("need at least one frame")
        frames = tuple(int(i) for i in self.frames)
        if len(frames) != self.n_frames:
            raise ValueError(f"expected {self.n_frames} frames, got {len(frames)}")
        if any(i < 0 or i > self.d for i in frames):
            raise ValueError("frame indices must lie in {0..d}")
        counts = {j: frames.count(j) for j in set(frames) if j < self.d}
        if len(set(counts.values())) > 1:
            raise ValueError("non-identity operators must appear with equal multiplicity")
        object.__setattr__(self, "frames", frames)

    def operator_counts(self) -> list[int]:
        """Frame count per operator index 0..d."""
        return [self.frames.count(j) for j in range(self.d + 1)]

    def weight_fractions(self) -> list[Fraction]:
        """Exact frame-fraction weights per operator index 0..d."""
        return [Fraction(c, self.n_frames) for c in self.operator_counts()]


def compile_film(d: int, p: float, n_frames: int = DEFAULT_FRAMES) -> FilmSchedule:
    """Schedule realizing the uniform-weight dephasing parameter p.

    Each sign-flip operator occupies p * n_frames / d frames and the
    identity fills the rest; the identity block leads and the operator
    blocks follow in ascending index.  Off-grid p is rejected with the two
    nearest representable values.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if n_frames < 1:
        raise ValueError("need at least one frame")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    per_op = p * n_frames / d
    k = round(per_op)
    if abs(per_op - k) > 1e-9 or k * d > n_frames:
        step = d / n_frames
        below = math.floor(per_op) * step
        above = min(math.ceil(per_op) * step, 1.0)
        raise NonRepresentableP(p, below, above)
    frames = [d] * (n_frames - k * d)
    for j in range(d):
        frames.extend([j] * k)
    return FilmSchedule(d, n_frames, tuple(frames))


def effective_channel(film: FilmSchedule) -> WeightedKrausSet:
    """Time-averaged channel of a schedule: weights are frame fractions."""
    weights = tuple(float(w) for w in film.weight_fractions())
    return WeightedKrausSet(tuple(dephasing_kraus(film.d)), weights)


def mask_phases(film: FilmSchedule, frame_index: int) -> list[float]:
    """Per-slit phases of one frame: pi at the flipped slit, 0 elsewhere."""
    if not 0 <= frame_index < film.n_frames:
        raise ValueError(f"frame index {frame_index} out of range")
    op = film.frames[frame_index]
    return [math.pi if slit == op else 0.0 for slit in range(film.d)]
