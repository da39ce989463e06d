"""Songs as piecewise-linear paths through the 63-dimensional embedding space.

Starting at the origin, each token (START, chords..., END) adds its unit
embedding scaled by its duration in beats. The path parameter t runs over
normalized beats, so t=0 is the origin and t=1 the final vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .classes import END, START, ChordClassSequence
from .embedding import CooccurrenceModel


class ZeroLengthPath(ValueError):
    pass


class ParameterOutOfRange(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SongPath:
    vertices: np.ndarray
    knots: tuple[Fraction, ...]
    total_beats: Fraction
    model_fingerprint: str = ""
    boundary_beats: Fraction = Fraction(1)
    song_id: str = ""
    _t: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64)
        if v.ndim != 2 or len(v) != len(self.knots) or len(v) < 2:
            raise ValueError("need at least two vertices, one knot per vertex")
        if self.knots[0] != 0 or self.knots[-1] != 1:
            raise ValueError("knots must run from 0 to 1")
        if any(b <= a for a, b in zip(self.knots, self.knots[1:])):
            raise ValueError("knots must be strictly increasing")
        v.setflags(write=False)
        t = np.array([float(k) for k in self.knots])
        t.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "_t", t)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def segment_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.vertices, axis=0), axis=1)

    @property
    def length(self) -> float:
        return float(self.segment_lengths.sum())

    def __call__(self, t):
        return eval_path(self, t)


def build_path(
    seq: ChordClassSequence,
    model: CooccurrenceModel,
    boundary_beats=Fraction(1),
) -> SongPath:
    """Path for an already reduced and transposed sequence.

    START and END each last *boundary_beats*; the same value must be used for
    every path in a comparison.
    """
    boundary_beats = Fraction(boundary_beats)
    if len(seq) == 0:
        raise ValueError("cannot build a path for an empty sequence")
    if boundary_beats <= 0:
        raise ValueError("boundary_beats must be positive")
    tokens = [START, *seq.classes, END]
    beats = [boundary_beats, *seq.beats, boundary_beats]
    total = sum(beats, Fraction(0))
    if total <= 0 or any(b <= 0 for b in beats):
        raise ZeroLengthPath(f"song {seq.song_id!r} has non-positive durations")

    steps = np.array([float(b) for b in beats])[:, None] * model.embeddings[[t.index for t in tokens]]
    vertices = np.vstack([np.zeros(model.embeddings.shape[1]), np.cumsum(steps, axis=0)])
    knots = [Fraction(0)]
    acc = Fraction(0)
    for b in beats:
        acc += b
        knots.append(acc / total)
    return SongPath(vertices, tuple(knots), total, model.fingerprint, boundary_beats, seq.song_id)


def eval_path(path: SongPath, t):
    """Point(s) on *path* at normalized beat position(s) *t* in [0, 1]."""
    ts = np.asarray(t, dtype=np.float64)
    if np.any((ts < 0) | (ts > 1)) or np.any(np.isnan(ts)):
        raise ParameterOutOfRange(f"t must lie in [0, 1], got {t!r}")
    knots = path._t
    seg = np.clip(np.searchsorted(knots, ts, side="right") - 1, 0, len(knots) - 2)
    t0, t1 = knots[seg], knots[seg + 1]
    w = ((ts - t0) / (t1 - t0))[..., None]
    v0, v1 = path.vertices[seg], path.vertices[seg + 1]
    # Exact endpoints: a sample on a knot returns that vertex bit-for-bit.
    out = np.where(w == 0, v0, np.where(w == 1, v1, v0 + w * (v1 - v0)))
    return out
