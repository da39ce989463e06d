"""Measure-grid Roman-numeral rendering, single song or two side by side."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .classes import ChordClass
from .keys import class_name
from .pipeline import SongAnalysis


@dataclass(frozen=True)
class Measure:
    # Chords that start in this measure, as (offset in beats, class).
    onsets: tuple[tuple[Fraction, ChordClass], ...]
    # What is sounding over the whole measure, including a chord held over the barline.
    sounding: tuple[tuple[Fraction, ChordClass], ...]

    def text(self, ascii: bool = False) -> str:
        if not self.onsets:
            return "%"
        return " ".join(class_name(c, ascii) for _, c in self.onsets)


def measures(analysis: SongAnalysis) -> list[Measure]:
    bpm = Fraction(analysis.song.beats_per_measure)
    seq = analysis.transposed
    spans = []
    start = Fraction(0)
    for cls, beats in zip(seq.classes, seq.beats):
        spans.append((start, start + beats, cls))
        start += beats
    n = int(-(-start // bpm))
    out = []
    for m in range(n):
        lo, hi = m * bpm, (m + 1) * bpm
        onsets = tuple((s - lo, c) for s, e, c in spans if lo <= s < hi)
        sounding = tuple((max(s, lo) - lo, c) for s, e, c in spans if s < hi and e > lo)
        out.append(Measure(onsets, sounding))
    return out


def _rows(cells: list[str], per_line: int) -> list[str]:
    width = max((len(c) for c in cells), default=1)
    lines = []
    for i in range(0, len(cells), per_line):
        chunk = cells[i : i + per_line]
        lines.append(f"{i + 1:>3} | " + " | ".join(c.ljust(width) for c in chunk) + " |")
    return lines


def render_grid(analysis: SongAnalysis, per_line: int = 4, ascii: bool = False) -> str:
    song = analysis.song
    head = f"{song.title or song.id} [{song.id}]  key signature: {analysis.key}"
    cells = [m.text(ascii) for m in measures(analysis)]
    return "\n".join([head, *_rows(cells, per_line)]) + "\n"


def differing_measures(a: SongAnalysis, b: SongAnalysis) -> list[int]:
    ma, mb = measures(a), measures(b)
    n = max(len(ma), len(mb))
    return [
        i
        for i in range(n)
        if i >= len(ma) or i >= len(mb) or ma[i].sounding != mb[i].sounding
    ]


def render_comparison(a: SongAnalysis, b: SongAnalysis, ascii: bool = False) -> str:
    """Two grids in parallel columns, one measure per line; ``*`` marks a difference."""
    ma, mb = measures(a), measures(b)
    diff = set(differing_measures(a, b))
    left = [m.text(ascii) for m in ma]
    right = [m.text(ascii) for m in mb]
    wl = max([len(x) for x in left] + [len(a.song.title or a.song.id)])
    wr = max([len(x) for x in right] + [len(b.song.title or b.song.id)])
    lines = [
        f"      {(a.song.title or a.song.id):<{wl}}   {(b.song.title or b.song.id):<{wr}}",
        f"      {('key ' + str(a.key)):<{wl}}   {('key ' + str(b.key)):<{wr}}",
    ]
    for i in range(max(len(ma), len(mb))):
        mark = "*" if i in diff else " "
        la = left[i] if i < len(left) else ""
        rb = right[i] if i < len(right) else ""
        lines.append(f"{mark}{i + 1:>3}  {la:<{wl}} | {rb:<{wr}}".rstrip())
    lines.append(f"{len(diff)} differing measure(s)")
    return "\n".join(lines) + "\n"
