"""Command-line entry point.

Exit status: 0 on success, 1 on usage errors, 2 on data errors (unreadable
or malformed corpus/model, unknown song ids, ...).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .chords import ChordSyntaxError
from .classes import ChordClass
from .corpus import MalformedRecord, corpus_stats, load_corpus
from .embedding import CooccurrenceModel, EmptyCorpus, ModelFormatError, build_model, nearest_classes
from .grid import render_comparison, render_grid
from .keys import MissingDeclaredKey, class_name, fifths_distance, format_accidentals, parse_class_name
from .pipeline import WORKERS_ENV, analyze_corpus, analyze_song, default_workers, evaluate_estimation
from .similarity import (
    DEFAULT_SAMPLES,
    MembraneParams,
    ModelMismatch,
    UnknownSong,
    distance_between,
    nearest_songs,
    pairwise_distances,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
FORMATS = ("text", "csv", "json")

DATA_ERRORS = (
    OSError,
    MalformedRecord,
    ChordSyntaxError,
    ModelFormatError,
    EmptyCorpus,
    UnknownSong,
    MissingDeclaredKey,
    ModelMismatch,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass(frozen=True)
class RunConfig:
    corpus_path: str | None = None
    model_path: str | None = None
    samples: int = DEFAULT_SAMPLES
    boundary_beats: Fraction = Fraction(1)
    output_format: str = "text"
    workers: int = 1
    converge: bool = False

    def __post_init__(self):
        if self.samples < 2:
            raise UsageError("--samples must be at least 2")
        if self.boundary_beats <= 0:
            raise UsageError("--boundary-beats must be positive")
        if self.workers < 1:
            raise UsageError("--workers must be positive")
        if self.output_format not in FORMATS:
            raise UsageError(f"--format must be one of {', '.join(FORMATS)}")

    @property
    def params(self) -> MembraneParams:
        return MembraneParams(samples=self.samples, convergence_check=self.converge)

    @classmethod
    def from_args(cls, args) -> RunConfig:
        fmt = getattr(args, "format", None) or "text"
        if getattr(args, "csv", False):
            fmt = "csv"
        return cls(
            corpus_path=getattr(args, "corpus", None),
            model_path=getattr(args, "model", None),
            samples=getattr(args, "samples", DEFAULT_SAMPLES),
            boundary_beats=getattr(args, "boundary_beats", Fraction(1)),
            output_format=fmt,
            workers=default_workers() if getattr(args, "workers", None) is None else args.workers,
            converge=getattr(args, "converge", False),
        )


def _class_arg(text: str) -> ChordClass:
    try:
        return parse_class_name(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _fraction_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _csv_text(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _model_for(cfg: RunConfig, corpus) -> CooccurrenceModel:
    if cfg.model_path:
        return CooccurrenceModel.load(cfg.model_path)
    return build_model(corpus, cfg.workers)


def cmd_stats(args, cfg: RunConfig, out) -> int:
    stats = corpus_stats(load_corpus(cfg.corpus_path))
    if cfg.output_format == "csv":
        out.write(stats.to_csv())
    elif cfg.output_format == "json":
        out.write(_json_text({name: {"number": n, "percentage": round(p, 3)} for name, n, p in stats.rows()}))
    else:
        out.write(stats.to_text())
    return EXIT_OK


def _keys_text(keys) -> str:
    return "/".join(str(k) for k in sorted(keys, key=lambda k: (abs(k.accidentals), k.accidentals)))


def cmd_estimate_keys(args, cfg: RunConfig, out) -> int:
    corpus = load_corpus(cfg.corpus_path)
    rows = []
    for a in analyze_corpus(corpus, cfg.workers):
        declared = a.song.declared_key
        est = a.estimate
        dist = ""
        if est is not None and not est.ambiguous and declared is not None:
            dist = format_accidentals(fifths_distance(est.winner, declared))
        rows.append({
            "id": a.song.id,
            "title": a.song.title,
            "declared": "" if declared is None else str(declared),
            "estimate": "" if est is None else _keys_text(est.winners),
            "resolved": str(a.key),
            "distance": dist,
            "ambiguous": bool(est is not None and est.ambiguous),
        })
    rated = [s for s in corpus if s.declared_key is not None]
    report = evaluate_estimation(rated)
    footer = report.rows()

    if cfg.output_format == "csv":
        table = [list(rows[0]) if rows else ["id"]] + [[str(v) for v in r.values()] for r in rows]
        out.write(_csv_text(table))
        out.write("\n")
        out.write(_csv_text([["distance", "number", "percent"]] + [[l, n, f"{p:.1f}"] for l, n, p in footer]))
    elif cfg.output_format == "json":
        out.write(_json_text({
            "songs": rows,
            "summary": [{"distance": l, "number": n, "percent": round(p, 1)} for l, n, p in footer],
        }))
    else:
        wid = max([len(r["id"]) for r in rows] + [2])
        out.write(f"{'id':<{wid}}  {'declared':>8}  {'estimate':>12}  {'resolved':>8}  {'dist':>4}  ambig\n")
        for r in rows:
            out.write(
                f"{r['id']:<{wid}}  {r['declared']:>8}  {r['estimate']:>12}  {r['resolved']:>8}"
                f"  {r['distance']:>4}  {'yes' if r['ambiguous'] else ''}\n"
            )
        out.write(f"\nDistance  Number  Percent   ({report.total} songs with a declared key)\n")
        for label, n, pct in footer:
            out.write(f"{label:>8}  {n:>6}  {pct:>6.1f}%\n")
    return EXIT_OK


def _lookup(corpus, song_id: str):
    if song_id not in corpus:
        raise UnknownSong(song_id)
    return corpus[song_id]


def cmd_roman(args, cfg: RunConfig, out) -> int:
    corpus = load_corpus(cfg.corpus_path)
    out.write(render_grid(analyze_song(_lookup(corpus, args.song)), per_line=args.per_line, ascii=args.ascii))
    return EXIT_OK


def cmd_compare(args, cfg: RunConfig, out) -> int:
    corpus = load_corpus(cfg.corpus_path)
    a = analyze_song(_lookup(corpus, args.song_a))
    b = analyze_song(_lookup(corpus, args.song_b))
    out.write(render_comparison(a, b, ascii=args.ascii))
    return EXIT_OK


def cmd_build_model(args, cfg: RunConfig, out) -> int:
    corpus = load_corpus(cfg.corpus_path)
    model = build_model(corpus, cfg.workers)
    model.save(args.output)
    out.write(f"wrote {args.output}: {model.corpus_size} songs, {int(model.counts.sum())} co-occurrences, "
              f"{len(model.zero_rows)} unseen classes, fingerprint {model.fingerprint}\n")
    return EXIT_OK


def cmd_nearest_class(args, cfg: RunConfig, out) -> int:
    model = CooccurrenceModel.load(args.model_file)
    ranked = nearest_classes(model, args.query, args.k)
    q = class_name(args.query, args.ascii)
    if cfg.output_format == "json":
        out.write(_json_text([{"class": class_name(c, args.ascii), "similarity": round(s, 6)} for c, s in ranked]))
        return EXIT_OK
    # Listed ascending, the query itself last.
    rows = [(class_name(c, args.ascii), s) for c, s in reversed(ranked)]
    if cfg.output_format == "csv":
        out.write(_csv_text([["class", q]] + [[n, f"{s:.3f}"] for n, s in rows]))
        return EXIT_OK
    if not rows:
        out.write(f"{q}: class never occurs in the model's corpus\n")
        return EXIT_OK
    w = max(len(n) for n, _ in rows + [("Class", 0)])
    out.write(f"{'Class':<{w}}  {q:>6}\n")
    for n, s in rows:
        out.write(f"{n:<{w}}  {s:>6.3f}\n")
    return EXIT_OK


def cmd_distance(args, cfg: RunConfig, out) -> int:
    corpus = load_corpus(cfg.corpus_path)
    model = _model_for(cfg, corpus)
    d = distance_between(corpus, args.song_a, args.song_b, model, cfg.params, cfg.boundary_beats)
    out.write(f"{d:.6f}\n")
    return EXIT_OK


def cmd_search(args, cfg: RunConfig, out) -> int:
    corpus = load_corpus(cfg.corpus_path)
    _lookup(corpus, args.song)
    model = _model_for(cfg, corpus)
    result = nearest_songs(args.song, corpus, model, cfg.params, args.k, cfg.boundary_beats, cfg.workers)
    rows = [(rank, sid, corpus[sid].title, d) for rank, (sid, d) in enumerate(result.ranked, start=1)]
    if cfg.output_format == "csv":
        out.write(_csv_text([["rank", "id", "title", "M"]] + [[r, i, t, f"{d:.6f}"] for r, i, t, d in rows]))
    elif cfg.output_format == "json":
        out.write(_json_text({
            "query": args.song,
            "samples": cfg.samples,
            "ranked": [{"rank": r, "id": i, "title": t, "M": d} for r, i, t, d in rows],
        }))
    else:
        wi = max([len(i) for _, i, _, _ in rows] + [2])
        wt = max([len(t) for _, _, t, _ in rows] + [5])
        out.write(f"query: {args.song} ({corpus[args.song].title})\n")
        out.write(f"{'rank':>4}  {'id':<{wi}}  {'title':<{wt}}  {'M':>12}\n")
        for r, i, t, d in rows:
            out.write(f"{r:>4}  {i:<{wi}}  {t:<{wt}}  {d:>12.6f}\n")
    return EXIT_OK


def cmd_pairwise(args, cfg: RunConfig, out) -> int:
    corpus = load_corpus(cfg.corpus_path)
    model = _model_for(cfg, corpus)
    ids, mat = pairwise_distances(corpus, model, cfg.params, cfg.boundary_beats, cfg.workers)
    if cfg.output_format == "json":
        out.write(_json_text({"ids": ids, "distances": [[float(x) for x in row] for row in mat]}))
    elif cfg.output_format == "csv":
        out.write(_csv_text([[""] + ids] + [[sid] + [f"{x:.6f}" for x in row] for sid, row in zip(ids, mat)]))
    else:
        w = max([len(i) for i in ids] + [1])
        cw = max(w, 10)
        out.write(" " * w + "".join(f"  {i:>{cw}}" for i in ids) + "\n")
        for sid, row in zip(ids, mat):
            out.write(f"{sid:<{w}}" + "".join(f"  {x:>{cw}.4f}" for x in row) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="contrafact", description="Chord-progression vector space and contrafact search.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def fmt(sp, csv_flag=True):
        sp.add_argument("--format", choices=FORMATS, default="text")
        if csv_flag:
            sp.add_argument("--csv", action="store_true", help="shorthand for --format csv")

    def workers(sp):
        sp.add_argument("--workers", type=int, default=None,
                        help=f"parallel workers (default: ${WORKERS_ENV} or 1)")

    def path_opts(sp):
        sp.add_argument("--model", help="model file from build-model (default: build from the corpus)")
        sp.add_argument("--samples", "-N", type=int, default=DEFAULT_SAMPLES, help="membrane samples N")
        sp.add_argument("--converge", action="store_true", help="double N until relative change < 1e-3")
        sp.add_argument("--boundary-beats", type=_fraction_arg, default=Fraction(1),
                        help="duration given to START and END (default 1)")
        workers(sp)

    sp = sub.add_parser("stats", help="chord-category histogram")
    sp.add_argument("corpus")
    fmt(sp)
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("estimate-keys", help="per-song key-signature estimates and agreement summary")
    sp.add_argument("corpus")
    sp.add_argument("--report", choices=FORMATS, dest="format", default="text")
    workers(sp)
    sp.set_defaults(func=cmd_estimate_keys)

    sp = sub.add_parser("roman", help="Roman-numeral measure grid for one song")
    sp.add_argument("corpus")
    sp.add_argument("--song", required=True)
    sp.add_argument("--per-line", type=int, default=4)
    sp.add_argument("--ascii", action="store_true")
    sp.set_defaults(func=cmd_roman)

    sp = sub.add_parser("compare", help="two Roman-numeral grids side by side")
    sp.add_argument("corpus")
    sp.add_argument("--song-a", required=True)
    sp.add_argument("--song-b", required=True)
    sp.add_argument("--ascii", action="store_true")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("build-model", help="build and save the co-occurrence model")
    sp.add_argument("corpus")
    sp.add_argument("-o", "--output", required=True)
    workers(sp)
    sp.set_defaults(func=cmd_build_model)

    sp = sub.add_parser("nearest-class", help="chord classes closest to a class by cosine similarity")
    sp.add_argument("model_file")
    sp.add_argument("--class", dest="query", type=_class_arg, required=True, help="e.g. bii7, iim, <START>")
    sp.add_argument("-k", type=int, default=5, help="neighbours besides the query itself")
    sp.add_argument("--ascii", action="store_true")
    fmt(sp)
    sp.set_defaults(func=cmd_nearest_class)

    sp = sub.add_parser("distance", help="membrane-area distance between two songs")
    sp.add_argument("corpus")
    sp.add_argument("--song-a", required=True)
    sp.add_argument("--song-b", required=True)
    path_opts(sp)
    sp.set_defaults(func=cmd_distance)

    sp = sub.add_parser("search", help="songs closest to a query song")
    sp.add_argument("corpus")
    sp.add_argument("--song", required=True)
    sp.add_argument("-k", type=int, default=10)
    path_opts(sp)
    fmt(sp)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("pairwise", help="full song-by-song distance matrix")
    sp.add_argument("corpus")
    path_opts(sp)
    fmt(sp)
    sp.set_defaults(func=cmd_pairwise)
    return p


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "k", 1) < 1:
            raise UsageError("-k must be at least 1")
        if args.command == "nearest-class":
            # Table-style listings include the query, so ask for k+1 rows.
            args.k += 1
        cfg = RunConfig.from_args(args)
        return args.func(args, cfg, out)
    except UsageError as e:
        msg = str(e)
        err.write(f"{msg}\n" if msg.startswith("contrafact") else f"contrafact: error: {msg}\n")
        return EXIT_USAGE
    except SystemExit as e:
        # --help exits 0; anything else from argparse is a usage problem.
        return EXIT_OK if not e.code else EXIT_USAGE
    except DATA_ERRORS as e:
        err.write(f"contrafact: error: {e}\n")
        return EXIT_DATA


def main() -> None:
    sys.exit(run())
