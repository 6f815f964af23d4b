"""Command-line front end.

    qvol survey --preset table1 --samples 100000 --seed 1 --out table1.csv
    qvol survey --dims 2x2 --rank 4 --q 2,inf --predicates entropic_positive,ppt
    qvol state --load bell.txt --q-grid 1.1:100:60 --trace-q
    qvol replay table1.csv.manifest.json
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, criteria
from .criteria import QGrid
from .entropy import EntropyParams, format_q, reduced_spectrum
from .errors import QvolError, SamplingError, UnknownPreset
from .io import MatrixFileError, read_matrix_file, to_csv_text
from .linalg import BipartiteDims
from .sampling import DensityMatrix, SampleSpec, sample_state
from .survey import PREDICATES, PRESETS, SurveyConfig, default_workers, preset, run_many

log = logging.getLogger("qvol")


def _q_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(EntropyParams.parse(t).q for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _dims(text: str) -> BipartiteDims:
    try:
        return BipartiteDims.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _grid(text: str) -> QGrid:
    try:
        return QGrid.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _predicates(text: str) -> tuple[str, ...]:
    preds = tuple(p.strip() for p in text.split(",") if p.strip())
    bad = [p for p in preds if p not in PREDICATES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown predicate(s) {bad}; choose from {', '.join(PREDICATES)}")
    return preds


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qvol", description="State-space volumes of conditional q-entropy criteria.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("survey", help="Monte Carlo volume estimates, CSV output")
    s.add_argument("--preset", choices=PRESETS)
    s.add_argument("--dims", type=_dims, help="N1xN2, e.g. 2x3")
    s.add_argument("--rank", type=int, help="state rank (default: full)")
    s.add_argument("--q", type=_q_list, default=(), help="comma-separated q values; 'inf' allowed")
    s.add_argument("--predicates", type=_predicates, help=f"comma-separated subset of {', '.join(PREDICATES)}")
    s.add_argument("--samples", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=None, help="threads (default: $QVOL_WORKERS or CPU count)")
    s.add_argument("--q-grid", type=_grid, default=None, help="monotonicity grid START:STOP:COUNT[:noinf]")
    s.add_argument("--conditioning", choices=("A", "B", "both"), default="A",
                   help="monotonicity scan of S(B|A) (A), S(A|B) (B) or both")
    s.add_argument("--n1", type=int, help="preset override: restrict dimension sweeps to this N1")
    s.add_argument("--d", type=int, help="preset override: ppt_agreement D x D")
    s.add_argument("--out", type=Path, help="CSV path (default: stdout); a manifest is written next to it")
    s.set_defaults(func=cmd_survey, subparser=s)

    t = sub.add_parser("state", help="diagnostics for a single state")
    src = t.add_mutually_exclusive_group(required=True)
    src.add_argument("--load", type=Path, help="matrix file: 'dims N1 N2' then 'row col real imag' lines")
    src.add_argument("--sample", action="store_true", help="draw a state from --dims/--rank/--seed/--index")
    t.add_argument("--dims", type=_dims, default=BipartiteDims(2, 2))
    t.add_argument("--rank", type=int)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--index", type=int, default=0)
    t.add_argument("--q", type=_q_list, default=(2.0, 4.0, 8.0, 16.0, math.inf))
    t.add_argument("--q-grid", type=_grid, default=QGrid.default())
    t.add_argument("--kind", choices=("tsallis", "renyi"), default="tsallis")
    t.add_argument("--conditioning", choices=("A", "B", "both"), default="A")
    t.add_argument("--trace-q", action="store_true", help="print S_q(B|A) and S_q(A|B) along the grid")
    t.set_defaults(func=cmd_state, subparser=t)

    r = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    r.add_argument("manifest", type=Path)
    r.add_argument("--out", type=Path, help="write to this path instead of the recorded one")
    r.set_defaults(func=cmd_replay, subparser=r)
    return parser


# --------------------------------------------------------------------------
# survey

def _configs(args, parser) -> list[SurveyConfig]:
    workers = args.workers if args.workers is not None else default_workers()
    extra = {"samples": args.samples, "seed": args.seed, "workers": workers,
             "conditioning": args.conditioning}
    if args.q_grid is not None:
        extra["grid"] = args.q_grid
    if args.preset:
        if args.dims or args.predicates or args.rank:
            parser.error("--preset cannot be combined with --dims/--rank/--predicates")
        return preset(args.preset, {**extra, "n1": args.n1, "d": args.d})
    if not (args.dims and args.predicates):
        parser.error("either --preset or both --dims and --predicates are required")
    return [SurveyConfig(args.dims, rank=args.rank, q_list=args.q, predicates=args.predicates, **extra)]


def cmd_survey(args, parser, argv) -> int:
    started = time.perf_counter()
    try:
        configs = _configs(args, parser)
    except (ValueError, UnknownPreset) as exc:
        parser.error(str(exc))
    try:
        results = run_many(configs)
    except SamplingError as exc:
        print(f"qvol: numerical failure at sample_index={exc.sample_index}: {exc.cause}", file=sys.stderr)
        return 1
    except QvolError as exc:
        print(f"qvol: numerical failure: {exc}", file=sys.stderr)
        return 1
    text = to_csv_text(list(zip(configs, results)))
    if args.out is None:
        sys.stdout.write(text)
        return 0
    args.out.write_text(text)
    manifest = {
        "command_line": list(argv),
        "configs": [c.snapshot() for c in configs],
        "seed": args.seed,
        "samples": [c.samples for c in configs],
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "duration_seconds": round(time.perf_counter() - started, 3),
    }
    Path(str(args.out) + ".manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    log.info("wrote %s", args.out)
    return 0


def cmd_replay(args, parser, argv) -> int:
    manifest = json.loads(args.manifest.read_text())
    recorded = list(manifest["command_line"])
    if args.out is not None:
        # drop the recorded --out and its value
        cleaned, skip = [], False
        for tok in recorded:
            if skip:
                skip = False
                continue
            if tok == "--out":
                skip = True
                continue
            if tok.startswith("--out="):
                continue
            cleaned.append(tok)
        recorded = cleaned + ["--out", str(args.out)]
    return main(recorded)


# --------------------------------------------------------------------------
# state

def _fmt_vec(v) -> str:
    return "[" + ", ".join(f"{x:.10g}" for x in v) + "]"


def _load_state(args) -> DensityMatrix:
    if args.load is not None:
        dims, m = read_matrix_file(args.load)
        return DensityMatrix.from_matrix(m, dims, trace_tol=1e-8)
    rank = args.rank if args.rank is not None else args.dims.n
    return sample_state(SampleSpec(args.dims, rank, args.seed, args.index))


def state_report(rho: DensityMatrix, q_values, grid: QGrid, kind: str, conditioning: str,
                 trace_q: bool) -> str:
    ra = reduced_spectrum(rho, "A")
    rb = reduced_spectrum(rho, "B")
    lines = [
        f"dims            {rho.dims}",
        f"spectrum        {_fmt_vec(rho.spectrum)}",
        f"spectrum(rho_A) {_fmt_vec(ra)}",
        f"spectrum(rho_B) {_fmt_vec(rb)}",
        f"min eig(PT)     {criteria.pt_min_eigenvalue(rho):.10g}",
        "",
        "verdicts",
    ]
    for q in q_values:
        lines.append(f"  entropic_positive q={format_q(q):<6} {criteria.entropic_inequalities_hold(rho, q)}")
    lines += [
        f"  ppt                      {criteria.ppt_holds(rho)}",
        f"  majorization             {criteria.majorization_holds(rho)}",
        f"  monotonic_tsallis ({conditioning})    {criteria.monotonicity_scan(rho, conditioning, 'tsallis', grid)}",
        f"  monotonic_renyi ({conditioning})      {criteria.monotonicity_scan(rho, conditioning, 'renyi', grid)}",
    ]
    if trace_q:
        lines += ["", f"# {kind} conditional entropies", "q,S(B|A),S(A|B)"]
        curve_ba = criteria.conditional_curve(rho.spectrum, ra, kind, grid)
        curve_ab = criteria.conditional_curve(rho.spectrum, rb, kind, grid)
        for q, v1, v2 in zip(grid.values(), curve_ba, curve_ab):
            lines.append(f"{format_q(q)},{v1:.17g},{v2:.17g}")
    return "\n".join(lines) + "\n"


def cmd_state(args, parser, argv) -> int:
    try:
        rho = _load_state(args)
    except (MatrixFileError, QvolError, ValueError, OSError) as exc:
        print(f"qvol: cannot use state: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(state_report(rho, args.q, args.q_grid, args.kind, args.conditioning, args.trace_q))
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args, args.subparser, argv)


if __name__ == "__main__":
    sys.exit(main())
