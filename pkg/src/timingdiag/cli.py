"""Command-line client: one subcommand per pipeline stage.

``run`` simulates a scenario and writes its artifacts; ``analyze`` re-runs the
statistics on an existing records CSV (which may come from hardware); ``render``
turns a report into SVG figures; ``serve`` starts the HTTP service exposing
the same operations. All randomness comes from the scenario seed.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .errors import TimingDiagError
from .campaign import RecordStore
from .pipeline import analyze, report_json_text, run_scenario
from .scenario import SVG_ARTIFACTS, load_scenario
from .svgplot import render_report_artifacts


def _write(path: str, text: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _emit_artifacts(out_dir: str, artifacts: list[str], store: RecordStore | None,
                    report: dict) -> list[str]:
    written = []
    if store is not None and "records" in artifacts:
        path = os.path.join(out_dir, "records.csv")
        _write(path, store.to_csv_text())
        written.append(path)
    if "report" in artifacts:
        path = os.path.join(out_dir, "report.json")
        _write(path, report_json_text(report))
        written.append(path)
    svg_kinds = [a for a in artifacts if a in SVG_ARTIFACTS]
    for name, svg in render_report_artifacts(report, svg_kinds).items():
        path = os.path.join(out_dir, name)
        _write(path, svg)
        written.append(path)
    return written


def cmd_run(args: argparse.Namespace) -> int:
    sc = load_scenario(args.scenario)
    out_dir = args.out or sc.outputs.directory
    result = run_scenario(sc, workers=args.workers)
    report = analyze(sc, result.store, result)
    artifacts = list(sc.outputs.artifacts)
    if "records" not in artifacts:
        artifacts.insert(0, "records")
    if "report" not in artifacts:
        artifacts.insert(1, "report")
    for path in _emit_artifacts(out_dir, artifacts, result.store, report):
        print(path)
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    sc = load_scenario(args.scenario)
    with open(args.records, "r", encoding="utf-8") as fh:
        store = RecordStore.from_csv_text(fh.read())
    out_dir = args.out or sc.outputs.directory
    report = analyze(sc, store)
    artifacts = [a for a in sc.outputs.artifacts if a != "records"]
    if "report" not in artifacts:
        artifacts.insert(0, "report")
    for path in _emit_artifacts(out_dir, artifacts, None, report):
        print(path)
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    with open(args.report, "r", encoding="utf-8") as fh:
        report = json.load(fh)
    kinds = args.kinds.split(",") if args.kinds else list(SVG_ARTIFACTS)
    out_dir = args.out
    for name, svg in render_report_artifacts(report, kinds).items():
        path = os.path.join(out_dir, name)
        _write(path, svg)
        print(path)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="timingdiag",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a scenario and write artifacts")
    p.add_argument("scenario", help="scenario file path")
    p.add_argument("--out", default=None, help="output directory (default: scenario [outputs])")
    p.add_argument("--workers", type=int, default=1, help="parallel sweep units")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("analyze", help="analyze an existing records CSV")
    p.add_argument("records", help="records.csv path")
    p.add_argument("scenario", help="scenario file path")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("render", help="render SVG figures from a report")
    p.add_argument("report", help="report.json path")
    p.add_argument("--out", default=".", dest="out")
    p.add_argument("--kinds", default=None,
                   help=f"comma list from: {','.join(SVG_ARTIFACTS)}")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("serve", help="start the HTTP analysis service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    # TIMINGDIAG_LOG controls verbosity only; all randomness is scenario-seeded.
    logging.basicConfig(level=os.environ.get("TIMINGDIAG_LOG", "WARNING").upper())
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TimingDiagError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
