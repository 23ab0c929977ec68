"""Command-line front end.

Exit status: 0 on success, 2 on data errors, 64 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .campaign_sim import WARN_CAP, CampaignSpec, validate_recommendation
from .data_model import SYSTEMS, parse_dataset
from .errors import DataError
from .fixtures import REFERENCE_F_IF
from .fuzzy_engine import assess_load, dumps, memberships_from_f_if, ranking_csv, ranking_json
from .estimators import SegmentRanker
from .is_revelation import reveal_is
from .occupancy import build_footprint, build_occupancy
from .pipeline import load_config, pipeline_config, read_labels, run_pipeline, synth_config, write_labels
from .synth import generate, write_region

EX_DATAERR = 2
EX_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser, data: bool = True) -> None:
    p.add_argument("--config", type=Path, help="flat key-value JSON config")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--json", action="store_true", help="print a machine-readable summary")
    if data:
        p.add_argument("--data", type=Path, help="directory holding cells.csv, clients.csv, events.csv")
        p.add_argument("--cells", type=Path)
        p.add_argument("--clients", type=Path)
        p.add_argument("--events", type=Path)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fuzzycampaign", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a synthetic region")
    _add_common(p, data=False)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("reveal", help="label clients IS / notIS")
    _add_common(p)

    p = sub.add_parser("rank", help="grade and rank segments")
    _add_common(p)
    p.add_argument("--system", choices=SYSTEMS, default="mosaic")
    p.add_argument("--labels", type=Path, help="labels.csv from `reveal` (default: run it)")
    p.add_argument("--fixture", action="store_true", help="use the built-in reference grades")

    p = sub.add_parser("assess-load", help="peak load per antenna and for the network")
    _add_common(p)

    p = sub.add_parser("simulate", help="validate a campaign against capacity")
    _add_common(p)
    p.add_argument("--segment", required=True)
    p.add_argument("--expected", type=float, required=True, help="expected number of new clients")
    p.add_argument("--system", choices=SYSTEMS, default="mosaic")
    p.add_argument("--labels", type=Path)
    p.add_argument("--no-baseline", action="store_true", help="check newcomers only, ignoring current load")

    p = sub.add_parser("report", help="run the whole pipeline")
    _add_common(p)
    return parser


def _dataset(args, cfg):
    if args.data is not None:
        paths = [args.data / "cells.csv", args.data / "clients.csv", args.data / "events.csv"]
    else:
        paths = [args.cells, args.clients, args.events]
    if any(p is None for p in paths):
        raise _Usage("give --data DIR or all of --cells/--clients/--events")
    for p in paths:
        if not p.exists():
            raise DataError(f"{p}: no such file")
    return parse_dataset(*paths, T=cfg.T)


class _Usage(Exception):
    pass


def _emit(args, summary: dict, text: str | None = None) -> None:
    if args.json:
        sys.stdout.write(dumps(summary))
    elif text is not None:
        sys.stdout.write(text)


def _labels(args, d, cfg):
    if getattr(args, "labels", None) is not None:
        return read_labels(args.labels)
    labels, _ = reveal_is(d, cfg.revelation())
    return labels


def cmd_synth(args, values):
    region = generate(synth_config(values, args.seed))
    paths = write_region(region, args.out)
    summary = {
        "files": {k: str(v) for k, v in paths.items()},
        "n_events": region.dataset.n_events,
        "peak_cells": list(region.peak_cells),
    }
    _emit(args, summary, f"wrote {len(paths)} files to {args.out}\n")


def cmd_reveal(args, values):
    cfg = pipeline_config(values)
    d = _dataset(args, cfg)
    labels, trace = reveal_is(d, cfg.revelation())
    args.out.mkdir(parents=True, exist_ok=True)
    write_labels(labels, args.out / "labels.csv")
    (args.out / "trace.json").write_text(dumps(trace.to_dict()), encoding="utf-8")
    n_is = sum(v == "IS" for v in labels.values())
    summary = {"n_clients": len(labels), "n_is": n_is, "termination": trace.termination,
               "iterations": len(trace.iterations)}
    _emit(args, summary, f"{n_is} of {len(labels)} clients labelled IS ({trace.termination})\n")


def cmd_rank(args, values):
    cfg = pipeline_config(values)
    if args.fixture:
        memberships = memberships_from_f_if(REFERENCE_F_IF[args.system], cfg.threshold)
    else:
        d = _dataset(args, cfg)
        memberships = SegmentRanker(args.system, cfg.threshold).fit(d, _labels(args, d, cfg)).memberships_
    table = ranking_csv(memberships)
    report = ranking_json(memberships)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / f"ranking_{args.system}.csv").write_text(table, encoding="utf-8")
    (args.out / f"ranking_{args.system}.json").write_text(dumps(report), encoding="utf-8")
    _emit(args, report, table)


def cmd_assess_load(args, values):
    cfg = pipeline_config(values)
    d = _dataset(args, cfg)
    load = assess_load(build_occupancy(d), d.cells, cfg.threshold)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "load.json").write_text(dumps(load.to_dict()), encoding="utf-8")
    context = load.context.value if load.context else "none"
    _emit(args, load.to_dict(), f"infrastructure load {load.infrastructure:.4f}, context {context}\n")


def cmd_simulate(args, values):
    cfg = pipeline_config(values)
    if args.expected < 0:
        raise _Usage("--expected must be non-negative")
    d = _dataset(args, cfg)
    labels = _labels(args, d, cfg)
    memberships = SegmentRanker(args.system, cfg.threshold).fit(d, labels).memberships_
    fp = build_footprint(d, d.segments(args.system))
    load = assess_load(build_occupancy(d), d.cells, cfg.threshold)
    include = cfg.include_baseline and not args.no_baseline
    spec = CampaignSpec(args.segment, args.expected, args.system, include)
    verdict = validate_recommendation(memberships, load.infrastructure, spec, d, fp, cfg.threshold)
    body = verdict.to_dict(warn_cap=None)
    body["config"] = cfg.to_dict()
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "campaign_report.json").write_text(dumps(body), encoding="utf-8")
    shown = verdict.to_dict(warn_cap=cfg.warn_cap or WARN_CAP)
    lines = [f"{shown['verdict']}: alpha={verdict.report.alpha:.6f}, {shown['n_warnings']} warnings"]
    lines += [f"  {w['cell_id']} slot {w['slot']}: {w['projected_load']:.2f} > {w['capacity']:g}" for w in shown["warnings"]]
    _emit(args, shown, "\n".join(lines) + "\n")


def cmd_report(args, values):
    cfg = pipeline_config(values)
    d = _dataset(args, cfg)
    result = run_pipeline(d, cfg, args.out)
    rep = result["report"]
    text = (
        f"{rep['revelation']['n_is']} IS clients; load {rep['load']['infrastructure']:.4f}; "
        + "; ".join(f"{s}: {len(rep['queries'][s]['qualifying'])} qualifying" for s in SYSTEMS)
        + "\n"
    )
    _emit(args, rep, text)


COMMANDS = {
    "synth": cmd_synth,
    "reveal": cmd_reveal,
    "rank": cmd_rank,
    "assess-load": cmd_assess_load,
    "simulate": cmd_simulate,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EX_USAGE
    try:
        values = load_config(args.config)
        COMMANDS[args.command](args, values)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"fuzzycampaign: error: {exc}", file=sys.stderr)
        return EX_USAGE
    except (DataError, ValueError) as exc:
        print(f"fuzzycampaign: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EX_DATAERR
    return 0


if __name__ == "__main__":
    sys.exit(main())
