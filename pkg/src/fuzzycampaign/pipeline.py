"""End-to-end run: reveal IS clients, grade segments, assess load, answer the query."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Mapping

from .data_model import DEFAULT_T, SYSTEMS, Dataset
from .errors import InvalidConfig, MalformedRow
from .fuzzy_engine import THRESHOLD, assess_load, dumps, query, ranking_csv, ranking_json
from .is_revelation import IS, NOT_IS, RevelationConfig, reveal_is
from .estimators import SegmentRanker
from .lp_solver import X_MAX
from .occupancy import ACTIVITY_FLOOR, TOP_FRACTION, build_occupancy
from .synth import SynthConfig


@dataclass(frozen=True)
class PipelineConfig:
    head_fraction: float = 0.01
    bottom_fraction: float = 0.01
    x_max: float = X_MAX
    activity_floor: int = ACTIVITY_FLOOR
    top_fraction: float = TOP_FRACTION
    threshold: float = THRESHOLD
    include_baseline: bool = True
    normalize: bool = False
    zero_tol: float = 1e-9
    warn_cap: int = 20
    T: int = DEFAULT_T

    def __post_init__(self):
        for name in ("head_fraction", "bottom_fraction", "top_fraction", "threshold"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise InvalidConfig(f"{name} must be in (0, 1], got {v!r}")
        if not self.x_max > 0:
            raise InvalidConfig("x_max must be positive")
        if self.activity_floor < 0 or self.warn_cap < 0 or self.T < 1:
            raise InvalidConfig("activity_floor and warn_cap must be >= 0, T >= 1")

    def revelation(self) -> RevelationConfig:
        return RevelationConfig(
            self.head_fraction, self.bottom_fraction, self.x_max, self.activity_floor,
            self.top_fraction, self.normalize, self.zero_tol,
        )

    def to_dict(self) -> dict:
        return asdict(self)


PIPELINE_KEYS = {f.name for f in fields(PipelineConfig)}
SYNTH_KEYS = {f.name for f in fields(SynthConfig)}


def load_config(path) -> dict:
    """Flat key-value JSON; every key must belong to the pipeline or synth settings."""
    if path is None:
        return {}
    try:
        values = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidConfig(f"cannot read config {path}: {exc}") from None
    if not isinstance(values, dict):
        raise InvalidConfig("config must be a JSON object")
    unknown = set(values) - PIPELINE_KEYS - SYNTH_KEYS
    if unknown:
        raise InvalidConfig(f"unknown config keys: {', '.join(sorted(unknown))}")
    return values


def pipeline_config(values: Mapping) -> PipelineConfig:
    try:
        return PipelineConfig(**{k: v for k, v in values.items() if k in PIPELINE_KEYS})
    except TypeError as exc:
        raise InvalidConfig(str(exc)) from None


def synth_config(values: Mapping, seed: int | None = None) -> SynthConfig:
    values = {k: v for k, v in values.items() if k in SYNTH_KEYS}
    if seed is not None:
        values["seed"] = seed
    return SynthConfig.from_dict(values)


def write_labels(labels: Mapping[str, str], path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("client_id", "label"))
        for cid in sorted(labels):
            w.writerow((cid, labels[cid]))


def read_labels(path) -> dict[str, str]:
    out = {}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["client_id", "label"]:
            raise MalformedRow(1, "expected header client_id,label", path)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2 or row[1].strip() not in (IS, NOT_IS):
                raise MalformedRow(lineno, "expected client_id,IS|notIS", path)
            out[row[0].strip()] = row[1].strip()
    return out


def run_pipeline(d: Dataset, cfg: PipelineConfig | None = None, out_dir=None) -> dict:
    """Run every step on ``d``; returns the report and writes files when ``out_dir`` is set."""
    cfg = cfg or PipelineConfig()
    labels, trace = reveal_is(d, cfg.revelation())
    load = assess_load(build_occupancy(d), d.cells, cfg.threshold)

    rankings, answers, memberships = {}, {}, {}
    for system in SYSTEMS:
        ranker = SegmentRanker(system, cfg.threshold).fit(d, labels)
        memberships[system] = ranker.memberships_
        rankings[system] = ranking_json(ranker.memberships_)
        answers[system] = query(ranker.memberships_, load.infrastructure, threshold=cfg.threshold).to_dict()

    n_is = sum(1 for v in labels.values() if v == IS)
    report = {
        "config": cfg.to_dict(),
        "dataset": {
            "n_cells": len(d.cells),
            "n_clients": len(d.clients),
            "n_events": d.n_events,
            "T": d.T,
            "duplicates_collapsed": d.stats.duplicates_collapsed,
            "window_start": d.stats.window_start,
        },
        "revelation": {
            "n_is": n_is,
            "is_share": n_is / len(d.clients) if d.clients else 0.0,
            "termination": trace.termination,
            "iterations": len(trace.iterations),
        },
        "load": load.to_dict(),
        "rankings": rankings,
        "queries": answers,
    }

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_labels(labels, out / "labels.csv")
        (out / "trace.json").write_text(dumps(trace.to_dict()), encoding="utf-8")
        (out / "load.json").write_text(dumps(load.to_dict()), encoding="utf-8")
        for system in SYSTEMS:
            (out / f"ranking_{system}.csv").write_text(ranking_csv(memberships[system]), encoding="utf-8")
            (out / f"ranking_{system}.json").write_text(dumps(rankings[system]), encoding="utf-8")
        (out / "report.json").write_text(dumps(report), encoding="utf-8")
    return {"report": report, "labels": labels, "trace": trace, "memberships": memberships, "load": load}
