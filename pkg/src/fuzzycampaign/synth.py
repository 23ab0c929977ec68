"""Seeded synthetic region with planted hot-spot dwellers.

Three kinds of client are generated:

* ``dweller``: planted stressing clients, active almost every slot and always
  inside the small set of peak cells.
* ``transient``: sparse visitors (fewer active slots than the ranking's
  activity floor) who pass through the peak cells during a daily rush window.
  They load the peak cells without ever being rankable.
* ``dispersed``: everyone else, following a two-state home/roam process over
  the ordinary cells.

Peak cells get a capacity equal to their busiest slot, so they are saturated.
Ordinary cells get ``headroom`` times their busiest slot, which stays slack
for any scaling coefficient below ``headroom``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

from .data_model import SLOT_SECONDS, CellRecord, ClientRecord, Dataset, write_dataset
from .errors import InvalidConfig

MOSAIC_SEGMENTS = tuple("ABCDEFGHIJKLMN")
TELENOR_SEGMENTS = ("CA", "MM", "QA", "T", "CC", "VA")
DWELLER, TRANSIENT, DISPERSED = "dweller", "transient", "dispersed"


def _uniform(names):
    return {n: 1.0 / len(names) for n in names}


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    n_cells: int = 50
    n_clients: int = 2000
    T: int = 2016
    mosaic_weights: dict = field(default_factory=lambda: _uniform(MOSAIC_SEGMENTS))
    telenor_weights: dict = field(default_factory=lambda: _uniform(TELENOR_SEGMENTS))
    planted_stressing_fraction: float = 0.05
    transient_fraction: float = 0.10
    peak_cell_count: int = 3
    headroom: float = 12.0
    activity_range: tuple = (0.05, 0.30)
    dweller_activity: float = 0.95
    leave_home: float = 0.10
    return_home: float = 0.40
    transient_slots: tuple = (5, 19)
    rush_start_slot: int = 96  # 08:00
    rush_length: int = 24
    window_start: str = "2017-04-03T00:00:00"

    def __post_init__(self):
        object.__setattr__(self, "activity_range", tuple(self.activity_range))
        object.__setattr__(self, "transient_slots", tuple(self.transient_slots))
        self.validate()

    def validate(self):
        if self.n_cells < 1 or self.n_clients < 1 or self.T < 1:
            raise InvalidConfig("n_cells, n_clients and T must be positive")
        for name in ("mosaic_weights", "telenor_weights"):
            w = getattr(self, name)
            if not w or any(v < 0 for v in w.values()) or abs(sum(w.values()) - 1.0) > 1e-9:
                raise InvalidConfig(f"{name} must be non-negative and sum to 1")
        for name in ("planted_stressing_fraction", "transient_fraction", "dweller_activity", "leave_home", "return_home"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidConfig(f"{name} must be in [0, 1]")
        if self.planted_stressing_fraction + self.transient_fraction > 1.0:
            raise InvalidConfig("planted and transient fractions exceed 1")
        lo, hi = self.activity_range
        if not 0.0 <= lo <= hi <= 1.0:
            raise InvalidConfig("activity_range must satisfy 0 <= lo <= hi <= 1")
        lo, hi = self.transient_slots
        if not 1 <= lo <= hi:
            raise InvalidConfig("transient_slots must satisfy 1 <= lo <= hi")
        if not 0 <= self.peak_cell_count < self.n_cells:
            raise InvalidConfig("peak_cell_count must leave at least one ordinary cell")
        if self.headroom <= 0:
            raise InvalidConfig("headroom must be positive")
        try:
            datetime.fromisoformat(self.window_start)
        except ValueError:
            raise InvalidConfig(f"bad window_start {self.window_start!r}") from None

    @classmethod
    def from_dict(cls, values: dict) -> "SynthConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(values) - known
        if unknown:
            raise InvalidConfig(f"unknown synth keys: {', '.join(sorted(unknown))}")
        try:
            return cls(**values)
        except TypeError as exc:
            raise InvalidConfig(str(exc)) from None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["activity_range"] = list(self.activity_range)
        d["transient_slots"] = list(self.transient_slots)
        return d


@dataclass(frozen=True)
class SynthRegion:
    dataset: Dataset
    roles: dict
    peak_cells: tuple
    timestamps: tuple

    def clients_with_role(self, role: str) -> list[str]:
        return [c for c, r in self.roles.items() if r == role]


def _dispersed_walk(rng, n, T, ordinary, cfg):
    home = ordinary[rng.integers(ordinary.size, size=n)]
    rate = rng.uniform(*cfg.activity_range, size=n)
    roaming = np.zeros(n, dtype=bool)
    rows, slots, cells = [], [], []
    idx = np.arange(n)
    for t in range(T):
        u = rng.random(n)
        roaming = np.where(roaming, u >= cfg.return_home, u < cfg.leave_home)
        active = rng.random(n) < rate
        where = np.where(roaming, ordinary[rng.integers(ordinary.size, size=n)], home)
        rows.append(idx[active])
        slots.append(np.full(int(active.sum()), t))
        cells.append(where[active])
    return np.concatenate(rows), np.concatenate(slots), np.concatenate(cells)


def _dwellers(rng, n, T, peak, cfg):
    active = rng.random((n, T)) < cfg.dweller_activity
    where = peak[rng.integers(peak.size, size=(n, T))]
    r, t = np.nonzero(active)
    return r, t, where[r, t]


def _transients(rng, n, T, hosts, cfg):
    lo, hi = cfg.transient_slots
    days = max(1, T // 288)
    rows, slots, cells = [], [], []
    for i in range(n):
        start = int(rng.integers(days)) * 288 + cfg.rush_start_slot
        window = np.arange(start, start + cfg.rush_length)
        window = window[window < T]
        if window.size == 0:
            window = np.arange(T)
        k = min(int(rng.integers(lo, hi + 1)), window.size)
        chosen = np.sort(rng.choice(window, size=k, replace=False))
        rows.append(np.full(k, i))
        slots.append(chosen)
        cells.append(hosts[rng.integers(hosts.size, size=k)])
    if not rows:
        return (np.zeros(0, dtype=np.int64),) * 3
    return np.concatenate(rows), np.concatenate(slots), np.concatenate(cells)


def generate(cfg: SynthConfig | None = None) -> SynthRegion:
    cfg = cfg or SynthConfig()
    rng = np.random.default_rng(cfg.seed)
    n, J, T = cfg.n_clients, cfg.n_cells, cfg.T

    n_dw = round(cfg.planted_stressing_fraction * n)
    n_tr = round(cfg.transient_fraction * n)
    n_di = n - n_dw - n_tr
    role_of = np.array([DWELLER] * n_dw + [TRANSIENT] * n_tr + [DISPERSED] * n_di)
    role_of = role_of[rng.permutation(n)]

    peak = np.sort(rng.choice(J, size=cfg.peak_cell_count, replace=False))
    ordinary = np.setdiff1d(np.arange(J), peak)
    hosts = peak if peak.size else ordinary

    parts = []
    for role, fn, where in (
        (DWELLER, _dwellers, hosts),
        (TRANSIENT, _transients, hosts),
        (DISPERSED, _dispersed_walk, ordinary),
    ):
        members = np.flatnonzero(role_of == role)
        r, t, j = fn(rng, members.size, T, where, cfg)
        parts.append((members[r], t, j))
    ci = np.concatenate([p[0] for p in parts]).astype(np.int64)
    sl = np.concatenate([p[1] for p in parts]).astype(np.int64)
    ce = np.concatenate([p[2] for p in parts]).astype(np.int64)

    peak_load = np.bincount(sl * J + ce, minlength=T * J).reshape(T, J).max(axis=0)
    capacity = np.where(
        np.isin(np.arange(J), peak),
        np.maximum(1, peak_load),
        np.maximum(1, np.ceil(cfg.headroom * np.maximum(1, peak_load))),
    )
    lon = rng.uniform(15.0, 16.0, size=J).round(6)
    lat = rng.uniform(56.0, 56.5, size=J).round(6)
    cells = tuple(CellRecord(f"cell{j:03d}", float(lon[j]), float(lat[j]), float(capacity[j])) for j in range(J))

    mosaic = _draw(rng, cfg.mosaic_weights, n)
    telenor = _draw(rng, cfg.telenor_weights, n)
    width = max(5, len(str(n)))
    clients = tuple(ClientRecord(f"c{i:0{width}d}", mosaic[i], telenor[i]) for i in range(n))

    d = Dataset.from_arrays(cells, clients, ci, sl, ce, T=T)
    start = datetime.fromisoformat(cfg.window_start)
    step = timedelta(seconds=SLOT_SECONDS)
    stamps = tuple((start + t * step).isoformat() for t in range(T))
    roles = {clients[i].client_id: str(role_of[i]) for i in range(n)}
    return SynthRegion(d, roles, tuple(cells[j].cell_id for j in peak), stamps)


def _draw(rng, weights: dict, n: int) -> list[str]:
    names = list(weights)
    p = np.array([weights[k] for k in names], dtype=float)
    return [names[k] for k in rng.choice(len(names), size=n, p=p / p.sum())]


def write_region(region: SynthRegion, out_dir) -> dict[str, Path]:
    """Write the three dataset CSVs (ISO timestamps) plus ``roles.csv`` ground truth."""
    out = Path(out_dir)
    cells, clients, events = write_dataset(region.dataset, out, region.timestamps)
    roles = out / "roles.csv"
    with roles.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("client_id", "role"))
        for cid in sorted(region.roles):
            w.writerow((cid, region.roles[cid]))
    return {"cells": cells, "clients": clients, "events": events, "roles": roles}
