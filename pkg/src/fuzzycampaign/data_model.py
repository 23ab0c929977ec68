"""Domain types and CSV ingestion for mobility datasets.

A :class:`Dataset` is an immutable bundle of a cell catalog, a client catalog
and the served-by events, one per (client, 5-minute slot). Events are kept as
three parallel integer arrays (client index, slot, cell index) sorted by
client then slot, which is the layout every downstream tensor build wants.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import EmptyDataset, MalformedRow, UnknownCell, UnknownClient

SLOT_SECONDS = 300
DEFAULT_T = 2016

CELL_COLUMNS = ("cell_id", "lon", "lat", "capacity")
CLIENT_COLUMNS = ("client_id", "mosaic_segment", "telenor_segment")
EVENT_COLUMNS = ("client_id", "timestamp", "cell_id")

SYSTEMS = ("mosaic", "telenor")


@dataclass(frozen=True)
class CellRecord:
    cell_id: str
    lon: float
    lat: float
    capacity: float


@dataclass(frozen=True)
class ClientRecord:
    client_id: str
    mosaic_segment: str
    telenor_segment: str

    def segment(self, system: str) -> str:
        if system == "mosaic":
            return self.mosaic_segment
        if system == "telenor":
            return self.telenor_segment
        raise ValueError(f"unknown segmentation system {system!r}")


@dataclass(frozen=True)
class CdrEvent:
    client_id: str
    slot: int
    cell_id: str


@dataclass(frozen=True)
class IngestStats:
    rows_read: int = 0
    duplicates_collapsed: int = 0
    window_start: str | None = None


def _frozen(a) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    cells: tuple[CellRecord, ...]
    clients: tuple[ClientRecord, ...]
    client_idx: np.ndarray
    slot: np.ndarray
    cell_idx: np.ndarray
    T: int = DEFAULT_T
    stats: IngestStats = field(default_factory=IngestStats)

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        object.__setattr__(self, "clients", tuple(self.clients))
        for name in ("client_idx", "slot", "cell_idx"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @classmethod
    def from_events(
        cls,
        cells: Sequence[CellRecord],
        clients: Sequence[ClientRecord],
        events: Iterable[CdrEvent],
        T: int = DEFAULT_T,
    ) -> "Dataset":
        """Build a validated dataset; later duplicates of a (client, slot) win."""
        cells, clients = tuple(cells), tuple(clients)
        _check_catalogs(cells, clients)
        cell_pos = {c.cell_id: j for j, c in enumerate(cells)}
        client_pos = {c.client_id: i for i, c in enumerate(clients)}
        ci, sl, ce = [], [], []
        for ev in events:
            if ev.client_id not in client_pos:
                raise UnknownClient(ev.client_id)
            if ev.cell_id not in cell_pos:
                raise UnknownCell(ev.cell_id)
            if not 0 <= ev.slot < T:
                raise ValueError(f"slot {ev.slot} outside [0, {T})")
            ci.append(client_pos[ev.client_id])
            sl.append(ev.slot)
            ce.append(cell_pos[ev.cell_id])
        return cls.from_arrays(cells, clients, ci, sl, ce, T=T)

    @classmethod
    def from_arrays(cls, cells, clients, client_idx, slot, cell_idx, T=DEFAULT_T, stats=None):
        """Normalize raw index arrays given in arrival order."""
        c = np.asarray(client_idx, dtype=np.int64)
        s = np.asarray(slot, dtype=np.int64)
        j = np.asarray(cell_idx, dtype=np.int64)
        c, s, j, dropped = _collapse(c, s, j)
        if stats is None:
            stats = IngestStats(rows_read=len(c) + dropped, duplicates_collapsed=dropped)
        return cls(tuple(cells), tuple(clients), c, s, j, T=T, stats=stats)

    # -- lookups -------------------------------------------------------

    @cached_property
    def cell_index(self) -> dict[str, int]:
        return {c.cell_id: j for j, c in enumerate(self.cells)}

    @cached_property
    def client_index(self) -> dict[str, int]:
        return {c.client_id: i for i, c in enumerate(self.clients)}

    @cached_property
    def capacities(self) -> np.ndarray:
        return np.array([c.capacity for c in self.cells], dtype=float)

    @cached_property
    def events_per_client(self) -> np.ndarray:
        return np.bincount(self.client_idx, minlength=len(self.clients))

    @property
    def n_events(self) -> int:
        return int(self.client_idx.size)

    @property
    def client_ids(self) -> list[str]:
        return [c.client_id for c in self.clients]

    def segments(self, system: str) -> dict[str, str]:
        return {c.client_id: c.segment(system) for c in self.clients}

    def iter_events(self) -> Iterator[CdrEvent]:
        for i, t, j in zip(self.client_idx.tolist(), self.slot.tolist(), self.cell_idx.tolist()):
            yield CdrEvent(self.clients[i].client_id, t, self.cells[j].cell_id)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.T == other.T
            and self.cells == other.cells
            and self.clients == other.clients
            and np.array_equal(self.client_idx, other.client_idx)
            and np.array_equal(self.slot, other.slot)
            and np.array_equal(self.cell_idx, other.cell_idx)
        )

    __hash__ = None


def _collapse(c, s, j):
    """Sort events by (client, slot), keeping the last arrival per pair."""
    if c.size == 0:
        return c, s, j, 0
    order = np.arange(c.size)
    perm = np.lexsort((order, s, c))
    c, s, j = c[perm], s[perm], j[perm]
    last = np.ones(c.size, dtype=bool)
    last[:-1] = (c[1:] != c[:-1]) | (s[1:] != s[:-1])
    return c[last], s[last], j[last], int((~last).sum())


def _check_catalogs(cells, clients):
    seen = set()
    for c in cells:
        if c.cell_id in seen:
            raise ValueError(f"duplicate cell_id {c.cell_id!r}")
        if not c.capacity > 0:
            raise ValueError(f"cell {c.cell_id!r}: capacity must be positive")
        seen.add(c.cell_id)
    seen = set()
    for c in clients:
        if c.client_id in seen:
            raise ValueError(f"duplicate client_id {c.client_id!r}")
        seen.add(c.client_id)


# -- CSV ingestion ------------------------------------------------------


def _rows(path, columns):
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedRow(1, "missing header row", path) from None
        header = [h.strip() for h in header]
        if tuple(header) != columns:
            raise MalformedRow(1, f"expected header {','.join(columns)}", path)
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(columns):
                raise MalformedRow(lineno, f"expected {len(columns)} fields, got {len(row)}", path)
            row = [v.strip() for v in row]
            if any(v == "" for v in row):
                raise MalformedRow(lineno, "empty field", path)
            yield lineno, row


def read_cells(path) -> tuple[CellRecord, ...]:
    out, seen = [], set()
    for lineno, (cid, lon, lat, cap) in _rows(path, CELL_COLUMNS):
        try:
            lon, lat, cap = float(lon), float(lat), float(cap)
        except ValueError:
            raise MalformedRow(lineno, "non-numeric lon/lat/capacity", path) from None
        if not math.isfinite(cap) or cap <= 0:
            raise MalformedRow(lineno, "capacity must be positive", path)
        if cid in seen:
            raise MalformedRow(lineno, f"duplicate cell_id {cid!r}", path)
        seen.add(cid)
        out.append(CellRecord(cid, lon, lat, cap))
    return tuple(out)


def read_clients(path) -> tuple[ClientRecord, ...]:
    out, seen = [], set()
    for lineno, (cid, mosaic, telenor) in _rows(path, CLIENT_COLUMNS):
        if cid in seen:
            raise MalformedRow(lineno, f"duplicate client_id {cid!r}", path)
        seen.add(cid)
        out.append(ClientRecord(cid, mosaic, telenor))
    return tuple(out)


def _parse_iso(value: str) -> datetime:
    if value.endswith("Z"):
        value = value[:-1] + "+00:00"
    ts = datetime.fromisoformat(value)
    if ts.tzinfo is not None:
        ts = ts.astimezone(timezone.utc).replace(tzinfo=None)
    return ts


def floor_to_slot(ts: datetime) -> datetime:
    """Snap a timestamp down to its 5-minute boundary."""
    return ts.replace(minute=ts.minute - ts.minute % 5, second=0, microsecond=0)


def parse_dataset(
    cell_file,
    client_file,
    event_file,
    T: int = DEFAULT_T,
    window_start: datetime | str | None = None,
) -> Dataset:
    """Read the three CSV files into a validated :class:`Dataset`.

    ``timestamp`` is either an integer slot index or an ISO-8601 time. ISO
    times are placed on the slot grid starting at ``window_start``, which
    defaults to the earliest ISO timestamp floored to 5 minutes.
    """
    cells = read_cells(cell_file)
    clients = read_clients(client_file)
    cell_pos = {c.cell_id: j for j, c in enumerate(cells)}
    client_pos = {c.client_id: i for i, c in enumerate(clients)}

    raw = []
    iso_cache: dict[str, datetime] = {}
    min_ts = None
    for lineno, (cid, stamp, cell) in _rows(event_file, EVENT_COLUMNS):
        if cid not in client_pos:
            raise UnknownClient(cid)
        if cell not in cell_pos:
            raise UnknownCell(cell)
        if stamp.lstrip("-").isdigit():
            when = int(stamp)
        else:
            when = iso_cache.get(stamp)
            if when is None:
                try:
                    when = _parse_iso(stamp)
                except ValueError:
                    raise MalformedRow(lineno, f"bad timestamp {stamp!r}", event_file) from None
                iso_cache[stamp] = when
            if min_ts is None or when < min_ts:
                min_ts = when
        raw.append((lineno, client_pos[cid], when, cell_pos[cell]))

    if not raw:
        raise EmptyDataset(f"{event_file}: no events")

    if isinstance(window_start, str):
        window_start = _parse_iso(window_start)
    start = floor_to_slot(window_start or min_ts) if (window_start or min_ts) else None
    step = timedelta(seconds=SLOT_SECONDS)
    slot_cache: dict[datetime, int] = {}

    ci = np.empty(len(raw), dtype=np.int64)
    sl = np.empty(len(raw), dtype=np.int64)
    ce = np.empty(len(raw), dtype=np.int64)
    for k, (lineno, i, when, j) in enumerate(raw):
        if isinstance(when, int):
            t = when
        else:
            t = slot_cache.get(when)
            if t is None:
                t = slot_cache[when] = (when - start) // step
        if not 0 <= t < T:
            raise MalformedRow(lineno, f"slot {t} outside analysis window [0, {T})", event_file)
        ci[k], sl[k], ce[k] = i, t, j

    c, s, j, dropped = _collapse(ci, sl, ce)
    stats = IngestStats(
        rows_read=len(raw),
        duplicates_collapsed=dropped,
        window_start=start.isoformat() if start is not None else None,
    )
    return Dataset(cells, clients, c, s, j, T=T, stats=stats)


def _fmt_number(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def write_dataset(d: Dataset, directory, timestamps: Sequence[str] | None = None) -> tuple[Path, Path, Path]:
    """Write ``cells.csv``, ``clients.csv`` and ``events.csv``.

    Events carry integer slot indices unless ``timestamps`` maps slots to text.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = directory / "cells.csv", directory / "clients.csv", directory / "events.csv"
    with paths[0].open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CELL_COLUMNS)
        for c in d.cells:
            w.writerow((c.cell_id, _fmt_number(c.lon), _fmt_number(c.lat), _fmt_number(c.capacity)))
    with paths[1].open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CLIENT_COLUMNS)
        for c in d.clients:
            w.writerow((c.client_id, c.mosaic_segment, c.telenor_segment))
    write_events(d, paths[2], timestamps)
    return paths


def write_events(d: Dataset, path, timestamps: Sequence[str] | None = None) -> None:
    """Write events; ``timestamps[t]`` replaces the integer slot when given."""
    cids = [c.client_id for c in d.clients]
    jids = [c.cell_id for c in d.cells]
    stamp = timestamps if timestamps is not None else [str(t) for t in range(d.T)]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(EVENT_COLUMNS) + "\n")
        fh.writelines(
            f"{cids[i]},{stamp[t]},{jids[j]}\n"
            for i, t, j in zip(d.client_idx.tolist(), d.slot.tolist(), d.cell_idx.tolist())
        )


def load_dataset_dir(directory, T: int = DEFAULT_T) -> Dataset:
    directory = Path(directory)
    return parse_dataset(directory / "cells.csv", directory / "clients.csv", directory / "events.csv", T=T)


def remove_clients(d: Dataset, ids: Iterable[str]) -> Dataset:
    """Drop clients and all their events; the cell catalog is untouched."""
    ids = set(ids)
    if not ids:
        return d
    index = d.client_index
    for cid in sorted(ids):
        if cid not in index:
            raise UnknownClient(cid)
    keep = np.ones(len(d.clients), dtype=bool)
    keep[[index[c] for c in ids]] = False
    remap = np.cumsum(keep) - 1
    mask = keep[d.client_idx]
    clients = tuple(c for c, k in zip(d.clients, keep) if k)
    return Dataset(
        d.cells, clients, remap[d.client_idx[mask]], d.slot[mask], d.cell_idx[mask], T=d.T, stats=d.stats
    )

