"""Occupancy and footprint tensors, and the hot-spot client ranking."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .data_model import Dataset
from .errors import UngroupedClient, UnknownClient

TOP_FRACTION = 0.05
ACTIVITY_FLOOR = 20


@dataclass(frozen=True, eq=False)
class OccupancyMatrix:
    """``n[t, j]``: number of distinct clients served by cell ``j`` in slot ``t``."""

    n: np.ndarray
    cell_ids: tuple[str, ...]

    @property
    def T(self) -> int:
        return self.n.shape[0]

    def column(self, cell_id: str) -> np.ndarray:
        return self.n[:, self.cell_ids.index(cell_id)]


@dataclass(frozen=True, eq=False)
class FootprintTensor:
    """``s[i, t, j]``: clients of group ``i`` at cell ``j`` in slot ``t``."""

    s: np.ndarray
    groups: tuple[str, ...]
    group_sizes: np.ndarray
    cell_ids: tuple[str, ...]

    def group(self, name: str) -> np.ndarray:
        return self.s[self.groups.index(name)]

    def total(self) -> np.ndarray:
        return self.s.sum(axis=0)


@dataclass(frozen=True)
class HotspotScore:
    client_id: str
    score: float
    active_slots: int


def build_occupancy(d: Dataset) -> OccupancyMatrix:
    J = len(d.cells)
    # at most one event per (client, slot), so counting events counts clients
    flat = np.bincount(d.slot * J + d.cell_idx, minlength=d.T * J)
    return OccupancyMatrix(flat.reshape(d.T, J), tuple(c.cell_id for c in d.cells))


def build_footprint(
    d: Dataset, grouping: Mapping[str, str], groups: Sequence[str] | None = None
) -> FootprintTensor:
    """Per-group occupancy. ``groups`` fixes the axis order (default: sorted names)."""
    if groups is None:
        groups = sorted(set(grouping[c.client_id] for c in d.clients if c.client_id in grouping))
    groups = tuple(groups)
    gpos = {g: k for k, g in enumerate(groups)}
    G, T, J = len(groups), d.T, len(d.cells)

    client_group = np.full(len(d.clients), -1, dtype=np.int64)
    for i, c in enumerate(d.clients):
        g = grouping.get(c.client_id)
        if g is not None:
            if g not in gpos:
                raise ValueError(f"group {g!r} not in declared groups")
            client_group[i] = gpos[g]
    has_events = d.events_per_client > 0
    missing = np.flatnonzero(has_events & (client_group < 0))
    if missing.size:
        raise UngroupedClient(d.clients[missing[0]].client_id)

    g = client_group[d.client_idx]
    flat = np.bincount((g * T + d.slot) * J + d.cell_idx, minlength=G * T * J)
    sizes = np.bincount(client_group[client_group >= 0], minlength=G)
    return FootprintTensor(flat.reshape(G, T, J), groups, sizes, tuple(c.cell_id for c in d.cells))


def top_count(active_slots: int, top_fraction: float = TOP_FRACTION) -> int:
    """Number of hottest slots summed: 5% of the active slots, at least one."""
    return max(1, math.floor(active_slots * top_fraction + 1e-9))


def _trajectory_values(occ: OccupancyMatrix, slots, cells, capacities=None) -> np.ndarray:
    values = occ.n[slots, cells].astype(float)
    if capacities is not None:
        values = values / np.asarray(capacities, dtype=float)[cells]
    return values


def hotspot_score(
    d: Dataset,
    occ: OccupancyMatrix,
    client: str,
    top_fraction: float = TOP_FRACTION,
    activity_floor: int = ACTIVITY_FLOOR,
    normalize: bool = False,
) -> HotspotScore:
    """Sum of the occupancies of the hottest slots along one client's trajectory."""
    i = d.client_index.get(client)
    if i is None:
        raise UnknownClient(client)
    lo, hi = np.searchsorted(d.client_idx, [i, i + 1])
    active = int(hi - lo)
    if active == 0 or active < activity_floor:
        return HotspotScore(client, 0.0, active)
    values = _trajectory_values(
        occ, d.slot[lo:hi], d.cell_idx[lo:hi], d.capacities if normalize else None
    )
    values = np.sort(values)[::-1]
    return HotspotScore(client, float(values[: top_count(active, top_fraction)].sum()), active)


def hotspot_scores(
    d: Dataset,
    occ: OccupancyMatrix,
    top_fraction: float = TOP_FRACTION,
    activity_floor: int = ACTIVITY_FLOOR,
    normalize: bool = False,
) -> list[HotspotScore]:
    """Vectorized :func:`hotspot_score` over every client of ``d``."""
    values = _trajectory_values(occ, d.slot, d.cell_idx, d.capacities if normalize else None)
    order = np.lexsort((-values, d.client_idx))
    c, v = d.client_idx[order], values[order]
    counts = d.events_per_client
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    rank_in_client = np.arange(c.size) - starts[c]
    k = np.array([top_count(int(a), top_fraction) for a in counts], dtype=np.int64)
    take = rank_in_client < k[c]
    totals = np.bincount(c[take], weights=v[take], minlength=len(d.clients))
    out = []
    for i, cl in enumerate(d.clients):
        active = int(counts[i])
        score = float(totals[i]) if active and active >= activity_floor else 0.0
        out.append(HotspotScore(cl.client_id, score, active))
    return out


def rank_clients(scores: Iterable[HotspotScore]) -> list[HotspotScore]:
    """Descending score; equal scores fall back to ascending client id."""
    return sorted(scores, key=lambda h: (-h.score, h.client_id))


def write_occupancy_csv(occ: OccupancyMatrix, path) -> None:
    t, j = np.nonzero(occ.n)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("t", "j", "count"))
        for a, b in zip(t.tolist(), j.tolist()):
            w.writerow((a, occ.cell_ids[b], int(occ.n[a, b])))


def write_footprint_csv(fp: FootprintTensor, path) -> None:
    g, t, j = np.nonzero(fp.s)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("group", "t", "j", "count"))
        for a, b, c in zip(g.tolist(), t.tolist(), j.tolist()):
            w.writerow((fp.groups[a], b, fp.cell_ids[c], int(fp.s[a, b, c])))
