"""Iterative confirmation of infrastructure-stressing (IS) clients.

Clients are ranked once by hot-spot score. Each round the head of the
remaining ranking is tentatively labelled stressing, the tail friendly and
everyone else medium; the scaling LP is solved on the current dataset. A zero
coefficient for the stressing group means the network cannot absorb any more
clients moving like them, so they are confirmed IS and removed. The first
round with room for the stressing group ends the loop.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Sequence

from .data_model import Dataset, remove_clients
from .errors import EmptySegment, InsufficientClients, NonTermination
from .lp_solver import GROUPS, X_MAX, LpProblem, ScalingSolution, solve
from .occupancy import ACTIVITY_FLOOR, TOP_FRACTION, build_footprint, build_occupancy, hotspot_scores, rank_clients

IS, NOT_IS = "IS", "notIS"
ZERO_TOL = 1e-9


@dataclass(frozen=True)
class RevelationConfig:
    head_fraction: float = 0.01
    bottom_fraction: float = 0.01
    x_max: float = X_MAX
    activity_floor: int = ACTIVITY_FLOOR
    top_fraction: float = TOP_FRACTION
    normalize: bool = False
    zero_tol: float = ZERO_TOL

    def __post_init__(self):
        for name in ("head_fraction", "bottom_fraction", "top_fraction"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} must be in (0, 1], got {v!r}")
        if not self.x_max > 0:
            raise ValueError("x_max must be positive")
        if self.activity_floor < 0:
            raise ValueError("activity_floor must be non-negative")


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    head: tuple[str, ...]
    friendly: tuple[str, ...]
    n_medium: int
    x: dict
    objective: float
    confirmed: int


@dataclass
class RevelationTrace:
    iterations: list[IterationRecord] = field(default_factory=list)
    termination: str = ""
    n_ranked: int = 0

    @property
    def confirmed_ids(self) -> list[str]:
        return [cid for rec in self.iterations if rec.confirmed for cid in rec.head]

    def to_dict(self) -> dict:
        return {
            "termination": self.termination,
            "n_ranked": self.n_ranked,
            "n_confirmed": len(self.confirmed_ids),
            "iterations": [
                {**asdict(rec), "head": list(rec.head), "friendly": list(rec.friendly)}
                for rec in self.iterations
            ],
        }


def _fraction_count(fraction: float, n: int) -> int:
    return math.floor(fraction * n + 1e-9)


def ranked_clients(d: Dataset, cfg: RevelationConfig) -> list[str]:
    """Client ids by hot-spot score, sparse clients below the activity floor left out."""
    occ = build_occupancy(d)
    scores = hotspot_scores(d, occ, cfg.top_fraction, cfg.activity_floor, cfg.normalize)
    return [
        h.client_id
        for h in rank_clients(scores)
        if h.active_slots > 0 and h.active_slots >= cfg.activity_floor
    ]


def group_lp(
    d: Dataset, stressing: Iterable[str], friendly: Iterable[str], x_max: float
) -> tuple[ScalingSolution, int]:
    """Solve the scaling LP with everyone outside the two sets as medium."""
    grouping = {c.client_id: "medium" for c in d.clients}
    for cid in stressing:
        grouping[cid] = "stressing"
    for cid in friendly:
        grouping[cid] = "friendly"
    fp = build_footprint(d, grouping, GROUPS)
    sol = solve(LpProblem(fp.group_sizes, fp.s, d.capacities, x_max, GROUPS))
    return sol, int(fp.group_sizes[1])


def reveal_is(d: Dataset, cfg: RevelationConfig | None = None) -> tuple[dict[str, str], RevelationTrace]:
    cfg = cfg or RevelationConfig()
    remaining = ranked_clients(d, cfg)
    n = len(remaining)
    if n == 0 or _fraction_count(cfg.head_fraction, n) < 1:
        raise InsufficientClients(
            f"{n} rankable clients; head fraction {cfg.head_fraction} selects nobody"
        )
    guard = math.ceil(n / max(1, _fraction_count(cfg.head_fraction, n))) + 1

    trace = RevelationTrace(n_ranked=n)
    current = d
    confirmed: set[str] = set()
    while True:
        if not remaining:
            trace.termination = "list_exhausted"
            break
        if len(trace.iterations) >= guard:
            raise NonTermination(f"no stopping certificate after {guard} iterations")
        h = max(1, _fraction_count(cfg.head_fraction, len(remaining)))
        head, rest = remaining[:h], remaining[h:]
        b = min(len(rest), max(1, _fraction_count(cfg.bottom_fraction, len(remaining))))
        friendly = rest[len(rest) - b :] if b else []

        sol, n_medium = group_lp(current, head, friendly, cfg.x_max)
        zero = sol["stressing"] <= cfg.zero_tol
        trace.iterations.append(
            IterationRecord(
                iteration=len(trace.iterations) + 1,
                head=tuple(head),
                friendly=tuple(friendly),
                n_medium=n_medium,
                x=sol.as_dict(),
                objective=sol.objective,
                confirmed=len(head) if zero else 0,
            )
        )
        if not zero:
            trace.termination = "x_stressing_positive"
            break
        confirmed.update(head)
        current = remove_clients(current, head)
        remaining = rest

    labels = {c.client_id: IS if c.client_id in confirmed else NOT_IS for c in d.clients}
    return labels, trace


def stopping_certificate(d: Dataset, labels: Mapping[str, str], trace: RevelationTrace, x_max: float = X_MAX) -> float:
    """Re-solve the last round on ``d`` minus the IS clients; returns x[stressing]."""
    last = trace.iterations[-1]
    reduced = remove_clients(d, [c for c, lab in labels.items() if lab == IS])
    sol, _ = group_lp(reduced, last.head, last.friendly, x_max)
    return sol["stressing"]


def is_frequency_by_segment(
    labels: Mapping[str, str],
    clients: Sequence,
    segmentation: str = "mosaic",
    segments: Iterable[str] | None = None,
) -> dict[str, float]:
    """Share of IS clients per segment, keyed in sorted segment order."""
    members: dict[str, list[int]] = {}
    for c in clients:
        lab = labels[c.client_id]
        members.setdefault(c.segment(segmentation), []).append(1 if lab == IS else 0)
    wanted = sorted(members) if segments is None else list(segments)
    out = {}
    for s in wanted:
        flags = members.get(s)
        if not flags:
            raise EmptySegment(s)
        out[s] = sum(flags) / len(flags)
    return out


def segment_sizes(clients: Sequence, segmentation: str = "mosaic") -> dict[str, int]:
    sizes: dict[str, int] = {}
    for c in clients:
        s = c.segment(segmentation)
        sizes[s] = sizes.get(s, 0) + 1
    return dict(sorted(sizes.items()))
