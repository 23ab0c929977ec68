"""Fuzzy memberships, linguistic hedges, segment ranking and load context.

A hedge is an exponent applied to a membership grade: ``rather`` takes the
square root, ``very`` squares, ``extremely`` cubes. A segment qualifies as
``<hedge> infrastructure-friendly`` when the hedged grade reaches the 0.9
threshold. The network load picks which hedge a campaign has to satisfy.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import EmptyInfrastructure
from .occupancy import OccupancyMatrix

THRESHOLD = 0.9


class Hedge(enum.Enum):
    RATHER = "rather"
    VERY = "very"
    EXTREMELY = "extremely"

    @property
    def exponent(self) -> float:
        return _EXPONENTS[self]

    @classmethod
    def parse(cls, value: "str | Hedge") -> "Hedge":
        return value if isinstance(value, cls) else cls(str(value).lower())


_EXPONENTS = {Hedge.RATHER: 0.5, Hedge.VERY: 2.0, Hedge.EXTREMELY: 3.0}
# weakest to strongest
HEDGES = (Hedge.RATHER, Hedge.VERY, Hedge.EXTREMELY)


class Tier(enum.Enum):
    FULLY_IN = 1.0
    MOSTLY_IN = 0.9
    MORE_OR_LESS_IN = 0.6
    MORE_OR_LESS_OUT = 0.4
    MOSTLY_OUT = 0.1
    FULLY_OUT = 0.0

    @property
    def label(self) -> str:
        return self.name.lower()


def nearest_tier(f: float) -> Tier:
    """Descriptive tier: the closest of the six anchor values (ties go up)."""
    f = validate_membership(f)
    return min(Tier, key=lambda t: (abs(t.value - f), -t.value))


def validate_membership(f) -> float:
    f = float(f)
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"membership {f!r} outside [0, 1]")
    return f


def negate(f: float) -> float:
    return 1.0 - validate_membership(f)


def apply_hedge(f: float, h: Hedge | str) -> float:
    f = validate_membership(f)
    return f ** Hedge.parse(h).exponent


def classify(f_if: float, threshold: float = THRESHOLD) -> dict[Hedge, bool]:
    return {h: apply_hedge(f_if, h) >= threshold for h in HEDGES}


@dataclass(frozen=True)
class SegmentMembership:
    segment: str
    f_is: float
    f_if: float
    hedged: dict = field(compare=False)
    verdicts: dict = field(compare=False)
    size: int | None = None

    @classmethod
    def from_f_if(cls, segment: str, f_if: float, threshold: float = THRESHOLD, size=None):
        f_if = validate_membership(f_if)
        return cls(
            segment,
            negate(f_if),
            f_if,
            {h: apply_hedge(f_if, h) for h in HEDGES},
            classify(f_if, threshold),
            size,
        )

    @classmethod
    def from_f_is(cls, segment: str, f_is: float, threshold: float = THRESHOLD, size=None):
        return cls.from_f_if(segment, negate(f_is), threshold, size)

    def tier(self, h: Hedge | None = None) -> Tier:
        return nearest_tier(self.f_if if h is None else self.hedged[Hedge.parse(h)])


def memberships_from_f_if(
    f_if: Mapping[str, float], threshold: float = THRESHOLD
) -> list[SegmentMembership]:
    return [SegmentMembership.from_f_if(s, v, threshold) for s, v in f_if.items()]


def memberships_from_frequencies(
    f_is: Mapping[str, float], threshold: float = THRESHOLD, sizes: Mapping[str, int] | None = None
) -> list[SegmentMembership]:
    sizes = sizes or {}
    return [SegmentMembership.from_f_is(s, v, threshold, sizes.get(s)) for s, v in f_is.items()]


@dataclass(frozen=True)
class RankedSegment:
    segment: str
    value: float
    qualifies: bool
    tier: Tier


def rank_segments(
    memberships: Sequence[SegmentMembership], h: Hedge | str, threshold: float = THRESHOLD
) -> list[RankedSegment]:
    """Segments by hedged friendliness, best first; ties by segment id."""
    if not memberships:
        raise ValueError("no segments to rank")
    h = Hedge.parse(h)
    # every hedge is monotone, so sorting on the raw grade fixes one order for all
    ordered = sorted(memberships, key=lambda m: (-m.f_if, m.segment))
    out = []
    for m in ordered:
        v = apply_hedge(m.f_if, h)
        out.append(RankedSegment(m.segment, v, v >= threshold, nearest_tier(v)))
    return out


# -- load assessment ----------------------------------------------------


def antenna_load(occ: OccupancyMatrix, cell) -> float:
    """Peak-slot occupancy over capacity, clamped to [0, 1]."""
    if not cell.capacity > 0:
        raise ValueError(f"cell {cell.cell_id!r}: capacity must be positive")
    column = occ.column(cell.cell_id)
    peak = float(column.max()) if column.size else 0.0
    return min(1.0, max(0.0, peak / cell.capacity))


def antenna_loads(load: np.ndarray, capacities: np.ndarray) -> np.ndarray:
    """Vectorized peak load ratio for a ``(T, J)`` load array."""
    peak = load.max(axis=0) if load.shape[0] else np.zeros(load.shape[1])
    return np.clip(peak / capacities, 0.0, 1.0)


def infrastructure_load(per_antenna: Iterable[float]) -> float:
    values = [validate_membership(v) for v in per_antenna]
    if not values:
        raise EmptyInfrastructure("no antennas to assess")
    return max(values)


def select_context(load: float, threshold: float = THRESHOLD) -> Hedge | None:
    """Strongest hedge under which the network counts as loaded, or None."""
    chosen = None
    for h in HEDGES:
        if apply_hedge(load, h) >= threshold:
            chosen = h
    return chosen


@dataclass(frozen=True)
class LoadAssessment:
    per_antenna: dict
    infrastructure: float
    context: Hedge | None

    def to_dict(self) -> dict:
        return {
            "per_antenna": {k: float(v) for k, v in self.per_antenna.items()},
            "infrastructure": float(self.infrastructure),
            "context": self.context.value if self.context else None,
        }


def assess_load(occ: OccupancyMatrix, cells, threshold: float = THRESHOLD) -> LoadAssessment:
    per = {c.cell_id: antenna_load(occ, c) for c in cells}
    infra = infrastructure_load(per.values())
    return LoadAssessment(per, infra, select_context(infra, threshold))


@dataclass(frozen=True)
class QueryAnswer:
    context: Hedge | None
    ranking: list
    qualifying: list
    restricted: bool

    @property
    def query(self) -> int | None:
        """1 for the rather-friendly question, 2 for the very/extremely one."""
        if self.context is None:
            return None
        return 1 if self.context is Hedge.RATHER else 2

    def to_dict(self) -> dict:
        return {
            "context": self.context.value if self.context else None,
            "query": self.query,
            "restricted": self.restricted,
            "qualifying": list(self.qualifying),
            "ranking": [
                {"segment": r.segment, "value": r.value, "qualifies": r.qualifies, "tier": r.tier.label}
                for r in self.ranking
            ],
        }


_UNSET = object()


def query(
    memberships: Sequence[SegmentMembership],
    load: float | None = None,
    context=_UNSET,
    threshold: float = THRESHOLD,
) -> QueryAnswer:
    """Which segments to target under the current load.

    The context hedge comes from ``load`` via :func:`select_context` unless
    given directly. With no context the network is unloaded and every
    segment is acceptable.
    """
    if context is _UNSET:
        if load is None:
            raise ValueError("either load or context is required")
        context = select_context(load, threshold)
    elif context is not None:
        context = Hedge.parse(context)
    if context is None:
        ranking = rank_segments(memberships, Hedge.RATHER, threshold)
        ranking = [RankedSegment(r.segment, r.value, True, r.tier) for r in ranking]
        return QueryAnswer(None, ranking, [r.segment for r in ranking], False)
    ranking = rank_segments(memberships, context, threshold)
    return QueryAnswer(context, ranking, [r.segment for r in ranking if r.qualifies], True)


# -- reports ------------------------------------------------------------

RANKING_COLUMNS = ("segment", "f_if", "f_sqrt", "rather", "f_sq", "very", "f_cube", "extremely")


def round_half_up(x: float, places: int = 2) -> str:
    q = Decimal(1).scaleb(-places)
    return str(Decimal(repr(float(x))).quantize(q, rounding=ROUND_HALF_UP))


def _yes(b: bool) -> str:
    return "yes" if b else "no"


def ranking_rows(memberships: Sequence[SegmentMembership], places: int | None = 2) -> list[tuple]:
    """Table rows in segment order, numbers rounded half-up unless ``places`` is None."""
    fmt = (lambda v: round_half_up(v, places)) if places is not None else (lambda v: repr(float(v)))
    rows = []
    for m in sorted(memberships, key=lambda m: m.segment):
        rows.append(
            (
                m.segment,
                fmt(m.f_if),
                fmt(m.hedged[Hedge.RATHER]),
                _yes(m.verdicts[Hedge.RATHER]),
                fmt(m.hedged[Hedge.VERY]),
                _yes(m.verdicts[Hedge.VERY]),
                fmt(m.hedged[Hedge.EXTREMELY]),
                _yes(m.verdicts[Hedge.EXTREMELY]),
            )
        )
    return rows


def ranking_csv(memberships: Sequence[SegmentMembership], places: int | None = 2) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RANKING_COLUMNS)
    w.writerows(ranking_rows(memberships, places))
    return buf.getvalue()


def ranking_json(memberships: Sequence[SegmentMembership]) -> dict:
    segs = []
    for m in sorted(memberships, key=lambda m: m.segment):
        segs.append(
            {
                "segment": m.segment,
                "size": m.size,
                "f_is": m.f_is,
                "f_if": m.f_if,
                "tier": m.tier().label,
                "hedged": {h.value: m.hedged[h] for h in HEDGES},
                "verdicts": {h.value: m.verdicts[h] for h in HEDGES},
            }
        )
    counts = {h.value: sum(m.verdicts[h] for m in memberships) for h in HEDGES}
    return {"segments": segs, "qualifying_counts": counts}


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
