"""What-if check of a marketing campaign against antenna capacity.

New clients are assumed to move like the existing members of the targeted
segment, so the campaign adds ``alpha * s[target]`` to every cell-slot, with
``alpha = expected_new_clients / total_clients``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .data_model import Dataset
from .errors import UnknownSegment, ZeroPopulation
from .fuzzy_engine import THRESHOLD, Hedge, SegmentMembership, antenna_loads, select_context
from .occupancy import FootprintTensor, build_occupancy

WARN_CAP = 20


@dataclass(frozen=True)
class CampaignSpec:
    target: str
    expected_new_clients: float
    system: str = "mosaic"
    include_baseline: bool = True

    def __post_init__(self):
        if self.expected_new_clients < 0:
            raise ValueError("expected_new_clients must be non-negative")


@dataclass(frozen=True)
class ViolationWarning:
    cell_id: str
    slot: int
    projected_load: float
    capacity: float


@dataclass(frozen=True)
class CampaignReport:
    spec: CampaignSpec
    alpha: float
    warnings: list
    load_before: float
    load_after: float
    hedge_before: Hedge | None
    hedge_after: Hedge | None

    def to_dict(self, warn_cap: int | None = None) -> dict:
        shown = self.warnings if warn_cap is None else self.warnings[:warn_cap]
        return {
            "target": self.spec.target,
            "system": self.spec.system,
            "expected_new_clients": self.spec.expected_new_clients,
            "include_baseline": self.spec.include_baseline,
            "alpha": self.alpha,
            "n_warnings": len(self.warnings),
            "warnings": [
                {"cell_id": w.cell_id, "slot": w.slot, "projected_load": w.projected_load, "capacity": w.capacity}
                for w in shown
            ],
            "load_before": self.load_before,
            "load_after": self.load_after,
            "hedge_before": self.hedge_before.value if self.hedge_before else None,
            "hedge_after": self.hedge_after.value if self.hedge_after else None,
        }


def compute_alpha(expected_new: float, total_clients: int) -> float:
    if total_clients <= 0:
        raise ZeroPopulation("no clients to scale from")
    return expected_new / total_clients


def violations(projected: np.ndarray, capacities: np.ndarray) -> np.ndarray:
    """``(t, j)`` index pairs where projected load exceeds capacity, cell-index-major."""
    t, j = np.nonzero(projected > capacities[None, :])
    order = np.lexsort((t, j))
    return np.column_stack([t[order], j[order]])


def simulate(
    d: Dataset, fp: FootprintTensor, spec: CampaignSpec, threshold: float = THRESHOLD
) -> CampaignReport:
    if spec.target not in fp.groups:
        raise UnknownSegment(spec.target)
    alpha = compute_alpha(spec.expected_new_clients, len(d.clients))
    baseline = build_occupancy(d).n.astype(float)
    added = alpha * fp.group(spec.target)
    caps = d.capacities

    # the literal check looks only at the newcomers; load is re-assessed on the full network either way
    checked = baseline + added if spec.include_baseline else added
    warns = [
        ViolationWarning(fp.cell_ids[j], int(t), float(checked[t, j]), float(caps[j]))
        for t, j in violations(checked, caps).tolist()
    ]
    warns.sort(key=lambda w: (w.cell_id, w.slot))
    before = float(antenna_loads(baseline, caps).max(initial=0.0))
    after = float(antenna_loads(baseline + added, caps).max(initial=0.0)) if alpha else before
    return CampaignReport(
        spec, alpha, warns, before, after, select_context(before, threshold), select_context(after, threshold)
    )


@dataclass(frozen=True)
class RecommendationVerdict:
    accepted: bool
    qualifies: bool
    context: Hedge | None
    report: CampaignReport
    reasons: list = field(default_factory=list)

    def to_dict(self, warn_cap: int | None = WARN_CAP) -> dict:
        return {
            "verdict": "accept" if self.accepted else "reject",
            "qualifies": self.qualifies,
            "context": self.context.value if self.context else None,
            "reasons": list(self.reasons),
            **self.report.to_dict(warn_cap),
        }


def validate_recommendation(
    memberships: Sequence[SegmentMembership],
    load: float,
    spec: CampaignSpec,
    d: Dataset,
    fp: FootprintTensor,
    threshold: float = THRESHOLD,
) -> RecommendationVerdict:
    """Accept only a qualifying segment whose simulated campaign overloads nothing."""
    report = simulate(d, fp, spec, threshold)
    context = select_context(load, threshold)
    by_segment = {m.segment: m for m in memberships}
    if spec.target not in by_segment:
        raise UnknownSegment(spec.target)
    qualifies = True if context is None else by_segment[spec.target].verdicts[context]
    reasons = []
    if not qualifies:
        reasons.append(f"segment {spec.target} is not {context.value} infrastructure-friendly")
    if report.warnings:
        reasons.append(f"{len(report.warnings)} cell-slot capacity violations")
    return RecommendationVerdict(qualifies and not report.warnings, qualifies, context, report, reasons)
