"""scikit-learn style front ends.

Each estimator takes its settings as constructor keywords (so ``get_params``
/ ``set_params`` / ``clone`` work) and learns from a :class:`Dataset` in
``fit``. Fitted attributes carry a trailing underscore.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .campaign_sim import CampaignSpec, RecommendationVerdict, simulate, validate_recommendation
from .data_model import Dataset
from .fuzzy_engine import (
    HEDGES,
    THRESHOLD,
    Hedge,
    LoadAssessment,
    QueryAnswer,
    assess_load,
    memberships_from_f_if,
    memberships_from_frequencies,
    query,
    rank_segments,
)
from .is_revelation import IS, RevelationConfig, is_frequency_by_segment, reveal_is, segment_sizes
from .lp_solver import X_MAX
from .occupancy import ACTIVITY_FLOOR, TOP_FRACTION, build_footprint, build_occupancy
from .validation import check_dataset, check_fraction, check_labels, check_system


class ISRevealer(BaseEstimator):
    """Labels each client IS / notIS.

    Attributes
    ----------
    labels_ : dict
        client id -> ``"IS"`` or ``"notIS"``
    trace_ : RevelationTrace
    n_confirmed_ : int
    """

    def __init__(
        self,
        head_fraction=0.01,
        bottom_fraction=0.01,
        x_max=X_MAX,
        activity_floor=ACTIVITY_FLOOR,
        top_fraction=TOP_FRACTION,
        normalize=False,
        zero_tol=1e-9,
    ):
        self.head_fraction = head_fraction
        self.bottom_fraction = bottom_fraction
        self.x_max = x_max
        self.activity_floor = activity_floor
        self.top_fraction = top_fraction
        self.normalize = normalize
        self.zero_tol = zero_tol

    def _config(self) -> RevelationConfig:
        for name in ("head_fraction", "bottom_fraction", "top_fraction"):
            check_fraction(getattr(self, name), name)
        return RevelationConfig(**self.get_params())

    def fit(self, X: Dataset, y=None):
        X = check_dataset(X)
        self.labels_, self.trace_ = reveal_is(X, self._config())
        self.n_confirmed_ = sum(1 for v in self.labels_.values() if v == IS)
        return self

    def predict(self, X=None) -> np.ndarray:
        """Labels as an array, in the client order of ``X`` (default: the fitted dataset)."""
        check_is_fitted(self, "labels_")
        ids = list(self.labels_) if X is None else (X.client_ids if isinstance(X, Dataset) else list(X))
        return np.array([self.labels_[c] for c in ids])

    def fit_predict(self, X: Dataset, y=None) -> np.ndarray:
        return self.fit(X).predict(X)


class SegmentRanker(BaseEstimator):
    """Fuzzy IS/IF membership per geodemographic segment.

    ``fit(clients, labels)`` counts IS frequencies; ``fit_f_if`` injects known
    friendliness grades instead.
    """

    def __init__(self, system="mosaic", threshold=THRESHOLD):
        self.system = system
        self.threshold = threshold

    def fit(self, X, y: Mapping[str, str]):
        check_system(self.system)
        clients = X.clients if isinstance(X, Dataset) else list(X)
        if isinstance(X, Dataset):
            check_labels(y, X)
        self.f_is_ = is_frequency_by_segment(y, clients, self.system)
        self.sizes_ = segment_sizes(clients, self.system)
        self.memberships_ = memberships_from_frequencies(self.f_is_, self.threshold, self.sizes_)
        self.segments_ = [m.segment for m in self.memberships_]
        return self

    def fit_f_if(self, f_if: Mapping[str, float]):
        self.memberships_ = memberships_from_f_if(f_if, self.threshold)
        self.f_is_ = {m.segment: m.f_is for m in self.memberships_}
        self.sizes_ = {}
        self.segments_ = [m.segment for m in self.memberships_]
        return self

    def transform(self, X=None) -> np.ndarray:
        """Hedged grades, one row per segment, columns rather / very / extremely."""
        check_is_fitted(self, "memberships_")
        rows = self._select(X)
        return np.array([[m.hedged[h] for h in HEDGES] for m in rows])

    def predict(self, X=None, hedge: Hedge | str = Hedge.VERY) -> np.ndarray:
        check_is_fitted(self, "memberships_")
        hedge = Hedge.parse(hedge)
        return np.array([m.verdicts[hedge] for m in self._select(X)])

    def rank(self, hedge: Hedge | str):
        check_is_fitted(self, "memberships_")
        return rank_segments(self.memberships_, hedge, self.threshold)

    def query(self, load: float) -> QueryAnswer:
        check_is_fitted(self, "memberships_")
        return query(self.memberships_, load, threshold=self.threshold)

    def _select(self, X):
        if X is None:
            return self.memberships_
        by = {m.segment: m for m in self.memberships_}
        return [by[s] for s in X]


class LoadAssessor(BaseEstimator):
    """Peak-load membership per antenna and for the whole network."""

    def __init__(self, threshold=THRESHOLD):
        self.threshold = threshold

    def fit(self, X: Dataset, y=None):
        X = check_dataset(X)
        self.occupancy_ = build_occupancy(X)
        self.assessment_: LoadAssessment = assess_load(self.occupancy_, X.cells, self.threshold)
        self.infrastructure_ = self.assessment_.infrastructure
        self.context_ = self.assessment_.context
        return self

    def transform(self, X=None) -> np.ndarray:
        check_is_fitted(self, "assessment_")
        return np.array(list(self.assessment_.per_antenna.values()))


class CampaignValidator(BaseEstimator):
    """Checks campaign what-ifs against capacity for one segmentation system."""

    def __init__(self, system="mosaic", include_baseline=True, threshold=THRESHOLD):
        self.system = system
        self.include_baseline = include_baseline
        self.threshold = threshold

    def fit(self, X: Dataset, y: Mapping[str, str]):
        X = check_dataset(X)
        check_system(self.system)
        self.dataset_ = X
        self.ranker_ = SegmentRanker(self.system, self.threshold).fit(X, y)
        self.footprint_ = build_footprint(X, X.segments(self.system))
        self.load_ = LoadAssessor(self.threshold).fit(X).infrastructure_
        return self

    def _spec(self, target, expected_new_clients) -> CampaignSpec:
        return CampaignSpec(target, expected_new_clients, self.system, self.include_baseline)

    def simulate(self, target: str, expected_new_clients: float):
        check_is_fitted(self, "footprint_")
        return simulate(self.dataset_, self.footprint_, self._spec(target, expected_new_clients), self.threshold)

    def predict(self, target: str, expected_new_clients: float) -> RecommendationVerdict:
        check_is_fitted(self, "footprint_")
        return validate_recommendation(
            self.ranker_.memberships_,
            self.load_,
            self._spec(target, expected_new_clients),
            self.dataset_,
            self.footprint_,
            self.threshold,
        )
