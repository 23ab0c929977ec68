"""Input checks shared by the estimators."""

from __future__ import annotations

from typing import Mapping

from .data_model import SYSTEMS, Dataset
from .errors import UnknownClient
from .is_revelation import IS, NOT_IS


def check_dataset(X) -> Dataset:
    if not isinstance(X, Dataset):
        raise TypeError(f"expected a Dataset, got {type(X).__name__}")
    return X


def check_fraction(value, name: str, *, allow_zero: bool = False) -> float:
    value = float(value)
    lo_ok = value >= 0 if allow_zero else value > 0
    if not (lo_ok and value <= 1):
        raise ValueError(f"{name} must be in {'[0' if allow_zero else '(0'}, 1], got {value!r}")
    return value


def check_system(system: str) -> str:
    if system not in SYSTEMS:
        raise ValueError(f"segmentation system must be one of {SYSTEMS}, got {system!r}")
    return system


def check_labels(labels: Mapping[str, str], d: Dataset) -> Mapping[str, str]:
    """Labels must cover every client of ``d`` with IS / notIS."""
    for c in d.clients:
        lab = labels.get(c.client_id)
        if lab is None:
            raise UnknownClient(c.client_id)
        if lab not in (IS, NOT_IS):
            raise ValueError(f"client {c.client_id!r}: label must be {IS!r} or {NOT_IS!r}, got {lab!r}")
    return labels
