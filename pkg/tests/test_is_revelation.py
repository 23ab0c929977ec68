import pytest

from fuzzycampaign.data_model import CdrEvent, CellRecord, ClientRecord, Dataset
from fuzzycampaign.errors import EmptySegment, InsufficientClients
from fuzzycampaign.is_revelation import (
    IS,
    NOT_IS,
    RevelationConfig,
    is_frequency_by_segment,
    reveal_is,
    segment_sizes,
    stopping_certificate,
)
from fuzzycampaign.synth import SynthConfig, generate


def _with_capacity(d, cap):
    cells = [CellRecord(c.cell_id, c.lon, c.lat, cap) for c in d.cells]
    return Dataset.from_arrays(cells, d.clients, d.client_idx, d.slot, d.cell_idx, T=d.T)


def test_huge_capacity_reveals_nobody(small_region):
    d = _with_capacity(small_region.dataset, 1e9)
    labels, trace = reveal_is(d)
    assert set(labels.values()) == {NOT_IS}
    assert len(trace.iterations) == 1
    assert trace.iterations[0].x["stressing"] == 10.0
    assert trace.termination == "x_stressing_positive"


def test_planted_dwellers_recovered(small_region):
    labels, trace = reveal_is(small_region.dataset)
    dwellers = small_region.clients_with_role("dweller")
    dispersed = small_region.clients_with_role("dispersed")
    assert sum(labels[c] == IS for c in dwellers) >= 0.95 * len(dwellers)
    assert sum(labels[c] == IS for c in dispersed) <= 0.01 * len(dispersed)
    assert trace.termination == "x_stressing_positive"
    assert sorted(trace.confirmed_ids) == sorted(c for c, v in labels.items() if v == IS)


def test_certificate_recomputes(small_region):
    d = small_region.dataset
    labels, trace = reveal_is(d)
    x = stopping_certificate(d, labels, trace)
    assert x == pytest.approx(trace.iterations[-1].x["stressing"])
    assert x > 0


def test_deterministic(small_region):
    a = reveal_is(small_region.dataset)
    b = reveal_is(small_region.dataset)
    assert a[0] == b[0]
    assert a[1].to_dict() == b[1].to_dict()


def test_rounds_confirm_only_when_x_zero(small_region):
    _, trace = reveal_is(small_region.dataset)
    for rec in trace.iterations[:-1]:
        assert rec.x["stressing"] <= 1e-9 and rec.confirmed == len(rec.head)
    assert trace.iterations[-1].confirmed == 0


def test_too_few_clients():
    cells = [CellRecord("X1", 0, 0, 1)]
    clients = [ClientRecord(f"c{k}", "A", "T") for k in range(5)]
    events = [CdrEvent(c.client_id, t, "X1") for c in clients for t in range(30)]
    d = Dataset.from_events(cells, clients, events, T=30)
    with pytest.raises(InsufficientClients):
        reveal_is(d)
    # a larger head fraction makes the same data workable
    labels, _ = reveal_is(d, RevelationConfig(head_fraction=0.2, bottom_fraction=0.2))
    assert set(labels) == {c.client_id for c in clients}


def test_planted_fraction_zero_no_is():
    region = generate(SynthConfig(seed=5, n_cells=10, n_clients=200, T=288, planted_stressing_fraction=0.0,
                                  transient_fraction=0.0, peak_cell_count=0))
    labels, _ = reveal_is(region.dataset)
    assert IS not in labels.values()


def test_frequency_small_cases():
    clients = [ClientRecord(f"c{k}", "A", "T") for k in range(10)] + [ClientRecord("z", "B", "T")]
    labels = {c.client_id: NOT_IS for c in clients}
    labels["c0"] = labels["c1"] = IS
    f = is_frequency_by_segment(labels, clients)
    assert f == {"A": 0.2, "B": 0.0}
    assert segment_sizes(clients) == {"A": 10, "B": 1}
    with pytest.raises(EmptySegment):
        is_frequency_by_segment(labels, clients, segments=["A", "C"])


def test_frequency_recount(small_region):
    d = small_region.dataset
    labels, _ = reveal_is(d)
    for system in ("mosaic", "telenor"):
        f = is_frequency_by_segment(labels, d.clients, system)
        for seg, value in f.items():
            members = [c for c in d.clients if c.segment(system) == seg]
            assert value == sum(labels[c.client_id] == IS for c in members) / len(members)


def test_config_validation():
    with pytest.raises(ValueError):
        RevelationConfig(head_fraction=0)
    with pytest.raises(ValueError):
        RevelationConfig(x_max=-1)
