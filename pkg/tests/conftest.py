import pytest

from fuzzycampaign.data_model import CdrEvent, CellRecord, ClientRecord, Dataset
from fuzzycampaign.synth import SynthConfig, generate


def write_csv(path, header, rows):
    lines = [header] + [",".join(str(v) for v in r) for r in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def csv_files(tmp_path):
    cells = write_csv(tmp_path / "cells.csv", "cell_id,lon,lat,capacity",
                      [("X1", 15.5, 56.1, 10), ("X2", 15.6, 56.2, 20)])
    clients = write_csv(tmp_path / "clients.csv", "client_id,mosaic_segment,telenor_segment",
                        [("a", "A", "MM"), ("b", "B", "T"), ("c", "A", "T")])
    events = write_csv(tmp_path / "events.csv", "client_id,timestamp,cell_id",
                       [("a", "2017-04-03T00:00:00", "X1"),
                        ("b", "2017-04-03T00:07:30", "X2"),
                        ("c", "2017-04-03T00:12:00", "X1")])
    return cells, clients, events


@pytest.fixture
def tiny():
    """Three clients, two cells, four slots."""
    cells = [CellRecord("X1", 0.0, 0.0, 2.0), CellRecord("X2", 0.0, 0.0, 5.0)]
    clients = [ClientRecord("a", "A", "MM"), ClientRecord("b", "B", "T"), ClientRecord("c", "A", "T")]
    events = [
        CdrEvent("a", 0, "X1"), CdrEvent("b", 0, "X1"), CdrEvent("c", 0, "X2"),
        CdrEvent("a", 1, "X2"), CdrEvent("b", 1, "X2"),
        CdrEvent("a", 2, "X1"), CdrEvent("c", 3, "X1"),
    ]
    return Dataset.from_events(cells, clients, events, T=4)


@pytest.fixture(scope="session")
def small_region():
    return generate(SynthConfig(seed=11, n_cells=12, n_clients=300, T=288, peak_cell_count=1))


@pytest.fixture(scope="session")
def desk_region():
    """The desk-scale region: 2000 clients, 50 cells, one week of slots."""
    return generate(SynthConfig(seed=2017))


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
