"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line (shown in the pytest terminal summary,
or printed directly when this file is run as a script).
"""

import hashlib
import time

import numpy as np
import pytest

from fuzzycampaign.campaign_sim import CampaignSpec, simulate, validate_recommendation
from fuzzycampaign.cli import main
from fuzzycampaign.data_model import CdrEvent, CellRecord, ClientRecord, Dataset
from fuzzycampaign.fixtures import MOSAIC_F_IF, TELENOR_F_IF
from fuzzycampaign.fuzzy_engine import (
    HEDGES,
    Hedge,
    apply_hedge,
    classify,
    memberships_from_f_if,
    negate,
    query,
    rank_segments,
)
from fuzzycampaign.is_revelation import IS, reveal_is, stopping_certificate
from fuzzycampaign.lp_solver import is_feasible, make_problem, oracle_solve, solve
from fuzzycampaign.occupancy import build_footprint, build_occupancy
from fuzzycampaign.synth import SynthConfig, generate, write_region

try:
    from conftest import ACCEPTANCE
except ImportError:  # run as a script from elsewhere
    ACCEPTANCE = []

# reference grades per segment: (f_if, f^1/2, rather, f^2, very, f^3, extremely), two decimals
TABLE_MOSAIC = {
    "A": (0.96, 0.97, "yes", 0.92, "yes", 0.88, "no"),
    "B": (0.98, 0.98, "yes", 0.96, "yes", 0.94, "yes"),
    "C": (0.93, 0.96, "yes", 0.86, "no", 0.79, "no"),
    "D": (0.92, 0.95, "yes", 0.84, "no", 0.77, "no"),
    "E": (0.96, 0.97, "yes", 0.92, "yes", 0.88, "no"),
    "F": (0.92, 0.95, "yes", 0.86, "no", 0.79, "no"),
    "G": (0.93, 0.96, "yes", 0.86, "no", 0.79, "no"),
    "H": (0.96, 0.97, "yes", 0.92, "yes", 0.88, "no"),
    "I": (0.97, 0.98, "yes", 0.94, "yes", 0.91, "yes"),
    "J": (0.92, 0.95, "yes", 0.86, "no", 0.79, "no"),
    "K": (0.97, 0.98, "yes", 0.94, "yes", 0.91, "yes"),
    "L": (0.98, 0.98, "yes", 0.96, "yes", 0.94, "yes"),
    "M": (0.96, 0.97, "yes", 0.92, "yes", 0.88, "no"),
    "N": (0.95, 0.97, "yes", 0.90, "yes", 0.85, "no"),
}
# the square-root column of this reference is not checked: it contradicts its own f_if values
TABLE_TELENOR = {
    "CA": (0.94, None, "yes", 0.88, "no", 0.82, "no"),
    "MM": (0.99, None, "yes", 0.98, "yes", 0.97, "yes"),
    "QA": (0.96, None, "yes", 0.92, "yes", 0.88, "no"),
    "T": (0.98, None, "yes", 0.96, "yes", 0.94, "yes"),
    "CC": (0.92, None, "yes", 0.86, "no", 0.79, "no"),
    "VA": (0.97, None, "yes", 0.94, "yes", 0.91, "yes"),
}
TOL_TABLE = 0.015


def record(n, ok, detail, limit=None, elapsed=None):
    timing = "" if limit is None else f" [{elapsed:.2f}s / limit {limit:g}s]"
    line = f"{'PASS' if ok else 'FAIL'}  criterion {n}: {detail}{timing}"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


def _yes(b):
    return "yes" if b else "no"


def _compare_table(printed, f_if):
    ms = {m.segment: m for m in memberships_from_f_if(f_if)}
    verdict_miss, worst = 0, 0.0
    for seg, (f, sq, rather, sq2, very, cube, extreme) in printed.items():
        m = ms[seg]
        got = [_yes(m.verdicts[h]) for h in HEDGES]
        verdict_miss += sum(a != b for a, b in zip(got, (rather, very, extreme)))
        pairs = [(m.hedged[Hedge.VERY], sq2), (m.hedged[Hedge.EXTREMELY], cube)]
        if sq is not None:
            pairs.append((m.hedged[Hedge.RATHER], sq))
        worst = max([worst] + [abs(a - b) for a, b in pairs])
    return verdict_miss, worst


def test_criterion_1_mosaic_table():
    t0 = time.perf_counter()
    assert {k: v[0] for k, v in TABLE_MOSAIC.items()} == MOSAIC_F_IF
    miss, worst = _compare_table(TABLE_MOSAIC, MOSAIC_F_IF)
    ranked = [r.segment for r in rank_segments(memberships_from_f_if(MOSAIC_F_IF), "very")]
    el = time.perf_counter() - t0
    ok = miss == 0 and worst <= TOL_TABLE and len(ranked) == 14 and el < 1
    record(1, ok, f"MOSAIC table: {42 - miss}/42 verdicts, max hedged diff {worst:.4f} (tol {TOL_TABLE})", 1, el)


def test_criterion_2_telenor_table():
    t0 = time.perf_counter()
    assert {k: v[0] for k, v in TABLE_TELENOR.items()} == TELENOR_F_IF
    ms = memberships_from_f_if(TELENOR_F_IF)
    very = {r.segment for r in rank_segments(ms, "very") if r.qualifies}
    extreme = {r.segment for r in rank_segments(ms, "extremely") if r.qualifies}
    rather = all(r.qualifies for r in rank_segments(ms, "rather"))
    miss, worst = _compare_table(TABLE_TELENOR, TELENOR_F_IF)
    el = time.perf_counter() - t0
    ok = (very == {"MM", "QA", "T", "VA"} and extreme == {"MM", "T", "VA"} and rather and miss == 0
          and worst <= TOL_TABLE and el < 1)
    record(2, ok, f"Telenor table: very={sorted(very)} extremely={sorted(extreme)} all-rather={rather}, "
                  f"max hedged diff {worst:.4f} (square-root column excluded)", 1, el)


def test_criterion_3_counts():
    ms = memberships_from_f_if(MOSAIC_F_IF)
    counts = {h.value: len(query(ms, context=h).qualifying) for h in HEDGES}
    ok = counts == {"rather": 14, "very": 9, "extremely": 4}
    record(3, ok, f"MOSAIC qualifying counts {counts}")


def _random_lp(rng):
    J = int(rng.integers(1, 11))
    T = int(rng.integers(1, 200 // J + 1))
    fp = rng.integers(0, 12, size=(3, T, J)) * (rng.random((3, T, J)) < rng.uniform(0.1, 1.0))
    caps = rng.integers(0, 40, size=J) * (rng.random(J) > 0.05)
    return make_problem(rng.integers(0, 100, size=3), fp, caps, x_max=float(rng.choice([1.0, 5.0, 10.0])))


def test_criterion_4_lp():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20170403)
    n, bad, infeasible, most = 1000, 0, 0, 0
    for _ in range(n):
        p = _random_lp(rng)
        most = max(most, len(p.constraint_rows()[0]))
        a, b = solve(p), oracle_solve(p)
        bad += abs(a.objective - b.objective) > 1e-9
        infeasible += not is_feasible(p, a.x)
    worked = solve(make_problem([5, 0, 5], [[5.0, 0.0], [0.0, 0.0], [1.0, 4.0]], [5, 20], x_max=5))
    worked_ok = abs(worked["stressing"]) < 1e-12 and abs(worked["friendly"] - 5) < 1e-12 and abs(worked.objective - 25) < 1e-9
    el = time.perf_counter() - t0
    ok = bad == 0 and infeasible == 0 and most <= 200 and worked_ok and el < 30
    record(4, ok, f"{n} random LPs (<= {most} active rows): {bad} objective mismatches (tol 1e-9), "
                  f"{infeasible} infeasible; worked example x={worked.x.round(12).tolist()} obj={worked.objective:g}", 30, el)


def test_criterion_5_planted_recovery(desk_region):
    d = desk_region.dataset
    t0 = time.perf_counter()
    labels, trace = reveal_is(d)
    el = time.perf_counter() - t0
    dwellers = desk_region.clients_with_role("dweller")
    dispersed = desk_region.clients_with_role("dispersed")
    recall = sum(labels[c] == IS for c in dwellers) / len(dwellers)
    fp_rate = sum(labels[c] == IS for c in dispersed) / len(dispersed)
    cert = stopping_certificate(d, labels, trace)
    ok = recall >= 0.95 and fp_rate <= 0.01 and trace.termination == "x_stressing_positive" and cert > 0 and el < 60
    record(5, ok, f"2000 clients / 50 cells / T=2016: recall {recall:.2%} (>= 95%), dispersed IS {fp_rate:.2%} "
                  f"(<= 1%), {len(trace.iterations)} rounds, certificate x_stressing={cert:g}", 60, el)


def test_criterion_6_hedge_properties():
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    fs = np.concatenate([rng.random(100_000 - 6), [0.0, 1.0, 0.81, 0.9, 0.9 ** 0.5, 0.9 ** (1 / 3)]])
    chain = invol = mono = rng_ok = 0
    prev = {h: -1.0 for h in HEDGES}
    for f in np.sort(fs).tolist():
        v = classify(f)
        chain += (not v[Hedge.EXTREMELY] or v[Hedge.VERY]) and (not v[Hedge.VERY] or v[Hedge.RATHER])
        invol += abs(negate(negate(f)) - f) <= 1e-15
        hv = {h: apply_hedge(f, h) for h in HEDGES}
        mono += all(hv[h] >= prev[h] for h in HEDGES)
        rng_ok += all(0.0 <= x <= 1.0 for x in hv.values())
        prev = hv
    el = time.perf_counter() - t0
    n = fs.size
    ok = chain == invol == mono == rng_ok == n and el < 5
    record(6, ok, f"{n} memberships: inclusion {chain}, involution {invol}, monotone {mono}, in range {rng_ok}", 5, el)


def _random_campaign_dataset(rng):
    J, T, n = int(rng.integers(1, 5)), int(rng.integers(2, 12)), int(rng.integers(4, 30))
    clients = [ClientRecord(f"c{k:02d}", "A", str(rng.choice(["MM", "T", "CA"]))) for k in range(n)]
    events = [CdrEvent(c.client_id, t, f"X{int(rng.integers(J))}")
              for c in clients for t in range(T) if rng.random() < 0.6]
    base = np.zeros((T, J))
    for e in events:
        base[e.slot, int(e.cell_id[1:])] += 1
    caps = np.maximum(1, base.max(axis=0) + rng.integers(-1, 4, size=J))
    cells = [CellRecord(f"X{j}", 0.0, 0.0, float(caps[j])) for j in range(J)]
    return Dataset.from_events(cells, clients, events, T=T)


def _scan(d, fp, target, alpha, include_baseline):
    base = build_occupancy(d).n
    s = fp.group(target) if target in fp.groups else np.zeros_like(base)
    return {
        (j, t)
        for j in range(len(d.cells))
        for t in range(d.T)
        if alpha * s[t, j] + (base[t, j] if include_baseline else 0) > d.cells[j].capacity
    }


def test_criterion_7_campaign():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    ms = memberships_from_f_if({"MM": 0.99, "T": 0.98, "CA": 0.94})
    cases = mono_bad = scan_bad = zero_bad = 0
    for _ in range(200):
        d = _random_campaign_dataset(rng)
        fp = build_footprint(d, d.segments("telenor"))
        for target in fp.groups:
            for include in (True, False):
                prev = set()
                for expected in sorted(rng.uniform(0, 3 * len(d.clients), size=5).tolist()):
                    rep = simulate(d, fp, CampaignSpec(target, expected, "telenor", include))
                    got = {(d.cell_index[w.cell_id], w.slot) for w in rep.warnings}
                    mono_bad += not prev <= got
                    prev = got
                    load = float(rng.choice([0.1, 0.85, 0.95, 1.0]))
                    v = validate_recommendation(ms, load, rep.spec, d, fp)
                    scan = _scan(d, fp, target, rep.alpha, include)
                    scan_bad += v.accepted != (v.qualifies and not scan) or got != scan
                    cases += 1
                zero = simulate(d, fp, CampaignSpec(target, 0, "telenor", include)).warnings
                # with the baseline on, alpha = 0 can only flag cells already over capacity
                zero_bad += bool(zero) and (not include or not _scan(d, fp, target, 0.0, True))
    el = time.perf_counter() - t0
    ok = mono_bad == scan_bad == zero_bad == 0 and el < 10
    record(7, ok, f"{cases} campaigns: {mono_bad} monotonicity breaks, {scan_bad} verdict/scan mismatches, "
                  f"{zero_bad} spurious alpha=0 warnings", 10, el)


def _digest(directory):
    h = hashlib.sha256()
    for p in sorted(directory.iterdir()):
        h.update(p.name.encode() + b"\0" + p.read_bytes())
    return h.hexdigest()


def test_criterion_8_determinism(tmp_path, desk_region):
    t0 = time.perf_counter()
    data = tmp_path / "data"
    write_region(desk_region, data)
    digests = []
    for run in ("a", "b"):
        assert main(["report", "--data", str(data), "--out", str(tmp_path / run)]) == 0
        digests.append(_digest(tmp_path / run))
    again = generate(SynthConfig(seed=2017))
    same_region = again.dataset == desk_region.dataset
    el = time.perf_counter() - t0
    ok = digests[0] == digests[1] and same_region
    record(8, ok, f"two end-to-end runs, report digests {'identical' if ok else 'differ'} ({digests[0][:12]})",
           elapsed=el, limit=None)


if __name__ == "__main__":
    import pathlib
    import tempfile

    region = generate(SynthConfig(seed=2017))
    with tempfile.TemporaryDirectory() as tmp:
        for name, fn in list(globals().items()):
            if not name.startswith("test_criterion_"):
                continue
            kwargs = {}
            if "desk_region" in fn.__code__.co_varnames:
                kwargs["desk_region"] = region
            if "tmp_path" in fn.__code__.co_varnames:
                kwargs["tmp_path"] = pathlib.Path(tempfile.mkdtemp(dir=tmp))
            try:
                fn(**kwargs)
            except AssertionError:
                pass
