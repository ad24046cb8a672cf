import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dyntdd import engine
from dyntdd._kernels import evaluate_tti
from dyntdd.coordination import psi_bits
from dyntdd.engine import Simulation, dominant_gain, prb_interference
from dyntdd.errors import ConfigError
from dyntdd.metrics import percentile_report
from dyntdd.scenario import Scenario

from oracles import prb_interference_loops

SHORT = Scenario().replace(engine={"horizon_tti": 1200})


@pytest.fixture(scope="module")
def short_runs():
    return {s: engine.run(SHORT, 3, s) for s in ("HFCS", "NC", "SCC", "CFC", "STATIC")}


def random_tti(rng, C=4, K=8, P=6):
    """Random gains and one frozen transmit set: rows in kernel layout plus (C, P) maps."""
    N = C + K
    node_cell = np.concatenate([np.arange(C), np.arange(K) % C])
    gain = rng.uniform(1e-13, 1e-8, (N, N))
    gain[node_cell[:, None] == node_cell[None, :]] = 0.0
    is_bs = np.arange(N) < C
    gain_cross = np.where(is_bs[:, None] == is_bs[None, :], gain, 0.0)
    tx = -np.ones((C, P), np.int64)
    rx = -np.ones((C, P), np.int64)
    pw = np.zeros((C, P))
    rows = []
    for c in range(C):
        a = 0
        while a < P and rng.random() < 0.8:
            n = int(rng.integers(1, P - a + 1))
            k = c + C * int(rng.integers(K // C))
            dl = rng.random() < 0.5
            t, r = (c, C + k) if dl else (C + k, c)
            p = float(rng.uniform(0.1, 50.0))
            tx[c, a:a + n], rx[c, a:a + n], pw[c, a:a + n] = t, r, p
            rows.append((c, a, n, t, r, p, p * 1e-9, 1e-13, float(rng.uniform(0, 2)),
                         float(rng.uniform(-5, 18))))
            a += n
    return np.array(rows).reshape(-1, 10), gain, gain_cross, is_bs, tx, rx, pw


def kernel(rows, gain, gain_cross, cross, C=4, P=6, draws=None):
    isum, icnt = np.zeros(C), np.zeros(C, np.int64)
    txacc = np.zeros(gain.shape[0])
    draws = np.full(len(rows), 0.5) if draws is None else draws
    eff, acc, ok = evaluate_tti(C, P, rows, draws, gain, gain_cross, cross, isum, icnt, txacc)
    return eff, acc, ok, isum, icnt, txacc


def test_kernel_matches_numpy_and_loop_references():
    rng = np.random.default_rng(0)
    for _ in range(100):
        rows, gain, gc, is_bs, tx, rx, pw = random_tti(rng)
        if not len(rows):
            continue
        same, cross = prb_interference(tx, pw, rx, gain, is_bs, gc)
        same_o, cross_o = prb_interference_loops(tx.tolist(), pw.tolist(), rx.tolist(),
                                                 gain.tolist(), is_bs.tolist())
        mask = rx >= 0
        assert np.allclose(same[mask], same_o[mask], rtol=1e-12, atol=0)
        assert np.allclose(cross[mask], cross_o[mask], rtol=1e-12, atol=0)
        eff, acc, _, isum, icnt, _ = kernel(rows, gain, gc, True)
        for i, (c, a, n, t, r, p, sig, nz, prev, thr) in enumerate(rows):
            c, a, n = int(c), int(a), int(n)
            s = sig / (nz + same_o[c, a:a + n] + cross_o[c, a:a + n])
            e = 2 ** np.mean(np.log2(1 + s)) - 1
            assert eff[i] == pytest.approx(e, rel=1e-9)
            assert acc[i] == pytest.approx(prev + e, rel=1e-12)
        tot = (same_o + cross_o) * mask
        assert np.allclose(isum, tot.sum(1), rtol=1e-9)
        assert (icnt == mask.sum(1)).all()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_cfc_dominance_on_identical_allocation(seed):
    rows, gain, gc, *_ = random_tti(np.random.default_rng(seed))
    if not len(rows):
        return
    with_cli = kernel(rows, gain, gc, True)[0]
    without = kernel(rows, gain, gc, False)[0]
    assert (without >= with_cli * (1 - 1e-12)).all()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_evaluation_ignores_tb_order(seed):
    """Every TB sees the same frozen transmit set whatever order it is evaluated in."""
    rng = np.random.default_rng(seed)
    rows, gain, gc, *_ = random_tti(rng)
    if len(rows) < 2:
        return
    perm = rng.permutation(len(rows))
    a = kernel(rows, gain, gc, True)[0]
    b = kernel(rows[perm], gain, gc, True)[0]
    assert np.allclose(a[perm], b, rtol=1e-12)


def test_kernel_decode_threshold():
    rows, gain, gc, *_ = random_tti(np.random.default_rng(2))
    eff, acc, _, *_ = kernel(rows, gain, gc, True)
    x = np.clip(10 * np.log10(acc) - rows[:, 9], -30, 30)
    p_err = 1 / (1 + 9 * 10 ** x)
    draws = np.linspace(0.001, 0.999, len(rows))
    ok = kernel(rows, gain, gc, True, draws=draws)[2]
    assert (ok == (draws >= p_err)).all()


def test_dominant_gain_matches_svd():
    rng = np.random.default_rng(0)
    H = (rng.standard_normal((50, 2, 8)) + 1j * rng.standard_normal((50, 2, 8))) / np.sqrt(2)
    ref = np.linalg.svd(H, compute_uv=False)[:, 0] ** 2
    assert np.allclose(dominant_gain(H), ref, rtol=1e-10)
    H3 = H[:, :1, :]
    assert np.allclose(dominant_gain(H3), np.linalg.svd(H3, compute_uv=False)[:, 0] ** 2)


def test_same_seed_identical_digest():
    sc = Scenario().replace(engine={"horizon_tti": 600})
    assert engine.run(sc, 5, "HFCS").digest() == engine.run(sc, 5, "HFCS").digest()
    assert engine.run(sc, 5, "HFCS").digest() != engine.run(sc, 6, "HFCS").digest()


def test_zero_load():
    sc = SHORT.replace(traffic={"lambda_dl": 0.0, "lambda_ul": 0.0})
    s = engine.run(sc, 1, "HFCS")
    assert s.count("latency", "UL") == s.count("latency", "DL") == 0
    assert s.counters["bits_delivered"] == 0
    assert all(v == 0 for v in s.values("thr_cell", "UL"))
    assert s.count("thr_ue", "UL") == 0


def test_conservation_and_counts(short_runs):
    for name, s in short_runs.items():
        c = s.counters
        assert c["bits_generated"] == c["bits_delivered"] + c["bits_unsent"] + c["bits_in_harq"]
        # after the last decode every live HARQ process is a pending retransmission
        assert c["bits_in_harq"] == c["bits_pending_retx"]
        assert c["packets_delivered"] <= c["packets_generated"]
        n_lat = s.count("latency", "DL") + s.count("latency", "UL")
        assert n_lat <= c["packets_delivered"]
        assert (s.values("latency", "UL") > 0).all()
        assert c["tb_count"] > 0, name


def test_overhead_accounting(short_runs):
    cb = engine.scenario_codebook(SHORT)
    B = cb.index_bits
    slaves = SHORT.deployment.n_cells - 1
    h, sc = short_runs["HFCS"], short_runs["SCC"]
    assert h.overhead_bits == h.coordination_rounds * slaves * (B + psi_bits(12) + B)
    assert sc.overhead_bits == sc.coordination_rounds * slaves * (B + B)
    assert h.coordination_rounds == SHORT.engine.horizon_tti // SHORT.frame.frame_len
    for name in ("NC", "CFC", "STATIC"):
        assert short_runs[name].overhead_bits == 0


def test_cfc_has_least_interference(short_runs):
    p = {k: percentile_report(v, "UL", "interf", 0.5) for k, v in short_runs.items()}
    assert p["CFC"] <= p["NC"]


def test_metric_sample_counts(short_runs):
    s = short_runs["NC"]
    T, F = SHORT.engine.horizon_tti, SHORT.frame.frame_len
    warm = round(SHORT.engine.warmup_fraction * T)
    frames = sum(1 for t in range(F, T, F) if t - F >= warm)
    assert s.count("thr_cell", "DL") == s.count("thr_cell", "UL") == frames * 7
    t, c, u, v = s.columns("interf", "UL")
    assert (t >= warm).all() and len(set(zip(t.tolist(), c.tolist()))) == len(t)


def test_single_cell_schemes_agree_exactly_without_preemption():
    sc = SHORT.replace(deployment={"n_cells": 1}, scheduler={"sss_preemption": False})
    d = {s: engine.run(sc, 2, s).digest() for s in ("HFCS", "NC", "CFC")}
    assert d["HFCS"] == d["NC"] == d["CFC"]


def test_static_pattern_used():
    sim = Simulation(SHORT, 1, "STATIC")
    s = sim.run()
    assert s.counters["tb_count"] > 0
    cb_len = len(SHORT.engine.static_pattern)
    assert cb_len == SHORT.frame.frame_len


def test_trace_lines():
    trace = []
    engine.run(Scenario().replace(engine={"horizon_tti": 100}), 1, "HFCS", trace)
    assert len(trace) == 5
    first = trace[0].split()
    assert first[0] == "0.0" and first[1].startswith("common=")
    assert len(first) == 2 + 6
    assert all(p.startswith(f"c{i + 1}:req=") for i, p in enumerate(first[2:]))


def test_xn_delay_defers_grants():
    sc = Scenario().replace(engine={"horizon_tti": 400}, coordination={"xn_delay_ms": 2.0})
    s = engine.run(sc, 1, "HFCS")
    assert s.counters["tb_count"] > 0


def test_unknown_scheme_fails_fast():
    with pytest.raises(ConfigError):
        Simulation(SHORT, 1, "TDMA")


def test_manifest_contains_seed_and_config():
    text = engine.manifest(SHORT, 9, "HFCS")
    assert "seed: 9" in text and "scheme: HFCS" in text and "horizon_tti: 1200" in text
