import math
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dyntdd import radio
from dyntdd.deployment import drop
from dyntdd.errors import ContractError, SimulationAbort
from dyntdd.radio import (ChannelSet, McsTable, PowerSet, TxPower, bler, chase_combine,
                          draw_channels, effective_sinr, large_scale_gain, lmmse_irc_combine,
                          sinr_dl, sinr_ul, tb_success, ul_power, zf_precoder)

from oracles import random_link_instance, sinr_dl_oracle, sinr_ul_oracle


def small_deployment(seed=0, C=3, k=2):
    return drop(C, k, k, np.random.default_rng(seed))


random_instance = random_link_instance


def test_channel_dimensions_and_reciprocity():
    dep = small_deployment()
    ch = draw_channels(dep, 7)
    C, K = dep.n_cells, dep.n_ues
    assert ch.H_dl.shape == (K, C, 2, 8)
    assert ch.H_ul.shape == (C, K, 8, 2)
    assert ch.G.shape == (K, K, 2, 2)
    assert ch.Q.shape == (C, C, 8, 8)
    assert np.array_equal(ch.H_ul[1, 0], ch.H_dl[0, 1].T)


def test_same_seed_same_channels():
    dep = small_deployment()
    a, b = draw_channels(dep, 11), draw_channels(dep, 11)
    for name in ("H_dl", "H_ul", "G", "Q"):
        assert np.array_equal(getattr(a, name), getattr(b, name))


def test_large_scale_gains_in_unit_interval():
    dep = small_deployment()
    for g in (dep.gain_bs_ue, dep.gain_ue_ue, dep.gain_bs_bs):
        off = g[g != 0]
        assert (off > 0).all() and (off <= 1).all()


def test_pathloss_doubling_distance():
    g1 = large_scale_gain(200.0, 128.1, 37.0)
    g2 = large_scale_gain(400.0, 128.1, 37.0)
    assert g2 / g1 == pytest.approx(2 ** -3.7, rel=1e-12)


def test_rayleigh_unit_power():
    z = radio.complex_normal(np.random.default_rng(3), (100_000,))
    assert 0.99 <= np.mean(np.abs(z) ** 2) <= 1.01


def test_zf_single_user_is_matched_filter():
    rng = np.random.default_rng(1)
    H = radio.complex_normal(rng, (2, 8))
    pc = zf_precoder(H)
    assert np.linalg.norm(pc.v) == pytest.approx(1, abs=1e-9)
    assert np.linalg.norm(pc.w) == pytest.approx(1, abs=1e-9)
    s = np.linalg.svd(H, compute_uv=False)[0]
    assert abs(pc.w.conj() @ H @ pc.v) == pytest.approx(s, rel=1e-9)


def test_zf_nulls_co_scheduled_rows():
    rng = np.random.default_rng(2)
    for _ in range(20):
        H = radio.complex_normal(rng, (2, 8))
        others = [radio.complex_normal(rng, (2, 8)) for _ in range(3)]
        pc = zf_precoder(H, others)
        useful = abs(pc.w.conj() @ H @ pc.v) ** 2
        for Ho in others:
            wo = np.linalg.svd(Ho)[0][:, 0]
            assert abs(wo.conj() @ Ho @ pc.v) ** 2 <= 1e-9 * useful


def test_zf_orthogonal_users():
    H1 = np.zeros((2, 8), complex)
    H2 = np.zeros((2, 8), complex)
    H1[0, 0] = 1
    H2[0, 1] = 1
    pc = zf_precoder(H1, [H2])
    assert abs(H2[0] @ pc.v) < 1e-12


def test_zf_rank_deficient_falls_back():
    H = np.zeros((2, 8), complex)
    H[0, 0] = 1
    pc = zf_precoder(H, [H.copy()])
    assert pc.fallback


def test_zf_too_many_streams():
    with pytest.raises(ContractError):
        zf_precoder(np.ones((2, 2)), [np.ones((2, 2))] * 2)


def unit_case():
    ch = ChannelSet(H_dl=np.ones((2, 1, 1, 1), complex), H_ul=np.ones((1, 2, 1, 1), complex),
                    G=np.ones((2, 2, 1, 1), complex), Q=np.ones((1, 1, 1, 1), complex),
                    gain_bs_ue=np.ones((1, 2)), gain_ue_ue=np.ones((2, 2)),
                    gain_bs_bs=np.ones((1, 1)))
    v = {0: np.ones(1), 1: np.ones(1)}
    w = {0: np.ones(1), 1: np.ones(1)}
    return ch, v, w


def test_sinr_dl_unit_examples():
    ch, v, w = unit_case()
    pw = PowerSet(np.ones(1), np.ones(2), 1.0, 1.0)
    r = sinr_dl(0, [(0, 0)], [], ch, v, w, [0, 0], pw)
    assert r.gamma == pytest.approx(1.0)
    assert r.gamma_db == pytest.approx(0.0)
    r = sinr_dl(0, [(0, 0)], [1], ch, v, w, [0, 0], pw)
    assert r.gamma == pytest.approx(0.5)
    r = sinr_dl(0, [(0, 0)], [1], ch, v, w, [0, 0], pw, cross_link=False)
    assert r.gamma == pytest.approx(1.0)


def test_sinr_ul_examples():
    ch, v, w = unit_case()
    pw = PowerSet(np.array([1000.0]), np.ones(2), 1.0, 1.0)
    r = sinr_ul(0, [0], [], ch, v, w, [0, 0], pw)
    assert r.gamma == pytest.approx(1.0)
    r = sinr_ul(0, [0], [(0, 1)], ch, v, w, [0, 0], pw)
    assert r.gamma == pytest.approx(1.0 / (1.0 + 1000.0))


def test_sinr_requires_victim_in_set():
    ch, v, w = unit_case()
    pw = PowerSet(np.ones(1), np.ones(2), 1.0, 1.0)
    with pytest.raises(ContractError):
        sinr_dl(0, [(0, 1)], [], ch, v, w, [0, 0], pw)
    with pytest.raises(ContractError):
        sinr_ul(0, [1], [], ch, v, w, [0, 0], pw)


def test_sinr_matches_oracle_random():
    rng = np.random.default_rng(5)
    for _ in range(200):
        ch, v, w, serving, pw = random_instance(rng)
        K = len(serving)
        dl = [k for k in range(K) if rng.random() < 0.5] or [0]
        ul = [k for k in range(K) if k not in dl]
        k = dl[0]
        r = sinr_dl(k, [(serving[i], i) for i in dl], ul, ch, v, w, serving, pw)
        o = sinr_dl_oracle(k, [(serving[i], i) for i in dl], ul, ch, v, w, serving,
                           pw.p_dl, pw.p_ul, pw.noise_ue)
        assert r.gamma == pytest.approx(o, rel=1e-9)
        assert r.gamma == pytest.approx(
            r.useful_power / (r.noise + r.same_link_interference + r.cross_link_interference),
            rel=1e-12)
        if ul:
            j = ul[0]
            r = sinr_ul(j, ul, [(serving[i], i) for i in dl], ch, v, w, serving, pw)
            o = sinr_ul_oracle(j, ul, [(serving[i], i) for i in dl], ch, v, w, serving,
                               pw.p_dl, pw.p_ul, pw.noise_bs)
            assert r.gamma == pytest.approx(o, rel=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_interference_monotone(seed):
    rng = np.random.default_rng(seed)
    ch, v, w, serving, pw = random_instance(rng)
    base = sinr_dl(0, [(serving[0], 0)], [], ch, v, w, serving, pw)
    more = sinr_dl(0, [(serving[0], 0)], [3], ch, v, w, serving, pw)
    assert more.gamma <= base.gamma
    up = sinr_ul(1, [1], [], ch, v, w, serving, pw)
    up2 = sinr_ul(1, [1], [(serving[2], 2)], ch, v, w, serving, pw)
    assert up2.gamma <= up.gamma
    for r in (base, more, up, up2):
        assert min(r.useful_power, r.same_link_interference, r.cross_link_interference) >= 0
        assert r.noise > 0


def test_irc_white_equals_matched_filter():
    rng = np.random.default_rng(0)
    h = radio.complex_normal(rng, (2,))
    _, s = lmmse_irc_combine(h, 2.0 * np.eye(2))
    assert s == pytest.approx(np.vdot(h, h).real / 2.0, rel=1e-12)


def test_irc_nulls_orthogonal_rank_one():
    h = np.array([1.0, 0.0], complex)
    g = np.array([0.0, 1.0], complex)
    R = np.eye(2) + 1e6 * np.outer(g, g.conj())
    _, s = lmmse_irc_combine(h, R)
    assert s == pytest.approx(1.0, rel=1e-6)


def test_irc_two_factorisations_agree():
    rng = np.random.default_rng(4)
    for _ in range(50):
        h = radio.complex_normal(rng, (2,))
        g = radio.complex_normal(rng, (2,))
        R = np.eye(2) * 0.1 + np.outer(g, g.conj())
        _, s = lmmse_irc_combine(h, R)
        lam, U = np.linalg.eigh(R)
        s2 = float(np.sum(np.abs(U.conj().T @ h) ** 2 / lam))
        assert s == pytest.approx(s2, rel=1e-9)
        # never below max-ratio SINR against the same total power treated as white
        mrc = np.vdot(h, h).real ** 2 / np.vdot(h, R @ h).real
        assert s >= mrc - 1e-9


def test_irc_non_finite_aborts():
    with pytest.raises(SimulationAbort):
        lmmse_irc_combine(np.ones(2), np.array([[1, np.nan], [0, 1]]))


def test_ul_power_examples():
    p = TxPower(p_max_ue=23, alpha=1.0, p0=-103)
    assert ul_power(100.0, p) == pytest.approx(-3.0)
    assert ul_power(130.0, p) == pytest.approx(23.0)
    assert ul_power(80.0, TxPower(alpha=0.0, p0=-103)) == -103
    with pytest.raises(ContractError):
        ul_power(-1.0, p)


@given(st.floats(0, 200), st.integers(1, 24))
def test_ul_power_never_above_cap(pl, n):
    p = TxPower()
    assert ul_power(pl, p, n) + 10 * math.log10(n) <= p.p_max_ue + 1e-9


def test_chase_and_effective_sinr():
    assert chase_combine([1.0, 1.0]) == 2.0
    assert 10 * math.log10(chase_combine([1.0, 1.0])) == pytest.approx(3.0103, abs=1e-4)
    assert effective_sinr([3.0, 3.0]) == pytest.approx(3.0)
    s = [0.5, 10.0]
    assert effective_sinr(s) < np.mean(s)


def test_bler_anchor_and_high_sinr():
    t = McsTable()
    assert float(bler(t.threshold_db(3), t.threshold_db(3))) == pytest.approx(0.1)
    assert 1 - float(bler(t.threshold_db(3) + 20, t.threshold_db(3))) >= 0.999
    rng = np.random.default_rng(0)
    lin = 10 ** ((t.threshold_db(3) + 20) / 10)
    oks = [tb_success(lin, 3, rng)[0] for _ in range(2000)]
    assert np.mean(oks) >= 0.995
    ok, bits = tb_success(lin, 3, rng, n_prb=2)
    assert bits == (t.tb_bits(3, 2) if ok else 0)


def test_mcs_out_of_range():
    with pytest.raises(ContractError):
        tb_success(1.0, 99, np.random.default_rng(0))


def test_mcs_select_with_backoff():
    t = McsTable()
    assert t.select(-100) == 0
    assert t.select(t.threshold_db(4) + 1.0) == 4
    assert t.select(t.threshold_db(4) + 0.99) == 3
