"""Discrete-time multi-cell simulator and the five frame-coordination schemes.

Schemes
    HFCS    hybrid codebook, sliding misalignment threshold, master arbitration,
            worst-CQI-first scheduling in static slots
    NC      every cell applies its own traffic-matched RFC, no coordination
    SCC     master arbitration with one global misalignment threshold
    CFC     NC frame selection with cross-link interference removed
    STATIC  one fixed pattern in every cell

Node numbering: BS ``c`` is node ``c``; UE ``k`` is node ``C + k``.

Each TTI runs in two phases. First every cell freezes its transmissions
(PRB owner, transmitter node, power). The SINR of every scheduled PRB is then
evaluated against those frozen sets only. The receiver is LMMSE-IRC built on
the mean interference covariance; under i.i.d. fading that covariance is white,
so the post-detection SINR is the useful gain of the dominant eigenmode over
noise plus the summed mean interference power.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import coordination as coord
from . import deployment as dep
from . import radio
from ._kernels import evaluate_tti
from .errors import ConfigError, SimulationAbort
from .frame import Codebook, RadioFrameConfig, SlotDirection, build_codebook
from .metrics import MetricsSink
from .scenario import SCHEMES, Scenario
from .scheduler import (IDLE, PENDING_RETX, CqiTable, HarqProcess, PfState, schedule_dss,
                        schedule_sss)
from .traffic import TTI_MS, Buffer, Packet, arrival_times, hold

DL, UL = 1, -1


def scenario_codebook(sc: Scenario) -> Codebook:
    f = sc.frame
    return build_codebook(f.frame_len, list(zip(f.sss_positions, f.sss_slots)),
                          [tuple(r) for r in f.dss_ratios], f.shifts_per_group,
                          f.guard_at_switch)


def static_rfc(sc: Scenario) -> RadioFrameConfig:
    return RadioFrameConfig.from_string(sc.engine.static_pattern)


def dominant_gain(H: np.ndarray) -> np.ndarray:
    """Largest eigenvalue of ``H H^H`` for a batch of 2 x N_t (or general) matrices."""
    if H.shape[-2] == 2:
        a = np.einsum("...j,...j->...", H[..., 0, :], H[..., 0, :].conj()).real
        d = np.einsum("...j,...j->...", H[..., 1, :], H[..., 1, :].conj()).real
        b = np.einsum("...j,...j->...", H[..., 0, :], H[..., 1, :].conj())
        return 0.5 * (a + d) + np.sqrt(0.25 * (a - d) ** 2 + np.abs(b) ** 2)
    return np.linalg.svd(H, compute_uv=False)[..., 0] ** 2


def prb_interference(tx_node, txp, rx_node, gain, is_bs, gain_cross=None):
    """Mean interference at every scheduled PRB, split by link type.

    ``tx_node``/``rx_node``/``txp`` are (C, P) with ``-1``/0 on idle PRBs.
    ``gain[i, j]`` is the large-scale gain from node ``j`` to node ``i`` with
    same-cell pairs zeroed. Returns ``(same_link, cross_link)``, each (C, P):
    cross-link terms join two BSs or two UEs.
    """
    n = gain.shape[1]
    txn = np.maximum(tx_node, 0)
    idx = np.maximum(rx_node, 0)[:, None, :] * n + txn[None, :, :]
    g_cross = gain_cross if gain_cross is not None else np.where(
        is_bs[:, None] == is_bs[None, :], gain, 0.0)
    pw_all = (gain.take(idx) * txp).sum(axis=1)
    i_cross = (g_cross.take(idx) * txp).sum(axis=1)
    return np.maximum(pw_all - i_cross, 0.0), i_cross


@dataclass
class _Setup:
    C: int
    K: int
    P: int
    F: int


class Simulation:
    """One drop of one scheme. ``run()`` returns the filled MetricsSink."""

    def __init__(self, scenario: Scenario, seed: int | None = None, scheme: str | None = None,
                 trace: list | None = None):
        sc = scenario
        self.sc = sc
        self.seed = sc.engine.seed if seed is None else int(seed)
        self.scheme = (scheme or sc.engine.scheme).upper()
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {scheme!r}")
        self.trace = trace
        streams = np.random.SeedSequence(self.seed).spawn(5)
        self.rng_drop, self.rng_traffic, self.rng_fading, self.rng_decode, self.rng_coord = (
            np.random.default_rng(s) for s in streams)

        d, r, t, f = sc.deployment, sc.radio, sc.traffic, sc.frame
        self.codebook = scenario_codebook(sc)
        self.n_dss = f.frame_len - len(f.sss_positions)
        self.quantizer = coord.ThresholdQuantizer(self.n_dss, tuple(sc.coordination.cli_range_dbm),
                                                  tuple(sc.coordination.hold_range_ms))
        pathloss = {k: tuple(v) for k, v in r.pathloss.items()}
        self.dep = dep.drop(d.n_cells, d.k_dl, d.k_ul, self.rng_drop, isd=d.isd_m,
                            wrap_around=d.wrap_around, shadowing_db=d.shadowing_db,
                            pathloss=pathloss, min_distance_m=d.min_distance_m)
        C, K, P, F = d.n_cells, self.dep.n_ues, r.n_prb, f.frame_len
        self.dims = _Setup(C, K, P, F)
        self.table = radio.McsTable(tuple(tuple(e) for e in r.mcs_table))

        bw = 12 * r.scs_khz * 1e3
        self.noise_ue = radio.noise_mw(bw, r.noise_figure_ue_db)
        self.noise_bs = radio.noise_mw(bw, r.noise_figure_bs_db)
        self.p_dl_prb = 10 ** ((r.p_dl_dbm - 10 * math.log10(P)) / 10)
        txpw = radio.TxPower(r.p_dl_dbm, r.p_max_ue_dbm, r.alpha, r.p0_dbm)
        pl = self.dep.pathloss_serving_db
        self.p_ul = [[0.0] + [10 ** (radio.ul_power(float(pl[k]), txpw, n) / 10)
                              for n in range(1, P + 1)] for k in range(K)]

        N = C + K
        node_cell = np.concatenate([np.arange(C), self.dep.ue_cell])
        gain = np.zeros((N, N))
        gb, gu, gbb = self.dep.gain_bs_ue, self.dep.gain_ue_ue, self.dep.gain_bs_bs
        gain[:C, :C] = gbb
        gain[:C, C:] = gb
        gain[C:, :C] = gb.T
        gain[C:, C:] = gu
        gain[node_cell[:, None] == node_cell[None, :]] = 0.0
        self.gain = gain
        self.is_bs = np.arange(N) < C
        self.cross_pair = self.is_bs[:, None] == self.is_bs[None, :]
        self.gain_cross = np.where(self.cross_pair, gain, 0.0)
        self.g_serving = gb[self.dep.ue_cell, np.arange(K)]

    # ------------------------------------------------------------------

    def _draw_useful(self):
        r = self.sc.radio
        K = self.dims.K
        H = radio.complex_normal(self.rng_fading, (K, r.n_rx, r.n_tx))
        return dominant_gain(H) * self.g_serving

    def _arrivals(self, horizon_ms):
        t = self.sc.traffic
        times, owners = [], []
        for k in range(self.dims.K):
            lam = t.lambda_dl if self.dep.ue_is_dl[k] else t.lambda_ul
            if lam <= 0:
                continue
            a = arrival_times(lam, horizon_ms, self.rng_traffic)
            times.append(a)
            owners.append(np.full(a.size, k))
        if not times:
            return np.zeros(0), np.zeros(0, dtype=np.int64)
        times = np.concatenate(times)
        owners = np.concatenate(owners)
        order = np.argsort(times, kind="stable")
        return times[order], owners[order]

    def run(self) -> MetricsSink:
        sc, D = self.sc, self.dims
        C, K, P, F = D.C, D.K, D.P, D.F
        e, s_cfg, cc = sc.engine, sc.scheduler, sc.coordination
        scheme = self.scheme
        cfc = scheme == "CFC"
        sink = MetricsSink(scheme)
        sink.epsilon_ms = sc.traffic.epsilon_ms
        sink.counters["clamped_links"] = self.dep.clamped_links
        T = e.horizon_tti
        warm = int(round(e.warmup_fraction * T))
        warm_ms = warm * TTI_MS
        cb = self.codebook
        table = self.table
        bpp_of = [table.bits_per_prb(m) for m in range(len(table))]
        thr_of = [table.threshold_db(m) for m in range(len(table))]
        backoff = sc.radio.cqi_backoff_db
        rtt, max_tx, max_proc = s_cfg.harq_rtt_slots, s_cfg.harq_max_tx, s_cfg.harq_processes
        ue_cell = [int(x) for x in self.dep.ue_cell]
        ue_dl = [bool(x) for x in self.dep.ue_is_dl]
        cell_ues = {(c, DL): [k for k in range(K) if ue_cell[k] == c and ue_dl[k]]
                    for c in range(C)}
        cell_ues.update({(c, UL): [k for k in range(K) if ue_cell[k] == c and not ue_dl[k]]
                         for c in range(C)})
        f_bits = {True: sc.traffic.f_dl_bits, False: sc.traffic.f_ul_bits}
        dname = {DL: "DL", UL: "UL"}
        p_dl_prb, p_ul = self.p_dl_prb, self.p_ul
        nz_ue, nz_bs = self.noise_ue, self.noise_bs
        gain, is_bs, gain_cross = self.gain, self.is_bs, self.gain_cross
        rx_node_ue = np.array([C + k if ue_dl[k] else ue_cell[k] for k in range(K)])
        want_code = np.array([DL if ue_dl[k] else UL for k in range(K)])
        p_ref = np.array([p_dl_prb if ue_dl[k] else p_ul[k][1] for k in range(K)])
        nz_ref = np.where(self.dep.ue_is_dl, nz_ue, nz_bs)
        dl_ue_mask = np.zeros((C, K), dtype=bool)
        for k in range(K):
            if ue_dl[k]:
                dl_ue_mask[ue_cell[k], k] = True

        # --- traffic -----------------------------------------------------
        arr_t, arr_u = self._arrivals(T * TTI_MS)
        arr_tick = (np.floor(arr_t / TTI_MS).astype(np.int64) + 1).tolist()
        arr_t = arr_t.tolist()
        arr_u = arr_u.tolist()
        n_arr, ai = len(arr_t), 0

        # --- per-UE and per-cell state --------------------------------------
        buf = [Buffer() for _ in range(K)]
        pending: list[list[HarqProcess]] = [[] for _ in range(K)]
        n_active = [0] * K
        next_pid = [0] * K
        n_pkts = np.zeros(K, dtype=np.int64)
        active_ticks = np.zeros(K, dtype=np.int64)
        ue_bits_win = np.zeros(K)
        pf = PfState(K, s_cfg.pf_smoothing, s_cfg.pf_floor_bits)
        cqi = CqiTable(K)
        mcs = [0] * K
        bpp_u = [bpp_of[0]] * K
        floor_rate = float(table.tb_bits(0, P))
        est_rate = {(c, d): floor_rate for c in range(C) for d in (DL, UL)}
        a_est = cc.est_rate_smoothing
        filters = [coord.CliFilterState(rho=cc.rho_dbm, literal=cc.xi_form == "literal")
                   for _ in range(C)]
        theta_bs = [coord.CLI_FLOOR_DBM] * C
        theta_ue = [coord.CLI_FLOOR_DBM] * C
        cell_bits = np.zeros((C, 2))
        txacc = np.zeros((F, C + K))
        if scheme == "STATIC":
            rfc0 = static_rfc(sc)
            if rfc0.frame_len != F:
                raise ConfigError("static pattern length differs from frame length")
            rfcs = [rfc0] * C
            sss_mask = [False] * F
        else:
            rfcs = [cb.rfcs[coord.select_rfc_slave(0, 0, cb)]] * C
            sss_mask = list(cb.rfcs[0].sss_mask)
        rfc_index = [cb.index_of(r) if scheme != "STATIC" else -1 for r in rfcs]
        codes = [r.codes.tolist() for r in rfcs]
        preempt_sss = scheme == "HFCS" and s_cfg.sss_preemption
        xn_ticks = int(math.ceil(cc.xn_delay_ms / TTI_MS - 1e-9))
        link = coord.XnLink(2 * xn_ticks)
        psi_field = coord.psi_bits(self.n_dss)
        ug = self._draw_useful()
        ug_l = ug.tolist()
        counters = sink.counters
        win = e.ue_window_tti
        decode_rng = self.rng_decode
        lat_cols = {DL: sink._cols[("latency", "DL")], UL: sink._cols[("latency", "UL")]}
        if_cols = {DL: sink._cols[("interf", "DL")], UL: sink._cols[("interf", "UL")]}
        demand = [0] * K
        eps = sink.epsilon_ms

        for t in range(T):
            s = t % F
            if s == 0:
                # ---- frame boundary: measure, redraw fading, coordinate ----
                if t > 0:
                    codes_np = np.array(codes)
                    i_all = txacc @ gain.T
                    i_cross = txacc @ self.gain_cross.T
                    i_used = i_all - i_cross if cfc else i_all
                    mask = codes_np[self.dep.ue_cell] == want_code[:, None]
                    ik = i_used[:, rx_node_ue].T
                    ibar = (ik * mask).sum(1) / np.maximum(mask.sum(1), 1)
                    sinr = p_ref * ug / (nz_ref + ibar)
                    cqi.update(10 * np.log10(sinr), t // F - 1)
                    ul_m = codes_np == UL
                    dl_m = codes_np == DL
                    tb = (i_cross[:, :C].T * ul_m).sum(1) / np.maximum(ul_m.sum(1), 1)
                    iu = i_cross[:, C:].T                       # (K, F)
                    dl_slot_ue = dl_m[self.dep.ue_cell]         # (K, F)
                    per_ue = (iu * dl_slot_ue).sum(1) / np.maximum(dl_slot_ue.sum(1), 1)
                    tu = (dl_ue_mask * per_ue).sum(1) / np.maximum(dl_ue_mask.sum(1), 1)
                    theta_bs = [max(coord.CLI_FLOOR_DBM, 10 * math.log10(x)) if x > 0
                                else coord.CLI_FLOOR_DBM for x in tb.tolist()]
                    theta_ue = [max(coord.CLI_FLOOR_DBM, 10 * math.log10(x)) if x > 0
                                else coord.CLI_FLOOR_DBM for x in tu.tolist()]
                    txacc[:] = 0.0
                    if t - F >= warm:
                        scale = 1.0 / (F * TTI_MS * 1e-3) / 1e6
                        for c in range(C):
                            for j, d in enumerate((DL, UL)):
                                if cell_ues[(c, d)]:
                                    sink.add("thr_cell", dname[d], t - F, c, -1,
                                             cell_bits[c, j] * scale)
                    cell_bits[:] = 0.0
                    if t % win == 0:
                        if t - win >= warm:
                            for k in np.flatnonzero(active_ticks).tolist():
                                v = ue_bits_win[k] / (active_ticks[k] * TTI_MS * 1e-3) / 1e6
                                sink.add("thr_ue", "DL" if ue_dl[k] else "UL", t - win,
                                         ue_cell[k], k, float(v))
                        active_ticks[:] = 0
                        ue_bits_win[:] = 0.0
                    ug = self._draw_useful()
                    ug_l = ug.tolist()
                else:
                    sinr = p_ref * ug / nz_ref
                    cqi.update(10 * np.log10(sinr), -1)
                rep = cqi.report.tolist()
                mcs = [table.select(x, backoff) for x in rep]
                bpp_u = [bpp_of[m] for m in mcs]
                if scheme != "STATIC":
                    for msg in link.deliver(t):
                        self._apply(msg, rfcs, rfc_index, codes)
                    new = self._coordinate(t, buf, cell_ues, rfcs, est_rate, filters,
                                           theta_bs, theta_ue, sink, psi_field)
                    if new is not None:
                        if scheme in ("HFCS", "SCC") and C > 1 and xn_ticks > 0:
                            link.send(t, new)
                        else:
                            self._apply(new, rfcs, rfc_index, codes)

            # ---- arrivals schedulable from this tick ----------------------
            while ai < n_arr and arr_tick[ai] <= t:
                u = arr_u[ai]
                dl = ue_dl[u]
                buf[u].push(Packet(ai, f_bits[dl], arr_t[ai], "DL" if dl else "UL", u))
                n_pkts[u] += 1
                ai += 1

            # ---- phase 1: schedule every cell ------------------------------
            tbs = []
            avg_l = None
            rows = []
            for c in range(C):
                d = codes[c][s]
                if d == 0:
                    counters["idle_slots"] += 1
                    continue
                retx = []
                cands = []
                for u in cell_ues[(c, d)]:
                    pend = pending[u]
                    if pend and pend[0].ready_tick <= t:
                        retx.append(pend[0])
                    left = buf[u].unsent_bits
                    if left > 0 and n_active[u] < max_proc:
                        cands.append(u)
                        demand[u] = -(-left // bpp_u[u])
                if not retx and not cands:
                    counters["idle_slots"] += 1
                    continue
                if len(retx) > 1:
                    retx.sort(key=lambda p: (p.ready_tick, p.ue))
                if avg_l is None:
                    avg_l = pf.avg.tolist()
                if preempt_sss and sss_mask[s]:
                    grants = schedule_sss(cands, rep, bpp_u, avg_l, demand, mcs, P, retx)
                else:
                    grants = schedule_dss(cands, bpp_u, avg_l, demand, mcs, P, retx)
                if not grants:
                    counters["idle_slots"] += 1
                    continue
                for g in grants:
                    u = g.ue
                    n = len(g.prbs)
                    if g.retx is not None:
                        proc = g.retx
                        pending[u].remove(proc)
                        buf[u].pending_harq_bits -= proc.payload
                    else:
                        m = g.mcs
                        b = buf[u]
                        size = n * bpp_of[m]
                        payload = size if size < b.unsent_bits else b.unsent_bits
                        proc = HarqProcess(next_pid[u], u, size, n, m, b.take(size), payload)
                        next_pid[u] += 1
                        n_active[u] += 1
                    # c, first PRB, n, tx node, rx node, power, signal, noise, acc, threshold
                    if d == DL:
                        rows.append((c, g.prbs[0], n, c, C + u, p_dl_prb, p_dl_prb * ug_l[u],
                                     nz_ue, proc.acc_sinr, thr_of[proc.mcs]))
                    else:
                        pw = p_ul[u][n]
                        rows.append((c, g.prbs[0], n, C + u, c, pw, pw * ug_l[u],
                                     nz_bs, proc.acc_sinr, thr_of[proc.mcs]))
                    tbs.append((c, u, proc, d))

            active_ticks += n_pkts > 0
            if not tbs:
                pf.update(0.0)
                continue

            # ---- phase 2: SINR against the frozen transmit sets -------------
            n_tb = len(tbs)
            draws = decode_rng.random(n_tb)
            isum = np.zeros(C)
            icnt = np.zeros(C, dtype=np.int64)
            eff, acc_k, ok_k = evaluate_tti(C, P, np.array(rows), draws, gain, gain_cross,
                                            not cfc, isum, icnt, txacc[s])
            eff = eff.tolist()
            ok_l = ok_k.tolist()
            if not all(map(math.isfinite, eff)):
                raise SimulationAbort(f"non-finite SINR at tick {t}")
            if t >= warm:
                for c, n in enumerate(icnt.tolist()):
                    if n:
                        x = isum[c] / n
                        cols = if_cols[codes[c][s]]
                        cols[0].append(t)
                        cols[1].append(c)
                        cols[2].append(-1)
                        cols[3].append(10 * math.log10(x) if x > 1e-20 else -200.0)

            delivered = np.zeros(K)
            cell_deliv = {}
            now_ms = (t + 1) * TTI_MS
            counters["tb_count"] += n_tb
            for i, (c, u, proc, d) in enumerate(tbs):
                # Chase combining and HARQ feedback, as HarqProcess.transmit + harq_step
                proc.transmissions += 1
                proc.history.append(eff[i])
                proc.acc_sinr += eff[i]
                key = (c, d)
                if ok_l[i]:
                    proc.state = IDLE
                    n_active[u] -= 1
                    bits = proc.payload
                    delivered[u] = bits
                    cell_deliv[key] = cell_deliv.get(key, 0) + bits
                    counters["bits_delivered"] += bits
                    ue_bits_win[u] += bits
                    cell_bits[c, 0 if d == DL else 1] += bits
                    done = buf[u].ack(proc.segments, now_ms)
                    for pkt in done:
                        n_pkts[u] -= 1
                        counters["packets_delivered"] += 1
                        if pkt.arrival_time >= warm_ms:
                            lat = now_ms - pkt.arrival_time
                            cols = lat_cols[d]
                            cols[0].append(t)
                            cols[1].append(c)
                            cols[2].append(u)
                            cols[3].append(lat)
                            if lat > eps:
                                counters["epsilon_violations"] += 1
                else:
                    cell_deliv.setdefault(key, 0)
                    if proc.transmissions < max_tx:
                        proc.state = PENDING_RETX
                        proc.ready_tick = t + rtt
                        pending[u].append(proc)
                        buf[u].pending_harq_bits += proc.payload
                    else:
                        proc.state = IDLE
                        n_active[u] -= 1
                        buf[u].requeue(proc.segments)
                        counters["harq_failures"] += 1
            for key, bits in cell_deliv.items():
                est_rate[key] = max(floor_rate, (1 - a_est) * est_rate[key] + a_est * bits)
            pf.update(delivered)

        counters["packets_generated"] = ai
        counters["bits_generated"] = sum(f_bits[ue_dl[u]] for u in arr_u[:ai])
        in_flight = sum(p.payload for k in range(K) for p in pending[k])
        buffered = sum(b.unsent_bits for b in buf)
        counters["bits_unsent"] = buffered
        counters["bits_in_harq"] = counters["bits_generated"] - counters["bits_delivered"] - buffered
        counters["bits_pending_retx"] = in_flight
        sink.meta = {"seed": self.seed, "n_cells": C, "n_ues": K, "codebook_size": cb.size,
                     "index_bits": cb.index_bits, "horizon_tti": T, "warmup_tti": warm}
        return sink

    # ------------------------------------------------------------------

    def _apply(self, new: dict, rfcs, rfc_index, codes):
        for c, idx in new.items():
            rfcs[c] = self.codebook.rfcs[idx]
            rfc_index[c] = idx
            codes[c] = rfcs[c].codes.tolist()

    def _coordinate(self, t, buf, cell_ues, rfcs, est_rate, filters, theta_bs, theta_ue,
                    sink, psi_field):
        """One coordination round at a frame boundary; returns {cell: rfc index}."""
        cb, C = self.codebook, self.dims.C
        z = [(sum(buf[u].total_bits for u in cell_ues[(c, DL)]),
              sum(buf[u].total_bits for u in cell_ues[(c, UL)])) for c in range(C)]
        requests = [coord.select_rfc_slave(zd, zu, cb) for zd, zu in z]
        scheme = self.scheme
        if scheme in ("NC", "CFC") or C == 1:
            return dict(enumerate(requests))
        if scheme == "HFCS":
            psi = []
            for c in range(C):
                zd, zu = z[c]
                filters[c] = coord.update_cli_filter(filters[c], theta_bs[c], theta_ue[c], zd, zu)
                h = max(hold(zd, rfcs[c], est_rate[(c, DL)], SlotDirection.DL),
                        hold(zu, rfcs[c], est_rate[(c, UL)], SlotDirection.UL))
                p = coord.sliding_threshold(filters[c].score_dbm, h, self.quantizer)
                psi.append(min(self.n_dss, max(1, p)))
            up_bits = cb.index_bits + psi_field
        else:
            psi = [self.sc.coordination.scc_omega] * C
            up_bits = cb.index_bits
        reqs = [coord.XnRequest(c, requests[c], psi[c]) for c in range(1, C)]
        common = coord.choose_common(reqs, self.rng_coord)
        grants = coord.arbitrate_master(reqs, cb, common=common)
        sink.overhead_bits += len(reqs) * (up_bits + cb.index_bits)
        sink.coordination_rounds += 1
        out = {0: common}
        out.update({g.cell: g.granted_rfc_index for g in grants})
        if self.trace is not None:
            phi = cb.misalignment_matrix
            parts = [f"{t * TTI_MS:.1f}", f"common={common}"]
            for r, g in zip(reqs, grants):
                parts.append(f"c{r.cell}:req={r.rfc_index},psi={r.psi},"
                             f"grant={g.granted_rfc_index},phi={int(phi[g.granted_rfc_index, common])}")
            self.trace.append(" ".join(parts))
        return out


def run(scenario: Scenario, seed: int | None = None, scheme: str | None = None,
        trace: list | None = None) -> MetricsSink:
    """Simulate one drop; deterministic for (scenario, seed, scheme)."""
    return Simulation(scenario, seed, scheme, trace).run()


def manifest(scenario: Scenario, seed: int, scheme: str) -> str:
    from . import __version__
    cb = scenario_codebook(scenario)
    return (f"dyntdd {__version__}\nseed: {seed}\nscheme: {scheme}\n"
            f"codebook: N={cb.size} L={len(cb.groups)} B={cb.index_bits}\n"
            f"---\n{scenario.to_yaml()}")
