"""Per-cell, per-TTI user multiplexing.

DSS slots use a proportional-fair metric on every PRB. SSS slots first
admit the backlogged users with the worst CQI, then share PRBs among the
admitted set with the same PF metric. HARQ retransmissions always go first,
and a UE carries at most one transport block per TTI.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ContractError, ConfigError


# --- state ---------------------------------------------------------------

class PfState:
    """Smoothed delivered bits per TTI for every UE."""

    def __init__(self, n_ues: int, smoothing: float = 0.01, floor: float = 1.0):
        if not 0.0 < smoothing < 1.0:
            raise ConfigError("PF smoothing must lie in (0, 1)")
        self.smoothing = smoothing
        self.floor = floor
        self.avg = np.full(n_ues, floor)

    def update(self, delivered_bits: np.ndarray, mask: np.ndarray | None = None):
        """One TTI of exponential smoothing; ``mask`` limits which UEs move."""
        a = self.smoothing
        if mask is None:
            avg = self.avg
            avg *= 1.0 - a
            avg += a * delivered_bits
            np.maximum(avg, self.floor, out=avg)
        else:
            new = np.maximum((1 - a) * self.avg + a * delivered_bits, self.floor)
            self.avg = np.where(mask, new, self.avg)


class CqiTable:
    """Quantized post-detection SINR reports, one frame old."""

    def __init__(self, n_ues: int, initial_db: float = 0.0, step_db: float = 1.0):
        self.step_db = step_db
        self.report = np.full(n_ues, math.floor(initial_db / step_db) * step_db)
        self.frame = -1

    def update(self, sinr_db: np.ndarray, frame: int):
        self.report = np.floor(np.asarray(sinr_db, dtype=float) / self.step_db) * self.step_db
        self.frame = frame

    def staleness(self, frame: int) -> int:
        return frame - self.frame


IDLE, WAITING, PENDING_RETX = "idle", "waiting_feedback", "pending_retx"


class HarqProcess:
    """One stop-and-wait HARQ process with Chase combining."""

    __slots__ = ("pid", "ue", "tb_bits", "n_prb", "mcs", "transmissions",
                 "acc_sinr", "history", "state", "segments", "payload", "ready_tick")

    def __init__(self, pid: int, ue: int, tb_bits: int, n_prb: int, mcs: int, segments=(),
                 payload: int | None = None):
        self.pid = pid
        self.ue = ue
        self.tb_bits = tb_bits
        self.n_prb = n_prb
        self.mcs = mcs
        self.transmissions = 0
        self.acc_sinr = 0.0
        self.history: list[float] = []
        self.state = IDLE
        self.segments = segments if isinstance(segments, list) else list(segments)
        # data bits carried, at most tb_bits
        self.payload = sum(n for _, n in self.segments) if payload is None else payload
        self.ready_tick = 0

    def transmit(self, post_sinr: float) -> float:
        """Record one copy; returns the Chase-combined SINR to decode against."""
        self.transmissions += 1
        self.history.append(post_sinr)
        self.acc_sinr += post_sinr
        self.state = WAITING
        return self.acc_sinr


def harq_step(process: HarqProcess, ack: bool, rtt: int, now: int = 0,
              max_transmissions: int = 4) -> str:
    """Apply feedback. Returns ``"release"``, ``"retx"`` or ``"drop"``.

    A NACKed process becomes eligible again ``rtt`` slots later; once it has
    used ``max_transmissions`` copies it is dropped so the caller can return
    the bits to the buffer head.
    """
    if process.state != WAITING:
        raise ContractError(f"HARQ process {process.pid} is not waiting for feedback")
    if ack:
        process.state = IDLE
        return "release"
    if process.transmissions >= max_transmissions:
        process.state = IDLE
        return "drop"
    process.state = PENDING_RETX
    process.ready_tick = now + rtt
    return "retx"


# --- allocation ----------------------------------------------------------

@dataclass
class Grant:
    """One transport block: a UE, its PRBs and MCS; ``retx`` is set for HARQ copies."""
    ue: int
    prbs: list
    mcs: int
    retx: HarqProcess | None = None

    @property
    def n_prb(self) -> int:
        return len(self.prbs)


def pf_winner(rates: np.ndarray, avg_rate: np.ndarray) -> np.ndarray:
    """Per-PRB argmax of ``r / r_avg``; ``rates`` is (U, P). Ties go to the lower row."""
    rates = np.asarray(rates, dtype=float)
    return np.argmax(rates / np.asarray(avg_rate, dtype=float)[:, None], axis=0)


def _place_retx(retx, free: list, used_ues: set, grants: list):
    for proc in retx:
        if proc.ue in used_ues or proc.n_prb > len(free):
            continue
        prbs = free[:proc.n_prb]
        del free[:proc.n_prb]
        grants.append(Grant(proc.ue, prbs, proc.mcs, proc))
        used_ues.add(proc.ue)


def _pf_fill(ues: Sequence[int], rate, avg_rate, demand, mcs, free: list, grants: list):
    """Greedy per-PRB PF over ``free`` among users that still need PRBs.

    ``rate[u]`` is either a scalar (wideband) or a length-P vector. With
    wideband rates every PRB has the same winner until its demand is met,
    so each user ends up with one contiguous chunk.
    """
    if not ues or not free:
        return
    if not hasattr(rate[ues[0]], "__len__"):
        # wideband: one PF ranking for all PRBs, ties to the earlier user
        keyed = sorted((-rate[u] / avg_rate[u], i, u) for i, u in enumerate(ues) if demand[u] > 0)
        for _, _, u in keyed:
            if not free:
                break
            n = min(demand[u], len(free))
            grants.append(Grant(u, free[:n], mcs[u]))
            del free[:n]
        return
    left = {u: demand[u] for u in ues if demand[u] > 0}
    owned: dict[int, list] = {}
    for p in list(free):
        best, best_m = None, -math.inf
        for u in ues:
            if left.get(u, 0) > 0:
                m = rate[u][p] / avg_rate[u]
                if m > best_m:
                    best, best_m = u, m
        if best is None:
            break
        owned.setdefault(best, []).append(p)
        left[best] -= 1
        free.remove(p)
    for u in ues:
        if u in owned:
            grants.append(Grant(u, owned[u], mcs[u]))


def schedule_dss(ues: Sequence[int], rate, avg_rate, demand, mcs, n_prbs: int,
                 retx: Sequence[HarqProcess] = ()) -> list[Grant]:
    """PF allocation for a DSS slot (and for every slot under the baselines).

    ``ues`` are the backlogged users of the slot's direction, ``demand[u]``
    the PRBs each needs to empty its buffer (use ``n_prbs`` or more for an
    unlimited demand), ``retx`` HARQ processes due this slot, oldest first.
    """
    if not retx and len(ues) == 1:
        u = ues[0]
        n = min(demand[u], n_prbs)
        return [Grant(u, list(range(n)), mcs[u])] if n > 0 else []
    free = list(range(n_prbs))
    grants: list[Grant] = []
    used: set = set()
    _place_retx(retx, free, used, grants)
    _pf_fill([u for u in ues if u not in used], rate, avg_rate, demand, mcs, free, grants)
    return grants


def sss_admission(ues: Sequence[int], cqi, demand, n_prbs: int) -> list[int]:
    """Worst-CQI-first prefix of ``ues`` that the PRB budget can start serving."""
    order = sorted(ues, key=lambda u: (cqi[u], u))
    admitted, used = [], 0
    for u in order:
        if used >= n_prbs:
            break
        if demand[u] <= 0:
            continue
        admitted.append(u)
        used += demand[u]
    return admitted


def schedule_sss(ues: Sequence[int], cqi, rate, avg_rate, demand, mcs, n_prbs: int,
                 retx: Sequence[HarqProcess] = ()) -> list[Grant]:
    """Preemptive allocation for an SSS slot.

    After HARQ copies, users are admitted in ascending CQI order until the
    remaining PRBs are spoken for; PF then places the admitted users in
    frequency. Every admitted user receives at least one PRB.
    """
    if not retx and len(ues) == 1:
        return schedule_dss(ues, rate, avg_rate, demand, mcs, n_prbs)
    free = list(range(n_prbs))
    grants: list[Grant] = []
    used: set = set()
    _place_retx(retx, free, used, grants)
    pool = [u for u in ues if u not in used]
    admitted = sss_admission(pool, cqi, demand, len(free))
    if not admitted:
        return grants
    caps = {u: demand[u] for u in admitted}
    spare = len(free) - sum(caps[u] for u in admitted[:-1])
    caps[admitted[-1]] = min(caps[admitted[-1]], spare)
    _pf_fill(admitted, rate, avg_rate, caps, mcs, free, grants)
    return grants


def prbs_needed(bits: int, bits_per_prb: int) -> int:
    if bits <= 0:
        return 0
    return -(-bits // bits_per_prb)
