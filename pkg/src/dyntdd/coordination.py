"""Inter-cell RFC coordination: slave requests and master arbitration.

Slaves pick the codebook RFC whose DSS DL share best matches their buffered
traffic and attach a misalignment budget ``psi`` traded off between the
cross-link interference they measure and their head-of-line delay. The
master keeps each request that stays within its budget of a common RFC and
otherwise slides the request through its own group, then neighbouring
groups.
"""
from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import ProtocolError
from .frame import Codebook

CLI_FLOOR_DBM = -120.0


@dataclass(frozen=True)
class CliFilterState:
    theta_bs: float = CLI_FLOOR_DBM   # dBm, BS-BS CLI seen at the BS
    theta_ue: float = CLI_FLOOR_DBM   # dBm, UE-UE CLI seen at the cell's UEs
    xi: float = 1.0
    rho: float = -90.0
    beta: float = 1.0
    mu: float = 1.0
    score_dbm: float = CLI_FLOOR_DBM
    literal: bool = True


def update_cli_filter(state: CliFilterState, theta_bs: float, theta_ue: float,
                      z_dl: float, z_ul: float) -> CliFilterState:
    """Fold one measurement cycle into the filter.

    The BS-BS vs UE-UE weight ratio follows the DL/UL buffer ratio (1 when
    either is empty), normalised so that ``beta + mu == 2``. Both weights are
    inverted when both measurements sit at or below ``rho``.

    ``xi`` is evaluated on linear mW. In the literal form it is
    ``(b*T_bs + m*T_ue) / (T_bs + T_ue)``, a CLI-weighted mean of the weights,
    and the dBm score fed to the threshold quantizer rescales it by the mean
    CLI. The conventional form is the weighted mean
    ``(b*T_bs + m*T_ue) / (b + m)`` in mW and is its own score.
    """
    t_bs = max(theta_bs, CLI_FLOOR_DBM)
    t_ue = max(theta_ue, CLI_FLOOR_DBM)
    ratio = z_dl / z_ul if z_dl > 0 and z_ul > 0 else 1.0
    mu = 2.0 / (1.0 + ratio)
    beta = ratio * mu
    if t_bs <= state.rho and t_ue <= state.rho:
        bw, mw = 1.0 / beta, 1.0 / mu
    else:
        bw, mw = beta, mu
    lin_bs = 10.0 ** (t_bs / 10.0)
    lin_ue = 10.0 ** (t_ue / 10.0)
    num = bw * lin_bs + mw * lin_ue
    if state.literal:
        xi = num / (lin_bs + lin_ue)
        score = 10.0 * math.log10(num / 2.0)
    else:
        xi = num / (bw + mw)
        score = 10.0 * math.log10(xi)
    return replace(state, theta_bs=t_bs, theta_ue=t_ue, xi=xi, beta=beta, mu=mu,
                   score_dbm=score)


@dataclass(frozen=True)
class ThresholdQuantizer:
    n_dss: int = 12
    cli_range: tuple[float, float] = (-100.0, -60.0)
    hold_range: tuple[float, float] = (0.0, 64.0)

    def _bin(self, x, lo, hi):
        b = math.floor((x - lo) / (hi - lo) * self.n_dss) + 1
        return min(self.n_dss, max(1, b))

    def cli_component(self, cli_dbm: float) -> int:
        """Strong CLI asks for a tight budget: top of range maps to 1."""
        return self.n_dss + 1 - self._bin(cli_dbm, *self.cli_range)

    def hold_component(self, hold_ms: float) -> int:
        return self._bin(hold_ms, *self.hold_range)


def sliding_threshold(cli_avg: float, hold_ms: float, quantizer: ThresholdQuantizer) -> int:
    """Misalignment budget psi: the two components averaged, halves rounded down."""
    c = quantizer.cli_component(cli_avg)
    h = quantizer.hold_component(hold_ms)
    return (c + h) // 2


@dataclass(frozen=True)
class XnRequest:
    cell: int
    rfc_index: int
    psi: int


@dataclass(frozen=True)
class XnGrant:
    cell: int
    granted_rfc_index: int


def select_rfc_slave(z_dl: float, z_ul: float, codebook: Codebook) -> int:
    """Group whose DSS DL fraction is nearest the buffered DL fraction, shift 0."""
    total = z_dl + z_ul
    frac = z_dl / total if total > 0 else 0.5
    best_g, best_d = 0, math.inf
    for g, members in enumerate(codebook.groups):
        if not members:
            continue
        dist = abs(codebook.rfcs[members[0]].dss_dl_fraction - frac)
        if dist < best_d:
            best_g, best_d = g, dist
    return codebook.groups[best_g][0]


def choose_common(requests: Sequence[XnRequest], rng: np.random.Generator) -> int:
    """Most requested index (ties to the lowest); random pick when all differ."""
    if not requests:
        raise ProtocolError("no requests to arbitrate")
    counts = Counter(r.rfc_index for r in requests)
    top = max(counts.values())
    if top >= 2:
        return min(i for i, n in counts.items() if n == top)
    return requests[int(rng.integers(len(requests)))].rfc_index


def _closest_within(members, phi_col, psi):
    best, best_gap = None, math.inf
    for m in members:
        p = phi_col[m]
        if p <= psi:
            gap = abs(p - psi)
            if gap < best_gap:
                best, best_gap = m, gap
    return best


def grant_for(request: int, psi: int, common: int, codebook: Codebook) -> int:
    phi_col = codebook.misalignment_matrix[:, common]
    if phi_col[request] <= psi:
        return request
    g = codebook.group_of[request]
    pick = _closest_within(codebook.groups[g], phi_col, psi)
    if pick is not None:
        return pick
    frac = codebook.rfcs[request].dss_dl_fraction
    others = sorted((abs(codebook.rfcs[m[0]].dss_dl_fraction - frac), h)
                    for h, m in enumerate(codebook.groups) if h != g and m)
    for _, h in others:
        pick = _closest_within(codebook.groups[h], phi_col, psi)
        if pick is not None:
            return pick
    gaps = np.abs(phi_col - psi)
    return int(np.argmin(gaps))


def arbitrate_master(requests: Sequence[XnRequest], codebook: Codebook,
                     rng: np.random.Generator | None = None,
                     common: int | None = None) -> list[XnGrant]:
    """Master-side arbitration; one grant per request, in request order."""
    if not requests:
        raise ProtocolError("no requests to arbitrate")
    n = codebook.size
    for r in requests:
        if not 0 <= r.rfc_index < n:
            raise ProtocolError(f"cell {r.cell} requested index {r.rfc_index} outside codebook")
        if r.psi < 0:
            raise ProtocolError(f"cell {r.cell} sent a negative psi")
    if common is None:
        common = choose_common(requests, rng if rng is not None else np.random.default_rng(0))
    return [XnGrant(r.cell, grant_for(r.rfc_index, r.psi, common, codebook)) for r in requests]


def psi_bits(n_dss: int) -> int:
    return max(1, math.ceil(math.log2(n_dss)))


def round_overhead_bits(n_slaves: int, index_bits: int, psi_field_bits: int) -> int:
    """Upstream request (index + psi) and downstream grant, per slave."""
    return n_slaves * (index_bits + psi_field_bits + index_bits)


class XnLink:
    """In-process Xn transport with a fixed delivery delay in ticks."""

    def __init__(self, delay_ticks: int = 0):
        self.delay_ticks = delay_ticks
        self._queue: deque = deque()

    def send(self, tick: int, message):
        self._queue.append((tick + self.delay_ticks, message))

    def deliver(self, tick: int) -> list:
        out = []
        q = self._queue
        while q and q[0][0] <= tick:
            out.append(q.popleft()[1])
        return out

    def __len__(self):
        return len(self._queue)
