"""Channels, precoding, SINR evaluation and link-to-system mapping.

Powers are linear mW unless a name ends in ``_dbm``/``_db``. Channel
matrices carry the large-scale amplitude, so ``|H v|^2`` is a received
power gain directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, ContractError, SimulationAbort

RE_PER_PRB = 12 * 7          # subcarriers x OFDM symbols in one mini-slot
THERMAL_DBM_HZ = -174.0

# (spectral efficiency [bit/RE], SINR [dB] at 10% BLER), QPSK 1/8 .. 64QAM 5/6
DEFAULT_MCS_TABLE = (
    (0.25, -5.0),
    (0.50, -2.0),
    (1.00, 1.0),
    (1.50, 4.0),
    (2.00, 7.0),
    (3.00, 11.0),
    (4.00, 15.0),
    (5.00, 18.5),
)

# intercept [dB] and slope [dB/decade] over distance in km
DEFAULT_PATHLOSS = {
    "bs_ue": (128.1, 37.6),
    "ue_ue": (98.0, 40.0),
    "bs_bs": (100.0, 22.0),
}


def db2lin(x):
    return 10.0 ** (np.asarray(x, dtype=float) / 10.0)


def lin2db(x):
    return 10.0 * np.log10(x)


def noise_mw(bandwidth_hz: float, noise_figure_db: float) -> float:
    return 10.0 ** ((THERMAL_DBM_HZ + 10 * math.log10(bandwidth_hz) + noise_figure_db) / 10)


def pathloss_db(distance_m, intercept_db: float, slope_db: float):
    """Log-distance pathloss; distances below 1 m are evaluated at 1 m."""
    d_km = np.maximum(np.asarray(distance_m, dtype=float), 1.0) / 1000.0
    return intercept_db + slope_db * np.log10(d_km)


def large_scale_gain(distance_m, intercept_db, slope_db, shadow_db=0.0):
    """Linear gain from pathloss plus shadowing, capped at 1."""
    pl = pathloss_db(distance_m, intercept_db, slope_db) + np.asarray(shadow_db)
    return np.minimum(10.0 ** (-pl / 10.0), 1.0)


# --- transmit power -------------------------------------------------------

@dataclass(frozen=True)
class TxPower:
    p_dl: float = 46.0        # dBm per BS over the full band
    p_max_ue: float = 23.0
    alpha: float = 1.0
    p0: float = -103.0


def ul_power(pathloss_db: float, params: TxPower, n_prb: int = 1) -> float:
    """Open-loop UL power per PRB in dBm.

    With ``n_prb > 1`` the total is kept under ``p_max_ue``.
    """
    if pathloss_db < 0:
        raise ContractError("negative pathloss")
    cap = params.p_max_ue - 10 * math.log10(n_prb) if n_prb > 1 else params.p_max_ue
    return min(cap, params.p0 + params.alpha * pathloss_db)


# --- channels -------------------------------------------------------------

@dataclass
class ChannelSet:
    """Per-frame MIMO channels for one drop.

    ``H_dl[k, c]`` is BS c to UE k (M_r x N_t); ``H_ul[c, k]`` the reverse
    (N_t x M_r); ``G[k, j]`` UE j to UE k; ``Q[c, i]`` BS i to BS c.
    """
    H_dl: np.ndarray
    H_ul: np.ndarray
    G: np.ndarray
    Q: np.ndarray
    gain_bs_ue: np.ndarray
    gain_ue_ue: np.ndarray
    gain_bs_bs: np.ndarray
    clamped_links: int = 0


def draw_channels(deployment, rng_seed, n_tx: int = 8, n_rx: int = 2) -> ChannelSet:
    """Draw one frame of fading on top of the deployment's large-scale gains.

    BS-UE links are TDD-reciprocal (``H_ul[c, k] == H_dl[k, c].T``); the
    cross-link channels ``G`` and ``Q`` are drawn independently per ordered pair.
    """
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    g_bu = np.asarray(deployment.gain_bs_ue)      # (C, K)
    g_uu = np.asarray(deployment.gain_ue_ue)      # (K, K)
    g_bb = np.asarray(deployment.gain_bs_bs)      # (C, C)
    C, K = g_bu.shape
    small = complex_normal(rng, (K, C, n_rx, n_tx))
    H_dl = small * np.sqrt(g_bu.T)[:, :, None, None]
    H_ul = np.swapaxes(H_dl, 2, 3).transpose(1, 0, 2, 3).copy()
    G = complex_normal(rng, (K, K, n_rx, n_rx)) * np.sqrt(g_uu)[:, :, None, None]
    Q = complex_normal(rng, (C, C, n_tx, n_tx)) * np.sqrt(g_bb)[:, :, None, None]
    return ChannelSet(H_dl, H_ul, G, Q, g_bu, g_uu, g_bb,
                      getattr(deployment, "clamped_links", 0))


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """i.i.d. CN(0, 1) entries."""
    z = rng.standard_normal(tuple(shape) + (2,))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)


# --- precoding ------------------------------------------------------------

@dataclass
class Precoders:
    v: np.ndarray            # BS-side, N_t
    w: np.ndarray            # UE-side, M_r
    fallback: bool = False


def dominant_directions(H: np.ndarray):
    """Left/right singular vectors of the largest singular value, batched."""
    u, s, vh = np.linalg.svd(H)
    return u[..., :, 0], s[..., 0], vh[..., 0, :].conj()


def zf_precoder(H_serving: np.ndarray, co_scheduled: Sequence[np.ndarray] = ()) -> Precoders:
    """Single-stream zero-forcing precoder for one UE.

    Each UE is reduced to its effective row ``w^H H`` with ``w`` its dominant
    left singular vector; the serving column of the pseudo-inverse of the
    stacked rows is normalised to unit norm. Without co-scheduled users this
    is the matched filter along the dominant right singular vector.
    """
    H_serving = np.asarray(H_serving)
    n_tx = H_serving.shape[1]
    if len(co_scheduled) + 1 > n_tx:
        raise ContractError("more streams than transmit antennas")
    w, _, v_mf = dominant_directions(H_serving)
    if not co_scheduled:
        return Precoders(v_mf / np.linalg.norm(v_mf), w / np.linalg.norm(w))
    rows = [w.conj() @ H_serving]
    for H in co_scheduled:
        wo, _, _ = dominant_directions(np.asarray(H))
        rows.append(wo.conj() @ np.asarray(H))
    A = np.stack(rows)
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        return Precoders(v_mf / np.linalg.norm(v_mf), w / np.linalg.norm(w), fallback=True)
    v = np.linalg.pinv(A)[:, 0]
    return Precoders(v / np.linalg.norm(v), w / np.linalg.norm(w))


# --- SINR -----------------------------------------------------------------

@dataclass
class PowerSet:
    """Linear transmit powers and receiver noise for one resource."""
    p_dl: np.ndarray          # per cell, mW
    p_ul: np.ndarray          # per UE, mW
    noise_ue: float
    noise_bs: float


@dataclass
class SinrReport:
    gamma: float
    direction: str
    useful_power: float
    same_link_interference: float
    cross_link_interference: float
    noise: float

    @property
    def gamma_db(self) -> float:
        return 10 * math.log10(self.gamma) if self.gamma > 0 else -math.inf


def sinr_dl(k: int, active_dl: Iterable[tuple[int, int]], active_ul: Iterable[int],
            channels: ChannelSet, v: dict, w: dict, serving: Sequence[int],
            powers: PowerSet, cross_link: bool = True) -> SinrReport:
    """Pre-detection DL SINR of UE ``k``.

    ``active_dl`` holds (cell, UE) pairs transmitting DL on the resource and
    must contain ``(serving[k], k)``; ``active_ul`` the UL UEs. ``v`` and
    ``w`` map UE index to its BS-side and UE-side precoding vector.
    ``cross_link=False`` drops the UE-UE term.
    """
    active_dl = list(active_dl)
    ck = serving[k]
    if (ck, k) not in active_dl:
        raise ContractError("victim UE is not in the DL transmit set")
    useful = powers.p_dl[ck] * _sq(channels.H_dl[k, ck] @ v[k])
    same = 0.0
    for c, i in active_dl:
        if i != k:
            same += powers.p_dl[c] * _sq(channels.H_dl[k, c] @ v[i])
    cross = 0.0
    if cross_link:
        for j in active_ul:
            cross += powers.p_ul[j] * _sq(channels.G[k, j] @ w[j])
    noise = powers.noise_ue
    return SinrReport(useful / (noise + same + cross), "DL", useful, same, cross, noise)


def sinr_ul(k: int, active_ul: Iterable[int], active_dl: Iterable[tuple[int, int]],
            channels: ChannelSet, v: dict, w: dict, serving: Sequence[int],
            powers: PowerSet, cross_link: bool = True) -> SinrReport:
    """Pre-detection UL SINR of UE ``k`` at its serving cell; BS-BS term from DL cells."""
    active_ul = list(active_ul)
    if k not in active_ul:
        raise ContractError("victim UE is not in the UL transmit set")
    ck = serving[k]
    useful = powers.p_ul[k] * _sq(channels.H_ul[ck, k] @ w[k])
    same = 0.0
    for j in active_ul:
        if j != k:
            same += powers.p_ul[j] * _sq(channels.H_ul[ck, j] @ w[j])
    cross = 0.0
    if cross_link:
        for c, i in active_dl:
            cross += powers.p_dl[c] * _sq(channels.Q[ck, c] @ v[i])
    noise = powers.noise_bs
    return SinrReport(useful / (noise + same + cross), "UL", useful, same, cross, noise)


def _sq(x) -> float:
    return float(np.vdot(x, x).real)


def lmmse_irc_combine(h: np.ndarray, covariance: np.ndarray):
    """LMMSE-IRC combiner and post-detection SINR ``h^H R^-1 h``.

    ``covariance`` is the interference-plus-noise covariance. Returns the
    unnormalised combiner ``R^-1 h`` and the SINR.
    """
    h = np.asarray(h)
    R = np.asarray(covariance)
    if not np.all(np.isfinite(R)) or not np.all(np.isfinite(h)):
        raise SimulationAbort("non-finite entries in IRC inputs")
    a = np.linalg.solve(R, h)
    return a, float(np.vdot(h, a).real)


def post_sinr_white(useful_gain: np.ndarray, interference: np.ndarray, noise: np.ndarray):
    """Post-IRC SINR when every interferer's mean covariance is white.

    Under i.i.d. fading the mean covariance of an interferer is its average
    received power times the identity, so ``h^H R^-1 h`` reduces to the
    useful power over noise plus summed mean interference.
    """
    return useful_gain / (noise + interference)


def effective_sinr(sinrs) -> float:
    """Mutual-information effective SINR over the PRBs of one transport block."""
    s = np.asarray(sinrs, dtype=float)
    return float(2.0 ** np.mean(np.log2(1.0 + s)) - 1.0)


def chase_combine(sinrs: Iterable[float]) -> float:
    """Chase combining adds the linear SINR of every transmission."""
    return float(sum(sinrs))


# --- link-to-system mapping -----------------------------------------------

@dataclass(frozen=True)
class McsTable:
    entries: tuple[tuple[float, float], ...] = DEFAULT_MCS_TABLE
    re_per_prb: int = RE_PER_PRB

    def __post_init__(self):
        eff = [e for e, _ in self.entries]
        thr = [t for _, t in self.entries]
        if not self.entries or eff != sorted(eff) or thr != sorted(thr):
            raise ConfigError("MCS table must be non-empty and sorted")

    def __len__(self):
        return len(self.entries)

    def check(self, mcs: int):
        if not 0 <= mcs < len(self.entries):
            raise ContractError(f"MCS index {mcs} outside table of {len(self.entries)}")

    def efficiency(self, mcs: int) -> float:
        self.check(mcs)
        return self.entries[mcs][0]

    def threshold_db(self, mcs: int) -> float:
        self.check(mcs)
        return self.entries[mcs][1]

    def bits_per_prb(self, mcs: int) -> int:
        return int(self.efficiency(mcs) * self.re_per_prb)

    def tb_bits(self, mcs: int, n_prb: int) -> int:
        return self.bits_per_prb(mcs) * n_prb

    def select(self, cqi_db: float, backoff_db: float = 1.0) -> int:
        """Highest MCS whose threshold clears the reported SINR minus backoff."""
        target = cqi_db - backoff_db
        best = 0
        for i, (_, thr) in enumerate(self.entries):
            if thr <= target:
                best = i
        return best


def bler(sinr_db, threshold_db):
    """Logistic BLER: 10% at the threshold, one decade per dB above it."""
    x = np.asarray(sinr_db, dtype=float) - threshold_db
    return 1.0 / (1.0 + 9.0 * 10.0 ** np.clip(x, -30, 30))


def tb_success(post_sinr: float, mcs: int, rng, n_prb: int = 1,
               table: McsTable = McsTable()):
    """Bernoulli decode; returns (success, delivered bits)."""
    table.check(mcs)
    p_err = float(bler(10 * math.log10(max(post_sinr, 1e-30)), table.threshold_db(mcs)))
    ok = bool(rng.random() >= p_err)
    return ok, table.tb_bits(mcs, n_prb) if ok else 0


def quantize_cqi(sinr_db: float, step_db: float = 1.0) -> float:
    return math.floor(sinr_db / step_db) * step_db
