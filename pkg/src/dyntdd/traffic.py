"""FTP3 packet arrivals, transmission buffers and latency bookkeeping."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ContractError
from .frame import RadioFrameConfig, SlotDirection

TTI_MS = 0.5


@dataclass(slots=True, eq=False)
class Packet:
    id: int
    size_bits: int
    arrival_time: float          # ms
    direction: str               # "DL" | "UL"
    owner_ue: int
    delivered_time: Optional[float] = None
    unsent: int = 0              # bits not yet handed to a transport block
    unacked: int = 0             # bits not yet decoded

    def __post_init__(self):
        if self.size_bits <= 0:
            raise ContractError("packet size must be positive")
        self.unsent = self.size_bits
        self.unacked = self.size_bits


@dataclass(slots=True)
class LatencySample:
    value: float                 # ms
    direction: str
    ue: int
    scheme: str = ""


class Buffer:
    """FIFO of packet fragments for one UE and direction.

    Bits leave the buffer when a transport block is built (``take``) and
    return to the head when HARQ gives up (``requeue``). ``pending_harq_bits``
    counts NACKed bits waiting for a retransmission.
    """

    __slots__ = ("packets", "unsent_bits", "pending_harq_bits")

    def __init__(self):
        self.packets: deque[Packet] = deque()
        self.unsent_bits = 0
        self.pending_harq_bits = 0

    def __len__(self):
        return len(self.packets)

    @property
    def total_bits(self) -> int:
        return self.unsent_bits + self.pending_harq_bits

    def push(self, packet: Packet):
        self.packets.append(packet)
        self.unsent_bits += packet.unsent

    def take(self, bits: int) -> list[tuple[Packet, int]]:
        """Move up to ``bits`` bits, oldest first, into a list of segments."""
        segs = []
        left = min(bits, self.unsent_bits)
        if left <= 0:
            return segs
        self.unsent_bits -= left
        for p in self.packets:
            if p.unsent:
                n = p.unsent if p.unsent < left else left
                p.unsent -= n
                segs.append((p, n))
                left -= n
                if not left:
                    break
        return segs

    def ack(self, segments, now_ms: float) -> list[Packet]:
        """Mark segments decoded; returns packets whose last bit just arrived."""
        done = []
        for p, n in segments:
            p.unacked -= n
            if p.unacked == 0:
                p.delivered_time = now_ms
                done.append(p)
        if done:
            q = self.packets
            while q and q[0].unacked == 0:
                q.popleft()
        return done

    def requeue(self, segments):
        for p, n in segments:
            p.unsent += n
            self.unsent_bits += n


def arrival_times(lam: float, horizon_ms: float, rng: np.random.Generator) -> np.ndarray:
    """Poisson arrival instants in ms over ``[0, horizon_ms)``."""
    if lam <= 0:
        raise ContractError("arrival rate must be positive")
    mean_gap = 1000.0 / lam
    n = int(horizon_ms / mean_gap + 6 * math.sqrt(horizon_ms / mean_gap) + 16)
    t = np.cumsum(rng.exponential(mean_gap, n))
    while t[-1] < horizon_ms:
        more = t[-1] + np.cumsum(rng.exponential(mean_gap, n))
        t = np.concatenate([t, more])
    return t[t < horizon_ms]


def generate_arrivals(ue: int, lam: float, horizon_ms: float, rng: np.random.Generator,
                      size_bits: int = 400, direction: str = "UL",
                      first_id: int = 0) -> list[Packet]:
    return [Packet(first_id + i, size_bits, float(t), direction, ue)
            for i, t in enumerate(arrival_times(lam, horizon_ms, rng))]


def offered_load(k: int, f_bits: float, lam: float) -> float:
    """Average offered load per cell in Mbps."""
    return k * f_bits * lam / 1e6


def hold(buffer_bits: float, rfc: RadioFrameConfig, est_rate: float,
         direction: SlotDirection, start_slot: int = 0, tti_ms: float = TTI_MS) -> float:
    """Head-of-line delay: time to drain the buffer through matching slots.

    The RFC repeats cyclically from ``start_slot``; each matching slot moves
    ``est_rate`` bits. The result runs to the end of the slot carrying the
    last bit.
    """
    if buffer_bits <= 0:
        return 0.0
    if est_rate <= 0:
        raise ContractError("HoLD needs a positive rate estimate")
    F = rfc.frame_len
    match = [(start_slot + i) % F for i in range(F)
             if rfc.slots[(start_slot + i) % F] is direction]
    if not match:
        return math.inf
    n = math.ceil(buffer_bits / est_rate)
    full, rem = divmod(n - 1, len(match))
    offset = (match[rem] - start_slot) % F
    return (full * F + offset + 1) * tti_ms
