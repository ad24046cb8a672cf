"""Radio frame configurations and the hybrid static/dynamic slot codebook.

A radio frame configuration (RFC) is a pattern of ``F`` mini-slots, each
Downlink, Uplink or Guard. Codebook RFCs share a static slot set (SSS) and
differ only over the dynamic slot set (DSS). Members of one group carry the
same DL:UL split over the DSS and are cyclic rotations of each other.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, ContractError


class SlotDirection(enum.Enum):
    DL = "D"
    UL = "U"
    GUARD = "G"

    @property
    def code(self) -> int:
        # +1/-1 so that a DL/UL conflict is exactly a product of -1
        return _CODES[self]

    @classmethod
    def parse(cls, ch: str) -> "SlotDirection":
        try:
            return cls(ch.upper())
        except ValueError:
            raise ConfigError(f"unknown slot direction {ch!r}") from None


_CODES = {SlotDirection.DL: 1, SlotDirection.UL: -1, SlotDirection.GUARD: 0}


@dataclass(frozen=True)
class RadioFrameConfig:
    slots: tuple[SlotDirection, ...]
    sss_mask: tuple[bool, ...]
    group_id: int = -1
    shift: int = 0

    def __post_init__(self):
        if len(self.slots) != len(self.sss_mask):
            raise ConfigError("slots and sss_mask differ in length")
        if not self.slots:
            raise ConfigError("empty frame")

    @classmethod
    def from_string(cls, pattern: str, sss_mask: Sequence[bool] | None = None,
                    group_id: int = -1, shift: int = 0) -> "RadioFrameConfig":
        """Build from a plain slot string such as ``"DDDGUUUUUU"``."""
        slots = tuple(SlotDirection.parse(ch) for ch in pattern if ch != "|")
        mask = tuple(sss_mask) if sss_mask is not None else (False,) * len(slots)
        return cls(slots, mask, group_id, shift)

    def __len__(self):
        return len(self.slots)

    @property
    def frame_len(self) -> int:
        return len(self.slots)

    @cached_property
    def dl_count(self) -> int:
        return sum(s is SlotDirection.DL for s in self.slots)

    @cached_property
    def ul_count(self) -> int:
        return sum(s is SlotDirection.UL for s in self.slots)

    @cached_property
    def guard_count(self) -> int:
        return sum(s is SlotDirection.GUARD for s in self.slots)

    @cached_property
    def codes(self) -> np.ndarray:
        return np.array([s.code for s in self.slots], dtype=np.int8)

    @cached_property
    def dss_positions(self) -> tuple[int, ...]:
        return tuple(i for i, m in enumerate(self.sss_mask) if not m)

    @cached_property
    def dss_dl_count(self) -> int:
        return sum(self.slots[i] is SlotDirection.DL for i in self.dss_positions)

    @cached_property
    def dss_ul_count(self) -> int:
        return sum(self.slots[i] is SlotDirection.UL for i in self.dss_positions)

    @property
    def dss_dl_fraction(self) -> float:
        n = self.dss_dl_count + self.dss_ul_count
        return self.dss_dl_count / n if n else 0.5

    def slot_string(self) -> str:
        """``SSS|DSS`` slot characters, each part in frame position order."""
        sss = "".join(s.value for s, m in zip(self.slots, self.sss_mask) if m)
        dss = "".join(s.value for s, m in zip(self.slots, self.sss_mask) if not m)
        return f"{sss}|{dss}" if sss else dss


@dataclass(frozen=True)
class Codebook:
    rfcs: tuple[RadioFrameConfig, ...]
    groups: tuple[tuple[int, ...], ...]
    index_bits: int
    ratios: tuple[tuple[int, int], ...] = field(default=())

    def __len__(self):
        return len(self.rfcs)

    def __getitem__(self, i: int) -> RadioFrameConfig:
        return self.rfcs[i]

    @property
    def size(self) -> int:
        return len(self.rfcs)

    @cached_property
    def group_of(self) -> tuple[int, ...]:
        out = [0] * len(self.rfcs)
        for g, members in enumerate(self.groups):
            for i in members:
                out[i] = g
        return tuple(out)

    @cached_property
    def misalignment_matrix(self) -> np.ndarray:
        """Pairwise DL/UL conflict counts, shape (N, N)."""
        codes = np.stack([r.codes for r in self.rfcs]).astype(np.int16)
        return ((codes[:, None, :] * codes[None, :, :]) == -1).sum(axis=2)

    def index_of(self, rfc: RadioFrameConfig) -> int:
        for i, r in enumerate(self.rfcs):
            if r.slots == rfc.slots:
                return i
        raise KeyError("RFC is not in the codebook")

    def to_text(self) -> str:
        lines = [f"# N={self.size} L={len(self.groups)} B={self.index_bits}"]
        for r in self.rfcs:
            lines.append(f"{r.group_id} {r.shift} {r.slot_string()}")
        return "\n".join(lines) + "\n"


def build_codebook(frame_len: int,
                   sss_pattern: Iterable[tuple[int, SlotDirection]],
                   dss_ratios: Sequence[tuple[int, int]],
                   shifts_per_group: int | Sequence[int],
                   guard_at_switch: bool = False) -> Codebook:
    """Construct the hybrid codebook.

    Each group places its ``d`` DL slots as one contiguous block at the start
    of the DSS and rotates it right by ``0 .. shifts-1`` DSS positions.
    Rotations that coincide are kept once; index bits follow from the size
    that survives.
    """
    sss_pattern = [(int(p), d if isinstance(d, SlotDirection) else SlotDirection.parse(d))
                   for p, d in sss_pattern]
    positions = [p for p, _ in sss_pattern]
    if len(set(positions)) != len(positions):
        raise ConfigError("duplicate SSS positions")
    if any(p < 0 or p >= frame_len for p in positions):
        raise ConfigError("SSS position outside the frame")
    sss = dict(sss_pattern)
    dss_pos = [i for i in range(frame_len) if i not in sss]
    n_dss = len(dss_pos)
    if n_dss == 0:
        raise ConfigError("empty DSS")
    if isinstance(shifts_per_group, int):
        shifts = [shifts_per_group] * len(dss_ratios)
    else:
        shifts = list(shifts_per_group)
        if len(shifts) != len(dss_ratios):
            raise ConfigError("shifts_per_group length differs from dss_ratios")
    if not dss_ratios:
        raise ConfigError("no DSS ratio groups")
    mask = tuple(i in sss for i in range(frame_len))

    rfcs: list[RadioFrameConfig] = []
    seen: set[tuple[SlotDirection, ...]] = set()
    groups: list[tuple[int, ...]] = []
    for g, ((d, u), n_shift) in enumerate(zip(dss_ratios, shifts)):
        if d < 0 or u < 0 or d + u != n_dss:
            raise ConfigError(f"ratio {d}:{u} does not fill a DSS of {n_dss} slots")
        if not 1 <= n_shift <= n_dss:
            raise ConfigError(f"shifts_per_group={n_shift} outside 1..{n_dss}")
        base = [SlotDirection.DL] * d + [SlotDirection.UL] * u
        members = []
        for s in range(n_shift):
            rot = base[n_dss - s:] + base[:n_dss - s] if s else list(base)
            slots = [SlotDirection.GUARD] * frame_len
            for p, direction in sss.items():
                slots[p] = direction
            for p, direction in zip(dss_pos, rot):
                slots[p] = direction
            if guard_at_switch:
                slots = _insert_guards(slots)
            key = tuple(slots)
            if key in seen:
                continue
            seen.add(key)
            members.append(len(rfcs))
            rfcs.append(RadioFrameConfig(key, mask, g, s))
        groups.append(tuple(members))

    n = len(rfcs)
    bits = math.ceil(math.log2(n)) if n > 1 else 0
    return Codebook(tuple(rfcs), tuple(groups), bits, tuple(tuple(r) for r in dss_ratios))


def _insert_guards(slots: list[SlotDirection]) -> list[SlotDirection]:
    out = list(slots)
    for i in range(1, len(slots)):
        if slots[i - 1] is SlotDirection.DL and slots[i] is SlotDirection.UL:
            out[i] = SlotDirection.GUARD
    return out


def slot_misalignment(a: RadioFrameConfig, b: RadioFrameConfig) -> int:
    """Number of positions where one RFC is DL and the other UL."""
    if len(a.slots) != len(b.slots):
        raise ContractError("RFCs of different frame length")
    return int(np.count_nonzero(a.codes.astype(np.int16) * b.codes == -1))


def average_misalignment(c: RadioFrameConfig, others: Sequence[RadioFrameConfig]) -> float:
    if not others:
        raise ContractError("average misalignment over an empty set")
    return sum(slot_misalignment(c, x) for x in others) / len(others)


def encode_index(index: int, bits: int) -> str:
    if not 0 <= index < 2 ** bits:
        raise ContractError(f"index {index} does not fit in {bits} bits")
    return format(index, f"0{bits}b") if bits else ""


def decode_index(word: str) -> int:
    return int(word, 2) if word else 0


def parse_codebook_text(text: str) -> list[tuple[int, int, str]]:
    """Read back ``to_text`` output as (group, shift, slot string) rows."""
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        g, s, pattern = line.split()
        rows.append((int(g), int(s), pattern))
    return rows


DEFAULT_SSS = tuple(enumerate("DDDDUUUU"))
DEFAULT_RATIOS = ((2, 10), (3, 9), (4, 8), (5, 7), (6, 6), (7, 5), (8, 4))


def default_codebook() -> Codebook:
    return build_codebook(20, DEFAULT_SSS, DEFAULT_RATIOS, 8)
