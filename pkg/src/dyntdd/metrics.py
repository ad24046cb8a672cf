"""Metric collection, percentile readouts and run output files.

Four sample families are kept per direction:

``latency``   one-way radio latency per delivered packet, ms
``thr_cell``  cell throughput per frame, delivered bits per TTI scaled to Mbps
``thr_ue``    per-UE throughput over fixed windows, delivered bits divided by
              the time the UE had undelivered packets, Mbps
``interf``    post-receiver interference per TTI and receiving cell, the
              mean over the PRBs it decoded, dBm
"""
from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .errors import ContractError

FAMILIES = ("latency", "thr_cell", "thr_ue", "interf")
_METRIC_NAME = {
    "latency": "latency_{}_ms",
    "thr_cell": "thr_cell_{}_mbps",
    "thr_ue": "thr_ue_{}_mbps",
    "interf": "interf_{}_dbm",
}
DIRECTIONS = ("DL", "UL")


def nearest_rank(samples, p: float) -> float:
    """Nearest-rank empirical quantile: the ceil(p*n)-th smallest sample."""
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        return math.nan
    if not 0.0 <= p <= 1.0:
        raise ContractError("percentile must lie in [0, 1]")
    rank = max(1, math.ceil(p * x.size - 1e-9))
    return float(x[rank - 1])


class MetricsSink:
    """Everything one run measured. Rows are (tick, cell, ue, metric, value)."""

    def __init__(self, scheme: str = ""):
        self.scheme = scheme
        self._cols = {(f, d): ([], [], [], []) for f in FAMILIES for d in DIRECTIONS}
        self.overhead_bits = 0
        self.coordination_rounds = 0
        self.counters = {"harq_failures": 0, "idle_slots": 0, "tb_count": 0,
                         "bits_generated": 0, "bits_delivered": 0, "packets_generated": 0,
                         "packets_delivered": 0, "clamped_links": 0, "epsilon_violations": 0}
        self.epsilon_ms = math.inf
        self.meta: dict = {}

    def add(self, family: str, direction: str, tick: int, cell: int, ue: int, value: float):
        cols = self._cols[(family, direction)]
        cols[0].append(tick)
        cols[1].append(cell)
        cols[2].append(ue)
        cols[3].append(value)

    def add_latency(self, direction, tick, cell, ue, value):
        self.add("latency", direction, tick, cell, ue, value)
        if value > self.epsilon_ms:
            self.counters["epsilon_violations"] += 1

    def values(self, family: str, direction: str) -> np.ndarray:
        return np.asarray(self._cols[(family, direction)][3], dtype=float)

    def columns(self, family: str, direction: str):
        t, c, u, v = self._cols[(family, direction)]
        return (np.asarray(t, dtype=np.int64), np.asarray(c, dtype=np.int64),
                np.asarray(u, dtype=np.int64), np.asarray(v, dtype=float))

    def count(self, family: str, direction: str) -> int:
        return len(self._cols[(family, direction)][3])

    def merge(self, other: "MetricsSink") -> "MetricsSink":
        """Pool samples of two sinks into a new one (order of rows is by source)."""
        out = MetricsSink(self.scheme)
        for key in self._cols:
            for a, b, o in zip(self._cols[key], other._cols[key], out._cols[key]):
                o.extend(a)
                o.extend(b)
        out.overhead_bits = self.overhead_bits + other.overhead_bits
        out.coordination_rounds = self.coordination_rounds + other.coordination_rounds
        out.counters = {k: self.counters.get(k, 0) + other.counters.get(k, 0)
                        for k in set(self.counters) | set(other.counters)}
        return out

    # --- readouts --------------------------------------------------------

    def summary(self) -> dict:
        out: dict = {"scheme": self.scheme, "overhead_bits": self.overhead_bits,
                     "coordination_rounds": self.coordination_rounds,
                     "counters": dict(self.counters)}
        ps = {"latency": (0.5, 0.9, 0.99, 0.999), "thr_cell": (0.1, 0.5, 0.95),
              "thr_ue": (0.1, 0.5, 0.95), "interf": (0.2, 0.5)}
        for fam, plist in ps.items():
            for d in DIRECTIONS:
                x = self.values(fam, d)
                key = _METRIC_NAME[fam].format(d.lower())
                out[key] = {
                    "count": int(x.size),
                    "mean": float(x.mean()) if x.size else None,
                    **{f"p{_pct_label(p)}": (nearest_rank(x, p) if x.size else None)
                       for p in plist},
                }
        out.update(self.meta)
        return out

    # --- files -----------------------------------------------------------

    def _lines(self, with_scheme: bool):
        tail = f",{self.scheme}" if with_scheme else ""
        for fam in FAMILIES:
            for d in DIRECTIONS:
                name = _METRIC_NAME[fam].format(d.lower())
                t, c, u, v = self._cols[(fam, d)]
                yield "\n".join(f"{a},{b},{e},{name},{x:.6f}{tail}"
                                for a, b, e, x in zip(t, c, u, v))

    def metrics_text(self, with_scheme: bool = True) -> str:
        head = "tick,cell,ue,metric,value" + (",scheme" if with_scheme else "")
        body = "\n".join(s for s in self._lines(with_scheme) if s)
        return head + "\n" + body + ("\n" if body else "")

    def digest(self) -> str:
        """SHA-256 of the metrics table without its scheme column."""
        return hashlib.sha256(self.metrics_text(with_scheme=False).encode()).hexdigest()

    def write(self, out_dir, manifest: str = "", tti_ms: float = 0.5) -> dict:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        text = self.metrics_text()
        (out / "metrics.csv").write_text(text)
        lines = ["time_ms,ue,direction,latency_ms,scheme"]
        for d in DIRECTIONS:
            t, _, u, v = self._cols[("latency", d)]
            lines.extend(f"{a * tti_ms + tti_ms:.1f},{e},{d},{x:.6f},{self.scheme}"
                         for a, e, x in zip(t, u, v))
        (out / "latency.csv").write_text("\n".join(lines) + "\n")
        summary = self.summary()
        summary["digest"] = hashlib.sha256(
            self.metrics_text(with_scheme=False).encode()).hexdigest()
        (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
        (out / "manifest.txt").write_text(manifest)
        return summary


def _pct_label(p: float) -> str:
    s = f"{p * 100:.1f}".rstrip("0").rstrip(".")
    return s.replace(".", "_")


_FAMILY_ALIASES = {"latency": "latency", "throughput": "thr_cell", "thr_cell": "thr_cell",
                   "thr_ue": "thr_ue", "user_throughput": "thr_ue", "interference": "interf",
                   "interf": "interf"}


def percentile_report(sink: MetricsSink, direction: str, metric: str, p: float) -> float:
    """Nearest-rank percentile of one metric family (``p`` in [0, 1])."""
    fam = _FAMILY_ALIASES.get(metric)
    if fam is None:
        raise ContractError(f"unknown metric {metric!r}")
    d = direction.upper()
    if d not in DIRECTIONS:
        raise ContractError(f"unknown direction {direction!r}")
    return nearest_rank(sink.values(fam, d), p)
