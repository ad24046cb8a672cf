"""Hexagonal cell layout, UE drops and large-scale gains."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import radio
from .errors import ConfigError

_AXIAL_DIRS = ((1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1))


def hex_axial(n_cells: int) -> list[tuple[int, int]]:
    """Axial coordinates of the first ``n_cells`` sites in ring order."""
    coords = [(0, 0)]
    ring = 1
    while len(coords) < n_cells:
        q, r = ring * _AXIAL_DIRS[4][0], ring * _AXIAL_DIRS[4][1]
        for side in range(6):
            for _ in range(ring):
                coords.append((q, r))
                dq, dr = _AXIAL_DIRS[side]
                q, r = q + dq, r + dr
        ring += 1
    return coords[:n_cells]


def axial_to_xy(q: float, r: float, isd: float) -> tuple[float, float]:
    return isd * (q + r / 2.0), isd * (math.sqrt(3) / 2.0) * r


def hex_positions(n_cells: int, isd: float) -> np.ndarray:
    return np.array([axial_to_xy(q, r, isd) for q, r in hex_axial(n_cells)])


def wrap_offsets(n_cells: int, isd: float) -> np.ndarray:
    """Tiling translations for a full hexagonal cluster of ``n_rings`` rings."""
    n = _rings_for(n_cells)
    if n is None:
        raise ConfigError(f"wrap-around needs a full hexagonal cluster, got C={n_cells}")
    if n == 0:
        return np.zeros((1, 2))
    base = [(2 * n + 1, -n), (n, n + 1), (-n - 1, 2 * n + 1)]
    vecs = [(0, 0)] + base + [(-a, -b) for a, b in base]
    return np.array([axial_to_xy(a, b, isd) for a, b in vecs])


def _rings_for(n_cells: int):
    n = 0
    while 3 * n * n + 3 * n + 1 < n_cells:
        n += 1
    return n if 3 * n * n + 3 * n + 1 == n_cells else None


def _point_in_hex(rng, isd: float) -> tuple[float, float]:
    # pointy-top hexagon with inradius isd/2
    R = isd / math.sqrt(3)
    while True:
        x, y = rng.uniform(-R, R), rng.uniform(-R, R)
        if _inside_hex(x, y, R):
            return x, y


def _inside_hex(x, y, R):
    ax, ay = abs(x), abs(y)
    inr = R * math.sqrt(3) / 2
    # vertices up/down at (0, +-R); flat sides at x = +-inr
    return ax <= inr and ay <= R - ax / math.sqrt(3)


@dataclass
class Deployment:
    bs_xy: np.ndarray          # (C, 2)
    ue_xy: np.ndarray          # (K, 2)
    ue_cell: np.ndarray        # (K,) serving cell
    ue_is_dl: np.ndarray       # (K,) bool
    gain_bs_ue: np.ndarray     # (C, K)
    gain_ue_ue: np.ndarray     # (K, K), zero diagonal
    gain_bs_bs: np.ndarray     # (C, C), zero diagonal
    isd: float
    wrap_around: bool
    clamped_links: int = 0

    @property
    def n_cells(self) -> int:
        return len(self.bs_xy)

    @property
    def n_ues(self) -> int:
        return len(self.ue_xy)

    def cell_ues(self, c: int, dl: bool) -> np.ndarray:
        return np.flatnonzero((self.ue_cell == c) & (self.ue_is_dl == dl))

    @property
    def pathloss_serving_db(self) -> np.ndarray:
        g = self.gain_bs_ue[self.ue_cell, np.arange(self.n_ues)]
        return -10 * np.log10(g)


def _distances(a: np.ndarray, b: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    d = a[:, None, None, :] - b[None, :, None, :] - offsets[None, None, :, :]
    return np.sqrt((d ** 2).sum(-1)).min(axis=2)


def drop(n_cells: int, k_dl: int, k_ul: int, rng: np.random.Generator,
         isd: float = 500.0, wrap_around: bool = False, shadowing_db: float = 8.0,
         pathloss: dict = radio.DEFAULT_PATHLOSS, min_distance_m: float = 35.0,
         max_tries: int = 200_000) -> Deployment:
    """Drop UEs uniformly over the layout until every cell has its quota.

    A candidate UE is attached to the cell with the strongest large-scale
    gain (pathloss plus its own shadowing draw) and kept only while that cell
    still lacks UEs of the candidate's direction.
    """
    if n_cells < 1:
        raise ConfigError("need at least one cell")
    bs = hex_positions(n_cells, isd)
    offsets = wrap_offsets(n_cells, isd) if wrap_around else np.zeros((1, 2))
    pl_bu = pathloss["bs_ue"]
    want = {(c, dl): (k_dl if dl else k_ul) for c in range(n_cells) for dl in (True, False)}
    ue_xy, ue_cell, ue_dl, shadows = [], [], [], []
    order = [True] * (k_dl * n_cells) + [False] * (k_ul * n_cells)
    tries = 0
    for dl in order:
        while True:
            tries += 1
            if tries > max_tries:
                raise ConfigError("UE drop did not converge; check cell counts")
            site = rng.integers(n_cells)
            x, y = _point_in_hex(rng, isd)
            p = np.array([x, y]) + bs[site]
            d = _distances(p[None], bs, offsets)[0]
            if d.min() < min_distance_m:
                continue
            sh = rng.normal(0.0, shadowing_db, n_cells) if shadowing_db > 0 else np.zeros(n_cells)
            g = radio.large_scale_gain(d, *pl_bu, sh)
            c = int(np.argmax(g))
            if want[(c, dl)] > 0:
                want[(c, dl)] -= 1
                ue_xy.append(p)
                ue_cell.append(c)
                ue_dl.append(dl)
                shadows.append(sh)
                break
    ue_xy = np.array(ue_xy)
    K = len(ue_xy)
    sh_bu = np.array(shadows).T                      # (C, K)
    d_bu = _distances(bs, ue_xy, offsets)
    d_uu = _distances(ue_xy, ue_xy, offsets)
    d_bb = _distances(bs, bs, offsets)
    clamped = int((d_uu[~np.eye(K, dtype=bool)] < 1.0).sum() + (d_bu < 1.0).sum())

    g_bu = radio.large_scale_gain(d_bu, *pl_bu, sh_bu)
    sh_uu = _symmetric_normal(rng, K, shadowing_db)
    g_uu = radio.large_scale_gain(d_uu, *pathloss["ue_ue"], sh_uu)
    np.fill_diagonal(g_uu, 0.0)
    sh_bb = _symmetric_normal(rng, n_cells, shadowing_db)
    g_bb = radio.large_scale_gain(d_bb, *pathloss["bs_bs"], sh_bb)
    np.fill_diagonal(g_bb, 0.0)
    return Deployment(bs, ue_xy, np.array(ue_cell), np.array(ue_dl, dtype=bool),
                      g_bu, g_uu, g_bb, isd, wrap_around, clamped)


def _symmetric_normal(rng, n, sigma):
    if sigma <= 0:
        return np.zeros((n, n))
    z = rng.normal(0.0, sigma, (n, n))
    return np.triu(z, 1) + np.triu(z, 1).T
