"""Compiled inner loop of the TTI evaluation phase.

The reference numpy formulation lives in ``engine.prb_interference``; this
kernel performs the same arithmetic on per-transport-block arrays and is
checked against it in the test suite.
"""
import math

import numpy as np
from numba import njit


@njit(cache=True)
def evaluate_tti(n_cells, n_prb, rows, draws, gain, gain_cross, cross_link,
                 isum, icnt, txacc_row):
    """SINR, Chase accumulation and decode outcome for every TB of one TTI.

    ``rows`` holds one TB per row: cell, first PRB, PRB count, transmitting
    node, receiving node, per-PRB power, useful signal power, noise power,
    previously accumulated SINR and the MCS decoding threshold in dB.

    Returns ``(eff, acc, ok)``: MI-effective SINR per TB, accumulated SINR,
    success flags. ``isum``/``icnt`` (per cell) and ``txacc_row`` (per node)
    are accumulated in place.
    """
    n_tb = rows.shape[0]
    tb_c = rows[:, 0].astype(np.int64)
    tb_a = rows[:, 1].astype(np.int64)
    tb_n = rows[:, 2].astype(np.int64)
    tb_tx = rows[:, 3].astype(np.int64)
    tb_rx = rows[:, 4].astype(np.int64)
    tb_pw = rows[:, 5]
    tb_sig = rows[:, 6]
    tb_noise = rows[:, 7]
    tb_prev = rows[:, 8]
    tb_thr = rows[:, 9]
    owner = np.full((n_cells, n_prb), -1, np.int64)
    for i in range(n_tb):
        c = tb_c[i]
        for p in range(tb_a[i], tb_a[i] + tb_n[i]):
            owner[c, p] = i
        txacc_row[tb_tx[i]] += tb_pw[i] * tb_n[i] / n_prb
    eff = np.empty(n_tb)
    acc = np.empty(n_tb)
    ok = np.empty(n_tb, np.bool_)
    for i in range(n_tb):
        c = tb_c[i]
        rx = tb_rx[i]
        cap = 0.0
        for p in range(tb_a[i], tb_a[i] + tb_n[i]):
            tot = 0.0
            cr = 0.0
            for ci in range(n_cells):
                j = owner[ci, p]
                if j < 0:
                    continue
                tx = tb_tx[j]
                tot += gain[rx, tx] * tb_pw[j]
                cr += gain_cross[rx, tx] * tb_pw[j]
            same = tot - cr
            if same < 0.0:
                same = 0.0
            interf = same + cr if cross_link else same
            sinr = tb_sig[i] / (tb_noise[i] + interf)
            cap += math.log2(1.0 + sinr)
            isum[c] += interf
            icnt[c] += 1
        e = 2.0 ** (cap / tb_n[i]) - 1.0
        eff[i] = e
        a = tb_prev[i] + e
        acc[i] = a
        if a > 0.0:
            x = 10.0 * math.log10(a) - tb_thr[i]
        else:
            x = -300.0
        if x > 30.0:
            x = 30.0
        elif x < -30.0:
            x = -30.0
        p_err = 1.0 / (1.0 + 9.0 * 10.0 ** x)
        ok[i] = draws[i] >= p_err
    return eff, acc, ok
