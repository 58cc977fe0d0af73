"""Worked example: a 4-known-class problem with 76 test samples.

The general matrix is::

              c0  c1  c2  c3  UNK
    c0      [ 10,  3,  0,  2,  1 ]
    c1      [  1, 12,  0,  0,  2 ]
    c2      [  0,  0,  9,  1,  5 ]
    c3      [  1,  1,  0, 10,  3 ]
    unknown [  2,  1,  2,  0, 10 ]

The 11 rejected known samples carry these closed-set fallbacks (one choice
among many that yield the Inner matrix below; the matrices alone do not pin
down per-sample values):

    c0: 1 -> c0          c1: 2 -> c0
    c2: 4 -> c2, 1 -> c3 c3: 3 -> c0
"""
from __future__ import annotations

import numpy as np

from .core import UNKNOWN, ClassCatalog, PredictionRecord

KKC = ("c0", "c1", "c2", "c3")
UUC = ("u0", "u1", "u2")

GENERAL = np.array([
    [10, 3, 0, 2, 1],
    [1, 12, 0, 0, 2],
    [0, 0, 9, 1, 5],
    [1, 1, 0, 10, 3],
    [2, 1, 2, 0, 10],
])

INNER = np.array([
    [11, 3, 0, 2],
    [3, 12, 0, 0],
    [0, 0, 13, 2],
    [4, 1, 0, 10],
])

HALFPOINT = np.vstack([GENERAL[:4], np.zeros((1, 5), dtype=int)])

OUTER = {"tp": 50, "fn": 11, "fp": 5, "tn": 10}

# closed-set fallback for rejected known samples, per true class
_FALLBACKS = {
    "c0": ["c0"],
    "c1": ["c0", "c0"],
    "c2": ["c2", "c2", "c2", "c2", "c3"],
    "c3": ["c0", "c0", "c0"],
}


def catalog() -> ClassCatalog:
    return ClassCatalog(KKC, UUC)


def records() -> list[PredictionRecord]:
    out = []
    uuc_i = 0
    for i in range(5):
        for j in range(5):
            for n in range(GENERAL[i, j]):
                pred = KKC[j] if j < 4 else UNKNOWN
                if i < 4:
                    true = KKC[i]
                    closed = pred if j < 4 else _FALLBACKS[true][n]
                else:
                    true = UUC[uuc_i % len(UUC)]
                    uuc_i += 1
                    # unknown-class samples need no fallback; leave some empty
                    closed = pred if j < 4 else None
                out.append(PredictionRecord(true, pred, closed))
    return out
