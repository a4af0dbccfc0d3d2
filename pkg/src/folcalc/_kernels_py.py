"""Pure-Python/numpy fallback for the compiled quadrature kernels."""
from __future__ import annotations

import numpy as np


def pairwise_sum(values) -> float:
    a = np.ascontiguousarray(values, dtype=np.float64).ravel()
    if a.size == 0:
        return 0.0
    while a.size > 1:
        half = a.size // 2
        head = a[0:2 * half:2] + a[1:2 * half:2]
        if a.size % 2:
            head = np.append(head, a[-1] + 0.0)
        a = head
    return float(a[0])


def minor_values(H, rows, cols) -> np.ndarray:
    H = np.asarray(H, dtype=np.complex128)
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    if rows.size == 0:
        return np.ones(H.shape[0], dtype=np.complex128)
    sub = H[:, rows[:, None], cols[None, :]]
    m = rows.size
    # closed forms for small minors; np.linalg.det goes through exp(log|det|)
    if m == 1:
        return sub[:, 0, 0].copy()
    if m == 2:
        return sub[:, 0, 0] * sub[:, 1, 1] - sub[:, 0, 1] * sub[:, 1, 0]
    if m == 3:
        a = sub
        return (a[:, 0, 0] * (a[:, 1, 1] * a[:, 2, 2] - a[:, 1, 2] * a[:, 2, 1])
                - a[:, 0, 1] * (a[:, 1, 0] * a[:, 2, 2] - a[:, 1, 2] * a[:, 2, 0])
                + a[:, 0, 2] * (a[:, 1, 0] * a[:, 2, 1] - a[:, 1, 1] * a[:, 2, 0]))
    return np.linalg.det(sub)


def minor_abs_sums(H, rows, cols, scales) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    scales = np.asarray(scales, dtype=np.float64)
    out = np.zeros(rows.shape[0], dtype=np.float64)
    for q in range(rows.shape[0]):
        vals = np.abs(scales[q]) * np.abs(minor_values(H, rows[q], cols[q]))
        out[q] = pairwise_sum(vals)
    return out
