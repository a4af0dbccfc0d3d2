"""Coefficients of ω_H^p ∧ u_IJ for a Hermitian coefficient matrix H.

Convention (fixed here, validated against an explicit exterior-algebra
expansion in the tests):

* ω_H = i Σ h_ab dz_a ∧ dz̄_b,
* u_IJ = i^{m²} dz_I ∧ dz̄_J with m = |I| = |J| = n - p (so u_II is the
  positive form Π_{j∈I} i dz_j ∧ dz̄_j),
* dV = Π_j (i dz_j ∧ dz̄_j) = ω_Id^n / n!.

Then ω_H^p ∧ u_IJ = c · dV with

    c = p! · σ(Iᶜ, I) · σ(Jᶜ, J) · det H[Iᶜ, Jᶜ],

where σ(A, B) is the sign of the permutation sorting the concatenation A + B.
For positive semidefinite H and I = J the coefficient is ≥ 0.
"""
from __future__ import annotations

from math import factorial
from typing import Sequence

import numpy as np

from .gaussian import ONE, ZERO, GaussianRational, as_gaussian
from .testforms import IndexPair

__all__ = ["wedge_coefficient", "wedge_sign", "complement", "exact_det", "pair_minor_indices"]


def complement(idx: Sequence[int], n: int) -> tuple[int, ...]:
    s = set(idx)
    return tuple(a for a in range(1, n + 1) if a not in s)


def _perm_sign(seq: Sequence[int]) -> int:
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def wedge_sign(pair: IndexPair, n: int) -> int:
    return _perm_sign(complement(pair.I, n) + pair.I) * _perm_sign(complement(pair.J, n) + pair.J)


def pair_minor_indices(pair: IndexPair, n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """0-based row/column indices of the complementary minor."""
    return tuple(a - 1 for a in complement(pair.I, n)), tuple(b - 1 for b in complement(pair.J, n))


def exact_det(rows: list[list[GaussianRational]]) -> GaussianRational:
    """Determinant over Q(i) by Gaussian elimination."""
    a = [list(r) for r in rows]
    m = len(a)
    det = ONE
    for k in range(m):
        piv = next((i for i in range(k, m) if a[i][k]), None)
        if piv is None:
            return ZERO
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det = det * a[k][k]
        inv = a[k][k].inverse()
        for i in range(k + 1, m):
            if a[i][k]:
                f = a[i][k] * inv
                for j in range(k + 1, m):
                    a[i][j] = a[i][j] - f * a[k][j]
    return det


def _is_exact(H) -> bool:
    if isinstance(H, np.ndarray):
        return H.dtype == object
    return True


def wedge_coefficient(H, p: int, pair: IndexPair):
    """Scalar c with ω_H^p ∧ u_IJ = c · dV.

    Exact (GaussianRational) when H holds ints, Fractions or Gaussian
    rationals; a Python complex when H is a numeric array.
    """
    if _is_exact(H):
        rows_h = [[as_gaussian(x) for x in row] for row in H]
        n = len(rows_h)
        if any(len(r) != n for r in rows_h):
            raise ValueError("H must be square")
    else:
        H = np.asarray(H)
        n = H.shape[0]
        if H.shape != (n, n):
            raise ValueError(f"H must be square, got shape {H.shape}")
    if not 0 <= p <= n:
        raise ValueError(f"p = {p} outside 0..{n}")
    if pair.size != n - p or any(not 1 <= a <= n for a in pair.I + pair.J):
        raise ValueError(f"{pair} is not an index pair of size {n - p} in 1..{n}")
    rows, cols = pair_minor_indices(pair, n)
    scale = factorial(p) * wedge_sign(pair, n)
    if _is_exact(H):
        minor = [[rows_h[a][b] for b in cols] for a in rows]
        return exact_det(minor) * scale
    sub = np.asarray(H, dtype=complex)[np.ix_(rows, cols)]
    d = np.linalg.det(sub) if rows else 1.0
    return complex(scale * d)
