"""Constant test forms dz_I ∧ dz̄_J for a foliation in adapted coordinates.

Indices are 1-based throughout, matching the coordinate names z1..zn.  In
adapted coordinates the leaves of a rank-k foliation are the fibers of the
projection onto z_{k+1}, ..., z_n (the *transverse* coordinates).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

__all__ = [
    "IndexPair",
    "ConstantTestForm",
    "MalformedIndices",
    "is_test_pair",
    "is_test_pair_for",
    "constant_test_form_basis",
    "real_test_forms",
    "transverse_set",
]


class MalformedIndices(ValueError):
    pass


@dataclass(frozen=True, order=True)
class IndexPair:
    I: tuple[int, ...]
    J: tuple[int, ...]

    def __post_init__(self):
        for idx in (self.I, self.J):
            if any(b <= a for a, b in zip(idx, idx[1:])):
                raise MalformedIndices(f"multi-index {idx} is not strictly increasing")
        if len(self.I) != len(self.J):
            raise MalformedIndices(f"|I| = {len(self.I)} differs from |J| = {len(self.J)}")

    @property
    def size(self) -> int:
        return len(self.I)

    def swapped(self) -> "IndexPair":
        return IndexPair(self.J, self.I)

    def __str__(self):
        fmt = lambda s: "{" + ",".join(map(str, s)) + "}"
        return f"({fmt(self.I)},{fmt(self.J)})"


def transverse_set(n: int, k: int) -> frozenset[int]:
    return frozenset(range(k + 1, n + 1))


def _validate(I: Sequence[int], J: Sequence[int], n: int, p: int) -> None:
    if not 1 <= p <= n - 1:
        raise MalformedIndices(f"p = {p} outside 1..{n - 1}")
    for idx in (I, J):
        if len(idx) != n - p:
            raise MalformedIndices(f"multi-index {tuple(idx)} must have {n - p} entries")
        if any(not 1 <= a <= n for a in idx):
            raise MalformedIndices(f"multi-index {tuple(idx)} leaves 1..{n}")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise MalformedIndices(f"multi-index {tuple(idx)} is not strictly increasing")


def is_test_pair_for(I: Iterable[int], J: Iterable[int], transverse: Iterable[int], p: int) -> bool:
    """Test condition for the foliation given by projection onto ``transverse``.

    dz_I ∧ dz̄_J may carry a nonzero coefficient iff I or J meets the
    transverse set in more than |transverse| - p indices.
    """
    S = frozenset(transverse)
    bound = len(S) - p
    return len(S.intersection(I)) > bound or len(S.intersection(J)) > bound


def is_test_pair(I: Sequence[int], J: Sequence[int], n: int, k: int, p: int) -> bool:
    if not 0 <= k <= n:
        raise MalformedIndices(f"rank k = {k} outside 0..{n}")
    _validate(I, J, n, p)
    return is_test_pair_for(I, J, transverse_set(n, k), p)


def constant_test_form_basis(n: int, k: int, p: int) -> list[IndexPair]:
    """All test pairs (I, J), |I| = |J| = n - p, in lexicographic order."""
    if not 1 <= p <= n - 1:
        raise MalformedIndices(f"p = {p} outside 1..{n - 1}")
    if not 0 <= k <= n:
        raise MalformedIndices(f"rank k = {k} outside 0..{n}")
    S = transverse_set(n, k)
    subsets = list(combinations(range(1, n + 1), n - p))
    return [IndexPair(I, J) for I in subsets for J in subsets if is_test_pair_for(I, J, S, p)]


@dataclass(frozen=True)
class ConstantTestForm:
    """sum a_IJ dz_I ∧ dz̄_J with every stored pair a test pair for (n, k, p)."""

    n: int
    k: int
    p: int
    pairs: tuple[tuple[IndexPair, complex], ...]

    def __post_init__(self):
        for pair, a in self.pairs:
            if a == 0:
                raise ValueError(f"zero coefficient stored for {pair}")
            if not is_test_pair(pair.I, pair.J, self.n, self.k, self.p):
                raise ValueError(f"{pair} is not a test pair for n={self.n}, k={self.k}, p={self.p}")

    def is_real(self) -> bool:
        """Real iff a_JI = conj(a_IJ) for the normalized forms i^{m^2} dz_I ∧ dz̄_J."""
        coeffs = {pair: a for pair, a in self.pairs}
        return all(abs(coeffs.get(pair.swapped(), 0) - complex(a).conjugate()) < 1e-15 for pair, a in self.pairs)


def real_test_forms(n: int, k: int, p: int) -> list[ConstantTestForm]:
    """Real basis: u_II, and for I < J the Re- and Im-combinations of u_IJ, u_JI."""
    basis = set(constant_test_form_basis(n, k, p))
    out = []
    for pair in sorted(basis):
        if pair.I == pair.J:
            out.append(ConstantTestForm(n, k, p, ((pair, 1),)))
        elif pair.I < pair.J:
            sw = pair.swapped()
            # the test condition is symmetric in (I, J)
            out.append(ConstantTestForm(n, k, p, ((pair, 1), (sw, 1))))
            out.append(ConstantTestForm(n, k, p, ((pair, 1j), (sw, -1j))))
    return out
