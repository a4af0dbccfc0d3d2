"""Buchberger's algorithm for submodules of free modules over Q(i)[z1..zn].

Module elements are stored as flat term dictionaries ``{(pos, exp): coeff}``.
Terms are ordered position-over-term: a smaller position index dominates,
ties are broken by degree-reverse-lexicographic order on ``exp``.  With this
order the components ``0..m-1`` can be eliminated simply by discarding basis
elements whose leading position is below ``m``.
"""
from __future__ import annotations

import contextlib
import contextvars
import heapq
import os
from dataclasses import dataclass

from .gaussian import ONE

__all__ = [
    "Budget",
    "BudgetExceeded",
    "current_budget",
    "use_budget",
    "groebner_basis",
    "normal_form",
    "leading_term",
    "term_key",
]


class BudgetExceeded(RuntimeError):
    """A Groebner/syzygy computation outgrew the configured budget."""

    def __init__(self, computation: str, detail: str):
        self.computation = computation
        self.detail = detail
        super().__init__(f"budget exceeded in {computation}: {detail}")


@dataclass(frozen=True)
class Budget:
    """Size limits applied to every Groebner basis computation.

    max_degree bounds the degree of S-pair lcms; max_pairs bounds the number of
    reduced S-pairs; max_basis bounds the working basis length.
    """

    max_degree: int = 24
    max_pairs: int = 50_000
    max_basis: int = 5_000

    @classmethod
    def from_env(cls) -> "Budget":
        raw = os.environ.get("FOLCALC_BUDGET")
        if raw is None or raw.strip() == "":
            return cls()
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"FOLCALC_BUDGET must be a positive integer, got {raw!r}") from None
        if value < 1:
            raise ValueError(f"FOLCALC_BUDGET must be a positive integer, got {raw!r}")
        return cls(max_degree=value)


_BUDGET: contextvars.ContextVar[Budget | None] = contextvars.ContextVar("folcalc_budget", default=None)


def current_budget() -> Budget:
    b = _BUDGET.get()
    return b if b is not None else Budget.from_env()


@contextlib.contextmanager
def use_budget(budget: Budget):
    token = _BUDGET.set(budget)
    try:
        yield budget
    finally:
        _BUDGET.reset(token)


# -- term order -------------------------------------------------------------

_KEY_CACHE: dict = {}


def term_key(t):
    k = _KEY_CACHE.get(t)
    if k is None:
        pos, exp = t
        k = (-pos, sum(exp), tuple(-e for e in reversed(exp)))
        if len(_KEY_CACHE) > 500_000:
            _KEY_CACHE.clear()
        _KEY_CACHE[t] = k
    return k


def leading_term(v: dict):
    return max(v, key=term_key)


def _divides(a, b) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


class _Basis:
    """Working basis indexed by leading position for fast divisor lookup."""

    def __init__(self):
        self.elems: list[dict] = []
        self.leads: list[tuple] = []
        self.by_pos: dict[int, list[int]] = {}
        self.alive: list[bool] = []

    def add(self, v: dict, lead) -> int:
        idx = len(self.elems)
        self.elems.append(v)
        self.leads.append(lead)
        self.alive.append(True)
        self.by_pos.setdefault(lead[0], []).append(idx)
        return idx

    def divisor(self, t):
        pos, exp = t
        for idx in self.by_pos.get(pos, ()):
            if self.alive[idx] and _divides(self.leads[idx][1], exp):
                return idx
        return None


def _sub_multiple(v: dict, g: dict, coeff, shift) -> None:
    """v -= coeff * z^shift * g   (in place)."""
    for (pos, e), gc in g.items():
        t = (pos, tuple(x + y for x, y in zip(e, shift)))
        val = v.get(t)
        prod = coeff * gc
        if val is None:
            v[t] = -prod
        else:
            val = val - prod
            if val:
                v[t] = val
            else:
                del v[t]


def _reduce(v: dict, basis: _Basis, full: bool = True) -> dict:
    v = dict(v)
    rem: dict = {}
    while v:
        t = max(v, key=term_key)
        idx = basis.divisor(t)
        if idx is None:
            if not full:
                rem.update(v)
                return rem
            rem[t] = v.pop(t)
            continue
        g = basis.elems[idx]
        lt = basis.leads[idx]
        coeff = v[t]
        if not g[lt].is_one():
            coeff = coeff / g[lt]
        shift = tuple(a - b for a, b in zip(t[1], lt[1]))
        _sub_multiple(v, g, coeff, shift)
    return rem


def _monic(v: dict):
    lead = leading_term(v)
    lc = v[lead]
    if not lc.is_one():
        inv = lc.inverse()
        v = {t: c * inv for t, c in v.items()}
    return v, lead


def normal_form(v: dict, basis: list[dict]) -> dict:
    """Full remainder of ``v`` modulo ``basis`` (need not be a Groebner basis)."""
    b = _Basis()
    for g in basis:
        if g:
            g, lead = _monic(g)
            b.add(g, lead)
    return _reduce(v, b)


def _lcm(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


def groebner_basis(vectors, nvars: int, what: str = "groebner basis", budget: Budget | None = None) -> list[dict]:
    """Reduced Groebner basis, sorted by decreasing leading term, all elements monic."""
    budget = budget or current_budget()
    basis = _Basis()
    heap: list = []
    counter = 0
    processed: set[tuple[int, int]] = set()

    def push_pairs(j):
        nonlocal counter
        pos, ej = basis.leads[j]
        for i in basis.by_pos.get(pos, ()):
            if i == j or not basis.alive[i]:
                continue
            lcm = _lcm(basis.leads[i][1], ej)
            counter += 1
            heapq.heappush(heap, (sum(lcm), term_key((pos, lcm)), counter, min(i, j), max(i, j), lcm))

    def insert(v):
        v, lead = _monic(v)
        if sum(lead[1]) > budget.max_degree:
            raise BudgetExceeded(what, f"basis element of degree {sum(lead[1])} > {budget.max_degree}")
        j = basis.add(v, lead)
        if len(basis.elems) > budget.max_basis:
            raise BudgetExceeded(what, f"more than {budget.max_basis} basis elements")
        push_pairs(j)

    # Seed with inputs inter-reduced against what is already present.
    seeds = [dict(v) for v in vectors if v]
    seeds.sort(key=lambda v: term_key(leading_term(v)))
    for v in seeds:
        r = _reduce(v, basis, full=False)
        if r:
            insert(r)

    pairs_done = 0
    while heap:
        deg, _, _, i, j, lcm = heapq.heappop(heap)
        if not (basis.alive[i] and basis.alive[j]):
            continue
        if deg > budget.max_degree:
            raise BudgetExceeded(what, f"S-pair of degree {deg} > {budget.max_degree}")
        pos = basis.leads[i][0]
        # Chain criterion: some k with lead dividing lcm whose pairs with i and j are done.
        skip = False
        for k in basis.by_pos.get(pos, ()):
            if k in (i, j) or not basis.alive[k]:
                continue
            if _divides(basis.leads[k][1], lcm):
                if (min(i, k), max(i, k)) in processed and (min(j, k), max(j, k)) in processed:
                    skip = True
                    break
        processed.add((i, j))
        if skip:
            continue
        pairs_done += 1
        if pairs_done > budget.max_pairs:
            raise BudgetExceeded(what, f"more than {budget.max_pairs} S-pairs")
        gi, gj = basis.elems[i], basis.elems[j]
        ei, ej = basis.leads[i][1], basis.leads[j][1]
        s: dict = {}
        _sub_multiple(s, gi, -ONE, tuple(a - b for a, b in zip(lcm, ei)))
        _sub_multiple(s, gj, ONE, tuple(a - b for a, b in zip(lcm, ej)))
        r = _reduce(s, basis, full=False)
        if r:
            insert(r)

    return _interreduce(basis)


def _interreduce(basis: _Basis) -> list[dict]:
    idxs = [k for k in range(len(basis.elems)) if basis.alive[k]]
    # Minimal basis: drop elements whose leading term is divisible by another's.
    minimal = []
    for k in idxs:
        pos, e = basis.leads[k]
        redundant = False
        for other in idxs:
            if other == k:
                continue
            opos, oe = basis.leads[other]
            if opos == pos and _divides(oe, e) and (oe != e or other < k):
                redundant = True
                break
        if not redundant:
            minimal.append(k)
    final = _Basis()
    for k in minimal:
        final.add(basis.elems[k], basis.leads[k])
    out = []
    for idx, k in enumerate(minimal):
        g = final.elems[idx]
        lead = final.leads[idx]
        final.alive[idx] = False
        tail = {t: c for t, c in g.items() if t != lead}
        red = _reduce(tail, final)
        final.alive[idx] = True
        red[lead] = g[lead]
        final.elems[idx] = red
        out.append(red)
    out.sort(key=lambda v: term_key(leading_term(v)), reverse=True)
    return out
