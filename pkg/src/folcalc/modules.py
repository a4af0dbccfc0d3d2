"""Polynomial matrices, submodules of free modules, ideals, and their algebra.

All modules live in a free module R^n, R = Q(i)[z1..zm], and are
canonicalized by their reduced Groebner basis under position-over-term
grevlex, so structural equality of bases decides module equality.
"""
from __future__ import annotations

from itertools import combinations
from typing import Iterable, Sequence

from .gaussian import ONE, ZERO
from .groebner import Budget, groebner_basis, leading_term, normal_form
from .poly import MultiPoly, default_vars

__all__ = [
    "PolyMatrix",
    "PolyModule",
    "PolyIdeal",
    "groebner_module",
    "member",
    "module_equal",
    "module_sum",
    "module_intersect",
    "syzygy",
    "generic_rank",
    "minors_ideal",
    "saturate",
    "determinant",
    "DimensionMismatch",
]


class DimensionMismatch(ValueError):
    pass


Column = tuple[MultiPoly, ...]


def _vars_of(vars) -> tuple[str, ...]:
    return default_vars(vars) if isinstance(vars, int) else tuple(vars)


def column_to_vector(col: Sequence[MultiPoly], offset: int = 0) -> dict:
    v = {}
    for pos, p in enumerate(col):
        for exp, c in p.terms.items():
            v[(pos + offset, exp)] = c
    return v


def vector_to_column(v: dict, rank: int, vars: tuple[str, ...], offset: int = 0) -> Column:
    parts: list[dict] = [{} for _ in range(rank)]
    for (pos, exp), c in v.items():
        parts[pos - offset][exp] = c
    return tuple(MultiPoly._raw(vars, d) for d in parts)


class PolyMatrix:
    """Dense rows x cols matrix of MultiPoly entries."""

    __slots__ = ("vars", "rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence[MultiPoly]], vars=None, cols: int | None = None):
        entries = [list(r) for r in entries]
        if vars is None:
            first = next((e for r in entries for e in r if isinstance(e, MultiPoly)), None)
            if first is None:
                raise ValueError("cannot infer variables of an empty or constant matrix")
            vars = first.vars
        self.vars = _vars_of(vars)
        self.rows = len(entries)
        self.cols = len(entries[0]) if entries else (cols or 0)
        clean = []
        for r in entries:
            if len(r) != self.cols:
                raise DimensionMismatch("ragged matrix rows")
            clean.append(tuple(e if isinstance(e, MultiPoly) else MultiPoly.constant(self.vars, e) for e in r))
        self.entries = tuple(clean)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[MultiPoly]], vars, rows: int | None = None) -> "PolyMatrix":
        vars = _vars_of(vars)
        if not columns:
            return cls([[] for _ in range(rows or 0)], vars, cols=0)
        nrows = len(columns[0])
        return cls([[columns[j][i] for j in range(len(columns))] for i in range(nrows)], vars)

    @classmethod
    def identity(cls, n: int, vars) -> "PolyMatrix":
        vars = _vars_of(vars)
        return cls([[MultiPoly.constant(vars, 1 if i == j else 0) for j in range(n)] for i in range(n)], vars)

    @classmethod
    def zeros(cls, rows: int, cols: int, vars) -> "PolyMatrix":
        vars = _vars_of(vars)
        return cls([[MultiPoly.zero(vars) for _ in range(cols)] for _ in range(rows)], vars, cols=cols)

    def column(self, j: int) -> Column:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def columns(self) -> list[Column]:
        return [self.column(j) for j in range(self.cols)]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PolyMatrix":
        return PolyMatrix([[self.entries[i][j] for j in cols] for i in rows], self.vars, cols=len(cols))

    def apply(self, col: Sequence[MultiPoly]) -> Column:
        if len(col) != self.cols:
            raise DimensionMismatch(f"vector of length {len(col)} for a matrix with {self.cols} columns")
        zero = MultiPoly.zero(self.vars)
        out = []
        for i in range(self.rows):
            acc = zero
            for a, b in zip(self.entries[i], col):
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return tuple(out)

    def evaluate(self, point) -> list[list[complex]]:
        return [[e.evaluate(point) for e in row] for row in self.entries]

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.entries == other.entries and self.cols == other.cols

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        body = "; ".join(", ".join(str(e) for e in row) for row in self.entries)
        return f"PolyMatrix[{body}]"


class PolyModule:
    """Finitely generated submodule of R^rank.

    ``generators`` are kept as given (zero columns dropped); the reduced
    Groebner basis is computed lazily and cached.
    """

    def __init__(self, vars, rank: int, generators: Iterable[Sequence[MultiPoly]] = (), *, _basis=None):
        self.vars = _vars_of(vars)
        self.rank = rank
        gens = []
        for g in generators:
            g = tuple(p if isinstance(p, MultiPoly) else MultiPoly.constant(self.vars, p) for p in g)
            if len(g) != rank:
                raise DimensionMismatch(f"generator of length {len(g)} in a module of rank {rank}")
            if any(p.vars != self.vars for p in g):
                raise DimensionMismatch("generator over different variables")
            if any(g):
                gens.append(g)
        self.generators: tuple[Column, ...] = tuple(gens)
        self._basis: list[dict] | None = _basis
        self._generic_rank: int | None = None

    @classmethod
    def free(cls, vars, rank: int) -> "PolyModule":
        vars = _vars_of(vars)
        m = PolyMatrix.identity(rank, vars)
        return cls(vars, rank, m.columns())

    @classmethod
    def zero(cls, vars, rank: int) -> "PolyModule":
        return cls(vars, rank, ())

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def _vector_basis(self, budget: Budget | None = None) -> list[dict]:
        if self._basis is None:
            vecs = [column_to_vector(g) for g in self.generators]
            self._basis = groebner_basis(vecs, self.nvars, "groebner_module", budget)
        return self._basis

    @property
    def basis(self) -> tuple[Column, ...]:
        """Reduced Groebner basis as polynomial columns."""
        return tuple(vector_to_column(v, self.rank, self.vars) for v in self._vector_basis())

    def is_zero(self) -> bool:
        return not self._vector_basis()

    def matrix(self) -> PolyMatrix:
        """Generator matrix with the generators as columns."""
        return PolyMatrix.from_columns(list(self.generators), self.vars, rows=self.rank)

    def basis_matrix(self) -> PolyMatrix:
        return PolyMatrix.from_columns(list(self.basis), self.vars, rows=self.rank)

    def generic_rank(self) -> int:
        if self._generic_rank is None:
            self._generic_rank = generic_rank(self.matrix()) if self.generators else 0
        return self._generic_rank

    def __contains__(self, col) -> bool:
        return member(col, self)

    def __eq__(self, other):
        if not isinstance(other, PolyModule):
            return NotImplemented
        return module_equal(self, other)

    def __hash__(self):
        return hash((self.rank, tuple(tuple(sorted(v.items(), key=str)) for v in self._vector_basis())))

    def __repr__(self):
        return f"PolyModule(rank={self.rank}, generators={[tuple(str(p) for p in g) for g in self.generators]})"


class PolyIdeal:
    """Ideal of R given by generators; backed by a rank-1 PolyModule."""

    def __init__(self, vars, generators: Iterable[MultiPoly] = ()):
        self.vars = _vars_of(vars)
        self.module = PolyModule(self.vars, 1, [(g,) for g in generators])

    @property
    def generators(self) -> tuple[MultiPoly, ...]:
        return tuple(g[0] for g in self.module.generators)

    @property
    def basis(self) -> tuple[MultiPoly, ...]:
        return tuple(g[0] for g in self.module.basis)

    def contains(self, f: MultiPoly) -> bool:
        return member((f,), self.module)

    __contains__ = contains

    def is_unit(self) -> bool:
        b = self.basis
        return len(b) == 1 and b[0].is_constant() and not b[0].is_zero()

    def is_zero(self) -> bool:
        return self.module.is_zero()

    def __eq__(self, other):
        if not isinstance(other, PolyIdeal):
            return NotImplemented
        return module_equal(self.module, other.module)

    def __hash__(self):
        return hash(self.module)

    def __repr__(self):
        return f"PolyIdeal({[str(g) for g in self.basis]})"


# -- operations ------------------------------------------------------------------


def groebner_module(M: PolyModule, budget: Budget | None = None) -> PolyModule:
    M._vector_basis(budget)
    out = PolyModule(M.vars, M.rank, M.generators, _basis=M._basis)
    out._generic_rank = M._generic_rank
    return out


def _check_compatible(a: PolyModule, b: PolyModule) -> None:
    if a.rank != b.rank:
        raise DimensionMismatch(f"modules of rank {a.rank} and {b.rank}")
    if a.vars != b.vars:
        raise DimensionMismatch(f"modules over {a.vars} and {b.vars}")


def member(v: Sequence[MultiPoly], M: PolyModule) -> bool:
    """True iff the column ``v`` lies in M (normal form reduces to zero)."""
    if len(v) != M.rank:
        raise DimensionMismatch(f"column of length {len(v)} tested against a module of rank {M.rank}")
    vec = column_to_vector(v)
    if not vec:
        return True
    return not normal_form(vec, M._vector_basis())


def module_equal(M1: PolyModule, M2: PolyModule) -> bool:
    _check_compatible(M1, M2)
    return M1._vector_basis() == M2._vector_basis()


def module_sum(M1: PolyModule, M2: PolyModule) -> PolyModule:
    _check_compatible(M1, M2)
    return PolyModule(M1.vars, M1.rank, M1.generators + M2.generators)


def _eliminate(vectors: list[dict], keep_from: int, rank: int, vars, what: str) -> tuple[Column, ...]:
    """Basis elements supported on positions >= keep_from, returned as columns."""
    gb = groebner_basis(vectors, len(vars), what)
    cols = []
    for v in gb:
        if leading_term(v)[0] >= keep_from:
            cols.append(vector_to_column(v, rank, vars, offset=keep_from))
    return tuple(cols)


def module_intersect(M1: PolyModule, M2: PolyModule) -> PolyModule:
    """M1 ∩ M2 via elimination on {(g, g)} ∪ {(h, 0)} in R^(2n)."""
    _check_compatible(M1, M2)
    n = M1.rank
    if not M1.generators or not M2.generators:
        return PolyModule.zero(M1.vars, n)
    vecs = []
    for g in M1.generators:
        v = column_to_vector(g)
        v.update(column_to_vector(g, offset=n))
        vecs.append(v)
    for h in M2.generators:
        vecs.append(column_to_vector(h))
    cols = _eliminate(vecs, n, n, M1.vars, "module_intersect")
    out = PolyModule(M1.vars, n, cols)
    return out


def syzygy(A: PolyMatrix) -> PolyModule:
    """Kernel {v : A v = 0} of the polynomial matrix A, as a submodule of R^cols."""
    m, n = A.rows, A.cols
    vecs = []
    for j in range(n):
        col = A.column(j)
        v = column_to_vector(col)
        exp0 = (0,) * len(A.vars)
        v[(m + j, exp0)] = ONE
        vecs.append(v)
    cols = _eliminate(vecs, m, n, A.vars, "syzygy")
    return PolyModule(A.vars, n, cols)


def _bareiss(A: PolyMatrix):
    """Fraction-free elimination; returns (rank, pivot_rows, pivot_cols)."""
    M = [list(r) for r in A.entries]
    rows, cols = A.rows, A.cols
    if rows == 0 or cols == 0:
        return 0, [], []
    row_perm = list(range(rows))
    pivot_rows, pivot_cols = [], []
    prev = MultiPoly.one(A.vars)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        # deterministic pivot: smallest number of terms, then lowest row index
        candidates = [i for i in range(r, rows) if M[i][c]]
        if not candidates:
            continue
        p = min(candidates, key=lambda i: (len(M[i][c].terms), M[i][c].total_degree(), i))
        M[r], M[p] = M[p], M[r]
        row_perm[r], row_perm[p] = row_perm[p], row_perm[r]
        piv = M[r][c]
        for i in range(r + 1, rows):
            a = M[i][c]
            for j in range(c + 1, cols):
                num = piv * M[i][j] - a * M[r][j] if a else piv * M[i][j]
                M[i][j] = num.divide_exact(prev) if not prev.is_constant() else num / prev
            M[i][c] = MultiPoly.zero(A.vars)
        prev = piv
        pivot_rows.append(row_perm[r])
        pivot_cols.append(c)
        r += 1
    return r, pivot_rows, pivot_cols


def generic_rank(A: PolyMatrix) -> int:
    """Rank over the fraction field via fraction-free (Bareiss) elimination."""
    return _bareiss(A)[0]


def determinant(A: PolyMatrix) -> MultiPoly:
    if A.rows != A.cols:
        raise DimensionMismatch("determinant of a non-square matrix")
    n = A.rows
    if n == 0:
        return MultiPoly.one(A.vars)
    if n == 1:
        return A.entries[0][0]
    if n == 2:
        (a, b), (c, d) = A.entries
        return a * d - b * c
    total = MultiPoly.zero(A.vars)
    row0 = A.entries[0]
    for j in range(n):
        if not row0[j]:
            continue
        minor = A.submatrix(range(1, n), [k for k in range(n) if k != j])
        term = row0[j] * determinant(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def minors_ideal(A: PolyMatrix, r: int) -> PolyIdeal:
    """Ideal generated by all r x r minors of A (r = 0 gives the unit ideal)."""
    if not 0 <= r <= min(A.rows, A.cols):
        raise ValueError(f"minor size {r} out of range for a {A.rows}x{A.cols} matrix")
    if r == 0:
        return PolyIdeal(A.vars, [MultiPoly.one(A.vars)])
    gens = []
    for rows in combinations(range(A.rows), r):
        for cols in combinations(range(A.cols), r):
            d = determinant(A.submatrix(rows, cols))
            if d:
                gens.append(d)
    return PolyIdeal(A.vars, gens)


def saturate(M: PolyModule) -> PolyModule:
    """Saturation {v in R^n : v lies in the fraction-field span of M}.

    Equivalent to the vanishing of every (r+1)-minor of [G | v].  A single
    nonzero r x r pivot minor of G on rows P, columns C suffices: the n - r
    minors of [G | v] on rows P + {i} (i not in P) and columns C + {v} are
    K-linearly independent linear forms in v cutting out the same kernel, so
    the saturation is the syzygy module of their cofactor matrix.
    """
    n = M.rank
    vars = M.vars
    if not M.generators:
        return PolyModule.zero(vars, n)
    G = M.matrix()
    r, prow, pcol = _bareiss(G)
    M._generic_rank = r
    if r == n:
        out = PolyModule.free(vars, n)
        out._generic_rank = n
        return out
    others = [i for i in range(n) if i not in prow]
    rows_out = []
    for i in others:
        rows_sel = sorted(prow + [i])
        # Laplace expansion of det([G[rows_sel, pcol] | v[rows_sel]]) along the v column
        sub = G.submatrix(rows_sel, pcol)
        coeffs = [MultiPoly.zero(vars)] * n
        last = len(rows_sel) - 1
        for idx, row in enumerate(rows_sel):
            cof = determinant(sub.submatrix([k for k in range(len(rows_sel)) if k != idx], range(r)))
            if (idx + last) % 2:
                cof = -cof
            coeffs[row] = cof
        rows_out.append(coeffs)
    C = PolyMatrix(rows_out, vars)
    out = syzygy(C)
    out._generic_rank = r
    return out
