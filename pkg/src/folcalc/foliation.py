"""Singular holomorphic foliations on an affine chart.

A foliation is a saturated submodule of the polynomial tangent module
R^n = <d1, ..., dn> that is closed under the Lie bracket.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from ._parse import ParseError, parse
from .gaussian import ONE
from .modules import (
    DimensionMismatch,
    PolyIdeal,
    PolyMatrix,
    PolyModule,
    generic_rank,
    member,
    minors_ideal,
    module_equal,
    module_intersect,
    module_sum,
    saturate,
    syzygy,
)
from .poly import MultiPoly, ast_to_terms, default_vars, differentiate, format_poly

__all__ = [
    "VectorField",
    "Foliation",
    "RationalMap",
    "IntersectionResult",
    "SingularPointError",
    "lie_bracket",
    "is_involutive",
    "involutive_closure",
    "union",
    "intersection_foliation",
    "singular_locus",
    "foliation_rank",
    "induced_foliation",
    "tangent_frame_at",
    "parse_vector_field",
]


class SingularPointError(ValueError):
    pass


class VectorField:
    """sum_i components[i] * d/dz_i with polynomial coefficients."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[MultiPoly]):
        comps = tuple(components)
        if not comps:
            raise ValueError("a vector field needs at least one component")
        vars = comps[0].vars
        if len(comps) != len(vars) or any(c.vars != vars for c in comps):
            raise DimensionMismatch("vector field components must match the ambient dimension")
        self.components = comps

    @classmethod
    def parse(cls, text: str, vars) -> "VectorField":
        return parse_vector_field(text, vars)

    @classmethod
    def coordinate(cls, vars, j: int) -> "VectorField":
        vars = default_vars(vars) if isinstance(vars, int) else tuple(vars)
        return cls([MultiPoly.constant(vars, 1 if k == j else 0) for k in range(len(vars))])

    @property
    def vars(self) -> tuple[str, ...]:
        return self.components[0].vars

    @property
    def dim(self) -> int:
        return len(self.components)

    def is_zero(self) -> bool:
        return not any(self.components)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField([a - b for a, b in zip(self.components, other.components)])

    def __rmul__(self, f) -> "VectorField":
        return VectorField([f * a for a in self.components])

    def apply(self, f: MultiPoly) -> MultiPoly:
        """Directional derivative X(f)."""
        out = MultiPoly.zero(self.vars)
        for i, a in enumerate(self.components):
            if a:
                out = out + a * differentiate(f, i)
        return out

    def __eq__(self, other):
        return isinstance(other, VectorField) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __repr__(self):
        return f"VectorField({str(self)!r})"

    def __str__(self):
        parts = []
        for k, a in enumerate(self.components):
            if not a:
                continue
            d = f"d{k + 1}"
            txt = format_poly(a.terms, a.vars)
            if txt == "1":
                body, neg = d, False
            elif txt == "-1":
                body, neg = d, True
            elif len(a.terms) == 1 and not txt.startswith("("):
                neg = txt.startswith("-")
                body = f"{txt.lstrip('-')}*{d}"
            else:
                body, neg = f"({txt})*{d}", False
            if not parts:
                parts.append(f"-{body}" if neg else body)
            else:
                parts.append(f" - {body}" if neg else f" + {body}")
        return "".join(parts) if parts else "0"


def parse_vector_field(text: str, vars) -> VectorField:
    """Parse ``"a1*d1 + ... + an*dn"``; every term must contain exactly one d_k."""
    vars = default_vars(vars) if isinstance(vars, int) else tuple(vars)
    n = len(vars)
    dnames = tuple(f"d{k + 1}" for k in range(n))
    index = {name: j for j, name in enumerate(vars + dnames)}
    try:
        terms = ast_to_terms(parse(text), index, 2 * n)
    except ParseError as exc:
        raise ParseError(f"malformed generator {text!r}: {exc.message}", exc.col) from None
    comps: list[dict] = [{} for _ in range(n)]
    for exp, c in terms.items():
        dpart = exp[n:]
        if sum(dpart) != 1:
            raise ParseError(f"malformed generator {text!r}: every term needs exactly one derivation d1..d{n}")
        k = dpart.index(1)
        comps[k][exp[:n]] = c
    return VectorField([MultiPoly._raw(vars, d) for d in comps])


def _fields(M: PolyModule) -> list[VectorField]:
    return [VectorField(g) for g in M.generators]


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """[X, Y]^k = sum_i X^i d_i Y^k - Y^i d_i X^k."""
    if X.dim != Y.dim or X.vars != Y.vars:
        raise DimensionMismatch(f"bracket of fields of dimension {X.dim} and {Y.dim}")
    return VectorField([X.apply(b) - Y.apply(a) for a, b in zip(X.components, Y.components)])


def _brackets(M: PolyModule) -> list[VectorField]:
    fields = _fields(M)
    out = []
    for X, Y in combinations(fields, 2):
        b = lie_bracket(X, Y)
        if not b.is_zero():
            out.append(b)
    return out


def is_involutive(M: PolyModule) -> bool:
    """Every pairwise generator bracket lies in the saturation of M."""
    brackets = _brackets(M)
    if not brackets:
        return True
    sat = saturate(M)
    return all(member(b.components, sat) for b in brackets)


@dataclass
class Foliation:
    """Saturated, involutive submodule of the tangent module with cached invariants.

    ``module`` carries its reduced Groebner basis; ``iterations`` records how
    many closure steps produced it (0 when constructed directly).
    """

    module: PolyModule
    rank: int
    sing_ideal: PolyIdeal
    iterations: int = 0
    trace: list[int] = field(default_factory=list)

    @property
    def vars(self) -> tuple[str, ...]:
        return self.module.vars

    @property
    def dim(self) -> int:
        return self.module.rank

    @property
    def generators(self) -> list[VectorField]:
        return [VectorField(g) for g in self.module.basis]

    def is_empty(self) -> bool:
        return self.rank == 0

    @classmethod
    def from_saturated(cls, module: PolyModule, iterations: int = 0, trace=None) -> "Foliation":
        basis = module.basis
        canon = PolyModule(module.vars, module.rank, basis, _basis=module._basis)
        r = module.generic_rank() if module.generators else 0
        canon._generic_rank = r
        sing = minors_ideal(canon.matrix(), r) if basis else PolyIdeal(module.vars, [MultiPoly.one(module.vars)])
        return cls(canon, r, sing, iterations, list(trace or []))

    @classmethod
    def full(cls, vars) -> "Foliation":
        vars = default_vars(vars) if isinstance(vars, int) else tuple(vars)
        return cls.from_saturated(PolyModule.free(vars, len(vars)))

    def __eq__(self, other):
        return isinstance(other, Foliation) and module_equal(self.module, other.module)

    def __repr__(self):
        gens = ", ".join(str(g) for g in self.generators)
        return f"Foliation(rank={self.rank}, generators=[{gens}])"


def involutive_closure(M: PolyModule) -> Foliation:
    """Smallest saturated involutive module containing M.

    Iterates H -> saturate(H + [H, H]) from saturate(M).  Each non-final step
    strictly raises the generic rank, so at most n steps are taken.
    """
    if not M.generators:
        raise ValueError("involutive closure of the zero module")
    H = saturate(M)
    rank = H.generic_rank()
    trace = [rank]
    iterations = 1
    while True:
        missing = [b for b in _brackets(H) if not member(b.components, H)]
        if not missing:
            return Foliation.from_saturated(H, iterations, trace)
        grown = PolyModule(H.vars, H.rank, list(H.basis) + [b.components for b in missing])
        H = saturate(grown)
        new_rank = H.generic_rank()
        if new_rank <= rank:
            raise AssertionError(f"closure step did not raise the rank ({rank} -> {new_rank})")
        rank = new_rank
        trace.append(rank)
        iterations += 1
        if iterations > M.rank + 1:
            raise AssertionError("involutive closure exceeded the dimension bound")


def union(F: Foliation, G: Foliation) -> Foliation:
    """F ⊔ G: the smallest foliation containing both."""
    if F.dim != G.dim or F.vars != G.vars:
        raise DimensionMismatch(f"foliations on spaces of dimension {F.dim} and {G.dim}")
    S = module_sum(F.module, G.module)
    if not S.generators:
        return Foliation.from_saturated(S)
    return involutive_closure(S)


@dataclass(frozen=True)
class IntersectionResult:
    module: PolyModule
    saturated: bool


def intersection_foliation(F: Foliation, G: Foliation) -> IntersectionResult:
    """F.module ∩ G.module, returned unsaturated together with a saturation flag."""
    inter = module_intersect(F.module, G.module)
    return IntersectionResult(inter, module_equal(inter, saturate(inter)))


def singular_locus(F: Foliation) -> PolyIdeal:
    return F.sing_ideal


def foliation_rank(F: Foliation) -> int:
    return F.rank


class RationalMap:
    """Polynomial chart representative (f_1, ..., f_m) of a meromorphic map."""

    def __init__(self, components: Sequence[MultiPoly]):
        comps = tuple(components)
        if not comps:
            raise ValueError("a map needs at least one component")
        if any(c.vars != comps[0].vars for c in comps):
            raise DimensionMismatch("map components over different variables")
        self.components = comps

    @property
    def vars(self) -> tuple[str, ...]:
        return self.components[0].vars

    def is_constant(self) -> bool:
        return all(c.is_constant() for c in self.components)

    def jacobian(self) -> PolyMatrix:
        n = len(self.vars)
        return PolyMatrix([[differentiate(f, j) for j in range(n)] for f in self.components], self.vars)

    def __repr__(self):
        return f"RationalMap({[str(c) for c in self.components]})"


class ConstantMapError(ValueError):
    pass


def induced_foliation(f: RationalMap) -> Foliation:
    """Saturated kernel of the Jacobian: the foliation by level sets of f."""
    if f.is_constant():
        raise ConstantMapError("the map is constant; its Jacobian vanishes identically")
    K = saturate(syzygy(f.jacobian()))
    if not K.generators:
        return Foliation.from_saturated(K)
    if not is_involutive(K):
        raise AssertionError("kernel of a Jacobian failed the involutivity check")
    return Foliation.from_saturated(K)


def tangent_frame_at(F: Foliation, point: Sequence[complex], tol: float = 1e-10) -> np.ndarray:
    """Orthonormal n x rank frame of the leaf through a regular point.

    Singularity test: the largest |r x r minor| of the evaluated basis,
    normalized by the product of the chosen column norms, must exceed ``tol``.
    """
    point = [complex(z) for z in point]
    if len(point) != F.dim:
        raise DimensionMismatch(f"point of dimension {len(point)} for a foliation on C^{F.dim}")
    r = F.rank
    if r == 0:
        return np.zeros((F.dim, 0), dtype=complex)
    with np.errstate(all="ignore"):
        try:
            E = np.array(F.module.basis_matrix().evaluate(point), dtype=complex)
        except OverflowError as exc:
            raise OverflowError(f"evaluation overflow at {point}") from exc
    if not np.all(np.isfinite(E)):
        raise OverflowError(f"evaluation overflow at {point}")
    n, s = E.shape
    norms = np.linalg.norm(E, axis=0)
    best = 0.0
    for rows in combinations(range(n), r):
        for cols in combinations(range(s), r):
            denom = float(np.prod(norms[list(cols)]))
            if denom == 0.0:
                continue
            val = abs(np.linalg.det(E[np.ix_(rows, cols)])) / denom
            best = max(best, val)
    if best < tol:
        raise SingularPointError(f"point {point} lies on the singular locus (normalized minor {best:.3e})")
    frame = []
    for j in range(s):
        v = E[:, j].copy()
        for q in frame:
            v = v - np.vdot(q, v) * q
        nv = np.linalg.norm(v)
        if nv > tol * max(norms[j], 1.0):
            frame.append(v / nv)
        if len(frame) == r:
            break
    return np.column_stack(frame)
