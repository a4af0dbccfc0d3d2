import random
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

import oracles
from folcalc.groebner import Budget, BudgetExceeded, use_budget
from folcalc.modules import (
    PolyIdeal,
    PolyMatrix,
    PolyModule,
    generic_rank,
    groebner_module,
    member,
    minors_ideal,
    module_equal,
    module_intersect,
    module_sum,
    saturate,
    syzygy,
)
from folcalc.poly import MultiPoly, differentiate, parse_poly

V2 = ("z1", "z2")
V3 = ("z1", "z2", "z3")


def col(*texts, vars=V2):
    return tuple(parse_poly(t, vars) for t in texts)


def mod(*cols, vars=V2, rank=None):
    cols = [col(*c, vars=vars) for c in cols]
    return PolyModule(vars, rank if rank is not None else len(cols[0]), cols)


def mat(rows, vars=V2):
    return PolyMatrix([[parse_poly(t, vars) for t in r] for r in rows], vars)


class TestExamples:
    def test_differentiate(self):
        assert differentiate(parse_poly("z1^2*z2", V2), 0) == parse_poly("2*z1*z2", V2)
        assert differentiate(parse_poly("z1", V2), 1).is_zero()
        assert differentiate(parse_poly("(1+i)*z1", V2), 0) == parse_poly("1+i", V2)

    def test_groebner(self):
        assert groebner_module(mod(("z1", "0"), ("z1^2", "0"))).basis == (col("z1", "0"),)
        assert groebner_module(mod(("1", "0"), ("0", "1"))).basis == (col("1", "0"), col("0", "1"))
        assert groebner_module(PolyModule(V2, 2, [])).basis == ()

    def test_member(self):
        M = mod(("z1", "0"))
        assert member(col("z1^2", "0"), M)
        assert not member(col("1", "0"), M)
        assert member(col("z2", "z1"), mod(("z2", "0"), ("0", "z1")))

    def test_equal(self):
        assert module_equal(mod(("z1", "0"), ("z1^2", "0")), mod(("z1", "0")))
        assert not module_equal(mod(("z1", "0")), mod(("z2", "0")))
        M = mod(("z1", "z2"), ("z2^2", "1"))
        assert module_equal(M, M)

    def test_sum(self):
        assert module_equal(module_sum(mod(("z1", "0")), mod(("0", "z2"))), mod(("z1", "0"), ("0", "z2")))
        M = mod(("z1", "z2"))
        assert module_equal(module_sum(M, PolyModule(V2, 2, [])), M)
        assert module_equal(module_sum(M, M), M)

    def test_intersect(self):
        assert module_intersect(mod(("1", "0")), mod(("0", "1"))).is_zero()
        assert module_equal(module_intersect(mod(("z1", "0")), mod(("z2", "0"))), mod(("z1*z2", "0")))
        M = mod(("z1", "z2"), ("z2^2", "1"))
        assert module_equal(module_intersect(M, M), M)

    def test_syzygy(self):
        assert module_equal(syzygy(mat([["z2", "z1"]])), mod(("z1", "-z2")))
        assert syzygy(PolyMatrix.identity(2, V2)).is_zero()
        assert module_equal(syzygy(PolyMatrix.zeros(1, 2, V2)), PolyModule.free(V2, 2))

    def test_generic_rank(self):
        A = PolyMatrix.from_columns([col("z1", "z2"), col("z1^2", "z1*z2")], V2)
        assert generic_rank(A) == 1
        assert generic_rank(PolyMatrix.identity(3, V3)) == 3
        assert generic_rank(PolyMatrix.zeros(2, 2, V2)) == 0

    def test_minors(self):
        assert minors_ideal(mat([["z1"], ["z2"]]), 1) == PolyIdeal(V2, col("z1", "z2"))
        assert minors_ideal(PolyMatrix.identity(2, V2), 2).is_unit()
        assert minors_ideal(mat([["z1", "0"], ["0", "z2"]]), 2) == PolyIdeal(V2, col("z1*z2"))

    def test_saturate(self):
        assert module_equal(saturate(mod(("0", "z1"))), mod(("0", "1")))
        assert module_equal(saturate(mod(("z1", "z2"))), mod(("z1", "z2")))
        F = PolyModule.free(V2, 2)
        assert module_equal(saturate(F), F)


class TestGroebnerInvariants:
    def test_reduced_basis_unique(self):
        rng = random.Random(11)
        for _ in range(60):
            M = PolyModule(V3, 2, [oracles.random_vector(rng, V3, 2, 3, 3) for _ in range(2)])
            G = groebner_module(M)
            assert groebner_module(G).basis == G.basis
            assert module_equal(M, G)

    def test_membership_random_combinations(self):
        """10^3 trials: polynomial combinations of generators are members."""
        rng = random.Random(2024)
        for trial in range(1000):
            n = rng.randint(1, 3)
            vars = V3[:n]
            rank = rng.randint(1, 3)
            gens = [oracles.random_vector(rng, vars, rank, 2, 2) for _ in range(rng.randint(1, 2))]
            M = PolyModule(vars, rank, gens)
            for g in gens:
                assert member(g, M)
            coeffs = [oracles.random_poly(rng, vars, 2, 2) for _ in gens]
            combo = [sum((c * g[j] for c, g in zip(coeffs, gens)), MultiPoly.zero(vars)) for j in range(rank)]
            assert member(combo, M), trial

    def test_ideal_basis_matches_sympy(self):
        rng = random.Random(5)
        syms = sp.symbols(list(V3))
        for _ in range(25):
            gens = [oracles.random_poly(rng, V3, 3, 3) for _ in range(3)]
            gens = [g for g in gens if not g.is_zero()]
            if not gens:
                continue
            ours = PolyIdeal(V3, gens).basis
            ref = sp.groebner([oracles.sympy_poly(g, syms) for g in gens], *syms, order="grevlex")
            ref_polys = {sp.Poly(sp.expand(p / sp.Poly(p, *syms).LC(order="grevlex")), *syms) for p in ref.exprs}
            our_polys = {sp.Poly(oracles.sympy_poly(g, syms), *syms) for g in ours}
            assert ref_polys == our_polys

    def test_intersection_monomial_oracle(self):
        rng = random.Random(7)
        for _ in range(40):
            n, rank = rng.choice([(2, 1), (2, 2), (3, 1), (3, 2)])
            vars = V3[:n]

            def gens():
                return [(rng.randrange(rank), oracles.random_monomial(rng, n, 3)) for _ in range(rng.randint(1, 3))]

            g1, g2 = gens(), gens()

            def as_module(gs):
                cols = []
                for pos, e in gs:
                    c = [MultiPoly.zero(vars) for _ in range(rank)]
                    c[pos] = MultiPoly(vars, {e: 1})
                    cols.append(c)
                return PolyModule(vars, rank, cols)

            inter = module_intersect(as_module(g1), as_module(g2))
            in1 = oracles.monomial_module_members(g1, n, rank, 6)
            in2 = oracles.monomial_module_members(g2, n, rank, 6)
            for pos, e in oracles.all_monomial_vectors(n, rank, 6):
                c = [MultiPoly.zero(vars) for _ in range(rank)]
                c[pos] = MultiPoly(vars, {e: 1})
                assert member(c, inter) == ((pos, e) in in1 and (pos, e) in in2)

    def test_syzygy_brute_force(self):
        rng = random.Random(3)
        done = 0
        while done < 16:
            rows, cols = rng.choice([(1, 2), (1, 3), (2, 3)])
            A_rows = [[oracles.random_poly(rng, V2, 2, 3) for _ in range(cols)] for _ in range(rows)]
            if any(e.is_zero() for r in A_rows for e in r):
                continue
            done += 1
            A = PolyMatrix(A_rows, V2)
            S = syzygy(A)
            for v in S.basis:
                assert all(e.is_zero() for e in A.apply(v))
            for w in oracles.kernel_up_to_degree(A_rows, V2, 5):
                assert all(e.is_zero() for e in A.apply(w))
                assert member(w, S)

    def test_generic_rank_vs_evaluation(self):
        rng = random.Random(9)
        for _ in range(40):
            r, c = rng.randint(1, 3), rng.randint(1, 3)
            base = [oracles.random_vector(rng, V3, r, 2, 2) for _ in range(rng.randint(1, c))]
            # dependent columns keep the rank below min(r, c) on some instances
            extra = [[oracles.random_poly(rng, V3, 1, 1) * x for x in base[0]] for _ in range(c - len(base))]
            A = PolyMatrix.from_columns(base + extra, V3, rows=r)
            best = 0
            for _ in range(20):
                pt = [complex(Fraction(rng.randint(-50, 50), rng.randint(1, 9))) for _ in V3]
                best = max(best, int(np.linalg.matrix_rank(np.array(A.evaluate(pt), dtype=complex), tol=1e-9)))
            assert generic_rank(A) == best


class TestBudget:
    def test_degree_budget(self):
        M = PolyModule(V3, 1, [col("z1^5 - z2^3*z3^2", vars=V3), col("z2^5 - z1*z3^4", vars=V3),
                               col("z3^5 - z1^2*z2^3", vars=V3)])
        with use_budget(Budget(max_degree=4)):
            with pytest.raises(BudgetExceeded) as exc:
                groebner_module(M)
        assert exc.value.computation

    def test_env_budget(self, monkeypatch):
        monkeypatch.setenv("FOLCALC_BUDGET", "7")
        assert Budget.from_env().max_degree == 7
        monkeypatch.delenv("FOLCALC_BUDGET")
        assert Budget.from_env() == Budget()
