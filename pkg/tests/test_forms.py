import random
from fractions import Fraction
from itertools import combinations
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import combinatorics
import oracles
from folcalc.gaussian import GaussianRational
from folcalc.lab import NotPositiveSemidefinite, cauchy_schwarz_audit
from folcalc.testforms import (
    ConstantTestForm,
    IndexPair,
    MalformedIndices,
    constant_test_form_basis,
    is_test_pair,
    real_test_forms,
)
from folcalc.wedge import wedge_coefficient


class TestTestPairs:
    def test_examples(self):
        assert is_test_pair((2,), (2,), 2, 1, 1)
        assert not is_test_pair((1,), (1,), 2, 1, 1)
        assert is_test_pair((2, 3), (2, 3), 3, 1, 1)

    def test_basis_example(self):
        assert constant_test_form_basis(2, 1, 1) == [IndexPair((1,), (2,)), IndexPair((2,), (1,)), IndexPair((2,), (2,))]

    def test_malformed(self):
        with pytest.raises(MalformedIndices):
            is_test_pair((2, 1), (1, 2), 3, 1, 1)
        with pytest.raises(MalformedIndices):
            is_test_pair((1,), (1, 2), 3, 1, 1)
        with pytest.raises(MalformedIndices):
            is_test_pair((1,), (1,), 2, 1, 2)

    @pytest.mark.parametrize("n", range(2, 6))
    def test_basis_matches_enumeration(self, n):
        for k in range(0, n + 1):
            for p in range(1, n):
                S = list(combinations(range(1, n + 1), n - p))
                T = set(range(k + 1, n + 1))
                expect = [IndexPair(I, J) for I in S for J in S
                          if len(T & set(I)) > n - k - p or len(T & set(J)) > n - k - p]
                assert constant_test_form_basis(n, k, p) == expect

    def test_rank_zero_has_no_test_pairs(self):
        # with k = 0 the transverse set is everything and |I| = n - p never exceeds n - p
        for n in range(2, 6):
            for p in range(1, n):
                assert constant_test_form_basis(n, 0, p) == []

    def test_full_rank_every_pair(self):
        # k = n: no transverse directions, bound -p < 0 is beaten by every pair
        for n in range(2, 5):
            for p in range(1, n):
                S = list(combinations(range(1, n + 1), n - p))
                assert constant_test_form_basis(n, n, p) == [IndexPair(I, J) for I in S for J in S]

    def test_p_equals_n_minus_k(self):
        for n in range(2, 6):
            for k in range(1, n):
                p = n - k
                basis = set(constant_test_form_basis(n, k, p))
                S = list(combinations(range(1, n + 1), n - p))
                missing = [IndexPair(I, J) for I in S for J in S if IndexPair(I, J) not in basis]
                assert missing == [IndexPair(tuple(range(1, k + 1)), tuple(range(1, k + 1)))]

    def test_real_forms(self):
        forms = real_test_forms(3, 1, 1)
        assert all(f.is_real() for f in forms)
        with pytest.raises(ValueError):
            ConstantTestForm(2, 1, 1, ((IndexPair((1,), (1,)), 1.0),))


class TestCombinatorialLemmas:
    def test_notf(self):
        assert combinatorics.notf_counterexamples(5) == []

    def test_f_plus_g(self):
        bad, count = combinatorics.fg_counterexamples(5)
        assert count > 0 and bad == []


class TestWedge:
    def test_examples(self):
        h1, h2 = Fraction(3, 2), Fraction(5, 7)
        assert wedge_coefficient([[h1, 0], [0, h2]], 1, IndexPair((2,), (2,))) == GaussianRational(h1)
        for n in range(1, 5):
            Id = [[int(a == b) for b in range(n)] for a in range(n)]
            for p in range(0, n + 1):
                for I in combinations(range(1, n + 1), n - p):
                    assert wedge_coefficient(Id, p, IndexPair(I, I)) == GaussianRational(factorial(p))
        assert wedge_coefficient([[1, 0], [0, 2]], 1, IndexPair((1,), (2,))) == GaussianRational(0)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_exterior_oracle(self, n):
        rng = random.Random(100 + n)
        for _ in range(3 if n < 4 else 1):
            H = oracles.random_gaussian_matrix(rng, n)
            for p in range(0, n + 1):
                for I in combinations(range(1, n + 1), n - p):
                    for J in combinations(range(1, n + 1), n - p):
                        assert wedge_coefficient(H, p, IndexPair(I, J)) == oracles.brute_wedge_coefficient(H, p, I, J)

    def test_numeric_matches_exact(self):
        rng = random.Random(1)
        H = oracles.random_gaussian_matrix(rng, 3)
        Hn = np.array([[complex(x) for x in r] for r in H])
        for p in range(0, 4):
            for I in combinations(range(1, 4), 3 - p):
                for J in combinations(range(1, 4), 3 - p):
                    pair = IndexPair(I, J)
                    assert abs(wedge_coefficient(Hn, p, pair) - complex(wedge_coefficient(H, p, pair))) < 1e-10

    @given(st.integers(1, 4), st.integers(0, 2 ** 31))
    @settings(max_examples=80, deadline=None)
    def test_positivity(self, n, seed):
        rng = np.random.default_rng(seed)
        A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        H = A @ A.conj().T
        for p in range(0, n + 1):
            for I in combinations(range(1, n + 1), n - p):
                c = wedge_coefficient(H, p, IndexPair(I, I))
                assert c.real >= -1e-9 and abs(c.imag) < 1e-9 * max(1.0, abs(c))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            wedge_coefficient(np.eye(3), 1, IndexPair((1,), (1,)))


class TestCauchySchwarz:
    def test_examples(self):
        assert cauchy_schwarz_audit(np.eye(3), 1)
        assert cauchy_schwarz_audit(np.diag([1.0, 0.0]), 1)
        assert wedge_coefficient(np.diag([1.0, 0.0]), 1, IndexPair((2,), (2,))) == 1
        assert wedge_coefficient(np.diag([1.0, 0.0]), 1, IndexPair((1,), (1,))) == 0

    def test_random_rational_psd(self):
        rng = random.Random(4)
        for _ in range(50):
            A = np.array([[complex(Fraction(rng.randint(-5, 5), rng.randint(1, 4)), rng.randint(-3, 3))
                           for _ in range(3)] for _ in range(3)])
            assert cauchy_schwarz_audit(A @ A.conj().T, 1)

    def test_not_psd(self):
        with pytest.raises(NotPositiveSemidefinite):
            cauchy_schwarz_audit(np.diag([1.0, -1.0]), 1)

    def test_equality_case_large_entries(self):
        # rank H = p puts every off-diagonal coefficient exactly on the bound
        rng = np.random.default_rng(870)
        for _ in range(200):
            B = 3 * (rng.normal(size=(4, 3)) + 1j * rng.normal(size=(4, 3)))
            assert cauchy_schwarz_audit(B @ B.conj().T, 3)

    def test_detects_violation(self, monkeypatch):
        import folcalc.lab as lab

        real = lab.wedge_coefficient
        monkeypatch.setattr(lab, "wedge_coefficient",
                            lambda H, p, pair: real(H, p, pair) * (1 if pair.I == pair.J else 2))
        assert not cauchy_schwarz_audit(np.ones((2, 2)), 1)
