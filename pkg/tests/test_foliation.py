import math

import numpy as np
import pytest
import sympy as sp

import oracles
from corpus import MAPS, PAIRS
from folcalc.foliation import (
    ConstantMapError,
    Foliation,
    RationalMap,
    SingularPointError,
    induced_foliation,
    intersection_foliation,
    involutive_closure,
    is_involutive,
    lie_bracket,
    parse_vector_field,
    tangent_frame_at,
    union,
)
from folcalc.modules import PolyModule, member, module_equal, saturate
from folcalc.poly import parse_poly
from folcalc._parse import ParseError

V2 = ("z1", "z2")
V3 = ("z1", "z2", "z3")


def vf(text, vars=V3):
    return parse_vector_field(text, vars)


def module(texts, vars=V3):
    return PolyModule(vars, len(vars), [vf(t, vars).components for t in texts])


def closure(texts, vars=V3):
    return involutive_closure(module(texts, vars))


class TestBrackets:
    def test_examples(self):
        assert lie_bracket(vf("d1"), vf("z1*d2")) == vf("d2")
        X = vf("z2*d1 + z1^2*d3")
        assert lie_bracket(X, X).is_zero()
        assert lie_bracket(vf("d1"), vf("d2 + z1*d3")) == vf("d3")

    def test_printing(self):
        assert str(vf("z1*d1 - z2*d2")) == "z1*d1 - z2*d2"
        assert vf(str(vf("(1+i)*z1*d1 + d3"))) == vf("(1+i)*z1*d1 + d3")

    def test_malformed(self):
        with pytest.raises(ParseError):
            vf("z1*d1*d2")
        with pytest.raises(ParseError):
            vf("z1 + d1")
        with pytest.raises(ParseError):
            parse_vector_field("z1*d3", V2)

    def test_involutive(self):
        assert is_involutive(module(["d1", "d3"]))
        assert not is_involutive(module(["d1", "d2 + z1*d3"]))
        assert is_involutive(module(["z1*z2*d1 + z3^2*d2 - d3"]))


class TestClosure:
    def test_heisenberg(self):
        F = closure(["d1", "d2 + z1*d3"])
        assert F.rank == 3 and module_equal(F.module, PolyModule.free(V3, 3))
        assert F.iterations <= 3

    def test_fixpoint_one_iteration(self):
        F = closure(["d1", "d3"])
        assert F.iterations == 1 and module_equal(F.module, module(["d1", "d3"]))

    def test_figure_1(self):
        F = closure(["d3", "d1 + z2*d3"])
        assert F.rank == 2 and module_equal(F.module, module(["d1", "d3"]))


class TestUnion:
    def test_examples(self):
        F = closure(["d3"])
        assert union(F, F) == F
        assert union(F, closure(["d1 + z2*d3"])) == closure(["d1", "d3"])
        f, g = induced_foliation(RationalMap([parse_poly("z2", V2)])), induced_foliation(RationalMap([parse_poly("z1", V2)]))
        assert module_equal(union(f, g).module, PolyModule.free(V2, 2))

    @pytest.mark.parametrize("name,vars,fg,gg,rank", PAIRS, ids=[p[0] for p in PAIRS])
    def test_corpus(self, name, vars, fg, gg, rank):
        F, G = closure(fg, vars), closure(gg, vars)
        U = union(F, G)
        assert U.rank == rank
        assert U.iterations <= len(vars)
        assert is_involutive(U.module)
        assert module_equal(saturate(U.module), U.module)
        for g in F.module.basis + G.module.basis:
            assert member(g, U.module)
        assert module_equal(U.module, union(G, F).module)
        fields = [vf(t, vars) for t in fg + gg]
        assert oracles.bracket_span_rank(fields, vars) == rank

    @pytest.mark.parametrize("name,vars,fg,gg,rank", PAIRS, ids=[p[0] for p in PAIRS])
    def test_singular_codimension(self, name, vars, fg, gg, rank):
        U = union(closure(fg, vars), closure(gg, vars))
        syms = sp.symbols(list(vars))
        gens = [oracles.sympy_poly(g, syms) for g in U.sing_ideal.generators]
        g = gens[0]
        for h in gens[1:]:
            g = sp.gcd(g, h)
        assert sp.Poly(g, *syms).is_ground


class TestMinimality:
    @pytest.mark.parametrize("name,vars,fg,gg,rank", PAIRS, ids=[p[0] for p in PAIRS])
    def test_no_smaller_foliation(self, name, vars, fg, gg, rank):
        assert oracles.minimality_counterexample(fg + gg, vars, union(closure(fg, vars), closure(gg, vars))) is None


class TestIntersection:
    def test_examples(self):
        r = intersection_foliation(closure(["d1", "d2"]), closure(["d2", "d3"]))
        assert module_equal(r.module, module(["d2"])) and r.saturated
        F = closure(["z1*d1 + z2*d2 + z3*d3"])
        assert module_equal(intersection_foliation(F, F).module, F.module)
        assert intersection_foliation(closure(["d1"]), closure(["d2"])).module.is_zero()


class TestSingularLocus:
    def test_examples(self):
        radial = involutive_closure(module(["z1*d1 + z2*d2"], V2))
        assert radial.sing_ideal == __import__("folcalc").PolyIdeal(V2, [parse_poly("z1", V2), parse_poly("z2", V2)])
        assert radial.rank == 1
        assert Foliation.full(V2).sing_ideal.is_unit()
        assert closure(["d1"]).sing_ideal.is_unit()
        assert Foliation.full(V3).rank == 3
        assert closure(["d1", "z1*d1"]).rank == 1


class TestInduced:
    def test_examples(self):
        assert induced_foliation(RationalMap([parse_poly("z2", V2)])) == closure(["d1"], V2)
        hyp = induced_foliation(RationalMap([parse_poly("z1*z2", V2)]))
        assert module_equal(hyp.module, module(["z1*d1 - z2*d2"], V2))
        imm = induced_foliation(RationalMap([parse_poly("z1", V2), parse_poly("z2", V2)]))
        assert imm.is_empty() and imm.rank == 0
        with pytest.raises(ConstantMapError):
            induced_foliation(RationalMap([parse_poly("3", V2)]))

    @pytest.mark.parametrize("name,vars,comps,rank", MAPS, ids=[m[0] for m in MAPS])
    def test_corpus(self, name, vars, comps, rank):
        f = RationalMap([parse_poly(c, vars) for c in comps])
        F = induced_foliation(f)
        assert F.rank == rank
        if rank:
            assert is_involutive(F.module)
            # every generator is tangent to the level sets
            for X in F.generators:
                for c in f.components:
                    assert X.apply(c).is_zero()


class TestTangentFrame:
    def test_examples(self):
        radial = involutive_closure(module(["z1*d1 + z2*d2"], V2))
        fr = tangent_frame_at(radial, [1, 0])
        assert fr.shape == (2, 1) and abs(abs(fr[0, 0]) - 1) < 1e-12 and abs(fr[1, 0]) < 1e-12
        fr = tangent_frame_at(closure(["d1"]), [0.3, 2, -1])
        assert np.allclose(np.abs(fr[:, 0]), [1, 0, 0])
        hyp = induced_foliation(RationalMap([parse_poly("z1*z2", V2)]))
        fr = tangent_frame_at(hyp, [1, 1])[:, 0]
        fr = fr / fr[0] * abs(fr[0])
        assert np.allclose(fr, [1 / math.sqrt(2), -1 / math.sqrt(2)])

    def test_singular_point(self):
        radial = involutive_closure(module(["z1*d1 + z2*d2"], V2))
        with pytest.raises(SingularPointError):
            tangent_frame_at(radial, [0, 0])


def test_minimality_oracle_detects_oversized_closure():
    # the full tangent sheaf is not the smallest foliation containing the Figure 1 pair
    H = oracles.minimality_counterexample(["d3", "d1 + z2*d3"], V3, Foliation.full(V3))
    assert H is not None and H.generic_rank() == 2
