"""Acceptance run: one test per criterion, each printing a PASS/FAIL line."""
import random
import shutil
import subprocess
import sys
import time
from contextlib import contextmanager
from fractions import Fraction
from itertools import combinations
from pathlib import Path

import numpy as np
import pytest

import oracles
from combinatorics import fg_counterexamples, notf_counterexamples
from corpus import PAIRS
from folcalc.expr import Expression
from folcalc.fields import Chart, HermitianField
from folcalc.foliation import involutive_closure, is_involutive, parse_vector_field, union
from folcalc.lab import VERDICT_POSITIVE, cauchy_schwarz_audit, nt_integral, nt_report, nu_proxy, pullback_check, transversality_check
from folcalc.modules import PolyModule, module_equal, saturate
from folcalc.runner import run_scene
from folcalc.scene import load_scene
from folcalc.testforms import IndexPair
from folcalc.wedge import wedge_coefficient

ROOT = Path(__file__).resolve().parent.parent
SCENES = sorted((ROOT / "scenes").glob("*.toml"))
V2 = ("z1", "z2")
EPS = (0.1, 0.05, 0.025)


@contextmanager
def criterion(capsys, number, title, limit=None):
    """Run the body, then print one PASS/FAIL line; failures are re-raised as test failures."""
    notes: list[str] = []
    start = time.perf_counter()
    failure = None
    try:
        yield notes
    except Exception as exc:  # noqa: BLE001 - any failure marks the criterion failed
        failure = f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    if failure is None and limit is not None and elapsed >= limit:
        failure = f"runtime {elapsed:.1f}s exceeds {limit}s"
    status = "PASS" if failure is None else "FAIL"
    detail = "; ".join(notes + ([failure] if failure else []))
    with capsys.disabled():
        print(f"\n{status} criterion {number}: {title} [{elapsed:.2f}s] {detail}")
    if failure is not None:
        pytest.fail(f"criterion {number}: {failure}")


def module(texts, vars):
    return PolyModule(vars, len(vars), [parse_vector_field(t, vars).components for t in texts])


def fs_field(h11="eps", h22="1/(1+abs2(z2))^2 + eps"):
    entries = {}
    if h11:
        entries[(1, 1)] = Expression.parse(h11, V2)
    entries[(2, 2)] = Expression.parse(h22, V2)
    return HermitianField.from_entries(2, entries, EPS)


BOX32 = Chart((0, 0, 0, 0), 1.0, 32)


def test_criterion_1_union_algorithm(capsys):
    assert len(PAIRS) >= 10
    assert any(name == "figure-1" for name, *_ in PAIRS) and any(name == "heisenberg" for name, *_ in PAIRS)
    with criterion(capsys, 1, "union closure on the foliation-pair corpus", limit=60) as notes:
        checked = 0
        for name, vars, fg, gg, rank in PAIRS:
            n = len(vars)
            F = involutive_closure(module(fg, vars))
            G = involutive_closure(module(gg, vars))
            U = union(F, G)
            raw = involutive_closure(module(fg + gg, vars))
            for X in (F, G, U, raw):
                assert X.iterations <= n, f"{name}: {X.iterations} iterations > n"
                assert is_involutive(X.module), f"{name}: closure not involutive"
                assert module_equal(saturate(X.module), X.module), f"{name}: closure not saturated"
            assert module_equal(U.module, raw.module), f"{name}: union depends on presentation"
            assert U.rank == rank, f"{name}: rank {U.rank} != {rank}"
            degree = max(c.total_degree() for X in (module(fg, vars), module(gg, vars))
                         for g in X.generators for c in g)
            if degree <= 2:
                found = oracles.minimality_counterexample(fg + gg, vars, U)
                assert found is None, f"{name}: smaller foliation {found.basis}"
                checked += 1
        notes.append(f"{len(PAIRS)} pairs, {checked} minimality-checked")


def test_criterion_2_saturation_contract(capsys):
    with criterion(capsys, 2, "saturation contract on 10^3 random instances", limit=120) as notes:
        rng = random.Random(20261016)
        for trial in range(1000):
            M, v, f = oracles.saturation_instance(rng)
            assert len(M.vars) <= 3
            assert max(c.total_degree() for g in M.generators for c in g) <= 4
            try:
                oracles.check_saturation_contract(M, v, f, rng)
            except AssertionError as exc:
                raise AssertionError(f"instance {trial}: {exc}") from None
        notes.append("1000 instances")


def test_criterion_3_combinatorial_lemmas(capsys):
    with criterion(capsys, 3, "notF and F+G index statements, n <= 5", limit=10) as notes:
        bad = notf_counterexamples(5)
        assert not bad, f"notF counterexamples: {bad[:3]}"
        bad, count = fg_counterexamples(5)
        assert not bad, f"F+G counterexamples: {bad[:3]}"
        assert count > 0
        notes.append(f"{count} admissible (n, l, k, m, p) tuples")


def _random_psd(rng: np.random.Generator, n: int) -> np.ndarray:
    r = int(rng.integers(1, n + 1))
    B = rng.normal(size=(n, r)) + 1j * rng.normal(size=(n, r))
    return B @ B.conj().T


def test_criterion_4_wedge_kernel(capsys):
    with criterion(capsys, 4, "wedge oracle n <= 4 and Cauchy-Schwarz on 10^4 PSD matrices") as notes:
        rng = random.Random(4)
        pairs = 0
        for n in range(1, 5):
            for _ in range(2):
                H = oracles.random_gaussian_matrix(rng, n)
                for p in range(0, n + 1):
                    S = list(combinations(range(1, n + 1), n - p))
                    for I in S:
                        for J in S:
                            got = wedge_coefficient(H, p, IndexPair(I, J))
                            want = oracles.brute_wedge_coefficient(H, p, I, J)
                            assert got == want, f"n={n} p={p} {I},{J}: {got} != {want}"
                            pairs += 1
        nrng = np.random.default_rng(44)
        audits = 0
        for _ in range(10_000):
            n = int(nrng.integers(1, 5))
            A = _random_psd(nrng, n)
            p = int(nrng.integers(0, n + 1))
            assert cauchy_schwarz_audit(A, p, tol=1e-12), f"audit failed for n={n}, p={p}"
            audits += 1
        notes.append(f"{pairs} exact comparisons, {audits} audits")


def test_criterion_5_fs_fixture(capsys):
    with criterion(capsys, 5, "Fubini-Study chart fixture at grid 32") as notes:
        H = fs_field()
        pair = IndexPair((2,), (2,))
        vals = [nt_integral(H, BOX32, 1, pair, e) for e in EPS]
        for e, v in zip(EPS, vals):
            assert abs(v - 16 * e) <= 0.005 * 16 * e, f"ε={e}: {v} vs {16 * e}"
        ratios = [b / a for a, b in zip(vals, vals[1:])]
        assert all(abs(r - 0.5) <= 0.01 for r in ratios), f"ratios {ratios}"
        rep = nt_report(H, BOX32, 2, 1)
        assert rep.verdict, "verdict not positive"
        delta = transversality_check(H, BOX32, 1, 0.1)
        assert delta is not None and delta >= 0.1, f"δ = {delta}"
        assert pullback_check(fs_field(h11=None, h22="1/(1+abs2(z2))^2"), BOX32, 1, 0.0, 1e-9)
        notes.append(f"values {vals}, δ = {delta:.6g}")


def test_criterion_6_negative_control(capsys):
    with criterion(capsys, 6, "negative control with unit leaf mass") as notes:
        H = fs_field(h11="1")
        rep = nt_report(H, BOX32, 2, 1)
        vals = rep.series_for(1, IndexPair((2,), (2,))).values
        assert all(abs(v - 16) <= 0.16 for v in vals), f"values {vals}"
        assert not rep.series_for(1, IndexPair((2,), (2,))).decays
        assert not rep.verdict, "verdict not negative"
        notes.append(f"values {vals}")


def test_criterion_7_key_lemma_figure1(capsys):
    with criterion(capsys, 7, "Key Lemma smoke test on the Figure 1 union") as notes:
        doc = load_scene(ROOT / "scenes" / "figure1.toml")
        reps = {r.id: r for r in run_scene(doc)}
        union_rep = next(r for r in reps.values() if r.op == "union")
        assert union_rep.ok and union_rep.result["rank"] == 2
        assert union_rep.result["generators"] == ["d1", "d3"]
        nt = [r for r in reps.values() if r.op == "nt-check"]
        assert nt and all(r.ok for r in nt)
        assert all(r.result["verdict"] == VERDICT_POSITIVE for r in nt), \
            [r.result["verdict"] for r in nt]
        notes.append(f"union rank 2, {len(nt)} positive nt-check task(s)")


def test_criterion_8_rank_bound(capsys):
    with criterion(capsys, 8, "rank bound on the FS chart") as notes:
        nu, _ = nu_proxy(fs_field(), BOX32)
        fibers = involutive_closure(module(["d1"], V2))
        assert nu == 1, f"ν = {nu}"
        assert fibers.rank == 1 == 2 - nu
        notes.append(f"ν = {nu}, rank = {fibers.rank}")


def _cli():
    exe = shutil.which("folcalc")
    return [exe] if exe else [sys.executable, "-m", "folcalc.cli"]


def test_criterion_9_cli_determinism(capsys, tmp_path):
    with criterion(capsys, 9, "CLI determinism and exit codes") as notes:
        for path in SCENES:
            outs = []
            for run in range(2):
                out = tmp_path / f"{path.stem}-{run}.json"
                proc = subprocess.run(_cli() + ["run", str(path), "--out", str(out)], capture_output=True, text=True)
                assert proc.returncode == 0, f"{path.name}: exit {proc.returncode}: {proc.stderr}"
                outs.append(out.read_bytes())
            assert outs[0] == outs[1], f"{path.name}: reports differ"
        par = tmp_path / "par.json"
        proc = subprocess.run(_cli() + ["run", str(ROOT / "scenes" / "heisenberg.toml"), "--parallel", "--out", str(par)],
                              capture_output=True)
        assert proc.returncode == 0 and par.read_bytes() == (tmp_path / "heisenberg-0.json").read_bytes()
        bad = tmp_path / "bad.toml"
        bad.write_text('[ring]\nvars = ["z1", "z2"]\n[foliation.F]\ngenerators = ["z1*d3"]\n')
        assert subprocess.run(_cli() + ["check", str(bad)], capture_output=True).returncode == 1
        assert subprocess.run(_cli() + ["run", str(bad)], capture_output=True).returncode == 1
        failing = tmp_path / "failing.toml"
        failing.write_text(
            '[ring]\nvars = ["z1", "z2", "z3"]\n'
            '[foliation.hard]\ngenerators = ["(z1^5 - z2^3*z3^2)*d1", "(z2^5 - z1*z3^4)*d1", "(z3^5 - z1^2*z2^3)*d1"]\n'
            '[[task]]\nid = "big"\nop = "saturate"\nargs = ["hard"]\n')
        proc = subprocess.run(_cli() + ["run", str(failing), "--budget", "4"], capture_output=True)
        assert proc.returncode == 2, proc.returncode
        notes.append(f"{len(SCENES)} scenes byte-identical; exit codes 0/1/2 observed")
