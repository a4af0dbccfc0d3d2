"""Numerical-triviality and transversality diagnostics for ε-families of (1,1)-forms.

All integrals are midpoint-rule sums over the chart grid, weighted by the
Lebesgue cell volume.  Summation is pairwise with a fixed tree inside each
slab (cells sharing the first grid index) and again across slabs in slab
order, so results do not depend on how many workers evaluate the slabs.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from math import factorial
from typing import Sequence

import numpy as np

from . import kernels
from .fields import Chart, HermitianField
from .testforms import IndexPair, constant_test_form_basis
from .wedge import pair_minor_indices, wedge_coefficient, wedge_sign

__all__ = [
    "NTSeries",
    "NTReport",
    "NotPositiveSemidefinite",
    "VERDICT_POSITIVE",
    "VERDICT_NEGATIVE",
    "integrate_pairs",
    "nt_integral",
    "nt_report",
    "mass_series",
    "nu_proxy",
    "transversality_check",
    "pullback_check",
    "cauchy_schwarz_audit",
    "series_decays",
]

VERDICT_POSITIVE = "consistent with numerical triviality"
VERDICT_NEGATIVE = "inconsistent with numerical triviality"
EVIDENCE_NOTE = "one-sided evidence from the supplied epsilon-family; not a proof"


class NotPositiveSemidefinite(ValueError):
    pass


def _pair_arrays(pairs: Sequence[tuple[int, IndexPair]], n: int):
    m = pairs[0][0]
    rows = np.zeros((len(pairs), m), dtype=np.int64)
    cols = np.zeros((len(pairs), m), dtype=np.int64)
    scales = np.zeros(len(pairs), dtype=np.float64)
    for q, (p, pair) in enumerate(pairs):
        r, c = pair_minor_indices(pair, n)
        rows[q], cols[q] = r, c
        scales[q] = factorial(p) * wedge_sign(pair, n)
    return rows, cols, scales


def integrate_pairs(
    field: HermitianField,
    chart: Chart,
    eps: float,
    pairs: Sequence[tuple[int, IndexPair]],
    workers: int = 1,
) -> list[float]:
    """∫ |c_p,IJ(H_ε)| dλ over the chart for each (p, pair)."""
    if not pairs:
        return []
    n = field.n
    groups: dict[int, list[int]] = {}
    for q, (p, _) in enumerate(pairs):
        groups.setdefault(p, []).append(q)
    arrays = {p: _pair_arrays([pairs[q] for q in qs], n) for p, qs in groups.items()}

    def slab_sums(first: int) -> np.ndarray:
        H = field.sample_slab(chart, first, eps)
        out = np.zeros(len(pairs))
        for p, qs in groups.items():
            rows, cols, scales = arrays[p]
            out[qs] = kernels.minor_abs_sums(H, rows, cols, scales)
        return out

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_slab = list(pool.map(slab_sums, range(chart.grid)))
    else:
        per_slab = [slab_sums(first) for first in range(chart.grid)]
    stacked = np.array(per_slab)
    vol = chart.cell_volume
    return [kernels.pairwise_sum(stacked[:, q]) * vol for q in range(len(pairs))]


def nt_integral(field: HermitianField, chart: Chart, p: int, pair: IndexPair, eps: float, workers: int = 1) -> float:
    """Midpoint quadrature of |(T_ac + εω)^p ∧ u_IJ| over the chart."""
    return integrate_pairs(field, chart, eps, [(p, pair)], workers)[0]


def series_decays(values: Sequence[float], epsilons: Sequence[float], r_max: float = 0.6, floor: float = 1e-12) -> bool:
    """Every step shrinks by r_max per halving of ε, or lands below ``floor``."""
    if all(v <= floor for v in values):
        return True
    if len(values) < 2:
        return False
    for (v0, e0), (v1, e1) in zip(zip(values, epsilons), zip(values[1:], epsilons[1:])):
        if v1 <= floor:
            continue
        allowed = r_max ** math.log2(e0 / e1)
        if v0 <= 0 or v1 / v0 > allowed:
            return False
    return True


def _ratios(values: Sequence[float]) -> list[float | None]:
    return [v1 / v0 if v0 > 0 else None for v0, v1 in zip(values, values[1:])]


@dataclass
class NTSeries:
    p: int
    pair: IndexPair
    values: list[float]
    ratios: list[float | None]
    decays: bool


@dataclass
class NTReport:
    n: int
    k: int
    epsilons: list[float]
    series: list[NTSeries]
    psd_violations: list[int]
    r_max: float
    floor: float
    verdict: bool = field(init=False)

    def __post_init__(self):
        self.verdict = all(s.decays for s in self.series)

    @property
    def verdict_text(self) -> str:
        return VERDICT_POSITIVE if self.verdict else VERDICT_NEGATIVE

    def rows(self) -> list[dict]:
        out = []
        for s in self.series:
            for eps, v in zip(self.epsilons, s.values):
                out.append({"p": s.p, "pair": [list(s.pair.I), list(s.pair.J)], "epsilon": eps, "value": v})
        return out

    def series_for(self, p: int, pair: IndexPair) -> NTSeries:
        for s in self.series:
            if s.p == p and s.pair == pair:
                return s
        raise KeyError((p, pair))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "epsilons": list(self.epsilons),
            "rows": self.rows(),
            "series": [
                {"p": s.p, "pair": [list(s.pair.I), list(s.pair.J)], "ratios": s.ratios, "decays": s.decays}
                for s in self.series
            ],
            "psd_violations": list(self.psd_violations),
            "r_max": self.r_max,
            "floor": self.floor,
            "verdict": self.verdict_text,
            "note": EVIDENCE_NOTE,
        }


def _psd_violations(field: HermitianField, chart: Chart, eps: float, tol: float = 1e-12) -> int:
    """Samples where H_ε + ε·Id has an eigenvalue below -tol."""
    count = 0
    for first in range(chart.grid):
        H = field.sample_slab(chart, first, eps)
        lam = np.linalg.eigvalsh(H)[:, 0]
        count += int(np.count_nonzero(lam + eps < -tol))
    return count


def nt_report(
    field: HermitianField,
    chart: Chart,
    n: int,
    k: int,
    r_max: float = 0.6,
    floor: float = 1e-12,
    epsilons: Sequence[float] | None = None,
    workers: int = 1,
) -> NTReport:
    """Tabulate (NT)_u integrals over every constant test pair and every ε."""
    if field.n != n:
        raise ValueError(f"field on C^{field.n} checked as dimension {n}")
    eps_list = list(epsilons if epsilons is not None else field.epsilons)
    if not eps_list:
        raise ValueError("empty epsilon schedule")
    pairs = [(p, pair) for p in range(1, n) for pair in constant_test_form_basis(n, k, p)]
    table = [integrate_pairs(field, chart, e, pairs, workers) for e in eps_list]
    series = []
    for q, (p, pair) in enumerate(pairs):
        values = [table[j][q] for j in range(len(eps_list))]
        series.append(NTSeries(p, pair, values, _ratios(values), series_decays(values, eps_list, r_max, floor)))
    psd = [_psd_violations(field, chart, e) for e in eps_list]
    return NTReport(n, k, eps_list, series, psd, r_max, floor)


def mass_series(field: HermitianField, chart: Chart, p: int, epsilons: Sequence[float] | None = None,
                workers: int = 1) -> list[float]:
    """∫ (T_ac + εω)^p ∧ ω^{n-p} = (n-p)! Σ_{|I|=n-p} ∫ |c_II| for each ε (PSD fields)."""
    n = field.n
    eps_list = list(epsilons if epsilons is not None else field.epsilons)
    pairs = [(p, IndexPair(I, I)) for I in combinations(range(1, n + 1), n - p)]
    out = []
    for e in eps_list:
        vals = integrate_pairs(field, chart, e, pairs, workers)
        out.append(factorial(n - p) * kernels.pairwise_sum(vals))
    return out


def nu_proxy(field: HermitianField, chart: Chart, r_max: float = 0.6, floor: float = 1e-12,
             epsilons: Sequence[float] | None = None) -> tuple[int, dict[int, list[float]]]:
    """Largest p whose mass series ∫(T+εω)^p ∧ ω^{n-p} fails to decay."""
    eps_list = list(epsilons if epsilons is not None else field.epsilons)
    masses = {p: mass_series(field, chart, p, eps_list) for p in range(0, field.n + 1)}
    nu = max(p for p, vals in masses.items() if not series_decays(vals, eps_list, r_max, floor))
    return nu, masses


def _block_min_eigs(field: HermitianField, chart: Chart, k: int, eps: float) -> np.ndarray:
    lams = []
    for first in range(chart.grid):
        H = field.sample_slab(chart, first, eps)
        block = H[:, k:, k:]
        lams.append(np.linalg.eigvalsh(block)[:, 0])
    return np.concatenate(lams).reshape((chart.grid,) * (2 * chart.n))


def _lipschitz_estimate(values: np.ndarray, spacing: float) -> float:
    """Max over samples of the finite-difference gradient norm."""
    grad2 = np.zeros_like(values)
    for axis in range(values.ndim):
        d = np.abs(np.diff(values, axis=axis)) / spacing
        pad_lo = [(0, 0)] * values.ndim
        pad_hi = [(0, 0)] * values.ndim
        pad_lo[axis] = (1, 0)
        pad_hi[axis] = (0, 1)
        fwd = np.pad(d, pad_hi)
        bwd = np.pad(d, pad_lo)
        grad2 += np.maximum(fwd, bwd) ** 2
    return float(np.sqrt(grad2.max()))


def transversality_check(field: HermitianField, chart: Chart, k: int, eps: float) -> float | None:
    """δ with H_ε ≥ δ·(transverse identity block) on the chart, or None if δ ≤ 0.

    δ is the smallest sampled eigenvalue of the lower-right (n-k) block minus
    a Lipschitz allowance covering the distance from a cell center to its corners.
    """
    n = field.n
    if not 0 <= k < n:
        raise ValueError(f"need 0 <= k < n for a transverse block, got k={k}, n={n}")
    lam = _block_min_eigs(field, chart, k, eps)
    L = _lipschitz_estimate(lam, chart.spacing)
    half_diag = 0.5 * chart.spacing * math.sqrt(2 * n)
    delta = float(lam.min()) - L * half_diag
    return delta if delta > 0 else None


def pullback_check(field: HermitianField, chart: Chart, k: int, eps: float, tol: float) -> bool:
    """True iff H_ε looks like a pullback from the transverse coordinates.

    (a) entries outside the transverse block {k+1..n}^2 stay below ``tol``;
    (b) transverse-block entries vary by less than ``tol`` along each leaf
    (the first k complex coordinates), for every transverse sample.
    """
    n, g = field.n, chart.grid
    if not 0 <= k <= n:
        raise ValueError(f"rank k = {k} outside 0..{n}")
    mask = np.ones((n, n), dtype=bool)
    mask[k:, k:] = False
    lo = hi = None
    for first in range(g):
        H = field.sample_slab(chart, first, eps)
        if mask.any() and np.abs(H[:, mask]).max() >= tol:
            return False
        if k == 0 or k == n:
            continue
        # rows of the slab: leaf axes (all but the first) then transverse axes
        block = H[:, k:, k:].reshape((g ** (2 * k - 1), g ** (2 * (n - k)), n - k, n - k))
        parts = np.stack([block.real, block.imag])
        smin, smax = parts.min(axis=1), parts.max(axis=1)
        lo = smin if lo is None else np.minimum(lo, smin)
        hi = smax if hi is None else np.maximum(hi, smax)
    if lo is None:
        return True
    return float((hi - lo).max()) < tol


def cauchy_schwarz_audit(H, p: int, tol: float = 1e-12, psd_tol: float = 1e-12) -> bool:
    """|c_IJ| ≤ sqrt(c_II c_JJ) + tol·s for all |I| = |J| = n - p, H positive semidefinite.

    ``s = max(1, max_K c_KK)`` puts the tolerance on the scale of the coefficients,
    since equality cases (rank H = p) sit exactly on the bound and round-off grows
    with the entries.
    """
    A = np.asarray(H, dtype=complex)
    n = A.shape[0]
    if A.shape != (n, n) or not np.allclose(A, A.conj().T, atol=psd_tol, rtol=0):
        raise NotPositiveSemidefinite("matrix is not Hermitian")
    lam_min = float(np.linalg.eigvalsh(A)[0])
    if lam_min < -psd_tol * max(1.0, float(np.abs(A).max())):
        raise NotPositiveSemidefinite(f"smallest eigenvalue {lam_min:.3e} < 0")
    subsets = list(combinations(range(1, n + 1), n - p))
    diag = {I: wedge_coefficient(A, p, IndexPair(I, I)).real for I in subsets}
    slack = tol * max([1.0] + list(diag.values()))
    for I in subsets:
        for J in subsets:
            if I == J:
                continue
            c = wedge_coefficient(A, p, IndexPair(I, J))
            if abs(c) > math.sqrt(max(diag[I], 0.0) * max(diag[J], 0.0)) + slack:
                return False
    return True
