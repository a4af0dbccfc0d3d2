"""ε-families of Hermitian coefficient fields and the coordinate boxes they are sampled on."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

__all__ = ["Chart", "HermitianField", "NonFiniteSample", "diagonal_field"]


class NonFiniteSample(ArithmeticError):
    """A field sample was NaN or infinite; ``cell`` is the grid multi-index."""

    def __init__(self, cell: tuple[int, ...], epsilon: float):
        self.cell = cell
        self.epsilon = epsilon
        super().__init__(f"non-finite field sample at chart cell {cell} (eps={epsilon!r})")


@dataclass(frozen=True)
class Chart:
    """Box of half-width ``half_width`` around ``center`` in R^{2n}, split into grid^{2n} cells.

    Real coordinates are ordered (x1, y1, x2, y2, ...) with z_j = x_j + i y_j.
    """

    center: tuple[float, ...]
    half_width: float
    grid: int

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if len(self.center) % 2 or not self.center:
            raise ValueError("chart center needs 2n real coordinates")
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")
        if int(self.grid) != self.grid or self.grid < 2:
            raise ValueError("grid must be an integer >= 2")

    @property
    def n(self) -> int:
        return len(self.center) // 2

    @property
    def volume(self) -> float:
        return (2.0 * self.half_width) ** (2 * self.n)

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.grid

    @property
    def cell_volume(self) -> float:
        return self.spacing ** (2 * self.n)

    @property
    def ncells(self) -> int:
        return self.grid ** (2 * self.n)

    def fibered_axes(self, k: int) -> tuple[int, ...]:
        """0-based complex indices of the transverse coordinates z_{k+1}..z_n."""
        return tuple(range(k, self.n))

    def axis_midpoints(self, axis: int) -> np.ndarray:
        h = self.spacing
        return self.center[axis] - self.half_width + h * (np.arange(self.grid) + 0.5)

    def slab(self, first: int) -> np.ndarray:
        """Complex sample points (grid^{2n-1}, n) of the cells whose first axis index is ``first``."""
        n, g = self.n, self.grid
        axes = [np.array([self.axis_midpoints(0)[first]])] + [self.axis_midpoints(a) for a in range(1, 2 * n)]
        mesh = np.meshgrid(*axes, indexing="ij")
        real = np.stack([m.reshape(-1) for m in mesh], axis=-1)
        return real[:, 0::2] + 1j * real[:, 1::2]

    def slabs(self) -> Iterator[tuple[int, np.ndarray]]:
        for first in range(self.grid):
            yield first, self.slab(first)

    def points(self) -> np.ndarray:
        return np.concatenate([pts for _, pts in self.slabs()], axis=0)

    def cell_index(self, first: int, flat: int) -> tuple[int, ...]:
        rest = np.unravel_index(flat, (self.grid,) * (2 * self.n - 1))
        return (first,) + tuple(int(r) for r in rest)


FieldFunc = Callable[[np.ndarray, float], np.ndarray]


class HermitianField:
    """H_ε(z): Hermitian n x n coefficients of T_ac + εω on a chart.

    ``func(z, eps)`` receives complex points of shape (N, n) and returns an
    array of shape (N, n, n).  ``epsilons`` is a strictly decreasing
    positive schedule.
    """

    def __init__(self, n: int, func: FieldFunc, epsilons: Sequence[float] = (), name: str = "field"):
        eps = tuple(float(e) for e in epsilons)
        if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValueError(f"epsilon schedule must be strictly decreasing and positive: {eps}")
        self.n = n
        self.func = func
        self.epsilons = eps
        self.name = name

    @classmethod
    def from_entries(
        cls,
        n: int,
        entries: Mapping[tuple[int, int], Callable[[np.ndarray, float], np.ndarray]],
        epsilons: Sequence[float] = (),
        name: str = "field",
    ) -> "HermitianField":
        """Build from upper-triangle entry functions keyed by 1-based (a, b), a <= b.

        The lower triangle is the conjugate transpose; diagonal entries are
        replaced by their real parts.
        """
        for a, b in entries:
            if not (1 <= a <= b <= n):
                raise ValueError(f"entry ({a},{b}) is not in the upper triangle of an {n}x{n} matrix")

        def func(z, eps):
            N = z.shape[0]
            H = np.zeros((N, n, n), dtype=complex)
            for (a, b), f in entries.items():
                val = np.broadcast_to(np.asarray(f(z, eps), dtype=complex), (N,))
                if a == b:
                    H[:, a - 1, a - 1] = val.real
                else:
                    H[:, a - 1, b - 1] = val
                    H[:, b - 1, a - 1] = np.conj(val)
            return H

        return cls(n, func, epsilons, name)

    def evaluate(self, z: np.ndarray, eps: float) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        if z.shape[1] != self.n:
            raise ValueError(f"points of dimension {z.shape[1]} for a field on C^{self.n}")
        with np.errstate(all="ignore"):
            H = np.asarray(self.func(z, eps), dtype=complex)
        if H.shape != (z.shape[0], self.n, self.n):
            raise ValueError(f"field returned shape {H.shape}, expected {(z.shape[0], self.n, self.n)}")
        return H

    def sample_slab(self, chart: Chart, first: int, eps: float, pts: np.ndarray | None = None) -> np.ndarray:
        """Evaluate on one slab of the chart; non-finite samples raise NonFiniteSample."""
        if chart.n != self.n:
            raise ValueError(f"chart of dimension {chart.n} for a field on C^{self.n}")
        if pts is None:
            pts = chart.slab(first)
        H = self.evaluate(pts, eps)
        bad = ~np.isfinite(H).all(axis=(1, 2))
        if bad.any():
            raise NonFiniteSample(chart.cell_index(first, int(np.argmax(bad))), eps)
        return H

    def with_epsilons(self, epsilons: Sequence[float]) -> "HermitianField":
        return HermitianField(self.n, self.func, epsilons, self.name)

    def permuted(self, order: Sequence[int]) -> "HermitianField":
        """Same field in coordinates w_j = z_{order[j]} (1-based ``order``)."""
        perm = np.array([o - 1 for o in order])
        if sorted(perm.tolist()) != list(range(self.n)):
            raise ValueError(f"{order} is not a permutation of 1..{self.n}")
        inv = np.argsort(perm)
        base = self.func

        def func(w, eps):
            z = w[:, inv]
            H = base(z, eps)
            return H[:, perm[:, None], perm[None, :]]

        return HermitianField(self.n, func, self.epsilons, self.name)

    def __repr__(self):
        return f"HermitianField({self.name!r}, n={self.n}, epsilons={self.epsilons})"


def diagonal_field(n: int, diag: Sequence[Callable[[np.ndarray, float], np.ndarray]],
                   epsilons: Sequence[float] = (), name: str = "field") -> HermitianField:
    return HermitianField.from_entries(n, {(j + 1, j + 1): f for j, f in enumerate(diag)}, epsilons, name)
