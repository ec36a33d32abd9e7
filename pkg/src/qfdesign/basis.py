"""Design spaces, designs and orthonormal contrast bases.

Levels of a factor with ``s`` levels are the integers ``0, ..., s-1``. Contrast
tables are stored as ``s x s`` arrays whose row ``j`` holds ``C_j(0..s-1)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from qfdesign.errors import InvalidLevelCount, ShapeError, ValidationError

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class DesignSpace:
    """Full factorial grid with ``levels[i]`` levels for factor ``i``."""

    levels: tuple[int, ...]

    def __post_init__(self):
        levels = tuple(int(s) for s in self.levels)
        if len(levels) < 1:
            raise InvalidLevelCount("a design space needs at least one factor")
        if any(s < 2 for s in levels):
            raise InvalidLevelCount(f"every level count must be >= 2, got {levels}")
        object.__setattr__(self, "levels", levels)

    @property
    def k(self) -> int:
        return len(self.levels)

    @property
    def N(self) -> int:
        return int(np.prod(self.levels))

    @property
    def K(self) -> int:
        return sum(s - 1 for s in self.levels)

    def points(self) -> np.ndarray:
        """All grid points (equivalently all multi-indices), last factor fastest."""
        return _grid(self.levels)

    def norm0(self) -> np.ndarray:
        """``||t||_0`` for every multi-index, shaped like the coefficient tensor."""
        return _norms(self.levels)[0]

    def norm1(self) -> np.ndarray:
        """``||t||_1`` for every multi-index, shaped like the coefficient tensor."""
        return _norms(self.levels)[1]

    def contains(self, x: Sequence[int]) -> bool:
        return len(x) == self.k and all(0 <= int(v) < s for v, s in zip(x, self.levels))

    def check_point(self, x: Sequence[int], what: str = "point") -> tuple[int, ...]:
        x = tuple(int(v) for v in x)
        if len(x) != self.k:
            raise ShapeError(f"{what} {x} has {len(x)} entries, space has {self.k} factors")
        if not self.contains(x):
            raise ValidationError(f"{what} {x} is outside levels {self.levels}")
        return x

    def full_factorial(self) -> "Design":
        return Design(self, self.points())


@lru_cache(maxsize=None)
def _grid(levels: tuple[int, ...]) -> np.ndarray:
    pts = np.array(list(itertools.product(*(range(s) for s in levels))), dtype=np.int64)
    pts.setflags(write=False)
    return pts


@lru_cache(maxsize=None)
def _norms(levels: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    pts = _grid(levels)
    n0 = np.count_nonzero(pts, axis=1).reshape(levels)
    n1 = pts.sum(axis=1).reshape(levels)
    n0.setflags(write=False)
    n1.setflags(write=False)
    return n0, n1


@dataclass(frozen=True)
class MultiIndex:
    t: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "t", tuple(int(v) for v in self.t))
        if any(v < 0 for v in self.t):
            raise ValidationError(f"multi-index entries must be >= 0, got {self.t}")

    @property
    def norm0(self) -> int:
        return sum(1 for v in self.t if v)

    @property
    def norm1(self) -> int:
        return sum(self.t)

    def label(self) -> str:
        return format_index(self.t)


def format_index(t: Sequence[int], levels: Sequence[int] | None = None) -> str:
    """``(1, 1, 2)`` -> ``"112"``; comma separated once any level count exceeds 10."""
    wide = any(v >= 10 for v in t) if levels is None else any(s > 10 for s in levels)
    return ",".join(str(v) for v in t) if wide else "".join(str(v) for v in t)


@dataclass(frozen=True, eq=False)
class Design:
    """A multiset of runs in ``space``; run order is kept but never significant."""

    space: DesignSpace
    runs: np.ndarray = field(repr=False)

    def __post_init__(self):
        runs = np.asarray(self.runs, dtype=np.int64)
        if runs.size == 0:
            runs = runs.reshape(0, self.space.k)
        if runs.ndim != 2 or runs.shape[1] != self.space.k:
            raise ShapeError(
                f"runs must be an (n, {self.space.k}) array, got shape {runs.shape}"
            )
        bad = (runs < 0) | (runs >= np.array(self.space.levels))
        if bad.any():
            row = int(np.argwhere(bad)[0][0])
            raise ValidationError(
                f"run {row} {tuple(runs[row])} is outside levels {self.space.levels}"
            )
        runs = runs.copy()
        runs.setflags(write=False)
        object.__setattr__(self, "runs", runs)

    @classmethod
    def from_runs(cls, levels: Iterable[int], runs) -> "Design":
        return cls(DesignSpace(tuple(levels)), np.asarray(runs))

    @property
    def n(self) -> int:
        return self.runs.shape[0]

    def counts(self) -> np.ndarray:
        """Multiplicity of every grid point, shaped ``space.levels``."""
        out = np.zeros(self.space.levels, dtype=np.int64)
        np.add.at(out, tuple(self.runs.T), 1)
        return out

    def sorted_runs(self) -> np.ndarray:
        if self.n == 0:
            return self.runs
        order = np.lexsort(self.runs.T[::-1])
        return self.runs[order]

    def same_runs(self, other: "Design") -> bool:
        """Multiset equality of runs (exact, integer)."""
        return (
            self.space == other.space
            and self.n == other.n
            and np.array_equal(self.sorted_runs(), other.sorted_runs())
        )

    def __len__(self):
        return self.n


@dataclass(frozen=True, eq=False)
class FactorBasis:
    """Contrast table of one factor: ``table[j, x] = C_j(x)``."""

    s: int
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        table = np.asarray(self.table, dtype=float)
        if table.shape != (self.s, self.s):
            raise ShapeError(f"contrast table must be {self.s}x{self.s}, got {table.shape}")
        table = table.copy()
        table.setflags(write=False)
        object.__setattr__(self, "table", table)


def build_opb(s: int) -> FactorBasis:
    """Orthogonal polynomial contrasts on ``{0, ..., s-1}`` with uniform weight.

    Built with the monic three-term recurrence
    ``p_{j+1} = (x - a_j) p_j - b_j p_{j-1}``, each row scaled so that
    ``sum_x C_j(x)^2 = s`` and signed so that ``C_j(s-1) > 0``.
    """
    return _opb_cached(_check_level_count(s))


def _check_level_count(s) -> int:
    if int(s) != s or s < 2:
        raise InvalidLevelCount(f"level count must be an integer >= 2, got {s}")
    return int(s)


@lru_cache(maxsize=None)
def _opb_cached(s: int) -> FactorBasis:
    x = np.arange(s, dtype=float)
    polys = [np.ones(s)]
    prev = np.zeros(s)
    for j in range(s - 1):
        p = polys[-1]
        pp = p @ p
        a = (x * p) @ p / pp
        b = pp / (prev @ prev) if j > 0 else 0.0
        nxt = (x - a) * p - b * prev
        prev = p
        polys.append(nxt)
    table = np.empty((s, s))
    table[0] = 1.0
    for j in range(1, s):
        p = polys[j]
        p = p * np.sqrt(s / (p @ p))
        if p[-1] < 0:
            p = -p
        table[j] = p
    return FactorBasis(s, table)


@dataclass(frozen=True, eq=False)
class ContrastBasis:
    space: DesignSpace
    factors: tuple[FactorBasis, ...]

    def __post_init__(self):
        factors = tuple(self.factors)
        if len(factors) != self.space.k:
            raise ShapeError(f"need {self.space.k} factor bases, got {len(factors)}")
        for i, (fb, s) in enumerate(zip(factors, self.space.levels)):
            if fb.s != s:
                raise ShapeError(f"factor {i} has {s} levels but its basis has {fb.s}")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def opb(cls, space: DesignSpace) -> "ContrastBasis":
        return cls(space, tuple(build_opb(s) for s in space.levels))

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense ``N x N`` matrix ``M[t, x] = C_t(x)``; only sensible for small spaces."""
        m = np.ones((1, 1))
        for fb in self.factors:
            m = np.kron(m, fb.table)
        return m

    def contrast_value(self, t: Sequence[int], x: Sequence[int]) -> float:
        return contrast_value(self, t, x)


def opb_basis(space: DesignSpace) -> ContrastBasis:
    return _opb_basis_cached(space)


@lru_cache(maxsize=256)
def _opb_basis_cached(space: DesignSpace) -> ContrastBasis:
    return ContrastBasis.opb(space)


def contrast_value(basis: ContrastBasis, t: Sequence[int], x: Sequence[int]) -> float:
    """``C_t(x) = prod_i C_{t_i}(x_i)``."""
    k = basis.space.k
    if len(t) != k or len(x) != k:
        raise ShapeError(f"t and x must both have {k} entries")
    basis.space.check_point(t, "multi-index")
    basis.space.check_point(x)
    out = 1.0
    for fb, ti, xi in zip(basis.factors, t, x):
        out *= fb.table[ti, xi]
    return float(out)


@dataclass(frozen=True)
class BasisReport:
    factor_deviation: float
    tensor_deviation: float
    tol: float

    @property
    def max_deviation(self) -> float:
        return max(self.factor_deviation, self.tensor_deviation)

    @property
    def ok(self) -> bool:
        return self.max_deviation < self.tol


def verify_basis(basis: ContrastBasis, tol: float = DEFAULT_TOL) -> BasisReport:
    """Check per-factor orthogonality and tensor orthogonality over the grid.

    The tensor check uses the Kronecker structure, so it costs ``O(sum s_i^3)``
    rather than ``O(N^3)``.
    """
    fdev = 0.0
    for fb in basis.factors:
        gram = fb.table @ fb.table.T
        fdev = max(fdev, float(np.abs(gram - fb.s * np.eye(fb.s)).max()))
    if basis.space.N <= 4096:
        m = basis.matrix
        tdev = float(np.abs(m @ m.T - basis.space.N * np.eye(basis.space.N)).max())
    else:
        # Gram of a Kronecker product is the Kronecker product of the Grams, so
        # diagonal and off-diagonal extremes factor through the per-factor Grams.
        grams = [fb.table @ fb.table.T for fb in basis.factors]
        diag = np.ones(1)
        for g in grams:
            diag = np.kron(diag, np.diag(g))
        tdev = float(np.abs(diag - basis.space.N).max())
        absmax = [float(np.abs(g).max()) for g in grams]
        for i, g in enumerate(grams):
            off = float(np.abs(g - np.diag(np.diag(g))).max())
            rest = float(np.prod([a for j, a in enumerate(absmax) if j != i]))
            tdev = max(tdev, off * rest)
    return BasisReport(fdev, tdev, tol)
