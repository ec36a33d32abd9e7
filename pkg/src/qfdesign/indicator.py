"""Indicator-function coefficients of a design in an orthonormal contrast basis."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from qfdesign.basis import (
    DEFAULT_TOL,
    ContrastBasis,
    Design,
    DesignSpace,
    format_index,
    opb_basis,
)
from qfdesign.errors import (
    EmptyDesign,
    InconsistentCoefficients,
    InvalidProjection,
    ShapeError,
)

ROUNDING_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """Dense map ``t -> b_t``; ``values[t]`` indexes with a multi-index tuple."""

    space: DesignSpace
    basis: ContrastBasis = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.space.levels:
            raise ShapeError(f"coefficient tensor must have shape {self.space.levels}")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def b0(self) -> float:
        return float(self.values[(0,) * self.space.k])

    def __getitem__(self, t) -> float:
        return float(self.values[tuple(t)])

    def normalized(self) -> np.ndarray:
        """``b_t / b_0`` as a tensor; raises on an empty design."""
        b0 = self.b0
        if abs(b0) < DEFAULT_TOL:
            raise EmptyDesign("b_0 is zero: the design has no runs")
        return self.values / b0

    def nonzero(self, tol: float = DEFAULT_TOL) -> list[tuple[tuple[int, ...], float]]:
        """``(t, b_t)`` pairs with ``|b_t| > tol`` in enumeration order."""
        idx = np.argwhere(np.abs(self.values) > tol)
        return [(tuple(int(v) for v in t), float(self.values[tuple(t)])) for t in idx]

    def labelled(self, tol: float = DEFAULT_TOL) -> dict[str, float]:
        return {format_index(t, self.space.levels): b for t, b in self.nonzero(tol)}


def _factor_values(basis: ContrastBasis, runs: np.ndarray) -> list[np.ndarray]:
    # entry i has shape (n, s_i): C_j^i evaluated at each run's i-th coordinate
    return [fb.table[:, runs[:, i]].T for i, fb in enumerate(basis.factors)]


def _tensor_sum(per_factor: list[np.ndarray], levels: tuple[int, ...]) -> np.ndarray:
    """``sum_r prod_i V_i[r, t_i]`` for every multi-index ``t``."""
    n = per_factor[0].shape[0]
    acc = np.ones((n, 1))
    for v in per_factor:
        acc = (acc[:, :, None] * v[:, None, :]).reshape(n, -1)
    return acc.sum(axis=0).reshape(levels)


def coefficients(design: Design, basis: ContrastBasis | None = None) -> CoefficientTable:
    """``b_t = (1/N) sum_{x in A} C_t(x)``, runs counted with multiplicity."""
    space = design.space
    if basis is None:
        basis = opb_basis(space)
    elif basis.space != space:
        raise ShapeError(f"basis is on {basis.space.levels}, design on {space.levels}")
    if design.n == 0:
        return CoefficientTable(space, basis, np.zeros(space.levels))
    # Collapse duplicates first: the work then scales with distinct runs only.
    uniq, mult = np.unique(design.runs, axis=0, return_counts=True)
    vals = _factor_values(basis, uniq)
    vals[0] = vals[0] * mult[:, None]
    return CoefficientTable(space, basis, _tensor_sum(vals, space.levels) / space.N)


def indicator_values(coeffs: CoefficientTable) -> np.ndarray:
    """``sum_t b_t C_t(x)`` at every grid point, unrounded, shaped ``levels``."""
    out = coeffs.values
    for fb in coeffs.basis.factors:
        # contract the leading t axis with C[t, x]; the x axis is appended last
        out = np.tensordot(out, fb.table, axes=([0], [0]))
    return out


def evaluate_indicator(
    coeffs: CoefficientTable, x: Sequence[int], tol: float = ROUNDING_TOL
) -> int:
    """Run count of ``x`` recovered from the coefficient expansion."""
    x = coeffs.space.check_point(x)
    vec = coeffs.values
    for fb, xi in zip(coeffs.basis.factors, x):
        vec = np.tensordot(fb.table[:, xi], vec, axes=([0], [0]))
    val = float(vec)
    count = round(val)
    if abs(val - count) >= tol or count < 0:
        raise InconsistentCoefficients(
            f"F({x}) = {val!r} is not a nonnegative integer within {tol}"
        )
    return int(count)


def reconstruct(coeffs: CoefficientTable, tol: float = ROUNDING_TOL) -> Design:
    """Invert :func:`coefficients`: rebuild the run multiset from ``b_t``."""
    vals = indicator_values(coeffs)
    counts = np.rint(vals)
    if np.abs(vals - counts).max(initial=0.0) >= tol or (counts < 0).any():
        raise InconsistentCoefficients("coefficients do not expand to integer counts")
    pts = coeffs.space.points()
    runs = np.repeat(pts, counts.astype(np.int64).ravel(), axis=0)
    return Design(coeffs.space, runs)


def combine(designs: Sequence[Design]) -> Design:
    """Concatenate run multisets of designs on one space."""
    if not designs:
        raise ShapeError("nothing to combine")
    space = designs[0].space
    for d in designs[1:]:
        if d.space != space:
            raise ShapeError(f"cannot combine designs on {space.levels} and {d.space.levels}")
    return Design(space, np.concatenate([d.runs for d in designs], axis=0))


def project(design: Design, keep: Sequence[int]) -> Design:
    """Restrict every run to the factors in ``keep`` (in the given order)."""
    keep = [int(i) for i in keep]
    if not keep:
        raise InvalidProjection("projection needs at least one factor")
    if len(set(keep)) != len(keep):
        raise InvalidProjection(f"repeated factor in {keep}")
    if any(i < 0 or i >= design.space.k for i in keep):
        raise InvalidProjection(f"factor index out of range in {keep}")
    levels = tuple(design.space.levels[i] for i in keep)
    return Design(DesignSpace(levels), design.runs[:, keep])


def sum_of_squares(coeffs: CoefficientTable) -> float:
    """``sum_t (b_t / b_0)^2``, including ``t = 0``."""
    return float((coeffs.normalized() ** 2).sum())


def second_moment(design: Design) -> int:
    """``n_2 = sum_x F(x)^2`` by direct counting."""
    return int((design.counts() ** 2).sum())
