"""Geometric and combinatorial isomorphism of designs.

A geometric transform keeps the grid: it exchanges factors with equal level
counts and may reverse the level order (``x -> s-1-x``) of any factor. A
combinatorial transform allows any per-factor level permutation instead of
just reversal. Decisions are made by exact integer multiset comparison.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from qfdesign.basis import DEFAULT_TOL, Design, DesignSpace
from qfdesign.errors import ShapeError
from qfdesign.indicator import CoefficientTable


@dataclass(frozen=True)
class GeomTransform:
    """Slot ``l`` of the image takes source factor ``factor_perm[l]``, reversed if ``reversals[l]``."""

    factor_perm: tuple[int, ...]
    reversals: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "factor_perm", tuple(int(i) for i in self.factor_perm))
        object.__setattr__(self, "reversals", tuple(int(bool(j)) for j in self.reversals))
        if sorted(self.factor_perm) != list(range(len(self.factor_perm))):
            raise ShapeError(f"{self.factor_perm} is not a permutation")
        if len(self.reversals) != len(self.factor_perm):
            raise ShapeError("factor_perm and reversals differ in length")

    @classmethod
    def identity(cls, k: int) -> "GeomTransform":
        return cls(tuple(range(k)), (0,) * k)

    def inverse(self) -> "GeomTransform":
        k = len(self.factor_perm)
        perm = [0] * k
        rev = [0] * k
        for l, i in enumerate(self.factor_perm):
            perm[i] = l
            rev[i] = self.reversals[l]
        return GeomTransform(tuple(perm), tuple(rev))

    def then(self, other: "GeomTransform") -> "GeomTransform":
        """Transform equal to applying ``self`` first and ``other`` second."""
        p, j = self.factor_perm, self.reversals
        perm = tuple(p[i] for i in other.factor_perm)
        rev = tuple(other.reversals[l] ^ j[i] for l, i in enumerate(other.factor_perm))
        return GeomTransform(perm, rev)

    def describe(self) -> str:
        parts = []
        for l, (i, j) in enumerate(zip(self.factor_perm, self.reversals)):
            parts.append(f"x{l + 1}<-{'rev ' if j else ''}x{i + 1}")
        return ", ".join(parts)


@dataclass(frozen=True)
class CombTransform:
    """Slot ``l`` of the image takes ``level_perms[l][x]`` for source value ``x`` of ``factor_perm[l]``."""

    factor_perm: tuple[int, ...]
    level_perms: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "factor_perm", tuple(int(i) for i in self.factor_perm))
        object.__setattr__(
            self, "level_perms", tuple(tuple(int(v) for v in p) for p in self.level_perms)
        )
        if sorted(self.factor_perm) != list(range(len(self.factor_perm))):
            raise ShapeError(f"{self.factor_perm} is not a permutation")
        if len(self.level_perms) != len(self.factor_perm):
            raise ShapeError("one level permutation per factor is required")
        for p in self.level_perms:
            if sorted(p) != list(range(len(p))):
                raise ShapeError(f"{p} is not a level permutation")

    @classmethod
    def from_geom(cls, g: GeomTransform, space: DesignSpace) -> "CombTransform":
        perms = []
        for i, j in zip(g.factor_perm, g.reversals):
            s = space.levels[i]
            perms.append(tuple(range(s - 1, -1, -1)) if j else tuple(range(s)))
        return cls(g.factor_perm, tuple(perms))

    def describe(self) -> str:
        parts = []
        for l, (i, p) in enumerate(zip(self.factor_perm, self.level_perms)):
            src = f"x{i + 1}"
            if p != tuple(range(len(p))):
                lv = ",".join(map(str, range(len(p))))
                src = f"{{{lv}}}->{{{','.join(map(str, p))}}} on {src}"
            parts.append(f"x{l + 1}<-{src}")
        return ", ".join(parts)


def _permuted_space(space: DesignSpace, perm: Sequence[int]) -> DesignSpace:
    if len(perm) != space.k:
        raise ShapeError(f"transform has {len(perm)} slots, design has {space.k} factors")
    return DesignSpace(tuple(space.levels[i] for i in perm))


def apply_geom(design: Design, g: GeomTransform) -> Design:
    space = _permuted_space(design.space, g.factor_perm)
    runs = design.runs[:, list(g.factor_perm)].copy()
    for l, j in enumerate(g.reversals):
        if j:
            runs[:, l] = space.levels[l] - 1 - runs[:, l]
    return Design(space, runs)


def apply_comb(design: Design, c: CombTransform) -> Design:
    space = _permuted_space(design.space, c.factor_perm)
    runs = design.runs[:, list(c.factor_perm)].copy()
    for l, p in enumerate(c.level_perms):
        if len(p) != space.levels[l]:
            raise ShapeError(f"level permutation {p} does not fit {space.levels[l]} levels")
        runs[:, l] = np.asarray(p)[runs[:, l]]
    return Design(space, runs)


def _factor_perms(src_levels: Sequence[int], dst_levels: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Permutations ``p`` with ``src_levels[p[l]] == dst_levels[l]`` for every slot."""
    k = len(dst_levels)

    def rec(l, used, acc):
        if l == k:
            yield tuple(acc)
            return
        for i in range(k):
            if i not in used and src_levels[i] == dst_levels[l]:
                used.add(i)
                acc.append(i)
                yield from rec(l + 1, used, acc)
                acc.pop()
                used.discard(i)

    yield from rec(0, set(), [])


def geom_transforms(space: DesignSpace) -> Iterator[GeomTransform]:
    """Every geometric transform of ``space`` onto itself."""
    k = space.k
    for perm in _factor_perms(space.levels, space.levels):
        for rev in itertools.product((0, 1), repeat=k):
            yield GeomTransform(perm, rev)


def _sorted_codes(cols: np.ndarray, levels: Sequence[int]) -> np.ndarray:
    weights = np.ones(len(levels), dtype=np.int64)
    for i in range(len(levels) - 2, -1, -1):
        weights[i] = weights[i + 1] * levels[i + 1]
    return np.sort(cols @ weights[: cols.shape[1]])


def _find_witness(
    A: Design, B: Design, level_maps: Callable[[int], list[tuple[int, ...]]]
):
    """Backtracking search for (factor perm, level maps) sending B onto A.

    Slots are filled left to right; a partial assignment survives only while
    the transformed prefix columns of B equal A's prefix as a multiset.
    """
    if A.n != B.n or sorted(A.space.levels) != sorted(B.space.levels):
        return None
    k = A.space.k
    la, lb = A.space.levels, B.space.levels
    targets = [_sorted_codes(A.runs[:, : l + 1], la[: l + 1]) for l in range(k)]
    cols = np.empty((B.n, k), dtype=np.int64)
    perm: list[int] = []
    maps: list[tuple[int, ...]] = []
    used = [False] * k

    def rec(l):
        if l == k:
            return True
        for i in range(k):
            if used[i] or lb[i] != la[l]:
                continue
            src = B.runs[:, i]
            for m in level_maps(la[l]):
                cols[:, l] = np.asarray(m)[src]
                if np.array_equal(_sorted_codes(cols[:, : l + 1], la[: l + 1]), targets[l]):
                    used[i] = True
                    perm.append(i)
                    maps.append(m)
                    if rec(l + 1):
                        return True
                    used[i] = False
                    perm.pop()
                    maps.pop()
        return False

    if rec(0):
        return tuple(perm), tuple(maps)
    return None


def _reversal_maps(s: int) -> list[tuple[int, ...]]:
    return [tuple(range(s)), tuple(range(s - 1, -1, -1))]


def _all_level_maps(s: int) -> list[tuple[int, ...]]:
    return list(itertools.permutations(range(s)))


def geom_isomorphic(A: Design, B: Design) -> GeomTransform | None:
    """A witness ``g`` with ``apply_geom(B, g)`` equal to ``A``, or ``None``."""
    found = _find_witness(A, B, _reversal_maps)
    if found is None:
        return None
    perm, maps = found
    rev = tuple(int(m[0] != 0) for m in maps)
    return GeomTransform(perm, rev)


def comb_isomorphic(A: Design, B: Design) -> CombTransform | None:
    """A witness ``c`` with ``apply_comb(B, c)`` equal to ``A``, or ``None``."""
    found = _find_witness(A, B, _all_level_maps)
    if found is None:
        return None
    return CombTransform(*found)


def check_transform_relation(
    cA: CoefficientTable, cB: CoefficientTable, g: GeomTransform, tol: float = DEFAULT_TOL
) -> bool:
    """Coefficient-side test that ``apply_geom(B, g)`` and ``A`` coincide.

    With slot ``l`` drawn from factor ``p_l`` of B and reversed when ``j_l = 1``,
    ``b_A[t] = prod_l (-1)^(j_l t_l) * b_B[t']`` where ``t'[p_l] = t_l``. Relies
    on reflection parity of the contrasts, so both tables must use an OPB.
    """
    if len(g.factor_perm) != cB.space.k:
        return False
    try:
        target = _permuted_space(cB.space, g.factor_perm)
    except ShapeError:
        return False
    if target != cA.space:
        return False
    moved = np.transpose(cB.values, g.factor_perm).copy()
    for l, j in enumerate(g.reversals):
        if j:
            sign = (-1.0) ** np.arange(cA.space.levels[l])
            shape = [1] * cA.space.k
            shape[l] = -1
            moved *= sign.reshape(shape)
    return bool(np.abs(moved - cA.values).max() <= tol)


def canonical_key(design: Design) -> tuple[int, ...]:
    """Smallest sorted run-code list over all geometric transforms of ``design``.

    Two designs on one space are geometrically isomorphic iff their keys match.
    """
    space = design.space
    levels = space.levels
    k = space.k
    flips = np.array(list(itertools.product((0, 1), repeat=k)), dtype=bool)
    top = np.array(levels) - 1
    weights = np.ones(k, dtype=np.int64)
    for i in range(k - 2, -1, -1):
        weights[i] = weights[i + 1] * levels[i + 1]
    best = None
    for perm in _factor_perms(levels, levels):
        base = design.runs[:, list(perm)]
        # (2^k, n, k): every reversal pattern at once
        images = np.where(flips[:, None, :], top - base[None, :, :], base[None, :, :])
        codes = np.sort(images @ weights, axis=1)
        order = np.lexsort(codes.T[::-1])
        cand = tuple(int(v) for v in codes[order[0]])
        if best is None or cand < best:
            best = cand
    return best


def decode(space: DesignSpace, codes: Sequence[int]) -> Design:
    codes = np.asarray(codes, dtype=np.int64)
    runs = np.empty((len(codes), space.k), dtype=np.int64)
    for i in range(space.k - 1, -1, -1):
        runs[:, i] = codes % space.levels[i]
        codes = codes // space.levels[i]
    return Design(space, runs)


@dataclass(frozen=True, eq=False)
class GeometricClass:
    representative: Design
    members: tuple[int, ...]
    key: tuple[int, ...] = field(repr=False)


def classify_geometric(designs: Sequence[Design]) -> list[GeometricClass]:
    """Partition ``designs`` into geometric isomorphism classes.

    Classes are ordered by canonical key, members by input position, so the
    result does not depend on how the keys were computed.
    """
    if not designs:
        return []
    space = designs[0].space
    for d in designs:
        if d.space != space:
            raise ShapeError("all designs must share one space")
    groups: dict[tuple[int, ...], list[int]] = {}
    for idx, d in enumerate(designs):
        groups.setdefault(canonical_key(d), []).append(idx)
    return [
        GeometricClass(decode(space, key), tuple(members), key)
        for key, members in sorted(groups.items())
    ]


def group_geometric(designs: Sequence[Design]) -> list[list[int]]:
    """Group designs by pairwise witness search against each group's first member.

    Cheaper than :func:`classify_geometric` for many factors since it never
    enumerates the whole transform group.
    """
    groups: list[list[int]] = []
    for idx, d in enumerate(designs):
        for g in groups:
            if geom_isomorphic(designs[g[0]], d) is not None:
                g.append(idx)
                break
        else:
            groups.append([idx])
    return groups
