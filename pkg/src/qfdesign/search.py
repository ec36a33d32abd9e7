"""Projection and level-permutation search over a parent orthogonal array.

Columns of the parent are projected, each chosen column gets one level
permutation from a set of representatives (one per pair ``{p, reverse o p}``),
and variants are ranked by their beta wordlength pattern.
"""

from __future__ import annotations

import itertools
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property, cmp_to_key, lru_cache
from typing import Iterator, Sequence

import numpy as np

from qfdesign.aberration import WLP_TOL, WordlengthPattern, beta_wlp, compare_wlp, resolution
from qfdesign.basis import Design, DesignSpace
from qfdesign.errors import InvalidSize, ValidationError
from qfdesign.indicator import coefficients, project

L18_ROWS = (
    (0, 0, 0, 0, 0, 0, 0, 0),
    (0, 0, 1, 1, 1, 1, 1, 1),
    (0, 0, 2, 2, 2, 2, 2, 2),
    (0, 1, 0, 0, 1, 1, 2, 2),
    (0, 1, 1, 1, 2, 2, 0, 0),
    (0, 1, 2, 2, 0, 0, 1, 1),
    (0, 2, 0, 1, 0, 2, 1, 2),
    (0, 2, 1, 2, 1, 0, 2, 0),
    (0, 2, 2, 0, 2, 1, 0, 1),
    (1, 0, 0, 2, 2, 1, 1, 0),
    (1, 0, 1, 0, 0, 2, 2, 1),
    (1, 0, 2, 1, 1, 0, 0, 2),
    (1, 1, 0, 1, 2, 0, 2, 1),
    (1, 1, 1, 2, 0, 1, 0, 2),
    (1, 1, 2, 0, 1, 2, 1, 0),
    (1, 2, 0, 2, 1, 2, 0, 1),
    (1, 2, 1, 0, 2, 0, 1, 2),
    (1, 2, 2, 1, 0, 1, 2, 0),
)

# one column set per combinatorial class of three-level projections of L18
L18_COMBINATORIAL_CLASSES = {
    "18-3.1": (1, 2, 3),
    "18-3.2": (1, 2, 5),
    "18-3.3": (1, 3, 4),
    "18-4.1": (2, 3, 4, 5),
    "18-4.2": (1, 2, 3, 6),
    "18-4.3": (1, 2, 3, 4),
    "18-4.4": (1, 2, 5, 6),
}

_THREE_LEVEL_LABELS = {(0, 1, 2): "I", (1, 2, 0): "u", (2, 0, 1): "u2"}
_LABEL_PERMS = {v: k for k, v in _THREE_LEVEL_LABELS.items()}


def builtin_l18() -> Design:
    return Design(DesignSpace((2,) + (3,) * 7), np.array(L18_ROWS))


def get_parent(name: str) -> Design:
    if name.lower() == "l18":
        return builtin_l18()
    raise KeyError(f"no built-in parent array named {name!r}")


def _parity(p: Sequence[int]) -> int:
    inversions = sum(1 for i, j in itertools.combinations(range(len(p)), 2) if p[i] > p[j])
    return inversions % 2


@lru_cache(maxsize=None)
def level_permutation_reps(s: int) -> tuple[tuple[int, ...], ...]:
    """One level permutation from each pair ``{p, r o p}`` with ``r(x) = s-1-x``.

    When the reversal is an odd permutation the even member of each pair is
    kept (for ``s = 3`` this is ``I, u, u^2``); otherwise the lexicographically
    smaller member.
    """
    if s < 2:
        raise ValidationError(f"level count must be >= 2, got {s}")
    perms = list(itertools.permutations(range(s)))
    if (s // 2) % 2 == 1:
        return tuple(p for p in perms if _parity(p) == 0)
    return tuple(p for p in perms if p <= tuple(s - 1 - v for v in p))


def perm_label(p: Sequence[int]) -> str:
    p = tuple(p)
    if p == tuple(range(len(p))):
        return "I"
    if p in _THREE_LEVEL_LABELS:
        return _THREE_LEVEL_LABELS[p]
    return "p" + "".join(str(v) for v in p)


def parse_perm_label(label: str, s: int) -> tuple[int, ...]:
    label = label.replace("²", "2").replace("^", "")
    if label in ("", "I"):
        return tuple(range(s))
    if s == 3 and label in _LABEL_PERMS:
        return _LABEL_PERMS[label]
    if label.startswith("p") and len(label) == s + 1:
        p = tuple(int(c) for c in label[1:])
        if sorted(p) == list(range(s)):
            return p
    raise ValidationError(f"unknown level permutation {label!r} for {s} levels")


def variant_label(columns: Sequence[int], perms: Sequence[Sequence[int]]) -> str:
    out = []
    for c, p in zip(columns, perms):
        lab = perm_label(p)
        out.append(str(c) if lab == "I" else f"{c}{lab}")
    return " ".join(out)


_TOKEN = re.compile(r"^(\d+)(.*)$")


def parse_variant(text: str, parent: Design) -> tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]:
    """``"1u2 2 5"`` -> columns ``(1, 2, 5)`` and their level permutations."""
    columns, perms = [], []
    for tok in text.split():
        m = _TOKEN.match(tok)
        if not m:
            raise ValidationError(f"cannot read column token {tok!r}")
        c = int(m.group(1))
        if not 0 <= c < parent.space.k:
            raise ValidationError(f"column {c} out of range")
        columns.append(c)
        perms.append(parse_perm_label(m.group(2), parent.space.levels[c]))
    return tuple(columns), tuple(perms)


def realize(parent: Design, columns: Sequence[int], perms: Sequence[Sequence[int]]) -> Design:
    """Project onto ``columns`` and relabel each column's levels by its permutation."""
    proj = project(parent, columns)
    runs = proj.runs.copy()
    for l, p in enumerate(perms):
        runs[:, l] = np.asarray(p)[runs[:, l]]
    return Design(proj.space, runs)


@dataclass(frozen=True, eq=False)
class Variant:
    parent_id: str
    columns: tuple[int, ...]
    perms: tuple[tuple[int, ...], ...]
    design: Design = field(repr=False)

    @cached_property
    def beta(self) -> WordlengthPattern:
        return beta_wlp(coefficients(self.design))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(perm_label(p) for p in self.perms)

    @property
    def label(self) -> str:
        return variant_label(self.columns, self.perms)

    def resolution(self, tol: float = WLP_TOL):
        return resolution(self.beta, tol)

    def tie_key(self) -> tuple:
        reps = [level_permutation_reps(len(p)) for p in self.perms]
        ranks = tuple(r.index(p) if p in r else len(r) for r, p in zip(reps, self.perms))
        return (self.columns, ranks)


def make_variant(parent: Design, columns, perms, parent_id: str = "parent") -> Variant:
    columns = tuple(int(c) for c in columns)
    perms = tuple(tuple(p) for p in perms)
    return Variant(parent_id, columns, perms, realize(parent, columns, perms))


def enumerate_variants(
    parent: Design, columns: Sequence[int], parent_id: str = "parent"
) -> Iterator[Variant]:
    """All representative permutation assignments of ``columns``, last column fastest."""
    columns = tuple(int(c) for c in columns)
    reps = [level_permutation_reps(parent.space.levels[c]) for c in columns]
    for perms in itertools.product(*reps):
        yield make_variant(parent, columns, perms, parent_id)


@dataclass(frozen=True)
class SearchConfig:
    size: int
    include_two_level: bool = False
    tol: float = WLP_TOL
    full_ranking: bool = False
    workers: int = 1


def candidate_subsets(parent: Design, m: int, include_two_level: bool = False):
    levels = parent.space.levels
    two = tuple(i for i, s in enumerate(levels) if s == 2)
    free = tuple(i for i, s in enumerate(levels) if s != 2)
    forced = two if include_two_level else ()
    n_free = m - len(forced)
    if m < 1 or n_free < 0 or n_free > len(free) or (include_two_level and n_free < 0):
        raise InvalidSize(
            f"size {m} is impossible: {len(free)} free columns"
            + (f" plus {len(forced)} forced two-level columns" if forced else "")
        )
    for combo in itertools.combinations(free, n_free):
        yield tuple(sorted(forced + combo))


def _rank_cmp(tol: float):
    def cmp(a: Variant, b: Variant) -> int:
        c = compare_wlp(a.beta, b.beta, tol)
        if c:
            return c
        ka, kb = a.tie_key(), b.tie_key()
        return (ka > kb) - (ka < kb)

    return cmp


def _subset_variants(args):
    parent, columns, parent_id = args
    out = []
    for v in enumerate_variants(parent, columns, parent_id):
        out.append((v.columns, v.perms, v.beta.values))
    return out


def _all_variants(parent: Design, subsets, parent_id: str, workers: int) -> list[Variant]:
    jobs = [(parent, cols, parent_id) for cols in subsets]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_subset_variants, jobs))
        variants = []
        for chunk in chunks:
            for cols, perms, values in chunk:
                v = make_variant(parent, cols, perms, parent_id)
                v.__dict__["beta"] = WordlengthPattern("beta", values)
                variants.append(v)
        return variants
    return [v for job in jobs for v in enumerate_variants(*job)]


def min_aberration_projection(
    parent: Design,
    m: int,
    include_two_level: bool = False,
    *,
    tol: float = WLP_TOL,
    full_ranking: bool = False,
    workers: int = 1,
    parent_id: str = "parent",
) -> list[Variant]:
    """Variants of ``m``-column projections ranked by beta aberration.

    Returns the co-minimal variants (the canonical tie-break winner first), or
    every variant in rank order when ``full_ranking`` is set. With
    ``include_two_level`` every two-level column is forced into the projection.
    """
    subsets = list(candidate_subsets(parent, m, include_two_level))
    variants = _all_variants(parent, subsets, parent_id, workers)
    ranked = sorted(variants, key=cmp_to_key(_rank_cmp(tol)))
    if full_ranking:
        return ranked
    best = ranked[0].beta
    return [v for v in ranked if compare_wlp(v.beta, best, tol) == 0]


def search(parent: Design, config: SearchConfig, parent_id: str = "parent") -> list[Variant]:
    return min_aberration_projection(
        parent,
        config.size,
        config.include_two_level,
        tol=config.tol,
        full_ranking=config.full_ranking,
        workers=config.workers,
        parent_id=parent_id,
    )
