"""Generalized wordlength patterns, resolution, strength and aberration ranking.

Every pattern groups the squared normalized coefficients ``(b_t / b_0)^2`` of
``t != 0`` into ordered classes and sums within each class:

* ``alpha``: classes by number of active factors ``||t||_0``
* ``beta``: classes by polynomial degree ``||t||_1``
* ``deg-card``: classes ``(||t||_1, ||t||_0)`` ordered degree first
* ``card-deg``: classes ``(||t||_0, ||t||_1)`` ordered factor count first
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from qfdesign.basis import DEFAULT_TOL
from qfdesign.errors import ShapeError
from qfdesign.indicator import CoefficientTable

WLP_TOL = 1e-6

SCHEMES = ("alpha", "beta", "deg-card", "card-deg")
Scheme = Literal["alpha", "beta", "deg-card", "card-deg"]

_SCHEME_ALIASES = {
    "a": "deg-card",
    "degree-then-cardinality": "deg-card",
    "b": "card-deg",
    "cardinality-then-degree": "card-deg",
}

FULL = "full"


@dataclass(frozen=True, eq=False)
class WordlengthPattern:
    scheme: str
    values: np.ndarray
    # labels[i] is the class value(s) summed in values[i]: an int for alpha and
    # beta, a (first key, second key) pair for the combined schemes
    labels: tuple = field(default=())

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(1, len(values) + 1)))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def by_label(self, label) -> float:
        return float(self.values[self.labels.index(label)])

    def window(self, first: int, last: int) -> tuple[float, ...]:
        """Entries with labels ``first..last`` (1-based, inclusive) for alpha/beta."""
        return tuple(float(self.values[i - 1]) for i in range(first, last + 1))

    @property
    def total(self) -> float:
        return float(self.values.sum())


def _normalize_scheme(scheme: str) -> str:
    scheme = _SCHEME_ALIASES.get(scheme, scheme)
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; choose one of {SCHEMES}")
    return scheme


def _squares(coeffs: CoefficientTable) -> np.ndarray:
    sq = coeffs.normalized() ** 2
    sq[(0,) * coeffs.space.k] = 0.0
    return sq


def alpha_wlp(coeffs: CoefficientTable) -> WordlengthPattern:
    sq = _squares(coeffs)
    k = coeffs.space.k
    vals = np.bincount(coeffs.space.norm0().ravel(), weights=sq.ravel(), minlength=k + 1)
    return WordlengthPattern("alpha", vals[1:])


def beta_wlp(coeffs: CoefficientTable) -> WordlengthPattern:
    sq = _squares(coeffs)
    K = coeffs.space.K
    vals = np.bincount(coeffs.space.norm1().ravel(), weights=sq.ravel(), minlength=K + 1)
    return WordlengthPattern("beta", vals[1:])


def custom_wlp(coeffs: CoefficientTable, scheme: str) -> WordlengthPattern:
    """Combined orderings; ``scheme`` is ``deg-card`` (a) or ``card-deg`` (b)."""
    scheme = _normalize_scheme(scheme)
    if scheme == "alpha":
        return alpha_wlp(coeffs)
    if scheme == "beta":
        return beta_wlp(coeffs)
    sq = _squares(coeffs).ravel()
    n0 = coeffs.space.norm0().ravel()
    n1 = coeffs.space.norm1().ravel()
    keys = np.stack([n1, n0] if scheme == "deg-card" else [n0, n1], axis=1)
    nz = n0 > 0
    classes, inverse = np.unique(keys[nz], axis=0, return_inverse=True)
    vals = np.bincount(inverse.ravel(), weights=sq[nz], minlength=len(classes))
    labels = tuple((int(a), int(b)) for a, b in classes)
    return WordlengthPattern(scheme, vals, labels)


def wordlength_pattern(coeffs: CoefficientTable, scheme: str = "beta") -> WordlengthPattern:
    return custom_wlp(coeffs, scheme)


def resolution(wlp: WordlengthPattern, tol: float = WLP_TOL):
    """Label of the first entry above ``tol``, or ``"full"`` if there is none.

    For the combined schemes this is the first class label (a pair).
    """
    for label, v in zip(wlp.labels, wlp.values):
        if v > tol:
            return label
    return FULL


def strength(coeffs: CoefficientTable, tol: float = DEFAULT_TOL) -> int:
    """Largest ``t`` with ``alpha_1 .. alpha_t`` all within ``tol`` of zero."""
    alpha = alpha_wlp(coeffs).values
    t = 0
    for v in alpha:
        if v > tol:
            break
        t += 1
    return t


def compare_wlp(a: WordlengthPattern, b: WordlengthPattern, tol: float = WLP_TOL) -> int:
    """Lexicographic comparison: -1 if ``a`` has less aberration, 0 if tied, 1 if more."""
    if a.scheme != b.scheme or len(a) != len(b):
        raise ShapeError(
            f"cannot compare {a.scheme}[{len(a)}] with {b.scheme}[{len(b)}]"
        )
    for x, y in zip(a.values, b.values):
        if abs(x - y) <= tol:
            continue
        return -1 if x < y else 1
    return 0


def roman(r) -> str:
    if r == FULL:
        return FULL
    numerals = [(10, "X"), (9, "IX"), (5, "V"), (4, "IV"), (1, "I")]
    out, n = "", int(r)
    for value, sym in numerals:
        while n >= value:
            out += sym
            n -= value
    return out
