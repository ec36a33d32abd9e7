"""Products of one-factor contrasts and correlation of contrast pairs on a design."""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from qfdesign.basis import FactorBasis, build_opb
from qfdesign.errors import ShapeError, ValidationError
from qfdesign.indicator import CoefficientTable


def structure_constants(fb: FactorBasis) -> np.ndarray:
    """``h[u, v, w]`` with ``C_u(x) C_v(x) = sum_w h[u, v, w] C_w(x)`` on the grid."""
    c = fb.table
    return np.einsum("ux,vx,wx->uvw", c, c, c) / fb.s


@lru_cache(maxsize=None)
def opb_structure_constants(s: int) -> np.ndarray:
    h = structure_constants(build_opb(s))
    h.setflags(write=False)
    return h


def _check_index(coeffs: CoefficientTable, t: Sequence[int], name: str) -> tuple[int, ...]:
    t = tuple(int(v) for v in t)
    if len(t) != coeffs.space.k:
        raise ShapeError(f"{name} has {len(t)} entries, expected {coeffs.space.k}")
    for v, s in zip(t, coeffs.space.levels):
        if not 0 <= v < s:
            raise ValidationError(f"{name} = {t} is out of range for levels {coeffs.space.levels}")
    return t


def contrast_correlation(
    coeffs: CoefficientTable,
    u: Sequence[int],
    v: Sequence[int],
    sc: Sequence[np.ndarray] | None = None,
) -> float:
    """``(1/N) sum_{x in A} C_u(x) C_v(x) / b_0`` expressed through the ``b_w``.

    ``sc`` holds one structure-constant cube per factor; it defaults to the
    cubes of the table's own basis.
    """
    u = _check_index(coeffs, u, "u")
    v = _check_index(coeffs, v, "v")
    if sc is None:
        sc = [structure_constants(fb) for fb in coeffs.basis.factors]
    b = coeffs.normalized()
    # contract each w_i axis with h^{(i, u_i, v_i)}
    for h, ui, vi in zip(sc, u, v):
        b = np.tensordot(h[ui, vi], b, axes=([0], [0]))
    return float(b)


def disjoint(u: Sequence[int], v: Sequence[int]) -> bool:
    return all(min(a, b) == 0 for a, b in zip(u, v))
