"""Recompute the L18 projection tables.

    python3 scripts/reproduce_tables.py [--table classes|three|mixed|all] [--workers N]

``classes`` lists every geometric class of each combinatorial class of
three-level projections with its (b3, b4, b5); ``three`` and ``mixed`` list
minimum beta-aberration projections without and with the two-level column.
"""

from __future__ import annotations

import argparse
import time

from qfdesign.aberration import roman
from qfdesign.isomorphism import classify_geometric, group_geometric
from qfdesign.search import (
    L18_COMBINATORIAL_CLASSES,
    builtin_l18,
    enumerate_variants,
    min_aberration_projection,
)


def _fmt(values) -> str:
    return "(" + ", ".join(f"{v:.6g}" if abs(v) > 1e-12 else "0" for v in values) + ")"


def geometric_classes(l18) -> None:
    print("Geometric classes of three-level L18 projections")
    for name, cols in L18_COMBINATORIAL_CLASSES.items():
        variants = list(enumerate_variants(l18, cols))
        classes = classify_geometric([v.design for v in variants])
        print(f"{name}  columns {cols}: {len(classes)} class(es)")
        for cls in classes:
            v = variants[cls.members[0]]
            print(f"    {v.label:<14} {_fmt(v.beta.window(3, 5))}  [{len(cls.members)} variants]")


def minima(l18, sizes, include_two_level: bool, workers: int) -> None:
    title = "with the two-level column" if include_two_level else "three-level columns only"
    print(f"Minimum beta-aberration projections, {title}")
    print(f"{'m':>2}  {'columns':<22} {'(b3, b4, b5)':<30} res  ties/classes")
    for m in sizes:
        best = min_aberration_projection(l18, m, include_two_level, workers=workers)
        top = best[0]
        n_cls = len(group_geometric([v.design for v in best]))
        print(
            f"{m:>2}  {top.label:<22} {_fmt(top.beta.window(3, 5)):<30} "
            f"{roman(top.resolution()):<4} {len(best)}/{n_cls}"
        )


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--table", choices=("classes", "three", "mixed", "all"), default="all")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    l18 = builtin_l18()
    start = time.perf_counter()
    if args.table in ("classes", "all"):
        geometric_classes(l18)
        print()
    if args.table in ("three", "all"):
        minima(l18, range(3, 8), False, args.workers)
        print()
    if args.table in ("mixed", "all"):
        minima(l18, range(3, 9), True, args.workers)
        print()
    print(f"done in {time.perf_counter() - start:.1f} s")


if __name__ == "__main__":
    main()
