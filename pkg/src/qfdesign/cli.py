"""Command line front end: ``qfdesign <command> ...``.

Exit status: 0 success (or isomorphic), 1 nonisomorphic, 2 usage error,
3 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from qfdesign.aberration import (
    FULL,
    SCHEMES,
    WLP_TOL,
    beta_wlp,
    compare_wlp,
    resolution,
    roman,
    strength,
    wordlength_pattern,
)
from qfdesign.aliasing import contrast_correlation
from qfdesign.basis import DEFAULT_TOL, format_index
from qfdesign.designfile import format_design, read_design
from qfdesign.errors import DesignError, EmptyDesign, ShapeError, ValidationError
from qfdesign.indicator import coefficients, second_moment, sum_of_squares
from qfdesign.isomorphism import (
    CombTransform,
    classify_geometric,
    comb_isomorphic,
    geom_isomorphic,
    group_geometric,
)
from qfdesign.search import builtin_l18, min_aberration_projection, parse_variant, realize

EXIT_OK, EXIT_NONISO, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3


def fmt(x: float, zero: float = 1e-12) -> str:
    """Six significant digits; values within ``zero`` of 0 print as ``0``."""
    return "0" if abs(x) < zero else f"{x:.6g}"


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print("\n".join(lines))


def _tols(args) -> tuple[float, float]:
    if args.tol is not None:
        return args.tol, args.tol
    return DEFAULT_TOL, WLP_TOL


def _load(path):
    design = read_design(path)
    if design.n == 0:
        raise EmptyDesign(f"{path}: design has no runs")
    return design


def cmd_coeffs(args) -> int:
    ctol, _ = _tols(args)
    design = _load(args.design)
    table = coefficients(design)
    levels = design.space.levels
    nonzero = table.nonzero(ctol)
    lines = [f"b_{format_index(t, levels)} = {fmt(b)}" for t, b in nonzero]
    if not any(all(v == 0 for v in t) for t, _ in nonzero):
        lines.insert(0, f"b_{format_index((0,) * len(levels), levels)} = {fmt(table.b0)}")
    dense = {format_index(tuple(int(v) for v in t), levels): float(table[t])
             for t in design.space.points()}
    payload = {
        "levels": list(levels),
        "n": design.n,
        "N": design.space.N,
        "b0": table.b0,
        "coefficients": dense,
        "nonzero": {format_index(t, levels): b for t, b in nonzero},
    }
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_wlp(args) -> int:
    ctol, wtol = _tols(args)
    design = _load(args.design)
    table = coefficients(design)
    wlp = wordlength_pattern(table, args.scheme)
    res = resolution(wlp, wtol)
    st = strength(table, ctol)
    total = sum_of_squares(table) - 1.0
    expected = second_moment(design) * design.space.N / design.n**2 - 1.0
    ok = abs(total - expected) <= wtol
    res_text = "full" if res == FULL else (
        f"{res} ({roman(res)})" if isinstance(res, int) else str(res))
    lines = [
        f"scheme: {wlp.scheme}",
        "pattern: " + " ".join(fmt(v) for v in wlp.values),
    ]
    if wlp.scheme in ("deg-card", "card-deg"):
        lines.append("classes: " + " ".join(f"{a}/{b}" for a, b in wlp.labels))
    lines += [
        f"resolution: {res_text}",
        f"strength: {st}",
        f"sum check: {fmt(total)} vs n2*N/n^2 - 1 = {fmt(expected)} ({'ok' if ok else 'MISMATCH'})",
    ]
    payload = {
        "scheme": wlp.scheme,
        "pattern": [float(v) for v in wlp.values],
        "labels": [list(l) if isinstance(l, tuple) else l for l in wlp.labels],
        "resolution": res if res == FULL or isinstance(res, int) else list(res),
        "strength": st,
        "sum": total,
        "expected_sum": expected,
        "sum_ok": ok,
    }
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_iso(args) -> int:
    a = _load(args.design_a)
    b = _load(args.design_b)
    if sorted(a.space.levels) != sorted(b.space.levels):
        raise ShapeError(f"design spaces differ: {a.space.levels} vs {b.space.levels}")
    if args.mode == "geom":
        g = geom_isomorphic(a, b)
        witness = None if g is None else CombTransform.from_geom(g, b.space)
    else:
        witness = comb_isomorphic(a, b)
    if witness is None:
        _emit(args, {"mode": args.mode, "isomorphic": False}, ["nonisomorphic"])
        return EXIT_NONISO
    payload = {
        "mode": args.mode,
        "isomorphic": True,
        "witness": {
            "factor_perm": list(witness.factor_perm),
            "level_perms": [list(p) for p in witness.level_perms],
        },
    }
    lines = ["isomorphic", f"witness (B -> A): {witness.describe()}"]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_classify(args) -> int:
    _, wtol = _tols(args)
    designs = [_load(p) for p in args.designs]
    classes = classify_geometric(designs)
    lines, out = [], []
    for n, cls in enumerate(classes, start=1):
        beta = beta_wlp(coefficients(cls.representative))
        members = [str(args.designs[i]) for i in cls.members]
        lines.append(
            f"class {n}: beta = ({', '.join(fmt(v) for v in beta.values)}) members: "
            + " ".join(members)
        )
        out.append({"members": members, "beta": [float(v) for v in beta.values]})
    lines.insert(0, f"{len(classes)} geometric class(es)")
    _emit(args, {"classes": out}, lines)
    return EXIT_OK


def _parent(spec: str):
    if spec.lower() == "l18":
        return builtin_l18(), "L18"
    return _load(spec), Path(spec).name


def _window(values, first=3, last=5):
    return [float(values[i - 1]) if i - 1 < len(values) else 0.0 for i in range(first, last + 1)]


def cmd_search(args) -> int:
    _, wtol = _tols(args)
    parent, pid = _parent(args.parent)
    ranked = min_aberration_projection(
        parent,
        args.size,
        args.include_two_level,
        tol=wtol,
        full_ranking=args.all,
        workers=args.workers,
        parent_id=pid,
    )
    best = ranked[0].beta
    minima = [v for v in ranked if compare_wlp(v.beta, best, wtol) == 0]
    groups = group_geometric([v.design for v in minima])
    cls_of = {i: n for n, g in enumerate(groups) for i in g}
    shown = set(range(len(ranked))) if args.all else {g[0] for g in groups}
    lines = [
        f"# {len(minima)} co-minimal variant(s) in {len(groups)} geometric class(es)",
        "# of factors  Columns  (b3, b4, b5)  Resolution",
    ]
    rows = []
    for i, v in enumerate(ranked):
        res = v.resolution(wtol)
        win = _window(v.beta.values)
        if i in shown:
            lines.append(
                f"{args.size}  {v.label}  ({', '.join(fmt(x) for x in win)})  {roman(res)}"
            )
        rows.append({
            "columns": list(v.columns),
            "labels": list(v.labels),
            "label": v.label,
            "beta": [float(x) for x in v.beta.values],
            "beta345": win,
            "resolution": res,
            "minimal": i < len(minima),
            "geometric_class": cls_of.get(i),
        })
    payload = {
        "parent": pid,
        "size": args.size,
        "include_two_level": args.include_two_level,
        "n_minimal": len(minima),
        "n_geometric_classes": len(groups),
        "results": rows,
    }
    _emit(args, payload, lines)
    return EXIT_OK


def _parse_index(text: str, k: int) -> tuple[int, ...]:
    try:
        t = tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise ValidationError(f"cannot read multi-index {text!r}") from None
    if len(t) != k:
        raise ValidationError(f"multi-index {text!r} needs {k} entries")
    return t


def cmd_corr(args) -> int:
    design = _load(args.design)
    table = coefficients(design)
    u = _parse_index(args.u, design.space.k)
    v = _parse_index(args.v, design.space.k)
    r = contrast_correlation(table, u, v)
    _emit(args, {"u": list(u), "v": list(v), "correlation": r}, [f"corr = {fmt(r)}"])
    return EXIT_OK


def cmd_export(args) -> int:
    if args.design is not None:
        design = read_design(args.design)
        comment = None
    elif args.parent is not None:
        parent, pid = _parent(args.parent)
        if args.columns:
            cols, perms = parse_variant(args.columns, parent)
            design = realize(parent, cols, perms)
            comment = f"{pid} columns {args.columns}"
        else:
            design, comment = parent, pid
    else:
        raise ValidationError("export needs a design file or --parent")
    text = format_design(design, comment)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _common(p: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS if suppress else False,
                   help="machine-readable output")
    p.add_argument("--tol", type=float, default=default,
                   help="override coefficient (1e-9) and pattern (1e-6) tolerances")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qfdesign",
        description="Indicator functions, wordlength patterns and isomorphism of factorial designs",
    )
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="indicator-function coefficients b_t")
    p.add_argument("design")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("wlp", help="wordlength pattern, resolution and strength")
    p.add_argument("design")
    p.add_argument("--scheme", choices=SCHEMES, default="beta")
    p.set_defaults(func=cmd_wlp)

    p = sub.add_parser("iso", help="test isomorphism of two designs")
    p.add_argument("design_a")
    p.add_argument("design_b")
    p.add_argument("--mode", choices=("geom", "comb"), default="geom")
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("classify", help="partition designs into geometric classes")
    p.add_argument("designs", nargs="+")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("search", help="minimum beta-aberration projections of a parent array")
    p.add_argument("--parent", default="l18", help="'l18' or a design file")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--include-two-level", action="store_true")
    p.add_argument("--all", action="store_true", help="print the full ranking")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("corr", help="correlation of contrasts C_u and C_v on a design")
    p.add_argument("design")
    p.add_argument("u", help="comma separated, e.g. 1,1,0")
    p.add_argument("v")
    p.set_defaults(func=cmd_corr)

    p = sub.add_parser("export", help="write a design file")
    p.add_argument("design", nargs="?")
    p.add_argument("--parent")
    p.add_argument("--columns", help="e.g. '1u2 2 5'")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export)

    for sp in sub.choices.values():
        _common(sp, suppress=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DesignError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
