"""Plain-text design files.

    # comment
    levels: 3 3 3
    0 0 0
    0 1 2
    ...
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from qfdesign.basis import Design, DesignSpace
from qfdesign.errors import InvalidLevelCount, ParseError, ValidationError


def parse_design(text: str) -> Design:
    levels = None
    runs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if levels is None:
            head, sep, rest = line.partition(":")
            if not sep or head.strip().lower() != "levels":
                raise ParseError("expected header 'levels: s1 s2 ... sk'", lineno)
            try:
                levels = tuple(int(tok) for tok in rest.split())
            except ValueError:
                raise ParseError(f"non-integer level count in {rest.strip()!r}", lineno) from None
            if not levels:
                raise ParseError("header lists no factors", lineno)
            try:
                DesignSpace(levels)
            except InvalidLevelCount as exc:
                raise ValidationError(f"line {lineno}: {exc}") from None
            continue
        try:
            run = [int(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(f"non-integer entry in {line!r}", lineno) from None
        if len(run) != len(levels):
            raise ParseError(f"expected {len(levels)} entries, got {len(run)}", lineno)
        for v, s in zip(run, levels):
            if not 0 <= v < s:
                raise ValidationError(f"line {lineno}: level {v} outside 0..{s - 1}")
        runs.append(run)
    if levels is None:
        raise ParseError("missing 'levels:' header")
    return Design(DesignSpace(levels), np.array(runs, dtype=np.int64).reshape(-1, len(levels)))


def read_design(path) -> Design:
    return parse_design(Path(path).read_text())


def format_design(design: Design, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append("levels: " + " ".join(str(s) for s in design.space.levels))
    lines.extend(" ".join(str(int(v)) for v in run) for run in design.runs)
    return "\n".join(lines) + "\n"


def write_design(design: Design, path, comment: str | None = None) -> None:
    Path(path).write_text(format_design(design, comment))
