"""JSON instance files and solution reports.

Single-row files carry ``"cells"``; double-row files carry ``"doubles"`` and
``"gaps"``. Both carry ``"window": [x_min, x_max]`` and ``"format": 1``.
Every structural problem is reported as a :class:`ValidationError` with a
JSON-pointer location.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .double_row import DoubleRowInstance, DoubleRowSolution, Gap
from .errors import ValidationError
from .pwq import PiecewiseQuadratic
from .single_row import Cell, SingleRowInstance, SingleRowSolution

FORMAT = 1

Instance = SingleRowInstance | DoubleRowInstance


def _number(value, pointer: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"expected a number, got {type(value).__name__}", pointer)
    if not math.isfinite(value):
        raise ValidationError("expected a finite number", pointer)
    return float(value)


def _list(value, pointer: str) -> list:
    if not isinstance(value, list):
        raise ValidationError(f"expected an array, got {type(value).__name__}", pointer)
    return value


def _pwq(data, pointer: str) -> PiecewiseQuadratic:
    if not isinstance(data, dict):
        raise ValidationError("expected an object", pointer)
    for key in ("lo", "hi", "segments"):
        if key not in data:
            raise ValidationError(f"missing key {key!r}", pointer)
    lo = _number(data["lo"], f"{pointer}/lo")
    hi = _number(data["hi"], f"{pointer}/hi")
    bps = [_number(v, f"{pointer}/breakpoints/{i}")
           for i, v in enumerate(_list(data.get("breakpoints", []), f"{pointer}/breakpoints"))]
    segs = []
    for i, seg in enumerate(_list(data["segments"], f"{pointer}/segments")):
        seg = _list(seg, f"{pointer}/segments/{i}")
        if len(seg) != 3:
            raise ValidationError("a segment is [a, b, c]", f"{pointer}/segments/{i}")
        segs.append([_number(v, f"{pointer}/segments/{i}/{j}") for j, v in enumerate(seg)])
    try:
        return PiecewiseQuadratic.from_dict({"lo": lo, "hi": hi, "breakpoints": bps, "segments": segs})
    except ValueError as exc:
        raise ValidationError(str(exc), pointer) from None


def _cell(data, pointer: str) -> Cell:
    if not isinstance(data, dict):
        raise ValidationError("expected an object", pointer)
    for key in ("id", "width", "cost"):
        if key not in data:
            raise ValidationError(f"missing key {key!r}", pointer)
    width = _number(data["width"], f"{pointer}/width")
    if width <= 0:
        raise ValidationError(f"width must be positive, got {width:g}", f"{pointer}/width")
    return Cell(str(data["id"]), width, _pwq(data["cost"], f"{pointer}/cost"))


def _cells(data, pointer: str) -> tuple[Cell, ...]:
    return tuple(_cell(c, f"{pointer}/{i}") for i, c in enumerate(_list(data, pointer)))


def from_dict(data) -> Instance:
    """Validated instance from a decoded JSON document."""
    if not isinstance(data, dict):
        raise ValidationError("expected a JSON object", "")
    fmt = data.get("format", FORMAT)
    if fmt != FORMAT:
        raise ValidationError(f"unsupported format {fmt!r}", "/format")
    if "window" not in data:
        raise ValidationError("missing key 'window'", "")
    window = _list(data["window"], "/window")
    if len(window) != 2:
        raise ValidationError("window is [x_min, x_max]", "/window")
    x_min, x_max = (_number(v, f"/window/{i}") for i, v in enumerate(window))
    if x_max < x_min:
        raise ValidationError(f"x_min <= x_max violated: {x_min:g} > {x_max:g}", "/window")
    if "cells" in data:
        return SingleRowInstance(_cells(data["cells"], "/cells"), x_min, x_max)
    for key in ("doubles", "gaps"):
        if key not in data:
            raise ValidationError(f"missing key {key!r} (or 'cells' for a single-row file)", "")
    doubles = _cells(data["doubles"], "/doubles")
    gaps = []
    for g, gap in enumerate(_list(data["gaps"], "/gaps")):
        if not isinstance(gap, dict):
            raise ValidationError("expected an object", f"/gaps/{g}")
        gaps.append(Gap(_cells(gap.get("bottom", []), f"/gaps/{g}/bottom"),
                        _cells(gap.get("top", []), f"/gaps/{g}/top")))
    return DoubleRowInstance(doubles, tuple(gaps), x_min, x_max)


def _cell_dict(c: Cell) -> dict:
    return {"id": c.id, "width": c.width, "cost": c.cost.to_dict()}


def to_dict(inst: Instance) -> dict:
    out: dict = {"format": FORMAT, "window": [inst.x_min, inst.x_max]}
    if isinstance(inst, SingleRowInstance):
        out["cells"] = [_cell_dict(c) for c in inst.cells]
    else:
        out["doubles"] = [_cell_dict(c) for c in inst.doubles]
        out["gaps"] = [{"bottom": [_cell_dict(c) for c in g.bottom], "top": [_cell_dict(c) for c in g.top]}
                       for g in inst.gaps]
    return out


def loads(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc.msg} at line {exc.lineno} column {exc.colno}", "") from None
    return from_dict(data)


def dumps(inst: Instance) -> str:
    return json.dumps(to_dict(inst), indent=1)


def parse(path: str | Path) -> Instance:
    return loads(Path(path).read_text())


def emit(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(dumps(inst) + "\n")


def solution_to_dict(inst: Instance, sol: SingleRowSolution | DoubleRowSolution) -> dict:
    """Positions in instance order: a flat list for single-row files, per-gap lists otherwise."""
    out: dict = {"format": FORMAT, "cost": float(sol.total_cost)}
    if isinstance(inst, SingleRowInstance):
        out["positions"] = [float(p) for p in sol.positions]
        return out
    out["x"] = [float(p) for p in sol.x]
    out["bottom"] = [[float(p) for p in ys] for ys in sol.y]
    out["top"] = [[float(p) for p in zs] for zs in sol.z]
    if sol.heuristic:
        out["heuristic"] = True
    return out
