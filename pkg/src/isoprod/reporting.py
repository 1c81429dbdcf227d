"""Deterministic JSON / CSV / human renderings of report objects."""

from __future__ import annotations

import json
import math
import os
from typing import Any, Sequence

import isoprod

TOOL = "isoprod"


def fmt_float(v: float) -> str:
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    return "%.17g" % v


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON with every float written to 17 significant digits."""

    def go(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if o is None:
            return "null"
        if o is True:
            return "true"
        if o is False:
            return "false"
        if isinstance(o, int):
            return str(o)
        if isinstance(o, float):
            return fmt_float(o)
        if isinstance(o, str):
            return json.dumps(o, ensure_ascii=False)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {go(v, level + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            if all(isinstance(v, (int, float, bool)) or v is None for v in o):
                return "[" + ", ".join(go(v, level + 1) for v in o) + "]"
            return "[\n" + ",\n".join(pad + go(v, level + 1) for v in o) + "\n" + end + "]"
        raise TypeError(f"cannot serialise {type(o).__name__}")

    return go(obj, 0) + "\n"


def envelope(seed: int, inp: dict, results: dict, findings: list, tolerances: dict) -> dict:
    return {
        "tool": TOOL,
        "version": isoprod.__version__,
        "seed": seed,
        "input": inp,
        "results": results,
        "findings": findings,
        "tolerances": tolerances,
    }


def compact(o: Any) -> str:
    """Single-line JSON with the same float formatting as ``dumps``."""
    if isinstance(o, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{compact(v)}" for k, v in o.items()) + "}"
    if isinstance(o, (list, tuple)):
        return "[" + ",".join(compact(v) for v in o) + "]"
    if isinstance(o, float):
        return fmt_float(o)
    return json.dumps(o)


def _cell(v: Any) -> str:
    if isinstance(v, float):
        return "%.17g" % v
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    s = compact(v) if isinstance(v, (dict, list, tuple)) else str(v)
    if any(c in s for c in ',"\n'):
        s = '"' + s.replace('"', '""') + '"'
    return s


def to_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    lines = [",".join(header)]
    lines += [",".join(_cell(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def flatten(obj: Any, prefix: str = "") -> list[tuple[str, Any]]:
    if isinstance(obj, dict):
        out = []
        for k, v in obj.items():
            out += flatten(v, f"{prefix}.{k}" if prefix else str(k))
        return out
    if isinstance(obj, list) and obj and any(isinstance(v, (dict, list)) for v in obj):
        out = []
        for i, v in enumerate(obj):
            out += flatten(v, f"{prefix}[{i}]")
        return out
    return [(prefix, obj)]


def use_color(stream) -> bool:
    return not os.environ.get("NO_COLOR") and hasattr(stream, "isatty") and stream.isatty()


def human(obj: dict, color: bool = False) -> str:
    """Indented key: value rendering of a JSON-ready object."""
    bold = (lambda s: f"\033[1m{s}\033[0m") if color else (lambda s: s)
    lines: list[str] = []

    def scalar(v):
        if isinstance(v, float):
            return "%.10g" % v
        if isinstance(v, bool):
            return "yes" if v else "no"
        if v is None:
            return "-"
        return str(v)

    def go(o, level):
        pad = "  " * level
        if isinstance(o, dict):
            for k, v in o.items():
                if isinstance(v, (dict, list)) and v and not _flat_list(v):
                    lines.append(f"{pad}{bold(k)}:")
                    go(v, level + 1)
                else:
                    lines.append(f"{pad}{bold(k)}: {render(v)}")
        elif isinstance(o, list):
            for v in o:
                if isinstance(v, (dict, list)) and not _flat_list(v):
                    lines.append(f"{pad}-")
                    go(v, level + 1)
                else:
                    lines.append(f"{pad}- {render(v)}")

    def render(v):
        if isinstance(v, list):
            return "[" + ", ".join(render(x) for x in v) + "]"
        if isinstance(v, dict):
            return "{}"
        return scalar(v)

    go(obj, 0)
    return "\n".join(lines) + "\n"


def _flat_list(v) -> bool:
    if not isinstance(v, list):
        return False
    return all(not isinstance(x, dict) and (not isinstance(x, list) or _flat_list(x)) for x in v)
