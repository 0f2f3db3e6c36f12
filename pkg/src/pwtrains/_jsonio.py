"""Deterministic JSON output with floats at 17 significant digits."""
import json
import math
from fractions import Fraction

import numpy as np


def fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj, indent: int = 2) -> str:
    """Serialize dicts (insertion order), lists, strings, ints, floats and bools."""
    out: list = []
    _write(obj, out, indent, 0)
    return "".join(out)


def _write(obj, out, indent, level):
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," if indent else ", "
    if obj is None or isinstance(obj, (bool, np.bool_)):
        out.append(json.dumps(None if obj is None else bool(obj)))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating, Fraction)):
        out.append(fmt_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(sep)
            out.append(pad + json.dumps(str(k)) + ": ")
            _write(v, out, indent, level + 1)
        out.append(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            out.append("[]")
            return
        flat = all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq)
        if flat:
            out.append("[")
            for i, v in enumerate(seq):
                if i:
                    out.append(", ")
                _write(v, out, 0, 0)
            out.append("]")
            return
        out.append("[")
        for i, v in enumerate(seq):
            if i:
                out.append(sep)
            out.append(pad)
            _write(v, out, indent, level + 1)
        out.append(end + "]")
    elif hasattr(obj, "to_json"):
        _write(obj.to_json(), out, indent, level)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
