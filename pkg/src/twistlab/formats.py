"""JSON formats for couple configurations, block vectors and reports.

Floats are written with Python's shortest round-trip representation, so
reading a file back reproduces every number bit for bit.

Couple configuration::

    {"phi0": {"kind": "ess_sup"},
     "phi1": {"kind": "power", "p": 1.0},
     "theta": 0.5,
     "jet_order": null}

Other kinds are ``{"kind": "power_log", "p": 2.0, "alpha": 1.0}`` and
``{"kind": "monotone_table", "t": [...], "values": [...], "delta2": false}``.

Block vector (blocks listed as ``x_{n-1}, ..., x_0``, coordinates ascending)::

    {"n": 2, "order": "descending",
     "entries": [{"k": 0, "block": [[0.0, 0.0], [1.0, 0.0]]}]}
"""
from __future__ import annotations

import json
from typing import Any

import numpy as np

from .exceptions import UsageError
from .interpolation import InterpolationCouple
from .orlicz import OrliczFunction
from .spaces import BlockVector

__all__ = [
    "BLOCK_ORDER",
    "orlicz_from_dict",
    "couple_from_dict",
    "couple_to_dict",
    "load_couple",
    "block_vector_from_dict",
    "block_vector_to_dict",
    "load_block_vector",
    "dump_block_vector",
    "dumps_report",
]

BLOCK_ORDER = "descending"


def _number(d: dict, key: str, default=None) -> float:
    if key not in d:
        if default is None:
            raise UsageError(f"missing field {key!r}")
        return default
    value = d[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise UsageError(f"field {key!r} must be a number")
    return float(value)


def orlicz_from_dict(d: Any) -> OrliczFunction:
    if not isinstance(d, dict) or "kind" not in d:
        raise UsageError("an Orlicz function is an object with a 'kind' field")
    kind = d["kind"]
    if kind == "power":
        return OrliczFunction.power(_number(d, "p"))
    if kind == "power_log":
        return OrliczFunction.power_log(_number(d, "p"), _number(d, "alpha"))
    if kind == "ess_sup":
        return OrliczFunction.ess_sup()
    if kind == "monotone_table":
        try:
            t = [float(v) for v in d["t"]]
            values = [float(v) for v in d["values"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError("monotone_table needs numeric 't' and 'values' lists") from exc
        if len(t) != len(values) or len(t) < 2:
            raise UsageError("monotone_table needs two equal lists of length >= 2")
        return OrliczFunction.from_table(t, values, bool(d.get("delta2", False)))
    raise UsageError(f"unknown Orlicz kind {kind!r}")


def couple_from_dict(d: Any, theta: float | None = None) -> InterpolationCouple:
    """Build a couple; ``theta`` overrides the configured value."""
    if not isinstance(d, dict):
        raise UsageError("a couple configuration is a JSON object")
    th = theta if theta is not None else _number(d, "theta", 0.5)
    jet_order = d.get("jet_order")
    if jet_order is not None and (not isinstance(jet_order, int) or jet_order < 1):
        raise UsageError("jet_order must be a positive integer or null")
    return InterpolationCouple(orlicz_from_dict(d.get("phi0", {"kind": "ess_sup"})),
                               orlicz_from_dict(d.get("phi1", {"kind": "power", "p": 1.0})),
                               th, jet_order)


def couple_to_dict(couple: InterpolationCouple) -> dict:
    return couple.describe()


def _read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def load_couple(path: str | None, theta: float | None = None) -> InterpolationCouple:
    """Couple from a config file, or the (ess_sup, power(1)) couple without one."""
    data = _read_json(path) if path else {}
    return couple_from_dict(data, theta)


def _complex_pair(v) -> complex:
    if (not isinstance(v, (list, tuple)) or len(v) != 2
            or any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in v)):
        raise UsageError("complex entries are [re, im] pairs of numbers")
    return complex(float(v[0]), float(v[1]))


def block_vector_from_dict(d: Any) -> BlockVector:
    if not isinstance(d, dict):
        raise UsageError("a block vector is a JSON object")
    n = d.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise UsageError("field 'n' must be a positive integer")
    if d.get("order") != BLOCK_ORDER:
        raise UsageError(f"field 'order' must be {BLOCK_ORDER!r} (blocks list x_(n-1) first)")
    entries = d.get("entries")
    if not isinstance(entries, list):
        raise UsageError("field 'entries' must be a list")
    idx, blocks = [], []
    for e in entries:
        if not isinstance(e, dict) or not isinstance(e.get("k"), int):
            raise UsageError("each entry needs an integer 'k' and a 'block'")
        block = e.get("block")
        if not isinstance(block, list) or len(block) != n:
            raise UsageError(f"block at k={e['k']} must have exactly {n} entries")
        idx.append(e["k"])
        blocks.append([_complex_pair(v) for v in block])
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise UsageError("coordinates must be strictly ascending")
    arr = np.array(blocks, dtype=complex).reshape(len(blocks), n)
    return BlockVector(n, np.array(idx, dtype=np.int64), arr)


def block_vector_to_dict(v: BlockVector) -> dict:
    return {"n": v.n, "order": BLOCK_ORDER,
            "entries": [{"k": int(k), "block": [[float(z.real), float(z.imag)] for z in row]}
                        for k, row in zip(v.indices, v.blocks)]}


def load_block_vector(path: str) -> BlockVector:
    return block_vector_from_dict(_read_json(path))


def dump_block_vector(v: BlockVector, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(block_vector_to_dict(v), indent=2) + "\n")


def dumps_report(report: dict) -> str:
    """Serialise a report; ``allow_nan`` is off so a stray NaN fails loudly."""
    return json.dumps(report, indent=2, allow_nan=False) + "\n"
