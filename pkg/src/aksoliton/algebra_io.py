"""Reading algebra descriptions (brackets, form, metric, parameters) from JSON.

An algebra document looks like::

    {"dim": 6,
     "params": {"lam": 2.0},          # or {"lam": {"samples": [2.0, ...]}}
     "brackets": [{"i": 1, "j": 2, "k": 4, "c": "lam/2"}, ...],
     "omega": "canonical" | [{"i": 1, "j": 6, "c": 1}, ...],
     "metric": [1, 1, 1, 1, 1, 1]}

Coefficients follow :func:`aksoliton.expr.coefficient`.  A coefficient that
evaluates to exactly zero is dropped.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .expr import ExpressionError, coefficient
from .lie_core import LieBracket
from .symplectic import TwoForm, canonical_form


class AlgebraFileError(ValueError):
    """Invalid algebra document; the message names the offending field."""


@dataclass(frozen=True)
class AlgebraSpec:
    mu: LieBracket
    omega: TwoForm | None
    metric: np.ndarray | None
    params: dict[str, float]


def _index(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise AlgebraFileError(f"{where}: index must be an integer, got {value!r}")
    return value


def _coef(value: Any, params: Mapping[str, float], where: str) -> float:
    try:
        return coefficient(value, params)
    except ExpressionError as exc:
        raise AlgebraFileError(f"{where}: {exc}") from exc


def _fields(item: Any, names: tuple[str, ...], where: str) -> list:
    if isinstance(item, Mapping):
        missing = [n for n in names if n not in item]
        if missing:
            raise AlgebraFileError(f"{where}: missing field(s) {', '.join(missing)}")
        return [item[n] for n in names]
    if isinstance(item, (list, tuple)) and len(item) == len(names):
        return list(item)
    raise AlgebraFileError(f"{where}: expected an object with fields {', '.join(names)}")


def parse_brackets(items: Any, dim: int, params: Mapping[str, float]) -> LieBracket:
    if items is None:
        items = []
    if not isinstance(items, list):
        raise AlgebraFileError("brackets: expected a list")
    seen: set[tuple[int, int, int]] = set()
    entries = []
    for n, item in enumerate(items):
        where = f"brackets[{n}]"
        i, j, k, c = _fields(item, ("i", "j", "k", "c"), where)
        i, j, k = _index(i, where + ".i"), _index(j, where + ".j"), _index(k, where + ".k")
        if not (1 <= i < j <= dim and 1 <= k <= dim):
            raise AlgebraFileError(f"{where}: need 1 <= i < j <= {dim} and 1 <= k <= {dim}")
        if (i, j, k) in seen:
            raise AlgebraFileError(f"{where}: duplicate structure constant ({i}, {j}, {k})")
        seen.add((i, j, k))
        val = _coef(c, params, where + ".c")
        if not np.isfinite(val):
            raise AlgebraFileError(f"{where}.c: non-finite value")
        if val != 0.0:
            entries.append((i, j, k, val))
    return LieBracket(dim, tuple(entries))


def parse_omega(spec: Any, dim: int, params: Mapping[str, float]) -> TwoForm | None:
    if spec is None:
        return None
    if spec == "canonical":
        if dim % 2:
            raise AlgebraFileError("omega: canonical form needs an even dimension")
        return canonical_form(dim // 2)
    if not isinstance(spec, list):
        raise AlgebraFileError('omega: expected "canonical" or a list')
    seen: set[tuple[int, int]] = set()
    entries = []
    for n, item in enumerate(spec):
        where = f"omega[{n}]"
        i, j, c = _fields(item, ("i", "j", "c"), where)
        i, j = _index(i, where + ".i"), _index(j, where + ".j")
        if not 1 <= i < j <= dim:
            raise AlgebraFileError(f"{where}: need 1 <= i < j <= {dim}")
        if (i, j) in seen:
            raise AlgebraFileError(f"{where}: duplicate coefficient ({i}, {j})")
        seen.add((i, j))
        entries.append((i, j, _coef(c, params, where + ".c")))
    return TwoForm(dim, tuple(entries))


def parse_metric(spec: Any, dim: int, params: Mapping[str, float]) -> np.ndarray | None:
    if spec is None or spec == "canonical":
        return None
    if not isinstance(spec, list) or len(spec) != dim:
        raise AlgebraFileError(f"metric: expected a list of {dim} diagonal entries")
    diag = np.array([_coef(v, params, f"metric[{n}]") for n, v in enumerate(spec)])
    if np.any(diag <= 0):
        raise AlgebraFileError("metric: diagonal entries must be positive")
    return diag


def parse_params(spec: Any) -> dict[str, float]:
    if spec is None:
        return {}
    if not isinstance(spec, Mapping):
        raise AlgebraFileError("params: expected an object")
    out = {}
    for name, value in spec.items():
        if isinstance(value, Mapping):
            samples = value.get("samples")
            if not isinstance(samples, list) or not samples:
                raise AlgebraFileError(f"params.{name}: expected a number or a non-empty samples list")
            value = samples[0]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise AlgebraFileError(f"params.{name}: expected a number")
        out[str(name)] = float(value)
    return out


def parse_algebra(doc: Any, params: Mapping[str, float] | None = None) -> AlgebraSpec:
    """Build an :class:`AlgebraSpec`; ``params`` overrides the document's."""
    if not isinstance(doc, Mapping):
        raise AlgebraFileError("top level: expected a JSON object")
    if "dim" not in doc:
        raise AlgebraFileError("dim: missing")
    dim = doc["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise AlgebraFileError(f"dim: expected a positive integer, got {dim!r}")
    values = parse_params(doc.get("params"))
    if params:
        values.update(params)
    mu = parse_brackets(doc.get("brackets"), dim, values)
    omega = parse_omega(doc.get("omega", "canonical"), dim, values)
    metric = parse_metric(doc.get("metric"), dim, values)
    return AlgebraSpec(mu, omega, metric, values)


def load_algebra(path: str | Path, params: Mapping[str, float] | None = None) -> AlgebraSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise AlgebraFileError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AlgebraFileError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_algebra(doc, params)


def bracket_to_json(mu: LieBracket) -> list[dict]:
    return [{"i": i, "j": j, "k": k, "c": c} for i, j, k, c in mu.entries]


def form_to_json(omega: TwoForm) -> list[dict]:
    return [{"i": i, "j": j, "c": c} for i, j, c in omega.entries]
