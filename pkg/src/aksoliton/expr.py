"""Safe evaluation of the coefficient expressions used in algebra files.

Accepted forms for a coefficient:

* a number;
* a string such as ``"sqrt(2)/4*(lam+1)"`` over declared parameters, using
  ``+ - * /``, unary minus, parentheses and the functions ``sqrt``, ``sign``
  and ``abs``;
* a triple ``[a, r, d]`` meaning ``a * sqrt(r) / d``.
"""
from __future__ import annotations

import ast
import math
from typing import Mapping

_FUNCS = {
    "sqrt": math.sqrt,
    "abs": abs,
    "sign": lambda v: float((v > 0) - (v < 0)),
}

_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
}


class ExpressionError(ValueError):
    pass


def _eval(node: ast.AST, params: Mapping[str, float]) -> float:
    if isinstance(node, ast.Expression):
        return _eval(node.body, params)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.Name):
        if node.id not in params:
            raise ExpressionError(f"unknown parameter {node.id!r}")
        return float(params[node.id])
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand, params)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        left = _eval(node.left, params)
        right = _eval(node.right, params)
        try:
            return _BINOPS[type(node.op)](left, right)
        except ZeroDivisionError as exc:
            raise ExpressionError("division by zero") from exc
    if (
        isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id in _FUNCS
        and len(node.args) == 1
        and not node.keywords
    ):
        arg = _eval(node.args[0], params)
        if node.func.id == "sqrt" and arg < 0:
            raise ExpressionError("sqrt of a negative number")
        return float(_FUNCS[node.func.id](arg))
    raise ExpressionError(f"unsupported syntax: {ast.dump(node)}")


def evaluate(expr: str, params: Mapping[str, float] | None = None) -> float:
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {expr!r}") from exc
    return _eval(tree, params or {})


def coefficient(value, params: Mapping[str, float] | None = None) -> float:
    """Evaluate a number, expression string or [a, r, d] radical triple."""
    if isinstance(value, bool):
        raise ExpressionError("booleans are not coefficients")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        return evaluate(value, params)
    if isinstance(value, (list, tuple)) and len(value) == 3:
        a, r, d = (coefficient(v, params) for v in value)
        if r < 0 or d == 0:
            raise ExpressionError(f"bad radical triple {value!r}")
        return a * math.sqrt(r) / d
    raise ExpressionError(f"unsupported coefficient {value!r}")
