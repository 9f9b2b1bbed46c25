"""Tiny arithmetic-expression language over index variables.

Grammar: numbers, the variables ``k`` (and ``n`` for matrix entries),
binary ``+ - * / ^``, unary minus, parentheses, the constant ``pi`` and
the functions ``ln``, ``exp``, ``sqrt``, ``pow``, ``abs``.  Expressions are
compiled to numpy-vectorized callables.
"""

from __future__ import annotations

import ast
from typing import Callable

import numpy as np

from .core import SpecError

_FUNCS = {
    "ln": (np.log, 1),
    "exp": (np.exp, 1),
    "sqrt": (np.sqrt, 1),
    "abs": (np.abs, 1),
    "pow": (np.power, 2),
}
_CONSTS = {"pi": np.pi}
_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}


def _to_python(text: str) -> str:
    if "**" in text:
        raise SpecError("use '^' for powers", text, text.index("**"))
    return text.replace("^", "**")


def compile_expr(text: str, variables: tuple[str, ...] = ("k",)) -> Callable[..., np.ndarray]:
    """Compile ``text`` into ``f(*arrays)`` with one array per variable.

    Raises :class:`SpecError` carrying the character position of the first
    offending token.
    """
    src = _to_python(text.strip())
    if not src:
        raise SpecError("empty expression", text, 0)
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        pos = max((exc.offset or 1) - 1, 0)
        raise SpecError(f"malformed expression: {exc.msg}", text, pos) from None

    def build(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            value = float(node.value)
            return lambda env: value
        if isinstance(node, ast.Name):
            if node.id in variables:
                name = node.id
                return lambda env: env[name]
            if node.id in _CONSTS:
                value = _CONSTS[node.id]
                return lambda env: value
            raise SpecError(f"unknown name {node.id!r}", text, node.col_offset)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = build(node.operand)
            if isinstance(node.op, ast.USub):
                return lambda env: -inner(env)
            return inner
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            op = _BINOPS[type(node.op)]
            left, right = build(node.left), build(node.right)
            if op is np.power:
                return lambda env: np.power(np.asarray(left(env), dtype=float), right(env))
            return lambda env: op(left(env), right(env))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
            fname = node.func.id
            if fname not in _FUNCS:
                raise SpecError(f"unknown function {fname!r}", text, node.col_offset)
            fn, arity = _FUNCS[fname]
            if len(node.args) != arity or node.keywords:
                raise SpecError(f"{fname} takes {arity} argument(s)", text, node.col_offset)
            args = [build(a) for a in node.args]
            return lambda env: fn(*[np.asarray(a(env), dtype=float) for a in args])
        raise SpecError("unsupported syntax", text, getattr(node, "col_offset", 0))

    body = build(tree.body)

    def evaluate(*arrays):
        if len(arrays) != len(variables):
            raise TypeError(f"expected {len(variables)} argument(s)")
        env = {name: np.asarray(a, dtype=float) for name, a in zip(variables, arrays)}
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = body(env)
        shape = np.broadcast_shapes(*(np.shape(a) for a in arrays))
        return np.broadcast_to(np.asarray(out, dtype=float), shape).copy()

    evaluate.source = text
    return evaluate
