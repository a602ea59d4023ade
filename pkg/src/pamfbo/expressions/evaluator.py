"""Restricted arithmetic over named design coordinates.

The grammar is deliberately tiny: ``+ - * /``, unary ``+``/``-``,
parentheses, numeric constants and coordinate names. Expressions are parsed
once and evaluated with simpleeval against a fixed operator table, so no
function calls, attribute access, comparisons or host-language evaluation are
reachable.
"""

import ast
import math
import operator
from collections.abc import Mapping

from simpleeval import InvalidExpression, SimpleEval

from pamfbo.expressions.exceptions import ExpressionError

OPERATORS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.USub: operator.neg,
    ast.UAdd: operator.pos,
}

_ALLOWED_NODES = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Constant, ast.Name, ast.Load, *OPERATORS)


def _check_tree(tree: ast.Expression, source: str) -> set[str]:
    names: set[str] = set()
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise ExpressionError(f"Unsupported syntax in expression '{source}': {type(node).__name__}")
        if isinstance(node, ast.Constant) and (isinstance(node.value, bool) or not isinstance(node.value, int | float)):
            raise ExpressionError(f"Only numeric constants are allowed in expression '{source}': {node.value!r}")
        if isinstance(node, ast.Name):
            names.add(node.id)
    return names


class CompiledExpression:
    """A validated expression, parsed once and evaluated many times."""

    def __init__(self, source: str):
        self.source = source.strip()
        if not self.source:
            raise ExpressionError("Expression is empty")
        try:
            tree = ast.parse(self.source, mode="eval")
        except SyntaxError as e:
            raise ExpressionError(f"Invalid expression '{self.source}': {e.msg}") from e
        self.names = frozenset(_check_tree(tree, self.source))
        self._parsed = SimpleEval(operators=OPERATORS, functions={}, names={}).parse(self.source)

    def evaluate(self, values: Mapping[str, float]) -> float:
        missing = self.names - values.keys()
        if missing:
            raise ExpressionError(f"Undefined name(s) in expression '{self.source}': {sorted(missing)}")
        evaluator = SimpleEval(operators=OPERATORS, functions={}, names=dict(values))
        try:
            result = evaluator.eval(self.source, previously_parsed=self._parsed)
        except ZeroDivisionError as e:
            raise ExpressionError(f"Division by zero in expression '{self.source}'") from e
        except InvalidExpression as e:
            raise ExpressionError(f"Cannot evaluate expression '{self.source}': {e}") from e
        value = float(result)
        if not math.isfinite(value):
            raise ExpressionError(f"Expression '{self.source}' evaluated to a non-finite value: {value}")
        return value

    def __repr__(self) -> str:
        return f"CompiledExpression({self.source!r})"


def parse_expression(source: str) -> CompiledExpression:
    return CompiledExpression(source)
