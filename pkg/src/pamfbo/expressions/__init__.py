"""Arithmetic expression engine for custom physics biases.

Example:
    >>> from pamfbo.expressions import parse_expression
    >>> expr = parse_expression("1 / (1 - M)")
    >>> expr.evaluate({"M": 0.5})
    2.0
"""

from pamfbo.expressions.evaluator import OPERATORS, CompiledExpression, parse_expression
from pamfbo.expressions.exceptions import ExpressionError

__all__ = [
    "parse_expression",
    "CompiledExpression",
    "OPERATORS",
    "ExpressionError",
]
