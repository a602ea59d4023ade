"""Annotated type aliases (with validators) for the configuration models.

Most aliases are ``Annotated[..., AfterValidator(...)]`` that check a field's
contents: a cost-ratio ladder ending at 1, a strictly ascending checkpoint
grid, a closed interval, or a custom bias expression that must parse under the
restricted arithmetic grammar.
"""

from collections.abc import Callable
from typing import Annotated, Any

from pydantic import AfterValidator, Field, NonNegativeInt, PositiveFloat

from pamfbo.expressions import parse_expression


def create_string_validator(validation_func: Callable[[str], Any], error_message: str) -> Callable[[str], str]:
    """Factory for creating string validators."""

    def validator(v: str) -> str:
        try:
            validation_func(v)
        except Exception as e:
            raise ValueError(f"{error_message}: {e}") from e
        return v

    return validator


def validate_cost_ratios(v: list[float]) -> list[float]:
    if v[-1] != 1.0:
        raise ValueError(f"the top-level cost ratio must be exactly 1, got {v[-1]}")
    if any(lo >= hi for lo, hi in zip(v, v[1:], strict=False)):
        raise ValueError(f"cost ratios must be strictly increasing with fidelity, got {v}")
    return v


def validate_ascending(v: list[float]) -> list[float]:
    if any(lo >= hi for lo, hi in zip(v, v[1:], strict=False)):
        raise ValueError(f"values must be strictly ascending, got {v}")
    return v


def validate_interval(v: tuple[float, float]) -> tuple[float, float]:
    if not v[0] < v[1]:
        raise ValueError(f"interval lower bound must be below the upper bound, got {list(v)}")
    return v


validate_expression = create_string_validator(parse_expression, "Invalid bias expression")

CostRatio = Annotated[float, Field(gt=0.0, le=1.0)]

CostRatios = Annotated[list[CostRatio], Field(min_length=1), AfterValidator(validate_cost_ratios)]

Checkpoints = Annotated[list[PositiveFloat], AfterValidator(validate_ascending)]

Interval = Annotated[tuple[float, float], AfterValidator(validate_interval)]

InitCounts = Annotated[list[NonNegativeInt], Field(min_length=1)]

BiasExpression = Annotated[str, AfterValidator(validate_expression)]
