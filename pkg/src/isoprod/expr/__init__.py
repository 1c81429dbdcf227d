from .models import (
    CES,
    CobbDouglas,
    FunctionModel,
    Generic,
    Homothetic,
    PerfectSubstitute,
    as_model,
    lower,
    polynomial,
)
from .nodes import (
    DomainError,
    Expr,
    check_point,
    const,
    differentiate,
    evaluate,
    max_var_index,
    substitute,
    to_text,
    var,
)
from .parser import ParseError, parse, parse_curve

__all__ = [
    "CES",
    "CobbDouglas",
    "DomainError",
    "Expr",
    "FunctionModel",
    "Generic",
    "Homothetic",
    "ParseError",
    "PerfectSubstitute",
    "as_model",
    "check_point",
    "const",
    "differentiate",
    "evaluate",
    "lower",
    "max_var_index",
    "parse",
    "parse_curve",
    "polynomial",
    "substitute",
    "to_text",
    "var",
]
