from nlgauge.smoothcalc.dual import Dual, cos, exp, log, primal, sin, sqrt, tanh
from nlgauge.smoothcalc.expr import (
    ExprError,
    ExprSyntaxError,
    UnknownIdentifierError,
    compile_expr,
    parse_expr,
    to_source,
)
from nlgauge.smoothcalc.maps import (
    Chart,
    NonFiniteError,
    SmoothMap,
    as_array,
    evaluate,
    fd_jacobian,
    jacobian,
    sample_points,
    value_and_jacobian,
)

__all__ = [
    "Chart", "Dual", "ExprError", "ExprSyntaxError", "NonFiniteError", "SmoothMap",
    "UnknownIdentifierError", "as_array", "compile_expr", "cos", "evaluate", "exp",
    "fd_jacobian", "jacobian", "log", "parse_expr", "primal", "sample_points", "sin",
    "sqrt", "tanh", "to_source", "value_and_jacobian",
]
