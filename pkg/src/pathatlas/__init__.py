"""pathatlas: exact step-curve calculus and constructive atlases for path spaces."""

from .intervals import Interval, Partition
from .stepcurves import StepCurve, concat, concat_many, sup_distance
from .curves import (
    LinearCurve,
    RegCurve,
    SmoothScalarRepar,
    curve_order,
    derivative_split,
    eval_curve,
    linear_push,
    norm,
    primitive,
    reparametrize_affine,
    restrict,
)
from .analysis import (
    change_of_variables,
    compose_smooth,
    image_net,
    step_approximate,
)
from .smoothmaps import MatrixField, SmoothMap

__all__ = [
    "Interval",
    "Partition",
    "StepCurve",
    "LinearCurve",
    "RegCurve",
    "SmoothScalarRepar",
    "concat",
    "concat_many",
    "sup_distance",
    "curve_order",
    "derivative_split",
    "eval_curve",
    "linear_push",
    "norm",
    "primitive",
    "reparametrize_affine",
    "restrict",
    "change_of_variables",
    "compose_smooth",
    "image_net",
    "step_approximate",
    "SmoothMap",
    "MatrixField",
]

__version__ = "0.1.0"
