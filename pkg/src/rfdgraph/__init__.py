"""Decide residual finite-dimensionality of graph C*-algebras.

Graphs are given in a small presentation language (a finite core multigraph
plus infinite stars and rays).  :func:`decide_rfd` checks the four graph
conditions with witnesses; :func:`periodic_density_check` looks for periodic
boundary points in every small basic open set of the boundary path space,
which gives an independent answer to the same question.
"""

from .boundary import CylinderSet, FinitePath, Lasso, RayTail, format_point, parse_cylinder, parse_point
from .conditions import ConditionReport, decide_rfd
from .groupoid import (
    GroupoidElement,
    compose,
    invert,
    isotropy,
    konig_backward_chain,
    orbit,
    path_count_into,
    periodic_density_check,
)
from .presentation import OMEGA, GraphPresentation, PresentationError, parse, serialize

__all__ = [
    "OMEGA",
    "GraphPresentation",
    "PresentationError",
    "parse",
    "serialize",
    "ConditionReport",
    "decide_rfd",
    "CylinderSet",
    "FinitePath",
    "Lasso",
    "RayTail",
    "parse_point",
    "parse_cylinder",
    "format_point",
    "GroupoidElement",
    "compose",
    "invert",
    "isotropy",
    "orbit",
    "path_count_into",
    "konig_backward_chain",
    "periodic_density_check",
]
