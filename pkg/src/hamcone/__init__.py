"""Positive solutions of two-equation Hammerstein systems located in cones.

Typical use::

    from hamcone import Grid, GridPair, example_system, newton_solve

    grid = Grid(0.0, 1.0, 257)
    report = newton_solve(example_system(), grid, GridPair.constant(grid, 3.0, 3.0))
"""
from .cone import ConeParams, in_cone, localize, order_leq
from .constants import compute_constants
from .expr import Expression, parse
from .hypotheses import check_system, lambda_supremum
from .kernels import BuiltinK1, BuiltinK2, CustomKernel, k1_constants, k2_constants
from .quadrature import DiscreteOperator, Grid, GridPair, integrate
from .solver import monotone_iterate, newton_solve, picard, residual
from .system import Equation, SystemSpec, example_system

__version__ = "0.1.0"

__all__ = [
    "BuiltinK1",
    "BuiltinK2",
    "ConeParams",
    "CustomKernel",
    "DiscreteOperator",
    "Equation",
    "Expression",
    "Grid",
    "GridPair",
    "SystemSpec",
    "check_system",
    "compute_constants",
    "example_system",
    "in_cone",
    "integrate",
    "k1_constants",
    "k2_constants",
    "lambda_supremum",
    "localize",
    "monotone_iterate",
    "newton_solve",
    "order_leq",
    "parse",
    "picard",
    "residual",
]
