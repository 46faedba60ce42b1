"""Optimal legalization of cells in one row and in two adjacent rows."""

from .double_row import DoubleRowInstance, DoubleRowSolution, Gap
from .errors import DomainError, InfeasibleError, OracleLimitError, RowLegalError, ValidationError
from .pwq import PiecewiseQuadratic, Quadratic
from .shiftheap import ShiftHeap
from .single_row import Cell, SingleRowInstance, SingleRowSolution

__all__ = [
    "Cell", "DoubleRowInstance", "DoubleRowSolution", "DomainError", "Gap", "InfeasibleError",
    "OracleLimitError", "PiecewiseQuadratic", "Quadratic", "RowLegalError", "ShiftHeap",
    "SingleRowInstance", "SingleRowSolution", "ValidationError",
]
