"""Numerical laboratory for z-measures on partitions and signatures and their
determinantal correlation kernels."""

from .errors import (BudgetError, ConvergenceError, DomainError, ParameterError, PoleError,
                     SpectrumError, ZMeasureError)
from .measures import ZABParams, ZWParams, ZXiParams

__version__ = "0.1.0"

__all__ = [
    "BudgetError", "ConvergenceError", "DomainError", "ParameterError", "PoleError",
    "SpectrumError", "ZMeasureError", "ZABParams", "ZWParams", "ZXiParams",
]
