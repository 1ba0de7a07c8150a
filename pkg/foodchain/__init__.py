"""
foodchain: randomly switched Lotka-Volterra food chains.

Model definition, closed-form equilibrium algebra and persistence
classification, simulation of the switched process, occupation statistics,
bracket and sensitivity analysis.
"""
__version__ = '0.1.0'

from .errors import FoodChainError  # noqa: E402
from .models import CoefficientTable, Mode, ModelSpec, validate_model  # noqa: E402

__all__ = ['CoefficientTable', 'FoodChainError', 'Mode', 'ModelSpec', 'validate_model', '__version__']
