"""Beta-ensemble samplers and stochastic-domination checks."""

from .errors import NumericalError, ParameterError
from .rng import RngStream

__version__ = "0.1.0"

__all__ = ["NumericalError", "ParameterError", "RngStream", "__version__"]
