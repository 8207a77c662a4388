"""Fractal wavefunctions in hard-wall and measurement-defined boxes."""

__version__ = "0.1.0"

from .numerics import (BudgetError, DomainError, FitError, NumericsError, RangeError,  # noqa: E402
                       complex_erf, theta3)
from .propagators import KernelParams, SpectralState, WaveField  # noqa: E402
from .zeno import ZenoSchedule, gmn_matrix, zeno_evolve  # noqa: E402
from .relativistic import RelativisticParams  # noqa: E402

__all__ = [
    "BudgetError", "DomainError", "FitError", "NumericsError", "RangeError",
    "KernelParams", "RelativisticParams", "SpectralState", "WaveField", "ZenoSchedule",
    "complex_erf", "gmn_matrix", "theta3", "zeno_evolve", "__version__",
]
