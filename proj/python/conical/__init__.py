"""Semiclassical dynamics through conical potential singularities."""

from ._core import (
    ConfigError,
    NumericalError,
    Potential,
    __version__,
    evolve,
    flow,
    make_coherent,
    run,
    variational_jacobian,
    wigner,
)

__all__ = [
    "ConfigError",
    "NumericalError",
    "Potential",
    "__version__",
    "evolve",
    "flow",
    "make_coherent",
    "run",
    "variational_jacobian",
    "wigner",
]
