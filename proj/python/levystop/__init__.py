"""Threshold stopping rules for Levy models.

Thin wrapper around the compiled extension: model catalog, the three
stopping-problem solvers, scale functions, Appell families, and the Monte
Carlo verifier.
"""

from ._core import (
    AppellFamily,
    Model,
    ScaleFunction,
    Solution,
    extrema_samples,
    first_passage_transform,
    solve,
    verify,
)

__version__ = "0.1.0"

__all__ = [
    "AppellFamily",
    "Model",
    "ScaleFunction",
    "Solution",
    "extrema_samples",
    "first_passage_transform",
    "solve",
    "verify",
    "__version__",
]
