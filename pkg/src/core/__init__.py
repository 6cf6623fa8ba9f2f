"""
Core functionality: designs, pick-freeze simulation, LASSO, bounds and recovery.
"""

from .pipeline import RPFPipeline
from .experiments import ExperimentRunner
from .validator import BoundValidator, RunValidator

__all__ = ["RPFPipeline", "ExperimentRunner", "BoundValidator", "RunValidator"]
