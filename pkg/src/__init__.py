"""
Randomized Pick-Freeze Sobol Estimator

Estimates sparse first-order Sobol indices of high-dimensional additive
models from a few multiple pick-freeze replications and an l1-penalized
regression, and evaluates the recovery guarantees attached to the method.
"""

__version__ = "1.0.0"
