"""
Test suite for the randomized pick-freeze Sobol estimator.
"""
