"""
Command-line interface for the randomized pick-freeze estimator.
"""
