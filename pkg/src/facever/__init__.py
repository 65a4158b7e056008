"""Face verification benchmark: CNN feature learning, distance measures,
Joint Bayesian metric learning, and a 10-fold evaluation harness."""

__version__ = "0.1.0"
