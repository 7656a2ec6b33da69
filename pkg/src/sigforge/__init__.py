"""Stopping-time signatures of cryptographic algorithms.

Prime generation, collision-finding walks and discrete-log solvers, with the
tools to normalize their running times and compare them to reference laws.
"""
from sigforge.kernels import BACKEND, COMPILED

__version__ = "0.1.0"
__all__ = ["BACKEND", "COMPILED", "__version__"]
