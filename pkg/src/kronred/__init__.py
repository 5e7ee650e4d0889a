"""Kron reduction of nonlinear resistive and memristive networks."""
__version__ = "0.1.0"
