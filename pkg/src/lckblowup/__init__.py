"""Numerical certification of l.c.K. metrics on point blow-ups."""
from .jets import BACKEND, available_backends, set_backend

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__", "available_backends", "set_backend"]
