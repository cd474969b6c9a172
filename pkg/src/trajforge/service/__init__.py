"""HTTP service around evaluation, benchmarking, and evolution runs."""

from .app import app

__all__ = ["app"]
