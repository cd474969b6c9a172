"""Stdio worker executing trajectory predictor candidates."""

from .sandbox import CandidateError, execute, request_seed
from .worker import handle_line, main

__all__ = ["CandidateError", "execute", "handle_line", "main", "request_seed"]
