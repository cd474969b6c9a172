"""Restricted execution of candidate predictor source.

Candidate code sees numpy, math, and random plus a curated set of
builtins. There is no open(), and __import__ refuses everything outside
the module allow-list, so file, socket, and process probes die with an
ordinary exception that the worker turns into an error response. While
candidate code runs, stdout is swapped for stderr so a stray print can
never corrupt the response stream.

This is best-effort containment, not a security boundary. Run the worker
inside a container when the code source is untrusted.
"""

import builtins as _builtins
import hashlib
import math
import random
import sys
import traceback

import numpy as np

_ALLOWED_MODULES = {"numpy", "math", "random"}

_SAFE_BUILTIN_NAMES = (
    "abs", "all", "any", "bool", "callable", "complex", "dict", "divmod",
    "enumerate", "filter", "float", "frozenset", "getattr", "hasattr",
    "hash", "int", "isinstance", "issubclass", "iter", "len", "list",
    "map", "max", "min", "next", "object", "pow", "range", "repr",
    "reversed", "round", "set", "slice", "sorted", "str", "sum", "tuple",
    "type", "zip",
    # class/function machinery and the exceptions candidates may raise
    "__build_class__", "staticmethod", "classmethod", "property", "super",
    "Exception", "BaseException", "ArithmeticError", "AssertionError",
    "AttributeError", "IndexError", "KeyError", "LookupError",
    "NameError", "NotImplementedError", "OverflowError", "RuntimeError",
    "StopIteration", "TypeError", "ValueError", "ZeroDivisionError",
)


class CandidateError(Exception):
    """Execution failure that becomes a status=error response."""

    def __init__(self, message, traceback_text=""):
        super().__init__(message)
        self.traceback_text = traceback_text


def _restricted_import(name, globals=None, locals=None, fromlist=(), level=0):
    root = name.partition(".")[0]
    if level != 0 or root not in _ALLOWED_MODULES:
        raise ImportError(f"import of {name!r} is not allowed in candidate code")
    return _builtins.__import__(name, globals, locals, fromlist, level)


def _stderr_print(*args, **kwargs):
    kwargs["file"] = sys.stderr
    _builtins.print(*args, **kwargs)


def _build_namespace():
    safe = {name: getattr(_builtins, name) for name in _SAFE_BUILTIN_NAMES}
    safe["__import__"] = _restricted_import
    safe["print"] = _stderr_print
    safe["True"], safe["False"], safe["None"] = True, False, None
    return {
        "__builtins__": safe,
        "__name__": "candidate",
        "np": np,
        "numpy": np,
        "math": math,
        "random": random,
    }


def request_seed(request_id: str, base_seed: int) -> int:
    """Per-request seed: first 4 digest bytes XOR the engine seed.

    Must stay identical to the engine's derivation so in-process and
    worker execution of the same candidate agree bit for bit.
    """
    digest = hashlib.sha256(request_id.encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big") ^ (base_seed & 0xFFFFFFFF)


def execute(code, function_name, trajectories, k, pred_len, request_id, base_seed):
    """Run one candidate over one scene, returning a [k, A, pred_len, 2] array.

    Every failure raises CandidateError; nothing the candidate does may
    escape to the caller in any other form.
    """
    try:
        history = np.asarray(trajectories, dtype=float)
    except (TypeError, ValueError) as exc:
        raise CandidateError(f"trajectories are not a numeric array: {exc}")
    if history.ndim != 3 or history.shape[-1] != 2:
        raise CandidateError(
            f"trajectories must have shape [num_agents, t_obs, 2], got {history.shape}"
        )

    namespace = _build_namespace()
    real_stdout = sys.stdout
    sys.stdout = sys.stderr
    try:
        try:
            exec(compile(code, "<candidate>", "exec"), namespace)
        except BaseException as exc:
            raise CandidateError(
                f"candidate failed to load: {exc}", traceback.format_exc()
            ) from None
        func = namespace.get(function_name)
        if not callable(func):
            raise CandidateError(f"candidate defines no callable {function_name!r}")

        seed32 = request_seed(request_id, base_seed)
        np.random.seed(seed32)
        random.seed(seed32)
        try:
            result = func(history)
        except BaseException as exc:
            raise CandidateError(
                f"candidate raised {type(exc).__name__}: {exc}",
                traceback.format_exc(),
            ) from None
    finally:
        sys.stdout = real_stdout

    try:
        arr = np.asarray(result, dtype=float)
    except (TypeError, ValueError) as exc:
        raise CandidateError(f"predictions are not a rectangular numeric array: {exc}")
    expected = (k, history.shape[0], pred_len, 2)
    if arr.shape != expected:
        raise CandidateError(
            f"predictions shape {arr.shape} does not match expected {expected}"
        )
    if not np.all(np.isfinite(arr)):
        raise CandidateError("predictions contain non-finite values")
    return arr
