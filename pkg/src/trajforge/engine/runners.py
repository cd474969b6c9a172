"""Dispatch of candidate code to an execution backend.

Two backends share one result contract: RegistryRunner runs code (or a
named native predictor) in-process and is what offline tests and
provider-free runs use; SubprocessRunner drives an external worker over
a JSON-per-line stdin/stdout protocol and enforces the wall-clock
timeout by killing and respawning the worker.

Both seed candidate randomness identically: a 32-bit value from the
sha256 of the request id, XORed with the engine seed, so the same
(code, input, seed) triple reproduces bit-identical predictions on
either backend.
"""

from __future__ import annotations

import ast
import hashlib
import json
import queue
import re
import subprocess
import threading
import time
from dataclasses import dataclass

import numpy as np

from ..baselines import get_heuristic
from ..errors import DataValidationError, UnknownHeuristicError
from .candidate import Status

NATIVE_MARKER_RE = re.compile(r"^#\s*native-predictor:\s*(\S+)", re.MULTILINE)

ENTRY_POINT_PREFIX = "predict_trajectory"


@dataclass(frozen=True)
class RunnerResult:
    status: Status
    predictions: object = None
    message: str = ""
    wall_time_ms: float = 0.0


def request_seed(request_id: str, base_seed: int) -> int:
    digest = hashlib.sha256(request_id.encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big") ^ (base_seed & 0xFFFFFFFF)


def native_marker(code: str):
    match = NATIVE_MARKER_RE.search(code)
    return match.group(1) if match else None


def resolve_entry_point(code: str) -> str:
    """Name of the last top-level predict_trajectory* function in the code."""
    try:
        tree = ast.parse(code)
    except SyntaxError as exc:
        raise DataValidationError(f"candidate code does not parse: {exc}") from None
    names = [
        node.name
        for node in tree.body
        if isinstance(node, ast.FunctionDef)
        and node.name.startswith(ENTRY_POINT_PREFIX)
    ]
    if not names:
        raise DataValidationError(
            f"no function named {ENTRY_POINT_PREFIX}* defined at top level"
        )
    return names[-1]


def validate_predictions(raw, k: int, agents: int, t_pred: int) -> np.ndarray:
    arr = np.asarray(raw, dtype=float)
    expected = (k, agents, t_pred, 2)
    if arr.shape != expected:
        raise DataValidationError(
            f"predictions have shape {arr.shape}, expected {expected}"
        )
    if not np.all(np.isfinite(arr)):
        raise DataValidationError("predictions contain non-finite values")
    return arr


class RegistryRunner:
    """In-process execution backend.

    Code whose first matching line is ``# native-predictor: <name>`` is
    dispatched to the predictor registry under a request-derived seed;
    anything else is exec'd with numpy/math/random available and its
    entry function called on the history array. No preemptive timeout
    exists in-process, so this backend is for trusted or scripted code.
    """

    def __init__(self, seed: int = 0):
        self.seed = seed

    def run(
        self,
        code: str,
        function_name: str,
        history: np.ndarray,
        k: int,
        t_pred: int,
        request_id: str,
        timeout: float = None,
    ) -> RunnerResult:
        start = time.monotonic()
        call_seed = request_seed(request_id, self.seed)
        marker = native_marker(code)
        try:
            if marker is not None:
                entry = get_heuristic(marker)
                preds = entry(history, k, t_pred, seed=np.random.default_rng(call_seed))
                raw = preds.data
            else:
                import math
                import random

                namespace = {
                    "np": np,
                    "numpy": np,
                    "math": math,
                    "random": random,
                    "__builtins__": __builtins__,
                }
                np.random.seed(call_seed)
                exec(compile(code, "<candidate>", "exec"), namespace)
                fn = namespace.get(function_name)
                if fn is None:
                    raise DataValidationError(
                        f"function {function_name!r} not defined by candidate code"
                    )
                raw = fn(np.array(history, dtype=float))
            arr = validate_predictions(raw, k, history.shape[0], t_pred)
        except (UnknownHeuristicError, SyntaxError) as exc:
            return RunnerResult(Status.EXEC_ERROR, message=str(exc))
        except DataValidationError as exc:
            return RunnerResult(Status.INVALID_OUTPUT, message=str(exc))
        except Exception as exc:  # candidate code can raise anything
            return RunnerResult(
                Status.EXEC_ERROR, message=f"{type(exc).__name__}: {exc}"
            )
        return RunnerResult(
            Status.OK,
            predictions=arr,
            wall_time_ms=(time.monotonic() - start) * 1000.0,
        )


class SubprocessRunner:
    """Drives one worker process speaking the JSON-line protocol.

    A request that exceeds the timeout gets the worker killed and a
    fresh one spawned for the next call; the stuck candidate is
    reported as timeout.
    """

    def __init__(self, argv=None, seed: int = 0):
        self.seed = seed
        self.argv = list(argv) if argv else ["candidate-runner", "--seed", str(seed)]
        self._proc = None
        self._lines = None

    def _spawn(self):
        self._proc = subprocess.Popen(
            self.argv,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            text=True,
            bufsize=1,
        )
        self._lines = queue.Queue()

        def pump(proc, sink):
            for line in proc.stdout:
                sink.put(line)

        threading.Thread(
            target=pump, args=(self._proc, self._lines), daemon=True
        ).start()

    def _ensure_worker(self):
        if self._proc is None or self._proc.poll() is not None:
            self._spawn()

    def close(self):
        if self._proc is not None and self._proc.poll() is None:
            self._proc.kill()
            self._proc.wait()
        self._proc = None

    def run(
        self,
        code: str,
        function_name: str,
        history: np.ndarray,
        k: int,
        t_pred: int,
        request_id: str,
        timeout: float = 20.0,
    ) -> RunnerResult:
        self._ensure_worker()
        request = {
            "id": request_id,
            "code": code,
            "function_name": function_name,
            "trajectories": np.asarray(history, dtype=float).tolist(),
            "k": k,
            "pred_len": t_pred,
        }
        try:
            self._proc.stdin.write(json.dumps(request) + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            self.close()
            return RunnerResult(Status.EXEC_ERROR, message=f"worker pipe failed: {exc}")

        try:
            line = self._lines.get(timeout=timeout)
        except queue.Empty:
            self.close()
            return RunnerResult(
                Status.TIMEOUT, message=f"no response within {timeout}s; worker killed"
            )

        try:
            response = json.loads(line)
        except json.JSONDecodeError as exc:
            self.close()
            return RunnerResult(
                Status.EXEC_ERROR, message=f"unparseable worker response: {exc}"
            )
        if response.get("id") != request_id:
            self.close()
            return RunnerResult(
                Status.EXEC_ERROR,
                message=f"response id {response.get('id')!r} does not match request",
            )
        wall = float(response.get("wall_time_ms", 0.0))
        if response.get("status") != "ok":
            message = response.get("message", "worker error")
            return RunnerResult(Status.EXEC_ERROR, message=message, wall_time_ms=wall)
        try:
            arr = validate_predictions(
                response.get("predictions"), k, history.shape[0], t_pred
            )
        except DataValidationError as exc:
            return RunnerResult(Status.INVALID_OUTPUT, message=str(exc), wall_time_ms=wall)
        return RunnerResult(Status.OK, predictions=arr, wall_time_ms=wall)
