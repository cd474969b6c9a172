"""JSON-per-line stdio worker.

Each stdin line is one request:

    {"id": str, "code": str, "function_name": str,
     "trajectories": [[...]], "k": int, "pred_len": int}

and produces exactly one response line:

    {"id": ..., "status": "ok", "predictions": [[...]], "wall_time_ms": int}
    {"id": ..., "status": "error", "message": str, "traceback": str,
     "wall_time_ms": int}

A line that does not parse as a JSON object answers with id "unknown".
Requests are handled serially; the process exits 0 on EOF. stdout carries
nothing but response lines; all diagnostics go to stderr.
"""

import argparse
import json
import sys
import time

from .sandbox import CandidateError, execute


def _error(request_id, message, traceback_text="", wall_time_ms=0):
    return {
        "id": request_id,
        "status": "error",
        "message": message,
        "traceback": traceback_text,
        "wall_time_ms": wall_time_ms,
    }


def handle_line(line: str, base_seed: int) -> dict:
    try:
        request = json.loads(line)
    except json.JSONDecodeError as exc:
        return _error("unknown", f"unparseable request line: {exc}")
    if not isinstance(request, dict) or "id" not in request:
        return _error("unknown", "request must be a JSON object with an id")
    request_id = str(request["id"])

    try:
        code = request["code"]
        trajectories = request["trajectories"]
        k = int(request.get("k", 20))
        pred_len = int(request.get("pred_len", 12))
        function_name = str(request.get("function_name", "predict_trajectory"))
    except (KeyError, TypeError, ValueError) as exc:
        return _error(request_id, f"bad request fields: {exc!r}")
    if not isinstance(code, str):
        return _error(request_id, "code must be a string")
    if k < 1 or pred_len < 1:
        return _error(
            request_id, f"k and pred_len must be positive, got k={k} pred_len={pred_len}"
        )

    start = time.perf_counter()
    try:
        predictions = execute(
            code, function_name, trajectories, k, pred_len,
            request_id=request_id, base_seed=base_seed,
        )
    except CandidateError as exc:
        wall = int((time.perf_counter() - start) * 1000)
        return _error(request_id, str(exc), exc.traceback_text, wall)
    wall = int((time.perf_counter() - start) * 1000)
    return {
        "id": request_id,
        "status": "ok",
        "predictions": predictions.tolist(),
        "wall_time_ms": wall,
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="candidate-runner",
        description="execute predictor candidates over a JSON-line stdio protocol",
    )
    parser.add_argument("--seed", type=int, required=True,
                        help="engine seed mixed into every per-request seed")
    args = parser.parse_args(argv)

    for line in sys.stdin:
        response = handle_line(line, args.seed)
        sys.stdout.write(json.dumps(response) + "\n")
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
