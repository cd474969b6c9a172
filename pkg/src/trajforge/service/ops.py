"""Operations behind the service endpoints.

Everything here works on core types and returns plain dicts; the wire
schemas in schemas.py validate shapes on the way in and out. Evaluation
of a registered heuristic feeds one sequentially-consumed generator per
(heuristic, split, seed) triple through the scenes in order; evaluation
of raw candidate code goes through the in-process runner under
request ids "eval:<scene_id>", the same ids the evolve op uses for its
held-out check, so re-evaluating a saved candidate file at the run's
seed reproduces the reported numbers exactly.
"""

from __future__ import annotations

from collections import Counter
from pathlib import Path

import numpy as np

from .. import __version__
from ..baselines import get_heuristic, registered_names
from ..core import PredictionSet, best_index_histogram, evaluate_min_of_k
from ..data import ETH_UCY_SPLITS, leave_one_out, load_split
from ..engine import RegistryRunner, RunConfig, Status, evolve, native_marker, resolve_entry_point
from ..errors import DataValidationError, TrajforgeError
from ..gateway import ProviderConfig, build_provider, load_script
from ..prompts import FUNC_NAME, format_stats_block

XDATASET_ROWS = ("social_force", "cvm", "cvm_s", "trajevo_zara1")


def health() -> dict:
    return {"status": "ok", "version": __version__}


def list_heuristics() -> list[dict]:
    out = []
    for name in registered_names():
        entry = get_heuristic(name)
        out.append(
            {
                "name": name,
                "deterministic": entry.spec.deterministic,
                "params": dict(entry.spec.params),
            }
        )
    return out


def _per_scene_metrics_native(name, scenes, k, t_pred, seed):
    entry = get_heuristic(name)
    rng = np.random.default_rng(seed)
    return [
        evaluate_min_of_k(entry(s.history, k, t_pred, seed=rng), s.future)
        for s in scenes
    ]


def _per_scene_metrics_code(code, scenes, k, t_pred, seed):
    runner = RegistryRunner(seed=seed)
    if native_marker(code) is None:
        function_name = resolve_entry_point(code)
    else:
        function_name = FUNC_NAME
    metrics = []
    for scene in scenes:
        result = runner.run(
            code=code,
            function_name=function_name,
            history=scene.history.data,
            k=k,
            t_pred=t_pred,
            request_id=f"eval:{scene.scene_id}",
        )
        if result.status != Status.OK:
            raise DataValidationError(
                f"candidate failed on scene {scene.scene_id}: {result.message}"
            )
        metrics.append(
            evaluate_min_of_k(PredictionSet(result.predictions), scene.future)
        )
    return metrics


def _summarize(per_scene, label, dataset, seed):
    ade = float(np.mean([m.min_ade for m in per_scene]))
    fde = float(np.mean([m.min_fde for m in per_scene]))
    return {
        "heuristic": label,
        "dataset": dataset,
        "seed": seed,
        "scenes": len(per_scene),
        "min_ade": ade,
        "min_fde": fde,
        "objective_j": 0.6 * ade + 0.4 * fde,
    }


def evaluate(
    data_root,
    dataset: str,
    heuristic: str = None,
    code: str = None,
    k: int = 20,
    seeds=(0,),
    subset: str = "test",
) -> dict:
    if (heuristic is None) == (code is None):
        raise DataValidationError("provide exactly one of heuristic name or code")
    split = load_split(data_root, dataset, subset)
    if not split.scenes:
        raise DataValidationError(f"no scenes found under {dataset}/{subset}")
    label = heuristic if heuristic is not None else "candidate"
    records = []
    for seed in seeds:
        if heuristic is not None:
            per_scene = _per_scene_metrics_native(
                heuristic, split.scenes, k, 12, seed
            )
        else:
            per_scene = _per_scene_metrics_code(code, split.scenes, k, 12, seed)
        records.append(_summarize(per_scene, label, dataset, seed))
    mean = {
        "min_ade": float(np.mean([r["min_ade"] for r in records])),
        "min_fde": float(np.mean([r["min_fde"] for r in records])),
        "objective_j": float(np.mean([r["objective_j"] for r in records])),
    }
    return {"records": records, "mean": mean}


def candidate_stats(
    data_root,
    dataset: str,
    heuristic: str = None,
    code: str = None,
    k: int = 20,
    seed: int = 0,
    subset: str = "test",
) -> dict:
    if (heuristic is None) == (code is None):
        raise DataValidationError("provide exactly one of heuristic name or code")
    split = load_split(data_root, dataset, subset)
    if not split.scenes:
        raise DataValidationError(f"no scenes found under {dataset}/{subset}")
    if heuristic is not None:
        per_scene = _per_scene_metrics_native(heuristic, split.scenes, k, 12, seed)
    else:
        per_scene = _per_scene_metrics_code(code, split.scenes, k, 12, seed)
    histogram = best_index_histogram(per_scene, k)
    return {"histogram": histogram, "block": format_stats_block(histogram)}


def _try_eval_cell(name, root, dataset, k, seed):
    try:
        result = evaluate(root, dataset, heuristic=name, k=k, seeds=(seed,))
    except DataValidationError:
        return None
    mean = result["mean"]
    return {"min_ade": mean["min_ade"], "min_fde": mean["min_fde"]}


def bench(data_root, table: str, k: int = 20, seed: int = 0) -> dict:
    if table == "heuristics":
        columns = list(ETH_UCY_SPLITS)
        names = registered_names()
    elif table == "xdataset":
        columns = list(ETH_UCY_SPLITS)
        names = XDATASET_ROWS
    else:
        raise DataValidationError(
            f"unknown table {table!r}; expected heuristics or xdataset"
        )

    rows = []
    for name in names:
        if table == "heuristics":
            cells = {
                col: _try_eval_cell(name, data_root, col, k, seed)
                for col in columns
            }
        else:
            # every column reports the SDD test metrics; heuristics that
            # ignore training data repeat one measurement, the evolved
            # zara1 reference belongs to its source column only
            sdd_cell = _try_eval_cell(name, data_root, "sdd", k, seed)
            if name == "trajevo_zara1":
                cells = {
                    col: (sdd_cell if col == "zara1" else None) for col in columns
                }
            else:
                cells = {col: sdd_cell for col in columns}
        rows.append({"name": name, "cells": cells})
    return {"table": table, "columns": columns, "rows": rows}


def _run_config_from(options: dict) -> RunConfig:
    allowed = set(RunConfig.__dataclass_fields__)
    unknown = set(options) - allowed
    if unknown:
        raise DataValidationError(
            f"unknown run option(s) {sorted(unknown)}; allowed: {sorted(allowed)}"
        )
    return RunConfig(**options)


def _provider_from(spec: dict):
    spec = dict(spec)
    script_path = spec.pop("script_path", None)
    if script_path:
        spec["script"] = load_script(script_path)
    config = ProviderConfig(**spec)
    return build_provider(config)


def run_evolution(
    data_root,
    test_split: str,
    provider_spec: dict,
    run_dir,
    run_options: dict = None,
) -> dict:
    config = _run_config_from(run_options or {})
    provider = _provider_from(provider_spec)
    train_splits, held_out = leave_one_out(data_root, test_split)
    scenes = [scene for split in train_splits for scene in split.scenes]
    if not scenes:
        raise DataValidationError(
            f"no training scenes for leave-one-out test={test_split} under {data_root}"
        )
    runner = RegistryRunner(seed=config.rng_seed)
    report = evolve(config, scenes, provider, runner, run_dir=run_dir)

    out = {
        "run_dir": str(run_dir),
        "report_path": str(Path(run_dir) / "report.json"),
        "aborted": report.aborted,
        "generations": len(report.generations),
        "best": report.best,
        "test": None,
    }
    if report.best is not None:
        code = (Path(run_dir) / report.best["code_file"]).read_text()
        per_scene = _per_scene_metrics_code(
            code, held_out.scenes, config.k_samples, config.t_pred, config.rng_seed
        )
        out["test"] = _summarize(
            per_scene, report.best["id"], test_split, config.rng_seed
        )
    return out
