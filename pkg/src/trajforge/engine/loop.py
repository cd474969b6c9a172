"""The generation loop: init, reflect, crossover, mutate, evaluate, report.

Randomness is split from one SeedSequence per run (selection and
mutation draw from separate streams; per-request candidate seeds are
derived from request ids inside the runner), evaluation is sequential,
and reports contain no timestamps or host paths, so a fixed seed plus a
deterministic provider reproduces a run bit for bit.
"""

from __future__ import annotations

import ast
import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from ..core import EvalMetrics, PredictionSet, best_index_histogram, evaluate_min_of_k
from ..errors import (
    CodeExtractionError,
    ContractViolation,
    DataValidationError,
    ProviderError,
    SamplingError,
    SelectionError,
)
from ..gateway import ChatRequest
from ..prompts import (
    FUNC_NAME,
    PROBLEM_DESCRIPTION,
    PromptBundle,
    ReflectionMemory,
    default_bundle,
    extract_code_block,
    format_stats_block,
    render,
)
from .candidate import Birth, Candidate, EliteArchive, IdAllocator, RunConfig, Status
from .runners import native_marker, resolve_entry_point
from .selection import cges_sample, select_parents

SEED_MARKER = "# native-predictor: cvm"


def native_seed_code(bundle: PromptBundle) -> str:
    """Seed candidate: the trivial extrapolation function behind a marker.

    The marker line routes execution to the native registry when no
    worker process is in play; under the external worker it is just a
    comment above the same function.
    """
    return SEED_MARKER + "\n" + bundle.seed_function


def evaluate_candidate(candidate: Candidate, scenes, runner, config: RunConfig) -> Candidate:
    """Run the candidate over all scenes and aggregate best-of-K metrics."""
    if candidate.status != Status.PENDING:
        raise ContractViolation(f"candidate {candidate.id} is not pending")
    if not scenes:
        raise ContractViolation("cannot evaluate on zero scenes")

    if native_marker(candidate.code) is None:
        try:
            function_name = resolve_entry_point(candidate.code)
        except DataValidationError as exc:
            candidate.mark_failed(Status.EXEC_ERROR, str(exc))
            return candidate
    else:
        function_name = FUNC_NAME

    per_scene: list[EvalMetrics] = []
    for scene in scenes:
        result = runner.run(
            code=candidate.code,
            function_name=function_name,
            history=scene.history.data,
            k=config.k_samples,
            t_pred=config.t_pred,
            request_id=f"{candidate.id}:{scene.scene_id}",
            timeout=config.eval_timeout_seconds,
        )
        if result.status != Status.OK:
            candidate.mark_failed(
                result.status, f"scene {scene.scene_id}: {result.message}"
            )
            return candidate
        per_scene.append(
            evaluate_min_of_k(PredictionSet(result.predictions), scene.future)
        )

    mean_ade = float(np.mean([m.min_ade for m in per_scene]))
    mean_fde = float(np.mean([m.min_fde for m in per_scene]))
    counts = Counter(m.best_k for m in per_scene)
    modal_k = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[0][0]
    aggregate = EvalMetrics(
        min_ade=mean_ade,
        min_fde=mean_fde,
        best_k=modal_k,
        objective_j=0.6 * mean_ade + 0.4 * mean_fde,
    )
    histogram = best_index_histogram(per_scene, config.k_samples)
    candidate.mark_ok(
        metrics=aggregate,
        objective_j=config.w_ade * mean_ade + config.w_fde * mean_fde,
        histogram=histogram,
    )
    return candidate


def _screened_candidate(reply_or_code, alloc, birth, generation, parents, from_reply=True):
    cid = alloc.take()
    if from_reply:
        try:
            code = extract_code_block(reply_or_code)
        except CodeExtractionError:
            broken = Candidate(
                id=cid, code=reply_or_code, birth=birth,
                generation=generation, parents=parents,
            )
            broken.mark_failed(Status.EXEC_ERROR, "no code emitted")
            return broken
    else:
        code = reply_or_code
    candidate = Candidate(
        id=cid, code=code, birth=birth, generation=generation, parents=parents
    )
    try:
        ast.parse(code)
    except SyntaxError as exc:
        candidate.mark_failed(Status.EXEC_ERROR, f"syntax error: {exc}")
    return candidate


def initialize_population(config: RunConfig, provider, bundle: PromptBundle, alloc: IdAllocator, seed_code: str = None) -> list:
    """Seed candidate plus init_count generated ones, syntax-screened."""
    population = [
        _screened_candidate(
            seed_code or native_seed_code(bundle),
            alloc, Birth.SEED, 0, [], from_reply=False,
        )
    ]
    prompt = render(
        "user_init",
        {
            "task_description": bundle.rendered_task(),
            "seed_function": bundle.seed_function,
            "func_name": FUNC_NAME,
            "initial_long-term_reflection": bundle.external_knowledge,
        },
    )
    for _ in range(config.init_count):
        reply = provider.complete(
            ChatRequest(system=bundle.system_generator, user=prompt)
        )
        population.append(
            _screened_candidate(reply, alloc, Birth.INIT, 0, [])
        )
    return population


def short_term_reflection_step(worse: Candidate, better: Candidate, provider, bundle: PromptBundle) -> str:
    prompt = render(
        "user_short_reflection",
        {
            "func_name": FUNC_NAME,
            "problem_desc": PROBLEM_DESCRIPTION,
            "func_desc": bundle.function_description,
            "worse_code": worse.code,
            "better_code": better.code,
            "stats_info_worse": format_stats_block(worse.histogram),
            "stats_info_better": format_stats_block(better.histogram),
        },
    )
    return provider.complete(
        ChatRequest(system=bundle.system_reflector, user=prompt)
    )


def long_term_reflection_step(memory: ReflectionMemory, worse: Candidate, better: Candidate, provider, bundle: PromptBundle) -> None:
    prompt = render(
        "user_long_reflection",
        {
            "function_name": FUNC_NAME,
            "problem_description": PROBLEM_DESCRIPTION,
            "function_description": bundle.function_description,
            "worse_code": worse.code,
            "better_code": better.code,
        },
    )
    reply = provider.complete(
        ChatRequest(system=bundle.system_reflector, user=prompt)
    )
    memory.append_long_term(reply)


def crossover_step(worse: Candidate, better: Candidate, reflection: str, provider, bundle: PromptBundle, alloc: IdAllocator, generation: int) -> Candidate:
    prompt = render(
        "user_crossover",
        {
            "task_description": bundle.rendered_task(),
            "function_signature0": bundle.signature("_v0"),
            "function_signature1": bundle.signature("_v1"),
            "worse_code": worse.code,
            "better_code": better.code,
            "short_term_reflection": reflection,
            "function_name": FUNC_NAME,
        },
    )
    reply = provider.complete(
        ChatRequest(system=bundle.system_generator, user=prompt)
    )
    return _screened_candidate(
        reply, alloc, Birth.CROSSOVER, generation, [worse.id, better.id]
    )


def elitist_mutation_step(archive: EliteArchive, lineage: dict, memory: ReflectionMemory, provider, bundle: PromptBundle, rng, config: RunConfig, alloc: IdAllocator, generation: int):
    """With probability mutation_rate, mutate a CGES-sampled elite."""
    if rng.random() >= config.mutation_rate:
        return None
    try:
        base_id = cges_sample(archive, config.cges_temperature, rng)
    except SamplingError:
        return None
    base = lineage[base_id]
    prompt = render(
        "user_mutation",
        {
            "user_generator": bundle.rendered_task(),
            "reflection": memory.long_term_text(),
            "func_signature1": bundle.signature("_v1"),
            "elitist_code": base.code,
            "stats_info_elitist": format_stats_block(base.histogram),
            "func_name": FUNC_NAME,
        },
    )
    reply = provider.complete(
        ChatRequest(system=bundle.system_generator, user=prompt)
    )
    return _screened_candidate(reply, alloc, Birth.MUTATION, generation, [base.id])


def _candidate_record(candidate: Candidate) -> dict:
    metrics = candidate.metrics
    return {
        "id": candidate.id,
        "birth": candidate.birth.value,
        "generation": candidate.generation,
        "parents": list(candidate.parents),
        "status": candidate.status.value,
        "objective_j": candidate.objective_j,
        "min_ade": metrics.min_ade if metrics else None,
        "min_fde": metrics.min_fde if metrics else None,
        "best_k": metrics.best_k if metrics else None,
        "histogram": candidate.histogram,
        "failure": candidate.failure,
    }


@dataclass
class RunReport:
    config: dict
    generations: list = field(default_factory=list)
    candidates: list = field(default_factory=list)
    best: dict = None
    aborted: str = None

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "generations": self.generations,
            "candidates": self.candidates,
            "best": self.best,
            "aborted": self.aborted,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def persist(self, run_dir, lineage: dict) -> Path:
        run_dir = Path(run_dir)
        (run_dir / "candidates").mkdir(parents=True, exist_ok=True)
        (run_dir / "report.json").write_text(self.to_json() + "\n")
        for candidate in lineage.values():
            (run_dir / "candidates" / f"{candidate.id}.txt").write_text(candidate.code)
        with open(run_dir / "metrics.jsonl", "w") as fh:
            for record in self.candidates:
                if record["status"] != Status.PENDING.value:
                    fh.write(json.dumps(record, sort_keys=True) + "\n")
        return run_dir / "report.json"


def evolve(config: RunConfig, scenes, provider, runner, bundle: PromptBundle = None, run_dir=None) -> RunReport:
    """Full evolutionary run; always returns a report, aborting gracefully
    on provider failure with whatever was completed."""
    if not scenes:
        raise ContractViolation("evolve needs at least one training scene")
    bundle = bundle or default_bundle()
    root = np.random.SeedSequence(config.rng_seed)
    selection_seq, mutation_seq = root.spawn(2)
    selection_rng = np.random.default_rng(selection_seq)
    mutation_rng = np.random.default_rng(mutation_seq)

    alloc = IdAllocator()
    lineage: dict = {}
    archive = EliteArchive()
    memory = ReflectionMemory()
    report = RunReport(config=asdict(config))

    def register(candidates):
        evaluated_ids = []
        for candidate in candidates:
            if candidate.status == Status.PENDING:
                evaluate_candidate(candidate, scenes, runner, config)
            lineage[candidate.id] = candidate
            if candidate.status == Status.OK:
                archive.append(candidate)
            evaluated_ids.append(candidate.id)
        return evaluated_ids

    def record_generation(generation, evaluated_ids):
        ok_now = [
            lineage[cid].objective_j
            for cid in evaluated_ids
            if lineage[cid].status == Status.OK
        ]
        report.generations.append(
            {
                "generation": generation,
                "best_so_far_j": archive.best().objective_j if len(archive) else None,
                "generation_best_j": min(ok_now) if ok_now else None,
                "evaluated": evaluated_ids,
            }
        )

    population: list = []
    try:
        population = initialize_population(config, provider, bundle, alloc)
        record_generation(0, register(population))

        for generation in range(1, config.max_generations + 1):
            offspring = []
            successful = [c for c in population if c.status == Status.OK]
            if len(successful) >= 2:
                for _ in range(config.population_size):
                    if selection_rng.random() >= config.crossover_rate:
                        continue
                    try:
                        worse, better = select_parents(
                            successful, config.elite_ratio, selection_rng
                        )
                    except SelectionError:
                        break
                    reflection = short_term_reflection_step(
                        worse, better, provider, bundle
                    )
                    memory.set_short_term(reflection)
                    offspring.append(
                        crossover_step(
                            worse, better, memory.short_term,
                            provider, bundle, alloc, generation,
                        )
                    )
            evaluated_ids = register(offspring)

            ok_children = sorted(
                (c for c in offspring if c.status == Status.OK),
                key=lambda c: (c.objective_j, c.id),
            )
            if len(ok_children) >= 2:
                long_term_reflection_step(
                    memory, ok_children[-1], ok_children[0], provider, bundle
                )

            mutant = elitist_mutation_step(
                archive, lineage, memory, provider, bundle,
                mutation_rng, config, alloc, generation,
            )
            if mutant is not None:
                evaluated_ids += register([mutant])
                offspring.append(mutant)

            population = offspring
            record_generation(generation, evaluated_ids)
    except ProviderError as exc:
        report.aborted = str(exc)

    report.candidates = [
        _candidate_record(lineage[cid]) for cid in sorted(lineage)
    ]
    if len(archive):
        best_entry = archive.best()
        report.best = {
            "id": best_entry.candidate_id,
            "objective_j": best_entry.objective_j,
            "generation": best_entry.generation,
            "code_file": f"candidates/{best_entry.candidate_id}.txt",
        }
    if run_dir is not None:
        report.persist(run_dir, lineage)
    return report
