"""Evolutionary search over candidate predictor programs."""

from .candidate import (
    ArchiveEntry,
    Birth,
    Candidate,
    EliteArchive,
    IdAllocator,
    RunConfig,
    Status,
)
from .loop import (
    RunReport,
    crossover_step,
    elitist_mutation_step,
    evaluate_candidate,
    evolve,
    initialize_population,
    long_term_reflection_step,
    native_seed_code,
    short_term_reflection_step,
)
from .runners import (
    RegistryRunner,
    RunnerResult,
    SubprocessRunner,
    native_marker,
    request_seed,
    resolve_entry_point,
    validate_predictions,
)
from .selection import (
    UNIFORM_SHARE,
    cges_probabilities,
    cges_sample,
    draw_parent,
    elite_pool,
    select_parents,
)

__all__ = [
    "ArchiveEntry",
    "Birth",
    "Candidate",
    "EliteArchive",
    "IdAllocator",
    "RegistryRunner",
    "RunConfig",
    "RunReport",
    "RunnerResult",
    "Status",
    "SubprocessRunner",
    "UNIFORM_SHARE",
    "cges_probabilities",
    "cges_sample",
    "crossover_step",
    "draw_parent",
    "elite_pool",
    "elitist_mutation_step",
    "evaluate_candidate",
    "evolve",
    "initialize_population",
    "long_term_reflection_step",
    "native_marker",
    "native_seed_code",
    "request_seed",
    "resolve_entry_point",
    "select_parents",
    "short_term_reflection_step",
    "validate_predictions",
]
