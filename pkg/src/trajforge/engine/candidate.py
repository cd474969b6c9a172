"""Candidate lifecycle types, run hyperparameters, and the elite archive."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from ..errors import ContractViolation, DataValidationError


class Status(str, Enum):
    PENDING = "pending"
    OK = "ok"
    EXEC_ERROR = "exec_error"
    TIMEOUT = "timeout"
    INVALID_OUTPUT = "invalid_output"


class Birth(str, Enum):
    SEED = "seed"
    INIT = "init"
    CROSSOVER = "crossover"
    MUTATION = "mutation"


_PARENT_COUNT = {
    Birth.SEED: 0,
    Birth.INIT: 0,
    Birth.CROSSOVER: 2,
    Birth.MUTATION: 1,
}


@dataclass
class Candidate:
    """One heuristic program moving through the generation loop.

    Instances start pending and are finalized exactly once, through
    mark_ok or mark_failed; the status/objective coupling is enforced
    there and at construction.
    """

    id: str
    code: str
    birth: Birth
    generation: int
    parents: list = field(default_factory=list)
    status: Status = Status.PENDING
    metrics: object = None
    objective_j: float = None
    histogram: dict = None
    failure: str = ""

    def __post_init__(self):
        expected = _PARENT_COUNT[self.birth]
        if len(self.parents) != expected:
            raise ContractViolation(
                f"{self.birth.value} candidate must have {expected} parents, "
                f"got {len(self.parents)}"
            )
        self._check_status_coupling()

    def _check_status_coupling(self):
        has_j = self.objective_j is not None and math.isfinite(self.objective_j)
        if (self.status == Status.OK) != has_j:
            raise ContractViolation(
                f"candidate {self.id}: status {self.status.value} inconsistent "
                f"with objective_j={self.objective_j}"
            )

    def mark_ok(self, metrics, objective_j: float, histogram: dict) -> None:
        if self.status != Status.PENDING:
            raise ContractViolation(f"candidate {self.id} already finalized")
        if not math.isfinite(objective_j):
            raise ContractViolation("objective must be finite for ok candidates")
        self.metrics = metrics
        self.objective_j = float(objective_j)
        self.histogram = dict(histogram)
        self.status = Status.OK
        self._check_status_coupling()

    def mark_failed(self, status: Status, reason: str) -> None:
        if self.status != Status.PENDING:
            raise ContractViolation(f"candidate {self.id} already finalized")
        if status in (Status.PENDING, Status.OK):
            raise ContractViolation(f"{status.value} is not a failure status")
        self.status = status
        self.failure = reason
        self._check_status_coupling()


@dataclass(frozen=True)
class RunConfig:
    population_size: int = 10
    init_count: int = 8
    elite_ratio: float = 0.3
    crossover_rate: float = 1.0
    mutation_rate: float = 0.5
    cges_temperature: float = 1.0
    k_samples: int = 20
    t_obs: int = 8
    t_pred: int = 12
    w_ade: float = 0.6
    w_fde: float = 0.4
    max_generations: int = 5
    eval_timeout_seconds: float = 20.0
    rng_seed: int = 0

    def __post_init__(self):
        if not (0 < self.elite_ratio <= 1):
            raise ContractViolation(f"elite_ratio must be in (0,1], got {self.elite_ratio}")
        for name in ("crossover_rate", "mutation_rate"):
            rate = getattr(self, name)
            if not (0 <= rate <= 1):
                raise ContractViolation(f"{name} must be in [0,1], got {rate}")
        if self.cges_temperature <= 0:
            raise ContractViolation("cges_temperature must be positive")
        for name in ("population_size", "init_count", "k_samples", "t_obs", "t_pred"):
            if getattr(self, name) < 1:
                raise ContractViolation(f"{name} must be >= 1")
        if self.max_generations < 0:
            raise ContractViolation("max_generations must be >= 0")
        if self.w_ade < 0 or self.w_fde < 0:
            raise ContractViolation("objective weights must be nonnegative")


@dataclass(frozen=True)
class ArchiveEntry:
    candidate_id: str
    objective_j: float
    generation: int


class EliteArchive:
    """Append-only record of every successful candidate across the run."""

    def __init__(self):
        self._entries: list[ArchiveEntry] = []

    def append(self, candidate: Candidate, generation: int = None) -> ArchiveEntry:
        if candidate.status != Status.OK:
            raise DataValidationError(
                f"only ok candidates enter the archive, got {candidate.status.value}"
            )
        entry = ArchiveEntry(
            candidate_id=candidate.id,
            objective_j=candidate.objective_j,
            generation=candidate.generation if generation is None else generation,
        )
        self._entries.append(entry)
        return entry

    @property
    def entries(self) -> tuple:
        return tuple(self._entries)

    def __len__(self):
        return len(self._entries)

    def best(self) -> ArchiveEntry:
        if not self._entries:
            raise DataValidationError("archive is empty")
        return min(self._entries, key=lambda e: (e.objective_j, e.candidate_id))


class IdAllocator:
    def __init__(self, prefix: str = "c"):
        self.prefix = prefix
        self._next = 0

    def take(self) -> str:
        out = f"{self.prefix}{self._next:04d}"
        self._next += 1
        return out
