"""Prompt templates, the statistics block, and reflection memory.

Templates live as data files under ``templates/`` and are rendered by
straight token substitution. str.format is unusable here: the bound
values are Python source and stats dicts full of braces, and one token
({initial_long-term_reflection}) contains a hyphen. Substitution is a
single pass over the template text, so braces inside bound values are
never re-interpreted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

from ..errors import CodeExtractionError, DataValidationError, RenderError

FUNC_NAME = "predict_trajectory"
# the templates only reference this problem by placeholder; the concrete
# wording is ours
PROBLEM_DESCRIPTION = "pedestrian trajectory prediction."

SHORT_TERM_WORD_CAP = 200
LONG_TERM_WORD_CAP = 20

TEMPLATE_NAMES = (
    "system_generator",
    "system_reflector",
    "task_description",
    "user_init",
    "user_crossover",
    "user_short_reflection",
    "user_long_reflection",
    "user_mutation",
    "function_signature",
    "function_description",
    "seed_function",
    "external_knowledge",
)

_PLACEHOLDER_RE = re.compile(r"\{([A-Za-z_][A-Za-z0-9_-]*)\}")

_STATS_PREAMBLE = (
    "Statistics of trajectory index counts with the lowest ADE. These help us "
    "understand which heuristics contribute to the performance for at least "
    "some trajectories."
)


def load_template(name: str) -> str:
    if name not in TEMPLATE_NAMES:
        raise RenderError(f"unknown template {name!r}; known: {TEMPLATE_NAMES}")
    path = resources.files("trajforge.prompts").joinpath(f"templates/{name}.txt")
    return path.read_text(encoding="utf-8")


def placeholders(text: str) -> list[str]:
    """Placeholder tokens in order of first appearance."""
    seen = []
    for match in _PLACEHOLDER_RE.finditer(text):
        token = match.group(1)
        if token not in seen:
            seen.append(token)
    return seen


def render_text(template: str, bindings: dict) -> str:
    def substitute(match):
        token = match.group(1)
        if token not in bindings:
            raise RenderError(f"no binding for placeholder {{{token}}}")
        return str(bindings[token])

    return _PLACEHOLDER_RE.sub(substitute, template)


def render(template_name: str, bindings: dict) -> str:
    return render_text(load_template(template_name), bindings)


def format_stats_block(histogram: dict) -> str:
    """The <stats> block fed back into reflection and mutation prompts."""
    k = len(histogram)
    if sorted(histogram) != list(range(k)):
        raise DataValidationError(
            f"histogram keys must be exactly 0..{k - 1}, got {sorted(histogram)}"
        )
    entries = ", ".join(f"{i}: {int(histogram[i])}" for i in range(k))
    return (
        "<stats>\n"
        f"{_STATS_PREAMBLE}\n"
        f"Traj Index: Count: {{{entries}}}\n"
        "</stats>"
    )


_STATS_LINE_RE = re.compile(r"Traj Index: Count: \{([^}]*)\}")


def parse_stats_block(text: str) -> dict:
    match = _STATS_LINE_RE.search(text)
    if match is None:
        raise DataValidationError("no 'Traj Index: Count:' line found")
    histogram = {}
    body = match.group(1).strip()
    if body:
        for part in body.split(","):
            key, _, value = part.partition(":")
            try:
                histogram[int(key.strip())] = int(value.strip())
            except ValueError:
                raise DataValidationError(
                    f"malformed stats entry {part.strip()!r}"
                ) from None
    return histogram


def truncate_words(text: str, cap: int) -> str:
    """Cut at a word boundary; text within the cap passes through untouched."""
    words = text.split()
    if len(words) <= cap:
        return text
    return " ".join(words[:cap])


def extract_code_block(reply: str) -> str:
    """Contents of the first fenced code block, fence lines stripped."""
    match = re.search(r"```[^\n]*\n(.*?)```", reply, re.DOTALL)
    if match is None:
        raise CodeExtractionError("reply contains no fenced code block")
    return match.group(1)


@dataclass
class ReflectionMemory:
    """Verbal feedback carried between generations.

    short_term holds the latest reflection (200-word cap); long_term
    accumulates one capped line per generation (20 words each).
    """

    short_term: str = ""
    long_term: list = field(default_factory=list)

    def set_short_term(self, text: str) -> None:
        self.short_term = truncate_words(text, SHORT_TERM_WORD_CAP)

    def append_long_term(self, text: str) -> None:
        self.long_term.append(truncate_words(text, LONG_TERM_WORD_CAP))

    def long_term_text(self) -> str:
        return "\n".join(self.long_term)


@dataclass(frozen=True)
class PromptBundle:
    """The fixed prompt texts a run is parameterized by."""

    system_generator: str
    system_reflector: str
    task_description: str
    function_signature: str
    function_description: str
    seed_function: str
    external_knowledge: str

    def __post_init__(self):
        for name in (
            "system_generator",
            "system_reflector",
            "task_description",
            "function_signature",
            "function_description",
            "seed_function",
            "external_knowledge",
        ):
            if not getattr(self, name).strip():
                raise DataValidationError(f"PromptBundle field {name} is empty")

    def rendered_task(self) -> str:
        return render_text(
            self.task_description,
            {
                "function_name": FUNC_NAME,
                "problem_description": PROBLEM_DESCRIPTION,
                "function_description": self.function_description,
            },
        )

    def signature(self, version: str) -> str:
        return render_text(self.function_signature, {"version": version})


def default_bundle() -> PromptBundle:
    return PromptBundle(
        system_generator=load_template("system_generator"),
        system_reflector=load_template("system_reflector"),
        task_description=load_template("task_description"),
        function_signature=load_template("function_signature"),
        function_description=load_template("function_description"),
        seed_function=load_template("seed_function"),
        external_knowledge=load_template("external_knowledge"),
    )
