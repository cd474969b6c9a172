"""Prompt assembly and parsing for the generation loop."""

from .kit import (
    FUNC_NAME,
    LONG_TERM_WORD_CAP,
    PROBLEM_DESCRIPTION,
    SHORT_TERM_WORD_CAP,
    TEMPLATE_NAMES,
    PromptBundle,
    ReflectionMemory,
    default_bundle,
    extract_code_block,
    format_stats_block,
    load_template,
    parse_stats_block,
    placeholders,
    render,
    render_text,
    truncate_words,
)

__all__ = [
    "FUNC_NAME",
    "LONG_TERM_WORD_CAP",
    "PROBLEM_DESCRIPTION",
    "SHORT_TERM_WORD_CAP",
    "TEMPLATE_NAMES",
    "PromptBundle",
    "ReflectionMemory",
    "default_bundle",
    "extract_code_block",
    "format_stats_block",
    "load_template",
    "parse_stats_block",
    "placeholders",
    "render",
    "render_text",
    "truncate_words",
]
