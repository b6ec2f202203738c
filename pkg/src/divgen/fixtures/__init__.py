"""Bundled fixtures: a 12-function library and two contrast corpora."""

from __future__ import annotations

import json
from importlib import resources

from divgen.model import FunctionSchema, parse_function_library


def _load(name: str):
    with resources.files(__package__).joinpath(name).open(encoding="utf-8") as fh:
        return json.load(fh)


def fixture_library() -> list[FunctionSchema]:
    return parse_function_library(_load("library.json"))


def fixture_library_path() -> str:
    return str(resources.files(__package__).joinpath("library.json"))


def repetitive_corpus() -> list[str]:
    return _load("corpus_repetitive.json")


def varied_corpus() -> list[str]:
    return _load("corpus_varied.json")
