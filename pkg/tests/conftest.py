"""Shared fixtures: the braid corpus, a quiet connection and cached builds."""

import pytest

from linkforge import process
from linkforge.braid import parse_braid_word
from linkforge.connection import PipelineConnection, build_parser

CORPUS = {
    "hopf": ("1 1", 2),
    "trefoil": ("1 1 1", 2),
    "mirror_trefoil": ("-1 -1 -1", 2),
    "figure_eight": ("1 -2 1 -2", 3),
    "stabilized_trefoil": ("1 1 1 2", 3),
    "chain": ("1 1 2 2", 3),
}


@pytest.fixture(scope="session")
def connection() -> PipelineConnection:
    """A connection for calling the pipeline directly."""
    return PipelineConnection.create_connection_from_args(["trace-dump", "--trace", "unused.json"])


@pytest.fixture(scope="session")
def built(connection):
    """Build corpus entries once per session, by name."""
    cache = {}

    def get(name: str) -> process.BuildResult:
        if name not in cache:
            cache[name] = process.build(parse_braid_word(*CORPUS[name]), connection)
        return cache[name]

    return get
