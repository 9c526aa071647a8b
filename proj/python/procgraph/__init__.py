"""Process-graph query engine: entity-relationship graphs over RDF-style
triples with entity, correlation, relationship, metadata, and select
statements compiled to a partition-parallel dataflow plan."""

from ._procgraph import (
    Graph,
    ProcGraphError,
    Session,
    find_paths,
    is_reachable,
    load_triples,
    parse_triples,
    __version__,
)

__all__ = [
    "Graph",
    "ProcGraphError",
    "Session",
    "find_paths",
    "is_reachable",
    "load_triples",
    "parse_triples",
    "__version__",
]
