"""Test oracle generation for unit-test prefixes."""

from ._core import (
    BadRecord,
    ParseError,
    ProtocolError,
    ScorerError,
    ScorerUnavailable,
    VocabFormatError,
    __version__,
    aggregate,
    build_vocab,
    candidates,
    canonical_whitespace,
    classification_metrics,
    coverage,
    infer,
    judge,
    parse_test,
    render_test,
    run_cli,
    strip_oracles,
    weighted_coin,
)

__all__ = [
    "BadRecord",
    "ParseError",
    "ProtocolError",
    "ScorerError",
    "ScorerUnavailable",
    "VocabFormatError",
    "__version__",
    "aggregate",
    "build_vocab",
    "candidates",
    "canonical_whitespace",
    "classification_metrics",
    "coverage",
    "infer",
    "judge",
    "parse_test",
    "render_test",
    "run_cli",
    "strip_oracles",
    "weighted_coin",
]
