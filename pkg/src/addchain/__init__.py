"""Exact computation toolkit for addition chains."""

from .core import (
    Chain,
    ChainStep,
    binary_chain,
    floor_log2,
    format_chain,
    infer_operands,
    nu,
    parse_chain,
    validate_chain,
)
from .search import SearchConfig, SearchResult, ell, ell_oracle, shortest_chain

__all__ = [
    "Chain",
    "ChainStep",
    "SearchConfig",
    "SearchResult",
    "binary_chain",
    "ell",
    "ell_oracle",
    "floor_log2",
    "format_chain",
    "infer_operands",
    "nu",
    "parse_chain",
    "shortest_chain",
    "validate_chain",
]

__version__ = "0.1.0"
