"""Transactional smart contract toolkit.

Python bindings over the C++ core: parse and format the contract DSL,
derive read/write sets, rewrite transactional functions, run deterministic
multi-chain scenarios and check histories for serializability.
"""

from txsc._core import (
    TxscError,
    analyze,
    check_history,
    corpus_file,
    corpus_list,
    format,  # noqa: A004 - mirrors the CLI subcommand name
    parse,
    recipe_names,
    run_recipe,
    run_scenario,
    transform,
)

__all__ = [
    "TxscError",
    "analyze",
    "check_history",
    "corpus_file",
    "corpus_list",
    "format",
    "parse",
    "recipe_names",
    "run_recipe",
    "run_scenario",
    "transform",
]
