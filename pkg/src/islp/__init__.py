"""Iterated straight-line program toolkit.

Grammar construction and validation, polylog random access via exact
polynomial arithmetic, grammar transforms, logarithmic-height balancing,
repetitiveness measures, and corpus generators.
"""
from .grammar import (Grammar, GrammarError, OracleLimitError, ParseError,
                      ValidationError, emit, exp_len, expand, height,
                      parse_grammar, size, unfold_iter)
from .access import AccessContext, PositionError, access, extract
from .balance import balance, binarize
from .corpora import RandomIslpParams, gen_fibonacci, gen_sk, random_islp
from .measures import bwt_runs, delta, lz76_z, measure_report
from .transform import EditOp, apply_morphism, clamp_degree, edit, reverse

__all__ = [
    "AccessContext", "EditOp", "Grammar", "GrammarError", "OracleLimitError",
    "ParseError", "PositionError", "RandomIslpParams", "ValidationError",
    "access", "apply_morphism", "balance", "binarize", "bwt_runs",
    "clamp_degree", "delta", "edit", "emit", "exp_len", "expand", "extract",
    "gen_fibonacci", "gen_sk", "height", "lz76_z", "measure_report",
    "parse_grammar", "random_islp", "reverse", "size", "unfold_iter",
]
