"""Traits with contracts: composition, compile-time generation, runtime
assertion checking and bounded modular verification."""

from .compose import hide, inline_and_drop, rename, sum_traits
from .corpus import CorpusEntry, load_corpus
from .errors import ComposeError, ComposeWarning, ContractViolation, EvalFault, MetaError, ParseError
from .metaeval import call_meta_fn, eval_program
from .nodes import TraitValue
from .parser import parse_expr, parse_program, parse_trait
from .printer import pretty
from .runtime import CHECKED, UNCHECKED, eval_expr, invoke
from .typecheck import check_program
from .verifier import VerifyConfig, VerifyReport, reverify_flattened, verify_program_sources, verify_trait

__all__ = [
    "CHECKED", "UNCHECKED", "ComposeError", "ComposeWarning", "ContractViolation",
    "CorpusEntry", "EvalFault", "MetaError", "ParseError", "TraitValue", "VerifyConfig",
    "VerifyReport", "call_meta_fn", "check_program", "eval_expr", "eval_program", "hide",
    "inline_and_drop", "invoke", "load_corpus", "parse_expr", "parse_program", "parse_trait",
    "pretty", "rename", "reverify_flattened", "sum_traits", "verify_program_sources", "verify_trait",
]
