"""Limits of first-order theories along chains of finite structures."""

from .automorphisms import (
    AutomorphismSet, SearchResult, OrbitCertificate, check_chain_condition,
    check_ambient_condition, enumerate_automorphisms, find_constrained_automorphism,
)
from .evaluate import TruthMatrix, evaluate, evaluate_with_assignment, tabulate
from .families import build_chain, family_catalog, get_family
from .games import ef_equivalent, elementary_up_to_rank
from .kernels import BACKEND
from .limits import (
    LimitReport, check_limit_equivalences, extract_convergent_subchain, liminf_member,
    limit_report, limsup_member,
)
from .parser import parse_formula
from .pools import SentencePool, generate_pool, type_pool
from .structure import ChainFamily, FiniteStructure, Signature, is_substructure, validate_structure
from .syntax import quantifier_rank, to_prenex, to_text

__version__ = "0.1.0"

__all__ = [
    "AutomorphismSet", "BACKEND", "ChainFamily", "FiniteStructure", "LimitReport", "SearchResult",
    "SentencePool", "Signature", "OrbitCertificate", "TruthMatrix", "build_chain",
    "check_limit_equivalences", "check_chain_condition", "check_ambient_condition",
    "ef_equivalent", "elementary_up_to_rank", "enumerate_automorphisms", "evaluate",
    "evaluate_with_assignment", "extract_convergent_subchain", "family_catalog",
    "find_constrained_automorphism", "generate_pool", "get_family", "is_substructure",
    "liminf_member", "limit_report", "limsup_member", "parse_formula", "quantifier_rank",
    "tabulate", "to_prenex", "to_text", "type_pool", "validate_structure",
]
