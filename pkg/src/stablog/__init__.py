"""stablog: an embeddable relational logic engine with stable-model
negation and verified integrity constraints.

Programs are built either through the Python API (``Engine`` plus the
goal combinators) or from the surface syntax (``load_source`` /
``load_file``). The ``corpus`` module ships ready-made program
templates; ``bench`` runs them and reports answer and step counts.
"""

from .engine import Call, Conde, Conj, Engine, Eq, Fresh, State, conde, conj, eq, fail, fresh, succeed
from .constraints import EmitterPattern, PVar
from .parser import LoadedProgram, Query, SurfaceProgram, load_file, load_source, parse, print_program
from .bench import BenchRecord, bench_suite, count_models, run_query, suggest_order
from .errors import (
    DeferredGroundingError,
    DuplicateDefinitionError,
    DuplicateExternalError,
    ExternalArityError,
    NonDualPairError,
    NonGroundNegationError,
    ParseError,
    StablogError,
    StepLimitExceeded,
    UnboundVerifierVariableError,
    UnknownExternalError,
    UnknownPredicateError,
    VerifierError,
    VerifierTypeError,
    VerifierZeroDivisionError,
)
from .negation import Noto
from .terms import Pair, Var, make_list, nil, term_to_str

__version__ = "0.1.0"

__all__ = [
    "Engine", "State", "Eq", "Conj", "Conde", "Fresh", "Call", "Noto",
    "eq", "conj", "conde", "fresh", "succeed", "fail",
    "EmitterPattern", "PVar",
    "Var", "Pair", "nil", "make_list", "term_to_str",
    "SurfaceProgram", "LoadedProgram", "Query",
    "parse", "load_source", "load_file", "print_program",
    "BenchRecord", "run_query", "count_models", "suggest_order", "bench_suite",
    "StablogError", "ParseError", "UnknownPredicateError",
    "DuplicateDefinitionError", "NonGroundNegationError",
    "VerifierError", "VerifierTypeError", "VerifierZeroDivisionError",
    "UnboundVerifierVariableError", "UnknownExternalError",
    "DuplicateExternalError", "ExternalArityError",
    "DeferredGroundingError", "NonDualPairError", "StepLimitExceeded",
    "__version__",
]
