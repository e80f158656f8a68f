"""Multiple-valued functions as closed linear lambda terms.

Terms are built from truth tables (circuit, inductive and hybrid styles),
type-checked against a certificate in a second-order linear type system,
and verified by normalizing them on every encoded input.
"""

from .belnap import B4, MajorityOptions, compile_majority, majority_oracle
from .checker import Certificate, CheckReport, Gen, Inst, check, is_monomorphic
from .circuit import (
    build_binary,
    build_conj,
    build_const_n,
    build_const_unary,
    build_copy,
    build_copy_n,
    build_cyc,
    build_disj,
    build_dnf,
    build_hetero,
    build_identity,
    build_literal,
    build_proj,
    build_unary,
    build_value,
    compose_linear,
    converter,
)
from .errors import (
    ArityError,
    BadDirective,
    CompileError,
    DomainError,
    EvalError,
    LinearityError,
    MvlamError,
    ParseError,
    SizeGuardExceeded,
    TableError,
    TypeMismatch,
    TypingError,
    WiringError,
)
from .estimator import MultiValuedLambdaClassifier
from .fragments import BuiltTerm
from .inductive import build_hybrid, build_inductive, hybrid_compose, lift_fun
from .optimize import (
    build_add_mod,
    build_binary_opt,
    build_cyc_f,
    build_unary_opt,
    minimize_run_slots,
)
from .reduce import (
    Evaluator,
    StepCount,
    decode_value,
    encode_value,
    enumerate_normal_inhabitants,
    normalize,
)
from .table import FunctionTable
from .terms import (
    Abs,
    App,
    LetPair,
    Pair,
    Var,
    alpha_eq,
    is_linear,
    parse_term,
    print_term,
)
from .types import arrow_type, base_type, parse_type, print_type

__version__ = "0.1.0"

__all__ = [
    "Abs", "App", "ArityError", "B4", "BadDirective", "BuiltTerm", "Certificate", "CheckReport",
    "CompileError", "DomainError", "EvalError", "Evaluator", "FunctionTable", "Gen", "Inst",
    "LetPair", "LinearityError", "MajorityOptions", "MultiValuedLambdaClassifier", "MvlamError",
    "Pair", "ParseError", "SizeGuardExceeded", "StepCount", "TableError", "TypeMismatch",
    "TypingError", "Var", "WiringError", "alpha_eq", "arrow_type", "base_type", "build_add_mod",
    "build_binary", "build_binary_opt", "build_conj", "build_const_n", "build_const_unary",
    "build_copy", "build_copy_n", "build_cyc", "build_cyc_f", "build_disj", "build_dnf",
    "build_hetero", "build_hybrid", "build_identity", "build_inductive", "build_literal",
    "build_proj", "build_unary", "build_unary_opt", "build_value", "check", "compile_majority",
    "compose_linear", "converter", "decode_value", "encode_value",
    "enumerate_normal_inhabitants", "hybrid_compose", "is_linear", "is_monomorphic", "lift_fun",
    "majority_oracle", "minimize_run_slots", "normalize", "parse_term", "parse_type",
    "print_term", "print_type", "__version__",
]
