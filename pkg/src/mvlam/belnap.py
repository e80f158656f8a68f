"""The Belnap bilattice and the four-argument majority function over it.

Values are encoded as radix-4 integers ``⊥=0, f=1, t=2, ⊤=3`` (a linear
extension of the information order).  The majority function is decomposed as

    F(x1, x2, x3, x4) = ⊕_i  f_i(x1, x2) ⊗ g_i(x3, x4)      (i = 1..7)

and compiled to a single linear term of type ``T4 -> T4 -> T4 -> T4 -> T4``.
Two optional rewrites shrink the expression before compilation: merging two
summands into ``h0(f0(x1, x2), g0(x3, x4))`` and replacing operator tables by
degenerate ones on argument pairs that can never occur.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .circuit import build_binary, compose_linear
from .datasets import load_table
from .errors import CompileError, MvlamError
from .fragments import BuiltTerm
from .inductive import hybrid_compose
from .optimize import build_binary_opt
from .reduce import Evaluator
from .table import FunctionTable


class B4(enum.IntEnum):
    BOT = 0
    F = 1
    T = 2
    TOP = 3

    @property
    def symbol(self) -> str:
        return _SYMBOLS[self]

    @classmethod
    def parse(cls, text: str) -> "B4":
        key = text.strip().lower()
        if key not in _PARSE:
            raise ValueError(f"not a Belnap value: {text!r}")
        return _PARSE[key]


_SYMBOLS = {B4.BOT: "⊥", B4.F: "f", B4.T: "t", B4.TOP: "⊤"}
_PARSE = {"⊥": B4.BOT, "bot": B4.BOT, "bottom": B4.BOT, "f": B4.F, "false": B4.F,
          "t": B4.T, "true": B4.T, "⊤": B4.TOP, "top": B4.TOP}

BOT, F, T, TOP = B4.BOT, B4.F, B4.T, B4.TOP
VALUES = tuple(B4)
ALL_INPUTS = tuple(itertools.product(range(4), repeat=4))


@dataclass(frozen=True)
class BelnapTables:
    oplus: FunctionTable
    otimes: FunctionTable
    vee: FunctionTable
    wedge: FunctionTable

    def as_dict(self) -> dict[str, FunctionTable]:
        return {"oplus": self.oplus, "otimes": self.otimes, "vee": self.vee, "wedge": self.wedge}


@lru_cache(maxsize=None)
def belnap_tables() -> BelnapTables:
    return BelnapTables(*(load_table(f"belnap_{k}") for k in ("oplus", "otimes", "vee", "wedge")))


@dataclass(frozen=True)
class DecompositionPair:
    index: int
    f: FunctionTable
    g: FunctionTable


@lru_cache(maxsize=None)
def decomposition_pairs() -> tuple[DecompositionPair, ...]:
    return tuple(DecompositionPair(i, load_table(f"majority_f{i}"), load_table(f"majority_g{i}"))
                 for i in range(1, 8))


def pair(i: int) -> DecompositionPair:
    if not 1 <= i <= 7:
        raise ValueError(f"pair index {i} outside 1..7")
    return decomposition_pairs()[i - 1]


# ---------------------------------------------------------------------------
# lattice laws

def lattice_law_violations(tables: BelnapTables | None = None) -> list[str]:
    """Every failed law, as a readable string; empty when all hold."""
    tb = tables or belnap_tables()
    bad: list[str] = []
    for name, join, meet, bottom, top in (("k", tb.oplus, tb.otimes, BOT, TOP),
                                          ("t", tb.vee, tb.wedge, F, T)):
        for op_name, op in ((f"join_{name}", join), (f"meet_{name}", meet)):
            for x, y in itertools.product(VALUES, repeat=2):
                if op(x, y) != op(y, x):
                    bad.append(f"{op_name} not commutative at ({x.symbol},{y.symbol})")
            for x in VALUES:
                if op(x, x) != x:
                    bad.append(f"{op_name} not idempotent at {x.symbol}")
            for x, y, z in itertools.product(VALUES, repeat=3):
                if op(op(x, y), z) != op(x, op(y, z)):
                    bad.append(f"{op_name} not associative at ({x.symbol},{y.symbol},{z.symbol})")
        for x, y in itertools.product(VALUES, repeat=2):
            if join(x, meet(x, y)) != x or meet(x, join(x, y)) != x:
                bad.append(f"absorption fails for order {name} at ({x.symbol},{y.symbol})")
        for x in VALUES:
            if join(x, bottom) != x:
                bad.append(f"{bottom.symbol} is not a unit of join_{name} at {x.symbol}")
            if meet(x, top) != x:
                bad.append(f"{top.symbol} is not a unit of meet_{name} at {x.symbol}")
    return bad


# ---------------------------------------------------------------------------
# the function and its decomposition

def majority_oracle(x1: int, x2: int, x3: int, x4: int) -> B4:
    xs = (x1, x2, x3, x4)
    for x in xs:
        if x not in range(4):
            raise ValueError(f"not a Belnap value: {x!r}")
    if TOP in xs:
        return TOP
    if xs.count(T) >= 3:
        return T
    if xs.count(BOT) >= 3:
        return BOT
    return F


def majority_table() -> FunctionTable:
    return FunctionTable.from_function(majority_oracle, (4,) * 4, 4)


def eval_decomposition(x1: int, x2: int, x3: int, x4: int,
                       pairs: Sequence[DecompositionPair] | None = None,
                       tables: BelnapTables | None = None) -> B4:
    tb = tables or belnap_tables()
    acc = BOT
    for p in pairs or decomposition_pairs():
        acc = tb.oplus(acc, tb.otimes(p.f(x1, x2), p.g(x3, x4)))
    return B4(acc)


def _image(t: FunctionTable) -> frozenset[int]:
    return frozenset(t.entries)


# ---------------------------------------------------------------------------
# merging two summands

def theta1(x: int) -> B4:
    return B4(x)


def theta2(x: int) -> B4:
    return F if x == T else B4(x)


@dataclass(frozen=True)
class MergeTriple:
    """``h0(f0(x1, x2), g0(x3, x4)) = f_i ⊗ g_i ⊕ f_j ⊗ g_j`` where ``i`` is
    the summand reproduced by ``θ1`` and ``j`` the one reproduced by ``θ2``."""

    i: int
    j: int
    f0: FunctionTable
    g0: FunctionTable
    h0: FunctionTable

    theta1: Callable[[int], B4] = field(default=theta1, repr=False, compare=False)
    theta2: Callable[[int], B4] = field(default=theta2, repr=False, compare=False)


def _theta_between(src: FunctionTable, dst: FunctionTable) -> dict[int, int] | None:
    """The map ``θ`` with ``dst = θ ∘ src`` pointwise, if one exists."""
    theta: dict[int, int] = {}
    for a, b in zip(src.entries, dst.entries):
        if theta.setdefault(a, b) != b:
            return None
    return theta


def _theta2_shaped(theta: dict[int, int]) -> bool:
    return all(theta2(a) == b for a, b in theta.items())


def merge_status(i: int, j: int) -> str:
    """``"ok"`` or the reason the pair ``(i, j)`` cannot be merged."""
    pi, pj = pair(i), pair(j)
    if not (_image(pi.f) <= {BOT, TOP} and _image(pj.f) <= {BOT, TOP}):
        return "f image not within {⊥,⊤}"
    if any(a == TOP and b == TOP for a, b in zip(pi.f.entries, pj.f.entries)):
        return "⊤-preimages overlap"
    forward, backward = _theta_between(pi.g, pj.g), _theta_between(pj.g, pi.g)
    if (forward is not None and _theta2_shaped(forward)) or \
            (backward is not None and _theta2_shaped(backward)):
        return "ok"
    if forward is not None or backward is not None:
        return "mergeable in principle, unsupported shape"
    return "no θ relates the g tables"


def merge_pairs(i: int, j: int) -> MergeTriple | None:
    """The merged triple for summands ``i`` and ``j``, or ``None`` when the
    preconditions fail (see :func:`merge_status`)."""
    if merge_status(i, j) != "ok":
        return None
    pi, pj = pair(i), pair(j)
    forward = _theta_between(pi.g, pj.g)
    # base gets θ1, other gets θ2
    base, other = (pi, pj) if forward is not None and _theta2_shaped(forward) else (pj, pi)
    f0 = FunctionTable((4, 4), 4, tuple(
        int(F if a == TOP else T if b == TOP else BOT)
        for a, b in zip(base.f.entries, other.f.entries)))
    g0 = base.g
    rows = {BOT: lambda y: BOT, F: theta1, T: theta2, TOP: lambda y: TOP}
    h0 = FunctionTable.from_function(lambda x, y: int(rows[x](y)), (4, 4), 4)
    triple = MergeTriple(base.index, other.index, f0, g0, h0)
    tb = belnap_tables()
    for x1, x2, x3, x4 in ALL_INPUTS:
        want = tb.oplus(tb.otimes(pi.f(x1, x2), pi.g(x3, x4)),
                        tb.otimes(pj.f(x1, x2), pj.g(x3, x4)))
        if h0(f0(x1, x2), g0(x3, x4)) != want:
            return None
    return triple


# candidates named in the literature, tried in this order
MERGE_CANDIDATES: tuple[tuple[int, int], ...] = (
    (3, 4), (1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (1, 7), (5, 6), (5, 7), (6, 7))


def merge_candidates() -> list[dict]:
    return [{"pair": list(c), "status": merge_status(*c)} for c in MERGE_CANDIDATES]


def greedy_merges() -> list[MergeTriple]:
    """Disjoint successful merges, taken greedily in candidate order."""
    used: set[int] = set()
    out = []
    for i, j in MERGE_CANDIDATES:
        if i in used or j in used:
            continue
        triple = merge_pairs(i, j)
        if triple is not None:
            out.append(triple)
            used.update((i, j))
    return out


# ---------------------------------------------------------------------------
# don't cares

def dontcare_restrict(op: FunctionTable, left_image: Iterable[int],
                      right_image: Iterable[int]) -> FunctionTable:
    """Keep ``op`` on ``left_image × right_image``; fill every other entry
    from the nearest admissible column of its row, then whole rows from the
    nearest admissible row (ties go to the lower index)."""
    left, right = sorted(set(left_image)), sorted(set(right_image))
    if not left or not right:
        raise ValueError("images must be nonempty")
    r1, r2 = op.input_radices
    if not (set(left) <= set(range(r1)) and set(right) <= set(range(r2))):
        raise ValueError("image values outside the operator's domain")

    def nearest(k: int, allowed: list[int]) -> int:
        return min(allowed, key=lambda a: (abs(a - k), a))

    rows = op.rows()
    filled = [[rows[a][nearest(b, right)] for b in range(r2)] for a in range(r1)]
    return FunctionTable.from_matrix([filled[nearest(a, left)] for a in range(r1)],
                                     op.output_radix)


# ---------------------------------------------------------------------------
# the expression plan shared by the table pipeline and the compiler

@dataclass(frozen=True)
class MajorityOptions:
    merge: bool = False
    dontcare: bool = False
    row_opt: bool = False

    def to_json(self) -> dict:
        return {"merge": self.merge, "dontcare": self.dontcare, "row_opt": self.row_opt}

    @classmethod
    def all(cls) -> list["MajorityOptions"]:
        return [cls(*flags) for flags in itertools.product((False, True), repeat=3)]


@dataclass(frozen=True)
class Summand:
    """``op(left(x1, x2), right(x3, x4))``."""

    label: str
    left: FunctionTable
    right: FunctionTable
    op: FunctionTable


@dataclass(frozen=True)
class MajorityPlan:
    summands: tuple[Summand, ...]
    joins: tuple[FunctionTable, ...]  # joins[k] combines the running sum with summand k+1

    @property
    def subfunction_count(self) -> int:
        return 2 * len(self.summands)

    def evaluate(self, x1: int, x2: int, x3: int, x4: int) -> int:
        values = [s.op(s.left(x1, x2), s.right(x3, x4)) for s in self.summands]
        acc = values[0]
        for join, v in zip(self.joins, values[1:]):
            acc = join(acc, v)
        return acc

    def outputs(self) -> list[int]:
        return [self.evaluate(*x) for x in ALL_INPUTS]


def majority_plan(options: MajorityOptions = MajorityOptions()) -> MajorityPlan:
    tb = belnap_tables()
    merges = {m.i: m for m in greedy_merges()} if options.merge else {}
    absorbed = {m.j for m in merges.values()}
    summands = []
    for p in decomposition_pairs():
        if p.index in merges:
            m = merges[p.index]
            summands.append(Summand(f"h0[{m.i},{m.j}]", m.f0, m.g0, m.h0))
        elif p.index not in absorbed:
            summands.append(Summand(f"pair{p.index}", p.f, p.g, tb.otimes))
    if options.dontcare:
        summands = [s if s.op is not tb.otimes else
                    Summand(s.label, s.left, s.right,
                            dontcare_restrict(s.op, _image(s.left), _image(s.right)))
                    for s in summands]
    joins = []
    acc = _summand_values(summands[0])
    for s in summands[1:]:
        values = _summand_values(s)
        join = dontcare_restrict(tb.oplus, acc, values) if options.dontcare else tb.oplus
        joins.append(join)
        acc = {join(a, v) for a in acc for v in values}
    plan = MajorityPlan(tuple(summands), tuple(joins))
    if options.dontcare:
        # images are supersets of the reachable pairs, so this cannot fail
        if plan.outputs() != majority_plan(
                MajorityOptions(options.merge, False, options.row_opt)).outputs():
            raise AssertionError("don't-care substitution changed the output vector")
    return plan


def _summand_values(s: Summand) -> set[int]:
    return {s.op(a, b) for a in _image(s.left) for b in _image(s.right)}


# ---------------------------------------------------------------------------
# compilation

@dataclass(frozen=True)
class VerificationReport:
    agreement: int
    total: int
    node_count: int
    beta1_total: int
    beta2_total: int
    options: MajorityOptions
    subfunctions: int
    mismatches: tuple = ()

    @property
    def ok(self) -> bool:
        return self.agreement == self.total

    def to_json(self) -> dict:
        return {"agreement": self.agreement, "node_count": self.node_count,
                "beta1_total": self.beta1_total, "beta2_total": self.beta2_total,
                "options": self.options.to_json(), "subfunctions": self.subfunctions}


def _binary(table: FunctionTable, row_opt: bool) -> BuiltTerm:
    return build_binary_opt(table)[0] if row_opt else build_binary(table)


def _join_chain(joins: Sequence[BuiltTerm]) -> BuiltTerm:
    """``j_k(.. j_2(j_1(a_1, a_2), a_3) .., a_{k+1})``."""
    chain = joins[0]
    for j in joins[1:]:
        chain = compose_linear(j, 1, chain)
    return chain


def compile_plan(plan: MajorityPlan, row_opt: bool = False) -> BuiltTerm:
    cache: dict[FunctionTable, BuiltTerm] = {}

    def binary(t: FunctionTable) -> BuiltTerm:
        if t not in cache:
            cache[t] = _binary(t, row_opt)
        return cache[t]

    n = len(plan.summands)
    if n == 1:
        outer = binary(plan.summands[0].op)
    else:
        outer = _join_chain([binary(j) for j in plan.joins])
        # widen each summand slot into its operator, right to left so
        # earlier positions stay put
        for p in range(n, 0, -1):
            outer = compose_linear(outer, p, binary(plan.summands[p - 1].op))
    inners = []
    for s in plan.summands:
        inners.append((binary(s.left), [0, 1]))
        inners.append((binary(s.right), [2, 3]))
    built = hybrid_compose(outer, inners, n_sources=4)
    built.style = "belnap"
    built.stats["subfunctions"] = plan.subfunction_count
    return built


def compile_majority(options: MajorityOptions | dict | None = None,
                     verify: bool = True) -> tuple[BuiltTerm, VerificationReport | None]:
    """Compile the majority function; the report sweeps all 256 inputs."""
    if options is None:
        options = MajorityOptions()
    elif isinstance(options, dict):
        unknown = set(options) - {"merge", "dontcare", "row_opt"}
        if unknown:
            raise CompileError(f"unknown options {sorted(unknown)}")
        options = MajorityOptions(**{k: bool(v) for k, v in options.items()})
    try:
        plan = majority_plan(options)
        built = compile_plan(plan, options.row_opt)
    except (MvlamError, ValueError, AssertionError) as exc:
        raise CompileError(f"majority compilation failed: {exc}") from exc
    if not verify:
        return built, None
    return built, verify_majority(built, options, plan.subfunction_count)


def verify_majority(built: BuiltTerm, options: MajorityOptions, subfunctions: int
                    ) -> VerificationReport:
    ev = Evaluator(built.term, (4,) * 4, 4)
    b1 = b2 = agree = 0
    mismatches = []
    for x, (value, steps) in zip(ALL_INPUTS, ev.sweep(ALL_INPUTS)):
        b1 += steps.beta1
        b2 += steps.beta2
        want = majority_oracle(*x)
        if value == want:
            agree += 1
        else:
            mismatches.append((x, value, int(want)))
    return VerificationReport(agree, len(ALL_INPUTS), built.node_count, b1, b2, options,
                              subfunctions, tuple(mismatches))


__all__ = [
    "ALL_INPUTS", "B4", "BOT", "BelnapTables", "DecompositionPair", "F", "MERGE_CANDIDATES",
    "MajorityOptions", "MajorityPlan", "MergeTriple", "Summand", "T", "TOP", "VALUES",
    "VerificationReport", "belnap_tables", "compile_majority", "compile_plan",
    "decomposition_pairs", "dontcare_restrict", "eval_decomposition", "greedy_merges",
    "lattice_law_violations", "majority_oracle", "majority_plan", "majority_table",
    "merge_candidates", "merge_pairs", "merge_status", "pair", "theta1", "theta2",
    "verify_majority",
]
