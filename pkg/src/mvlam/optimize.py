"""Slot minimization, orientation choice and the modular-addition construction.

In a selector ``h S_{r-1} .. S_0 seed`` an identity slot defers to the next
slot up (cyclically), so a row only needs one constant per maximal circular
run of equal values, placed at the run's last index.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .circuit import (
    _select,
    _square,
    _t_endo,
    _value_lams,
    build_binary,
    build_unary,
    matrix_frag,
    transposed_matrix_frag,
    value_frag,
)
from .errors import DomainError, TableError
from .fragments import A, BuiltTerm, Frag, ap, counted, identity, lam, var
from .reduce import Evaluator
from .table import FunctionTable
from .types import Arrow, arrow_type


@dataclass(frozen=True)
class SlotAssignment:
    """``slots[j]`` is the constant in the slot serving input ``j`` (``None``
    for ``I``); ``covers[k]`` lists the inputs resolved by constant slot ``k``."""

    slots: tuple[int | None, ...]
    covers: dict = field(default_factory=dict, compare=False)

    @property
    def const_count(self) -> int:
        return sum(s is not None for s in self.slots)

    def decode(self) -> list[int]:
        return [_select(self.slots, j) for j in range(len(self.slots))]


def minimize_run_slots(row: Sequence[int], radix: int | None = None) -> SlotAssignment:
    """One constant at the last index of each maximal circular run."""
    row = list(row)
    if not row:
        raise DomainError("row must be nonempty")
    r = len(row)
    bound = radix if radix is not None else r
    for v in row:
        if not isinstance(v, int) or not 0 <= v < bound:
            raise DomainError(f"row value {v!r} outside 0..{bound - 1}")
    if len(set(row)) == 1:
        slots = [None] * r
        slots[r - 1] = row[0]
    else:
        slots = [row[k] if row[k] != row[(k + 1) % r] else None for k in range(r)]
    covers: dict[int, list[int]] = {}
    for j in range(r):
        k = next((j + d) % r for d in range(r) if slots[(j + d) % r] is not None)
        covers.setdefault(k, []).append(j)
    result = SlotAssignment(tuple(slots), covers)
    if result.decode() != row:
        raise AssertionError("slot assignment does not reproduce the row")
    return result


def brute_force_min_slots(row: Sequence[int]) -> int:
    """Fewest constant slots realizing ``row``, by exhaustive search."""
    r = len(row)
    for size in range(1, r + 1):
        for chosen in itertools.combinations(range(r), size):
            slots = [row[k] if k in chosen else None for k in range(r)]
            if all(_select(slots, j) == row[j] for j in range(r)):
                return size
    raise AssertionError("unreachable: all-constant slots always work")


def build_unary_opt(table: FunctionTable) -> BuiltTerm:
    """``build_unary`` with identity slots wherever a run allows it."""
    if not isinstance(table, FunctionTable) or table.arity != 1:
        raise TableError("expected a unary table")
    return build_unary(table, minimize_run_slots(table.entries, table.output_radix).slots)


@dataclass(frozen=True)
class OrientationReport:
    original_consts: int
    transposed_consts: int
    chosen: str

    def to_json(self) -> dict:
        return {"original_consts": self.original_consts,
                "transposed_consts": self.transposed_consts, "chosen": self.chosen}


def _agrees(built: BuiltTerm, table: FunctionTable) -> bool:
    ev = Evaluator(built.term, table.input_radices, table.output_radix)
    return ev.table() == list(table.entries)


def build_binary_opt(table: FunctionTable) -> tuple[BuiltTerm, OrientationReport]:
    """Slot-minimized rows in both orientations; the one with fewer constants wins
    (ties keep the original)."""
    r = _square(table)
    rows = table.rows()
    cols = table.transpose().rows()
    row_slots = [minimize_run_slots(row, r) for row in rows]
    col_slots = [minimize_run_slots(col, r) for col in cols]
    n_orig = sum(s.const_count for s in row_slots)
    n_trans = sum(s.const_count for s in col_slots)
    ty = arrow_type(2, r)
    original = BuiltTerm.from_frag(matrix_frag(rows, r, [s.slots for s in row_slots]), ty,
                                   orientation="original")
    transposed = BuiltTerm.from_frag(
        transposed_matrix_frag(rows, r, [s.slots for s in col_slots]), ty,
        orientation="transposed")
    for built in (original, transposed):
        if not _agrees(built, table):
            raise AssertionError(f"{built.stats['orientation']} orientation disagrees with the table")
    report = OrientationReport(n_orig, n_trans, "transposed" if n_trans < n_orig else "original")
    return (transposed if report.chosen == "transposed" else original), report


def unoptimized_const_count(table: FunctionTable) -> int:
    return build_binary(table).const_count


# ---------------------------------------------------------------------------
# modular addition

def cyc_f_frag(i: int, r: int) -> Frag:
    """``fn F h f.. x => h f_{i-1} .. f_{i-r} (F v_0 I..I x)``."""
    inner = ap(ap(var("F"), value_frag(0, r)).inst(A), *(identity() for _ in range(r)), var("x"))
    slots = [var(f"f{(i - 1 - k) % r}") for k in range(r)]
    body = ap(var("h").inst(A), *slots, inner)
    return counted(lam(["F", "h"], _value_lams(r, body).gen()))


def build_cyc_f(i: int, r: int) -> BuiltTerm:
    if not isinstance(r, int) or r < 1 or not isinstance(i, int) or not 0 <= i < r:
        raise DomainError(f"need 0 <= i < r, got i={i!r}, r={r!r}")
    t = _t_endo(r)
    return BuiltTerm.from_frag(cyc_f_frag(i, r), Arrow(t, t))


def build_add_mod(r: int) -> BuiltTerm:
    """``add_mod h = h cyc_f_{r-1} .. cyc_f_0 I``: one lifted rotation per residue."""
    if not isinstance(r, int) or r < 1:
        raise DomainError(f"radix must be >= 1, got {r!r}")
    slots = [cyc_f_frag(i, r) for i in range(r - 1, -1, -1)]
    frag = lam("h", ap(var("h").inst(_t_endo(r)), *slots, identity()))
    return BuiltTerm.from_frag(frag, arrow_type(2, r))


def add_mod_table(r: int) -> FunctionTable:
    return FunctionTable.from_function(lambda a, b: (a + b) % r, (r, r), r)
